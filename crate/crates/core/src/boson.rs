// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated single-mode auxiliary field.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, CVector, ZERO};
use crate::state::{check_dim, Basis, HermitianOperator, PureState};

/// Largest amplitude tolerated at the top retained Fock level.
pub const BOUNDARY_AMPLITUDE: f64 = 1e-6;
pub const DEFAULT_CUTOFF_CEILING: usize = 4096;
pub const DEFAULT_LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Fock space `{|0>, ..., |n_cut>}`. `leakage` records the tail probability
/// measured when the basis was chosen by [`choose_cutoff`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockBasis {
    n_cut: usize,
    leakage: Option<f64>,
}

impl FockBasis {
    pub fn new(n_cut: usize) -> Result<Self> {
        if n_cut < 1 {
            return Err(Error::InvalidArgument("Fock basis needs n_cut >= 1".into()));
        }
        Ok(Self { n_cut, leakage: None })
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn dim(&self) -> usize {
        self.n_cut + 1
    }

    pub fn leakage(&self) -> Option<f64> {
        self.leakage
    }

    fn with_leakage(mut self, leakage: f64) -> Self {
        self.leakage = Some(leakage);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxKind {
    SqueezedCoherent,
    Fock,
}

/// Initial auxiliary state `D(β) S(r) |0>` or a Fock state `|n>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxStateSpec {
    #[serde(default, with = "complex_serde")]
    pub beta: Complex64,
    #[serde(default)]
    pub r: f64,
    #[serde(default = "default_kind")]
    pub kind: AuxKind,
    #[serde(default)]
    pub fock_n: usize,
}

fn default_kind() -> AuxKind {
    AuxKind::SqueezedCoherent
}

impl AuxStateSpec {
    pub fn coherent(beta: f64) -> Self {
        Self::squeezed(beta, 0.0)
    }

    pub fn squeezed(beta: f64, r: f64) -> Self {
        Self {
            beta: cr(beta),
            r,
            kind: AuxKind::SqueezedCoherent,
            fock_n: 0,
        }
    }

    pub fn fock(n: usize) -> Self {
        Self {
            beta: ZERO,
            r: 0.0,
            kind: AuxKind::Fock,
            fock_n: n,
        }
    }

    /// Real-β squeezed coherent state with mean photon number `n_b`.
    pub fn from_photons(n_b: f64, r: f64) -> Result<Self> {
        let beta_sq = n_b - r.sinh().powi(2);
        if !beta_sq.is_finite() || beta_sq < 0.0 {
            return Err(Error::Range(format!(
                "N_B = {n_b} is below the squeezing contribution sinh²({r})"
            )));
        }
        Ok(Self::squeezed(beta_sq.sqrt(), r))
    }

    pub fn is_fock(&self) -> bool {
        self.kind == AuxKind::Fock
    }

    pub fn beta_abs(&self) -> f64 {
        self.beta.norm()
    }

    pub fn mean_photons(&self) -> f64 {
        match self.kind {
            AuxKind::Fock => self.fock_n as f64,
            AuxKind::SqueezedCoherent => self.beta.norm_sqr() + self.r.sinh().powi(2),
        }
    }

    pub fn number_variance(&self) -> f64 {
        match self.kind {
            AuxKind::Fock => 0.0,
            AuxKind::SqueezedCoherent => {
                let r = self.r;
                let angle = 2.0 * self.beta.arg();
                self.beta.norm_sqr() * ((2.0 * r).cosh() - (2.0 * r).sinh() * angle.cos())
                    + 2.0 * (r.sinh() * r.cosh()).powi(2)
            }
        }
    }

    /// `V(X)`; for real β, `r > 0` squeezes this quadrature.
    pub fn x_variance(&self) -> f64 {
        match self.kind {
            AuxKind::Fock => 2.0 * self.fock_n as f64 + 1.0,
            AuxKind::SqueezedCoherent => (-2.0 * self.r).exp(),
        }
    }

    pub fn y_variance(&self) -> f64 {
        match self.kind {
            AuxKind::Fock => 2.0 * self.fock_n as f64 + 1.0,
            AuxKind::SqueezedCoherent => (2.0 * self.r).exp(),
        }
    }

    /// `4 V(n)`.
    pub fn number_qfi(&self) -> f64 {
        4.0 * self.number_variance()
    }
}

pub(crate) mod complex_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if z.im == 0.0 {
            s.serialize_f64(z.re)
        } else {
            [z.re, z.im].serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Real(re) => cr(re),
            Repr::Pair([re, im]) => c(re, im),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeOperator {
    Annihilation,
    Number,
    X,
    Y,
}

pub fn mode_matrix(which: ModeOperator, basis: &FockBasis) -> CMatrix {
    let n = basis.dim();
    let lowering = || {
        let mut b = CMatrix::zeros(n, n);
        for k in 1..n {
            b[(k - 1, k)] = cr((k as f64).sqrt());
        }
        b
    };
    match which {
        ModeOperator::Annihilation => lowering(),
        ModeOperator::Number => linalg::real_diagonal(&(0..n).map(|k| k as f64).collect::<Vec<_>>()),
        ModeOperator::X => {
            let b = lowering();
            &b + b.adjoint()
        }
        ModeOperator::Y => {
            let b = lowering();
            (&b - b.adjoint()) * c(0.0, -1.0)
        }
    }
}

/// Hermitian mode operators (`n`, `X`, `Y`); the annihilation operator is not
/// Hermitian and is only available through [`mode_matrix`].
pub fn mode_operator(which: ModeOperator, basis: &FockBasis) -> Result<HermitianOperator> {
    let label = match which {
        ModeOperator::Annihilation => {
            return Err(Error::InvalidArgument(
                "the annihilation operator is not Hermitian".into(),
            ))
        }
        ModeOperator::Number => "n",
        ModeOperator::X => "X",
        ModeOperator::Y => "Y",
    };
    Ok(HermitianOperator::from_unchecked(mode_matrix(which, basis)).with_label(label))
}

/// `b v` on the truncated space.
fn lower(v: &CVector) -> CVector {
    let n = v.len();
    CVector::from_fn(n, |k, _| {
        if k + 1 < n {
            v[k + 1] * ((k + 1) as f64).sqrt()
        } else {
            ZERO
        }
    })
}

/// `b† v` on the truncated space.
fn raise(v: &CVector) -> CVector {
    CVector::from_fn(v.len(), |k, _| if k > 0 { v[k - 1] * (k as f64).sqrt() } else { ZERO })
}

/// `exp(A) v` by a Taylor series split into `⌈bound⌉` steps, where `bound`
/// is an upper estimate of `‖A‖` and `apply` computes `A v`.
fn exp_apply(apply: impl Fn(&CVector) -> CVector, bound: f64, v: CVector) -> CVector {
    let steps = bound.ceil().max(1.0) as usize;
    let scale = cr(1.0 / steps as f64);
    let mut out = v;
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..80 {
            term = apply(&term) * scale / cr(k as f64);
            sum += &term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
        }
        out = sum;
    }
    out
}

fn build_squeezed_coherent(spec: &AuxStateSpec, basis: &FockBasis) -> Result<CVector> {
    let n = basis.dim();
    let n_cut = basis.n_cut() as f64;
    let mut v = CVector::from_element(n, ZERO);
    v[0] = cr(1.0);
    if spec.r != 0.0 {
        let half_r = cr(spec.r / 2.0);
        let generator = |x: &CVector| (lower(&lower(x)) - raise(&raise(x))) * half_r;
        v = exp_apply(generator, spec.r.abs() * (n_cut + 1.0), v);
    }
    if spec.beta != ZERO {
        let beta = spec.beta;
        let generator = |x: &CVector| raise(x) * beta - lower(x) * beta.conj();
        v = exp_apply(generator, 2.0 * beta.norm() * n_cut.sqrt(), v);
    }
    Ok(v)
}

fn tail_probability(v: &CVector, from: usize) -> f64 {
    v.iter().skip(from).map(|z| z.norm_sqr()).sum()
}

/// `D(β) S(r) |0>` with `S(r) = exp[r (b² − b†²) / 2]`.
pub fn squeezed_coherent(spec: &AuxStateSpec, basis: &FockBasis) -> Result<PureState> {
    if spec.is_fock() {
        return fock_state(spec.fock_n, basis);
    }
    let v = build_squeezed_coherent(spec, basis)?;
    let boundary = v[basis.n_cut()].norm();
    if boundary > BOUNDARY_AMPLITUDE {
        return Err(Error::Truncation {
            amplitude: boundary,
            n_cut: basis.n_cut(),
        });
    }
    PureState::normalized(Basis::Fock(*basis), v)
}

pub fn fock_state(n: usize, basis: &FockBasis) -> Result<PureState> {
    if n > basis.n_cut() {
        return Err(Error::IndexOutOfRange {
            index: n,
            dim: basis.dim(),
        });
    }
    let mut v = CVector::from_element(basis.dim(), ZERO);
    v[n] = cr(1.0);
    PureState::new(Basis::Fock(*basis), v)
}

/// Auxiliary state for `spec` in the basis returned by [`choose_cutoff`].
pub fn aux_state(spec: &AuxStateSpec, tolerance: f64) -> Result<PureState> {
    let basis = choose_cutoff(spec, tolerance)?;
    squeezed_coherent(spec, &basis)
}

/// `4 V(G)` in the pure state.
pub fn aux_qfi(state: &PureState, generator: &HermitianOperator) -> Result<f64> {
    check_dim(state.dim(), generator.dim())?;
    Ok(4.0 * linalg::variance(generator.matrix(), state.amplitudes()))
}

/// Smallest cutoff of the form `⌈N_B + c e^{|r|} √(N_B + 1)⌉`, with `c`
/// scanned upward from 8, whose state keeps the probability beyond
/// `n_cut − 2` below `tolerance`.
pub fn choose_cutoff(spec: &AuxStateSpec, tolerance: f64) -> Result<FockBasis> {
    choose_cutoff_with_ceiling(spec, tolerance, DEFAULT_CUTOFF_CEILING)
}

pub fn choose_cutoff_with_ceiling(spec: &AuxStateSpec, tolerance: f64, ceiling: usize) -> Result<FockBasis> {
    if !(tolerance > 0.0 && tolerance <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "leakage tolerance {tolerance} outside (0, 1e-3]"
        )));
    }
    if spec.is_fock() {
        let n_cut = (spec.fock_n + 2).max(2);
        if n_cut > ceiling {
            return Err(Error::CutoffSearchFailed { ceiling, tolerance });
        }
        return Ok(FockBasis::new(n_cut)?.with_leakage(0.0));
    }
    let n_b = spec.mean_photons();
    let width = spec.r.abs().exp() * (n_b + 1.0).sqrt();
    let mut coeff = 8.0;
    let mut previous = 0;
    loop {
        let n_cut = ((n_b + coeff * width).ceil() as usize).max(4);
        if n_cut > ceiling {
            return Err(Error::CutoffSearchFailed { ceiling, tolerance });
        }
        if n_cut != previous {
            let basis = FockBasis::new(n_cut)?;
            let v = build_squeezed_coherent(spec, &basis)?;
            let leakage = tail_probability(&v, n_cut - 1);
            if leakage < tolerance && v[n_cut].norm() <= BOUNDARY_AMPLITUDE {
                return Ok(basis.with_leakage(leakage));
            }
            previous = n_cut;
        }
        coeff += 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, I};

    fn expect(state: &PureState, which: ModeOperator, basis: &FockBasis) -> f64 {
        state.expectation(&mode_operator(which, basis).unwrap()).unwrap()
    }

    #[test]
    fn operators() {
        let basis = FockBasis::new(3).unwrap();
        let n = mode_matrix(ModeOperator::Number, &basis);
        assert_eq!(n, linalg::real_diagonal(&[0.0, 1.0, 2.0, 3.0]));
        let b = mode_matrix(ModeOperator::Annihilation, &basis);
        assert!(max_abs(&(b.adjoint() * &b - n)) < 1e-14);

        let big = FockBasis::new(10).unwrap();
        let x = mode_matrix(ModeOperator::X, &big);
        let y = mode_matrix(ModeOperator::Y, &big);
        let comm = linalg::commutator(&x, &y);
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { I * 2.0 } else { ZERO };
                assert!((comm[(i, j)] - want).norm() < 1e-12);
            }
        }
        assert!(mode_operator(ModeOperator::Annihilation, &big).is_err());
    }

    #[test]
    fn coherent_state_moments() {
        let spec = AuxStateSpec::coherent(3.0);
        let basis = choose_cutoff(&spec, 1e-10).unwrap();
        let psi = squeezed_coherent(&spec, &basis).unwrap();
        assert!((expect(&psi, ModeOperator::X, &basis) - 6.0).abs() < 1e-8);
        assert!((expect(&psi, ModeOperator::Number, &basis) - 9.0).abs() < 1e-8);
    }

    #[test]
    fn vacuum() {
        let spec = AuxStateSpec::coherent(0.0);
        let basis = choose_cutoff(&spec, 1e-10).unwrap();
        assert!(basis.n_cut() <= 8);
        let psi = squeezed_coherent(&spec, &basis).unwrap();
        assert!((psi.amplitudes()[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squeezed_moments_and_sign() {
        for &(beta, r) in &[(50f64.sqrt(), 0.352), (3.0, -0.4), (2.0, 0.7)] {
            let spec = AuxStateSpec::squeezed(beta, r);
            let basis = choose_cutoff(&spec, 1e-10).unwrap();
            let psi = squeezed_coherent(&spec, &basis).unwrap();
            let n_mean = expect(&psi, ModeOperator::Number, &basis);
            assert!((n_mean - spec.mean_photons()).abs() / spec.mean_photons() < 1e-6);
            let vn = psi
                .variance(&mode_operator(ModeOperator::Number, &basis).unwrap())
                .unwrap();
            assert!((vn - spec.number_variance()).abs() / spec.number_variance() < 1e-6);
            let vx = psi.variance(&mode_operator(ModeOperator::X, &basis).unwrap()).unwrap();
            let vy = psi.variance(&mode_operator(ModeOperator::Y, &basis).unwrap()).unwrap();
            assert!((vx - (-2.0 * r).exp()).abs() < 1e-6);
            assert!((vy - (2.0 * r).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn fock_states() {
        let basis = FockBasis::new(32).unwrap();
        let five = fock_state(5, &basis).unwrap();
        let vy = five.variance(&mode_operator(ModeOperator::Y, &basis).unwrap()).unwrap();
        assert!((vy - 11.0).abs() < 1e-12);
        let n_op = mode_operator(ModeOperator::Number, &basis).unwrap();
        assert_eq!(aux_qfi(&five, &n_op).unwrap(), 0.0);
        assert!(matches!(fock_state(33, &basis), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn cutoff_grows_with_squeezing() {
        let plain = choose_cutoff(&AuxStateSpec::squeezed(50f64.sqrt(), 0.0), 1e-10).unwrap();
        let squeezed = choose_cutoff(&AuxStateSpec::squeezed(50f64.sqrt(), 1.0), 1e-10).unwrap();
        assert!(squeezed.n_cut() > plain.n_cut());
        assert!(plain.leakage().unwrap() < 1e-10);
        assert!(matches!(
            choose_cutoff_with_ceiling(&AuxStateSpec::coherent(30.0), 1e-10, 100),
            Err(Error::CutoffSearchFailed { .. })
        ));
    }

    #[test]
    fn truncation_is_reported() {
        let basis = FockBasis::new(20).unwrap();
        assert!(matches!(
            squeezed_coherent(&AuxStateSpec::coherent(5.0), &basis),
            Err(Error::Truncation { .. })
        ));
    }

    /// `exp(A) v` through the spectrum of the Hermitian `iA`.
    fn exp_dense(a: &CMatrix, v: &CVector) -> CVector {
        crate::linalg::HermitianSpectrum::new(&(a * c(0.0, 1.0)))
            .unwrap()
            .evolve(v, 1.0)
    }

    #[test]
    fn series_construction_matches_dense_exponentials() {
        let spec = AuxStateSpec {
            beta: c(2.5, -0.7),
            r: -0.45,
            kind: AuxKind::SqueezedCoherent,
            fock_n: 0,
        };
        let basis = FockBasis::new(60).unwrap();
        let b = mode_matrix(ModeOperator::Annihilation, &basis);
        let bd = b.adjoint();
        let mut v = CVector::from_element(basis.dim(), ZERO);
        v[0] = cr(1.0);
        v = exp_dense(&((&b * &b - &bd * &bd) * cr(spec.r / 2.0)), &v);
        v = exp_dense(&(&bd * spec.beta - &b * spec.beta.conj()), &v);
        let fast = build_squeezed_coherent(&spec, &basis).unwrap();
        assert!((fast - v).norm() < 1e-11);
    }

    #[test]
    fn from_photons_round_trip() {
        let spec = AuxStateSpec::from_photons(100.0, 0.5).unwrap();
        assert!((spec.mean_photons() - 100.0).abs() < 1e-12);
        assert!(AuxStateSpec::from_photons(0.1, 2.0).is_err());
    }

    #[test]
    fn serde_accepts_real_or_pair() {
        let a: AuxStateSpec = serde_json::from_str(r#"{"beta": 2.5, "r": 0.1}"#).unwrap();
        assert_eq!(a.beta, cr(2.5));
        let b: AuxStateSpec = serde_json::from_str(r#"{"beta": [1.0, -1.0]}"#).unwrap();
        assert_eq!(b.beta, c(1.0, -1.0));
        let f: AuxStateSpec = serde_json::from_str(r#"{"kind": "fock", "fock_n": 7}"#).unwrap();
        assert_eq!(f.mean_photons(), 7.0);
    }
}
