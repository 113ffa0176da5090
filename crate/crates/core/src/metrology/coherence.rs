// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use crate::boson::{AuxKind, AuxStateSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE};
use crate::state::{check_dim, DensityMatrix, HermitianOperator, PureState};

/// Below this `|r|` the squeezed closed form is replaced by its coherent limit.
pub const R_EPS: f64 = 1e-6;
/// Phase step used while following the square-root branch along `τ`.
const BRANCH_STEP: f64 = 0.05;

/// `C_{mn} = <ψ_B| e^{-i(λ_m − λ_n) G_B τ} |ψ_B>`.
#[derive(Debug, Clone)]
pub struct CoherenceMatrix {
    entries: CMatrix,
}

impl CoherenceMatrix {
    pub const MODULUS_TOLERANCE: f64 = 1e-12;

    pub fn new(mut entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                actual: entries.ncols(),
            });
        }
        let n = entries.nrows();
        for i in 0..n {
            if (entries[(i, i)] - ONE).norm() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "coherence diagonal entry {i} is {}",
                    entries[(i, i)]
                )));
            }
            entries[(i, i)] = ONE;
        }
        if linalg::hermiticity_defect(&entries) > 1e-12 {
            return Err(Error::NotHermitian(linalg::hermiticity_defect(&entries)));
        }
        let largest = linalg::max_abs(&entries);
        if largest > 1.0 + Self::MODULUS_TOLERANCE {
            return Err(Error::Range(format!("coherence modulus {largest} exceeds 1")));
        }
        Ok(Self { entries })
    }

    /// Toeplitz matrix `C_{mn} = profile[m − n]` for `m ≥ n`, conjugated above the diagonal.
    pub fn from_profile(profile: &[Complex64], dim: usize) -> Result<Self> {
        if profile.len() < dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: profile.len(),
            });
        }
        let entries = CMatrix::from_fn(
            dim,
            dim,
            |m, n| {
                if m >= n {
                    profile[m - n]
                } else {
                    profile[n - m].conj()
                }
            },
        );
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Extreme off-diagonal term `C_{max, min}`.
    pub fn c_max(&self) -> Complex64 {
        self.entries[(self.dim() - 1, 0)]
    }

    /// `ρ_{mn} = c_m c_n* C_{mn}` for probe amplitudes `c` in the generator eigenbasis.
    pub fn reduced_density(&self, psi_a: &PureState) -> Result<DensityMatrix> {
        check_dim(self.dim(), psi_a.dim())?;
        let c = psi_a.amplitudes();
        let rho = CMatrix::from_fn(self.dim(), self.dim(), |m, n| c[m] * c[n].conj() * self.entries[(m, n)]);
        Ok(DensityMatrix::from_unchecked(rho))
    }
}

/// Numerical overlaps through the spectral decomposition of `G_B`.
pub fn coherence_numeric(
    psi_b: &PureState,
    g_b: &HermitianOperator,
    tau: f64,
    eigenvalues: &[f64],
) -> Result<CoherenceMatrix> {
    check_dim(g_b.dim(), psi_b.dim())?;
    let g = g_b.matrix();
    let off_diagonal = (0..g.nrows())
        .flat_map(|i| (0..g.ncols()).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .any(|(i, j)| g[(i, j)].norm() > 0.0);
    let (levels, populations): (Vec<f64>, Vec<f64>) = if off_diagonal {
        let spectrum = g_b.spectrum()?;
        let coeffs = spectrum.vectors.adjoint() * psi_b.amplitudes();
        (spectrum.values, coeffs.iter().map(|z| z.norm_sqr()).collect())
    } else {
        (
            (0..g.nrows()).map(|k| g[(k, k)].re).collect(),
            psi_b.amplitudes().iter().map(|z| z.norm_sqr()).collect(),
        )
    };
    let n = eigenvalues.len();
    let mut entries = CMatrix::from_element(n, n, ONE);
    for m in 0..n {
        for k in 0..m {
            let delta = eigenvalues[m] - eigenvalues[k];
            let v: Complex64 = levels
                .iter()
                .zip(&populations)
                .map(|(g, p)| Complex64::from_polar(*p, -delta * g * tau))
                .sum();
            entries[(m, k)] = v;
            entries[(k, m)] = v.conj();
        }
    }
    CoherenceMatrix::new(entries)
}

/// `exp[N_B (e^{-iδτ} − 1)]` with `N_B = β²`.
pub fn coherence_coherent_analytic(beta: f64, tau: f64, delta: i64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, -(delta as f64) * tau);
    ((phase - ONE) * (beta * beta)).exp()
}

/// Squeezed-coherent overlap
/// `exp(β² (1 + coth r)(e − 1)/(e + coth r)) / sqrt(cosh² r − e² sinh² r)`, `e = e^{-iδτ}`,
/// with the square root followed continuously from `τ = 0`.
pub fn coherence_squeezed_analytic(beta: f64, r: f64, tau: f64, delta: i64) -> Result<Complex64> {
    if r.abs() <= R_EPS {
        return Ok(coherence_coherent_analytic(beta, tau, delta));
    }
    let d = delta as f64;
    let (cosh2, sinh2) = (r.cosh().powi(2), r.sinh().powi(2));
    let radicand = |t: f64| Complex64::new(cosh2, 0.0) - Complex64::from_polar(sinh2, -2.0 * d * t);
    let steps = ((d * tau).abs() / BRANCH_STEP).ceil().max(1.0) as usize;
    let mut root = ONE;
    for k in 1..=steps {
        let t = tau * k as f64 / steps as f64;
        let candidate = radicand(t).sqrt();
        let next = if (candidate - root).norm() <= (candidate + root).norm() {
            candidate
        } else {
            -candidate
        };
        let jump = (next / root).arg().abs();
        if jump > std::f64::consts::FRAC_PI_2 {
            return Err(Error::BranchTrackingFailure(format!(
                "square-root phase jumped by {jump} at tau = {t}"
            )));
        }
        root = next;
    }
    let coth = 1.0 / r.tanh();
    let e = Complex64::from_polar(1.0, -d * tau);
    let exponent = (e - ONE) * (beta * beta * (1.0 + coth)) / (e + coth);
    Ok(exponent.exp() / root)
}

/// Closed-form overlap profile `C(Δ)`, `Δ = 0..=max_delta`, for generator `n_B`.
pub fn coherence_profile_analytic(spec: &AuxStateSpec, tau: f64, max_delta: usize) -> Result<Vec<Complex64>> {
    match spec.kind {
        AuxKind::Fock => Ok((0..=max_delta)
            .map(|d| Complex64::from_polar(1.0, -(d as f64) * spec.fock_n as f64 * tau))
            .collect()),
        AuxKind::SqueezedCoherent => {
            if spec.beta.im != 0.0 {
                return Err(Error::InvalidArgument(
                    "closed-form overlaps are implemented for real beta".into(),
                ));
            }
            (0..=max_delta)
                .map(|d| coherence_squeezed_analytic(spec.beta.re, spec.r, tau, d as i64))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boson::{choose_cutoff, fock_state, mode_operator, squeezed_coherent, FockBasis, ModeOperator};
    use std::f64::consts::PI;

    fn integer_levels(n: usize) -> Vec<f64> {
        (0..=n).map(|k| k as f64 - n as f64 / 2.0).collect()
    }

    #[test]
    fn coherent_closed_form() {
        assert_eq!(coherence_coherent_analytic(10.0, 0.0, 20), ONE);
        let revival = coherence_coherent_analytic(10.0, 2.0 * PI / 20.0, 20);
        assert!((revival - ONE).norm() < 1e-10);
        let c = coherence_coherent_analytic(10.0, 0.01, 20);
        assert!((c.norm_sqr().ln() - 200.0 * (0.2f64.cos() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn squeezed_limits() {
        assert!((coherence_squeezed_analytic(3.0, 0.4, 0.0, 5).unwrap() - ONE).norm() < 1e-14);
        let near = coherence_squeezed_analytic(5.0, 1e-7, 0.03, 4).unwrap();
        assert!((near - coherence_coherent_analytic(5.0, 0.03, 4)).norm() < 1e-5);
        let small = coherence_squeezed_analytic(5.0, 2e-6, 0.03, 4).unwrap();
        assert!((small - coherence_coherent_analytic(5.0, 0.03, 4)).norm() < 1e-4);
    }

    #[test]
    fn squeezed_matches_overlaps() {
        for &(beta, r) in &[(50f64.sqrt(), 0.352), (20f64.sqrt(), -0.111), (2.0, 0.9)] {
            let spec = AuxStateSpec::squeezed(beta, r);
            let basis = choose_cutoff(&spec, 1e-12).unwrap();
            let psi = squeezed_coherent(&spec, &basis).unwrap();
            let n_op = mode_operator(ModeOperator::Number, &basis).unwrap();
            for &(delta, tau) in &[(1i64, 0.02), (3, 0.3), (7, 1.9)] {
                let num = coherence_numeric(&psi, &n_op, tau, &[0.0, delta as f64]).unwrap();
                let ana = coherence_squeezed_analytic(beta, r, tau, delta).unwrap();
                assert!((num.entries()[(1, 0)] - ana).norm() < 1e-6, "{beta} {r} {delta} {tau}");
            }
        }
    }

    #[test]
    fn fock_coherences_are_phases() {
        let basis = FockBasis::new(12).unwrap();
        let psi = fock_state(7, &basis).unwrap();
        let n_op = mode_operator(ModeOperator::Number, &basis).unwrap();
        let c = coherence_numeric(&psi, &n_op, 0.77, &integer_levels(6)).unwrap();
        assert!(c.entries().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        let zero = coherence_numeric(&psi, &n_op, 0.0, &integer_levels(6)).unwrap();
        assert!(zero.entries().iter().all(|z| (z - ONE).norm() < 1e-15));
    }

    #[test]
    fn profile_builds_toeplitz() {
        let spec = AuxStateSpec::coherent(3.0);
        let profile = coherence_profile_analytic(&spec, 0.1, 4).unwrap();
        let c = CoherenceMatrix::from_profile(&profile, 5).unwrap();
        assert_eq!(c.c_max(), profile[4]);
        assert_eq!(c.entries()[(1, 3)], profile[2].conj());
        assert!(CoherenceMatrix::new(CMatrix::from_element(2, 2, Complex64::new(2.0, 0.0))).is_err());
    }
}
