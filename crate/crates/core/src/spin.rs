// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Collective pseudo-spin algebra on the symmetric `N_A + 1` dimensional
//! subspace of two-mode bosons.
//!
//! Basis index `k` carries the `Jz` eigenvalue `m = k - N_A/2`, so index `N_A`
//! is `|N_A, 0>` (every particle in mode 1) and index 0 is `|0, N_A>`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, CVector, HermitianSpectrum, ZERO};
use crate::state::{Basis, HermitianOperator, PureState, UnitaryOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinBasis {
    n_atoms: usize,
}

impl SpinBasis {
    pub fn new(n_atoms: usize) -> Self {
        Self { n_atoms }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    /// Total spin `j = N_A / 2`.
    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// `Jz` eigenvalue of basis index `k`.
    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.m(k)).collect()
    }

    /// Index of `|N_A, 0>`, the maximal `Jz` eigenstate.
    pub fn top_index(&self) -> usize {
        self.n_atoms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(&self) -> &'static str {
        match self {
            Axis::X => "Jx",
            Axis::Y => "Jy",
            Axis::Z => "Jz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinComponent {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Matrix of a spin component in the ascending `Jz` basis.
pub fn spin_matrix(component: SpinComponent, basis: &SpinBasis) -> CMatrix {
    let n = basis.dim();
    let j = basis.j();
    let raising = || {
        let mut jp = CMatrix::zeros(n, n);
        for k in 0..n.saturating_sub(1) {
            let m = basis.m(k);
            jp[(k + 1, k)] = cr((j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt());
        }
        jp
    };
    match component {
        SpinComponent::Z => linalg::real_diagonal(&basis.m_values()),
        SpinComponent::Plus => raising(),
        SpinComponent::Minus => raising().adjoint(),
        SpinComponent::X => {
            let jp = raising();
            (&jp + jp.adjoint()) * cr(0.5)
        }
        SpinComponent::Y => {
            let jp = raising();
            (&jp - jp.adjoint()) * c(0.0, -0.5)
        }
    }
}

pub fn spin_operator(axis: Axis, basis: &SpinBasis) -> HermitianOperator {
    let component = match axis {
        Axis::X => SpinComponent::X,
        Axis::Y => SpinComponent::Y,
        Axis::Z => SpinComponent::Z,
    };
    HermitianOperator::from_unchecked(spin_matrix(component, basis)).with_label(axis.label())
}

/// `R(θ, φ) = exp(-i Jz φ) exp(-i Jx θ)`, with no extra global phase.
pub fn rotation_operator(theta: f64, phi: f64, basis: &SpinBasis) -> Result<UnitaryOperator> {
    check_finite(&[theta, phi])?;
    let jx = spin_matrix(SpinComponent::X, basis);
    let mut u = HermitianSpectrum::new(&jx)?.propagator(theta);
    // exp(-i Jz φ) is diagonal: scale row k by exp(-i m_k φ)
    for k in 0..basis.dim() {
        let phase = Complex64::from_polar(1.0, -basis.m(k) * phi);
        for col in 0..basis.dim() {
            u[(k, col)] *= phase;
        }
    }
    Ok(UnitaryOperator::from_unchecked(u))
}

/// `R(θ,φ) Jz R(θ,φ)† = Jz cos θ + (Jx sin φ − Jy cos φ) sin θ`, the operator whose
/// extreme eigenstates are the coherent spin states `|θ, φ>` and `|π−θ, φ+π>`.
pub fn pointing_operator(theta: f64, phi: f64, basis: &SpinBasis) -> HermitianOperator {
    let jx = spin_matrix(SpinComponent::X, basis);
    let jy = spin_matrix(SpinComponent::Y, basis);
    let jz = spin_matrix(SpinComponent::Z, basis);
    let m = jz * cr(theta.cos()) + (jx * cr(phi.sin()) - jy * cr(phi.cos())) * cr(theta.sin());
    HermitianOperator::from_unchecked(m).with_label(format!("J(theta={theta},phi={phi})"))
}

/// `|θ, φ> = R(θ, φ) |N_A, 0>`.
pub fn coherent_spin_state(theta: f64, phi: f64, basis: &SpinBasis) -> Result<PureState> {
    let r = rotation_operator(theta, phi, basis)?;
    let column = r.matrix().column(basis.top_index()).into_owned();
    PureState::normalized(Basis::Spin(*basis), column)
}

/// Equal superposition of the extreme eigenstates of the rotated spin operator,
/// `(|max> + e^{iϑ} |min>) / √2`.
pub fn spin_cat(theta: f64, phi: f64, rel_phase: f64, basis: &SpinBasis) -> Result<PureState> {
    check_finite(&[theta, phi, rel_phase])?;
    let r = rotation_operator(theta, phi, basis)?;
    let max = r.matrix().column(basis.top_index());
    let min = r.matrix().column(0);
    if basis.n_atoms() == 0 {
        // max and min coincide
        return PureState::normalized(Basis::Spin(*basis), max.into_owned());
    }
    let amps = (max + min * Complex64::from_polar(1.0, rel_phase)) * cr(std::f64::consts::FRAC_1_SQRT_2);
    PureState::normalized(Basis::Spin(*basis), amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    Noon,
    TwinFock,
    /// One-axis twisting of `|π/2, 0>` for a time `π/2`.
    OatCat,
}

pub fn named_state(kind: NamedState, basis: &SpinBasis) -> Result<PureState> {
    let n = basis.dim();
    match kind {
        NamedState::Noon => spin_cat(0.0, 0.0, 0.0, basis),
        NamedState::TwinFock => {
            if !basis.n_atoms().is_multiple_of(2) {
                return Err(Error::OddAtomNumber(basis.n_atoms()));
            }
            let mut amps = CVector::from_element(n, ZERO);
            amps[basis.n_atoms() / 2] = cr(1.0);
            PureState::new(Basis::Spin(*basis), amps)
        }
        NamedState::OatCat => {
            let css = coherent_spin_state(FRAC_PI_2, 0.0, basis)?;
            let mut amps = css.into_amplitudes();
            for k in 0..n {
                let m = basis.m(k);
                amps[k] *= Complex64::from_polar(1.0, -m * m * FRAC_PI_2);
            }
            PureState::normalized(Basis::Spin(*basis), amps)
        }
    }
}

/// Eigenvectors of `Jz` (identity), `Jx` or `Jy` written in the `Jz` basis,
/// ascending eigenvalue, phase-fixed.
fn eigenbasis_in_z(axis: Axis, basis: &SpinBasis) -> Result<CMatrix> {
    let n = basis.dim();
    if axis == Axis::Z {
        return Ok(CMatrix::identity(n, n));
    }
    let op = spin_operator(axis, basis);
    let mut vectors = HermitianSpectrum::new(op.matrix())?.vectors;
    for j in 0..n {
        let mut col: Vec<Complex64> = vectors.column(j).iter().copied().collect();
        linalg::fix_phase(&mut col);
        vectors.set_column(j, &CVector::from_vec(col));
    }
    Ok(vectors)
}

/// Change-of-basis matrix `A_{j,k} = <j; to | k; from>`: column `k` is the
/// `k`-th (ascending) eigenvector of the `from` spin component expressed in the
/// eigenbasis of the `to` component. Each column is phase-fixed so its
/// largest-magnitude entry is real and positive.
pub fn basis_change(from: Axis, to: Axis, basis: &SpinBasis) -> Result<UnitaryOperator> {
    let n = basis.dim();
    if from == to {
        return Ok(UnitaryOperator::identity(n));
    }
    let from_vectors = eigenbasis_in_z(from, basis)?;
    let to_vectors = eigenbasis_in_z(to, basis)?;
    let mut a = to_vectors.adjoint() * from_vectors;
    for j in 0..n {
        let mut col: Vec<Complex64> = a.column(j).iter().copied().collect();
        linalg::fix_phase(&mut col);
        a.set_column(j, &CVector::from_vec(col));
    }
    Ok(UnitaryOperator::from_unchecked(a))
}

/// Rotates a spin state about a Cartesian axis by `angle`: `exp(-i J_axis angle) |ψ>`.
pub fn rotate_state(psi: &PureState, axis: Axis, angle: f64) -> Result<PureState> {
    check_finite(&[angle])?;
    let Basis::Spin(basis) = psi.basis() else {
        return Err(Error::InvalidArgument("rotation acts on spin states".into()));
    };
    let u = spin_operator(axis, basis).exp_i(angle)?;
    psi.apply(&u)
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("non-finite angle in {values:?}")))
    }
}
