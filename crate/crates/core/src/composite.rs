// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Probe ⊗ auxiliary states, interaction Hamiltonians and exact evolution.
//!
//! Composite index: `spin_index * (n_cut + 1) + fock_index`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boson::{mode_matrix, FockBasis, ModeOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, CVector};
use crate::propagator::{self, PropagatorStrategy};
use crate::spin::{self, Axis, SpinBasis, SpinComponent};
use crate::state::{check_dim, Basis, DensityMatrix, HermitianOperator, PureState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeBasis {
    spin: SpinBasis,
    fock: FockBasis,
}

impl CompositeBasis {
    pub fn new(spin: SpinBasis, fock: FockBasis) -> Self {
        Self { spin, fock }
    }

    pub fn spin(&self) -> &SpinBasis {
        &self.spin
    }

    pub fn fock(&self) -> &FockBasis {
        &self.fock
    }

    pub fn dim(&self) -> usize {
        self.spin.dim() * self.fock.dim()
    }

    pub fn index(&self, spin_index: usize, fock_index: usize) -> usize {
        spin_index * self.fock.dim() + fock_index
    }

    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock.dim(), index % self.fock.dim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    SeparableJz,
    BeamSplitter,
    ClassicalRotation,
    #[serde(rename = "classical_X_case", alias = "classical_x_case")]
    ClassicalXCase,
    #[serde(rename = "classical_Y_case", alias = "classical_y_case")]
    ClassicalYCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub tau: f64,
    pub hamiltonian_kind: HamiltonianKind,
}

impl EvolutionParams {
    pub fn new(tau: f64, hamiltonian_kind: HamiltonianKind) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite time {tau}")));
        }
        Ok(Self { tau, hamiltonian_kind })
    }

    /// Classical rotation angle: `φ = N_B τ` for the `Jz` coupling, `θ = 2|β| τ`
    /// for the beam-splitter family.
    pub fn classical_angle(&self, beta_abs: f64, n_b: f64) -> f64 {
        match self.hamiltonian_kind {
            HamiltonianKind::SeparableJz => n_b * self.tau,
            _ => 2.0 * beta_abs * self.tau,
        }
    }
}

/// One auxiliary branch `e^{-i m n_B τ} |ψ_B>` of the separable evolution.
#[derive(Debug, Clone)]
pub struct Branch {
    pub m: f64,
    pub coefficient: Complex64,
    pub state: CVector,
}

/// `|ψ_AB(τ)> = Σ_m c_m |m> ⊗ e^{-i m n_B τ} |ψ_B>` under `Jz ⊗ n_B`.
pub fn separable_evolve(psi_a: &PureState, psi_b: &PureState, tau: f64) -> Result<Vec<Branch>> {
    let Basis::Spin(spin) = psi_a.basis() else {
        return Err(Error::InvalidArgument("probe must be a spin state".into()));
    };
    if !matches!(psi_b.basis(), Basis::Fock(_)) {
        return Err(Error::InvalidArgument("auxiliary must be a Fock-space state".into()));
    }
    let aux = psi_b.amplitudes();
    Ok((0..spin.dim())
        .map(|k| {
            let m = spin.m(k);
            let state = CVector::from_iterator(
                aux.len(),
                aux.iter()
                    .enumerate()
                    .map(|(n, a)| a * Complex64::from_polar(1.0, -m * n as f64 * tau)),
            );
            Branch {
                m,
                coefficient: psi_a.amplitudes()[k],
                state,
            }
        })
        .collect())
}

/// `ρ_A = Σ c_m c_n* <branch_n|branch_m> |m><n|`.
pub fn reduced_density_separable(branches: &[Branch]) -> DensityMatrix {
    let n = branches.len();
    let mut rho = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let overlap = branches[j].state.dotc(&branches[i].state);
            let v = branches[i].coefficient * branches[j].coefficient.conj() * overlap;
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    DensityMatrix::from_unchecked(rho)
}

/// `C(Δ) = Σ_k |ψ_k|² e^{-i Δ k τ}` for `Δ = 0..=max_delta`; the separable
/// coherence matrix is `C_{mn} = C(m - n)` with `C(-Δ) = C(Δ)*`.
pub fn separable_coherence_profile(psi_b: &PureState, tau: f64, max_delta: usize) -> Vec<Complex64> {
    let probabilities: Vec<f64> = psi_b.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    (0..=max_delta)
        .map(|delta| {
            probabilities
                .iter()
                .enumerate()
                .map(|(k, p)| Complex64::from_polar(*p, -(delta as f64) * k as f64 * tau))
                .sum()
        })
        .collect()
}

/// Reshapes a spin-major composite vector into its `(N_A+1) × (n_cut+1)` amplitude matrix.
fn amplitude_matrix(psi: &CVector, basis: &CompositeBasis) -> CMatrix {
    CMatrix::from_row_slice(basis.spin().dim(), basis.fock().dim(), psi.as_slice())
}

pub fn partial_trace_b(psi_ab: &PureState, basis: &CompositeBasis) -> Result<DensityMatrix> {
    check_dim(basis.dim(), psi_ab.dim())?;
    let m = amplitude_matrix(psi_ab.amplitudes(), basis);
    Ok(DensityMatrix::from_unchecked(&m * m.adjoint()))
}

pub fn partial_trace_b_mixed(rho_ab: &DensityMatrix, basis: &CompositeBasis) -> Result<DensityMatrix> {
    check_dim(basis.dim(), rho_ab.dim())?;
    let (ns, nf) = (basis.spin().dim(), basis.fock().dim());
    let full = rho_ab.matrix();
    let rho = CMatrix::from_fn(ns, ns, |i, j| (0..nf).map(|f| full[(i * nf + f, j * nf + f)]).sum());
    Ok(DensityMatrix::from_unchecked(rho))
}

/// The composite state for separable evolution, written out explicitly.
pub fn branches_to_composite(branches: &[Branch], basis: &CompositeBasis) -> Result<PureState> {
    check_dim(basis.spin().dim(), branches.len())?;
    let nf = basis.fock().dim();
    let mut amps = CVector::zeros(basis.dim());
    for (s, branch) in branches.iter().enumerate() {
        check_dim(nf, branch.state.len())?;
        for f in 0..nf {
            amps[s * nf + f] = branch.coefficient * branch.state[f];
        }
    }
    Ok(PureState::from_parts_unchecked(Basis::Composite(*basis), amps))
}

/// Decoherence-free reference evolution `exp(-i J_axis angle) |ψ_A>`.
pub fn classical_rotation(psi_a: &PureState, axis: Axis, angle: f64) -> Result<PureState> {
    spin::rotate_state(psi_a, axis, angle)
}

/// Hamiltonian stored as `Σ_t S_t ⊗ B_t` with spin factor first.
#[derive(Debug, Clone)]
pub struct CompositeHamiltonian {
    basis: CompositeBasis,
    terms: Vec<(CMatrix, CMatrix)>,
    fingerprint: String,
}

impl CompositeHamiltonian {
    pub fn new(basis: CompositeBasis, terms: Vec<(CMatrix, CMatrix)>, fingerprint: impl Into<String>) -> Result<Self> {
        for (s, b) in &terms {
            check_dim(basis.spin().dim(), s.nrows())?;
            check_dim(basis.fock().dim(), b.nrows())?;
            let scale = linalg::max_abs(s).max(1.0) * linalg::max_abs(b).max(1.0);
            let defect = linalg::hermiticity_defect(s) + linalg::hermiticity_defect(b);
            if defect > crate::state::HERMITIAN_TOLERANCE * scale {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(Self {
            basis,
            terms,
            fingerprint: fingerprint.into(),
        })
    }

    pub fn basis(&self) -> &CompositeBasis {
        &self.basis
    }

    pub fn terms(&self) -> &[(CMatrix, CMatrix)] {
        &self.terms
    }

    /// Identifies the operator for propagator caching.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Matrix element `<a|H|b>` in the composite basis.
    pub fn element(&self, a: usize, b: usize) -> Complex64 {
        let (sa, fa) = self.basis.split(a);
        let (sb, fb) = self.basis.split(b);
        self.terms.iter().map(|(s, f)| s[(sa, sb)] * f[(fa, fb)]).sum()
    }

    /// `H |ψ>` without forming the composite matrix.
    pub fn apply(&self, psi: &CVector) -> Result<CVector> {
        check_dim(self.dim(), psi.len())?;
        let m = amplitude_matrix(psi, &self.basis);
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (s, b) in &self.terms {
            // (S ⊗ B) vec_row(M) = vec_row(S M Bᵀ)
            out += s * &m * b.transpose();
        }
        Ok(CVector::from_iterator(self.dim(), out.transpose().iter().copied()))
    }

    pub fn to_operator(&self) -> HermitianOperator {
        let n = self.dim();
        let mut h = CMatrix::zeros(n, n);
        for (s, b) in &self.terms {
            h += linalg::kron(s, b);
        }
        HermitianOperator::from_unchecked(h).with_label(self.fingerprint.clone())
    }

    pub fn energy(&self, psi: &PureState) -> Result<f64> {
        Ok(psi.amplitudes().dotc(&self.apply(psi.amplitudes())?).re)
    }
}

fn basis_tag(basis: &CompositeBasis) -> String {
    format!("NA={},ncut={}", basis.spin().n_atoms(), basis.fock().n_cut())
}

/// `X ⊗ Jx + Y ⊗ Jy = b J₋ + b† J₊`.
pub fn beamsplitter_hamiltonian(basis: &CompositeBasis) -> CompositeHamiltonian {
    let terms = vec![
        (
            spin::spin_matrix(SpinComponent::X, basis.spin()),
            mode_matrix(ModeOperator::X, basis.fock()),
        ),
        (
            spin::spin_matrix(SpinComponent::Y, basis.spin()),
            mode_matrix(ModeOperator::Y, basis.fock()),
        ),
    ];
    CompositeHamiltonian {
        basis: *basis,
        terms,
        fingerprint: format!("beam_splitter[{}]", basis_tag(basis)),
    }
}

/// `Jz ⊗ n_B`.
pub fn separable_hamiltonian(basis: &CompositeBasis) -> CompositeHamiltonian {
    CompositeHamiltonian {
        basis: *basis,
        terms: vec![(
            spin::spin_matrix(SpinComponent::Z, basis.spin()),
            mode_matrix(ModeOperator::Number, basis.fock()),
        )],
        fingerprint: format!("separable_jz[{}]", basis_tag(basis)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalCase {
    /// `Y → <Y> = 0`: `X ⊗ Jx`.
    #[serde(rename = "classical_X", alias = "x")]
    X,
    /// `X → <X> = 2β`: `2β Jx + Y ⊗ Jy`.
    #[serde(rename = "classical_Y", alias = "y")]
    Y,
}

pub fn case_hamiltonian(case: ClassicalCase, beta: f64, basis: &CompositeBasis) -> Result<CompositeHamiltonian> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite beta {beta}")));
    }
    let jx = spin::spin_matrix(SpinComponent::X, basis.spin());
    let fd = basis.fock().dim();
    let (terms, name) = match case {
        ClassicalCase::X => (
            vec![(jx, mode_matrix(ModeOperator::X, basis.fock()))],
            "classical_X".to_string(),
        ),
        ClassicalCase::Y => (
            vec![
                (jx * cr(2.0 * beta), CMatrix::identity(fd, fd)),
                (
                    spin::spin_matrix(SpinComponent::Y, basis.spin()),
                    mode_matrix(ModeOperator::Y, basis.fock()),
                ),
            ],
            format!("classical_Y(beta={beta:e})"),
        ),
    };
    Ok(CompositeHamiltonian {
        basis: *basis,
        terms,
        fingerprint: format!("{name}[{}]", basis_tag(basis)),
    })
}

/// `exp(-i H τ) |ψ_AB>` through the cached automatically selected propagator.
pub fn evolve_full(h: &CompositeHamiltonian, psi_ab: &PureState, tau: f64) -> Result<PureState> {
    evolve_with(h, psi_ab, tau, PropagatorStrategy::Auto)
}

pub fn evolve_with(
    h: &CompositeHamiltonian,
    psi_ab: &PureState,
    tau: f64,
    strategy: PropagatorStrategy,
) -> Result<PureState> {
    check_dim(h.dim(), psi_ab.dim())?;
    let prop = propagator::cached(h, strategy)?;
    let out = prop.evolve(psi_ab.amplitudes(), tau)?;
    Ok(PureState::from_parts_unchecked(psi_ab.basis().clone(), out))
}

/// `exp(-i H τ) |ψ>` for an explicit Hermitian matrix, by eigendecomposition.
pub fn evolve_dense(h: &HermitianOperator, psi: &PureState, tau: f64) -> Result<PureState> {
    check_dim(h.dim(), psi.dim())?;
    let out = h.spectrum()?.evolve(psi.amplitudes(), tau);
    Ok(PureState::from_parts_unchecked(psi.basis().clone(), out))
}
