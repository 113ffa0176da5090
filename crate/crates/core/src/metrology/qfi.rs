// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{check_dim, DensityMatrix, HermitianOperator, PureState, UnitaryOperator};

/// Eigenvalue-pair threshold below which a pair is skipped in the mixed-state sum.
pub const DEFAULT_EIGEN_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QfiResult {
    pub value: f64,
    pub generator_label: String,
    pub eigen_threshold_used: f64,
    /// Total `|<e_i|G|e_j>|²` over skipped ordered pairs `i ≠ j`.
    pub discarded_pair_weight: f64,
}

/// `F = 2 Σ_{ij} (λ_i − λ_j)² / (λ_i + λ_j) |<e_i|G|e_j>|²`.
pub fn qfi_mixed(rho: &DensityMatrix, g: &HermitianOperator) -> Result<QfiResult> {
    qfi_mixed_with_threshold(rho, g, DEFAULT_EIGEN_THRESHOLD)
}

pub fn qfi_mixed_with_threshold(rho: &DensityMatrix, g: &HermitianOperator, threshold: f64) -> Result<QfiResult> {
    check_dim(rho.dim(), g.dim())?;
    let spectrum = rho.spectrum()?;
    if let Some(&lowest) = spectrum.values.first() {
        if lowest < DensityMatrix::EIGENVALUE_FLOOR {
            return Err(Error::NotADensityMatrix(format!("negative eigenvalue {lowest:e}")));
        }
    }
    let lambdas: Vec<f64> = spectrum.values.iter().map(|v| v.max(0.0)).collect();
    let g_eig = spectrum.vectors.adjoint() * g.matrix() * &spectrum.vectors;
    let n = lambdas.len();
    let mut value = 0.0;
    let mut discarded = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let weight = g_eig[(i, j)].norm_sqr();
            let sum = lambdas[i] + lambdas[j];
            if sum <= threshold {
                discarded += 2.0 * weight;
                continue;
            }
            let diff = lambdas[i] - lambdas[j];
            // the (i,j) and (j,i) terms are equal
            value += 4.0 * diff * diff / sum * weight;
        }
    }
    Ok(QfiResult {
        value,
        generator_label: g.label().to_string(),
        eigen_threshold_used: threshold,
        discarded_pair_weight: discarded,
    })
}

/// `4 V(G)`.
pub fn qfi_pure(psi: &PureState, g: &HermitianOperator) -> Result<QfiResult> {
    Ok(QfiResult {
        value: 4.0 * psi.variance(g)?,
        generator_label: g.label().to_string(),
        eigen_threshold_used: 0.0,
        discarded_pair_weight: 0.0,
    })
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// `sqrt(F_U(ρ, σ)) = || √ρ √σ ||_1` for `σ = U ρ U†`, with `√σ = U √ρ U†`.
fn root_fidelity_rotated(sqrt_rho: &CMatrix, u: &CMatrix) -> f64 {
    let sqrt_sigma = u * sqrt_rho * u.adjoint();
    linalg::trace_norm(&(sqrt_rho * sqrt_sigma))
}

/// Independent QFI estimate from the Bures expansion
/// `F ≈ 8 (1 − √F_U(ρ, e^{-iGδ} ρ e^{iGδ})) / δ²`, evaluated at `δ` and `δ/2`
/// and Richardson-extrapolated.
pub fn qfi_fidelity_oracle(rho: &DensityMatrix, g: &HermitianOperator, dchi: f64) -> Result<f64> {
    check_dim(rho.dim(), g.dim())?;
    if !(1e-5..=1e-3).contains(&dchi) {
        return Err(Error::InvalidArgument(format!(
            "oracle step {dchi} outside [1e-5, 1e-3]"
        )));
    }
    let sqrt_rho = linalg::psd_sqrt(rho.matrix())?;
    let g_spectrum = g.spectrum()?;
    let estimate = |delta: f64| {
        let u = g_spectrum.propagator(delta);
        8.0 * (1.0 - root_fidelity_rotated(&sqrt_rho, &u)) / (delta * delta)
    };
    let coarse = estimate(dchi);
    let fine = estimate(dchi / 2.0);
    let floor = 1e-6 * linalg::max_abs(g.matrix()).powi(2).max(1.0);
    if (coarse - fine).abs() > 0.01 * coarse.abs().max(fine.abs()) + floor {
        return Err(Error::NumericalInstability(format!(
            "fidelity estimates disagree across step sizes: {coarse} vs {fine}"
        )));
    }
    Ok(((4.0 * fine - coarse) / 3.0).max(0.0))
}

/// `U ρ U†` helper for oracle callers holding unitary operators.
pub fn rotate_density(rho: &DensityMatrix, u: &UnitaryOperator) -> Result<DensityMatrix> {
    rho.conjugate_by(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{coherent_spin_state, named_state, spin_operator, Axis, NamedState, SpinBasis};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn pure_examples() {
        let b = SpinBasis::new(20);
        let jz = spin_operator(Axis::Z, &b);
        let noon = named_state(NamedState::Noon, &b).unwrap();
        assert!((qfi_mixed(&noon.projector(), &jz).unwrap().value - 400.0).abs() < 1e-8);
        assert!((qfi_pure(&noon, &jz).unwrap().value - 400.0).abs() < 1e-9);
        let css = coherent_spin_state(FRAC_PI_2, 0.0, &b).unwrap();
        assert!((qfi_pure(&css, &jz).unwrap().value - 20.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(21);
        let r = qfi_mixed(&mixed, &jz).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.generator_label, "Jz");
    }

    #[test]
    fn oracle_on_pure_and_mixed() {
        let b = SpinBasis::new(8);
        let jz = spin_operator(Axis::Z, &b);
        let noon = named_state(NamedState::Noon, &b).unwrap();
        let f = qfi_fidelity_oracle(&noon.projector(), &jz, 1e-3).unwrap();
        assert!((f - 64.0).abs() / 64.0 < 5e-3);
        let f0 = qfi_fidelity_oracle(&DensityMatrix::maximally_mixed(9), &jz, 1e-3).unwrap();
        assert!(f0.abs() < 1e-6);
        assert!(qfi_fidelity_oracle(&noon.projector(), &jz, 0.1).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&DensityMatrix::maximally_mixed(4)) - 0.25).abs() < 1e-15);
        let b = SpinBasis::new(3);
        let css = coherent_spin_state(0.4, 0.2, &b).unwrap();
        assert!((purity(&css.projector()) - 1.0).abs() < 1e-12);
    }
}
