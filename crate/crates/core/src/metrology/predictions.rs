// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form approximations for decoherence and photon budgets.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::boson::AuxStateSpec;
use crate::error::{Error, Result};

/// Ratio `β² / sinh² r` below which the revival formula is flagged as unreliable.
pub const REVIVAL_VALIDITY_RATIO: f64 = 10.0;
/// Rule-of-thumb phase diffusion at which a `Jy` cat falls to twin-Fock sensitivity.
pub const TFS_PHASE_DIFFUSION: f64 = PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimePrediction {
    pub gamma: f64,
    pub f_a: f64,
}

/// `γ ≈ exp(−F_B N_A² τ² / 8)`, `F_A ≈ N_A² exp(−F_B N_A² τ² / 4)`.
pub fn short_time_predictions(f_b: f64, n_atoms: usize, tau: f64) -> ShortTimePrediction {
    let n2 = (n_atoms * n_atoms) as f64;
    let x = f_b * n2 * tau * tau;
    ShortTimePrediction {
        gamma: (-x / 8.0).exp(),
        f_a: n2 * (-x / 4.0).exp(),
    }
}

/// `F_A ≈ N_A² exp(F_B [cos(N_A τ) − 1] / 2)`.
pub fn qfi_revival_prediction(f_b: f64, n_atoms: usize, tau: f64) -> f64 {
    let n = n_atoms as f64;
    n * n * (0.5 * f_b * ((n * tau).cos() - 1.0)).exp()
}

/// Revival prediction for a concrete auxiliary state; warns outside `β² ≫ sinh² r`.
pub fn qfi_revival_prediction_for(spec: &AuxStateSpec, n_atoms: usize, tau: f64) -> f64 {
    if !spec.is_fock() && spec.r != 0.0 {
        let ratio = spec.beta.norm_sqr() / spec.r.sinh().powi(2);
        if ratio < REVIVAL_VALIDITY_RATIO {
            log::warn!("revival formula used with beta^2/sinh^2(r) = {ratio:.3}");
        }
    }
    qfi_revival_prediction(spec.number_qfi(), n_atoms, tau)
}

/// `γ = (1 + |C_max|²) / 2`.
pub fn gamma_from_c_max(c_max_abs: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&c_max_abs) {
        return Err(Error::Range(format!("|C_max| = {c_max_abs} outside [0, 1]")));
    }
    Ok((1.0 + c_max_abs * c_max_abs) / 2.0)
}

pub fn c_max_from_gamma(gamma: f64) -> Result<f64> {
    check_cat_gamma(gamma)?;
    Ok((2.0 * gamma - 1.0).max(0.0).sqrt())
}

/// `F_A = N_A² (2γ − 1)`.
pub fn qfi_from_gamma(gamma: f64, n_atoms: usize) -> Result<f64> {
    check_cat_gamma(gamma)?;
    Ok((n_atoms * n_atoms) as f64 * (2.0 * gamma - 1.0))
}

pub fn gamma_from_qfi(f_a: f64, n_atoms: usize) -> Result<f64> {
    let n2 = (n_atoms * n_atoms) as f64;
    if n2 == 0.0 || !(-1e-12..=n2 * (1.0 + 1e-12)).contains(&f_a) {
        return Err(Error::Range(format!("F_A = {f_a} outside [0, N_A²]")));
    }
    Ok((1.0 + f_a / n2) / 2.0)
}

fn check_cat_gamma(gamma: f64) -> Result<()> {
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&gamma) {
        return Err(Error::Range(format!(
            "purity {gamma} outside [1/2, 1] for a two-branch cat"
        )));
    }
    Ok(())
}

/// `F_B = V(Y)/β²` for the approximate generator `Y / <X>`.
pub fn beamsplitter_aux_qfi(beta: f64, r: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beam-splitter prediction needs real beta > 0, got {beta}"
        )));
    }
    Ok((2.0 * r).exp() / (beta * beta))
}

/// `F_A(θ = π/2) ≈ N_A² exp(−F_B N_A² / 4)`.
pub fn beamsplitter_generator_prediction(beta: f64, r: f64, n_atoms: usize) -> Result<f64> {
    let f_b = beamsplitter_aux_qfi(beta, r)?;
    let n2 = (n_atoms * n_atoms) as f64;
    Ok(n2 * (-f_b * n2 / 4.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRegime {
    /// NOON state rotated about `Jz` by `φ`.
    NoonJz,
    /// `Jy` cat rotated about `Jz` by `φ`; heuristic.
    JycatJz,
    /// `Jy` cat rotated about `Jx` by `θ = π/2` with the beam-splitter coupling.
    JycatBs,
}

/// Closed-form photon number keeping `F_A ≥ N_A² / 2`.
pub fn nb_tfs(regime: BudgetRegime, n_atoms: usize, angle: f64, r: f64) -> Result<f64> {
    if !(angle > 0.0) || !angle.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rotation angle must be positive, got {angle}"
        )));
    }
    let n2 = (n_atoms * n_atoms) as f64;
    match regime {
        BudgetRegime::NoonJz => Ok(angle * angle * (-2.0 * r).exp() * n2 / LN_2),
        BudgetRegime::JycatJz => Ok((angle / TFS_PHASE_DIFFUSION).powi(2) * (-2.0 * r).exp()),
        BudgetRegime::JycatBs => {
            if (angle - FRAC_PI_2).abs() > 1e-12 {
                return Err(Error::UnsupportedAngle(angle));
            }
            Ok((2.0 * r).exp() * n2 / (4.0 * LN_2))
        }
    }
}
