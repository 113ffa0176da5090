// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical search for the auxiliary occupation `N_B^TFS` at which a rotated
//! cat keeps `F_A = N_A² / 2`.

use serde::{Deserialize, Serialize};

use super::coherence::{coherence_profile_analytic, CoherenceMatrix};
use super::predictions::BudgetRegime;
use super::qfi::qfi_mixed;
use crate::boson::{self, AuxStateSpec};
use crate::composite::{beamsplitter_hamiltonian, partial_trace_b, CompositeBasis};
use crate::error::{Error, Result};
use crate::propagator::{PropagatorRegistry, PropagatorStrategy};
use crate::semiclassical::{self, GridParams, SemiclassicalVariant};
use crate::spin::{self, spin_cat, spin_operator, Axis, NamedState, SpinBasis};
use crate::state::{Basis, DensityMatrix, PureState};

/// `Auto` switches to the semiclassical path above this atom number.
pub const AUTO_EXACT_MAX_ATOMS: usize = 24;
pub const BUDGET_SEARCH_FLOOR: f64 = 1.0;
pub const BUDGET_SEARCH_CEILING: f64 = 1e7;
pub const BUDGET_RELATIVE_WIDTH: f64 = 1e-3;
const SCAN_FACTOR: f64 = 4.0;
const CONFIRMING_SAMPLES: usize = 2;
const LEAKAGE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMethod {
    Exact,
    Semiclassical,
    #[default]
    Auto,
}

impl BudgetMethod {
    pub fn resolve(self, n_atoms: usize) -> BudgetMethod {
        match self {
            BudgetMethod::Auto if n_atoms > AUTO_EXACT_MAX_ATOMS => BudgetMethod::Semiclassical,
            BudgetMethod::Auto => BudgetMethod::Exact,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetResult {
    /// Mean photon number `|β|² + sinh² r` at the crossing.
    pub n_b: f64,
    pub beta_sq: f64,
    /// The threshold already holds at the bottom of the search bracket.
    pub at_lower_bound: bool,
    /// Sampled `F_A` was non-decreasing up to the crossing.
    pub monotone: bool,
    pub method: BudgetMethod,
    pub evaluations: usize,
}

/// Initial probe for each regime and the generator its QFI is taken against.
pub fn regime_probe(regime: BudgetRegime, basis: &SpinBasis) -> Result<(PureState, Axis)> {
    match regime {
        BudgetRegime::NoonJz => Ok((spin::named_state(NamedState::Noon, basis)?, Axis::Z)),
        BudgetRegime::JycatJz => Ok((spin_cat(std::f64::consts::FRAC_PI_2, 0.0, 0.0, basis)?, Axis::Y)),
        BudgetRegime::JycatBs => Ok((spin_cat(std::f64::consts::FRAC_PI_2, 0.0, 0.0, basis)?, Axis::Z)),
    }
}

/// Probe state after the regime's rotation by `angle` with auxiliary `spec`.
pub fn regime_density(
    regime: BudgetRegime,
    n_atoms: usize,
    angle: f64,
    spec: &AuxStateSpec,
    method: BudgetMethod,
) -> Result<DensityMatrix> {
    let basis = SpinBasis::new(n_atoms);
    let (probe, _) = regime_probe(regime, &basis)?;
    let method = method.resolve(n_atoms);
    match regime {
        BudgetRegime::NoonJz | BudgetRegime::JycatJz => {
            let n_b = spec.mean_photons();
            if n_b <= 0.0 {
                return Err(Error::InvalidArgument("rotation by a fixed angle needs N_B > 0".into()));
            }
            let tau = angle / n_b;
            match method {
                BudgetMethod::Semiclassical => {
                    semiclassical::semiclassical_jz(&probe, &semiclassical::jz_noise(spec, tau))
                }
                _ => {
                    let profile = coherence_profile_analytic(spec, tau, n_atoms)?;
                    CoherenceMatrix::from_profile(&profile, basis.dim())?.reduced_density(&probe)
                }
            }
        }
        BudgetRegime::JycatBs => {
            if spec.is_fock() || spec.beta.im != 0.0 || !(spec.beta.re > 0.0) {
                return Err(Error::InvalidArgument(
                    "beam-splitter budget needs a squeezed coherent state with real beta > 0".into(),
                ));
            }
            let tau = angle / (2.0 * spec.beta.re);
            match method {
                BudgetMethod::Semiclassical => semiclassical::semiclassical_bs(
                    &probe,
                    &semiclassical::noise_from_optics(spec, tau)?,
                    SemiclassicalVariant::Standard,
                    GridParams::default(),
                ),
                _ => {
                    let fock = boson::choose_cutoff(spec, LEAKAGE_TOLERANCE)?;
                    let aux = boson::squeezed_coherent(spec, &fock)?;
                    let cb = CompositeBasis::new(basis, fock);
                    let h = beamsplitter_hamiltonian(&cb);
                    // one-off evolution: bypass the shared cache
                    let prop = PropagatorRegistry::default().build(PropagatorStrategy::Auto, &h)?;
                    let evolved = prop.evolve(probe.product(&aux)?.amplitudes(), tau)?;
                    let psi = PureState::normalized(Basis::Composite(cb), evolved)?;
                    partial_trace_b(&psi, &cb)
                }
            }
        }
    }
}

fn regime_qfi(
    regime: BudgetRegime,
    n_atoms: usize,
    angle: f64,
    spec: &AuxStateSpec,
    method: BudgetMethod,
) -> Result<f64> {
    let basis = SpinBasis::new(n_atoms);
    let (_, axis) = regime_probe(regime, &basis)?;
    let rho = regime_density(regime, n_atoms, angle, spec, method)?;
    Ok(qfi_mixed(&rho, &spin_operator(axis, &basis))?.value)
}

/// Varies `|β|²` at fixed `r` (or the occupation of a Fock family) over
/// `[1, 10⁷]` until `F_A` stays at or above `N_A² / 2` for two consecutive
/// scan samples, then bisects in `log |β|²` to relative width `1e-3`.
pub fn nb_tfs_empirical(
    regime: BudgetRegime,
    n_atoms: usize,
    angle: f64,
    family: &AuxStateSpec,
    method: BudgetMethod,
) -> Result<BudgetResult> {
    let target = (n_atoms * n_atoms) as f64 / 2.0;
    let resolved = method.resolve(n_atoms);
    let member = |beta_sq: f64| -> AuxStateSpec {
        if family.is_fock() {
            AuxStateSpec::fock(beta_sq.round() as usize)
        } else {
            AuxStateSpec::squeezed(beta_sq.sqrt(), family.r)
        }
    };
    let mut evaluations = 0usize;
    let mut eval = |beta_sq: f64| -> Result<f64> {
        evaluations += 1;
        regime_qfi(regime, n_atoms, angle, &member(beta_sq), resolved)
    };

    // a crossing needs CONFIRMING_SAMPLES consecutive samples at or above the target
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut x = BUDGET_SEARCH_FLOOR;
    let crossing = loop {
        let f = eval(x)?;
        samples.push((x, f));
        let run = samples.iter().rev().take_while(|(_, f)| *f >= target).count();
        if run >= CONFIRMING_SAMPLES || (run > 0 && x >= BUDGET_SEARCH_CEILING) {
            break samples.len() - run;
        }
        if x >= BUDGET_SEARCH_CEILING {
            return Err(Error::BracketFailure(format!(
                "F_A stays below N_A²/2 = {target} for |beta|² in [{BUDGET_SEARCH_FLOOR}, {BUDGET_SEARCH_CEILING}]"
            )));
        }
        x = (x * SCAN_FACTOR).min(BUDGET_SEARCH_CEILING);
    };
    let slack = 1e-9 * target;
    let monotone = samples.windows(2).all(|w| w[1].1 >= w[0].1 - slack);
    if !monotone {
        log::warn!("sampled F_A is not monotone in N_B for {regime:?}, N_A = {n_atoms}");
    }
    let finish = |beta_sq: f64, at_lower_bound: bool, evaluations: usize| BudgetResult {
        n_b: member(beta_sq).mean_photons(),
        beta_sq,
        at_lower_bound,
        monotone,
        method: resolved,
        evaluations,
    };
    if crossing == 0 {
        let n = evaluations;
        return Ok(finish(BUDGET_SEARCH_FLOOR, true, n));
    }
    let (mut lo, mut hi) = (samples[crossing - 1].0, samples[crossing].0);
    while hi / lo - 1.0 > BUDGET_RELATIVE_WIDTH {
        let mid = (lo * hi).sqrt();
        if eval(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n = evaluations;
    Ok(finish((lo * hi).sqrt(), false, n))
}
