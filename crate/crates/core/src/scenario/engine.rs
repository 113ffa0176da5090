// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Evaluation engines, selected by name from an [`EngineRegistry`].

use std::collections::BTreeMap;
use std::sync::Arc;

use super::config::{AnalyticModel, EngineKind, Metric, ProbeKind, ScenarioSpec, SweepParameter, TimeKind};
use crate::boson::{self, AuxStateSpec};
use crate::composite::{
    beamsplitter_hamiltonian, case_hamiltonian, classical_rotation, evolve_with, partial_trace_b,
    reduced_density_separable, separable_coherence_profile, separable_evolve, ClassicalCase, CompositeBasis,
    HamiltonianKind,
};
use crate::error::{Error, Result};
use crate::metrology::{self, BudgetMethod, BudgetResult};
use crate::semiclassical;
use crate::spin::{spin_operator, Axis, SpinBasis};
use crate::state::{DensityMatrix, PureState};

/// Concrete parameters at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub sweep_value: f64,
    pub n_atoms: usize,
    pub aux: AuxStateSpec,
    pub tau: Option<f64>,
}

/// Everything an engine reports for one point. Diagnostics that do not apply
/// are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointRecord {
    pub f_a: Option<f64>,
    pub gamma: Option<f64>,
    pub c_max: Option<f64>,
    pub budget: Option<BudgetResult>,
    /// QFI of the noise-free rotation by the mean angle.
    pub f_max: Option<f64>,
    pub n_cut: usize,
    pub leakage: f64,
    pub discarded_pair_weight: f64,
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;
    /// Rejects scenarios whose metrics this engine cannot compute.
    fn check(&self, spec: &ScenarioSpec) -> Result<()>;
    fn evaluate(&self, spec: &ScenarioSpec, point: &Point) -> Result<PointRecord>;
}

pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Arc<dyn Engine>>,
}

impl Default for EngineRegistry {
    fn default() -> Self {
        let mut r = Self {
            engines: BTreeMap::new(),
        };
        r.register(Arc::new(ExactEngine));
        r.register(Arc::new(AnalyticEngine));
        r.register(Arc::new(SemiclassicalEngine));
        r
    }
}

impl EngineRegistry {
    pub fn register(&mut self, engine: Arc<dyn Engine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Engine>> {
        self.engines
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn for_kind(&self, kind: EngineKind) -> Result<Arc<dyn Engine>> {
        self.get(kind.name())
    }
}

/// Applies the sweep value to the scenario and converts the time spec into `τ`.
pub fn resolve_point(spec: &ScenarioSpec, x: f64) -> Result<Point> {
    let mut aux_cfg = spec.aux.clone();
    let mut n_atoms = spec.probe.n_atoms;
    let mut time = spec.time.value;
    match spec.sweep.parameter {
        SweepParameter::Tau | SweepParameter::Theta | SweepParameter::Phi => time = Some(x),
        SweepParameter::BetaSq => {
            aux_cfg.beta = num_complex::Complex64::new(0.0, 0.0);
            aux_cfg.n_b = None;
            aux_cfg.beta_sq = Some(x);
        }
        SweepParameter::R => aux_cfg.r = x,
        SweepParameter::NAtoms => n_atoms = x as usize,
        SweepParameter::FB => {
            aux_cfg.beta = num_complex::Complex64::new(0.0, 0.0);
            aux_cfg.n_b = None;
            aux_cfg.beta_sq = Some(solve_beta_sq_for_fb(spec, x)?);
        }
    }
    let aux = aux_cfg.resolve()?;
    let tau = match time {
        None => None,
        Some(v) => Some(match spec.time.kind {
            TimeKind::Tau => v,
            TimeKind::Theta => {
                let b = aux.beta_abs();
                if b == 0.0 {
                    return Err(Error::Config("time.kind = theta needs |beta| > 0".into()));
                }
                v / (2.0 * b)
            }
            TimeKind::Phi => {
                let n_b = aux.mean_photons();
                if n_b == 0.0 {
                    return Err(Error::Config("time.kind = phi needs N_B > 0".into()));
                }
                v / n_b
            }
        }),
    };
    Ok(Point {
        sweep_value: x,
        n_atoms,
        aux,
        tau,
    })
}

/// Auxiliary QFI in the form plotted for each coupling: `4 V(n)` (divided by
/// `N_B²` when time is given as the phase `φ`), or `V(Y) / |β|²` for the
/// beam-splitter family.
pub fn aux_fisher(spec: &ScenarioSpec, aux: &AuxStateSpec) -> f64 {
    match spec.hamiltonian {
        HamiltonianKind::SeparableJz => {
            let v = aux.number_qfi();
            if spec.time.kind == TimeKind::Phi {
                v / aux.mean_photons().powi(2)
            } else {
                v
            }
        }
        _ => aux.y_variance() / aux.beta.norm_sqr(),
    }
}

fn solve_beta_sq_for_fb(spec: &ScenarioSpec, target: f64) -> Result<f64> {
    let r = spec.aux.r;
    let f = |b2: f64| aux_fisher(spec, &AuxStateSpec::squeezed(b2.sqrt(), r));
    let (mut lo, mut hi) = (1e-8_f64, 1e9_f64);
    let (flo, fhi) = (f(lo) - target, f(hi) - target);
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Config(format!(
            "F_B = {target} is not reachable by varying |beta|² at r = {r}"
        )));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if (f(mid) - target).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

fn wrap(engine: &'static str) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        e @ (Error::Config(_) | Error::Engine { .. }) => e,
        other => Error::Engine {
            engine: engine.to_string(),
            source: Box::new(other),
        },
    }
}

fn require_real_beta(point: &Point) -> Result<f64> {
    let beta = point.aux.beta;
    if point.aux.is_fock() || beta.im != 0.0 || !(beta.re > 0.0) {
        return Err(Error::Config(
            "this coupling needs a squeezed coherent auxiliary with real beta > 0".into(),
        ));
    }
    Ok(beta.re)
}

/// Mean rotation of the probe for the scenario's coupling: about `Jz` by
/// `N_B τ`, or about `Jx` by `2|β|τ`.
fn mean_rotation(spec: &ScenarioSpec, point: &Point, tau: f64) -> (Axis, f64) {
    match spec.hamiltonian {
        HamiltonianKind::SeparableJz => (Axis::Z, point.aux.mean_photons() * tau),
        _ => (Axis::X, 2.0 * point.aux.beta_abs() * tau),
    }
}

fn fill_state_metrics(
    spec: &ScenarioSpec,
    point: &Point,
    probe: &PureState,
    rho: &DensityMatrix,
    record: &mut PointRecord,
) -> Result<()> {
    let basis = SpinBasis::new(point.n_atoms);
    let g = spin_operator(spec.generator, &basis);
    if spec.outputs.contains(&Metric::FA) {
        let q = metrology::qfi_mixed_with_threshold(rho, &g, spec.numerics.eigen_threshold)?;
        record.f_a = Some(q.value);
        record.discarded_pair_weight = q.discarded_pair_weight;
        let tau = point.tau.expect("state metrics have a time");
        let (axis, angle) = mean_rotation(spec, point, tau);
        record.f_max = Some(metrology::qfi_pure(&classical_rotation(probe, axis, angle)?, &g)?.value);
    }
    if spec.outputs.contains(&Metric::Gamma) {
        record.gamma = Some(metrology::purity(rho));
    }
    Ok(())
}

fn probe_for(spec: &ScenarioSpec, point: &Point) -> Result<PureState> {
    let mut probe = spec.probe.clone();
    probe.n_atoms = point.n_atoms;
    probe.build()
}

fn wants_state(spec: &ScenarioSpec) -> bool {
    spec.outputs.iter().any(Metric::needs_state)
}

fn empirical_budget(spec: &ScenarioSpec, point: &Point, method: BudgetMethod) -> Result<BudgetResult> {
    let b = spec.budget.expect("checked: N_B_TFS has a budget block");
    metrology::nb_tfs_empirical(b.regime, point.n_atoms, b.angle, &point.aux, method)
}

/// Full quantum evolution on the truncated composite space.
pub struct ExactEngine;

impl ExactEngine {
    fn density(
        &self,
        spec: &ScenarioSpec,
        point: &Point,
        probe: &PureState,
        record: &mut PointRecord,
    ) -> Result<DensityMatrix> {
        let tau = point.tau.expect("state metrics have a time");
        let tol = spec.numerics.leakage_tolerance;
        if spec.hamiltonian == HamiltonianKind::ClassicalRotation {
            let (axis, angle) = mean_rotation(spec, point, tau);
            return Ok(classical_rotation(probe, axis, angle)?.projector());
        }
        let fock = boson::choose_cutoff(&point.aux, tol)?;
        record.n_cut = fock.n_cut();
        record.leakage = fock.leakage().unwrap_or(0.0);
        let psi_b = boson::squeezed_coherent(&point.aux, &fock)?;
        if spec.hamiltonian == HamiltonianKind::SeparableJz {
            let branches = separable_evolve(probe, &psi_b, tau)?;
            if spec.outputs.contains(&Metric::CMax) {
                let profile = separable_coherence_profile(&psi_b, tau, point.n_atoms);
                record.c_max = Some(profile[point.n_atoms].norm());
            }
            return Ok(reduced_density_separable(&branches));
        }
        let cb = CompositeBasis::new(SpinBasis::new(point.n_atoms), fock);
        if cb.dim() > spec.numerics.max_dim {
            return Err(Error::ResourceCeiling(format!(
                "composite dimension {} exceeds numerics.max_dim = {}",
                cb.dim(),
                spec.numerics.max_dim
            )));
        }
        let h = match spec.hamiltonian {
            HamiltonianKind::BeamSplitter => beamsplitter_hamiltonian(&cb),
            HamiltonianKind::ClassicalXCase => case_hamiltonian(ClassicalCase::X, point.aux.beta.re, &cb)?,
            HamiltonianKind::ClassicalYCase => case_hamiltonian(ClassicalCase::Y, require_real_beta(point)?, &cb)?,
            HamiltonianKind::SeparableJz | HamiltonianKind::ClassicalRotation => unreachable!("handled above"),
        };
        let psi = evolve_with(&h, &probe.product(&psi_b)?, tau, spec.numerics.propagator)?;
        partial_trace_b(&psi, &cb)
    }
}

impl Engine for ExactEngine {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn check(&self, spec: &ScenarioSpec) -> Result<()> {
        spec.check()
    }

    fn evaluate(&self, spec: &ScenarioSpec, point: &Point) -> Result<PointRecord> {
        let run = || -> Result<PointRecord> {
            let mut record = PointRecord::default();
            if wants_state(spec) {
                let probe = probe_for(spec, point)?;
                let rho = self.density(spec, point, &probe, &mut record)?;
                fill_state_metrics(spec, point, &probe, &rho, &mut record)?;
            }
            if spec.outputs.contains(&Metric::NbTfs) {
                record.budget = Some(empirical_budget(spec, point, BudgetMethod::Exact)?);
            }
            Ok(record)
        };
        run().map_err(wrap(self.name()))
    }
}

/// Probe rotated by Gaussian-distributed classical angles.
pub struct SemiclassicalEngine;

impl Engine for SemiclassicalEngine {
    fn name(&self) -> &'static str {
        "semiclassical"
    }

    fn check(&self, spec: &ScenarioSpec) -> Result<()> {
        spec.check()?;
        if wants_state(spec)
            && matches!(
                spec.hamiltonian,
                HamiltonianKind::ClassicalXCase | HamiltonianKind::ClassicalYCase
            )
        {
            return Err(Error::Config(
                "the semiclassical engine has no model for the classical X/Y case couplings".into(),
            ));
        }
        Ok(())
    }

    fn evaluate(&self, spec: &ScenarioSpec, point: &Point) -> Result<PointRecord> {
        let run = || -> Result<PointRecord> {
            let mut record = PointRecord::default();
            if wants_state(spec) {
                let probe = probe_for(spec, point)?;
                let tau = point.tau.expect("state metrics have a time");
                let rho = match spec.hamiltonian {
                    HamiltonianKind::SeparableJz => {
                        let noise = semiclassical::jz_noise(&point.aux, tau);
                        if spec.outputs.contains(&Metric::CMax) {
                            record.c_max = Some(noise.characteristic(point.n_atoms as f64).norm());
                        }
                        semiclassical::semiclassical_jz(&probe, &noise)?
                    }
                    HamiltonianKind::BeamSplitter => semiclassical::semiclassical_bs(
                        &probe,
                        &semiclassical::noise_from_optics(&point.aux, tau)?,
                        spec.numerics.semiclassical_variant,
                        spec.numerics.grid(),
                    )?,
                    HamiltonianKind::ClassicalRotation => {
                        let (axis, angle) = mean_rotation(spec, point, tau);
                        classical_rotation(&probe, axis, angle)?.projector()
                    }
                    HamiltonianKind::ClassicalXCase | HamiltonianKind::ClassicalYCase => {
                        unreachable!("rejected by check")
                    }
                };
                fill_state_metrics(spec, point, &probe, &rho, &mut record)?;
            }
            if spec.outputs.contains(&Metric::NbTfs) {
                record.budget = Some(empirical_budget(spec, point, BudgetMethod::Semiclassical)?);
            }
            Ok(record)
        };
        run().map_err(wrap(self.name()))
    }
}

/// Closed-form predictions for the regimes where they exist.
pub struct AnalyticEngine;

impl Engine for AnalyticEngine {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn check(&self, spec: &ScenarioSpec) -> Result<()> {
        spec.check()?;
        if !wants_state(spec) {
            return Ok(());
        }
        match spec.hamiltonian {
            HamiltonianKind::SeparableJz if spec.probe.kind == ProbeKind::Noon && spec.generator == Axis::Z => Ok(()),
            HamiltonianKind::SeparableJz => Err(Error::Config(
                "the analytic separable prediction covers the NOON probe with generator z".into(),
            )),
            HamiltonianKind::BeamSplitter => {
                if !spec.probe.is_jy_cat() {
                    return Err(Error::Config(
                        "the analytic beam-splitter prediction needs the Jy cat spin_cat(pi/2, 0)".into(),
                    ));
                }
                let at_half_pi =
                    spec.time.kind == TimeKind::Theta && spec.time.value == Some(std::f64::consts::FRAC_PI_2);
                if !at_half_pi || spec.sweep.parameter == SweepParameter::Theta {
                    return Err(Error::Config(
                        "the analytic beam-splitter prediction is only defined at theta = pi/2".into(),
                    ));
                }
                if spec.generator != Axis::Z {
                    return Err(Error::Config(
                        "the analytic beam-splitter prediction uses generator z".into(),
                    ));
                }
                Ok(())
            }
            other => Err(Error::Config(format!(
                "no analytic prediction for the {other:?} coupling"
            ))),
        }
    }

    fn evaluate(&self, spec: &ScenarioSpec, point: &Point) -> Result<PointRecord> {
        let run = || -> Result<PointRecord> {
            let mut record = PointRecord::default();
            let n = point.n_atoms;
            if wants_state(spec) {
                let tau = point.tau.expect("state metrics have a time");
                let (f_a, gamma) = match spec.hamiltonian {
                    HamiltonianKind::SeparableJz => match spec.numerics.analytic_model {
                        AnalyticModel::Revival => {
                            let f = metrology::qfi_revival_prediction_for(&point.aux, n, tau);
                            (f, metrology::gamma_from_qfi(f, n)?)
                        }
                        AnalyticModel::ShortTime => {
                            let p = metrology::short_time_predictions(point.aux.number_qfi(), n, tau);
                            (p.f_a, p.gamma)
                        }
                    },
                    _ => {
                        let f =
                            metrology::beamsplitter_generator_prediction(require_real_beta(point)?, point.aux.r, n)?;
                        (f, metrology::gamma_from_qfi(f, n)?)
                    }
                };
                record.f_a = Some(f_a);
                record.gamma = Some(gamma);
                let probe = probe_for(spec, point)?;
                let (axis, angle) = mean_rotation(spec, point, tau);
                let g = spin_operator(spec.generator, &SpinBasis::new(n));
                record.f_max = Some(metrology::qfi_pure(&classical_rotation(&probe, axis, angle)?, &g)?.value);
                if spec.outputs.contains(&Metric::CMax) {
                    record.c_max = Some(metrology::c_max_from_gamma(gamma)?);
                }
            }
            if spec.outputs.contains(&Metric::NbTfs) {
                let b = spec.budget.expect("checked: N_B_TFS has a budget block");
                let n_b = metrology::nb_tfs(b.regime, n, b.angle, point.aux.r)?;
                record.budget = Some(BudgetResult {
                    n_b,
                    beta_sq: n_b - point.aux.r.sinh().powi(2),
                    at_lower_bound: false,
                    monotone: true,
                    method: BudgetMethod::Auto,
                    evaluations: 0,
                });
            }
            Ok(record)
        };
        run().map_err(wrap(self.name()))
    }
}
