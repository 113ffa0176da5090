// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files: JSON with shared defaults plus optional `panels` and
//! `series` lists that are merged over them to give one [`ScenarioSpec`] each.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::boson::{AuxKind, AuxStateSpec, DEFAULT_LEAKAGE_TOLERANCE};
use crate::composite::HamiltonianKind;
use crate::error::{Error, Result};
use crate::metrology::{BudgetMethod, BudgetRegime, DEFAULT_EIGEN_THRESHOLD};
use crate::propagator::PropagatorStrategy;
use crate::semiclassical::{GridParams, SemiclassicalVariant};
use crate::spin::{self, Axis, NamedState, SpinBasis};
use crate::state::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Exact,
    Analytic,
    Semiclassical,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Exact => "exact",
            EngineKind::Analytic => "analytic",
            EngineKind::Semiclassical => "semiclassical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "F_A")]
    FA,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "C_max")]
    CMax,
    #[serde(rename = "N_B_TFS")]
    NbTfs,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::FA => "F_A",
            Metric::Gamma => "gamma",
            Metric::CMax => "C_max",
            Metric::NbTfs => "N_B_TFS",
        }
    }

    /// Metrics evaluated on the evolved probe rather than by a budget search.
    pub fn needs_state(&self) -> bool {
        !matches!(self, Metric::NbTfs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Noon,
    TwinFock,
    OatCat,
    Css,
    SpinCat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub n_atoms: usize,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub rel_phase: f64,
}

impl ProbeSpec {
    pub fn build(&self) -> Result<PureState> {
        let basis = SpinBasis::new(self.n_atoms);
        match self.kind {
            ProbeKind::Noon => spin::named_state(NamedState::Noon, &basis),
            ProbeKind::TwinFock => spin::named_state(NamedState::TwinFock, &basis),
            ProbeKind::OatCat => spin::named_state(NamedState::OatCat, &basis),
            ProbeKind::Css => spin::coherent_spin_state(self.theta, self.phi, &basis),
            ProbeKind::SpinCat => spin::spin_cat(self.theta, self.phi, self.rel_phase, &basis),
        }
    }

    /// The `Jy` cat `spin_cat(π/2, 0, ·)`.
    pub fn is_jy_cat(&self) -> bool {
        self.kind == ProbeKind::SpinCat && (self.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-12 && self.phi == 0.0
    }
}

/// Auxiliary state in config form. At most one of `beta`, `beta_sq` and `n_b`
/// may be given; `n_b` fixes the mean photon number (or the Fock level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxConfig {
    #[serde(default, with = "crate::boson::complex_serde", skip_serializing_if = "is_zero")]
    pub beta: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_b: Option<f64>,
    #[serde(default)]
    pub r: f64,
    #[serde(default = "default_aux_kind")]
    pub kind: AuxKind,
    #[serde(default)]
    pub fock_n: usize,
}

fn is_zero(z: &Complex64) -> bool {
    *z == Complex64::new(0.0, 0.0)
}

fn default_aux_kind() -> AuxKind {
    AuxKind::SqueezedCoherent
}

impl AuxConfig {
    pub fn resolve(&self) -> Result<AuxStateSpec> {
        let given = [!is_zero(&self.beta), self.beta_sq.is_some(), self.n_b.is_some()];
        if given.iter().filter(|g| **g).count() > 1 {
            return Err(Error::Config("aux: give at most one of beta, beta_sq, n_b".into()));
        }
        if self.kind == AuxKind::Fock {
            let n = match self.n_b {
                Some(n) if n >= 0.0 && n.fract() == 0.0 => n as usize,
                Some(n) => {
                    return Err(Error::Config(format!(
                        "aux: Fock level must be a whole number, got {n}"
                    )))
                }
                None => self.fock_n,
            };
            return Ok(AuxStateSpec::fock(n));
        }
        if let Some(n_b) = self.n_b {
            return AuxStateSpec::from_photons(n_b, self.r).map_err(|e| Error::Config(e.to_string()));
        }
        let beta = match self.beta_sq {
            Some(b2) if b2 >= 0.0 => Complex64::new(b2.sqrt(), 0.0),
            Some(b2) => return Err(Error::Config(format!("aux: beta_sq must be non-negative, got {b2}"))),
            None => self.beta,
        };
        Ok(AuxStateSpec {
            beta,
            r: self.r,
            kind: AuxKind::SqueezedCoherent,
            fock_n: 0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Tau,
    Theta,
    Phi,
    BetaSq,
    R,
    NAtoms,
    FB,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Tau => "tau",
            SweepParameter::Theta => "theta",
            SweepParameter::Phi => "phi",
            SweepParameter::BetaSq => "beta_sq",
            SweepParameter::R => "r",
            SweepParameter::NAtoms => "n_atoms",
            SweepParameter::FB => "f_b",
        }
    }

    fn time_kind(&self) -> Option<TimeKind> {
        match self {
            SweepParameter::Tau => Some(TimeKind::Tau),
            SweepParameter::Theta => Some(TimeKind::Theta),
            SweepParameter::Phi => Some(TimeKind::Phi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let grid = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => match (n, self.spacing) {
                (0, _) => Vec::new(),
                (1, _) => vec![a],
                (_, Spacing::Linear) => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
                (_, Spacing::Log) => {
                    if !(a > 0.0 && b > 0.0) {
                        return Err(Error::Config("sweep: log spacing needs positive bounds".into()));
                    }
                    let (la, lb) = (a.ln(), b.ln());
                    (0..n)
                        .map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp())
                        .collect()
                }
            },
            _ => {
                return Err(Error::Config(
                    "sweep: give either `values` or all of `start`, `stop`, `points`".into(),
                ))
            }
        };
        if grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("sweep grid contains a non-finite value".into()));
        }
        let increasing = grid.windows(2).all(|w| w[1] > w[0]);
        let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::Config("sweep grid is not strictly monotone".into()));
        }
        if self.parameter == SweepParameter::NAtoms && grid.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
            return Err(Error::Config("sweep: n_atoms values must be positive integers".into()));
        }
        Ok(grid)
    }
}

/// How the evolution time is specified: directly, as the mean beam-splitter
/// angle `θ = 2|β|τ`, or as the mean phase `φ = N_B τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    #[default]
    Tau,
    Theta,
    Phi,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub kind: TimeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub regime: BudgetRegime,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticModel {
    #[default]
    Revival,
    ShortTime,
}

fn default_leakage() -> f64 {
    DEFAULT_LEAKAGE_TOLERANCE
}
fn default_threshold() -> f64 {
    DEFAULT_EIGEN_THRESHOLD
}
fn default_grid_points() -> usize {
    GridParams::default().n_points
}
fn default_grid_span() -> f64 {
    GridParams::default().span_sigmas
}
fn default_max_dim() -> usize {
    200_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    #[serde(default = "default_leakage")]
    pub leakage_tolerance: f64,
    #[serde(default = "default_threshold")]
    pub eigen_threshold: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_grid_span")]
    pub grid_span_sigmas: f64,
    #[serde(default)]
    pub propagator: PropagatorStrategy,
    #[serde(default)]
    pub semiclassical_variant: SemiclassicalVariant,
    #[serde(default)]
    pub analytic_model: AnalyticModel,
    /// Largest composite dimension an exact evaluation may use.
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

impl Default for NumericsSpec {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Map::new())).expect("numerics defaults")
    }
}

impl NumericsSpec {
    pub fn grid(&self) -> GridParams {
        GridParams {
            n_points: self.grid_points,
            span_sigmas: self.grid_span_sigmas,
        }
    }
}

fn default_generator() -> Axis {
    Axis::Z
}

/// One fully resolved scenario: a single sweep with a single engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub scenario_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub engine: EngineKind,
    pub probe: ProbeSpec,
    pub aux: AuxConfig,
    pub hamiltonian: HamiltonianKind,
    #[serde(default = "default_generator")]
    pub generator: Axis,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub outputs: Vec<Metric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
    #[serde(default)]
    pub numerics: NumericsSpec,
}

impl ScenarioSpec {
    pub fn from_value(value: Value) -> Result<Self> {
        serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
    }

    /// File stem for outputs: `{scenario_id}` or `{scenario_id}_{label}`.
    pub fn stem(&self) -> String {
        match &self.label {
            Some(l) => format!("{}_{}", self.scenario_id, l),
            None => self.scenario_id.clone(),
        }
    }

    /// Canonical JSON: every field present, object keys sorted.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// Schema-level checks that do not depend on the engine.
    pub fn check(&self) -> Result<()> {
        if self.scenario_id.is_empty() {
            return Err(Error::Config("scenario_id is empty".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("outputs is empty".into()));
        }
        let mut sorted = self.outputs.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.outputs.len() {
            return Err(Error::Config("outputs lists a metric twice".into()));
        }
        if self.probe.n_atoms == 0 {
            return Err(Error::Config("probe.n_atoms must be positive".into()));
        }
        self.sweep.grid()?;
        self.aux.resolve()?;
        let n = &self.numerics;
        if !(n.leakage_tolerance > 0.0 && n.leakage_tolerance <= 1e-3) {
            return Err(Error::Config(format!(
                "numerics.leakage_tolerance {} outside (0, 1e-3]",
                n.leakage_tolerance
            )));
        }
        if !(n.eigen_threshold >= 0.0) {
            return Err(Error::Config("numerics.eigen_threshold must be non-negative".into()));
        }
        if n.grid_points.is_multiple_of(2) || !(n.grid_span_sigmas > 0.0) {
            return Err(Error::Config(
                "numerics: grid_points must be odd and grid_span_sigmas positive".into(),
            ));
        }
        if let Some(kind) = self.sweep.parameter.time_kind() {
            if kind != self.time.kind {
                return Err(Error::Config(format!(
                    "sweep over {} needs time.kind = {}",
                    self.sweep.parameter.name(),
                    self.sweep.parameter.name()
                )));
            }
        } else if self.time.value.is_none() && self.outputs.iter().any(Metric::needs_state) {
            return Err(Error::Config(
                "time.value is required when the sweep is not over time".into(),
            ));
        }
        if self.sweep.parameter == SweepParameter::FB && self.aux.kind == AuxKind::Fock {
            return Err(Error::Config("an f_b sweep needs a squeezed coherent family".into()));
        }
        if self.outputs.contains(&Metric::NbTfs) {
            let Some(b) = &self.budget else {
                return Err(Error::Config("N_B_TFS output needs a `budget` block".into()));
            };
            if !(b.angle > 0.0) {
                return Err(Error::Config("budget.angle must be positive".into()));
            }
        }
        if self.outputs.contains(&Metric::CMax) && self.hamiltonian != HamiltonianKind::SeparableJz {
            return Err(Error::Config(
                "C_max is only defined for the separable_jz coupling".into(),
            ));
        }
        Ok(())
    }

    pub fn budget_method(&self) -> BudgetMethod {
        match self.engine {
            EngineKind::Semiclassical => BudgetMethod::Semiclassical,
            _ => BudgetMethod::Exact,
        }
    }
}

/// Recursive object merge; non-object values in `patch` replace those in `base`.
pub fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

/// Sets `path` (dot separated, numeric segments index arrays) to `value`,
/// creating intermediate objects as needed.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let segments: Vec<&str> = path.split('.').collect();
    if path.is_empty() || segments.iter().any(|s| s.is_empty()) {
        return Err(Error::Config(format!("malformed override path `{path}`")));
    }
    let mut node = root;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        node = match node {
            Value::Array(items) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| Error::Config(format!("`{seg}` in `{path}` must index an array")))?;
                let len = items.len();
                items
                    .get_mut(idx)
                    .ok_or_else(|| Error::Config(format!("index {idx} out of range ({len}) in `{path}`")))?
            }
            Value::Object(map) => {
                map.entry(seg.to_string())
                    .or_insert_with(|| if last { Value::Null } else { Value::Object(Map::new()) })
            }
            _ => return Err(Error::Config(format!("`{path}` descends into a scalar"))),
        };
    }
    *node = value;
    Ok(())
}

/// Parses a `path=value` override; the value is read as JSON and falls back to
/// a plain string.
pub fn parse_override(text: &str) -> Result<(String, Value)> {
    let (path, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{text}` is not of the form path=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok((path.trim().to_string(), value))
}

/// A scenario file before expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    raw: Value,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: Value) -> Result<Self> {
        if !raw.is_object() {
            return Err(Error::Config("scenario file must hold a JSON object".into()));
        }
        Ok(Self { raw })
    }

    pub fn raw(&self) -> &Value {
        &self.raw
    }

    pub fn apply_override(&mut self, path: &str, value: Value) -> Result<()> {
        set_path(&mut self.raw, path, value)
    }

    /// Expands panels and series into resolved scenarios, each checked.
    pub fn expand(&self) -> Result<Vec<ScenarioSpec>> {
        let mut base = self.raw.clone();
        let obj = base.as_object_mut().expect("object checked on construction");
        let panels = take_list(obj, "panels")?;
        let top_series = take_list(obj, "series")?;
        let panels = if panels.is_empty() {
            vec![Value::Object(Map::new())]
        } else {
            panels
        };

        let mut out = Vec::new();
        for panel in panels {
            let mut panel = panel;
            let panel_obj = panel
                .as_object_mut()
                .ok_or_else(|| Error::Config("each panel must be an object".into()))?;
            let own_series = take_list(panel_obj, "series")?;
            let panel_label = take_label(panel_obj)?;
            let series = if !own_series.is_empty() {
                own_series
            } else if !top_series.is_empty() {
                top_series.clone()
            } else {
                vec![Value::Object(Map::new())]
            };
            for s in series {
                let mut s = s;
                let s_obj = s
                    .as_object_mut()
                    .ok_or_else(|| Error::Config("each series entry must be an object".into()))?;
                let series_label = take_label(s_obj)?;
                let mut merged = base.clone();
                merge(&mut merged, &panel);
                merge(&mut merged, &s);
                let label = match (panel_label.clone(), series_label) {
                    (Some(p), Some(s)) => Some(format!("{p}_{s}")),
                    (p, s) => p.or(s),
                };
                if let Some(l) = label {
                    merged
                        .as_object_mut()
                        .expect("merged object")
                        .insert("label".into(), Value::String(l));
                }
                let spec = ScenarioSpec::from_value(merged)?;
                spec.check()?;
                out.push(spec);
            }
        }
        let mut stems: Vec<String> = out.iter().map(ScenarioSpec::stem).collect();
        stems.sort();
        if stems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("two expanded scenarios share an id and label".into()));
        }
        Ok(out)
    }
}

fn take_list(obj: &mut Map<String, Value>, key: &str) -> Result<Vec<Value>> {
    match obj.remove(key) {
        None => Ok(Vec::new()),
        Some(Value::Array(v)) => Ok(v),
        Some(_) => Err(Error::Config(format!("`{key}` must be an array"))),
    }
}

fn take_label(obj: &mut Map<String, Value>) -> Result<Option<String>> {
    match obj.remove("label") {
        None => Ok(None),
        Some(Value::String(s))
            if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') =>
        {
            Ok(Some(s))
        }
        Some(other) => Err(Error::Config(format!(
            "labels must be non-empty [A-Za-z0-9_-] strings, got {other}"
        ))),
    }
}
