// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::{Metric, ScenarioSpec};
use super::engine::{aux_fisher, resolve_point, EngineRegistry, Point, PointRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    /// Metric this column belongs to; `None` for the sweep and diagnostics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Metric>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMetadata {
    pub scenario_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub engine: String,
    pub sweep: String,
    pub outputs: Vec<Metric>,
    pub config_hash: String,
    pub crate_version: String,
    pub config: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub metadata: TableMetadata,
    pub columns: Vec<Column>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stem(&self) -> String {
        match &self.metadata.label {
            Some(l) => format!("{}_{}", self.metadata.scenario_id, l),
            None => self.metadata.scenario_id.clone(),
        }
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn sweep_values(&self) -> &[f64] {
        &self.columns[0].values
    }

    /// Main values for `metric`, if it was computed.
    pub fn metric(&self, metric: Metric) -> Option<&[f64]> {
        self.column(metric.name())
    }

    /// Columns written to the CSV for `metric`: sweep, metric group, diagnostics.
    pub fn csv_columns(&self, metric: Metric) -> Vec<&Column> {
        let sweep = self.columns.iter().take(1);
        let group = self.columns.iter().filter(|c| c.metric == Some(metric));
        let diagnostics = self.columns.iter().skip(1).filter(|c| c.metric.is_none());
        sweep.chain(group).chain(diagnostics).collect()
    }
}

fn evaluate_point(spec: &ScenarioSpec, registry: &EngineRegistry, x: f64) -> Result<(Point, PointRecord)> {
    let engine = registry.for_kind(spec.engine)?;
    let point = resolve_point(spec, x)?;
    let record = engine.evaluate(spec, &point)?;
    Ok((point, record))
}

/// Validates the scenario against its engine.
pub fn validate(spec: &ScenarioSpec) -> Result<()> {
    EngineRegistry::default().for_kind(spec.engine)?.check(spec)
}

/// Evaluates every sweep point. The first point runs alone so shared
/// propagators are built once; the rest run on the rayon pool and are
/// collected in grid order.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ResultTable> {
    let registry = EngineRegistry::default();
    registry.for_kind(spec.engine)?.check(spec)?;
    let grid = spec.sweep.grid()?;
    log::info!(
        "{}: {} points with engine {}",
        spec.stem(),
        grid.len(),
        spec.engine.name()
    );
    let first = evaluate_point(spec, &registry, grid[0])?;
    let rest: Vec<Result<(Point, PointRecord)>> = grid[1..]
        .par_iter()
        .map(|&x| evaluate_point(spec, &registry, x))
        .collect();
    let mut rows = vec![first];
    for r in rest {
        rows.push(r?);
    }
    Ok(assemble(spec, &rows))
}

fn assemble(spec: &ScenarioSpec, rows: &[(Point, PointRecord)]) -> ResultTable {
    let mut columns = Vec::new();
    let mut push = |name: &str, metric: Option<Metric>, f: &dyn Fn(&Point, &PointRecord) -> f64| {
        columns.push(Column {
            name: name.to_string(),
            metric,
            values: rows.iter().map(|(p, r)| f(p, r)).collect(),
        });
    };
    push(spec.sweep.parameter.name(), None, &|p, _| p.sweep_value);
    let na = |p: &Point| p.n_atoms as f64;
    for metric in &spec.outputs {
        let m = Some(*metric);
        match metric {
            Metric::FA => {
                push("F_A", m, &|_, r| r.f_a.unwrap_or(f64::NAN));
                push("F_A_over_NA2", m, &|p, r| r.f_a.unwrap_or(f64::NAN) / (na(p) * na(p)));
                push("F_A_over_NA", m, &|p, r| r.f_a.unwrap_or(f64::NAN) / na(p));
                push("F_max", m, &|_, r| r.f_max.unwrap_or(f64::NAN));
            }
            Metric::Gamma => push("gamma", m, &|_, r| r.gamma.unwrap_or(f64::NAN)),
            Metric::CMax => push("C_max", m, &|_, r| r.c_max.unwrap_or(f64::NAN)),
            Metric::NbTfs => {
                let b = |r: &PointRecord| r.budget.clone().expect("budget computed");
                push("N_B_TFS", m, &|_, r| b(r).n_b);
                push("beta_sq_TFS", m, &|_, r| b(r).beta_sq);
                push("at_lower_bound", m, &|_, r| b(r).at_lower_bound as u8 as f64);
                push("monotone", m, &|_, r| b(r).monotone as u8 as f64);
                push("evaluations", m, &|_, r| b(r).evaluations as f64);
            }
        }
    }
    let sweep = spec.sweep.parameter.name();
    if sweep != "n_atoms" {
        push("n_atoms", None, &|p, _| na(p));
    }
    if spec.outputs.iter().any(Metric::needs_state) {
        if sweep != "tau" {
            push("tau", None, &|p, _| p.tau.unwrap_or(f64::NAN));
        }
        push("F_B", None, &|p, _| aux_fisher(spec, &p.aux));
    }
    push("N_B", None, &|p, _| p.aux.mean_photons());
    push("n_cut", None, &|_, r| r.n_cut as f64);
    push("leakage", None, &|_, r| r.leakage);
    push("discarded_pair_weight", None, &|_, r| r.discarded_pair_weight);
    ResultTable {
        metadata: TableMetadata {
            scenario_id: spec.scenario_id.clone(),
            label: spec.label.clone(),
            engine: spec.engine.name().to_string(),
            sweep: spec.sweep.parameter.name().to_string(),
            outputs: spec.outputs.clone(),
            config_hash: spec.config_hash(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(spec).expect("scenario serializes"),
        },
        columns,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDiscrepancy {
    pub stem: String,
    pub metric: Metric,
    pub abs_diff: Vec<f64>,
    pub rel_diff: Vec<f64>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub tolerance: f64,
    pub abs_floor: f64,
    pub metrics: Vec<MetricDiscrepancy>,
    /// Every shared metric has `max_rel ≤ tolerance`.
    pub passed: bool,
}

/// `|a − b| / max(|a|, |b|, floor)`, zero when the denominator vanishes.
pub fn relative_difference(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Configurations must match after dropping `engine` and `label`.
pub fn check_comparable(a: &ScenarioSpec, b: &ScenarioSpec) -> Result<()> {
    let strip = |s: &ScenarioSpec| {
        let mut v = serde_json::to_value(s).expect("scenario serializes");
        let obj = v.as_object_mut().expect("object");
        obj.remove("engine");
        obj.remove("label");
        v
    };
    if strip(a) != strip(b) {
        return Err(Error::IncompatibleConfigs(format!(
            "{} and {} differ in more than the engine",
            a.stem(),
            b.stem()
        )));
    }
    Ok(())
}

pub fn compare_tables(pairs: &[(ResultTable, ResultTable)], tolerance: f64, abs_floor: f64) -> DiscrepancyReport {
    let mut metrics = Vec::new();
    for (a, b) in pairs {
        for metric in &a.metadata.outputs {
            let (Some(x), Some(y)) = (a.metric(*metric), b.metric(*metric)) else {
                continue;
            };
            let abs_diff: Vec<f64> = x.iter().zip(y).map(|(p, q)| (p - q).abs()).collect();
            let rel_diff: Vec<f64> = x
                .iter()
                .zip(y)
                .map(|(p, q)| relative_difference(*p, *q, abs_floor))
                .collect();
            let n = abs_diff.len() as f64;
            metrics.push(MetricDiscrepancy {
                stem: a.stem(),
                metric: *metric,
                max_abs: abs_diff.iter().cloned().fold(0.0, f64::max),
                mean_abs: abs_diff.iter().sum::<f64>() / n,
                max_rel: rel_diff.iter().cloned().fold(0.0, f64::max),
                mean_rel: rel_diff.iter().sum::<f64>() / n,
                abs_diff,
                rel_diff,
            });
        }
    }
    let passed = metrics.iter().all(|m| m.max_rel <= tolerance);
    DiscrepancyReport {
        tolerance,
        abs_floor,
        metrics,
        passed,
    }
}

/// Runs both scenario lists (paired by position) and compares shared metrics.
pub fn compare_engines(
    a: &[ScenarioSpec],
    b: &[ScenarioSpec],
    tolerance: f64,
    abs_floor: f64,
) -> Result<DiscrepancyReport> {
    if a.len() != b.len() {
        return Err(Error::IncompatibleConfigs(format!(
            "{} scenarios against {}",
            a.len(),
            b.len()
        )));
    }
    for (x, y) in a.iter().zip(b) {
        check_comparable(x, y)?;
    }
    let mut pairs = Vec::new();
    for (x, y) in a.iter().zip(b) {
        pairs.push((run_scenario(x)?, run_scenario(y)?));
    }
    Ok(compare_tables(&pairs, tolerance, abs_floor))
}
