// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use serde_json::json;

use spinprobe::scenario::{
    bundled, bundled_names, compare_engines, compare_tables, emit_outputs, run_scenario, validate, EngineKind, Metric,
    ScenarioConfig, ScenarioSpec,
};
use spinprobe::Error;

fn select(config: &ScenarioConfig, label: &str) -> ScenarioSpec {
    config
        .expand()
        .unwrap()
        .into_iter()
        .find(|s| s.label.as_deref() == Some(label))
        .unwrap_or_else(|| panic!("no scenario labelled {label}"))
}

fn with_overrides(name: &str, overrides: &[(&str, serde_json::Value)]) -> ScenarioConfig {
    let mut config = bundled(name).unwrap();
    for (path, value) in overrides {
        config.apply_override(path, value.clone()).unwrap();
    }
    config
}

#[test]
fn bundled_configs_expand_and_validate() {
    assert_eq!(bundled_names().len(), 6);
    for name in bundled_names() {
        let specs = bundled(name).unwrap().expand().unwrap();
        assert!(!specs.is_empty(), "{name}");
        for spec in &specs {
            validate(spec).unwrap_or_else(|e| panic!("{}: {e}", spec.stem()));
        }
    }
}

#[test]
fn rerun_writes_identical_files() {
    let config = with_overrides("fig2_varyt", &[("sweep.points", json!(9))]);
    let spec = select(&config, "noon_amplitude_sq");
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let a = emit_outputs(&[run_scenario(&spec).unwrap()], first.path()).unwrap();
    let b = emit_outputs(&[run_scenario(&spec).unwrap()], second.path()).unwrap();
    assert_eq!(a.len(), b.len());
    let names: Vec<_> = a.iter().map(|p| p.file_name().unwrap().to_owned()).collect();
    assert!(names.iter().any(|n| n == "fig2_varyt_noon_amplitude_sq_C_max.csv"));
    assert!(names.iter().any(|n| n == "fig2_varyt.gp"));
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{}", x.display());
    }
    let csv = std::fs::read_to_string(first.path().join("fig2_varyt_noon_amplitude_sq_F_A.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(!csv.contains('\r'));
}

#[test]
fn rows_follow_the_grid() {
    let config = with_overrides("fig3_varyfb", &[("sweep.points", json!(5))]);
    for spec in config
        .expand()
        .unwrap()
        .iter()
        .filter(|s| s.label.as_deref().is_some_and(|l| l.starts_with("b_")))
    {
        let table = run_scenario(spec).unwrap();
        assert_eq!(table.len(), spec.sweep.grid().unwrap().len(), "{}", spec.stem());
        assert!(table.metric(Metric::FA).unwrap().iter().all(|f| f.is_finite()));
    }
}

#[test]
fn config_hash_tracks_content() {
    let base = select(&bundled("fig4_favst").unwrap(), "beta_sq_25");
    let changed = select(
        &with_overrides("fig4_favst", &[("probe.n_atoms", json!(6))]),
        "beta_sq_25",
    );
    assert_eq!(
        base.config_hash(),
        select(&bundled("fig4_favst").unwrap(), "beta_sq_25").config_hash()
    );
    assert_ne!(base.config_hash(), changed.config_hash());
    assert_eq!(base.config_hash().len(), 64);
}

#[test]
fn empty_grid_is_a_config_error() {
    let config = with_overrides("fig4_favst", &[("sweep.points", json!(0))]);
    let err = config
        .expand()
        .and_then(|specs| validate(&specs[0]).map(|_| ()))
        .unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err}");

    let mut raw = bundled("fig4_favst").unwrap().raw().clone();
    raw["unexpected"] = json!(1);
    assert!(matches!(
        ScenarioConfig::from_value(raw).and_then(|c| c.expand()),
        Err(Error::Config(_))
    ));
}

#[test]
fn self_comparison_has_zero_discrepancy() {
    let config = with_overrides("fig5_cases", &[("sweep.points", json!(3))]);
    let spec = select(&config, "a_classical_x");
    let table = run_scenario(&spec).unwrap();
    let report = compare_tables(&[(table.clone(), table)], 0.0, 0.0);
    assert!(report.passed);
    assert!(report.metrics.iter().all(|m| m.max_abs == 0.0));
}

#[test]
fn exact_and_semiclassical_agree_on_small_probes() {
    let config = bundled("fig7_nbvsna").unwrap();
    let semi = select(&config, "inset");
    let mut exact = semi.clone();
    exact.engine = EngineKind::Exact;
    let report = compare_engines(&[semi], &[exact], 0.03, 0.0).unwrap();
    assert!(
        report.passed,
        "{:?}",
        report.metrics.iter().map(|m| m.max_rel).collect::<Vec<_>>()
    );
}

#[test]
fn exact_and_analytic_agree_on_noon_revival() {
    let config = with_overrides(
        "fig2_varyt",
        &[
            ("sweep.stop", json!(std::f64::consts::TAU / 20.0)),
            ("sweep.points", json!(21)),
        ],
    );
    let exact = select(&config, "noon_coherent");
    let mut analytic = exact.clone();
    analytic.engine = EngineKind::Analytic;
    let report = compare_engines(&[exact], &[analytic], 0.02, 4e-7).unwrap();
    assert!(
        report.passed,
        "{:?}",
        report.metrics.iter().map(|m| (m.metric, m.max_rel)).collect::<Vec<_>>()
    );
}

#[test]
fn mismatched_configs_are_rejected() {
    let a = select(&bundled("fig4_favst").unwrap(), "beta_sq_25");
    let b = select(&bundled("fig4_favst").unwrap(), "beta_sq_50");
    assert!(matches!(
        compare_engines(&[a], &[b], 0.03, 0.0),
        Err(Error::IncompatibleConfigs(_))
    ));
}
