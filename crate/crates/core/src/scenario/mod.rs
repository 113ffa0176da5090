// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Declarative parameter sweeps over the exact, analytic and semiclassical
//! engines, with CSV and plot-script output.

mod config;
mod engine;
mod output;
mod run;

pub use config::*;
pub use engine::*;
pub use output::*;
pub use run::*;

use crate::error::{Error, Result};

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: [(&str, &str); 6] = [
    ("fig2_varyt", include_str!("../../scenarios/fig2_varyt.json")),
    ("fig3_varyfb", include_str!("../../scenarios/fig3_varyfb.json")),
    ("fig4_favst", include_str!("../../scenarios/fig4_favst.json")),
    ("fig5_cases", include_str!("../../scenarios/fig5_cases.json")),
    ("fig6_sc", include_str!("../../scenarios/fig6_sc.json")),
    ("fig7_nbvsna", include_str!("../../scenarios/fig7_nbvsna.json")),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(name, _)| *name).collect()
}

pub fn bundled(name: &str) -> Result<ScenarioConfig> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("no bundled scenario named `{name}`")))
        .and_then(|(_, text)| ScenarioConfig::from_json(text))
}

/// Runs every scenario in order.
pub fn run_all(specs: &[ScenarioSpec]) -> Result<Vec<ResultTable>> {
    specs.iter().map(run_scenario).collect()
}
