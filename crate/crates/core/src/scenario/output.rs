// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::Metric;
use super::run::ResultTable;
use crate::error::{Error, Result};

/// Shortest decimal that reads back to the same `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_name(table: &ResultTable, metric: Metric) -> String {
    format!("{}_{}.csv", table.stem(), metric.name())
}

pub fn write_csv(table: &ResultTable, metric: Metric, path: &Path) -> Result<()> {
    let columns = table.csv_columns(metric);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_error)?;
    w.write_record(columns.iter().map(|c| c.name.as_str()))
        .map_err(csv_error)?;
    for i in 0..table.len() {
        w.write_record(columns.iter().map(|c| format_value(c.values[i])))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// One gnuplot script per scenario id, one plot per (metric, sweep parameter).
fn plot_script(id: &str, tables: &[&ResultTable]) -> String {
    let mut groups: BTreeMap<(Metric, String), Vec<&ResultTable>> = BTreeMap::new();
    for t in tables {
        for m in &t.metadata.outputs {
            groups.entry((*m, t.metadata.sweep.clone())).or_default().push(t);
        }
    }
    let mut s = String::new();
    writeln!(
        s,
        "# {id}: generated by spinprobe; run with `gnuplot {id}.gp` in this directory"
    )
    .unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    for ((metric, sweep), members) in groups {
        writeln!(s).unwrap();
        writeln!(s, "set output '{id}_{}_vs_{sweep}.png'", metric.name()).unwrap();
        writeln!(s, "set xlabel '{sweep}'").unwrap();
        writeln!(s, "set ylabel '{}'", metric.name()).unwrap();
        if metric == Metric::NbTfs || sweep == "beta_sq" {
            writeln!(s, "set logscale x").unwrap();
        } else {
            writeln!(s, "unset logscale x").unwrap();
        }
        if metric == Metric::NbTfs {
            writeln!(s, "set logscale y").unwrap();
        } else {
            writeln!(s, "unset logscale y").unwrap();
        }
        let lines: Vec<String> = members
            .iter()
            .map(|t| {
                let title = t.metadata.label.clone().unwrap_or_else(|| t.metadata.engine.clone());
                format!(
                    "'{}' using 1:2 with linespoints title '{}'",
                    csv_name(t, metric),
                    title.replace('_', " ")
                )
            })
            .collect();
        writeln!(s, "plot {}", lines.join(", \\\n     ")).unwrap();
    }
    s
}

/// Writes CSVs, a plot script and a metadata file per scenario id. Returns the
/// written paths in sorted order.
pub fn emit_outputs(tables: &[ResultTable], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut by_id: BTreeMap<&str, Vec<&ResultTable>> = BTreeMap::new();
    for t in tables {
        by_id.entry(t.metadata.scenario_id.as_str()).or_default().push(t);
        for metric in &t.metadata.outputs {
            let path = dir.join(csv_name(t, *metric));
            write_csv(t, *metric, &path)?;
            written.push(path);
        }
    }
    for (id, members) in by_id {
        let script = dir.join(format!("{id}.gp"));
        fs::write(&script, plot_script(id, &members))?;
        written.push(script);
        let meta: Vec<_> = members.iter().map(|t| &t.metadata).collect();
        let meta_path = dir.join(format!("{id}_meta.json"));
        fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        written.push(meta_path);
    }
    written.sort();
    Ok(written)
}
