// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinprobe::scenario::{self, ScenarioConfig, ScenarioSpec};
use spinprobe::Error;

#[derive(Parser)]
#[command(
    name = "spinprobe",
    version,
    about = "Run probe-decoherence scenarios and write CSV tables"
)]
struct Cli {
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true, env = "SPINPROBE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or bundled scenario and write its outputs.
    Run {
        config: String,
        #[arg(long, env = "SPINPROBE_OUT", default_value = "spinprobe-out")]
        out: PathBuf,
        #[command(flatten)]
        pick: Pick,
    },
    /// Run two configurations that differ only in engine and compare metrics.
    Compare {
        a: String,
        b: String,
        /// Largest relative difference accepted.
        #[arg(long, default_value_t = 0.03)]
        tol: f64,
        /// Denominator floor for relative differences of near-zero values.
        #[arg(long, default_value_t = 0.0)]
        floor: f64,
        /// Overrides applied to the first configuration only.
        #[arg(long = "set-a", value_name = "PATH=VALUE")]
        set_a: Vec<String>,
        /// Overrides applied to the second configuration only.
        #[arg(long = "set-b", value_name = "PATH=VALUE")]
        set_b: Vec<String>,
        #[command(flatten)]
        pick: Pick,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List bundled scenarios.
    ListScenarios,
    /// Expand and validate a configuration without running it.
    Validate {
        config: String,
        #[command(flatten)]
        pick: Pick,
    },
}

#[derive(Args)]
struct Pick {
    /// Override a config field, e.g. `--set panels.0.aux.r=0.5`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
    /// Keep only scenarios whose label is LABEL or starts with `LABEL_`.
    #[arg(long)]
    select: Option<String>,
}

fn load(source: &str, overrides: &[String], select: Option<&str>) -> spinprobe::Result<Vec<ScenarioSpec>> {
    let mut config = if Path::new(source).is_file() {
        ScenarioConfig::from_json(&std::fs::read_to_string(source)?)?
    } else {
        scenario::bundled(source).map_err(|_| {
            Error::Config(format!(
                "`{source}` is neither a file nor a bundled scenario ({})",
                scenario::bundled_names().join(", ")
            ))
        })?
    };
    for o in overrides {
        let (path, value) = scenario::parse_override(o)?;
        config.apply_override(&path, value)?;
    }
    let mut specs = config.expand()?;
    if let Some(sel) = select {
        specs.retain(|s| {
            s.label
                .as_deref()
                .is_some_and(|l| l == sel || l.starts_with(&format!("{sel}_")))
        });
        if specs.is_empty() {
            return Err(Error::Config(format!("--select {sel} matches no scenario")));
        }
    }
    for s in &specs {
        scenario::validate(s)?;
    }
    Ok(specs)
}

fn execute(cli: Cli) -> spinprobe::Result<ExitCode> {
    match cli.command {
        Command::ListScenarios => {
            for name in scenario::bundled_names() {
                let specs = scenario::bundled(name)?.expand()?;
                let about = specs.first().and_then(|s| s.description.clone()).unwrap_or_default();
                println!("{name}\t{} runs\t{about}", specs.len());
            }
        }
        Command::Validate { config, pick } => {
            let specs = load(&config, &pick.set, pick.select.as_deref())?;
            for s in &specs {
                println!(
                    "{}\t{}\t{} points\t{}",
                    s.stem(),
                    s.engine.name(),
                    s.sweep.grid()?.len(),
                    s.config_hash()
                );
            }
            println!("ok: {} scenarios", specs.len());
        }
        Command::Run { config, out, pick } => {
            let specs = load(&config, &pick.set, pick.select.as_deref())?;
            let tables = scenario::run_all(&specs)?;
            for path in scenario::emit_outputs(&tables, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Compare {
            a,
            b,
            tol,
            floor,
            set_a,
            set_b,
            pick,
            json,
        } => {
            let with = |extra: &[String]| [pick.set.clone(), extra.to_vec()].concat();
            let specs_a = load(&a, &with(&set_a), pick.select.as_deref())?;
            let specs_b = load(&b, &with(&set_b), pick.select.as_deref())?;
            let report = scenario::compare_engines(&specs_a, &specs_b, tol, floor)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for m in &report.metrics {
                    println!(
                        "{}\t{}\tmax_abs={:e}\tmean_abs={:e}\tmax_rel={:e}\tmean_rel={:e}",
                        m.stem,
                        m.metric.name(),
                        m.max_abs,
                        m.mean_abs,
                        m.max_rel,
                        m.mean_rel
                    );
                }
                println!(
                    "{} (tolerance {tol})",
                    if report.passed {
                        "within tolerance"
                    } else {
                        "tolerance exceeded"
                    }
                );
            }
            if !report.passed {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_config() {
                2
            } else if e.is_resource_ceiling() {
                4
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}
