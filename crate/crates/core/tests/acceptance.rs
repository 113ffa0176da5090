// Copyright 2026 spinprobe contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` do not fail `cargo test`; set
//! `SPINPROBE_ACCEPTANCE_STRICT=1` to make every FAIL fatal.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use spinprobe::boson::{self, mode_operator, AuxStateSpec, ModeOperator};
use spinprobe::composite::{reduced_density_separable, separable_coherence_profile, separable_evolve};
use spinprobe::metrology::{self, BudgetMethod, BudgetRegime};
use spinprobe::scenario::{self, merge, relative_difference, ResultTable, ScenarioConfig};
use spinprobe::spin::{self, spin_operator, Axis, NamedState, SpinBasis};
use spinprobe::{Basis, DensityMatrix, HermitianOperator, Result};

const KNOWN_FAILURES: [u32; 2] = [5, 6];

const C1_REL_TOL: f64 = 1e-8;
const C2_QFI_REL_TOL: f64 = 1e-8;
const C2_GAMMA_ABS_TOL: f64 = 1e-10;
const C3_REL_TOL: f64 = 0.02;
const C3_ABS_FLOOR_PER_NA2: f64 = 1e-9;
const C3_REVIVAL_FRACTION: f64 = 0.95;
const C3_FOCK_TOL: f64 = 1e-9;
const C4_REL_TOL: f64 = 0.01;
const C4_TAU_MAX: f64 = 0.045;
const C5_REL_TOL: f64 = 0.05;
const C6_REL_TOL: f64 = 0.02;
const C7_REL_TOL: f64 = 0.03;
const C8_REL_TOL: f64 = 0.01;
const C8_SLOPE_TOL: f64 = 0.15;
const C9_ORACLE_REL_TOL: f64 = 0.005;
const C9_COHERENCE_ABS_TOL: f64 = 1e-6;
const C9_ORACLE_STEP: f64 = 1e-3;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        passed,
        detail: detail.into(),
    })
}

fn run_json(raw: serde_json::Value) -> Result<Vec<ResultTable>> {
    scenario::run_all(&ScenarioConfig::from_value(raw)?.expand()?)
}

fn column<'a>(t: &'a ResultTable, name: &str) -> &'a [f64] {
    t.column(name)
        .unwrap_or_else(|| panic!("column {name} missing from {}", t.stem()))
}

fn criterion_1() -> Result<Verdict> {
    let basis = SpinBasis::new(20);
    let jz = spin_operator(Axis::Z, &basis);
    let noon = metrology::qfi_pure(&spin::named_state(NamedState::Noon, &basis)?, &jz)?.value;
    let css = metrology::qfi_pure(&spin::coherent_spin_state(FRAC_PI_2, 0.0, &basis)?, &jz)?.value;
    let (e1, e2) = ((noon / 400.0 - 1.0).abs(), (css / 20.0 - 1.0).abs());
    verdict(
        e1 <= C1_REL_TOL && e2 <= C1_REL_TOL,
        format!("NOON F_A = {noon:.12} (rel {e1:.1e}); CSS F_A = {css:.12} (rel {e2:.1e}); tol {C1_REL_TOL:.0e}"),
    )
}

fn criterion_2() -> Result<Verdict> {
    let n = 12usize;
    let basis = SpinBasis::new(n);
    let noon = spin::named_state(NamedState::Noon, &basis)?;
    let jz = spin_operator(Axis::Z, &basis);
    let aux = AuxStateSpec::coherent(8.0);
    let psi_b = boson::aux_state(&aux, 1e-12)?;
    let (mut worst_f, mut worst_g) = (0.0f64, 0.0f64);
    for k in 0..20 {
        let tau = 0.03 * k as f64 / 19.0;
        let rho = reduced_density_separable(&separable_evolve(&noon, &psi_b, tau)?);
        let f = metrology::qfi_mixed(&rho, &jz)?.value;
        let gamma = metrology::purity(&rho);
        let c = separable_coherence_profile(&psi_b, tau, n)[n].norm();
        let f_identity = metrology::qfi_from_gamma(gamma, n)?;
        worst_f = worst_f.max(relative_difference(f, f_identity, 0.0));
        worst_g = worst_g.max((gamma - metrology::gamma_from_c_max(c)?).abs());
    }
    verdict(
        worst_f <= C2_QFI_REL_TOL && worst_g <= C2_GAMMA_ABS_TOL,
        format!(
            "N_A=12, N_B=64, 20 tau in [0, 0.03]: max rel |F_A - N_A²(2γ-1)| = {worst_f:.1e} (tol {C2_QFI_REL_TOL:.0e}), \
             max |γ - (1+|C_max|²)/2| = {worst_g:.1e} (tol {C2_GAMMA_ABS_TOL:.0e})"
        ),
    )
}

fn criterion_3() -> Result<Verdict> {
    let n2 = 400.0;
    let revival = 2.0 * PI / 20.0;
    let tables = run_json(json!({
        "scenario_id": "acceptance_revival",
        "engine": "exact",
        "probe": {"kind": "noon", "n_atoms": 20},
        "aux": {"n_b": 100.0},
        "hamiltonian": "separable_jz",
        "sweep": {"parameter": "tau", "start": 0.0, "stop": revival, "points": 81},
        "outputs": ["F_A", "gamma"],
        "series": [{"label": "coherent"}, {"label": "fock", "aux": {"kind": "fock"}}]
    }))?;
    let (coh, fock) = (&tables[0], &tables[1]);
    let floor = C3_ABS_FLOOR_PER_NA2 * n2;
    let tau = coh.sweep_values();
    let f = column(coh, "F_A");
    let worst = tau
        .iter()
        .zip(f)
        .map(|(t, f)| relative_difference(*f, metrology::qfi_revival_prediction(400.0, 20, *t), floor))
        .fold(0.0, f64::max);
    let at_revival = *f.last().expect("nonempty");
    let fock_f = column(fock, "F_A")
        .iter()
        .map(|f| (f - n2).abs() / n2)
        .fold(0.0, f64::max);
    let fock_g = column(fock, "gamma")
        .iter()
        .map(|g| (g - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(
        worst <= C3_REL_TOL && at_revival >= C3_REVIVAL_FRACTION * n2 && fock_f <= C3_FOCK_TOL && fock_g <= C3_FOCK_TOL,
        format!(
            "coherent: max rel dev from revival formula {worst:.2e} (tol {C3_REL_TOL}, floor {floor:.0e}); \
             F_A(2π/20) = {at_revival:.3} (need >= {}); Fock: max |F_A/N_A² - 1| = {fock_f:.1e}, max |γ - 1| = {fock_g:.1e}",
            C3_REVIVAL_FRACTION * n2
        ),
    )
}

fn criterion_4() -> Result<Verdict> {
    let tables = run_json(json!({
        "scenario_id": "acceptance_fb",
        "engine": "exact",
        "probe": {"kind": "css", "n_atoms": 20, "theta": FRAC_PI_2},
        "aux": {"beta_sq": 25.0},
        "hamiltonian": "separable_jz",
        "sweep": {"parameter": "tau", "start": 0.0, "stop": C4_TAU_MAX, "points": 31},
        "outputs": ["F_A"],
        "series": [
            {"label": "coherent", "aux": {"beta_sq": 25.0}},
            {"label": "amplitude_sq", "aux": {"beta_sq": 50.0, "r": 0.35245664204803173}},
            {"label": "phase_sq", "aux": {"beta_sq": 20.0, "r": -0.11106989263319084}}
        ]
    }))?;
    let fb: Vec<f64> = tables.iter().map(|t| column(t, "F_B")[0]).collect();
    let reference = column(&tables[0], "F_A");
    let worst = tables[1..]
        .iter()
        .flat_map(|t| {
            column(t, "F_A")
                .iter()
                .zip(reference)
                .map(|(a, b)| relative_difference(*a, *b, 0.0))
        })
        .fold(0.0, f64::max);
    verdict(
        worst <= C4_REL_TOL,
        format!(
            "CSS N_A=20, F_B = {:.6}/{:.6}/{:.6}, tau in [0, {C4_TAU_MAX}]: max pointwise rel spread {worst:.2e} (tol {C4_REL_TOL})",
            fb[0], fb[1], fb[2]
        ),
    )
}

fn criterion_5() -> Result<Verdict> {
    let tables = run_json(json!({
        "scenario_id": "acceptance_bs_limit",
        "engine": "exact",
        "probe": {"kind": "spin_cat", "n_atoms": 20, "theta": FRAC_PI_2},
        "aux": {"beta_sq": 25.0},
        "hamiltonian": "beam_splitter",
        "sweep": {"parameter": "beta_sq", "values": [25.0, 50.0, 100.0, 200.0]},
        "time": {"kind": "theta", "value": FRAC_PI_2},
        "outputs": ["F_A"]
    }))?;
    let t = &tables[0];
    let ratio = column(t, "F_A_over_NA2");
    let n_cut = column(t, "n_cut");
    let monotone = ratio.windows(2).all(|w| w[1] > w[0]) && ratio.iter().all(|x| *x <= 1.0);
    let mut parts = Vec::new();
    let mut worst = 0.0f64;
    for ((b2, x), nc) in t.sweep_values().iter().zip(ratio).zip(n_cut) {
        let predicted = metrology::beamsplitter_generator_prediction(b2.sqrt(), 0.0, 20)? / 400.0;
        let dev = (x - predicted).abs() / predicted;
        worst = worst.max(dev);
        parts.push(format!(
            "|β|²={b2}: {x:.4} vs {predicted:.4} ({:.1}%, n_cut {nc})",
            100.0 * dev
        ));
    }
    verdict(
        monotone && worst <= C5_REL_TOL && n_cut.iter().all(|n| *n <= 400.0),
        format!(
            "monotone={monotone}; F_A/N_A² vs closed form: {} (tol {C5_REL_TOL})",
            parts.join(", ")
        ),
    )
}

fn criterion_6() -> Result<Verdict> {
    let mut parts = Vec::new();
    let mut worst_y = 0.0f64;
    let mut worst_x = 0.0f64;
    for r in [-0.5, 0.0, 0.5] {
        let tables = run_json(json!({
            "scenario_id": "acceptance_cases",
            "engine": "exact",
            "probe": {"kind": "spin_cat", "n_atoms": 20, "theta": FRAC_PI_2},
            "aux": {"beta_sq": 100.0, "r": r},
            "hamiltonian": "beam_splitter",
            "sweep": {"parameter": "theta", "start": 0.0, "stop": PI, "points": 25},
            "time": {"kind": "theta"},
            "outputs": ["F_A"],
            "series": [
                {"label": "full"},
                {"label": "y", "hamiltonian": "classical_Y_case"},
                {"label": "x", "hamiltonian": "classical_X_case"}
            ]
        }))?;
        let full = column(&tables[0], "F_A");
        let y = column(&tables[1], "F_A");
        let x = column(&tables[2], "F_A");
        let rotation = column(&tables[2], "F_max");
        let theta = tables[0].sweep_values();
        let dy: Vec<f64> = y
            .iter()
            .zip(full)
            .map(|(a, b)| relative_difference(*a, *b, 0.0))
            .collect();
        let dx: Vec<f64> = x
            .iter()
            .zip(rotation)
            .map(|(a, b)| relative_difference(*a, *b, 0.0))
            .collect();
        let (iy, my) = argmax(&dy);
        let (ix, mx) = argmax(&dx);
        worst_y = worst_y.max(my);
        worst_x = worst_x.max(mx);
        parts.push(format!(
            "r={r}: Y vs full max {:.1}% at θ={:.2}, X vs rotation max {:.1}% at θ={:.2}",
            100.0 * my,
            theta[iy],
            100.0 * mx,
            theta[ix]
        ));
    }
    verdict(
        worst_y <= C6_REL_TOL && worst_x <= C6_REL_TOL,
        format!("|β|²=100, N_A=20, θ in [0, π]: {} (tol {C6_REL_TOL})", parts.join("; ")),
    )
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, x)| if x > acc.1 { (i, x) } else { acc },
    )
}

fn criterion_7() -> Result<Verdict> {
    let base = json!({
        "scenario_id": "acceptance_semiclassical",
        "engine": "exact",
        "probe": {"kind": "spin_cat", "n_atoms": 4, "theta": FRAC_PI_2},
        "aux": {"beta_sq": 100.0},
        "hamiltonian": "beam_splitter",
        "sweep": {"parameter": "n_atoms", "values": [4, 6, 8]},
        "time": {"kind": "theta", "value": FRAC_PI_2},
        "outputs": ["F_A"]
    });
    let mut semi = base.clone();
    merge(&mut semi, &json!({"engine": "semiclassical"}));
    let a = ScenarioConfig::from_value(base)?.expand()?;
    let b = ScenarioConfig::from_value(semi)?.expand()?;
    let report = scenario::compare_engines(&a, &b, C7_REL_TOL, 0.0)?;
    let m = &report.metrics[0];
    let per: Vec<String> = m.rel_diff.iter().map(|d| format!("{:.2}%", 100.0 * d)).collect();
    verdict(
        report.passed,
        format!(
            "N_A = 4/6/8, |β|²=100, θ=π/2: exact vs semiclassical rel diff {} (tol {C7_REL_TOL})",
            per.join("/")
        ),
    )
}

fn criterion_8() -> Result<Verdict> {
    let noon = metrology::nb_tfs(BudgetRegime::NoonJz, 100, PI, 0.0)?;
    let noon_ref = PI * PI * 1e4 / LN_2;
    let bs = metrology::nb_tfs(BudgetRegime::JycatBs, 100, FRAC_PI_2, 0.0)?;
    let bs_ref = 1e4 / (4.0 * LN_2);
    let (e_noon, e_bs) = ((noon / noon_ref - 1.0).abs(), (bs / bs_ref - 1.0).abs());
    let (e_noon_stated, e_bs_stated) = ((noon / 1.42e5 - 1.0).abs(), (bs / 3.61e3 - 1.0).abs());
    let atoms = [8usize, 12, 16, 20];
    let mut budgets = Vec::new();
    for n in atoms {
        let r = metrology::nb_tfs_empirical(
            BudgetRegime::JycatBs,
            n,
            FRAC_PI_2,
            &AuxStateSpec::coherent(1.0),
            BudgetMethod::Semiclassical,
        )?;
        budgets.push(r.n_b);
    }
    let xs: Vec<f64> = atoms.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = budgets.iter().map(|b| b.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let passed = e_noon <= C8_REL_TOL
        && e_bs <= C8_REL_TOL
        && e_noon_stated <= C8_REL_TOL
        && e_bs_stated <= C8_REL_TOL
        && (slope - 2.0).abs() <= C8_SLOPE_TOL;
    verdict(
        passed,
        format!(
            "noon_jz(100, π) = {noon:.1} (rel {e_noon:.1e} to π²·10⁴/ln2); jycat_bs(100, π/2) = {bs:.1} (rel {e_bs:.1e}); \
             semiclassical N_B^TFS at N_A=8..20: {:?}, log-log slope {slope:.4} (tol ±{C8_SLOPE_TOL})",
            budgets.iter().map(|b| (b * 10.0).round() / 10.0).collect::<Vec<_>>()
        ),
    )
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn criterion_9() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_oracle = 0.0f64;
    for _ in 0..50 {
        let d = rng.random_range(2..=8);
        let a = random_complex(&mut rng, d);
        let m = &a * a.adjoint();
        let trace = m.trace();
        let rho = DensityMatrix::new(m / trace)?;
        let h = random_complex(&mut rng, d);
        let g = HermitianOperator::new((&h + h.adjoint()) * Complex64::new(0.5, 0.0))?;
        let direct = metrology::qfi_mixed(&rho, &g)?.value;
        let oracle = metrology::qfi_fidelity_oracle(&rho, &g, C9_ORACLE_STEP)?;
        worst_oracle = worst_oracle.max(relative_difference(direct, oracle, 0.0));
    }

    let mut worst_coherence = 0.0f64;
    let cases = [(5.0, 0.0), (7.0, 0.352), (4.5, -0.111), (3.0, 0.6), (6.0, -0.4)];
    for (beta, r) in cases {
        let spec = AuxStateSpec::squeezed(beta, r);
        let psi = boson::aux_state(&spec, 1e-12)?;
        let Basis::Fock(fock) = psi.basis().clone() else {
            unreachable!("aux states live in Fock space")
        };
        let n_op = mode_operator(ModeOperator::Number, &fock)?;
        let levels: Vec<f64> = (0..=6).map(|k| k as f64).collect();
        for tau in [0.01, 0.05, 0.2, 0.7] {
            let numeric = metrology::coherence_numeric(&psi, &n_op, tau, &levels)?;
            for delta in 1..=6usize {
                let analytic = if r == 0.0 {
                    metrology::coherence_coherent_analytic(beta, tau, delta as i64)
                } else {
                    metrology::coherence_squeezed_analytic(beta, r, tau, delta as i64)?
                };
                worst_coherence = worst_coherence.max((numeric.entries()[(delta, 0)] - analytic).norm());
            }
        }
    }
    verdict(
        worst_oracle <= C9_ORACLE_REL_TOL && worst_coherence <= C9_COHERENCE_ABS_TOL,
        format!(
            "50 random states (dim 2..8): max rel |spectral QFI - fidelity oracle| = {worst_oracle:.2e} (tol {C9_ORACLE_REL_TOL}); \
             max |C_numeric - C_analytic| = {worst_coherence:.1e} (tol {C9_COHERENCE_ABS_TOL:.0e})"
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "pure-state QFI", criterion_1),
        (2, "separable identities", criterion_2),
        (3, "revival reproduction", criterion_3),
        (4, "F_B equivalence", criterion_4),
        (5, "beam-splitter classical limit", criterion_5),
        (6, "case decomposition", criterion_6),
        (7, "semiclassical cross-validation", criterion_7),
        (8, "photon budget", criterion_8),
        (9, "oracle suite", criterion_9),
    ];
    let strict = std::env::var("SPINPROBE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut fatal = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let v = check().unwrap_or_else(|e| Verdict {
            passed: false,
            detail: format!("error: {e}"),
        });
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (v.passed, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as a known failure)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "{tag} criterion {id} [{title}] {:.1}s: {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if (!v.passed && (strict || !known)) || (v.passed && known) {
            fatal += 1;
        }
    }
    if fatal > 0 {
        println!("acceptance: {fatal} unexpected outcome(s)");
        ExitCode::FAILURE
    } else {
        println!("acceptance: done");
        ExitCode::SUCCESS
    }
}
