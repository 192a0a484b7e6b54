//! Acceptance criteria. Each criterion prints one PASS/FAIL line.
//!
//! Runs without the libtest harness so the lines always appear in
//! `cargo test` output. Criteria listed in `EXPECTED_RED` are known to fail with the
//! tolerances below; the target fails if the set of failing criteria differs
//! from that list in either direction.

use std::collections::BTreeSet;
use std::time::Instant;

use flagred::adversarial::{worst_case_audit, worst_case_filtration, WorstCaseParams};
use flagred::bench::{fit_table, run_experiment, to_csv, ExperimentConfig, ExperimentRow, Metric};
use flagred::exec::Execution;
use flagred::flagfilt::{boundary_matrix, Filtration, TiePolicy};
use flagred::homology::{
    betti1_bruteforce, betti1_profile, betti_probability_scan, default_grid, BettiScanResult,
};
use flagred::io::parse_filtration;
use flagred::randmodels::{sample_order, Model, Seed};
use flagred::z2core::{reduce, validate_staircase};
use rand::seq::SliceRandom;

const SEED: u64 = 2024;

const VR_NS: [usize; 7] = [16, 24, 32, 48, 64, 96, 128];
const VR_FILL: (f64, f64) = (1.8, 2.3);
const VR_COST: (f64, f64) = (3.3, 4.1);
const ER_NS: [usize; 6] = [12, 16, 20, 28, 40, 56];
const ER_FILL: (f64, f64) = (1.7, 2.5);
const ER_COST: (f64, f64) = (4.3, 5.6);
const TRIALS: usize = 20;
const WORST_PS: [usize; 6] = [3, 5, 7, 9, 11, 13];
const WORST_FILL: (f64, f64) = (3.6, 4.4);
const WORST_COST: (f64, f64) = (6.5, 7.5);
const SCAN_TRIALS: usize = 200;

/// Fill-up and cost exponents of the worst case over p = 3..13 are
/// dominated by the Θ(p²) step-column fill and stay near 3 and 6; they
/// approach 4 and 7 only for p beyond this range.
const EXPECTED_RED: [&str; 2] = ["6a", "6b"];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: &'static str, name: &'static str, pass: bool, detail: String) -> Outcome {
    println!("[{}] criterion {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    Outcome { id, name, pass, detail }
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

fn four_vertex() -> Vec<Outcome> {
    let f = parse_filtration("filtration v1\nn 4\nedges 6\n1 2\n0 3\n0 1\n2 3\n0 2\n1 3\n").unwrap();
    let (r, s) = reduce(&boundary_matrix(&f)).unwrap();
    let cols: Vec<Vec<u32>> = r.columns().iter().map(|c| c.rows().to_vec()).collect();
    let want: Vec<Vec<u32>> = vec![vec![0, 2, 4], vec![0, 1, 2, 3], vec![1, 2, 5], vec![]];
    let pass = cols == want
        && s.fill_up == 10
        && s.cost == 10
        && s.step_indices == vec![4, 5]
        && s.critical_indices == vec![3];
    vec![report(
        "1",
        "four-vertex exactness",
        pass,
        format!(
            "columns {cols:?} fill_up {} cost {} step {:?} critical {:?}",
            s.fill_up, s.cost, s.step_indices, s.critical_indices
        ),
    )]
}

fn oracle() -> Vec<Outcome> {
    let t = Instant::now();
    let mut mismatches = 0;
    let mut checked = 0;
    for n in 4..=8 {
        for trial in 0..200 {
            let e = sample_order(Model::Er, n, Seed::new(SEED), "acceptance/oracle", trial).unwrap();
            let f = Filtration::with_default_ties(e);
            let (r, _) = reduce(&boundary_matrix(&f)).unwrap();
            let prof = betti1_profile(&f, &r).unwrap();
            for i in 0..prof.values.len() {
                checked += 1;
                if prof.values[i] as usize != betti1_bruteforce(f.edge_order(), i) {
                    mismatches += 1;
                }
            }
        }
    }
    vec![report(
        "2",
        "oracle equivalence",
        mismatches == 0,
        format!("{mismatches} mismatches in {checked} prefix values, n=4..8 x 200 ER orders, {:.1?}", t.elapsed()),
    )]
}

fn shuffle_ties(f: Filtration, seed: Seed, trial: u64) -> Filtration {
    let co = f.column_order();
    let times = co.entry_times();
    let mut seq = co.triangles().to_vec();
    let mut rng = seed.rng("acceptance/ties", trial);
    let mut start = 0;
    while start < seq.len() {
        let end = start + times[start..].iter().take_while(|&&t| t == times[start]).count();
        seq[start..end].shuffle(&mut rng);
        start = end;
    }
    Filtration::new(f.edge_order().clone(), &TiePolicy::Explicit(seq)).unwrap()
}

/// Returns the failed property names for one instance.
fn invariant_failures(f: &Filtration) -> Vec<&'static str> {
    let n = f.n();
    let m = (n * (n - 1) / 2) as u64;
    let d = boundary_matrix(f);
    let mut bad = Vec::new();
    if !validate_staircase(&d) {
        bad.push("staircase");
    }
    let (r, s) = reduce(&d).unwrap();
    let pivots: Vec<u32> = r.columns().iter().filter_map(|c| c.pivot()).collect();
    if pivots.iter().collect::<BTreeSet<_>>().len() != pivots.len() {
        bad.push("distinct pivots");
    }
    let step_changed = r.columns().iter().zip(d.columns()).any(|(rc, dc)| {
        rc.pivot().is_some_and(|p| s.step_indices.binary_search(&p).is_ok()) && rc != dc
    });
    if step_changed {
        bad.push("step columns unchanged");
    }
    if s.cost > s.cols as u64 * s.fill_up {
        bad.push("cost bound");
    }
    let prof = betti1_profile(f, &r).unwrap();
    // row p is the (p+1)-th edge: K_{p+1} is the first complex containing it
    if s.critical_indices.iter().any(|&p| prof.values[p as usize + 1] == 0) {
        bad.push("critical index in a cycle");
    }
    if s.fill_up + (n as u64) < m {
        bad.push("lower bound");
    }
    if s.fill_up > 3 * m + prof.weighted_support() {
        bad.push("fill-up upper bound");
    }
    bad
}

fn invariant_suite() -> Vec<Outcome> {
    let t = Instant::now();
    let seed = Seed::new(SEED);
    let mut instances = Vec::new();
    for trial in 0..240u64 {
        let n = 3 + (trial % 8) as usize;
        let model = if trial % 2 == 0 { Model::Er } else { Model::Vr { dim: 2 + (trial % 4 == 1) as usize } };
        let f = Filtration::with_default_ties(sample_order(model, n, seed, "acceptance/invariants", trial).unwrap());
        instances.push(if trial % 3 == 0 { shuffle_ties(f, seed, trial) } else { f });
    }
    for trial in 240..480u64 {
        let n = 3 + (trial % 8) as usize;
        let f = Filtration::with_default_ties(sample_order(Model::Vr { dim: 1 }, n, seed, "acceptance/invariants", trial).unwrap());
        instances.push(shuffle_ties(f, seed, trial));
    }
    // the smallest worst-case instance has 16 vertices
    for trial in 0..20u64 {
        let w = worst_case_filtration(WorstCaseParams::new(3).unwrap(), Seed::new(SEED + trial)).unwrap();
        instances.push(w.filtration);
    }
    let mut failures = BTreeSet::new();
    for f in &instances {
        failures.extend(invariant_failures(f));
    }
    vec![report(
        "3",
        "invariant suite",
        failures.is_empty(),
        format!("{} instances, violated: {failures:?}, {:.1?}", instances.len(), t.elapsed()),
    )]
}

fn experiment(model: Model, sizes: &[usize], trials: usize, exec: Execution) -> Vec<ExperimentRow> {
    let cfg = ExperimentConfig {
        model,
        sizes: sizes.to_vec(),
        trials,
        seed: Seed::new(SEED),
        exec,
        timing: false,
    };
    run_experiment(&cfg).unwrap()
}

fn exponents(
    id_fill: &'static str,
    id_cost: &'static str,
    label: &'static str,
    rows: &[ExperimentRow],
    fill_win: (f64, f64),
    cost_win: (f64, f64),
) -> Vec<Outcome> {
    let fill = fit_table(rows, Metric::FillUp).unwrap();
    let cost = fit_table(rows, Metric::Cost).unwrap();
    let lower_ok = rows.iter().all(|r| r.mean_fillup + r.n as f64 >= (r.n * (r.n - 1) / 2) as f64);
    vec![
        report(
            id_fill,
            label,
            within(fill.exponent, fill_win) && lower_ok,
            format!("fill-up exponent {:.3} in {fill_win:?}, lambda {:.3e}", fill.exponent, fill.lambda),
        ),
        report(
            id_cost,
            label,
            within(cost.exponent, cost_win),
            format!("cost exponent {:.3} in {cost_win:?}, lambda {:.3e}", cost.exponent, cost.lambda),
        ),
    ]
}

fn worst_audit() -> Outcome {
    let mut short = Vec::new();
    let mut counts = Vec::new();
    for p in WORST_PS.into_iter().filter(|&p| p >= 7) {
        let w = worst_case_filtration(WorstCaseParams::new(p).unwrap(), Seed::new(SEED)).unwrap();
        let (r, s) = reduce(&boundary_matrix(&w.filtration)).unwrap();
        let a = worst_case_audit(&w, &r, &s);
        counts.push(format!("p={p}: {} >= {:.2}", a.fat_columns, (p * p) as f64 / 4.0));
        if a.fat_bound != Some(true) {
            short.push(p);
        }
    }
    report("6c", "worst-case fat columns", short.is_empty(), counts.join(", "))
}

fn scan(model: Model, n: usize) -> (BettiScanResult, bool) {
    let grid = default_grid(n * (n - 1) / 2);
    let res = betti_probability_scan(model, n, SCAN_TRIALS, &grid, Seed::new(SEED), Execution::Parallel).unwrap();
    let pass = *res.p_hat.last().unwrap() == 0.0 && res.decreasing_after_peak(2.0);
    (res, pass)
}

fn scans() -> Vec<Outcome> {
    let mut out = Vec::new();
    for (id, model, n) in [("7a", Model::Er, 30), ("7b", Model::Vr { dim: 2 }, 50)] {
        let (res, pass) = scan(model, n);
        let peak = res.p_hat.iter().copied().fold(0.0, f64::max);
        out.push(report(
            id,
            "phase-transition scan",
            pass,
            format!(
                "{} n={n}: peak p_hat {peak:.3}, p_hat(m)={}, T={:?}, T/(n ln n)={:.3?}, A={:.3?}",
                res.model,
                res.p_hat.last().unwrap(),
                res.threshold_t,
                res.c_nlogn,
                res.a_param
            ),
        ));
    }
    out
}

fn main() {
    let mut outcomes = Vec::new();
    outcomes.extend(four_vertex());
    outcomes.extend(oracle());
    outcomes.extend(invariant_suite());

    let t = Instant::now();
    let vr = experiment(Model::Vr { dim: 2 }, &VR_NS, TRIALS, Execution::Parallel);
    println!("vr2 sweep {:.1?}", t.elapsed());
    outcomes.extend(exponents("4a", "4b", "VR exponents", &vr, VR_FILL, VR_COST));

    let t = Instant::now();
    let er = experiment(Model::Er, &ER_NS, TRIALS, Execution::Parallel);
    println!("er sweep {:.1?}", t.elapsed());
    outcomes.extend(exponents("5a", "5b", "ER exponents", &er, ER_FILL, ER_COST));

    let t = Instant::now();
    let worst = experiment(Model::Worst, &WORST_PS, 1, Execution::Parallel);
    println!("worst sweep {:.1?}", t.elapsed());
    for r in &worst {
        let p = (r.n - 1) / 5;
        println!(
            "  p={p} n={} fill_up {:.0} ({:.3}·p^4) cost {:.0} ({:.3}·p^7)",
            r.n,
            r.mean_fillup,
            r.mean_fillup / (p as f64).powi(4),
            r.mean_cost,
            r.mean_cost / (p as f64).powi(7)
        );
    }
    outcomes.extend(exponents("6a", "6b", "worst-case exponents", &worst, WORST_FILL, WORST_COST));
    outcomes.push(worst_audit());

    outcomes.extend(scans());

    // rerun with the same seeds, serially this time
    let csv = |rows: &[ExperimentRow]| to_csv(rows).unwrap();
    let same = [
        csv(&vr) == csv(&experiment(Model::Vr { dim: 2 }, &VR_NS, TRIALS, Execution::Serial)),
        csv(&er) == csv(&experiment(Model::Er, &ER_NS, TRIALS, Execution::Serial)),
        csv(&worst) == csv(&experiment(Model::Worst, &WORST_PS, 1, Execution::Serial)),
    ];
    outcomes.push(report(
        "8",
        "determinism",
        same.iter().all(|&b| b),
        format!("byte-identical CSV on rerun (vr, er, worst): {same:?}"),
    ));

    let failed: BTreeSet<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let expected: BTreeSet<&str> = EXPECTED_RED.into_iter().collect();
    println!(
        "{} of {} criteria pass; failing: {:?}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        failed
    );
    for o in outcomes.iter().filter(|o| !o.pass) {
        println!("  {} {}: {}", o.id, o.name, o.detail);
    }
    if failed != expected {
        eprintln!("failing criteria {failed:?} differ from the documented set {expected:?}");
        std::process::exit(1);
    }
}
