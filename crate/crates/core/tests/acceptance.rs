//! Acceptance suite. Each test exercises one criterion end to end at its
//! stated tolerance and prints a single pass/fail line.

mod common;

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use common::{bisection_project, grid_search_2d};
use rand::Rng;

use lasso_mc::experiment::{
    reference_config, run_simulate, run_verify_lemmas, summary_csv, BetaSpec, ExperimentConfig,
    KRule, LemmaGridOptions, ModelConfig, SimulationOutput,
};
use lasso_mc::linalg::{self, Mat};
use lasso_mc::rng::substream;
use lasso_mc::solver::{project_l1_ball, solve, Algorithm, LassoProblem, SolverOptions};
use lasso_mc::CovariateDesign;

fn report(criterion: usize, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn reference_output() -> &'static SimulationOutput {
    static OUT: OnceLock<SimulationOutput> = OnceLock::new();
    OUT.get_or_init(|| {
        let config = reference_config(PathBuf::from("unused"));
        run_simulate(&config).expect("reference run")
    })
}

#[test]
fn criterion_1_prediction_error_bound() {
    let out = reference_output();
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    let mut pass = true;
    for s in &out.summary {
        let lhs = s.mean_mspe + 3.0 * s.se_mspe;
        let margin = lhs / s.thm1_bound;
        if margin > worst {
            worst = margin;
        }
        pass &= lhs <= s.thm1_bound;
        detail.push_str(&format!(
            "n={}: mean+3SE={:.4} ≤ {:.4}; ",
            s.n, lhs, s.thm1_bound
        ));
    }
    report(
        1,
        pass,
        &format!("{detail}worst ratio {worst:.3} (200 replicates, reference model)"),
    );
}

#[test]
fn criterion_2_estimated_error_bound() {
    let out = reference_output();
    let mut pass = true;
    let mut detail = String::new();
    for s in &out.summary {
        let lhs = s.mean_mspe_hat + 3.0 * s.se_mspe_hat;
        pass &= lhs <= s.thm2_bound;
        detail.push_str(&format!(
            "n={}: mean+3SE={:.4} ≤ {:.4}; ",
            s.n, lhs, s.thm2_bound
        ));
    }
    report(2, pass, detail.trim_end_matches("; "));
}

#[test]
fn criterion_3_prediction_consistency() {
    let out = reference_output();
    let at = |n: usize| {
        out.summary
            .iter()
            .find(|s| s.n == n)
            .map(|s| s.mean_mspe)
            .expect("grid point")
    };
    let first = at(100);
    let last = at(6400);
    report(
        3,
        last < 0.25 * first,
        &format!(
            "mean MSPE fell from {first:.4} (n=100) to {last:.5} (n=6400), ratio {:.4}",
            last / first
        ),
    );
}

#[test]
fn criterion_4_sure_inequalities_across_designs() {
    let designs = [
        ("iid_uniform", CovariateDesign::IidUniform),
        ("iid_rademacher", CovariateDesign::IidRademacher),
        (
            "equicorrelated",
            CovariateDesign::EquicorrelatedRademacher { q: 0.75 },
        ),
    ];
    let mut total = 0usize;
    let mut pass = true;
    let mut detail = String::new();
    for (name, design) in designs {
        for p in [10usize, 40] {
            let config = ExperimentConfig {
                model: ModelConfig {
                    p,
                    beta_star: BetaSpec::Support {
                        support: 3,
                        value: 1.0,
                    },
                    sigma: 1.0,
                    design,
                    m: 1.0,
                },
                n_grid: vec![50, 200],
                k_rule: KRule::Oracle,
                replicates: 90,
                master_seed: 1717,
                solver: SolverOptions::default(),
                output_dir: PathBuf::from("unused"),
            };
            let out = run_simulate(&config).expect("trace grid run");
            total += out.replicates.len();
            for s in &out.summary {
                if s.frac_est1_holds != 1.0 || s.frac_est3_holds != 1.0 {
                    pass = false;
                    detail.push_str(&format!(
                        "{name} p={p} n={}: est1 {:.3} est3 {:.3}; ",
                        s.n, s.frac_est1_holds, s.frac_est3_holds
                    ));
                }
            }
        }
    }
    pass &= total >= 1000;
    report(
        4,
        pass,
        &format!(
            "est1 and est3 held in all {total} replicates across 3 designs × 2 p × 2 n {detail}"
        ),
    );
}

#[test]
fn criterion_5_concentration_suite() {
    let start = Instant::now();
    let outcome = run_verify_lemmas(&LemmaGridOptions {
        seed: 2024,
        ..LemmaGridOptions::default()
    })
    .expect("lemma suite");
    let elapsed = start.elapsed();
    let failed: Vec<&str> = outcome
        .entries
        .iter()
        .filter(|e| !e.verdict.passes)
        .map(|e| e.label.as_str())
        .collect();
    let pass = outcome.all_pass() && elapsed.as_secs_f64() < 60.0 && outcome.entries.len() >= 62;
    report(
        5,
        pass,
        &format!(
            "{} verdicts passed in {:.1}s (grid m×L×dependence plus U/V checks){}",
            outcome.entries.len(),
            elapsed.as_secs_f64(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {failed:?}")
            }
        ),
    );
}

#[test]
fn criterion_6_solver_oracle_equivalence() {
    let mut rng = substream(606, "acceptance-instances", 0, 0);
    let mut grid_checked = 0usize;
    let mut cross_checked = 0usize;
    let mut worst_grid = 0.0f64;
    let mut worst_cross = 0.0f64;
    for case in 0..100usize {
        // every third instance is planar so the grid oracle sees real use
        let p = if case % 3 == 0 {
            2
        } else {
            1 + (rng.gen::<u64>() % 6) as usize
        };
        let n = 2 + (rng.gen::<u64>() % 19) as usize;
        let k = [0.5, 1.0, 2.0][case % 3];
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            rows.push(
                (0..p)
                    .map(|_| 2.0 * rng.gen::<f64>() - 1.0)
                    .collect::<Vec<f64>>(),
            );
        }
        let x = Mat::from_rows(&rows);
        let beta0: Vec<f64> = (0..p).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| linalg::dot(x.row(i), &beta0) + 0.2 * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        let problem = LassoProblem::new(&x, &y, k).unwrap();
        let tol = problem.default_gap_tolerance();
        let pg = solve(
            &problem,
            &SolverOptions {
                algorithm: Algorithm::ProjectedGradient,
                max_iterations: 200_000,
                ..SolverOptions::default()
            },
        )
        .unwrap_or_else(|e| panic!("case {case}: projected gradient failed: {e}"));
        if p == 2 {
            let (oracle_obj, _) = grid_search_2d(&x, &y, k, 1e-3);
            let diff = (pg.objective - oracle_obj).abs();
            worst_grid = worst_grid.max(diff);
            assert!(
                diff <= 1e-4,
                "case {case}: objective {} vs grid oracle {oracle_obj}",
                pg.objective
            );
            grid_checked += 1;
        } else {
            let fw = solve(
                &problem,
                &SolverOptions {
                    algorithm: Algorithm::FrankWolfe,
                    max_iterations: 200_000,
                    ..SolverOptions::default()
                },
            )
            .unwrap_or_else(|e| panic!("case {case}: frank-wolfe failed: {e}"));
            let diff = (pg.objective - fw.objective).abs();
            worst_cross = worst_cross.max(diff / tol);
            assert!(
                diff <= 10.0 * tol,
                "case {case}: cross-algorithm gap {diff} vs 10·{tol:e}"
            );
            cross_checked += 1;
        }
    }

    // projection against its threshold-bisection oracle
    let mut worst_proj = 0.0f64;
    for case in 0..1000 {
        let p = 1 + (rng.gen::<u64>() % 25) as usize;
        let v: Vec<f64> = (0..p)
            .map(|_| 8.0 * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        let k = [0.5, 1.0, 2.0][case % 3];
        let fast = project_l1_ball(&v, k);
        let slow = bisection_project(&v, k);
        for (a, b) in fast.iter().zip(&slow) {
            worst_proj = worst_proj.max((a - b).abs());
        }
    }
    let pass = worst_proj <= 1e-8 && grid_checked + cross_checked == 100;
    report(
        6,
        pass,
        &format!(
            "{grid_checked} grid-oracle checks (worst |Δobj| {worst_grid:.2e}), \
{cross_checked} cross-algorithm checks (worst Δ/tol {worst_cross:.2}), \
1000 projections (worst Δ {worst_proj:.2e})"
        ),
    );
}

#[test]
fn criterion_7_determinism() {
    let config = ExperimentConfig {
        model: ModelConfig {
            p: 8,
            beta_star: BetaSpec::Support {
                support: 2,
                value: 1.0,
            },
            sigma: 1.0,
            design: CovariateDesign::IidRademacher,
            m: 1.0,
        },
        n_grid: vec![30, 60],
        k_rule: KRule::Oracle,
        replicates: 10,
        master_seed: 777,
        solver: SolverOptions::default(),
        output_dir: PathBuf::from("unused"),
    };
    let repeat_a = run_simulate(&config).expect("first run");
    let repeat_b = run_simulate(&config).expect("second run");
    let csv_a = summary_csv(&repeat_a.summary);
    let csv_b = summary_csv(&repeat_b.summary);
    let repeat_equal = csv_a == csv_b
        && lasso_mc::experiment::replicates_csv(&repeat_a.replicates)
            == lasso_mc::experiment::replicates_csv(&repeat_b.replicates);

    let run_with_threads = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool")
            .install(|| run_simulate(&config).expect("threaded run"))
    };
    let single = run_with_threads(1);
    let eight = run_with_threads(8);
    let thread_equal = lasso_mc::experiment::replicates_csv(&single.replicates)
        == lasso_mc::experiment::replicates_csv(&eight.replicates)
        && summary_csv(&single.summary) == summary_csv(&eight.summary)
        && single == repeat_a;
    report(
        7,
        repeat_equal && thread_equal,
        "byte-identical CSVs across repeated runs and across 1- vs 8-thread pools",
    );
}

/// The four plotted series decrease in n and the bound curves stay above
/// their empirical counterparts at every grid point.
#[test]
fn reference_curves_decrease_with_bounds_above() {
    let out = reference_output();
    let summary = &out.summary;
    for w in summary.windows(2) {
        assert!(w[1].mean_mspe < w[0].mean_mspe);
        assert!(w[1].mean_mspe_hat < w[0].mean_mspe_hat);
        assert!(w[1].thm1_bound < w[0].thm1_bound);
        assert!(w[1].thm2_bound < w[0].thm2_bound);
    }
    for s in summary {
        assert!(s.thm1_bound > s.mean_mspe);
        assert!(s.thm2_bound > s.mean_mspe_hat);
    }
}

/// Regression guard: the committed golden summary of the reference run must
/// reproduce byte for byte.
#[test]
fn golden_reference_summary_matches() {
    let golden_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden_summary.csv");
    let golden = std::fs::read_to_string(&golden_path).expect("golden summary committed");
    let current = summary_csv(&reference_output().summary);
    assert_eq!(
        golden, current,
        "reference summary deviates from the committed golden file"
    );
}
