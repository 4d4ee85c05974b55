//! Experiment orchestration: JSON config, seeded replicate sweeps across the
//! model/solver/metrics modules, CSV emission, and the lemma verification
//! suite. Replicates run in parallel but each draws from a substream keyed by
//! (master seed, n, replicate index), so output is identical at any thread
//! count.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concentration::{
    hoeffding_mgf_check, rademacher_exact_mgf, u_max_bound, v_max_bound, verify_gauss_max,
    verify_subgauss_max, BoundedDist, ConcentrationError, LemmaVerdict,
};
use crate::metrics::{
    compute_u, compute_v, theorem1_bound, theorem2_bound, trace_proof, MetricsError,
    ReplicateReport,
};
use crate::model::{sample_dataset, second_moment, CovariateDesign, ModelError, ModelSpec};
use crate::rng::substream;
use crate::solver::{solve, LassoProblem, SolverError, SolverOptions};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("metrics error: {0}")]
    Metrics(#[from] MetricsError),
    #[error("solver error: {0}")]
    Solver(String),
    #[error(transparent)]
    Concentration(#[from] ConcentrationError),
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// True-coefficient specification: a sparse prefix support or an explicit
/// vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Support { support: usize, value: f64 },
    Explicit(Vec<f64>),
}

impl BetaSpec {
    pub fn resolve(&self, p: usize) -> Result<Vec<f64>, RunError> {
        match self {
            BetaSpec::Support { support, value } => {
                if *support > p {
                    return Err(RunError::Config(format!(
                        "support size {support} exceeds p = {p}"
                    )));
                }
                let mut beta = vec![0.0; p];
                for b in beta.iter_mut().take(*support) {
                    *b = *value;
                }
                Ok(beta)
            }
            BetaSpec::Explicit(beta) => {
                if beta.len() != p {
                    return Err(RunError::Config(format!(
                        "explicit beta_star has length {}, expected p = {p}",
                        beta.len()
                    )));
                }
                Ok(beta.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub p: usize,
    pub beta_star: BetaSpec,
    pub sigma: f64,
    pub design: CovariateDesign,
    pub m: f64,
}

impl ModelConfig {
    pub fn to_spec(&self) -> Result<ModelSpec, RunError> {
        let beta = self.beta_star.resolve(self.p)?;
        ModelSpec::new(beta, self.sigma, self.design, self.m)
            .map_err(|e| RunError::Config(e.to_string()))
    }
}

/// Budget rule for the ℓ1 constraint. Oracle and Multiplier satisfy the sum
/// condition ‖β*‖₁ ≤ K by construction; Fixed may deliberately violate it,
/// which the runner reports instead of silently running.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRule {
    Oracle,
    Multiplier { c: f64 },
    Fixed { k: f64 },
}

impl KRule {
    pub fn resolve(&self, spec: &ModelSpec) -> Result<f64, RunError> {
        let l1 = spec.beta_star_l1();
        let k = match self {
            KRule::Oracle => l1,
            KRule::Multiplier { c } => {
                if c.is_nan() || *c < 1.0 {
                    return Err(RunError::Config(format!(
                        "multiplier c must be at least 1, got {c}"
                    )));
                }
                c * l1
            }
            KRule::Fixed { k } => {
                if k.is_nan() || *k < 0.0 {
                    return Err(RunError::Config(format!(
                        "fixed K must be nonnegative, got {k}"
                    )));
                }
                *k
            }
        };
        if l1 > k * (1.0 + 1e-12) {
            return Err(RunError::Config(format!(
                "sum condition violated: ||beta*||_1 = {l1} exceeds K = {k}"
            )));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub n_grid: Vec<usize>,
    pub k_rule: KRule,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if self.n_grid.is_empty() {
            return Err(RunError::Config("n_grid must be nonempty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RunError::Config(
                "n_grid must be strictly increasing".into(),
            ));
        }
        if self.n_grid[0] == 0 {
            return Err(RunError::Config("n_grid entries must be positive".into()));
        }
        if self.replicates == 0 {
            return Err(RunError::Config("replicates must be at least 1".into()));
        }
        if let Some(t) = self.solver.gap_tolerance {
            if t.is_nan() || t <= 0.0 {
                return Err(RunError::Config(format!(
                    "solver gap_tolerance must be positive, got {t}"
                )));
            }
        }
        let spec = self.model.to_spec()?;
        self.k_rule.resolve(&spec)?;
        Ok(())
    }
}

/// Loads and validates a config JSON. Unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| RunError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// One solved replicate, flattened for the per-replicate CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub n: usize,
    pub p: usize,
    pub k: f64,
    pub replicate: usize,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
    pub report: ReplicateReport,
}

/// Aggregated metrics for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub p: usize,
    pub k: f64,
    pub replicates: usize,
    pub mean_mspe: f64,
    pub se_mspe: f64,
    pub mean_mspe_hat: f64,
    pub se_mspe_hat: f64,
    pub thm1_bound: f64,
    pub thm2_bound: f64,
    pub frac_est1_holds: f64,
    pub frac_est3_holds: f64,
    pub mean_max_u: f64,
    pub u_bound: f64,
    pub mean_max_v: f64,
    pub v_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub summary: Vec<SummaryRow>,
    pub replicates: Vec<ReplicateRow>,
}

fn run_replicate(
    spec: &ModelSpec,
    n: usize,
    k: f64,
    opts: &SolverOptions,
    master_seed: u64,
    stream_domain: &str,
    rep: usize,
) -> Result<ReplicateRow, RunError> {
    let mut rng = substream(master_seed, stream_domain, n as u64, rep as u64);
    let dataset = sample_dataset(spec, n, &mut rng)?;
    let problem = LassoProblem::new(&dataset.x, &dataset.y, k)
        .map_err(|e| RunError::Solver(e.to_string()))?;
    let (solution, converged) = match solve(&problem, opts) {
        Ok(s) => (s, true),
        Err(SolverError::NonConvergence { solution, .. }) => (solution, false),
        Err(e) => return Err(RunError::Solver(e.to_string())),
    };
    let report = trace_proof(&dataset, &solution, spec, k)?;
    Ok(ReplicateRow {
        n,
        p: spec.p,
        k,
        replicate: rep,
        converged,
        iterations: solution.iterations,
        objective: solution.objective,
        report,
    })
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    if r == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1) as f64;
    (mean, (var / r as f64).sqrt())
}

fn summarize(rows: &[ReplicateRow], spec: &ModelSpec, n: usize, k: f64) -> SummaryRow {
    let mspe: Vec<f64> = rows.iter().map(|r| r.report.mspe_exact).collect();
    let mspe_hat: Vec<f64> = rows.iter().map(|r| r.report.mspe_hat).collect();
    let max_u: Vec<f64> = rows.iter().map(|r| r.report.max_abs_u).collect();
    let max_v: Vec<f64> = rows.iter().map(|r| r.report.max_abs_v).collect();
    let (mean_mspe, se_mspe) = mean_se(&mspe);
    let (mean_mspe_hat, se_mspe_hat) = mean_se(&mspe_hat);
    let (mean_max_u, _) = mean_se(&max_u);
    let (mean_max_v, _) = mean_se(&max_v);
    let count = rows.len() as f64;
    SummaryRow {
        n,
        p: spec.p,
        k,
        replicates: rows.len(),
        mean_mspe,
        se_mspe,
        mean_mspe_hat,
        se_mspe_hat,
        thm1_bound: theorem1_bound(k, spec.m, spec.sigma, spec.p, n),
        thm2_bound: theorem2_bound(k, spec.m, spec.sigma, spec.p, n),
        frac_est1_holds: rows.iter().filter(|r| r.report.est1_holds).count() as f64 / count,
        frac_est3_holds: rows.iter().filter(|r| r.report.est3_holds).count() as f64 / count,
        mean_max_u,
        u_bound: u_max_bound(spec.m, spec.sigma, spec.p, n),
        mean_max_v,
        v_bound: v_max_bound(spec.m, spec.p, n),
    }
}

/// Runs the configured sweep: for each n, `replicates` independent datasets
/// are generated, solved, and traced; per-replicate rows and per-n summaries
/// come back in deterministic order.
pub fn run_simulate(config: &ExperimentConfig) -> Result<SimulationOutput, RunError> {
    run_simulate_with_domain(config, "simulate")
}

fn run_simulate_with_domain(
    config: &ExperimentConfig,
    stream_domain: &str,
) -> Result<SimulationOutput, RunError> {
    config.validate()?;
    let spec = config.model.to_spec()?;
    let k = config.k_rule.resolve(&spec)?;
    let mut summary = Vec::with_capacity(config.n_grid.len());
    let mut replicates = Vec::with_capacity(config.n_grid.len() * config.replicates);
    for &n in &config.n_grid {
        let rows: Result<Vec<ReplicateRow>, RunError> = (0..config.replicates)
            .into_par_iter()
            .map(|rep| {
                run_replicate(
                    &spec,
                    n,
                    k,
                    &config.solver,
                    config.master_seed,
                    stream_domain,
                    rep,
                )
            })
            .collect();
        let rows = rows?;
        summary.push(summarize(&rows, &spec, n, k));
        replicates.extend(rows);
    }
    Ok(SimulationOutput {
        summary,
        replicates,
    })
}

/// Outcome of the proof-trace run: the fractions must both be 1.0, these are
/// sure inequalities.
#[derive(Debug, Clone)]
pub struct TraceOutcome {
    pub total: usize,
    pub frac_est1: f64,
    pub frac_est3: f64,
    pub first_violation: Option<ReplicateRow>,
}

impl TraceOutcome {
    pub fn all_hold(&self) -> bool {
        self.frac_est1 == 1.0 && self.frac_est3 == 1.0
    }
}

/// Runs the config's replicates and checks that est1 (with gap/2 slack) and
/// est3 hold in every single one.
pub fn run_trace_proof(config: &ExperimentConfig) -> Result<TraceOutcome, RunError> {
    let out = run_simulate_with_domain(config, "trace-proof")?;
    let total = out.replicates.len();
    let est1 = out
        .replicates
        .iter()
        .filter(|r| r.report.est1_holds)
        .count();
    let est3 = out
        .replicates
        .iter()
        .filter(|r| r.report.est3_holds)
        .count();
    let first_violation = out
        .replicates
        .iter()
        .find(|r| !r.report.est1_holds || !r.report.est3_holds)
        .cloned();
    Ok(TraceOutcome {
        total,
        frac_est1: est1 as f64 / total as f64,
        frac_est3: est3 as f64 / total as f64,
        first_violation,
    })
}

// ---------------------------------------------------------------------------
// Lemma verification suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LemmaGridOptions {
    pub seed: u64,
    pub reps: usize,
    /// Replicates for the max|U| / max|V| empirical checks.
    pub uv_replicates: usize,
    /// Test hook: halve every bound so the suite must fail.
    pub negative_control: bool,
}

impl Default for LemmaGridOptions {
    fn default() -> Self {
        LemmaGridOptions {
            seed: 0,
            reps: 20_000,
            uv_replicates: 200,
            negative_control: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LemmaSuiteEntry {
    pub label: String,
    pub verdict: LemmaVerdict,
    /// Exact mgf value when the entry has one (Rademacher, m = 1).
    pub exact_value: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LemmaSuiteOutcome {
    pub entries: Vec<LemmaSuiteEntry>,
}

impl LemmaSuiteOutcome {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.passes)
    }
}

fn corrupt(verdict: LemmaVerdict) -> LemmaVerdict {
    let bound_value = verdict.bound_value / 2.0;
    LemmaVerdict {
        passes: verdict.empirical_value <= bound_value + 3.0 * verdict.std_error,
        bound_value,
        ..verdict
    }
}

/// The m × L × dependence grid for the three lemma verifiers, plus the
/// empirical max|U| / max|V| checks on the reference model.
pub fn run_verify_lemmas(opts: &LemmaGridOptions) -> Result<LemmaSuiteOutcome, RunError> {
    let ms = [1usize, 10, 1000];
    let ls = [0.5, 1.0, 2.0];
    let mut entries = Vec::new();
    let mut lane = 0u64;
    let mut push = |label: String, verdict: LemmaVerdict, exact: Option<f64>| {
        let verdict = if opts.negative_control {
            corrupt(verdict)
        } else {
            verdict
        };
        entries.push(LemmaSuiteEntry {
            label,
            verdict,
            exact_value: exact,
        });
    };

    for &m in &ms {
        for &l in &ls {
            for correlated in [false, true] {
                let mut rng = substream(opts.seed, "lemmas-gauss", lane, 0);
                lane += 1;
                let sigmas = vec![l; m];
                let v = verify_gauss_max(m, &sigmas, correlated, opts.reps, &mut rng)?;
                let dep = if correlated {
                    "shared-factor"
                } else {
                    "independent"
                };
                push(format!("gauss-max m={m} L={l} {dep}"), v, None);
            }
            for dist in [BoundedDist::Uniform, BoundedDist::Rademacher] {
                let mut rng = substream(opts.seed, "lemmas-subgauss", lane, 0);
                lane += 1;
                let v = verify_subgauss_max(m, l, dist, opts.reps, &mut rng)?;
                push(format!("subgauss-max m={m} L={l} {dist:?}"), v, None);

                let mut rng = substream(opts.seed, "lemmas-hoeffding", lane, 0);
                lane += 1;
                // β scaled so the mgf exponent stays O(1) on every grid point
                let beta = 1.0 / (l * (m as f64).sqrt());
                let v = hoeffding_mgf_check(m, l, beta, dist, opts.reps, &mut rng)?;
                let exact = (dist == BoundedDist::Rademacher && m == 1)
                    .then(|| rademacher_exact_mgf(beta, l));
                push(
                    format!("hoeffding-mgf m={m} L={l} beta={beta:.4} {dist:?}"),
                    v,
                    exact,
                );
            }
        }
    }

    if opts.uv_replicates == 0 {
        return Ok(LemmaSuiteOutcome { entries });
    }

    // Empirical E(max|U_j|) and E(max|V_{j,k}|) against their closed-form
    // bounds, on the reference model.
    let spec = reference_model_spec()?;
    for &n in &REFERENCE_N_GRID {
        let samples: Result<Vec<(f64, f64)>, RunError> = (0..opts.uv_replicates)
            .into_par_iter()
            .map(|rep| {
                let mut rng = substream(opts.seed, "lemmas-uv", n as u64, rep as u64);
                let ds = sample_dataset(&spec, n, &mut rng)?;
                let u = compute_u(&ds)?;
                let sigma = second_moment(&spec);
                let v = compute_v(&ds, &sigma)?;
                Ok((crate::linalg::linf_norm(&u), v.max_abs_entry()))
            })
            .collect();
        let samples = samples?;
        let us: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let vs: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let (mu, su) = mean_se(&us);
        let (mv, sv) = mean_se(&vs);
        let ub = u_max_bound(spec.m, spec.sigma, spec.p, n);
        let vb = v_max_bound(spec.m, spec.p, n);
        push(
            format!("u-max n={n}"),
            LemmaVerdict {
                empirical_value: mu,
                bound_value: ub,
                std_error: su,
                passes: mu <= ub + 3.0 * su,
                replicates: opts.uv_replicates,
            },
            None,
        );
        push(
            format!("v-max n={n}"),
            LemmaVerdict {
                empirical_value: mv,
                bound_value: vb,
                std_error: sv,
                passes: mv <= vb + 3.0 * sv,
                replicates: opts.uv_replicates,
            },
            None,
        );
    }

    Ok(LemmaSuiteOutcome { entries })
}

// ---------------------------------------------------------------------------
// Reference configuration
// ---------------------------------------------------------------------------

pub const REFERENCE_N_GRID: [usize; 4] = [100, 400, 1600, 6400];

/// The reference model: p = 100, five unit coefficients, σ = 1, M = 1,
/// i.i.d. Rademacher covariates.
pub fn reference_model_spec() -> Result<ModelSpec, RunError> {
    let config = ModelConfig {
        p: 100,
        beta_star: BetaSpec::Support {
            support: 5,
            value: 1.0,
        },
        sigma: 1.0,
        design: CovariateDesign::IidRademacher,
        m: 1.0,
    };
    config.to_spec()
}

/// The reference experiment: oracle K = 5, n ∈ {100, 400, 1600, 6400},
/// 200 replicates.
pub fn reference_config(output_dir: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        model: ModelConfig {
            p: 100,
            beta_star: BetaSpec::Support {
                support: 5,
                value: 1.0,
            },
            sigma: 1.0,
            design: CovariateDesign::IidRademacher,
            m: 1.0,
        },
        n_grid: REFERENCE_N_GRID.to_vec(),
        k_rule: KRule::Oracle,
        replicates: 200,
        master_seed: 20240 * 4001,
        solver: SolverOptions::default(),
        output_dir,
    }
}

// ---------------------------------------------------------------------------
// CSV emission and ingestion
// ---------------------------------------------------------------------------

/// Floats are rendered with 17 significant digits so the CSV round-trips
/// losslessly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const SUMMARY_HEADER: &str = "n,p,K,replicates,mean_mspe,se_mspe,mean_mspe_hat,se_mspe_hat,\
thm1_bound,thm2_bound,frac_est1_holds,frac_est3_holds,mean_max_U,u_bound,mean_max_V,v_bound";

pub const REPLICATES_HEADER: &str = "n,p,K,replicate,converged,iterations,objective,gap,\
mspe_exact,mspe_hat,thm1_bound,thm2_bound,max_abs_U,max_abs_V,est1_lhs,est1_rhs,est3_lhs,\
est3_rhs,est1_holds,est3_holds";

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.p,
            fmt_f64(r.k),
            r.replicates,
            fmt_f64(r.mean_mspe),
            fmt_f64(r.se_mspe),
            fmt_f64(r.mean_mspe_hat),
            fmt_f64(r.se_mspe_hat),
            fmt_f64(r.thm1_bound),
            fmt_f64(r.thm2_bound),
            fmt_f64(r.frac_est1_holds),
            fmt_f64(r.frac_est3_holds),
            fmt_f64(r.mean_max_u),
            fmt_f64(r.u_bound),
            fmt_f64(r.mean_max_v),
            fmt_f64(r.v_bound),
        ));
    }
    out
}

pub fn replicates_csv(rows: &[ReplicateRow]) -> String {
    let mut out = String::from(REPLICATES_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.p,
            fmt_f64(r.k),
            r.replicate,
            r.converged,
            r.iterations,
            fmt_f64(r.objective),
            fmt_f64(r.report.gap),
            fmt_f64(r.report.mspe_exact),
            fmt_f64(r.report.mspe_hat),
            fmt_f64(r.report.thm1_bound),
            fmt_f64(r.report.thm2_bound),
            fmt_f64(r.report.max_abs_u),
            fmt_f64(r.report.max_abs_v),
            fmt_f64(r.report.est1_lhs),
            fmt_f64(r.report.est1_rhs),
            fmt_f64(r.report.est3_lhs),
            fmt_f64(r.report.est3_rhs),
            r.report.est1_holds,
            r.report.est3_holds,
        ));
    }
    out
}

/// Writes `replicates.csv` and `summary.csv` into `dir`, creating it first.
pub fn write_outputs(dir: &Path, output: &SimulationOutput) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rep_path = dir.join("replicates.csv");
    let mut f = fs::File::create(&rep_path).map_err(io_err(&rep_path))?;
    f.write_all(replicates_csv(&output.replicates).as_bytes())
        .map_err(io_err(&rep_path))?;
    let sum_path = dir.join("summary.csv");
    let mut f = fs::File::create(&sum_path).map_err(io_err(&sum_path))?;
    f.write_all(summary_csv(&output.summary).as_bytes())
        .map_err(io_err(&sum_path))?;
    Ok(())
}

fn split_line<'a>(
    line: &'a str,
    expected: usize,
    path: &Path,
    lineno: usize,
) -> Result<Vec<&'a str>, RunError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(RunError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "line {lineno}: expected {expected} fields, got {}",
                fields.len()
            ),
        });
    }
    Ok(fields)
}

fn parse<T: std::str::FromStr>(s: &str, path: &Path, lineno: usize) -> Result<T, RunError> {
    s.parse().map_err(|_| RunError::Parse {
        path: path.to_path_buf(),
        message: format!("line {lineno}: cannot parse {s:?}"),
    })
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SUMMARY_HEADER => {}
        _ => {
            return Err(RunError::Parse {
                path: path.to_path_buf(),
                message: "missing or unexpected summary header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_line(line, 16, path, i + 1)?;
        rows.push(SummaryRow {
            n: parse(f[0], path, i + 1)?,
            p: parse(f[1], path, i + 1)?,
            k: parse(f[2], path, i + 1)?,
            replicates: parse(f[3], path, i + 1)?,
            mean_mspe: parse(f[4], path, i + 1)?,
            se_mspe: parse(f[5], path, i + 1)?,
            mean_mspe_hat: parse(f[6], path, i + 1)?,
            se_mspe_hat: parse(f[7], path, i + 1)?,
            thm1_bound: parse(f[8], path, i + 1)?,
            thm2_bound: parse(f[9], path, i + 1)?,
            frac_est1_holds: parse(f[10], path, i + 1)?,
            frac_est3_holds: parse(f[11], path, i + 1)?,
            mean_max_u: parse(f[12], path, i + 1)?,
            u_bound: parse(f[13], path, i + 1)?,
            mean_max_v: parse(f[14], path, i + 1)?,
            v_bound: parse(f[15], path, i + 1)?,
        });
    }
    Ok(rows)
}

pub fn read_replicates_csv(path: &Path) -> Result<Vec<ReplicateRow>, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == REPLICATES_HEADER => {}
        _ => {
            return Err(RunError::Parse {
                path: path.to_path_buf(),
                message: "missing or unexpected replicates header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f = split_line(line, 20, path, i + 1)?;
        rows.push(ReplicateRow {
            n: parse(f[0], path, i + 1)?,
            p: parse(f[1], path, i + 1)?,
            k: parse(f[2], path, i + 1)?,
            replicate: parse(f[3], path, i + 1)?,
            converged: parse(f[4], path, i + 1)?,
            iterations: parse(f[5], path, i + 1)?,
            objective: parse(f[6], path, i + 1)?,
            report: ReplicateReport {
                gap: parse(f[7], path, i + 1)?,
                mspe_exact: parse(f[8], path, i + 1)?,
                mspe_hat: parse(f[9], path, i + 1)?,
                thm1_bound: parse(f[10], path, i + 1)?,
                thm2_bound: parse(f[11], path, i + 1)?,
                max_abs_u: parse(f[12], path, i + 1)?,
                max_abs_v: parse(f[13], path, i + 1)?,
                est1_lhs: parse(f[14], path, i + 1)?,
                est1_rhs: parse(f[15], path, i + 1)?,
                est3_lhs: parse(f[16], path, i + 1)?,
                est3_rhs: parse(f[17], path, i + 1)?,
                est1_holds: parse(f[18], path, i + 1)?,
                est3_holds: parse(f[19], path, i + 1)?,
            },
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Multi-p sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepModelConfig {
    pub beta_star: BetaSpec,
    pub sigma: f64,
    pub design: CovariateDesign,
    pub m: f64,
}

/// Multi-p extension of [`ExperimentConfig`]: one run per entry of `p_grid`,
/// written to `output_dir/p_<p>/`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p_grid: Vec<usize>,
    pub model: SweepModelConfig,
    pub n_grid: Vec<usize>,
    pub k_rule: KRule,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
}

impl SweepConfig {
    pub fn per_p_config(&self, p: usize) -> ExperimentConfig {
        ExperimentConfig {
            model: ModelConfig {
                p,
                beta_star: self.model.beta_star.clone(),
                sigma: self.model.sigma,
                design: self.model.design,
                m: self.model.m,
            },
            n_grid: self.n_grid.clone(),
            k_rule: self.k_rule,
            replicates: self.replicates,
            master_seed: self.master_seed,
            solver: self.solver,
            output_dir: self.output_dir.join(format!("p_{p}")),
        }
    }
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig, RunError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let config: SweepConfig = serde_json::from_str(&text).map_err(|e| RunError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if config.p_grid.is_empty() {
        return Err(RunError::Config("p_grid must be nonempty".into()));
    }
    if config.p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RunError::Config(
            "p_grid must be strictly increasing".into(),
        ));
    }
    for &p in &config.p_grid {
        config.per_p_config(p).validate()?;
    }
    Ok(config)
}

/// Runs every per-p experiment; each p gets its own substream domain so
/// sweeps never reuse the single-p streams.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<(usize, SimulationOutput)>, RunError> {
    let mut outputs = Vec::with_capacity(config.p_grid.len());
    for &p in &config.p_grid {
        let per_p = config.per_p_config(p);
        let domain = format!("sweep-p{p}");
        let out = run_simulate_with_domain(&per_p, &domain)?;
        outputs.push((p, out));
    }
    Ok(outputs)
}
