//! Error measures and per-replicate proof traces: the Σ-norm prediction
//! error, its in-sample estimate, the two theorem bounds, and the
//! deterministic inequalities the bound proofs rest on.

use thiserror::Error;

use crate::linalg::{self, Mat};
use crate::model::{oracle_predictions, second_moment, Dataset, ModelSpec, SecondMomentMatrix};
use crate::solver::LassoSolution;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dataset does not retain the noise vector")]
    MissingNoise,
    #[error("quadratic form came out negative beyond slack: {0}")]
    NegativeQuadraticForm(f64),
    #[error("lambda_min must be positive, got {0}")]
    NonPositiveLambdaMin(f64),
    #[error("sum condition violated: ||beta*||_1 = {l1} exceeds K = {k}")]
    SumCondViolated { l1: f64, k: f64 },
    #[error("infeasible solution: ||beta||_1 = {l1} exceeds K = {k}")]
    InfeasibleSolution { l1: f64, k: f64 },
}

/// Per-replicate metrics, bounds, and proof-trace verdicts.
///
/// `est1` is `‖Ŷ − Ỹᴷ‖² ≤ 2K·max_j|U_j|` (up to the solver's gap/2 slack) and
/// `est3` is `‖β*−β̃ᴷ‖²_Σ − (1/n)‖Ŷ−Ỹᴷ‖² ≤ 4K²·max_{j,k}|V_{j,k}|`; both hold
/// surely, not just with high probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateReport {
    pub mspe_exact: f64,
    pub mspe_hat: f64,
    pub thm1_bound: f64,
    pub thm2_bound: f64,
    pub max_abs_u: f64,
    pub max_abs_v: f64,
    pub est1_lhs: f64,
    pub est1_rhs: f64,
    pub est3_lhs: f64,
    pub est3_rhs: f64,
    pub gap: f64,
    pub est1_holds: bool,
    pub est3_holds: bool,
}

/// `(β*−β̃)·Σ(β*−β̃)`: the exact conditional mean squared prediction error of
/// this replicate's estimate under the population second-moment matrix.
pub fn mspe_sigma_norm(
    beta_tilde: &[f64],
    beta_star: &[f64],
    sigma_mat: &SecondMomentMatrix,
) -> Result<f64, MetricsError> {
    let p = sigma_mat.p();
    if beta_tilde.len() != p {
        return Err(MetricsError::DimensionMismatch {
            expected: p,
            got: beta_tilde.len(),
        });
    }
    if beta_star.len() != p {
        return Err(MetricsError::DimensionMismatch {
            expected: p,
            got: beta_star.len(),
        });
    }
    let diff: Vec<f64> = beta_star
        .iter()
        .zip(beta_tilde)
        .map(|(s, t)| s - t)
        .collect();
    let q = linalg::quad_form(sigma_mat.matrix(), &diff);
    // Σ is PSD by construction; tolerate rounding at the scale of the inputs
    let slack = 1e-8 * (1.0 + linalg::norm_sq(&diff)) * (1.0 + sigma_mat.matrix().max_abs_entry());
    if q < -slack {
        return Err(MetricsError::NegativeQuadraticForm(q));
    }
    Ok(q.max(0.0))
}

/// `(1/n)‖X(β*−β̃)‖²`: the in-sample (estimated) mean squared prediction
/// error, i.e. the Σ̂-norm with the empirical second-moment matrix.
pub fn estimated_mspe(
    dataset: &Dataset,
    beta_tilde: &[f64],
    beta_star: &[f64],
) -> Result<f64, MetricsError> {
    let p = dataset.x.cols();
    if beta_tilde.len() != p || beta_star.len() != p {
        return Err(MetricsError::DimensionMismatch {
            expected: p,
            got: beta_tilde.len().max(beta_star.len()),
        });
    }
    let diff: Vec<f64> = beta_star
        .iter()
        .zip(beta_tilde)
        .map(|(s, t)| s - t)
        .collect();
    let xd = dataset.x.matvec(&diff);
    Ok(linalg::norm_sq(&xd) / dataset.n as f64)
}

/// Prediction-error bound `KMσ√(2·log(2p)/n) + 8K²M²√(2·log(2p²)/n)`.
pub fn theorem1_bound(k: f64, m: f64, sigma: f64, p: usize, n: usize) -> f64 {
    theorem2_bound(k, m, sigma, p, n) + cross_moment_term(k, m, p, n)
}

/// Estimated-prediction-error bound `KMσ√(2·log(2p)/n)`.
pub fn theorem2_bound(k: f64, m: f64, sigma: f64, p: usize, n: usize) -> f64 {
    assert!(p >= 1 && n >= 1, "p and n must be positive");
    k * m * sigma * (2.0 * (2.0 * p as f64).ln() / n as f64).sqrt()
}

/// The second theorem-1 term, `8K²M²√(2·log(2p²)/n)`; kept separate so the
/// difference of the two bounds is exact.
pub fn cross_moment_term(k: f64, m: f64, p: usize, n: usize) -> f64 {
    assert!(p >= 1 && n >= 1, "p and n must be positive");
    let pf = p as f64;
    8.0 * k * k * m * m * (2.0 * (2.0 * pf * pf).ln() / n as f64).sqrt()
}

/// ℓ2-error bound `mspe / λ_min` from a positive lower bound on the smallest
/// eigenvalue of Σ.
pub fn l2_error_bound(mspe: f64, lambda_min: f64) -> Result<f64, MetricsError> {
    if lambda_min.is_nan() || lambda_min <= 0.0 {
        return Err(MetricsError::NonPositiveLambdaMin(lambda_min));
    }
    Ok(mspe / lambda_min)
}

/// `U_j = Σ_i ε_i X_{i,j}` for each column.
pub fn compute_u(dataset: &Dataset) -> Result<Vec<f64>, MetricsError> {
    let eps = dataset.epsilon.as_ref().ok_or(MetricsError::MissingNoise)?;
    Ok(dataset.x.tr_matvec(eps))
}

/// `V_{j,k} = E(X_j X_k) − (1/n)Σ_i X_{i,j}X_{i,k}`: population minus
/// empirical second moments.
pub fn compute_v(dataset: &Dataset, sigma_mat: &SecondMomentMatrix) -> Result<Mat, MetricsError> {
    let p = dataset.x.cols();
    if sigma_mat.p() != p {
        return Err(MetricsError::DimensionMismatch {
            expected: p,
            got: sigma_mat.p(),
        });
    }
    let gram = dataset.x.gram();
    let n = dataset.n as f64;
    let mut v = Mat::zeros(p, p);
    for j in 0..p {
        for k in 0..p {
            v.set(j, k, sigma_mat.matrix().get(j, k) - gram.get(j, k) / n);
        }
    }
    Ok(v)
}

/// Fills a [`ReplicateReport`] for one solved replicate, checking the two
/// deterministic proof inequalities with their documented slacks.
///
/// Requires the sum condition `‖β*‖₁ ≤ K` (otherwise the oracle predictor is
/// outside the feasible fitted-value set and the argument does not apply);
/// a violation is reported as an error, never silently accepted.
pub fn trace_proof(
    dataset: &Dataset,
    solution: &LassoSolution,
    spec: &ModelSpec,
    k: f64,
) -> Result<ReplicateReport, MetricsError> {
    let l1_star = spec.beta_star_l1();
    if l1_star > k * (1.0 + 1e-12) {
        return Err(MetricsError::SumCondViolated { l1: l1_star, k });
    }
    let l1_tilde = linalg::l1_norm(&solution.beta);
    if l1_tilde > k * (1.0 + 1e-9) {
        return Err(MetricsError::InfeasibleSolution { l1: l1_tilde, k });
    }

    let n = dataset.n;
    let y_hat =
        oracle_predictions(spec, &dataset.x).map_err(|_| MetricsError::DimensionMismatch {
            expected: spec.p,
            got: dataset.x.cols(),
        })?;
    let y_tilde = dataset.x.matvec(&solution.beta);
    let est1_lhs: f64 = y_hat
        .iter()
        .zip(&y_tilde)
        .map(|(h, t)| (h - t) * (h - t))
        .sum();

    let u = compute_u(dataset)?;
    let max_abs_u = linalg::linf_norm(&u);
    let est1_rhs = 2.0 * k * max_abs_u;

    let sigma_mat = second_moment(spec);
    let mspe_exact = mspe_sigma_norm(&solution.beta, &spec.beta_star, &sigma_mat)?;
    let mspe_hat = estimated_mspe(dataset, &solution.beta, &spec.beta_star)?;

    let v = compute_v(dataset, &sigma_mat)?;
    let max_abs_v = v.max_abs_entry();
    let est3_lhs = mspe_exact - est1_lhs / n as f64;
    let est3_rhs = 4.0 * k * k * max_abs_v;

    let scale = 1.0 + est1_rhs + est3_rhs.abs();
    let est1_holds = est1_lhs <= est1_rhs + solution.gap / 2.0 + 1e-8 * scale;
    let est3_holds = est3_lhs <= est3_rhs + 1e-8 * scale;

    Ok(ReplicateReport {
        mspe_exact,
        mspe_hat,
        thm1_bound: theorem1_bound(k, spec.m, spec.sigma, spec.p, n),
        thm2_bound: theorem2_bound(k, spec.m, spec.sigma, spec.p, n),
        max_abs_u,
        max_abs_v,
        est1_lhs,
        est1_rhs,
        est3_lhs,
        est3_rhs,
        gap: solution.gap,
        est1_holds,
        est3_holds,
    })
}
