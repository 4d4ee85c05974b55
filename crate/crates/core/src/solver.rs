//! ℓ1-constrained least squares: minimize ‖y − Xβ‖² over ‖β‖₁ ≤ K, with a
//! computable optimality certificate.
//!
//! Two deterministic algorithms are provided and cross-checked in tests:
//! projected gradient with a fixed 1/L step, and Frank-Wolfe over the ball's
//! vertex set with away steps and exact line search. Both terminate on the
//! same certificate, the Frank-Wolfe gap
//! `g(β) = ∇f(β)·β + K·‖∇f(β)‖∞`, which bounds `f(β) − min f` by convexity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Mat};

/// Relative slack allowed on the ℓ1 feasibility check.
pub const FEASIBILITY_SLACK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("infeasible point: ||beta||_1 = {l1} exceeds K = {k}")]
    Infeasible { l1: f64, k: f64 },
    #[error(
        "no convergence: gap {gap:e} above tolerance {tolerance:e} after {iterations} iterations"
    )]
    NonConvergence {
        solution: LassoSolution,
        gap: f64,
        tolerance: f64,
        iterations: usize,
    },
}

/// The constrained least-squares instance.
#[derive(Debug, Clone)]
pub struct LassoProblem<'a> {
    x: &'a Mat,
    y: &'a [f64],
    k: f64,
}

impl<'a> LassoProblem<'a> {
    pub fn new(x: &'a Mat, y: &'a [f64], k: f64) -> Result<Self, SolverError> {
        if y.len() != x.rows() {
            return Err(SolverError::DimensionMismatch {
                expected: x.rows(),
                got: y.len(),
            });
        }
        if !k.is_finite() || k < 0.0 {
            return Err(SolverError::InvalidProblem(format!(
                "l1 budget K must be a nonnegative real, got {k}"
            )));
        }
        if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidProblem(
                "design matrix and responses must be finite".into(),
            ));
        }
        Ok(LassoProblem { x, y, k })
    }

    pub fn x(&self) -> &Mat {
        self.x
    }

    pub fn y(&self) -> &[f64] {
        self.y
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Scale-aware default termination gap: 1e-8 · (1 + ‖y‖²).
    pub fn default_gap_tolerance(&self) -> f64 {
        1e-8 * (1.0 + linalg::norm_sq(self.y))
    }

    /// ‖y − Xβ‖², evaluated from the residual.
    pub fn objective(&self, beta: &[f64]) -> f64 {
        let fitted = self.x.matvec(beta);
        self.y
            .iter()
            .zip(&fitted)
            .map(|(yi, fi)| (yi - fi) * (yi - fi))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ProjectedGradient,
    FrankWolfe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Absolute Frank-Wolfe gap required at termination; `None` resolves to
    /// the scale-aware default 1e-8 · (1 + ‖y‖²).
    pub gap_tolerance: Option<f64>,
    pub max_iterations: usize,
    pub algorithm: Algorithm,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            gap_tolerance: None,
            max_iterations: 50_000,
            algorithm: Algorithm::ProjectedGradient,
        }
    }
}

/// A certified solution: feasible `beta`, its freshly recomputed objective,
/// and the Frank-Wolfe gap at `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoSolution {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Euclidean projection onto `{β : ‖β‖₁ ≤ K}` by sort-and-threshold,
/// O(p log p).
pub fn project_l1_ball(v: &[f64], k: f64) -> Vec<f64> {
    assert!(k.is_finite() && k >= 0.0, "K must be a nonnegative real");
    assert!(v.iter().all(|x| x.is_finite()), "input must be finite");
    if k == 0.0 {
        return vec![0.0; v.len()];
    }
    if linalg::l1_norm(v) <= k {
        return v.to_vec();
    }
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - k) / ((i + 1) as f64);
        if ui > t {
            theta = t;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// Frank-Wolfe gap `g(β) = ∇f(β)·β + K‖∇f(β)‖∞` at a feasible `beta`,
/// computed from the residual. Nonnegative, and `f(β) − min f ≤ g(β)`.
pub fn frank_wolfe_gap(problem: &LassoProblem, beta: &[f64]) -> Result<f64, SolverError> {
    if beta.len() != problem.p() {
        return Err(SolverError::DimensionMismatch {
            expected: problem.p(),
            got: beta.len(),
        });
    }
    let l1 = linalg::l1_norm(beta);
    if l1 > problem.k * (1.0 + FEASIBILITY_SLACK) {
        return Err(SolverError::Infeasible { l1, k: problem.k });
    }
    let fitted = problem.x.matvec(beta);
    let residual: Vec<f64> = problem.y.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let mut grad = problem.x.tr_matvec(&residual);
    for g in grad.iter_mut() {
        *g *= -2.0;
    }
    let g = linalg::dot(&grad, beta) + problem.k * linalg::linf_norm(&grad);
    Ok(g.max(0.0))
}

/// Fitted values `X·beta`.
pub fn fitted_values(problem: &LassoProblem, beta: &[f64]) -> Result<Vec<f64>, SolverError> {
    if beta.len() != problem.p() {
        return Err(SolverError::DimensionMismatch {
            expected: problem.p(),
            got: beta.len(),
        });
    }
    Ok(problem.x.matvec(beta))
}

/// Solves the constrained problem with the configured algorithm.
///
/// Deterministic given `(problem, opts)`: zero initialization and fixed step
/// rules, so the returned minimizer is a function of the inputs. Returns
/// `NonConvergence` carrying the best iterate if the gap tolerance is not
/// reached within `max_iterations`.
pub fn solve(problem: &LassoProblem, opts: &SolverOptions) -> Result<LassoSolution, SolverError> {
    let tol = match opts.gap_tolerance {
        Some(t) => {
            if t.is_nan() || t <= 0.0 {
                return Err(SolverError::InvalidProblem(format!(
                    "gap tolerance must be positive, got {t}"
                )));
            }
            t
        }
        None => problem.default_gap_tolerance(),
    };
    if opts.max_iterations == 0 {
        return Err(SolverError::InvalidProblem(
            "max_iterations must be at least 1".into(),
        ));
    }

    let p = problem.p();
    if problem.k == 0.0 {
        // singleton feasible set
        return Ok(LassoSolution {
            beta: vec![0.0; p],
            objective: linalg::norm_sq(problem.y),
            gap: 0.0,
            iterations: 0,
        });
    }

    // Work in coefficient space: with A = XᵀX and b = Xᵀy, the gradient is
    // 2(Aβ − b), so each iteration costs O(p²) regardless of n.
    let a = problem.x.gram();
    let b = problem.x.tr_matvec(problem.y);

    let (beta, iterations) = match opts.algorithm {
        Algorithm::ProjectedGradient => {
            projected_gradient(problem, &a, &b, tol, opts.max_iterations)
        }
        Algorithm::FrankWolfe => frank_wolfe(problem, &a, &b, tol, opts.max_iterations),
    };

    let objective = problem.objective(&beta);
    let gap = frank_wolfe_gap(problem, &beta)?;
    let solution = LassoSolution {
        beta,
        objective,
        gap,
        iterations,
    };
    if gap <= tol {
        Ok(solution)
    } else {
        Err(SolverError::NonConvergence {
            gap,
            tolerance: tol,
            iterations,
            solution,
        })
    }
}

fn gradient(a: &Mat, b: &[f64], beta: &[f64]) -> Vec<f64> {
    let mut g = a.matvec(beta);
    for (gi, bi) in g.iter_mut().zip(b) {
        *gi = 2.0 * (*gi - bi);
    }
    g
}

fn gap_from_gradient(grad: &[f64], beta: &[f64], k: f64) -> f64 {
    (linalg::dot(grad, beta) + k * linalg::linf_norm(grad)).max(0.0)
}

fn projected_gradient(
    problem: &LassoProblem,
    a: &Mat,
    b: &[f64],
    tol: f64,
    max_iterations: usize,
) -> (Vec<f64>, usize) {
    let p = problem.p();
    let k = problem.k;
    // L = 2·λmax(XᵀX), upper-bounded here by the tighter of the ∞-norm and
    // the trace (both dominate λmax for a symmetric PSD matrix).
    let l = 2.0 * a.max_abs_row_sum().min(a.trace());
    let mut beta = vec![0.0; p];
    if l <= 0.0 {
        // X is the zero matrix; every feasible point is optimal
        return (beta, 0);
    }
    let step = 1.0 / l;
    for t in 0..max_iterations {
        let grad = gradient(a, b, &beta);
        if gap_from_gradient(&grad, &beta, k) <= tol {
            // confirm with the residual-based certificate before stopping
            if frank_wolfe_gap(problem, &beta)
                .map(|g| g <= tol)
                .unwrap_or(false)
            {
                return (beta, t);
            }
        }
        let shifted: Vec<f64> = beta
            .iter()
            .zip(&grad)
            .map(|(bi, gi)| bi - step * gi)
            .collect();
        beta = project_l1_ball(&shifted, k);
    }
    (beta, max_iterations)
}

/// Frank-Wolfe with away steps over the vertex set {±K·e_j} and exact line
/// search on the quadratic. The iterate is maintained as an explicit convex
/// combination of vertices, so feasibility is structural: β_j = K(w⁺_j − w⁻_j)
/// with w ≥ 0 summing to one. Away steps give linear convergence on
/// quadratics, which plain Frank-Wolfe cannot deliver at the gap tolerances
/// used here.
fn frank_wolfe(
    problem: &LassoProblem,
    a: &Mat,
    b: &[f64],
    tol: f64,
    max_iterations: usize,
) -> (Vec<f64>, usize) {
    let p = problem.p();
    let k = problem.k;
    // zero vector as the balanced pair ±K·e_0
    let mut w_plus = vec![0.0; p];
    let mut w_minus = vec![0.0; p];
    w_plus[0] = 0.5;
    w_minus[0] = 0.5;
    let beta_from_weights = |wp: &[f64], wm: &[f64]| -> Vec<f64> {
        wp.iter().zip(wm).map(|(a, b)| k * (a - b)).collect()
    };
    let mut beta = beta_from_weights(&w_plus, &w_minus);

    for t in 0..max_iterations {
        let grad = gradient(a, b, &beta);
        let grad_dot_beta = linalg::dot(&grad, &beta);

        // Frank-Wolfe vertex: the coordinate with the largest |gradient|,
        // entered with the sign that descends. Ties break to the lowest index.
        let mut j_fw = 0;
        let mut best = -1.0;
        for (j, g) in grad.iter().enumerate() {
            if g.abs() > best {
                best = g.abs();
                j_fw = j;
            }
        }
        let sign_fw = if grad[j_fw] > 0.0 { -1.0 } else { 1.0 };
        let gap = (grad_dot_beta + k * best).max(0.0);
        if gap <= tol
            && frank_wolfe_gap(problem, &beta)
                .map(|g| g <= tol)
                .unwrap_or(false)
        {
            return (beta, t);
        }

        // Away vertex: the active vertex the gradient most wants to leave.
        let mut j_away = 0;
        let mut sign_away = 0.0;
        let mut away_score = f64::NEG_INFINITY;
        for j in 0..p {
            if w_plus[j] > 0.0 {
                let score = k * grad[j];
                if score > away_score {
                    away_score = score;
                    j_away = j;
                    sign_away = 1.0;
                }
            }
            if w_minus[j] > 0.0 {
                let score = -k * grad[j];
                if score > away_score {
                    away_score = score;
                    j_away = j;
                    sign_away = -1.0;
                }
            }
        }
        let away_gap = away_score - grad_dot_beta;

        // direction d and the curvature dᵀAd, reusing Aβ = grad/2 + b
        let a_beta: Vec<f64> = grad.iter().zip(b).map(|(g, bi)| 0.5 * g + bi).collect();
        let take_fw = gap >= away_gap || sign_away == 0.0;
        let (d, gamma_max): (Vec<f64>, f64) = if take_fw {
            let mut d: Vec<f64> = beta.iter().map(|x| -x).collect();
            d[j_fw] += k * sign_fw;
            (d, 1.0)
        } else {
            let weight = if sign_away > 0.0 {
                w_plus[j_away]
            } else {
                w_minus[j_away]
            };
            if weight >= 1.0 {
                // the iterate *is* the away vertex; nothing to move away from
                return (beta, t);
            }
            let mut d = beta.clone();
            d[j_away] -= k * sign_away;
            (d, weight / (1.0 - weight))
        };

        let slope = linalg::dot(&grad, &d);
        if slope >= 0.0 {
            // no descent available along the selected direction
            return (beta, t);
        }
        let a_col = |j: usize| -> Vec<f64> { (0..p).map(|i| a.get(i, j)).collect() };
        let a_d: Vec<f64> = if take_fw {
            let col = a_col(j_fw);
            col.iter()
                .zip(&a_beta)
                .map(|(c, ab)| k * sign_fw * c - ab)
                .collect()
        } else {
            let col = a_col(j_away);
            a_beta
                .iter()
                .zip(&col)
                .map(|(ab, c)| ab - k * sign_away * c)
                .collect()
        };
        let curvature = 2.0 * linalg::dot(&d, &a_d);
        let gamma = if curvature > 0.0 {
            (-slope / curvature).min(gamma_max)
        } else {
            gamma_max
        };
        if !gamma.is_finite() || gamma <= 0.0 {
            return (beta, t);
        }

        if take_fw {
            for w in w_plus.iter_mut().chain(w_minus.iter_mut()) {
                *w *= 1.0 - gamma;
            }
            if sign_fw > 0.0 {
                w_plus[j_fw] += gamma;
            } else {
                w_minus[j_fw] += gamma;
            }
        } else {
            for w in w_plus.iter_mut().chain(w_minus.iter_mut()) {
                *w *= 1.0 + gamma;
            }
            let w = if sign_away > 0.0 {
                &mut w_plus[j_away]
            } else {
                &mut w_minus[j_away]
            };
            *w -= gamma;
            if *w < 1e-15 {
                *w = 0.0; // drop step
            }
        }
        // keep the convex-combination structure exact
        let total: f64 = w_plus.iter().chain(w_minus.iter()).sum();
        if (total - 1.0).abs() > 1e-15 && total > 0.0 {
            for w in w_plus.iter_mut().chain(w_minus.iter_mut()) {
                *w /= total;
            }
        }
        beta = beta_from_weights(&w_plus, &w_minus);
    }
    (beta, max_iterations)
}
