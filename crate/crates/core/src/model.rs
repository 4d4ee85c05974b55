//! The generative model: bounded mean-zero covariate designs, Gaussian noise,
//! and the exact population second-moment matrix each design induces.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Mat};
use crate::rng::fill_standard_normal;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not positive semidefinite: min eigenvalue {0}")]
    NotPsd(f64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

/// Covariate distribution for one observation row. All designs are mean-zero
/// and bounded by `M` surely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariateDesign {
    /// Independent uniforms on `[-M, M]`.
    IidUniform,
    /// Independent fair signs scaled by `M`.
    IidRademacher,
    /// `X_j = M * S * T_j` with one shared fair sign `S` per observation and
    /// independent signs `T_j` with `P(T_j = +1) = q`. Off-diagonal second
    /// moment `M^2 (2q-1)^2`.
    EquicorrelatedRademacher { q: f64 },
}

impl CovariateDesign {
    pub fn validate(&self) -> Result<(), ModelError> {
        if let CovariateDesign::EquicorrelatedRademacher { q } = self {
            if !(0.5..=1.0).contains(q) {
                return Err(ModelError::InvalidSpec(format!(
                    "equicorrelated q must lie in [0.5, 1], got {q}"
                )));
            }
        }
        Ok(())
    }

    /// Draws one observation row into `out`.
    pub fn sample_row<R: Rng>(&self, m: f64, rng: &mut R, out: &mut [f64]) {
        match self {
            CovariateDesign::IidUniform => {
                for x in out.iter_mut() {
                    *x = m * (2.0 * rng.gen::<f64>() - 1.0);
                }
            }
            CovariateDesign::IidRademacher => {
                for x in out.iter_mut() {
                    *x = if rng.gen::<bool>() { m } else { -m };
                }
            }
            CovariateDesign::EquicorrelatedRademacher { q } => {
                let shared: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                for x in out.iter_mut() {
                    let t = if rng.gen::<f64>() < *q { 1.0 } else { -1.0 };
                    *x = m * shared * t;
                }
            }
        }
    }
}

/// Ground-truth generative model: true coefficients, noise level, covariate
/// design, and the almost-sure covariate bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub p: usize,
    pub beta_star: Vec<f64>,
    pub sigma: f64,
    pub design: CovariateDesign,
    pub m: f64,
}

impl ModelSpec {
    pub fn new(
        beta_star: Vec<f64>,
        sigma: f64,
        design: CovariateDesign,
        m: f64,
    ) -> Result<Self, ModelError> {
        let p = beta_star.len();
        if p == 0 {
            return Err(ModelError::InvalidSpec("p must be at least 1".into()));
        }
        if beta_star.iter().any(|b| !b.is_finite()) {
            return Err(ModelError::InvalidSpec(
                "beta_star entries must be finite".into(),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(ModelError::InvalidSpec(format!(
                "sigma must be a nonnegative real, got {sigma}"
            )));
        }
        if !m.is_finite() || m <= 0.0 {
            return Err(ModelError::InvalidSpec(format!(
                "covariate bound M must be positive, got {m}"
            )));
        }
        design.validate()?;
        Ok(ModelSpec {
            p,
            beta_star,
            sigma,
            design,
            m,
        })
    }

    pub fn beta_star_l1(&self) -> f64 {
        linalg::l1_norm(&self.beta_star)
    }
}

/// One replicate: design matrix, responses, and the retained noise draws
/// (needed to trace the per-replicate proof quantities).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub x: Mat,
    pub y: Vec<f64>,
    pub epsilon: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(x: Mat, y: Vec<f64>, epsilon: Option<Vec<f64>>) -> Result<Self, ModelError> {
        let n = x.rows();
        if y.len() != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if let Some(eps) = &epsilon {
            if eps.len() != n {
                return Err(ModelError::DimensionMismatch {
                    expected: n,
                    got: eps.len(),
                });
            }
        }
        Ok(Dataset { n, x, y, epsilon })
    }
}

/// Exact population second-moment matrix `E(X_j X_k)`. For the mean-zero
/// designs used here this coincides with the covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentMatrix {
    mat: Mat,
}

impl SecondMomentMatrix {
    /// Validates symmetry and numerical positive semidefiniteness
    /// (eigenvalues ≥ -1e-12 relative to the matrix scale).
    pub fn new(mat: Mat) -> Result<Self, ModelError> {
        if !mat.is_symmetric(1e-12 * (1.0 + mat.max_abs_entry())) {
            return Err(ModelError::NotSymmetric);
        }
        let eigs = linalg::symmetric_eigenvalues(&mat);
        let slack = 1e-12 * (1.0 + mat.max_abs_entry());
        if let Some(&min) = eigs.first() {
            if min < -slack {
                return Err(ModelError::NotPsd(min));
            }
        }
        Ok(SecondMomentMatrix { mat })
    }

    pub fn matrix(&self) -> &Mat {
        &self.mat
    }

    pub fn p(&self) -> usize {
        self.mat.rows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::symmetric_eigenvalues(&self.mat)[0]
    }
}

/// Draws one replicate: `n` i.i.d. covariate rows, Gaussian noise, and the
/// responses `y_i = β*·x_i + ε_i`.
///
/// The stream is consumed in a fixed order (all covariate rows, then the
/// noise vector), so identical `(spec, n, stream)` give bit-identical data.
pub fn sample_dataset<R: Rng>(
    spec: &ModelSpec,
    n: usize,
    rng: &mut R,
) -> Result<Dataset, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptySample);
    }
    // constructor re-checks, but sampling with a stale hand-built spec should
    // fail loudly too
    if spec.beta_star.iter().any(|b| !b.is_finite()) {
        return Err(ModelError::InvalidSpec(
            "beta_star entries must be finite".into(),
        ));
    }
    let p = spec.p;
    let mut x = Mat::zeros(n, p);
    for i in 0..n {
        spec.design.sample_row(spec.m, rng, x.row_mut(i));
    }
    let mut epsilon = vec![0.0; n];
    fill_standard_normal(rng, &mut epsilon);
    for e in epsilon.iter_mut() {
        *e *= spec.sigma;
    }
    let y: Vec<f64> = (0..n)
        .map(|i| linalg::dot(x.row(i), &spec.beta_star) + epsilon[i])
        .collect();
    Dataset::new(x, y, Some(epsilon))
}

/// Exact closed-form `E(X_j X_k)` for the given design.
pub fn second_moment(spec: &ModelSpec) -> SecondMomentMatrix {
    let p = spec.p;
    let m2 = spec.m * spec.m;
    let mut mat = Mat::zeros(p, p);
    match spec.design {
        CovariateDesign::IidUniform => {
            for j in 0..p {
                mat.set(j, j, m2 / 3.0);
            }
        }
        CovariateDesign::IidRademacher => {
            for j in 0..p {
                mat.set(j, j, m2);
            }
        }
        CovariateDesign::EquicorrelatedRademacher { q } => {
            let off = m2 * (2.0 * q - 1.0) * (2.0 * q - 1.0);
            for j in 0..p {
                for k in 0..p {
                    mat.set(j, k, if j == k { m2 } else { off });
                }
            }
        }
    }
    SecondMomentMatrix::new(mat).expect("closed-form second moment is PSD")
}

/// Oracle predictions `Ŷ_i = Σ_j β*_j X_{i,j}` for each row of `x`.
pub fn oracle_predictions(spec: &ModelSpec, x: &Mat) -> Result<Vec<f64>, ModelError> {
    if x.cols() != spec.p {
        return Err(ModelError::DimensionMismatch {
            expected: spec.p,
            got: x.cols(),
        });
    }
    Ok(x.matvec(&spec.beta_star))
}
