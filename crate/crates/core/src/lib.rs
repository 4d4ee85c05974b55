//! ℓ1-constrained least squares with a Monte Carlo harness for its
//! finite-sample prediction-error bounds.
//!
//! The crate generates data from a bounded-covariate linear model with known
//! ground truth, solves the constrained Lasso with a certified optimality
//! gap, computes exact and estimated prediction errors against closed-form
//! bounds, traces the deterministic inequalities those bounds rest on, and
//! verifies the underlying concentration lemmas empirically. The `lasso-mc`
//! binary drives seeded, reproducible experiment sweeps and emits CSV,
//! gnuplot, and SVG outputs.

pub mod concentration;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod rng;
pub mod solver;

pub use linalg::Mat;
pub use model::{CovariateDesign, Dataset, ModelSpec, SecondMomentMatrix};
pub use solver::{Algorithm, LassoProblem, LassoSolution, SolverOptions};
