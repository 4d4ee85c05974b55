//! Concentration bounds and their Monte Carlo verifiers: the maximal
//! inequality for (sub-)Gaussian families, the moment-generating-function
//! form of Hoeffding's inequality, and the derived bounds on the
//! proof-trace quantities max|U_j| and max|V_{j,k}|.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConcentrationError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("mgf check would overflow: |beta|·m·L = {0:e} is too large for f64 exponentials")]
    Overflow(f64),
}

/// Outcome of one Monte Carlo verification of an expectation bound.
/// `passes` is exactly `empirical_value ≤ bound_value + 3·std_error`; the
/// lemmas claim one-sided bounds only, so no lower check is attempted.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaVerdict {
    pub empirical_value: f64,
    pub bound_value: f64,
    pub std_error: f64,
    pub passes: bool,
    pub replicates: usize,
}

impl LemmaVerdict {
    fn from_samples(mean: f64, sd: f64, reps: usize, bound: f64) -> Self {
        let std_error = sd / (reps as f64).sqrt();
        LemmaVerdict {
            empirical_value: mean,
            bound_value: bound,
            std_error,
            passes: mean <= bound + 3.0 * std_error,
            replicates: reps,
        }
    }
}

/// Bounded mean-zero test distribution for the sub-Gaussian and Hoeffding
/// verifiers. Both satisfy `E(e^{βξ}) ≤ e^{β²L²/2}` with constant `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedDist {
    /// Uniform on `[-L, L]`.
    Uniform,
    /// `±L` with probability ½ each.
    Rademacher,
}

impl BoundedDist {
    fn draw<R: Rng>(&self, l: f64, rng: &mut R) -> f64 {
        match self {
            BoundedDist::Uniform => l * (2.0 * rng.gen::<f64>() - 1.0),
            BoundedDist::Rademacher => {
                if rng.gen::<bool>() {
                    l
                } else {
                    -l
                }
            }
        }
    }
}

/// The maximal-inequality bound `L·√(2·log(2m))`, shared by the Gaussian and
/// sub-Gaussian cases.
pub fn max_bound(l: f64, m: usize) -> f64 {
    assert!(m >= 1, "m must be positive");
    assert!(l.is_finite() && l >= 0.0, "L must be a nonnegative real");
    l * (2.0 * (2.0 * m as f64).ln()).sqrt()
}

/// Shared-factor correlation used when a verifier exercises the dependence
/// allowance: `ξ_i = σ_i(ρZ₀ + √(1−ρ²)Z_i)` with ρ = 0.7.
pub const SHARED_FACTOR_RHO: f64 = 0.7;

/// Monte Carlo check of `E(max_i |ξ_i|) ≤ (max_i σ_i)·√(2·log(2m))` for
/// jointly Gaussian ξ, either independent or with a shared factor — the
/// bound needs no independence.
pub fn verify_gauss_max<R: Rng>(
    m: usize,
    sigmas: &[f64],
    correlated: bool,
    reps: usize,
    rng: &mut R,
) -> Result<LemmaVerdict, ConcentrationError> {
    if m == 0 || sigmas.len() != m {
        return Err(ConcentrationError::Degenerate(format!(
            "need m >= 1 sigmas, got m = {m} with {} entries",
            sigmas.len()
        )));
    }
    if sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(ConcentrationError::Degenerate(
            "sigmas must be nonnegative reals".into(),
        ));
    }
    if reps < 100 {
        return Err(ConcentrationError::Degenerate(format!(
            "need at least 100 replicates, got {reps}"
        )));
    }
    let l = sigmas.iter().cloned().fold(0.0, f64::max);
    let rho = SHARED_FACTOR_RHO;
    let tail = (1.0 - rho * rho).sqrt();
    let mut acc = MeanVar::new();
    for _ in 0..reps {
        let shared = if correlated {
            crate::rng::standard_normal(rng)
        } else {
            0.0
        };
        let mut max_abs = 0.0f64;
        for &sigma in sigmas {
            let z = crate::rng::standard_normal(rng);
            let xi = if correlated {
                sigma * (rho * shared + tail * z)
            } else {
                sigma * z
            };
            max_abs = max_abs.max(xi.abs());
        }
        acc.push(max_abs);
    }
    Ok(LemmaVerdict::from_samples(
        acc.mean(),
        acc.sd(),
        reps,
        max_bound(l, m),
    ))
}

/// Monte Carlo check of the same bound for bounded mean-zero variables,
/// which satisfy the sub-Gaussian mgf hypothesis with constant `L`.
pub fn verify_subgauss_max<R: Rng>(
    m: usize,
    l: f64,
    dist: BoundedDist,
    reps: usize,
    rng: &mut R,
) -> Result<LemmaVerdict, ConcentrationError> {
    if m == 0 {
        return Err(ConcentrationError::Degenerate("m must be positive".into()));
    }
    if !l.is_finite() || l < 0.0 {
        return Err(ConcentrationError::Degenerate(
            "L must be a nonnegative real".into(),
        ));
    }
    if reps < 100 {
        return Err(ConcentrationError::Degenerate(format!(
            "need at least 100 replicates, got {reps}"
        )));
    }
    let mut acc = MeanVar::new();
    for _ in 0..reps {
        let mut max_abs = 0.0f64;
        for _ in 0..m {
            max_abs = max_abs.max(dist.draw(l, rng).abs());
        }
        acc.push(max_abs);
    }
    Ok(LemmaVerdict::from_samples(
        acc.mean(),
        acc.sd(),
        reps,
        max_bound(l, m),
    ))
}

/// Exact mgf of a Rademacher variable scaled by `L`: `cosh(βL)`. The
/// Hoeffding proof passes through this value before bounding it by
/// `e^{β²L²/2}`.
pub fn rademacher_exact_mgf(beta: f64, l: f64) -> f64 {
    (beta * l).cosh()
}

/// Monte Carlo check of `E(e^{β·Ση_i}) ≤ e^{β²mL²/2}` for independent
/// mean-zero η bounded by `L`.
pub fn hoeffding_mgf_check<R: Rng>(
    m: usize,
    l: f64,
    beta: f64,
    dist: BoundedDist,
    reps: usize,
    rng: &mut R,
) -> Result<LemmaVerdict, ConcentrationError> {
    if m == 0 {
        return Err(ConcentrationError::Degenerate("m must be positive".into()));
    }
    if !l.is_finite() || l < 0.0 || !beta.is_finite() {
        return Err(ConcentrationError::Degenerate(
            "L must be a nonnegative real and beta finite".into(),
        ));
    }
    if reps < 100 {
        return Err(ConcentrationError::Degenerate(format!(
            "need at least 100 replicates, got {reps}"
        )));
    }
    // e^x overflows near x = 709; both the samples (|β·Ση| ≤ |β|mL) and the
    // bound exponent must stay clear of it
    let max_exponent = (beta.abs() * m as f64 * l).max(beta * beta * m as f64 * l * l / 2.0);
    if max_exponent > 700.0 {
        return Err(ConcentrationError::Overflow(max_exponent));
    }
    let mut acc = MeanVar::new();
    for _ in 0..reps {
        let mut sum = 0.0;
        for _ in 0..m {
            sum += dist.draw(l, rng);
        }
        acc.push((beta * sum).exp());
    }
    let bound = (beta * beta * m as f64 * l * l / 2.0).exp();
    Ok(LemmaVerdict::from_samples(
        acc.mean(),
        acc.sd(),
        reps,
        bound,
    ))
}

/// `Mσ√(2n·log(2p))`: bound on `E(max_j |U_j|)`.
pub fn u_max_bound(m: f64, sigma: f64, p: usize, n: usize) -> f64 {
    assert!(p >= 1 && n >= 1, "p and n must be positive");
    m * sigma * (2.0 * n as f64 * (2.0 * p as f64).ln()).sqrt()
}

/// `2M²√(2·log(2p²)/n)`: bound on `E(max_{j,k} |V_{j,k}|)`.
pub fn v_max_bound(m: f64, p: usize, n: usize) -> f64 {
    assert!(p >= 1 && n >= 1, "p and n must be positive");
    let pf = p as f64;
    2.0 * m * m * (2.0 * (2.0 * pf * pf).ln() / n as f64).sqrt()
}

/// Streaming mean and variance (Welford).
struct MeanVar {
    n: usize,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    fn new() -> Self {
        MeanVar {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn sd(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn max_bound_reference_values() {
        assert_eq!(max_bound(0.0, 5), 0.0);
        assert!((max_bound(1.0, 1) - (2.0 * std::f64::consts::LN_2).sqrt()).abs() < 1e-12);
        assert!((max_bound(1.0, 1) - 1.1774).abs() < 1e-4);
        assert!((max_bound(1.0, 2) - 1.6651).abs() < 1e-4);
    }

    #[test]
    fn max_bound_monotone_in_both_arguments() {
        let ls = [0.0, 0.5, 1.0, 2.0, 5.0];
        let ms = [1usize, 2, 10, 100, 1000];
        for w in ls.windows(2) {
            for &m in &ms {
                assert!(max_bound(w[0], m) <= max_bound(w[1], m));
            }
        }
        for &l in &ls {
            for w in ms.windows(2) {
                assert!(max_bound(l, w[0]) <= max_bound(l, w[1]));
            }
        }
    }

    #[test]
    fn gauss_max_single_variable_near_half_normal_mean() {
        let mut rng = substream(3, "conc-test", 0, 0);
        let v = verify_gauss_max(1, &[1.0], false, 100_000, &mut rng).unwrap();
        let half_normal = (2.0 / std::f64::consts::PI).sqrt();
        assert!((v.empirical_value - half_normal).abs() < 3.0 * v.std_error + 1e-3);
        assert!(v.passes);
    }

    #[test]
    fn gauss_max_degenerate_sigmas_pass_at_zero() {
        let mut rng = substream(3, "conc-test", 0, 1);
        let v = verify_gauss_max(4, &[0.0; 4], false, 200, &mut rng).unwrap();
        assert_eq!(v.empirical_value, 0.0);
        assert_eq!(v.bound_value, 0.0);
        assert!(v.passes);
    }

    #[test]
    fn gauss_max_thousand_iid_within_bound() {
        let mut rng = substream(3, "conc-test", 0, 2);
        let sigmas = vec![1.0; 1000];
        let v = verify_gauss_max(1000, &sigmas, false, 2_000, &mut rng).unwrap();
        assert!(v.empirical_value > 3.0 && v.empirical_value < 3.6);
        assert!((v.bound_value - 3.899).abs() < 1e-3);
        assert!(v.passes);
    }

    #[test]
    fn gauss_max_correlated_passes_too() {
        let mut rng = substream(3, "conc-test", 0, 3);
        let sigmas = vec![1.0; 50];
        let v = verify_gauss_max(50, &sigmas, true, 20_000, &mut rng).unwrap();
        assert!(v.passes);
        // shared factor inflates nothing: variances are unchanged
        assert!(v.empirical_value <= v.bound_value);
    }

    #[test]
    fn gauss_max_rejects_bad_input() {
        let mut rng = substream(3, "conc-test", 0, 4);
        assert!(verify_gauss_max(2, &[1.0], false, 1000, &mut rng).is_err());
        assert!(verify_gauss_max(1, &[-1.0], false, 1000, &mut rng).is_err());
        assert!(verify_gauss_max(1, &[1.0], false, 99, &mut rng).is_err());
    }

    #[test]
    fn subgauss_rademacher_singleton_is_exactly_l() {
        let mut rng = substream(4, "conc-test", 1, 0);
        let v = verify_subgauss_max(1, 1.0, BoundedDist::Rademacher, 500, &mut rng).unwrap();
        assert_eq!(v.empirical_value, 1.0);
        assert_eq!(v.std_error, 0.0);
        assert!(v.passes);
    }

    #[test]
    fn subgauss_zero_l_passes_at_zero() {
        let mut rng = substream(4, "conc-test", 1, 1);
        let v = verify_subgauss_max(10, 0.0, BoundedDist::Uniform, 500, &mut rng).unwrap();
        assert_eq!(v.empirical_value, 0.0);
        assert_eq!(v.bound_value, 0.0);
        assert!(v.passes);
    }

    #[test]
    fn subgauss_uniform_hundred_passes_trivially() {
        let mut rng = substream(4, "conc-test", 1, 2);
        let v = verify_subgauss_max(100, 1.0, BoundedDist::Uniform, 5_000, &mut rng).unwrap();
        assert!(v.empirical_value <= 1.0);
        assert!((v.bound_value - 3.2552).abs() < 1e-4);
        assert!(v.passes);
    }

    #[test]
    fn hoeffding_beta_zero_passes_with_equality() {
        let mut rng = substream(5, "conc-test", 2, 0);
        let v = hoeffding_mgf_check(5, 1.0, 0.0, BoundedDist::Uniform, 200, &mut rng).unwrap();
        assert_eq!(v.empirical_value, 1.0);
        assert_eq!(v.bound_value, 1.0);
        assert!(v.passes);
    }

    #[test]
    fn hoeffding_rademacher_exact_mgf_under_bound() {
        // cosh(1) ≈ 1.5431 ≤ e^{1/2} ≈ 1.6487, the proof's final step
        let exact = rademacher_exact_mgf(1.0, 1.0);
        assert!((exact - 1.5431).abs() < 1e-4);
        assert!(exact <= (0.5f64).exp());
        for beta in [-3.0, -1.0, -0.1, 0.1, 1.0, 3.0] {
            for l in [0.5, 1.0, 2.0] {
                assert!(rademacher_exact_mgf(beta, l) <= (beta * beta * l * l / 2.0).exp() + 1e-12);
            }
        }
        let mut rng = substream(5, "conc-test", 2, 1);
        let v =
            hoeffding_mgf_check(1, 1.0, 1.0, BoundedDist::Rademacher, 100_000, &mut rng).unwrap();
        assert!((v.empirical_value - exact).abs() < 4.0 * v.std_error + 1e-9);
        assert!(v.passes);
    }

    #[test]
    fn hoeffding_uniform_sum_passes() {
        let mut rng = substream(5, "conc-test", 2, 2);
        let v = hoeffding_mgf_check(10, 1.0, 0.5, BoundedDist::Uniform, 100_000, &mut rng).unwrap();
        assert!(v.bound_value == (1.25f64).exp());
        assert!(v.passes);
    }

    #[test]
    fn hoeffding_rejects_overflowing_exponent() {
        let mut rng = substream(5, "conc-test", 2, 3);
        assert!(matches!(
            hoeffding_mgf_check(1000, 10.0, 5.0, BoundedDist::Rademacher, 200, &mut rng)
                .unwrap_err(),
            ConcentrationError::Overflow(_)
        ));
    }

    #[test]
    fn u_and_v_bound_reference_values() {
        assert_eq!(u_max_bound(0.0, 1.0, 10, 100), 0.0);
        assert_eq!(u_max_bound(1.0, 0.0, 10, 100), 0.0);
        assert!((u_max_bound(1.0, 1.0, 10, 100) - 24.477).abs() < 1e-2);
        assert_eq!(v_max_bound(0.0, 10, 100), 0.0);
        assert!((v_max_bound(1.0, 1, 2) - 1.6651).abs() < 1e-4);
        assert!((v_max_bound(1.0, 10, 400) - 0.32553).abs() < 1e-4);
    }
}
