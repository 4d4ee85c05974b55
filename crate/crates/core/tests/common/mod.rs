//! Oracles shared by the integration suites. Everything here is deliberately
//! independent of the implementation path it checks: the projection oracle
//! bisects the threshold level instead of sorting, and the solve oracle is a
//! brute-force grid search over the feasible ball.
#![allow(dead_code)] // each test binary uses its own subset

use lasso_mc::linalg::{self, Mat};

/// Euclidean projection onto the ℓ1 ball by bisecting the soft-threshold
/// level θ where Σ max(|v_i|−θ, 0) = K.
pub fn bisection_project(v: &[f64], k: f64) -> Vec<f64> {
    if k == 0.0 {
        return vec![0.0; v.len()];
    }
    if linalg::l1_norm(v) <= k {
        return v.to_vec();
    }
    let mut lo = 0.0;
    let mut hi = linalg::linf_norm(v);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let mass: f64 = v.iter().map(|x| (x.abs() - mid).max(0.0)).sum();
        if mass > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// Brute-force minimum of ‖y − Xβ‖² over the two-dimensional ℓ1 ball at the
/// given grid resolution. Returns (best objective, best point).
pub fn grid_search_2d(x: &Mat, y: &[f64], k: f64, step: f64) -> (f64, [f64; 2]) {
    assert_eq!(x.cols(), 2);
    // expand f(β) = c − 2b·β + β·Aβ once so each grid point is O(1)
    let a = x.gram();
    let b = x.tr_matvec(y);
    let c = linalg::norm_sq(y);
    let (a00, a01, a11) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
    let f = |b1: f64, b2: f64| {
        c - 2.0 * (b[0] * b1 + b[1] * b2) + a00 * b1 * b1 + 2.0 * a01 * b1 * b2 + a11 * b2 * b2
    };
    let steps = (k / step).round() as i64;
    let mut best = f64::INFINITY;
    let mut arg = [0.0, 0.0];
    for i in -steps..=steps {
        let b1 = i as f64 * step;
        let rem = k - b1.abs();
        // the epsilon keeps grid corners like 0.3/0.001 from rounding down
        let inner = (rem / step + 1e-9).floor() as i64;
        for j in -inner..=inner {
            let b2 = j as f64 * step;
            let val = f(b1, b2);
            if val < best {
                best = val;
                arg = [b1, b2];
            }
        }
    }
    (best, arg)
}

/// Brute-force nearest point to `v` among a fine grid of the 3-dimensional
/// ℓ1 sphere of radius `k` (where the projection of an exterior point lies).
pub fn grid_nearest_on_l1_sphere_3d(v: &[f64; 3], k: f64, step: f64) -> [f64; 3] {
    let steps = (k / step).round() as i64;
    let mut best = f64::INFINITY;
    let mut arg = [0.0; 3];
    for i in -steps..=steps {
        let b1 = i as f64 * step;
        let rem1 = k - b1.abs();
        let inner = (rem1 / step + 1e-9).floor() as i64;
        for j in -inner..=inner {
            let b2 = j as f64 * step;
            let mag3 = (rem1 - b2.abs()).max(0.0);
            for b3 in [mag3, -mag3] {
                let d = (b1 - v[0]) * (b1 - v[0])
                    + (b2 - v[1]) * (b2 - v[1])
                    + (b3 - v[2]) * (b3 - v[2]);
                if d < best {
                    best = d;
                    arg = [b1, b2, b3];
                }
                if mag3 == 0.0 {
                    break;
                }
            }
        }
    }
    arg
}

/// Mean and standard error of a sample.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
