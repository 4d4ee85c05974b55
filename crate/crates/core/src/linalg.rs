//! Dense linear algebra sized for desk-scale regression problems: a row-major
//! matrix type, Gram products, and a cyclic Jacobi eigenvalue sweep for
//! symmetric matrices.

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds from row-major data; panics if the length is inconsistent.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ * v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.row(i)) {
                *o += vi * x;
            }
        }
        out
    }

    /// Gram matrix `selfᵀ * self` (cols × cols, symmetric).
    pub fn gram(&self) -> Mat {
        let p = self.cols;
        let mut g = Mat::zeros(p, p);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..p {
                let xj = row[j];
                if xj == 0.0 {
                    continue;
                }
                let grow = &mut g.data[j * p..(j + 1) * p];
                for (k, &xk) in row.iter().enumerate().skip(j) {
                    grow[k] += xj * xk;
                }
            }
        }
        // mirror the upper triangle
        for j in 0..p {
            for k in (j + 1)..p {
                let v = g.get(j, k);
                g.set(k, j, v);
            }
        }
        g
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Max absolute row sum (the ∞-operator norm); upper-bounds the spectral
    /// norm for symmetric matrices.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

#[inline]
pub fn l1_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

#[inline]
pub fn linf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

/// `vᵀ M v` for square `M`.
pub fn quad_form(m: &Mat, v: &[f64]) -> f64 {
    assert_eq!(m.rows(), m.cols(), "quad_form needs a square matrix");
    assert_eq!(v.len(), m.rows(), "quad_form dimension mismatch");
    dot(v, &m.matvec(v))
}

/// Eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi rotations.
///
/// Adequate for the p×p second-moment matrices used here (p up to a few
/// hundred); converges quadratically once the off-diagonal mass is small.
pub fn symmetric_eigenvalues(m: &Mat) -> Vec<f64> {
    assert_eq!(m.rows(), m.cols(), "eigenvalues need a square matrix");
    let n = m.rows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m.get(0, 0)];
    }
    let mut a = m.clone();
    let scale = a.max_abs_entry().max(1.0);
    let tol = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a.get(i, j).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // stable tangent of the rotation angle
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_hand_product() {
        let x = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let g = x.gram();
        assert_eq!(g.get(0, 0), 1.0 + 9.0 + 25.0);
        assert_eq!(g.get(0, 1), 2.0 + 12.0 + 30.0);
        assert_eq!(g.get(1, 0), g.get(0, 1));
        assert_eq!(g.get(1, 1), 4.0 + 16.0 + 36.0);
    }

    #[test]
    fn matvec_and_transpose_agree_with_hand_values() {
        let x = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(x.matvec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(x.tr_matvec(&[1.0, 1.0]), vec![4.0, 6.0]);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let m = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_equicorrelated_closed_form() {
        // (1-r) I + r J has eigenvalues 1-r (multiplicity p-1) and 1+(p-1) r
        let p = 7;
        let r = 0.36;
        let mut m = Mat::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                m.set(i, j, if i == j { 1.0 } else { r });
            }
        }
        let e = symmetric_eigenvalues(&m);
        for v in &e[..p - 1] {
            assert!((v - (1.0 - r)).abs() < 1e-12);
        }
        assert!((e[p - 1] - (1.0 + (p as f64 - 1.0) * r)).abs() < 1e-12);
    }

    #[test]
    fn row_sum_bound_dominates_spectrum() {
        let m = Mat::from_rows(&[
            vec![4.0, -1.5, 0.2],
            vec![-1.5, 3.0, 1.0],
            vec![0.2, 1.0, 5.0],
        ]);
        let eigs = symmetric_eigenvalues(&m);
        assert!(eigs[2] <= m.max_abs_row_sum() + 1e-12);
    }

    #[test]
    fn quad_form_hand_value() {
        let m = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        assert!((quad_form(&m, &[1.0, 1.0]) - 3.0).abs() < 1e-15);
    }
}
