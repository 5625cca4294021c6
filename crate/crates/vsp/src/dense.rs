//! Small dense matrices and the dense numerical kernels built on them.
//!
//! Everything here is sized for factor matrices (tall and thin) and k-by-k
//! cores, not for general linear algebra. Storage is row-major `f64`.

use crate::error::{Error, Result};

/// Row-major dense matrix.
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

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: row 0 has {} entries, row {} has {}",
                    c,
                    i,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_cols(rows: usize, cols: Vec<Vec<f64>>) -> Self {
        let c = cols.len();
        let mut m = Mat::zeros(rows, c);
        for (j, col) in cols.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn to_cols(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(l);
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Mat {
        let data = self.data.iter().map(|a| a * s).collect();
        Mat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale_col(&mut self, j: usize, s: f64) {
        for i in 0..self.rows {
            self[(i, j)] *= s;
        }
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self[(i, j)].powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Max entry of |self^T self - I|; zero for orthonormal columns.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.transpose().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// In-place planar rotation of two columns stored as vectors (p < q):
/// col_p <- cs col_p + sn col_q, col_q <- -sn col_p + cs col_q.
pub(crate) fn rotate_column_pair(cols: &mut [Vec<f64>], p: usize, q: usize, cs: f64, sn: f64) {
    debug_assert!(p < q);
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = cs * xp + sn * yq;
        *y = -sn * xp + cs * yq;
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Deterministic orthonormal completion: the first canonical basis vector
/// with a large residual against `basis`, re-orthogonalized and normalized.
fn complete_column(basis: &[Vec<f64>], len: usize) -> Vec<f64> {
    for t in 0..len {
        let mut v = vec![0.0; len];
        v[t] = 1.0;
        for _ in 0..2 {
            for q in basis {
                let r = dot(q, &v);
                axpy(-r, q, &mut v);
            }
        }
        let n = norm2(&v);
        if n > 0.1 {
            for vi in &mut v {
                *vi /= n;
            }
            return v;
        }
    }
    unreachable!("no completion vector found; basis larger than ambient dimension")
}

/// Modified Gram-Schmidt with re-orthogonalization and a rank test.
///
/// Returns (Q, R) with Q having orthonormal columns and A = Q R.
/// Projection passes repeat while the column norm keeps collapsing; a
/// column whose residual falls below 1e-14 of its original norm is
/// numerically dependent (the leftover is cancellation noise inside the
/// span, which no amount of re-orthogonalization fixes), so it is replaced
/// by a deterministic completion with a zero diagonal in R.
pub fn mgs_qr(a: &Mat) -> (Mat, Mat) {
    let n = a.rows();
    let l = a.cols();
    let mut q_cols: Vec<Vec<f64>> = Vec::with_capacity(l);
    let mut r = Mat::zeros(l, l);
    for j in 0..l {
        let mut v = a.col(j);
        let norm0 = norm2(&v);
        let mut resolved = false;
        if norm0 > 0.0 {
            for _pass in 0..4 {
                let before = norm2(&v);
                for (i, q) in q_cols.iter().enumerate() {
                    let c = dot(q, &v);
                    r[(i, j)] += c;
                    axpy(-c, q, &mut v);
                }
                let after = norm2(&v);
                if after <= 1e-14 * norm0 {
                    break; // dependent
                }
                if after > 0.5 * before {
                    resolved = true; // genuinely new direction
                    break;
                }
            }
        }
        let norm = norm2(&v);
        if resolved && norm > 1e-14 * norm0 {
            for vi in &mut v {
                *vi /= norm;
            }
            r[(j, j)] = norm;
            q_cols.push(v);
        } else {
            q_cols.push(complete_column(&q_cols, n));
            r[(j, j)] = 0.0;
        }
    }
    (Mat::from_cols(n, q_cols), r)
}

/// Orthonormal basis of the columns of `a` (Q factor of [`mgs_qr`]).
pub fn orthonormalize(a: &Mat) -> Mat {
    mgs_qr(a).0
}

/// Full SVD of a dense matrix by one-sided Jacobi (Hestenes) iteration.
///
/// Returns (U, sigma, V) with `a = U diag(sigma) V^T`, singular values
/// sorted in nonincreasing order, and both factors orthonormal (zero
/// singular directions filled by deterministic completion). One-sided
/// Jacobi is slow but achieves high relative accuracy, which is what a
/// test oracle needs.
pub fn jacobi_svd(a: &Mat) -> (Mat, Vec<f64>, Mat) {
    if a.rows() < a.cols() {
        let (u, s, v) = jacobi_svd(&a.transpose());
        return (v, s, u);
    }
    let m = a.rows();
    let n = a.cols();
    let mut w: Vec<Vec<f64>> = a.to_cols();
    let mut v: Vec<Vec<f64>> = Mat::identity(n).to_cols();

    let eps = 1e-15;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let app = dot(&w[p], &w[p]);
                let aqq = dot(&w[q], &w[q]);
                let apq = dot(&w[p], &w[q]);
                if apq.abs() <= eps * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_column_pair(&mut w, p, q, cs, -sn);
                rotate_column_pair(&mut v, p, q, cs, -sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    // Left vectors for singular values at the numerical noise floor are
    // cancellation junk inside the dominant column space; replace them by
    // a completion so U stays orthonormal.
    let sigma_max = order.first().map_or(0.0, |&i| norms[i]);
    let floor = 1e-13 * sigma_max;
    let mut sigma = Vec::with_capacity(n);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &idx in &order {
        let s = norms[idx];
        sigma.push(s);
        if s <= floor {
            u_cols.push(complete_column(&u_cols, m));
        } else {
            u_cols.push(w[idx].iter().map(|x| x / s).collect());
        }
        v_cols.push(v[idx].clone());
    }
    (Mat::from_cols(m, u_cols), sigma, Mat::from_cols(n, v_cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matmul_and_transpose() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap();
        let b = a.transpose();
        let c = a.matmul(&b);
        assert_abs_diff_eq!(c[(0, 0)], 5.0);
        assert_abs_diff_eq!(c[(0, 1)], 13.0);
        assert_abs_diff_eq!(c[(1, 1)], 34.0);
    }

    #[test]
    fn mgs_qr_reproduces_input() {
        let a = Mat::from_fn(7, 4, |i, j| ((i * 13 + j * 7) % 11) as f64 - 5.0);
        let (q, r) = mgs_qr(&a);
        assert!(q.orthonormality_error() < 1e-13);
        let qr = q.matmul(&r);
        assert!(qr.sub(&a).frob_norm() < 1e-12 * a.frob_norm().max(1.0));
    }

    #[test]
    fn mgs_qr_rank_deficient_still_orthonormal() {
        // two identical columns
        let a = Mat::from_fn(5, 3, |i, j| {
            if j == 2 {
                (i + 1) as f64
            } else {
                (i + 1) as f64 * (j + 1) as f64
            }
        });
        let mut a2 = a.clone();
        let c0 = a2.col(0);
        a2.set_col(1, &c0);
        let (q, r) = mgs_qr(&a2);
        assert!(q.orthonormality_error() < 1e-12);
        assert!(q.matmul(&r).sub(&a2).frob_norm() < 1e-12 * a2.frob_norm());
    }

    #[test]
    fn jacobi_svd_antidiagonal() {
        let a = Mat::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (_, s, _) = jacobi_svd(&a);
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_svd_singular_matrix() {
        let a = Mat::from_rows(vec![vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let (u, s, v) = jacobi_svd(&a);
        assert_abs_diff_eq!(s[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-14);
        assert!(u.orthonormality_error() < 1e-12);
        assert!(v.orthonormality_error() < 1e-12);
    }

    #[test]
    fn jacobi_svd_reconstructs_random() {
        let a = Mat::from_fn(20, 10, |i, j| {
            (((i * 31 + j * 17) % 23) as f64 - 11.0) / 7.0
        });
        let (u, s, v) = jacobi_svd(&a);
        let mut us = u.clone();
        for (j, &sj) in s.iter().enumerate() {
            us.scale_col(j, sj);
        }
        let rec = us.matmul(&v.transpose());
        assert!(rec.sub(&a).frob_norm() <= 1e-10 * a.frob_norm());
        // nonincreasing
        for w in s.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn jacobi_svd_wide_matrix() {
        let a = Mat::from_fn(4, 9, |i, j| ((i + 2 * j) % 5) as f64 - 2.0);
        let (u, s, v) = jacobi_svd(&a);
        assert_eq!(u.rows(), 4);
        assert_eq!(v.rows(), 9);
        let mut us = u.clone();
        for (j, &sj) in s.iter().enumerate().take(4) {
            us.scale_col(j, sj);
        }
        let rec = us.matmul(&v.transpose());
        assert!(rec.sub(&a).frob_norm() <= 1e-10 * a.frob_norm());
    }
}
