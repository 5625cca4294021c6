//! Compressed sparse row storage and the implicit centered/scaled operators.
//!
//! The decomposition never materializes a centered or scaled matrix. With
//! row, column, and grand means (mu_r, mu_c, mu) of the base matrix M, the
//! doubly centered product is evaluated as
//!
//! ```text
//! (M - mu_r 1' - 1 mu_c + mu 1 1') x  =  Mx - mu_r (1'x) - 1 (mu_c . x) + mu (1'x) 1
//! ```
//!
//! which is O(nnz + n + d) per application. Scaling composes the same way
//! through the regularized degree factors (deg + tau)^{-1/2} on each side.

use crate::dense::Mat;
use crate::error::{Error, Result};

/// Sparse matrix in compressed sparse row format. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::DimensionMismatch(format!(
                "row_offsets length {} != n_rows + 1 = {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != col_indices.len() {
            return Err(Error::InvalidArgument(
                "row_offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(Error::DimensionMismatch(
                "col_indices and values lengths differ".into(),
            ));
        }
        for w in row_offsets.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidArgument(
                    "row_offsets not nondecreasing".into(),
                ));
            }
        }
        for i in 0..n_rows {
            let row = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            for w in row.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::InvalidArgument(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= n_cols {
                    return Err(Error::InvalidArgument(format!(
                        "column index {last} out of range in row {i}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite value in matrix".into()));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from (row, col, value) triplets. Duplicates are summed and
    /// entries that sum to exactly zero are dropped from storage.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(i, j, v) in &triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) out of range for {n_rows}x{n_cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value at ({i}, {j})"
                )));
            }
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows_seen = vec![0usize; n_rows];
        let mut idx = 0;
        while idx < triplets.len() {
            let (i, j, mut v) = triplets[idx];
            idx += 1;
            while idx < triplets.len() && triplets[idx].0 == i && triplets[idx].1 == j {
                v += triplets[idx].2;
                idx += 1;
            }
            if v != 0.0 {
                col_indices.push(j);
                values.push(v);
                rows_seen[i] += 1;
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] = row_offsets[i] + rows_seen[i];
        }
        SparseMatrix::from_csr(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates stored entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            (self.row_offsets[i]..self.row_offsets[i + 1])
                .map(move |p| (i, self.col_indices[p], self.values[p]))
        })
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "matvec length mismatch");
        self.row_offsets
            .windows(2)
            .map(|w| {
                (w[0]..w[1])
                    .map(|p| self.values[p] * x[self.col_indices[p]])
                    .sum()
            })
            .collect()
    }

    /// y = A^T x, by scattering CSR rows into the output.
    pub fn rmatvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows, "rmatvec length mismatch");
        let mut y = vec![0.0; self.n_cols];
        for (w, &xi) in self.row_offsets.windows(2).zip(x) {
            if xi == 0.0 {
                continue;
            }
            for p in w[0]..w[1] {
                y[self.col_indices[p]] += self.values[p] * xi;
            }
        }
        y
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| {
                self.values[self.row_offsets[i]..self.row_offsets[i + 1]]
                    .iter()
                    .sum()
            })
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_cols];
        for (_, j, v) in self.iter() {
            s[j] += v;
        }
        s
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        let stored = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.nnz() < self.n_rows * self.n_cols {
            stored.max(0.0)
        } else {
            stored
        }
    }

    pub fn has_negative_entries(&self) -> bool {
        self.values.iter().any(|&v| v < 0.0)
    }

    /// Dense copy of the stored entries (test helper; no size guard).
    pub fn to_dense(&self) -> Mat {
        let mut m = Mat::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }
}

/// Incremental CSR builder for generators that emit rows in order.
#[derive(Debug)]
pub struct RowBuilder {
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl RowBuilder {
    pub fn new(n_cols: usize) -> Self {
        RowBuilder {
            n_cols,
            row_offsets: vec![0],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Appends one row; entries must arrive in strictly increasing column
    /// order. Zero values are dropped.
    pub fn push_row(&mut self, entries: impl Iterator<Item = (usize, f64)>) {
        let row_start = *self.row_offsets.last().unwrap();
        for (j, v) in entries {
            debug_assert!(j < self.n_cols);
            debug_assert!(
                self.col_indices.len() == row_start || *self.col_indices.last().unwrap() < j,
                "columns must be strictly increasing within a row"
            );
            if v != 0.0 {
                self.col_indices.push(j);
                self.values.push(v);
            }
        }
        self.row_offsets.push(self.col_indices.len());
    }

    pub fn finish(self) -> Result<SparseMatrix> {
        let n_rows = self.row_offsets.len() - 1;
        SparseMatrix::from_csr(
            n_rows,
            self.n_cols,
            self.row_offsets,
            self.col_indices,
            self.values,
        )
    }
}

/// Row, column, and grand means of a matrix: the statistics behind the
/// implicit double centering.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringStats {
    pub mu_r: Vec<f64>,
    pub mu_c: Vec<f64>,
    pub mu_grand: f64,
}

/// Row/column degrees and their means: the regularized scaling statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStats {
    pub deg_r: Vec<f64>,
    pub deg_c: Vec<f64>,
    pub tau_r: f64,
    pub tau_c: f64,
}

impl ScalingStats {
    fn inv_sqrt_row(&self, i: usize) -> f64 {
        1.0 / (self.deg_r[i] + self.tau_r).sqrt()
    }

    fn inv_sqrt_col(&self, j: usize) -> f64 {
        1.0 / (self.deg_c[j] + self.tau_c).sqrt()
    }
}

/// mu_r = A 1/d, mu_c = 1'A/n, mu = 1'A 1/(nd), in one pass over nnz.
pub fn compute_centering_stats(a: &SparseMatrix) -> CenteringStats {
    centering_stats_of_base(a, None)
}

/// Centering statistics of the (optionally scaled) base matrix. With
/// scaling, the statistics describe L = D_r^{-1/2} A D_c^{-1/2} without
/// materializing L.
pub fn centering_stats_of_base(a: &SparseMatrix, scale: Option<&ScalingStats>) -> CenteringStats {
    let n = a.n_rows();
    let d = a.n_cols();
    let mut mu_r = vec![0.0; n];
    let mut mu_c = vec![0.0; d];
    let mut total = 0.0;
    for (i, j, v) in a.iter() {
        let w = match scale {
            Some(s) => v * s.inv_sqrt_row(i) * s.inv_sqrt_col(j),
            None => v,
        };
        mu_r[i] += w;
        mu_c[j] += w;
        total += w;
    }
    for v in &mut mu_r {
        *v /= d as f64;
    }
    for v in &mut mu_c {
        *v /= n as f64;
    }
    CenteringStats {
        mu_r,
        mu_c,
        mu_grand: total / (n as f64 * d as f64),
    }
}

/// deg_r = A 1, deg_c = 1'A, tau = mean(deg). Errors on an all-zero matrix;
/// warns (but proceeds) on negative entries, which fall outside the
/// adjacency-matrix setting this normalization is meant for.
pub fn compute_scaling_stats(a: &SparseMatrix) -> Result<ScalingStats> {
    if a.values().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    if a.has_negative_entries() {
        eprintln!("warning: scaling requested for a matrix with negative entries");
    }
    let deg_r = a.row_sums();
    let deg_c = a.col_sums();
    let tau_r = deg_r.iter().sum::<f64>() / a.n_rows() as f64;
    let tau_c = deg_c.iter().sum::<f64>() / a.n_cols() as f64;
    Ok(ScalingStats {
        deg_r,
        deg_c,
        tau_r,
        tau_c,
    })
}

/// y = (A - mu_r 1' - 1 mu_c + mu 1 1') x without forming the dense matrix.
pub fn centered_matvec(a: &SparseMatrix, stats: &CenteringStats, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.n_cols() || stats.mu_r.len() != a.n_rows() || stats.mu_c.len() != a.n_cols() {
        return Err(Error::DimensionMismatch("centered_matvec".into()));
    }
    let sx: f64 = x.iter().sum();
    let mcx = crate::dense::dot(&stats.mu_c, x);
    let mut y = a.matvec(x);
    for (yi, mr) in y.iter_mut().zip(&stats.mu_r) {
        *yi += -mr * sx - mcx + stats.mu_grand * sx;
    }
    Ok(y)
}

/// Adjoint of [`centered_matvec`]: computes (A - mu_r 1' - 1 mu_c + mu 1 1')^T y.
pub fn centered_rmatvec(a: &SparseMatrix, stats: &CenteringStats, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != a.n_rows() || stats.mu_r.len() != a.n_rows() || stats.mu_c.len() != a.n_cols() {
        return Err(Error::DimensionMismatch("centered_rmatvec".into()));
    }
    let sy: f64 = y.iter().sum();
    let mry = crate::dense::dot(&stats.mu_r, y);
    let mut x = a.rmatvec(y);
    for (xj, mc) in x.iter_mut().zip(&stats.mu_c) {
        *xj += -mc * sy - mry + stats.mu_grand * sy;
    }
    Ok(x)
}

/// Which mean terms the centering subtracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CenterMode {
    /// Row, column, and grand means (double centering).
    Full,
    /// Column means only: A - 1 mu_c.
    ColumnOnly,
}

/// A sparse matrix composed with optional scaling and optional centering,
/// exposed through forward and adjoint matrix-vector products.
pub struct LinearOperator<'a> {
    matrix: &'a SparseMatrix,
    scale: Option<ScalingStats>,
    center: Option<CenteringStats>,
    center_mode: CenterMode,
}

/// Composes the operator. With both statistics present, the centering
/// statistics must have been computed from the scaled matrix (see
/// [`centering_stats_of_base`]); the scaled matrix is what gets centered.
pub fn build_operator<'a>(
    a: &'a SparseMatrix,
    scale: Option<ScalingStats>,
    center: Option<CenteringStats>,
    center_mode: CenterMode,
) -> Result<LinearOperator<'a>> {
    if let Some(s) = &scale {
        if s.deg_r.len() != a.n_rows() || s.deg_c.len() != a.n_cols() {
            return Err(Error::DimensionMismatch(
                "scaling stats do not match matrix shape".into(),
            ));
        }
    }
    if let Some(c) = &center {
        if c.mu_r.len() != a.n_rows() || c.mu_c.len() != a.n_cols() {
            return Err(Error::DimensionMismatch(
                "centering stats do not match matrix shape".into(),
            ));
        }
    }
    Ok(LinearOperator {
        matrix: a,
        scale,
        center,
        center_mode,
    })
}

impl<'a> LinearOperator<'a> {
    pub fn n_rows(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        self.matrix
    }

    pub fn centering_stats(&self) -> Option<&CenteringStats> {
        self.center.as_ref()
    }

    pub fn scaling_stats(&self) -> Option<&ScalingStats> {
        self.scale.as_ref()
    }

    pub fn center_mode(&self) -> CenterMode {
        self.center_mode
    }

    fn base_matvec(&self, x: &[f64]) -> Vec<f64> {
        match &self.scale {
            None => self.matrix.matvec(x),
            Some(s) => {
                let w: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(j, xj)| xj * s.inv_sqrt_col(j))
                    .collect();
                let mut y = self.matrix.matvec(&w);
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi *= s.inv_sqrt_row(i);
                }
                y
            }
        }
    }

    fn base_rmatvec(&self, y: &[f64]) -> Vec<f64> {
        match &self.scale {
            None => self.matrix.rmatvec(y),
            Some(s) => {
                let w: Vec<f64> = y
                    .iter()
                    .enumerate()
                    .map(|(i, yi)| yi * s.inv_sqrt_row(i))
                    .collect();
                let mut x = self.matrix.rmatvec(&w);
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj *= s.inv_sqrt_col(j);
                }
                x
            }
        }
    }

    /// Forward product M x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "operator apply: expected length {}, got {}",
                self.n_cols(),
                x.len()
            )));
        }
        let mut y = self.base_matvec(x);
        if let Some(c) = &self.center {
            match self.center_mode {
                CenterMode::Full => {
                    let sx: f64 = x.iter().sum();
                    let mcx = crate::dense::dot(&c.mu_c, x);
                    for (yi, mr) in y.iter_mut().zip(&c.mu_r) {
                        *yi += -mr * sx - mcx + c.mu_grand * sx;
                    }
                }
                CenterMode::ColumnOnly => {
                    let mcx = crate::dense::dot(&c.mu_c, x);
                    for yi in y.iter_mut() {
                        *yi -= mcx;
                    }
                }
            }
        }
        Ok(y)
    }

    /// Adjoint product M^T y.
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "operator adjoint: expected length {}, got {}",
                self.n_rows(),
                y.len()
            )));
        }
        let mut x = self.base_rmatvec(y);
        if let Some(c) = &self.center {
            let sy: f64 = y.iter().sum();
            match self.center_mode {
                CenterMode::Full => {
                    let mry = crate::dense::dot(&c.mu_r, y);
                    for (xj, mc) in x.iter_mut().zip(&c.mu_c) {
                        *xj += -mc * sy - mry + c.mu_grand * sy;
                    }
                }
                CenterMode::ColumnOnly => {
                    for (xj, mc) in x.iter_mut().zip(&c.mu_c) {
                        *xj -= mc * sy;
                    }
                }
            }
        }
        Ok(x)
    }

    /// Applies the operator to a dense matrix column by column.
    pub fn apply_mat(&self, x: &Mat) -> Result<Mat> {
        let cols: Result<Vec<Vec<f64>>> = (0..x.cols()).map(|j| self.apply(&x.col(j))).collect();
        Ok(Mat::from_cols(self.n_rows(), cols?))
    }

    /// Applies the adjoint to a dense matrix column by column.
    pub fn apply_adjoint_mat(&self, y: &Mat) -> Result<Mat> {
        let cols: Result<Vec<Vec<f64>>> = (0..y.cols())
            .map(|j| self.apply_adjoint(&y.col(j)))
            .collect();
        Ok(Mat::from_cols(self.n_cols(), cols?))
    }
}

/// Dense matrix equal to the operator applied to each basis vector.
/// Guarded: refuses products with more than 10^6 entries.
pub fn materialize_dense(op: &LinearOperator) -> Result<Mat> {
    let (n, d) = (op.n_rows(), op.n_cols());
    if n * d > 1_000_000 {
        return Err(Error::SizeGuard(format!(
            "materialize_dense on {n}x{d} matrix exceeds 10^6 entries"
        )));
    }
    let mut m = Mat::zeros(n, d);
    let mut e = vec![0.0; d];
    for j in 0..d {
        e[j] = 1.0;
        let col = op.apply(&e)?;
        m.set_col(j, &col);
        e[j] = 0.0;
    }
    Ok(m)
}
