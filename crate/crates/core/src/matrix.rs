//! Non-negative dense and sparse storage plus the few products the update
//! rules need.
//!
//! Every constructor rejects negative or non-finite values, so a value of
//! any of these types is non-negative by construction. Kernels only combine
//! non-negative operands with `+`, `*` and `/`, so their outputs are built
//! without re-validation.

use std::fmt;

use crate::error::{Error, Result};

fn check_entries(cols: usize, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        None => Ok(()),
        Some(pos) => Err(Error::InvalidEntry {
            row: pos / cols.max(1),
            col: pos % cols.max(1),
            value: values[pos],
        }),
    }
}

/// Row-major dense matrix with non-negative entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "DenseMatrix::new",
                format!("{rows}x{cols} needs {} values, got {}", rows * cols, data.len()),
            ));
        }
        check_entries(cols, &data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::shape(
                    "DenseMatrix::from_rows",
                    format!("row {i} has {} values, expected {cols}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix from kernel output known to be non-negative.
    pub(crate) fn from_kernel(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|v| *v >= 0.0), "kernel produced a negative value");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index ({row}, {col}) out of bounds");
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a zero-column matrix has no data anyway.
        let width = self.cols.max(1);
        self.data
            .chunks_exact(width)
            .take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Self::from_kernel(self.cols, self.rows, data)
    }

    /// Dense product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matmul",
                format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            let acc = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                for (o, &b) in acc.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self::from_kernel(self.rows, rhs.cols, out))
    }

    /// `self * rhs^T`, reading both operands row-wise.
    pub fn matmul_t(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.cols {
            return Err(Error::shape(
                "matmul_t",
                format!("{}x{} times ({}x{})^T", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        let mut out = Vec::with_capacity(self.rows * rhs.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for k in 0..rhs.rows {
                out.push(dot(a, rhs.row(k)));
            }
        }
        Ok(Self::from_kernel(self.rows, rhs.rows, out))
    }

    /// `self^T * self`.
    pub fn gram(&self) -> DenseMatrix {
        let c = self.cols;
        let mut out = vec![0.0; c * c];
        for row in self.iter_rows() {
            for (a, &x) in row.iter().enumerate() {
                for (o, &y) in out[a * c..(a + 1) * c].iter_mut().zip(row) {
                    *o += x * y;
                }
            }
        }
        Self::from_kernel(c, c, out)
    }

    pub fn column_sums(&self) -> Vector {
        let mut sums = vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        Vector(sums)
    }

    /// `self * x` for a vector of length `cols`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec length mismatch");
        self.iter_rows().map(|row| dot(row, x)).collect()
    }

    /// `self^T * x` for a vector of length `rows`.
    pub fn t_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "t_mul_vec length mismatch");
        let mut out = vec![0.0; self.cols];
        for (row, &xi) in self.iter_rows().zip(x) {
            for (o, &a) in out.iter_mut().zip(row) {
                *o += xi * a;
            }
        }
        out
    }

    /// Elementwise in-place sum; both operands must share a shape.
    pub fn add_assign(&mut self, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                "add_assign",
                format!("{:?} vs {:?}", self.shape(), other.shape()),
            ));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.data.iter().copied().reduce(f64::min)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<DenseMatrix> {
        if let Some(&bad) = keep.iter().find(|&&c| c >= self.cols) {
            return Err(Error::shape("select_columns", format!("column {bad} of {}", self.cols)));
        }
        let data = self.iter_rows().flat_map(|row| keep.iter().map(|&c| row[c])).collect();
        Ok(Self::from_kernel(self.rows, keep.len(), data))
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.iter_rows()).finish()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Compressed sparse row matrix. Stored values are strictly positive and
/// column indices increase strictly within each row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from `(row, col, value)` triplets in any order.
    /// Duplicate coordinates are summed. Values must be finite and > 0.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::shape(
                    "SparseMatrix::from_triplets",
                    format!("index ({r}, {c}) outside {rows}x{cols}"),
                ));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidEntry {
                    row: r,
                    col: c,
                    value: v,
                });
            }
            entries.push((r, c, v));
        }
        // Stable sort keeps duplicate summation in input order.
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Keeps the non-zero entries of a dense matrix.
    pub fn from_dense(dense: &DenseMatrix) -> Self {
        let mut indptr = Vec::with_capacity(dense.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..dense.rows {
            for (j, &v) in dense.row(i).iter().enumerate() {
                if v > 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            rows: dense.rows,
            cols: dense.cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[row]..self.indptr[row + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (idx, vals) = self.row(row);
        idx.binary_search(&col).map_or(0.0, |p| vals[p])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (idx, vals) = self.row(i);
            idx.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for (i, j, v) in self.triplets() {
            data[i * self.cols + j] = v;
        }
        DenseMatrix::from_kernel(self.rows, self.cols, data)
    }

    /// Applies `f(row, col, value)` to every stored value, dropping results
    /// that come out as exactly zero. `f` must return finite non-negatives.
    pub(crate) fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Self {
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        indptr.push(0);
        for i in 0..self.rows {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                let out = f(i, j, v);
                debug_assert!(out.is_finite() && out >= 0.0);
                if out > 0.0 {
                    indices.push(j);
                    values.push(out);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }

    /// Stacks matrices with a common column count on top of each other.
    pub fn vstack(parts: &[SparseMatrix]) -> Result<Self> {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut rows = 0;
        for (k, p) in parts.iter().enumerate() {
            if p.cols != cols {
                return Err(Error::shape(
                    "vstack",
                    format!("part {k} has {} columns, expected {cols}", p.cols),
                ));
            }
            for i in 0..p.rows {
                let (idx, vals) = p.row(i);
                indices.extend_from_slice(idx);
                values.extend_from_slice(vals);
                indptr.push(indices.len());
            }
            rows += p.rows;
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Copies out rows `start..end`.
    pub fn row_slice(&self, start: usize, end: usize) -> Self {
        assert!(start <= end && end <= self.rows, "row slice out of range");
        let base = self.indptr[start];
        let span = base..self.indptr[end];
        Self {
            rows: end - start,
            cols: self.cols,
            indptr: self.indptr[start..=end].iter().map(|p| p - base).collect(),
            indices: self.indices[span.clone()].to_vec(),
            values: self.values[span].to_vec(),
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<SparseMatrix> {
        let mut new_index = vec![None; self.cols];
        for (pos, &c) in keep.iter().enumerate() {
            match new_index.get_mut(c) {
                Some(slot) => *slot = Some(pos),
                None => return Err(Error::shape("select_columns", format!("column {c} of {}", self.cols))),
            }
        }
        let triplets = self
            .triplets()
            .filter_map(|(i, j, v)| new_index[j].map(|nj| (i, nj, v)));
        SparseMatrix::from_triplets(self.rows, keep.len(), triplets)
    }

    pub fn column_sums(&self) -> Vector {
        let mut sums = vec![0.0; self.cols];
        for (&j, &v) in self.indices.iter().zip(&self.values) {
            sums[j] += v;
        }
        Vector(sums)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }
}

/// Non-negative vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_entries(values.len(), &values).map_err(|e| match e {
            Error::InvalidEntry { col, value, .. } => Error::InvalidEntry { row: 0, col, value },
            other => other,
        })?;
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub(crate) fn from_kernel(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0), "kernel produced a negative value");
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Arithmetic mean; 0 for an empty vector.
    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.sum() / self.0.len() as f64
        }
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A data matrix, dense or sparse. Only the strata data may be sparse; all
/// parameters are dense.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(m: SparseMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols(),
            Matrix::Sparse(m) => m.cols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        match self {
            Matrix::Dense(m) => m.get(row, col),
            Matrix::Sparse(m) => m.get(row, col),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn select_columns(&self, keep: &[usize]) -> Result<Matrix> {
        Ok(match self {
            Matrix::Dense(m) => Matrix::Dense(m.select_columns(keep)?),
            Matrix::Sparse(m) => Matrix::Sparse(m.select_columns(keep)?),
        })
    }

    pub fn column_sums(&self) -> Vector {
        match self {
            Matrix::Dense(m) => m.column_sums(),
            Matrix::Sparse(m) => m.column_sums(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Matrix::Dense(m) => m.frobenius_sq(),
            Matrix::Sparse(m) => m.frobenius_sq(),
        }
    }

    /// Calls `f(col, value)` for the non-zero entries of `row`, in column order.
    /// Dense rows report every entry, zeros included.
    pub fn for_each_in_row(&self, row: usize, mut f: impl FnMut(usize, f64)) {
        match self {
            Matrix::Dense(m) => m.row(row).iter().enumerate().for_each(|(j, &v)| f(j, v)),
            Matrix::Sparse(m) => {
                let (idx, vals) = m.row(row);
                idx.iter().zip(vals).for_each(|(&j, &v)| f(j, v));
            }
        }
    }

    /// `self * rhs`.
    pub fn mul_dense(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::shape(
                "matmul",
                format!("{:?} times {:?}", self.shape(), rhs.shape()),
            ));
        }
        match self {
            Matrix::Dense(m) => m.matmul(rhs),
            Matrix::Sparse(_) => {
                let c = rhs.cols();
                let mut out = vec![0.0; self.rows() * c];
                for i in 0..self.rows() {
                    let acc = &mut out[i * c..(i + 1) * c];
                    self.for_each_in_row(i, |k, a| {
                        for (o, &b) in acc.iter_mut().zip(rhs.row(k)) {
                            *o += a * b;
                        }
                    });
                }
                Ok(DenseMatrix::from_kernel(self.rows(), c, out))
            }
        }
    }

    /// `self * rhs^T`; with `rhs = H` this is the `A H^T` term of the W update.
    pub fn mul_dense_t(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != rhs.cols() {
            return Err(Error::shape(
                "matmul_t",
                format!("{:?} times {:?}^T", self.shape(), rhs.shape()),
            ));
        }
        match self {
            Matrix::Dense(m) => m.matmul_t(rhs),
            Matrix::Sparse(_) => {
                let r = rhs.rows();
                let mut out = vec![0.0; self.rows() * r];
                for i in 0..self.rows() {
                    let acc = &mut out[i * r..(i + 1) * r];
                    self.for_each_in_row(i, |j, a| {
                        for (k, o) in acc.iter_mut().enumerate() {
                            *o += a * rhs.get(k, j);
                        }
                    });
                }
                Ok(DenseMatrix::from_kernel(self.rows(), r, out))
            }
        }
    }

    /// `lhs^T * self`; with `lhs = W` this is the `W^T A` term of the H update.
    pub fn t_mul_by(&self, lhs: &DenseMatrix) -> Result<DenseMatrix> {
        if lhs.rows() != self.rows() {
            return Err(Error::shape(
                "matmul",
                format!("{:?}^T times {:?}", lhs.shape(), self.shape()),
            ));
        }
        let (r, n) = (lhs.cols(), self.cols());
        let mut out = vec![0.0; r * n];
        for i in 0..self.rows() {
            let w = lhs.row(i);
            self.for_each_in_row(i, |j, a| {
                for (k, &wk) in w.iter().enumerate() {
                    out[k * n + j] += wk * a;
                }
            });
        }
        Ok(DenseMatrix::from_kernel(r, n, out))
    }
}

/// Product of two data matrices. A sparse right operand is densified.
pub fn matmul(lhs: &Matrix, rhs: &Matrix) -> Result<DenseMatrix> {
    match rhs {
        Matrix::Dense(b) => lhs.mul_dense(b),
        Matrix::Sparse(b) => lhs.mul_dense(&b.to_dense()),
    }
}

/// `A^T 1`: the per-column sums of a dense or sparse matrix.
pub fn column_sums(a: &Matrix) -> Vector {
    a.column_sums()
}

/// The multiplicative-update kernel `x * num / (den + eps)`, elementwise.
pub fn elementwise_mul_div(
    x: &DenseMatrix,
    num: &DenseMatrix,
    den: &DenseMatrix,
    eps: f64,
) -> Result<DenseMatrix> {
    if x.shape() != num.shape() || x.shape() != den.shape() {
        return Err(Error::shape(
            "elementwise_mul_div",
            format!("{:?}, {:?}, {:?}", x.shape(), num.shape(), den.shape()),
        ));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::invalid(format!("eps must be >= 0, got {eps}")));
    }
    let data = mul_div_slices(x.as_slice(), num.as_slice(), den.as_slice(), eps);
    Ok(DenseMatrix::from_kernel(x.rows, x.cols, data))
}

/// Shared kernel for matrices and vectors. A zero in `x` stays zero even
/// when `den + eps` is zero, which keeps 0/0 from leaking NaN.
pub(crate) fn mul_div_slices(x: &[f64], num: &[f64], den: &[f64], eps: f64) -> Vec<f64> {
    x.iter()
        .zip(num)
        .zip(den)
        .map(|((&x, &n), &d)| if x == 0.0 { 0.0 } else { x * n / (d + eps) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn matmul_identity() {
        let id = dense(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b = dense(&[&[5.0, 6.0], &[7.0, 8.0]]);
        assert_eq!(id.matmul(&b).unwrap(), b);
    }

    #[test]
    fn matmul_row_times_column() {
        let a = dense(&[&[1.0, 2.0]]);
        let b = dense(&[&[3.0], &[4.0]]);
        assert_eq!(a.matmul(&b).unwrap(), dense(&[&[11.0]]));
    }

    #[test]
    fn matmul_sparse_times_dense() {
        let s = SparseMatrix::from_triplets(2, 2, [(0, 1, 2.0)]).unwrap();
        let b = Matrix::Dense(dense(&[&[1.0], &[1.0]]));
        let out = matmul(&Matrix::Sparse(s), &b).unwrap();
        assert_eq!(out, dense(&[&[2.0], &[0.0]]));
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = dense(&[&[1.0, 2.0]]);
        assert!(matches!(a.matmul(&a), Err(Error::Shape { .. })));
    }

    #[test]
    fn column_sums_cases() {
        let a = Matrix::Dense(dense(&[&[1.0, 2.0], &[3.0, 4.0]]));
        assert_eq!(column_sums(&a).as_slice(), &[4.0, 6.0]);
        let z = Matrix::Dense(DenseMatrix::zeros(2, 3));
        assert_eq!(column_sums(&z).as_slice(), &[0.0, 0.0, 0.0]);
        let s = Matrix::Sparse(SparseMatrix::from_triplets(2, 2, [(1, 1, 5.0)]).unwrap());
        assert_eq!(column_sums(&s).as_slice(), &[0.0, 5.0]);
    }

    #[test]
    fn mul_div_cases() {
        let one = |v: f64| dense(&[&[v]]);
        let r = elementwise_mul_div(&one(2.0), &one(3.0), &one(3.0), 0.0).unwrap();
        assert_eq!(r, one(2.0));
        let r = elementwise_mul_div(&one(1.0), &one(4.0), &one(2.0), 0.0).unwrap();
        assert_eq!(r, one(2.0));
        let r = elementwise_mul_div(&one(0.0), &one(9.0), &one(0.0), 1e-9).unwrap();
        assert_eq!(r, one(0.0));
        // zero numerator and denominator with eps = 0 must not produce NaN
        let r = elementwise_mul_div(&one(0.0), &one(0.0), &one(0.0), 0.0).unwrap();
        assert_eq!(r, one(0.0));
    }

    #[test]
    fn mul_div_shape_mismatch() {
        let a = DenseMatrix::zeros(1, 2);
        let b = DenseMatrix::zeros(2, 1);
        assert!(elementwise_mul_div(&a, &a, &b, 0.0).is_err());
    }

    #[test]
    fn constructors_reject_negative_and_nan() {
        let err = DenseMatrix::new(2, 2, vec![1.0, 2.0, -3.0, 4.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidEntry { row: 1, col: 0, .. }));
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Vector::new(vec![0.0, -1e-300]).is_err());
        assert!(SparseMatrix::from_triplets(1, 1, [(0, 0, 0.0)]).is_err());
        assert!(SparseMatrix::from_triplets(1, 1, [(0, 0, -1.0)]).is_err());
        assert!(SparseMatrix::from_triplets(1, 1, [(1, 0, 1.0)]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let s = SparseMatrix::from_triplets(2, 3, [(1, 2, 1.0), (0, 1, 1.0), (1, 0, 4.0), (0, 1, 2.0)])
            .unwrap();
        assert_eq!(s.nnz(), 3);
        assert_eq!(s.row(0), (&[1usize][..], &[3.0][..]));
        assert_eq!(s.row(1), (&[0usize, 2][..], &[4.0, 1.0][..]));
    }

    #[test]
    fn vstack_and_slice_invert() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let b = SparseMatrix::from_triplets(1, 2, [(0, 1, 3.0)]).unwrap();
        let s = SparseMatrix::vstack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.shape(), (3, 2));
        assert_eq!(s.row_slice(0, 2), a);
        assert_eq!(s.row_slice(2, 3), b);
    }

    #[test]
    fn select_columns_agrees_for_dense_and_sparse() {
        let d = dense(&[&[1.0, 0.0, 2.0], &[0.0, 3.0, 4.0]]);
        let s = SparseMatrix::from_dense(&d);
        let keep = [2, 0];
        assert_eq!(d.select_columns(&keep).unwrap(), dense(&[&[2.0, 1.0], &[4.0, 0.0]]));
        assert_eq!(s.select_columns(&keep).unwrap().to_dense(), d.select_columns(&keep).unwrap());
        assert!(d.select_columns(&[3]).is_err());
        assert!(s.select_columns(&[3]).is_err());
    }

    #[test]
    fn transposed_products_match_plain_products() {
        let a = dense(&[&[1.0, 2.0, 0.0], &[0.5, 0.0, 3.0]]);
        let h = dense(&[&[1.0, 1.0, 2.0], &[0.0, 4.0, 1.0]]);
        let w = dense(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let am = Matrix::Dense(a.clone());
        assert_eq!(am.mul_dense_t(&h).unwrap(), a.matmul(&h.transpose()).unwrap());
        assert_eq!(am.t_mul_by(&w).unwrap(), w.transpose().matmul(&a).unwrap());
        assert_eq!(w.gram(), w.transpose().matmul(&w).unwrap());
    }
}
