//! Reference computations for checking the engine.
//!
//! Stacking the strata turns the stratified objective into a standard NMF
//! problem `||Â - Ŵ Ĥ||_F^2` with
//!
//! ```text
//!       [ A(1) ]        [ 1 0 .. 0 W(1) ]        [ v(1)^T ]
//!   Â = [  ..  ]    Ŵ = [ 0 1 .. 0 W(2) ]    Ĥ = [   ..   ]
//!       [ A(s) ]        [ .. .. .. .. ]          [ v(s)^T ]
//!                       [ 0 0 .. 1 W(s) ]        [   H    ]
//! ```
//!
//! where each `1`/`0` block is an all-ones/all-zeros column of height `m_i`.
//! The classical Lee–Seung `H` update applied to `Ĥ` reproduces the
//! stratified v and H rules. The W rule has no block counterpart because
//! the indicator columns of `Ŵ` are fixed; it is checked through the
//! `s = 1, v = 0` reduction to the classical `W` update instead.
//!
//! Everything here uses plain index loops over dense copies and shares no
//! kernels with [`crate::matrix`] or [`crate::engine`].

use crate::engine::{Model, StrataDataset};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Vector};

type Grid = Vec<Vec<f64>>;

fn grid(m: &DenseMatrix) -> Grid {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

fn to_dense(g: Grid, cols: usize) -> Result<DenseMatrix> {
    let rows = g.len();
    DenseMatrix::new(rows, cols, g.into_iter().flatten().collect())
}

fn naive_mul(a: &Grid, b: &Grid, inner: usize, cols: usize) -> Grid {
    let mut out = vec![vec![0.0; cols]; a.len()];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..inner {
                acc += a[i][k] * b[k][j];
            }
            *o = acc;
        }
    }
    out
}

fn naive_t(a: &Grid, cols: usize) -> Grid {
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

fn ratio_update(x: &Grid, num: &Grid, den: &Grid, eps: f64) -> Grid {
    x.iter()
        .zip(num)
        .zip(den)
        .map(|((xr, nr), dr)| {
            xr.iter()
                .zip(nr)
                .zip(dr)
                // zero entries are absorbing even when the ratio is 0/0
                .map(|((&x, &n), &d)| if x == 0.0 { 0.0 } else { x * n / (d + eps) })
                .collect()
        })
        .collect()
}

fn check_nmf_shapes(a: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
    if a.rows() != w.rows() || a.cols() != h.cols() || w.cols() != h.rows() {
        return Err(Error::shape(
            "standard NMF",
            format!("A {:?}, W {:?}, H {:?}", a.shape(), w.shape(), h.shape()),
        ));
    }
    Ok(())
}

/// Lee–Seung `H <- H * (W^T A) / (W^T W H + eps)`.
pub fn standard_nmf_update_h(a: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    check_nmf_shapes(a, w, h)?;
    let (m, r, n) = (a.rows(), h.rows(), h.cols());
    let (ga, gw, gh) = (grid(a), grid(w), grid(h));
    let wt = naive_t(&gw, r);
    let num = naive_mul(&wt, &ga, m, n);
    let wtw = naive_mul(&wt, &gw, m, r);
    let den = naive_mul(&wtw, &gh, r, n);
    to_dense(ratio_update(&gh, &num, &den, eps), n)
}

/// Lee–Seung `W <- W * (A H^T) / (W H H^T + eps)`.
pub fn standard_nmf_update_w(a: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> Result<DenseMatrix> {
    check_nmf_shapes(a, w, h)?;
    let (r, n) = (h.rows(), h.cols());
    let (ga, gw, gh) = (grid(a), grid(w), grid(h));
    let ht = naive_t(&gh, n);
    let num = naive_mul(&ga, &ht, n, r);
    let wh = naive_mul(&gw, &gh, r, n);
    let den = naive_mul(&wh, &ht, n, r);
    to_dense(ratio_update(&gw, &num, &den, eps), r)
}

/// `||A - W H||_F^2`.
pub fn standard_nmf_objective(a: &DenseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    check_nmf_shapes(a, w, h)?;
    let wh = naive_mul(&grid(w), &grid(h), h.rows(), h.cols());
    let mut total = 0.0;
    for (i, row) in wh.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let d = a.get(i, j) - x;
            total += d * d;
        }
    }
    Ok(total)
}

/// The stacked matrices `(Â, Ŵ, Ĥ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSystem {
    pub a_hat: DenseMatrix,
    pub w_hat: DenseMatrix,
    pub h_hat: DenseMatrix,
    /// Number of strata, i.e. the leading indicator columns of `Ŵ` and shift rows of `Ĥ`.
    pub strata: usize,
}

impl BlockSystem {
    pub fn objective(&self) -> Result<f64> {
        standard_nmf_objective(&self.a_hat, &self.w_hat, &self.h_hat)
    }

    /// `Ŵ Ĥ`, which stacks `1 v(i)^T + W(i) H` over the strata.
    pub fn reconstruction(&self) -> Result<DenseMatrix> {
        let inner = self.w_hat.cols();
        let g = naive_mul(&grid(&self.w_hat), &grid(&self.h_hat), inner, self.h_hat.cols());
        to_dense(g, self.h_hat.cols())
    }
}

pub fn assemble_block(data: &StrataDataset, model: &Model) -> Result<BlockSystem> {
    model.check_compatible(data)?;
    let s = data.len();
    let r = model.rank();
    let n = data.n_cols();
    let mut a_hat = Vec::new();
    let mut w_hat = Vec::new();
    for i in 0..s {
        let a = data.stratum(i);
        let w = &model.w()[i];
        for row in 0..a.rows() {
            a_hat.extend((0..n).map(|j| a.get(row, j)));
            w_hat.extend((0..s).map(|c| if c == i { 1.0 } else { 0.0 }));
            w_hat.extend((0..r).map(|k| w.get(row, k)));
        }
    }
    let total_rows = (0..s).map(|i| data.rows(i)).sum();
    let mut h_hat: Vec<f64> = model.v().iter().flat_map(|v| v.as_slice().to_vec()).collect();
    h_hat.extend((0..r).flat_map(|k| (0..n).map(move |j| (k, j))).map(|(k, j)| model.h().get(k, j)));
    Ok(BlockSystem {
        a_hat: DenseMatrix::new(total_rows, n, a_hat)?,
        w_hat: DenseMatrix::new(total_rows, s + r, w_hat)?,
        h_hat: DenseMatrix::new(s + r, n, h_hat)?,
        strata: s,
    })
}

/// Applies the classical `H` update to `Ĥ` and splits the result back into
/// `(v(1)..v(s), H)`. Every row is updated from the same snapshot.
pub fn block_vh_update(data: &StrataDataset, model: &Model, eps: f64) -> Result<(Vec<Vector>, DenseMatrix)> {
    let block = assemble_block(data, model)?;
    let updated = standard_nmf_update_h(&block.a_hat, &block.w_hat, &block.h_hat, eps)?;
    let s = block.strata;
    let n = updated.cols();
    let g = grid(&updated);
    let v = g[..s].iter().map(|row| Vector::new(row.clone())).collect::<Result<Vec<_>>>()?;
    let h = to_dense(g[s..].to_vec(), n)?;
    Ok((v, h))
}
