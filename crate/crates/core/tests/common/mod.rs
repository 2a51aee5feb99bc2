#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stratified_nmf::engine::{Model, StrataDataset};
use stratified_nmf::matrix::{DenseMatrix, Matrix, SparseMatrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|a - b| <= tol * max(|a|, |b|)`; two zeros compare equal.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

pub fn dense_uniform(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DenseMatrix {
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

pub fn vector_uniform(rng: &mut impl Rng, len: usize, lo: f64, hi: f64) -> Vector {
    Vector::new((0..len).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// A random stratum: dense, or sparse at roughly 30% density.
pub fn random_stratum(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    if rng.gen_bool(0.5) {
        dense_uniform(rng, rows, cols, 0.0, 1.0).into()
    } else {
        let mut triplets = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.3) {
                    triplets.push((i, j, rng.gen_range(0.01..1.0)));
                }
            }
        }
        SparseMatrix::from_triplets(rows, cols, triplets).unwrap().into()
    }
}

pub struct Instance {
    pub data: StrataDataset,
    pub model: Model,
}

/// Random dataset and strictly positive model with `s <= max_s`, `m_i <= max_m`,
/// `n <= max_n`, `r <= max_r`.
pub fn random_instance(rng: &mut impl Rng, max_s: usize, max_m: usize, max_n: usize, max_r: usize) -> Instance {
    let s = rng.gen_range(1..=max_s);
    let n = rng.gen_range(1..=max_n);
    let r = rng.gen_range(1..=max_r);
    let rows: Vec<usize> = (0..s).map(|_| rng.gen_range(1..=max_m)).collect();
    let data = StrataDataset::new(rows.iter().map(|&m| random_stratum(rng, m, n)).collect()).unwrap();
    let v = (0..s).map(|_| vector_uniform(rng, n, 0.05, 1.0)).collect();
    let w = rows.iter().map(|&m| dense_uniform(rng, m, r, 0.05, 1.0)).collect();
    let h = dense_uniform(rng, r, n, 0.05, 1.0);
    Instance {
        data,
        model: Model::new(v, w, h).unwrap(),
    }
}

/// `A(i) = 1 v(i)^T + W(i) H`, so the model reconstructs the data.
pub fn exact_dataset(model: &Model) -> StrataDataset {
    let h = model.h();
    let strata = model
        .w()
        .iter()
        .zip(model.v())
        .map(|(w, v)| {
            let wh = w.matmul(h).unwrap();
            let vals = (0..wh.rows())
                .flat_map(|i| (0..wh.cols()).map(move |j| (i, j)))
                .map(|(i, j)| v[j] + wh.get(i, j))
                .collect();
            DenseMatrix::new(wh.rows(), wh.cols(), vals).unwrap().into()
        })
        .collect();
    StrataDataset::new(strata).unwrap()
}

/// Every parameter of the model as one flat list, in a fixed order.
pub fn flatten(model: &Model) -> Vec<f64> {
    let mut out: Vec<f64> = model.v().iter().flat_map(|v| v.as_slice().to_vec()).collect();
    for w in model.w() {
        out.extend_from_slice(w.as_slice());
    }
    out.extend_from_slice(model.h().as_slice());
    out
}

/// `f_next <= f_prev * (1 + tol)`.
pub fn non_increasing(prev: f64, next: f64, tol: f64) -> bool {
    next <= prev * (1.0 + tol)
}
