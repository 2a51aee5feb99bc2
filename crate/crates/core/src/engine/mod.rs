//! Stratified NMF: each stratum's data `A(i)` is approximated as
//! `1 v(i)^T + W(i) H`, where `H` is shared by every stratum and `v(i)` is a
//! non-negative per-stratum shift.
//!
//! The objective is `sum_i ||A(i) - 1 v(i)^T - W(i) H||_F^2`, minimised by
//! multiplicative updates that keep every parameter non-negative and never
//! increase the objective.

mod fit;
mod report;
mod update;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Matrix, Vector};

pub use fit::{fit, fit_from, LossRecord, LossTrace};
pub use report::{normalize_v, normalized, sparsity, strata_means, topk_features, TopFeature};

/// Ordered strata sharing a column count.
#[derive(Clone, Debug)]
pub struct StrataDataset {
    strata: Vec<Matrix>,
    names: Vec<String>,
    n: usize,
    column_sums: Vec<Vector>,
    total_sq: f64,
}

impl StrataDataset {
    /// Strata are named `stratum_0`, `stratum_1`, ...
    pub fn new(strata: Vec<Matrix>) -> Result<Self> {
        let names = (0..strata.len()).map(|i| format!("stratum_{i}")).collect();
        Self::with_names(strata, names)
    }

    pub fn with_names(strata: Vec<Matrix>, names: Vec<String>) -> Result<Self> {
        let Some(first) = strata.first() else {
            return Err(Error::invalid("a dataset needs at least one stratum"));
        };
        if names.len() != strata.len() {
            return Err(Error::invalid(format!(
                "{} names for {} strata",
                names.len(),
                strata.len()
            )));
        }
        let n = first.cols();
        for (i, a) in strata.iter().enumerate() {
            if a.cols() != n {
                return Err(Error::shape(
                    "StrataDataset",
                    format!("stratum {i} has {} columns, expected {n}", a.cols()),
                ));
            }
            if a.rows() == 0 {
                return Err(Error::shape("StrataDataset", format!("stratum {i} has no rows")));
            }
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate stratum name {name:?}")));
            }
        }
        let column_sums = strata.iter().map(Matrix::column_sums).collect();
        let total_sq = strata.iter().map(Matrix::frobenius_sq).sum();
        Ok(Self {
            strata,
            names,
            n,
            column_sums,
            total_sq,
        })
    }

    pub fn strata(&self) -> &[Matrix] {
        &self.strata
    }

    pub fn stratum(&self, i: usize) -> &Matrix {
        &self.strata[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of strata.
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Shared column count.
    pub fn n_cols(&self) -> usize {
        self.n
    }

    pub fn rows(&self, i: usize) -> usize {
        self.strata[i].rows()
    }

    /// `A(i)^T 1`, cached at construction.
    pub fn column_sums(&self, i: usize) -> &Vector {
        &self.column_sums[i]
    }

    /// `sum_i ||A(i)||_F^2`.
    pub fn total_sq_norm(&self) -> f64 {
        self.total_sq
    }
}

/// Random number generator used for initialization and synthetic data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngAlgorithm {
    /// `rand_chacha::ChaCha8Rng` seeded with `seed_from_u64`; uniforms come from
    /// `Rng::gen::<f64>()` scaled to the target interval.
    #[default]
    ChaCha8,
}

impl RngAlgorithm {
    pub(crate) fn seeded(self, seed: u64) -> ChaCha8Rng {
        match self {
            RngAlgorithm::ChaCha8 => ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

pub const DEFAULT_INNER_V_UPDATES: usize = 2;
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub rank: usize,
    /// Outer iterations `N`.
    pub outer_iters: usize,
    /// v updates per outer iteration `M`.
    pub inner_v_updates: usize,
    /// Added to every update denominator.
    pub eps: f64,
    pub seed: u64,
    /// Record the loss every this many outer iterations (and always after the last).
    pub log_every: usize,
    #[serde(default)]
    pub rng: RngAlgorithm,
}

impl FitConfig {
    pub fn new(rank: usize, outer_iters: usize) -> Self {
        Self {
            rank,
            outer_iters,
            inner_v_updates: DEFAULT_INNER_V_UPDATES,
            eps: DEFAULT_EPS,
            seed: 0,
            log_every: 1,
            rng: RngAlgorithm::ChaCha8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        if self.inner_v_updates == 0 {
            return Err(Error::invalid("inner v updates must be at least 1"));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::invalid(format!("eps must be finite and >= 0, got {}", self.eps)));
        }
        if self.log_every == 0 {
            return Err(Error::invalid("log_every must be at least 1"));
        }
        Ok(())
    }
}

/// Parameters of a stratified factorization: one shift `v(i)` and one
/// coefficient matrix `W(i)` per stratum, and the shared topics `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    v: Vec<Vector>,
    w: Vec<DenseMatrix>,
    h: DenseMatrix,
}

impl Model {
    pub fn new(v: Vec<Vector>, w: Vec<DenseMatrix>, h: DenseMatrix) -> Result<Self> {
        if v.is_empty() || v.len() != w.len() {
            return Err(Error::shape(
                "Model",
                format!("{} shift vectors for {} coefficient matrices", v.len(), w.len()),
            ));
        }
        let (r, n) = h.shape();
        for (i, (vi, wi)) in v.iter().zip(&w).enumerate() {
            if vi.len() != n {
                return Err(Error::shape(
                    "Model",
                    format!("v({i}) has length {}, H has {n} columns", vi.len()),
                ));
            }
            if wi.cols() != r {
                return Err(Error::shape(
                    "Model",
                    format!("W({i}) has {} columns, H has {r} rows", wi.cols()),
                ));
            }
        }
        Ok(Self { v, w, h })
    }

    pub fn v(&self) -> &[Vector] {
        &self.v
    }

    pub fn w(&self) -> &[DenseMatrix] {
        &self.w
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.h.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.h.cols()
    }

    pub fn n_strata(&self) -> usize {
        self.v.len()
    }

    pub fn into_parts(self) -> (Vec<Vector>, Vec<DenseMatrix>, DenseMatrix) {
        (self.v, self.w, self.h)
    }

    pub fn check_compatible(&self, data: &StrataDataset) -> Result<()> {
        if data.len() != self.n_strata() || data.n_cols() != self.n_cols() {
            return Err(Error::shape(
                "Model",
                format!(
                    "model has {} strata x {} columns, dataset has {} x {}",
                    self.n_strata(),
                    self.n_cols(),
                    data.len(),
                    data.n_cols()
                ),
            ));
        }
        for (i, w) in self.w.iter().enumerate() {
            if w.rows() != data.rows(i) {
                return Err(Error::shape(
                    "Model",
                    format!("W({i}) has {} rows, stratum has {}", w.rows(), data.rows(i)),
                ));
            }
        }
        Ok(())
    }

    /// Smallest entry over every parameter.
    pub fn min_entry(&self) -> f64 {
        let v = self.v.iter().flat_map(|v| v.as_slice().iter().copied());
        let w = self.w.iter().flat_map(|w| w.as_slice().iter().copied());
        v.chain(w)
            .chain(self.h.as_slice().iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Random initial model. Draws, in this order and each row-major: `H` then
/// `W(1)..W(s)` uniform on `[0, 1/sqrt(r)]`, then `v(1)..v(s)` uniform on `[0, 1]`.
pub fn init_model(data: &StrataDataset, config: &FitConfig) -> Result<Model> {
    config.validate()?;
    let mut rng = config.rng.seeded(config.seed);
    let r = config.rank;
    let n = data.n_cols();
    let scale = 1.0 / (r as f64).sqrt();
    let mut draw = |len: usize, scale: f64| -> Vec<f64> {
        (0..len).map(|_| rng.gen::<f64>() * scale).collect()
    };
    let h = DenseMatrix::from_kernel(r, n, draw(r * n, scale));
    let w = (0..data.len())
        .map(|i| DenseMatrix::from_kernel(data.rows(i), r, draw(data.rows(i) * r, scale)))
        .collect();
    let v = (0..data.len())
        .map(|_| Vector::from_kernel(draw(n, 1.0)))
        .collect();
    Model::new(v, w, h)
}

/// `sum_i ||A(i) - 1 v(i)^T - W(i) H||_F^2`, accumulated row by row.
pub fn objective(model: &Model, data: &StrataDataset) -> Result<f64> {
    model.check_compatible(data)?;
    Ok((0..data.len()).map(|i| stratum_objective(model, data, i)).sum())
}

pub(crate) fn stratum_objective(model: &Model, data: &StrataDataset, i: usize) -> f64 {
    let a = data.stratum(i);
    let (v, w, h) = (&model.v[i], &model.w[i], &model.h);
    let mut residual = vec![0.0; data.n_cols()];
    let mut total = 0.0;
    for row in 0..a.rows() {
        residual.copy_from_slice(v.as_slice());
        for (k, &wk) in w.row(row).iter().enumerate() {
            for (res, &hk) in residual.iter_mut().zip(h.row(k)) {
                *res += wk * hk;
            }
        }
        // residual currently holds the reconstruction; subtract the data
        a.for_each_in_row(row, |j, x| residual[j] -= x);
        total += residual.iter().map(|x| x * x).sum::<f64>();
    }
    total
}

/// Square root of the objective.
pub fn loss(model: &Model, data: &StrataDataset) -> Result<f64> {
    Ok(objective(model, data)?.sqrt())
}

/// `sqrt(objective / sum_i ||A(i)||_F^2)`. Fails on an all-zero dataset.
pub fn normalized_loss(model: &Model, data: &StrataDataset) -> Result<f64> {
    normalize_objective(objective(model, data)?, data)
}

pub(crate) fn normalize_objective(objective: f64, data: &StrataDataset) -> Result<f64> {
    let denom = data.total_sq_norm();
    if denom > 0.0 {
        Ok((objective / denom).sqrt())
    } else {
        Err(Error::invalid("normalized loss is undefined for an all-zero dataset"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn vector(v: &[f64]) -> Vector {
        Vector::new(v.to_vec()).unwrap()
    }

    fn single(a: DenseMatrix) -> StrataDataset {
        StrataDataset::new(vec![a.into()]).unwrap()
    }

    #[test]
    fn dataset_rejects_bad_shapes() {
        assert!(StrataDataset::new(vec![]).is_err());
        let a = Matrix::from(DenseMatrix::zeros(2, 3));
        let b = Matrix::from(DenseMatrix::zeros(2, 2));
        assert!(StrataDataset::new(vec![a.clone(), b]).is_err());
        assert!(StrataDataset::new(vec![DenseMatrix::zeros(0, 3).into()]).is_err());
        let dup = StrataDataset::with_names(vec![a.clone(), a], vec!["x".into(), "x".into()]);
        assert!(dup.is_err());
    }

    #[test]
    fn init_ranges_and_determinism() {
        let data = StrataDataset::new(vec![
            DenseMatrix::zeros(7, 9).into(),
            DenseMatrix::zeros(3, 9).into(),
        ])
        .unwrap();
        let mut cfg = FitConfig::new(4, 0);
        cfg.seed = 11;
        let m = init_model(&data, &cfg).unwrap();
        for w in m.w() {
            assert!(w.as_slice().iter().all(|&x| (0.0..=0.5).contains(&x)));
        }
        assert!(m.h().as_slice().iter().all(|&x| (0.0..=0.5).contains(&x)));
        for v in m.v() {
            assert!(v.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        assert_eq!(m.w()[0].shape(), (7, 4));
        assert_eq!(m.w()[1].shape(), (3, 4));
        assert_eq!(m.h().shape(), (4, 9));
        assert_eq!(init_model(&data, &cfg).unwrap(), m);

        cfg.rank = 1;
        let m1 = init_model(&data, &cfg).unwrap();
        assert!(m1.h().as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        // r = 1 fills H with the raw uniform draws, so some entry must exceed 0.5
        assert!(m1.h().as_slice().iter().any(|&x| x > 0.5));
    }

    #[test]
    fn init_draw_order_is_h_then_w_then_v() {
        let data = StrataDataset::new(vec![
            DenseMatrix::zeros(2, 3).into(),
            DenseMatrix::zeros(1, 3).into(),
        ])
        .unwrap();
        let mut cfg = FitConfig::new(4, 0);
        cfg.seed = 5;
        let m = init_model(&data, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut expect = |x: f64, scale: f64| assert_eq!(x, rng.gen::<f64>() * scale);
        m.h().as_slice().iter().for_each(|&x| expect(x, 0.5));
        m.w().iter().for_each(|w| w.as_slice().iter().for_each(|&x| expect(x, 0.5)));
        m.v().iter().for_each(|v| v.as_slice().iter().for_each(|&x| expect(x, 1.0)));
    }

    #[test]
    fn objective_cases() {
        let data = single(dense(&[&[1.0]]));
        let model = Model::new(vec![vector(&[0.0])], vec![dense(&[&[1.0]])], dense(&[&[2.0]])).unwrap();
        assert_eq!(objective(&model, &data).unwrap(), 1.0);

        let two = StrataDataset::new(vec![dense(&[&[1.0]]).into(), dense(&[&[1.0]]).into()]).unwrap();
        let model2 = Model::new(
            vec![vector(&[0.0]), vector(&[0.0])],
            vec![dense(&[&[1.0]]), dense(&[&[1.0]])],
            dense(&[&[2.0]]),
        )
        .unwrap();
        assert_eq!(objective(&model2, &two).unwrap(), 2.0);
    }

    #[test]
    fn exact_reconstruction_has_zero_loss() {
        // A = 1 v^T + W H with small integers so the arithmetic is exact
        let w = dense(&[&[1.0, 0.0], &[2.0, 1.0]]);
        let h = dense(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0]]);
        let v = vector(&[1.0, 0.0, 2.0]);
        let a = dense(&[&[2.0, 2.0, 2.0], &[3.0, 5.0, 5.0]]);
        let data = single(a);
        let model = Model::new(vec![v], vec![w], h).unwrap();
        assert_eq!(objective(&model, &data).unwrap(), 0.0);
        assert_eq!(loss(&model, &data).unwrap(), 0.0);
        assert_eq!(normalized_loss(&model, &data).unwrap(), 0.0);
    }

    #[test]
    fn loss_and_normalized_loss_arithmetic() {
        // objective 4, ||A||^2 = 16
        let data = single(dense(&[&[4.0]]));
        let model = Model::new(vec![vector(&[0.0])], vec![dense(&[&[1.0]])], dense(&[&[2.0]])).unwrap();
        assert_eq!(objective(&model, &data).unwrap(), 4.0);
        assert_eq!(loss(&model, &data).unwrap(), 2.0);
        assert_eq!(normalized_loss(&model, &data).unwrap(), 0.5);
    }

    #[test]
    fn normalized_loss_on_zero_data_is_an_error() {
        let data = single(DenseMatrix::zeros(1, 1));
        let model = Model::new(vec![vector(&[0.0])], vec![dense(&[&[1.0]])], dense(&[&[1.0]])).unwrap();
        assert!(normalized_loss(&model, &data).is_err());
    }

    #[test]
    fn objective_does_not_clamp_negative_residuals() {
        // reconstruction overshoots: residual is -3
        let data = single(dense(&[&[1.0]]));
        let model = Model::new(vec![vector(&[2.0])], vec![dense(&[&[1.0]])], dense(&[&[2.0]])).unwrap();
        assert_eq!(objective(&model, &data).unwrap(), 9.0);
    }

    #[test]
    fn model_rejects_inconsistent_shapes() {
        let err = Model::new(vec![vector(&[1.0, 2.0])], vec![dense(&[&[1.0]])], dense(&[&[1.0]]));
        assert!(err.is_err());
        let err = Model::new(vec![vector(&[1.0])], vec![dense(&[&[1.0, 1.0]])], dense(&[&[1.0]]));
        assert!(err.is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::new(0, 1).validate().is_err());
        let mut c = FitConfig::new(1, 1);
        assert_eq!(c.inner_v_updates, 2);
        assert_eq!(c.eps, 1e-9);
        c.inner_v_updates = 0;
        assert!(c.validate().is_err());
        let mut c = FitConfig::new(1, 1);
        c.eps = -1.0;
        assert!(c.validate().is_err());
    }
}
