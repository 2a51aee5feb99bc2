//! Synthetic stratified data: `A(i) = U(i) V(i) + 1 v_true(i)^T` with
//! uniform `[0, 1]` factors and a uniform planted shift per stratum.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{RngAlgorithm, StrataDataset};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, Matrix, Vector};

/// Whether the right factor `V` is drawn once for all strata or once per stratum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    /// One `V` shared by every stratum: rows of each stratum come from the
    /// same distribution before the shift is added.
    #[default]
    Shared,
    /// An independent `V(i)` per stratum.
    PerStratum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: Vec<usize>,
    pub cols: usize,
    pub inner_rank: usize,
    /// `(low, high)` bounds of each stratum's planted shift entries.
    pub shifts: Vec<(f64, f64)>,
    pub basis: Basis,
    pub seed: u64,
    #[serde(default)]
    pub rng: RngAlgorithm,
}

impl SyntheticSpec {
    /// Four 100x100 strata, inner rank 5, stratum `i` (1-based) shifted by
    /// entries uniform on `[i - 1, i]`.
    pub fn paper(seed: u64) -> Self {
        Self::uniform_shifts(4, 100, 100, 5, seed)
    }

    /// `strata` strata of `rows x cols` with shift bounds `[i - 1, i]`.
    pub fn uniform_shifts(strata: usize, rows: usize, cols: usize, inner_rank: usize, seed: u64) -> Self {
        Self {
            rows: vec![rows; strata],
            cols,
            inner_rank,
            shifts: (0..strata).map(|i| (i as f64, i as f64 + 1.0)).collect(),
            basis: Basis::Shared,
            seed,
            rng: RngAlgorithm::ChaCha8,
        }
    }

    pub fn strata(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::invalid("synthetic spec needs at least one stratum"));
        }
        if self.shifts.len() != self.rows.len() {
            return Err(Error::invalid(format!(
                "{} shift ranges for {} strata",
                self.shifts.len(),
                self.rows.len()
            )));
        }
        if self.rows.contains(&0) || self.cols == 0 {
            return Err(Error::invalid("every stratum needs at least one row and one column"));
        }
        for (i, &(lo, hi)) in self.shifts.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::invalid(format!(
                    "stratum {i}: shift range [{lo}, {hi}] must satisfy 0 <= low <= high"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub dataset: StrataDataset,
    /// The planted shift of each stratum.
    pub v_true: Vec<Vector>,
}

/// Draw order, each row-major: the shared `V` (if any), then per stratum
/// `U(i)`, `V(i)` (per-stratum basis only), `v_true(i)`.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = spec.rng.seeded(spec.seed);
    let (n, k) = (spec.cols, spec.inner_rank);
    let mut uniform = |len: usize, lo: f64, hi: f64| -> Vec<f64> {
        (0..len).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect()
    };
    let shared = match spec.basis {
        Basis::Shared => Some(DenseMatrix::from_kernel(k, n, uniform(k * n, 0.0, 1.0))),
        Basis::PerStratum => None,
    };
    let mut strata = Vec::with_capacity(spec.strata());
    let mut v_true = Vec::with_capacity(spec.strata());
    for (&m, &(lo, hi)) in spec.rows.iter().zip(&spec.shifts) {
        let u = DenseMatrix::from_kernel(m, k, uniform(m * k, 0.0, 1.0));
        let v = match &shared {
            Some(v) => v.clone(),
            None => DenseMatrix::from_kernel(k, n, uniform(k * n, 0.0, 1.0)),
        };
        let shift = uniform(n, lo, hi);
        let mut a = u.matmul(&v)?.into_vec();
        for row in a.chunks_exact_mut(n) {
            for (x, s) in row.iter_mut().zip(&shift) {
                *x += s;
            }
        }
        strata.push(Matrix::Dense(DenseMatrix::from_kernel(m, n, a)));
        v_true.push(Vector::from_kernel(shift));
    }
    Ok(SyntheticDataset {
        dataset: StrataDataset::new(strata)?,
        v_true,
    })
}
