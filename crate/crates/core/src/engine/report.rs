use super::Model;
use crate::error::{Error, Result};
use crate::matrix::Vector;

/// Mean entry of each `v(i)`.
pub fn strata_means(model: &Model) -> Vec<f64> {
    model.v().iter().map(Vector::mean).collect()
}

/// Rescales `v` to sum to 1. `stratum` only labels the error.
pub fn normalized(v: &Vector, stratum: usize) -> Result<Vector> {
    let total = v.sum();
    if total <= 0.0 {
        return Err(Error::invalid(format!(
            "v({stratum}) sums to zero and cannot be normalized"
        )));
    }
    Ok(Vector::from_kernel(v.as_slice().iter().map(|x| x / total).collect()))
}

/// Every `v(i)` rescaled to sum to 1.
pub fn normalize_v(model: &Model) -> Result<Vec<Vector>> {
    model.v().iter().enumerate().map(|(i, v)| normalized(v, i)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopFeature {
    pub index: usize,
    pub label: Option<String>,
    pub weight: f64,
}

impl TopFeature {
    /// The vocabulary label when one was supplied, the column index otherwise.
    pub fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.index.to_string())
    }
}

/// The `k` largest entries of `v(stratum)`, descending, ties broken by
/// ascending index.
pub fn topk_features(
    model: &Model,
    stratum: usize,
    k: usize,
    vocab: Option<&[String]>,
) -> Result<Vec<TopFeature>> {
    let Some(v) = model.v().get(stratum) else {
        return Err(Error::invalid(format!(
            "stratum {stratum} out of range for {} strata",
            model.n_strata()
        )));
    };
    if k == 0 || k > v.len() {
        return Err(Error::invalid(format!("k must be in 1..={}, got {k}", v.len())));
    }
    if let Some(vocab) = vocab {
        if vocab.len() != v.len() {
            return Err(Error::invalid(format!(
                "vocabulary has {} entries for {} columns",
                vocab.len(),
                v.len()
            )));
        }
    }
    let values = v.as_slice();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|index| TopFeature {
            index,
            label: vocab.map(|voc| voc[index].clone()),
            weight: values[index],
        })
        .collect())
}

/// Fraction of entries strictly above `threshold`; 0 for an empty vector.
pub fn sparsity(v: &Vector, threshold: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let above = v.as_slice().iter().filter(|&&x| x > threshold).count();
    above as f64 / v.len() as f64
}
