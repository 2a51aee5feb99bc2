//! Smoothed TF-IDF with unit row norms.
//!
//! For `D` documents (rows) and a term with document frequency `df`:
//! `idf = ln((1 + D) / (1 + df)) + 1`, each stored count becomes
//! `count * idf`, and each row is then scaled to unit Euclidean norm.
//! Empty rows stay empty.

use crate::error::Result;
use crate::matrix::SparseMatrix;

pub fn idf(counts: &SparseMatrix) -> Vec<f64> {
    let mut df = vec![0usize; counts.cols()];
    for (_, j, _) in counts.triplets() {
        df[j] += 1;
    }
    let docs = counts.rows() as f64;
    df.into_iter()
        .map(|d| ((1.0 + docs) / (1.0 + d as f64)).ln() + 1.0)
        .collect()
}

/// TF-IDF over a single corpus whose rows are documents.
pub fn tfidf(counts: &SparseMatrix) -> SparseMatrix {
    let weights = idf(counts);
    let weighted = counts.map_values(|_, j, c| c * weights[j]);
    let norms: Vec<f64> = (0..weighted.rows())
        .map(|i| weighted.row(i).1.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    weighted.map_values(|i, _, x| x / norms[i])
}

/// TF-IDF with document frequencies taken over all strata together, so the
/// same term gets the same weight in every stratum.
pub fn tfidf_strata(counts: &[SparseMatrix]) -> Result<Vec<SparseMatrix>> {
    let stacked = tfidf(&SparseMatrix::vstack(counts)?);
    let mut start = 0;
    Ok(counts
        .iter()
        .map(|c| {
            let part = stacked.row_slice(start, start + c.rows());
            start += c.rows();
            part
        })
        .collect())
}
