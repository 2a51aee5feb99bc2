use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::text::{load_dense_csv, load_sparse_coo, load_vocabulary};
use super::tfidf::tfidf_strata;
use crate::engine::StrataDataset;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StratumFormat {
    DenseCsv,
    SparseCoo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    /// Treat the strata as term counts and replace them with a TF-IDF
    /// matrix computed over all strata jointly.
    Tfidf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumEntry {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    pub format: StratumFormat,
    /// Row count; required for `sparse-coo`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

/// Fit settings a dataset recommends; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
}

/// JSON description of a stratified dataset.
///
/// ```json
/// {
///   "n_cols": 3,
///   "vocabulary": "vocab.txt",
///   "exclude_columns": [2],
///   "transform": "tfidf",
///   "strata": [
///     { "name": "a", "path": "a.coo", "format": "sparse-coo", "rows": 10 },
///     { "name": "b", "path": "b.csv", "format": "dense-csv" }
///   ]
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Column count of every stratum file, before any exclusion.
    pub n_cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<PathBuf>,
    /// Columns dropped after loading (0-based).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude_columns: Vec<usize>,
    #[serde(default)]
    pub transform: Transform,
    pub strata: Vec<StratumEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_defaults: Option<FitDefaults>,
}

/// A dataset loaded through a manifest, with its vocabulary after column exclusion.
#[derive(Clone, Debug)]
pub struct LoadedData {
    pub manifest: Manifest,
    pub dataset: StrataDataset,
    pub vocabulary: Option<Vec<String>>,
}

impl Manifest {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        if self.strata.is_empty() {
            return Err(Error::invalid("manifest lists no strata"));
        }
        for (i, s) in self.strata.iter().enumerate() {
            if self.strata[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::invalid(format!("duplicate stratum name {:?}", s.name)));
            }
            if s.format == StratumFormat::SparseCoo && s.rows.is_none() {
                return Err(Error::invalid(format!("stratum {:?}: sparse-coo needs \"rows\"", s.name)));
            }
        }
        if let Some(&c) = self.exclude_columns.iter().find(|&&c| c >= self.n_cols) {
            return Err(Error::invalid(format!(
                "excluded column {c} is outside {} columns",
                self.n_cols
            )));
        }
        Ok(())
    }

    /// Columns that survive `exclude_columns`, in order.
    pub fn kept_columns(&self) -> Vec<usize> {
        (0..self.n_cols).filter(|c| !self.exclude_columns.contains(c)).collect()
    }

    /// Loads every stratum, drops excluded columns, then applies the transform.
    pub fn load(self, base_dir: &Path) -> Result<LoadedData> {
        let keep = self.kept_columns();
        let mut strata = Vec::with_capacity(self.strata.len());
        for entry in &self.strata {
            let path = base_dir.join(&entry.path);
            let m: Matrix = match entry.format {
                StratumFormat::DenseCsv => load_dense_csv(&path)?.into(),
                StratumFormat::SparseCoo => {
                    load_sparse_coo(&path, entry.rows.unwrap_or_default(), self.n_cols)?.into()
                }
            };
            if m.cols() != self.n_cols {
                return Err(Error::shape(
                    "manifest",
                    format!("{} has {} columns, manifest declares {}", path.display(), m.cols(), self.n_cols),
                ));
            }
            if let Some(rows) = entry.rows {
                if m.rows() != rows {
                    return Err(Error::shape(
                        "manifest",
                        format!("{} has {} rows, manifest declares {rows}", path.display(), m.rows()),
                    ));
                }
            }
            let m = if self.exclude_columns.is_empty() {
                m
            } else {
                m.select_columns(&keep)?
            };
            strata.push(m);
        }

        if self.transform == Transform::Tfidf {
            let counts: Vec<SparseMatrix> = strata
                .into_iter()
                .map(|m| match m {
                    Matrix::Sparse(s) => s,
                    Matrix::Dense(d) => SparseMatrix::from_dense(&d),
                })
                .collect();
            strata = tfidf_strata(&counts)?.into_iter().map(Matrix::Sparse).collect();
        }

        let vocabulary = match &self.vocabulary {
            None => None,
            Some(p) => {
                let path = base_dir.join(p);
                let vocab = load_vocabulary(&path)?;
                if vocab.len() != self.n_cols {
                    return Err(Error::shape(
                        "manifest",
                        format!("{} has {} tokens for {} columns", path.display(), vocab.len(), self.n_cols),
                    ));
                }
                Some(keep.iter().map(|&c| vocab[c].clone()).collect())
            }
        };

        let names = self.strata.iter().map(|s| s.name.clone()).collect();
        let dataset = StrataDataset::with_names(strata, names)?;
        Ok(LoadedData {
            manifest: self,
            dataset,
            vocabulary,
        })
    }
}

/// Reads a manifest and the files it points to.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<LoadedData> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    Manifest::from_path(path)?.load(base)
}
