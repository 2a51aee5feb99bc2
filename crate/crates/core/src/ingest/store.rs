//! Model directories: `H.csv`, `W_<i>.csv`, `v_<i>.csv` (one value per line)
//! and a `model.json` describing shapes, stratum names and the fit config.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::text::{load_dense_csv, load_vector_csv, write_dense_csv, write_vector_csv};
use crate::engine::{FitConfig, Model};
use crate::error::{Error, Result};

pub const METADATA_FILE: &str = "model.json";
const FORMAT_TAG: &str = "stratified-nmf-model";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumMeta {
    pub name: String,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub format: String,
    pub version: u32,
    pub rank: usize,
    pub n_cols: usize,
    pub strata: Vec<StratumMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<FitConfig>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredModel {
    pub model: Model,
    pub names: Vec<String>,
    pub config: Option<FitConfig>,
}

pub fn w_file(i: usize) -> String {
    format!("W_{i}.csv")
}

pub fn v_file(i: usize) -> String {
    format!("v_{i}.csv")
}

/// Writes the model into `dir`, creating it if needed.
pub fn save_model(dir: impl AsRef<Path>, model: &Model, names: &[String], config: Option<&FitConfig>) -> Result<()> {
    let dir = dir.as_ref();
    if names.len() != model.n_strata() {
        return Err(Error::invalid(format!(
            "{} names for {} strata",
            names.len(),
            model.n_strata()
        )));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_dense_csv(dir.join("H.csv"), model.h())?;
    for (i, (w, v)) in model.w().iter().zip(model.v()).enumerate() {
        write_dense_csv(dir.join(w_file(i)), w)?;
        write_vector_csv(dir.join(v_file(i)), v)?;
    }
    let meta = ModelMetadata {
        format: FORMAT_TAG.to_string(),
        version: 1,
        rank: model.rank(),
        n_cols: model.n_cols(),
        strata: names
            .iter()
            .zip(model.w())
            .map(|(name, w)| StratumMeta {
                name: name.clone(),
                rows: w.rows(),
            })
            .collect(),
        config: config.cloned(),
    };
    let path = dir.join(METADATA_FILE);
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(path, e))
}

fn check_shape(file: &str, found: (usize, usize), expected: (usize, usize)) -> Result<()> {
    if found != expected {
        return Err(Error::invalid(format!(
            "{file} is {}x{} but {METADATA_FILE} implies {}x{}",
            found.0, found.1, expected.0, expected.1
        )));
    }
    Ok(())
}

pub fn load_model(dir: impl AsRef<Path>) -> Result<StoredModel> {
    let dir = dir.as_ref();
    let meta_path = dir.join(METADATA_FILE);
    let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: ModelMetadata = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: meta_path.clone(),
        source,
    })?;
    if meta.format != FORMAT_TAG {
        return Err(Error::invalid(format!(
            "{}: unknown format {:?}",
            meta_path.display(),
            meta.format
        )));
    }
    let h = load_dense_csv(dir.join("H.csv"))?;
    check_shape("H.csv", h.shape(), (meta.rank, meta.n_cols))?;
    let mut w = Vec::with_capacity(meta.strata.len());
    let mut v = Vec::with_capacity(meta.strata.len());
    for (i, s) in meta.strata.iter().enumerate() {
        let wi = load_dense_csv(dir.join(w_file(i)))?;
        check_shape(&w_file(i), wi.shape(), (s.rows, meta.rank))?;
        let vi = load_vector_csv(dir.join(v_file(i)))?;
        check_shape(&v_file(i), (vi.len(), 1), (meta.n_cols, 1))?;
        w.push(wi);
        v.push(vi);
    }
    Ok(StoredModel {
        model: Model::new(v, w, h)?,
        names: meta.strata.into_iter().map(|s| s.name).collect(),
        config: meta.config,
    })
}
