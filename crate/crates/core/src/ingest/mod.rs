//! Reading and writing datasets, vocabularies and fitted models.

mod manifest;
mod store;
mod text;
mod tfidf;

pub use manifest::{
    load_manifest, FitDefaults, LoadedData, Manifest, StratumEntry, StratumFormat, Transform,
};
pub use store::{load_model, save_model, v_file, w_file, ModelMetadata, StoredModel, StratumMeta, METADATA_FILE};
pub use text::{
    load_dense_csv, load_sparse_coo, load_vector_csv, load_vocabulary, parse_dense_csv,
    write_dense_csv, write_sparse_coo, write_vector_csv, write_vocabulary,
};
pub use tfidf::{idf, tfidf, tfidf_strata};
