pub mod cli;
pub mod datagen;
pub mod engine;
pub mod error;
pub mod ingest;
pub mod matrix;
pub mod oracle;

pub use error::{Error, Result};
