//! Fits TF-IDF features of a small three-topic corpus and lists each stratum's
//! most distinctive terms.

use std::path::Path;

use stratified_nmf::engine::{fit, sparsity, topk_features, FitConfig};
use stratified_nmf::ingest::load_manifest;

fn main() -> stratified_nmf::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/strata_corpus/manifest.json");
    let loaded = load_manifest(manifest)?;
    let data = &loaded.dataset;
    let vocab = loaded.vocabulary.as_deref();

    let (model, trace) = fit(data, &FitConfig::new(5, 100))?;
    let last = trace.last().expect("non-empty trace");
    println!("normalized loss {:.4}", last.normalized_loss.unwrap_or(f64::NAN));

    for (i, name) in data.names().iter().enumerate() {
        let top: Vec<String> = topk_features(&model, i, 5, vocab)?
            .iter()
            .map(|f| format!("{} ({:.3})", f.name(), f.weight))
            .collect();
        let nonzero = sparsity(&model.v()[i], 1e-12);
        println!("{name:<9} {:>3.0}% nonzero  {}", nonzero * 100.0, top.join(", "));
    }
    Ok(())
}
