//! Saves a fitted model, reloads it, and prints sum-to-one shift vectors.

use stratified_nmf::datagen::{generate, SyntheticSpec};
use stratified_nmf::engine::{fit, normalize_v, FitConfig};
use stratified_nmf::ingest::{load_model, save_model};

fn main() -> stratified_nmf::Result<()> {
    let spec = SyntheticSpec::uniform_shifts(2, 20, 6, 2, 3);
    let syn = generate(&spec)?;
    let cfg = FitConfig::new(2, 200);
    let (model, _) = fit(&syn.dataset, &cfg)?;

    let dir = std::env::temp_dir().join("stratified-nmf-model-store");
    save_model(&dir, &model, syn.dataset.names(), Some(&cfg))?;
    let stored = load_model(&dir)?;
    assert_eq!(stored.model, model);
    println!("saved and reloaded {} ({} strata, rank {})", dir.display(), stored.names.len(), stored.model.rank());

    for (name, v) in stored.names.iter().zip(normalize_v(&stored.model)?) {
        let cells: Vec<String> = v.as_slice().iter().map(|x| format!("{x:.3}")).collect();
        println!("{name}: {}", cells.join(" "));
    }
    Ok(())
}
