//! Loads dense CSV strata through a manifest that drops an identifier column,
//! then fits and prints per-stratum mean shifts.

use stratified_nmf::engine::{fit, strata_means, FitConfig};
use stratified_nmf::ingest::load_manifest;

const NORTH: &str = "id,rooms,income,age\n1,3,4.1,20\n2,4,5.0,35\n3,2,3.2,41\n4,5,6.3,12\n";
const SOUTH: &str = "id,rooms,income,age\n5,6,2.1,50\n6,5,2.5,44\n7,7,1.9,38\n";

fn main() -> stratified_nmf::Result<()> {
    let dir = std::env::temp_dir().join("stratified-nmf-dense-csv");
    std::fs::create_dir_all(&dir).expect("temp dir");
    std::fs::write(dir.join("north.csv"), NORTH).expect("write");
    std::fs::write(dir.join("south.csv"), SOUTH).expect("write");
    std::fs::write(
        dir.join("manifest.json"),
        r#"{
  "n_cols": 4,
  "exclude_columns": [0],
  "strata": [
    { "name": "north", "path": "north.csv", "format": "dense-csv" },
    { "name": "south", "path": "south.csv", "format": "dense-csv" }
  ]
}"#,
    )
    .expect("write");

    let loaded = load_manifest(dir.join("manifest.json"))?;
    let (model, trace) = fit(&loaded.dataset, &FitConfig::new(1, 500))?;
    println!("final loss {:.4}", trace.last().expect("trace").loss);
    for (name, (v, mean)) in loaded.dataset.names().iter().zip(model.v().iter().zip(strata_means(&model))) {
        println!("{name}: shift {:?}, mean {mean:.3}", v.as_slice().iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>());
    }
    Ok(())
}
