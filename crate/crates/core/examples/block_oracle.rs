//! Compares the engine's v and H updates with a plain NMF update on the stacked block system.

use stratified_nmf::engine::{init_model, objective, FitConfig, StrataDataset};
use stratified_nmf::matrix::{DenseMatrix, SparseMatrix};
use stratified_nmf::oracle::{assemble_block, block_vh_update};

fn main() -> stratified_nmf::Result<()> {
    let data = StrataDataset::new(vec![
        DenseMatrix::from_rows(&[[1.0, 0.5, 2.0, 0.0], [0.3, 1.2, 0.0, 0.7]])?.into(),
        SparseMatrix::from_triplets(3, 4, [(0, 1, 2.0), (1, 3, 1.5), (2, 0, 0.4), (2, 2, 0.9)])?.into(),
    ])?;
    let model = init_model(&data, &FitConfig::new(2, 0))?;

    let block = assemble_block(&data, &model)?;
    println!("stacked data {:?}, stacked coefficients {:?}", block.a_hat.shape(), block.w_hat.shape());
    println!("objective {:.15e}", objective(&model, &data)?);
    println!("block     {:.15e}", block.objective()?);

    let (v_ref, h_ref) = block_vh_update(&data, &model, 0.0)?;
    let mut v_only = model.clone();
    v_only.update_v(&data, 0.0)?;
    let mut h_only = model.clone();
    h_only.update_h(&data, 0.0)?;

    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for (i, v) in v_only.v().iter().enumerate() {
        println!("v({i}) max abs difference {:.1e}", diff(v.as_slice(), v_ref[i].as_slice()));
    }
    println!("H    max abs difference {:.1e}", diff(h_only.h().as_slice(), h_ref.as_slice()));
    Ok(())
}
