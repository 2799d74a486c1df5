//! Width ratios against n^{-alpha} (ln n)^beta next to their limits, and the
//! preasymptotic bound for small n.
//!
//! cargo run --release --example asymptotic_constants

use swidths::asymptotics::preasymptotic_bound;
use swidths::{
    constant, convergence_table, sigma_prefix, ConstantSpec, Embedding, WeightSpec, WidthEvaluator, WidthKind,
};

fn main() -> swidths::Result<()> {
    for (d, grid) in [(1usize, vec![100, 10_000, 1_000_000]), (2, vec![1000, 100_000, 1_000_000])] {
        let spec = WeightSpec::mixed_inf(1.0, d)?;
        let target = constant(&ConstantSpec::MixL2Sigma { d: d as u32, s: 1.0 })?;
        let ev = WidthEvaluator::new(sigma_prefix(&spec, *grid.last().unwrap())?);
        let beta = (d - 1) as f64;
        let t = convergence_table(&ev, Embedding::AtoA, WidthKind::Approximation, &grid, 1.0, beta, Some(target))?;
        println!("{spec}: sigma_n n / (ln n)^{beta}  ->  {target}");
        for row in &t.rows {
            println!("  n = {:>8}  ratio = {:.5}", row.n, row.ratio);
        }
    }

    println!(
        "\ntransfer factors at s = 1: u/sigma -> {:.5}, v sqrt(n)/sigma -> {:.5}",
        constant(&ConstantSpec::TransferUV { s: 1.0 })?,
        constant(&ConstantSpec::TransferVW { s: 1.0 })?
    );

    let d = 4;
    let p = sigma_prefix(&WeightSpec::mixed(1.0, 1.0, d)?, 1 << d)?;
    println!("\npreasymptotic regime, d = {d}:");
    for n in 2..=(1usize << d) {
        println!(
            "  n = {n:>2}  sigma_n = {:.4}  bound = {:.4}",
            p.values[n - 1],
            preasymptotic_bound(d as u32, 1.0, 1.0, n as u64)?
        );
    }
    Ok(())
}
