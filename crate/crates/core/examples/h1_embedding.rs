//! Widths of the mixed Sobolev class in H^1 through the ratio weight, with the
//! scaled sequence n^{s-1} sigma_n next to its limit.
//!
//! cargo run --release --example h1_embedding

use swidths::widths::evaluator_for;
use swidths::{constant, ConstantSpec, Embedding, WeightSpec, WidthKind};

fn main() -> swidths::Result<()> {
    let s = 2.0;
    for d in [1usize, 2] {
        let spec = WeightSpec::h1_ratio(s, d)?;
        let target = constant(&ConstantSpec::H1Constant { d: d as u32, s })?;
        let n_max = 200_000;
        let ev = evaluator_for(&spec, Embedding::AmixToH1, WidthKind::Kolmogorov, n_max)?;
        println!("{spec}: n^(s-1) sigma_n -> {target:.6}");
        for n in [10usize, 1000, 100_000, n_max] {
            let sigma = ev.prefix().values[n - 1];
            let a = ev.widths(Embedding::AmixToH1, WidthKind::Approximation, &[n])?[0];
            let b = ev.widths(Embedding::AmixToH1, WidthKind::Bernstein, &[n])?[0];
            println!(
                "  n = {n:>6}  scaled = {:.6}  u_n = {:.4e}  v_n = {:.4e}",
                (n as f64).powf(s - 1.0) * sigma,
                a.lower,
                b.lower
            );
        }
    }
    Ok(())
}
