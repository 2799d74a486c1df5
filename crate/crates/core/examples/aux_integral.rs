//! The integral of y^s (ln n / ln(yn))^beta over [a/n, 1] creeping towards 1/(s+1).
//!
//! cargo run --example aux_integral

use swidths::aux_integral;

fn main() -> swidths::Result<()> {
    for (s, beta) in [(1.0, 1.0), (2.0, 2.0), (0.5, 3.0)] {
        let limit = 1.0 / (s + 1.0);
        println!("s = {s}, beta = {beta}, limit {limit:.6}");
        for e in [2, 4, 6, 8, 12, 16] {
            let n = 10u64.pow(e);
            let v = aux_integral(s, beta, 2.0, n)?;
            println!("  n = 1e{e:<3} value = {v:.8}  gap = {:.3e}", v - limit);
        }
    }
    Ok(())
}
