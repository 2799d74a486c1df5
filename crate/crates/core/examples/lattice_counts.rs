//! Exact lattice counts under the H^1 ratio threshold: the two decomposition
//! identities, the limit ratios, and the sigma sandwich.
//!
//! cargo run --release --example lattice_counts

use swidths::{count_c, decomposition_checks, sandwich_check, verify_appendix_limits, Smoothness};

fn main() -> swidths::Result<()> {
    let s = Smoothness::rational(2, 1)?;
    let d = 2;

    for r in [1, 5, 20] {
        let c = count_c(s, r, d)?;
        let ids = decomposition_checks(s, d, r)?;
        let ok = ids.iter().all(|i| i.holds);
        println!("C({r},{d}) = {:<6} identities: {} checked, all hold: {ok}", c.count, ids.len());
    }

    let rep = verify_appendix_limits(s, d, &[50, 100, 200, 400])?;
    println!("\nS = {:.10}, limit of C(r,{d})/r = {:.6}", rep.series_s, rep.target_c);
    for row in rep.rows.iter().filter(|r| r.quantity == "C") {
        println!("  r = {:>4}  C/r = {:.4}", row.r, row.ratio);
    }

    println!();
    for r in 2..=6 {
        let sw = sandwich_check(s, d, r)?;
        println!(
            "r = {r}: n in [{}, {}], sigma in [{:.4}, {:.4}] within [{:.4}, {:.4}]: {}",
            sw.n_first, sw.n_last, sw.sigma_min, sw.sigma_max, sw.lower, sw.upper, sw.all_pass
        );
    }
    Ok(())
}
