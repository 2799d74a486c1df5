//! The rearrangement sigma_n of 1/omega for a mixed weight, the orbits it is
//! built from, an optimal index set, and a cross-check against a full box scan.
//!
//! cargo run --example rearrangement

use swidths::sigma::OrbitStream;
use swidths::{best_index_set, count_leq, sigma_bruteforce, sigma_prefix, WeightSpec};

fn main() -> swidths::Result<()> {
    let spec = WeightSpec::mixed(1.0, 2.0, 2)?;
    println!("{spec}");

    println!("\nfirst orbits (rep, weight, multiplicity):");
    for orbit in OrbitStream::new(&spec).take(8) {
        println!("  {:?}  {:.6}  {}", orbit.rep.as_slice(), orbit.weight, orbit.multiplicity);
    }

    let p = sigma_prefix(&spec, 2000)?;
    println!("\n   n  sigma_n");
    for n in [1, 5, 9, 10, 50, 100, 500, 2000] {
        println!("{n:>5}  {:.10}", p.values[n - 1]);
    }

    // ties at the n-th weight can push the count above n
    let n = 100;
    let t = 1.0 / p.values[n - 1];
    println!("\n#{{omega <= 1/sigma_{n}}} = {} (>= {n})", count_leq(&spec, t));

    let set = best_index_set(&spec, 13);
    println!("an optimal set of 12 frequencies: {set:?}");

    let oracle = sigma_bruteforce(&spec, 2000, 110)?;
    let worst = p.values.iter().zip(&oracle.values).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
    println!("box scan |k|_inf <= 110 agrees up to relative {worst:.1e}");
    Ok(())
}
