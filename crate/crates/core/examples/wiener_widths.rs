//! Every embedding and every s-number kind for one weight, including the
//! cases where only two-sided bounds are available.
//!
//! cargo run --example wiener_widths

use swidths::widths::evaluator_for;
use swidths::{Embedding, WeightSpec, WidthKind};

fn main() -> swidths::Result<()> {
    let spec = WeightSpec::mixed(2.0, 2.0, 2)?;
    let ns = [1usize, 9, 10, 100, 1000];
    let ev = evaluator_for(&spec, Embedding::AtoL2, WidthKind::Approximation, 1000)?;
    let embeddings = [
        Embedding::AtoA,
        Embedding::FtoL2,
        Embedding::AtoL2,
        Embedding::AtoLinf,
        Embedding::AtoLp(3.0),
        Embedding::CmixToL2,
    ];
    println!("{spec}");
    for e in embeddings {
        for kind in WidthKind::ALL {
            let row: Vec<String> = ev
                .widths(e, kind, &ns)?
                .iter()
                .map(|w| match w.value() {
                    Some(v) => format!("{v:.4e}"),
                    None => format!("[{:.3e}, {:.3e}]", w.lower, w.upper),
                })
                .collect();
            println!("{:<12} {:<14} {}", e.to_string(), kind.name(), row.join("  "));
        }
    }
    Ok(())
}
