//! Exact s-numbers (approximation, Kolmogorov, Bernstein and Weyl numbers) of
//! embeddings of weighted Wiener classes and mixed-smoothness Sobolev spaces.
//!
//! Everything is driven by the nonincreasing rearrangement `sigma_n` of the
//! reciprocal weights `1/omega(k)`, `k in Z^d`:
//!
//! ```
//! use swidths::{sigma_prefix, WeightSpec};
//!
//! let spec = WeightSpec::mixed_inf(2.0, 2).unwrap();
//! let prefix = sigma_prefix(&spec, 10).unwrap();
//! assert_eq!(prefix.values[8], 1.0);
//! assert_eq!(prefix.values[9], 0.25);
//! ```
//!
//! On top of that sit closed-form widths ([`widths`]), asymptotic constants and
//! convergence tables ([`asymptotics`]), and exact lattice counts for the H^1
//! ratio weight ([`lattice_count`]).

// parameter checks are written as `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod lattice_count;
pub mod quadrature;
pub mod sigma;
pub mod summation;
pub mod weights;
pub mod widths;

pub use asymptotics::{aux_integral, constant, convergence_table, series_s, ConstantSpec, ConvergenceTable};
pub use error::{Error, Result};
pub use lattice_count::{
    count_a, count_a_split, count_c, decomposition_checks, sandwich_check, verify_appendix_limits, CountResult,
    Smoothness,
};
pub use sigma::{best_index_set, count_leq, sigma_bruteforce, sigma_prefix, OrbitEntry, SigmaPrefix};
pub use weights::{Family, WeightSpec};
pub use widths::{
    s_lambda_error, sup_over_h, width, width_auto, Embedding, WidthEvaluator, WidthKind, WidthQuery, WidthValue,
};
