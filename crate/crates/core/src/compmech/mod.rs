//! Classical computational mechanics of finite-window word statistics:
//! conditional futures on truncated pasts, causal-state merging into a
//! unifilar ε-machine, statistical complexity, excess entropy and entropy
//! rate. All entropies are in bits.

mod conditionals;
mod machine;
mod measures;
pub mod synthetic;
mod words;

pub use conditionals::{conditionals, ConditionalFamily, PastConditional};
pub use machine::{build_machine, EpsilonMachine, MachineDiagnostics};
pub use measures::{entropy_rate, excess_entropy, statistical_complexity};
pub use words::WordDistribution;

/// Default merge tolerance on the total-variation distance of futures.
pub const DEFAULT_MERGE_TOL: f64 = 1e-8;
/// Default floor on past-word probability.
pub const DEFAULT_P_FLOOR: f64 = 1e-12;

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn entropy_bits<I: IntoIterator<Item = f64>>(p: I) -> f64 {
    p.into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .fold(0.0, |a, b| a + b)
}

/// `½ Σ |p − q|`
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).fold(0.0, |s, (a, b)| s + (a - b).abs())
}
