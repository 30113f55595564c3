//! Word statistics of a few analytic processes, generated from their
//! unifilar presentations.

use super::{EpsilonMachine, WordDistribution};

/// `…0101…` with both phases equally likely.
pub fn period_two(len: usize) -> WordDistribution {
    EpsilonMachine::from_parts(
        2,
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![vec![Some(1), None], vec![None, Some(0)]],
        vec![0.5, 0.5],
    )
    .and_then(|m| m.word_distribution(len))
    .expect("valid machine")
    .with_meta("process", "period-2")
}

/// I.i.d. uniform bits.
pub fn fair_coin(len: usize) -> WordDistribution {
    EpsilonMachine::from_parts(2, vec![vec![0.5, 0.5]], vec![vec![Some(0), Some(0)]], vec![1.0])
        .and_then(|m| m.word_distribution(len))
        .expect("valid machine")
        .with_meta("process", "fair-coin")
}

/// Binary process without consecutive 1s; after a 0 the next symbol is 1
/// with probability `p`.
pub fn golden_mean(len: usize, p: f64) -> WordDistribution {
    golden_mean_machine(p)
        .word_distribution(len)
        .expect("valid machine")
        .with_meta("process", format!("golden-mean p={p}"))
}

/// States: 0 = last symbol 0, 1 = last symbol 1.
pub fn golden_mean_machine(p: f64) -> EpsilonMachine {
    let pa = 1.0 / (1.0 + p);
    EpsilonMachine::from_parts(
        2,
        vec![vec![1.0 - p, p], vec![1.0, 0.0]],
        vec![vec![Some(0), Some(1)], vec![Some(0), None]],
        vec![pa, 1.0 - pa],
    )
    .expect("valid machine")
}
