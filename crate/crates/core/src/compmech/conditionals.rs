use super::WordDistribution;
use crate::error::{Error, Result};

/// Conditional future distribution of one retained past word.
#[derive(Debug, Clone, PartialEq)]
pub struct PastConditional {
    /// Past word index (length `L`).
    pub word: usize,
    /// `P(u)`, renormalized over retained pasts.
    pub prob: f64,
    /// `P(v | u)` over all length-`L` futures `v`.
    pub future: Vec<f64>,
}

/// Order-`L` truncated conditionals `P(v | u)`.
#[derive(Debug, Clone)]
pub struct ConditionalFamily {
    order: usize,
    alphabet: usize,
    pasts: Vec<PastConditional>,
    /// Past-word index -> position in `pasts`.
    lookup: Vec<Option<usize>>,
    dropped_mass: f64,
}

impl ConditionalFamily {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn pasts(&self) -> &[PastConditional] {
        &self.pasts
    }

    pub fn past(&self, word: usize) -> Option<&PastConditional> {
        self.lookup.get(word).copied().flatten().map(|i| &self.pasts[i])
    }

    pub(crate) fn position(&self, word: usize) -> Option<usize> {
        self.lookup.get(word).copied().flatten()
    }

    /// Probability mass of pasts dropped below the floor.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    /// `P(r | u)`: the first-symbol marginal of a past's future.
    pub fn next_symbol(&self, past: &PastConditional) -> Vec<f64> {
        let block = self.alphabet.pow(self.order as u32 - 1);
        let mut out = vec![0.0; self.alphabet];
        for (v, p) in past.future.iter().enumerate() {
            out[v / block] += p;
        }
        out
    }

    /// Past word reached from `word` after emitting `symbol`.
    pub fn successor_word(&self, word: usize, symbol: usize) -> usize {
        let size = self.alphabet.pow(self.order as u32);
        (word * self.alphabet + symbol) % size
    }
}

/// Condition a length-`2L` word distribution on its first `L` symbols.
pub fn conditionals(wd: &WordDistribution, order: usize, p_floor: f64) -> Result<ConditionalFamily> {
    if order == 0 {
        return Err(Error::invalid("Markov order must be at least 1"));
    }
    if wd.length() != 2 * order {
        return Err(Error::invalid(format!(
            "need words of length {} for order {order}, got {}",
            2 * order,
            wd.length()
        )));
    }
    if !(p_floor >= 0.0) {
        return Err(Error::invalid("p_floor must be >= 0"));
    }
    let d = wd.alphabet();
    let block = d.pow(order as u32);
    let probs = wd.probs();

    let mut pasts = Vec::new();
    let mut dropped = 0.0;
    for u in 0..block {
        let row = &probs[u * block..(u + 1) * block];
        let pu: f64 = row.iter().sum();
        if pu <= 0.0 || pu < p_floor {
            dropped += pu;
            continue;
        }
        pasts.push(PastConditional {
            word: u,
            prob: pu,
            future: row.iter().map(|p| p / pu).collect(),
        });
    }
    if pasts.is_empty() {
        return Err(Error::DegenerateProcess(
            "every past word fell below the probability floor".into(),
        ));
    }
    let kept: f64 = pasts.iter().map(|p| p.prob).sum();
    let mut lookup = vec![None; block];
    for (i, p) in pasts.iter_mut().enumerate() {
        p.prob /= kept;
        lookup[p.word] = Some(i);
    }
    Ok(ConditionalFamily {
        order,
        alphabet: d,
        pasts,
        lookup,
        dropped_mass: dropped,
    })
}
