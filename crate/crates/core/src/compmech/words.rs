use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

const HEADER: &str = "# qcomplexity word-distribution v1";
/// Probabilities below this are treated as numerical noise.
pub(crate) const PROB_CLAMP: f64 = 1e-14;

/// Probability table over all `d^w` words of length `w`.
///
/// A word is indexed as a base-`d` integer with the leftmost symbol most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct WordDistribution {
    alphabet: usize,
    length: usize,
    probs: Vec<f64>,
    meta: BTreeMap<String, String>,
}

impl WordDistribution {
    pub fn new(alphabet: usize, length: usize, probs: Vec<f64>) -> Result<Self> {
        if alphabet < 1 {
            return Err(Error::invalid("alphabet must be non-empty"));
        }
        let size = table_size(alphabet, length)?;
        if probs.len() != size {
            return Err(Error::invalid(format!(
                "{} probabilities for {size} words",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::invalid("probabilities must be finite and >= 0"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(WordDistribution {
            alphabet,
            length,
            probs,
            meta: BTreeMap::new(),
        })
    }

    /// Normalize non-negative weights, zeroing entries below 1e-14 first.
    pub fn from_weights(alphabet: usize, length: usize, mut weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|p| !p.is_finite() || *p < -PROB_CLAMP) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateProcess("all word weights vanish".into()));
        }
        for w in weights.iter_mut() {
            if *w / total < PROB_CLAMP {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(alphabet, length, weights)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, word: usize) -> f64 {
        self.probs[word]
    }

    pub fn prob_of(&self, symbols: &[usize]) -> f64 {
        self.probs[self.index_of(symbols)]
    }

    pub fn index_of(&self, symbols: &[usize]) -> usize {
        assert_eq!(symbols.len(), self.length);
        symbols.iter().fold(0, |acc, &s| acc * self.alphabet + s)
    }

    pub fn symbols_of(&self, mut word: usize) -> Vec<usize> {
        let mut out = vec![0; self.length];
        for slot in out.iter_mut().rev() {
            *slot = word % self.alphabet;
            word /= self.alphabet;
        }
        out
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let key: String = key.split_whitespace().collect::<Vec<_>>().join("_");
        let value: String = value.into().replace(['\n', '\r'], " ");
        self.meta.insert(key, value);
    }

    /// Distribution of the first `len` symbols.
    pub fn marginal_prefix(&self, len: usize) -> Result<WordDistribution> {
        self.marginal(len, true)
    }

    /// Distribution of the last `len` symbols.
    pub fn marginal_suffix(&self, len: usize) -> Result<WordDistribution> {
        self.marginal(len, false)
    }

    fn marginal(&self, len: usize, prefix: bool) -> Result<WordDistribution> {
        if len > self.length {
            return Err(Error::invalid("marginal longer than the word"));
        }
        let keep = self.alphabet.pow(len as u32);
        let drop = self.alphabet.pow((self.length - len) as u32);
        let mut out = vec![0.0; keep];
        for (w, &p) in self.probs.iter().enumerate() {
            let idx = if prefix { w / drop } else { w % keep };
            out[idx] += p;
        }
        let total: f64 = out.iter().sum();
        out.iter_mut().for_each(|p| *p /= total);
        let mut m = WordDistribution::new(self.alphabet, len, out)?;
        m.meta = self.meta.clone();
        Ok(m)
    }

    pub fn total_variation(&self, other: &WordDistribution) -> Result<f64> {
        if self.alphabet != other.alphabet || self.length != other.length {
            return Err(Error::invalid("distributions over different word spaces"));
        }
        Ok(super::total_variation(&self.probs, &other.probs))
    }

    /// Text serialization: header, `alphabet`, `length`, `meta` lines, then
    /// one `word_index probability` line per word (17 significant digits).
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(32 * self.probs.len() + 128);
        writeln!(s, "{HEADER}").unwrap();
        writeln!(s, "alphabet {}", self.alphabet).unwrap();
        writeln!(s, "length {}", self.length).unwrap();
        for (k, v) in &self.meta {
            writeln!(s, "meta {k} {v}").unwrap();
        }
        writeln!(s, "data {}", self.probs.len()).unwrap();
        for (i, p) in self.probs.iter().enumerate() {
            writeln!(s, "{i} {p:.16e}").unwrap();
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<WordDistribution> {
        let bad = |msg: &str| Error::invalid(format!("word distribution text: {msg}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(HEADER) {
            return Err(bad("missing header"));
        }
        let mut alphabet = None;
        let mut length = None;
        let mut meta = BTreeMap::new();
        let mut count = None;
        for line in lines.by_ref() {
            let line = line.trim_end();
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "alphabet" => alphabet = Some(rest.trim().parse().map_err(|_| bad("alphabet"))?),
                "length" => length = Some(rest.trim().parse().map_err(|_| bad("length"))?),
                "meta" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    meta.insert(k.to_string(), v.to_string());
                }
                "data" => {
                    count = Some(rest.trim().parse::<usize>().map_err(|_| bad("data count"))?);
                    break;
                }
                "" => {}
                _ => return Err(bad(&format!("unexpected line `{line}`"))),
            }
        }
        let (alphabet, length, count) = match (alphabet, length, count) {
            (Some(a), Some(l), Some(c)) => (a, l, c),
            _ => return Err(bad("incomplete header")),
        };
        let mut probs = vec![f64::NAN; count];
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let (i, p) = line.trim().split_once(' ').ok_or_else(|| bad("data line"))?;
            let i: usize = i.parse().map_err(|_| bad("word index"))?;
            let p: f64 = p.trim().parse().map_err(|_| bad("probability"))?;
            *probs.get_mut(i).ok_or_else(|| bad("word index out of range"))? = p;
        }
        if probs.iter().any(|p| p.is_nan()) {
            return Err(bad("missing data lines"));
        }
        let mut wd = WordDistribution::new(alphabet, length, probs)?;
        wd.meta = meta;
        Ok(wd)
    }
}

fn table_size(alphabet: usize, length: usize) -> Result<usize> {
    (alphabet as u64)
        .checked_pow(length as u32)
        .filter(|&n| n <= 1 << 26)
        .map(|n| n as usize)
        .ok_or_else(|| Error::Capacity(format!("{alphabet}^{length} words")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn indexing_is_big_endian() {
        let wd = WordDistribution::new(3, 2, {
            let mut p = vec![0.0; 9];
            p[5] = 1.0;
            p
        })
        .unwrap();
        assert_eq!(wd.symbols_of(5), vec![1, 2]);
        assert_eq!(wd.index_of(&[1, 2]), 5);
        assert_eq!(wd.prob_of(&[1, 2]), 1.0);
    }

    #[test]
    fn marginals() {
        // P(ab) with a,b binary
        let wd = WordDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let pre = wd.marginal_prefix(1).unwrap();
        let suf = wd.marginal_suffix(1).unwrap();
        assert!((pre.prob(0) - 0.3).abs() < 1e-15);
        assert!((suf.prob(0) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(WordDistribution::new(2, 1, vec![0.5, 0.6]).is_err());
        assert!(WordDistribution::new(2, 1, vec![1.5, -0.5]).is_err());
        assert!(WordDistribution::new(2, 2, vec![1.0]).is_err());
    }

    #[test]
    fn text_format_layout() {
        let wd = WordDistribution::new(2, 1, vec![0.25, 0.75])
            .unwrap()
            .with_meta("model", "ising");
        let text = wd.to_text();
        let expected = "# qcomplexity word-distribution v1\nalphabet 2\nlength 1\n\
                        meta model ising\ndata 2\n0 2.5000000000000000e-1\n1 7.5000000000000000e-1\n";
        assert_eq!(text, expected);
    }

    proptest! {
        #[test]
        fn text_roundtrip_is_bit_exact(w in proptest::collection::vec(0.0f64..1.0, 8)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-3);
            let total: f64 = w.iter().sum();
            let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
            let Ok(wd) = WordDistribution::new(2, 3, probs) else { return Ok(()); };
            let wd = wd.with_meta("window", "3..6");
            let back = WordDistribution::parse_text(&wd.to_text()).unwrap();
            prop_assert_eq!(back.probs().iter().map(|p| p.to_bits()).collect::<Vec<_>>(),
                            wd.probs().iter().map(|p| p.to_bits()).collect::<Vec<_>>());
            prop_assert_eq!(back.meta(), wd.meta());
        }
    }
}
