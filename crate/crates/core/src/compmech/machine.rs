//! Causal-state reconstruction from truncated conditionals.
//!
//! Pasts are first merged by single linkage over the graph whose edges join
//! pasts with total-variation distance of their length-`L` futures at most
//! `merge_tol`. The partition is then refined until it is unifilar: two pasts
//! stay together only if, for every symbol both can emit, their successor
//! pasts lie in the same state.

use super::{total_variation, ConditionalFamily, WordDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MachineDiagnostics {
    /// Largest future distance between two pasts of the same state.
    pub max_intra_state_distance: f64,
    /// Mass of emissions whose successor past was dropped by the floor.
    pub orphan_mass: f64,
    pub refinement_rounds: usize,
}

/// Unifilar hidden Markov model over causal states.
#[derive(Debug, Clone)]
pub struct EpsilonMachine {
    alphabet: usize,
    order: usize,
    states: Vec<Vec<usize>>,
    emission: Vec<Vec<f64>>,
    successor: Vec<Vec<Option<usize>>>,
    stationary: Vec<f64>,
    diagnostics: MachineDiagnostics,
}

impl EpsilonMachine {
    /// Machine given directly by `P(r|j)`, `λ(j, r)` and `P_j`.
    pub fn from_parts(
        alphabet: usize,
        emission: Vec<Vec<f64>>,
        successor: Vec<Vec<Option<usize>>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let m = EpsilonMachine {
            alphabet,
            order: 0,
            states: Vec::new(),
            emission,
            successor,
            stationary,
            diagnostics: MachineDiagnostics::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.stationary.len();
        if n == 0 {
            return Err(Error::invalid("machine has no states"));
        }
        if self.emission.len() != n || self.successor.len() != n {
            return Err(Error::invalid("machine tables disagree on the state count"));
        }
        for j in 0..n {
            let (e, s) = (&self.emission[j], &self.successor[j]);
            if e.len() != self.alphabet || s.len() != self.alphabet {
                return Err(Error::invalid("machine row has the wrong alphabet size"));
            }
            if (e.iter().sum::<f64>() - 1.0).abs() > 1e-9 || e.iter().any(|p| *p < 0.0) {
                return Err(Error::invalid(format!("emission row {j} is not a distribution")));
            }
            for r in 0..self.alphabet {
                match s[r] {
                    Some(k) if k >= n => return Err(Error::invalid("successor out of range")),
                    None if e[r] > 0.0 => {
                        return Err(Error::invalid(format!(
                            "state {j} emits {r} without a successor"
                        )))
                    }
                    _ => {}
                }
            }
        }
        if (self.stationary.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("stationary distribution does not sum to 1"));
        }
        Ok(())
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Markov order of the pasts it was built from (0 if built from parts).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_states(&self) -> usize {
        self.stationary.len()
    }

    /// Past words grouped into each state.
    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    /// `P(r | j)`
    pub fn emission(&self, j: usize) -> &[f64] {
        &self.emission[j]
    }

    /// `λ(j, r)`, defined whenever `P(r|j) > 0`.
    pub fn successor(&self, j: usize, r: usize) -> Option<usize> {
        self.successor[j][r]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn diagnostics(&self) -> &MachineDiagnostics {
        &self.diagnostics
    }

    /// `max_k |Σ_{j,r} P_j T^r_{kj} − P_k|`.
    pub fn stationarity_residual(&self) -> f64 {
        let n = self.num_states();
        let mut next = vec![0.0; n];
        for j in 0..n {
            for r in 0..self.alphabet {
                if let Some(k) = self.successor[j][r] {
                    next[k] += self.stationary[j] * self.emission[j][r];
                }
            }
        }
        next.iter()
            .zip(&self.stationary)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Probabilities of all length-`len` words started from `P_j`.
    pub fn word_distribution(&self, len: usize) -> Result<WordDistribution> {
        let d = self.alphabet;
        let size = (d as u64)
            .checked_pow(len as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| Error::Capacity(format!("{d}^{len} words")))? as usize;
        let mut probs = vec![0.0; size];
        // (state, word prefix, probability) depth-first
        let mut stack: Vec<(usize, usize, usize, f64)> = (0..self.num_states())
            .filter(|&j| self.stationary[j] > 0.0)
            .map(|j| (j, 0, 0, self.stationary[j]))
            .collect();
        while let Some((j, depth, word, p)) = stack.pop() {
            if depth == len {
                probs[word] += p;
                continue;
            }
            for r in 0..d {
                let e = self.emission[j][r];
                if e > 0.0 {
                    let k = self.successor[j][r].expect("validated");
                    stack.push((k, depth + 1, word * d + r, p * e));
                }
            }
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        WordDistribution::new(d, len, probs)
    }
}

/// Merge pasts with near-identical futures and refine to a unifilar machine.
pub fn build_machine(cf: &ConditionalFamily, merge_tol: f64) -> Result<EpsilonMachine> {
    if !(merge_tol >= 0.0) {
        return Err(Error::invalid("merge_tol must be >= 0"));
    }
    let d = cf.alphabet();
    let pasts = cf.pasts();
    let n = pasts.len();

    // emissions and successors per past; emissions into dropped pasts are orphaned
    let mut orphan_mass = 0.0;
    let mut next: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut succ: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for p in pasts {
        let mut e = cf.next_symbol(p);
        let mut s = vec![None; d];
        for r in 0..d {
            if e[r] > 0.0 {
                match cf.position(cf.successor_word(p.word, r)) {
                    Some(pos) => s[r] = Some(pos),
                    None => {
                        orphan_mass += p.prob * e[r];
                        e[r] = 0.0;
                    }
                }
            }
        }
        let total: f64 = e.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateProcess(format!(
                "past {} has no retained successor",
                p.word
            )));
        }
        e.iter_mut().for_each(|x| *x /= total);
        next.push(e);
        succ.push(s);
    }

    // single-linkage merge
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj && total_variation(&pasts[i].future, &pasts[j].future) <= merge_tol {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut label = vec![0usize; n];
    let mut ids: Vec<Option<usize>> = vec![None; n];
    let mut count = 0;
    for i in 0..n {
        let root = find(&mut parent, i);
        label[i] = *ids[root].get_or_insert_with(|| {
            count += 1;
            count - 1
        });
    }

    // unifilar refinement
    let max_rounds = d.pow(cf.order() as u32) + 1;
    let mut rounds = 0;
    let templates = loop {
        if rounds > max_rounds {
            return Err(Error::Internal(
                "causal-state refinement did not stabilize".into(),
            ));
        }
        rounds += 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
        for i in 0..n {
            members[label[i]].push(i);
        }
        let mut new_label = vec![0usize; n];
        let mut templates: Vec<Vec<Option<usize>>> = Vec::new();
        let mut changed = false;
        for class in &members {
            let mut groups: Vec<(Vec<Option<usize>>, Vec<usize>)> = Vec::new();
            for &i in class {
                let sig: Vec<Option<usize>> = succ[i].iter().map(|s| s.map(|p| label[p])).collect();
                let slot = groups.iter().position(|(t, _)| {
                    t.iter().zip(&sig).all(|(a, b)| match (a, b) {
                        (Some(x), Some(y)) => x == y,
                        _ => true,
                    })
                });
                match slot {
                    Some(g) => {
                        let (t, m) = &mut groups[g];
                        for (a, b) in t.iter_mut().zip(&sig) {
                            if a.is_none() {
                                *a = *b;
                            }
                        }
                        m.push(i);
                    }
                    None => groups.push((sig, vec![i])),
                }
            }
            changed |= groups.len() > 1;
            for (t, m) in groups {
                for i in m {
                    new_label[i] = templates.len();
                }
                templates.push(t);
            }
        }
        count = templates.len();
        label = new_label;
        if !changed {
            break templates;
        }
    };

    let mut states: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut stationary = vec![0.0; count];
    let mut emission = vec![vec![0.0; d]; count];
    for i in 0..n {
        let j = label[i];
        states[j].push(pasts[i].word);
        stationary[j] += pasts[i].prob;
        for r in 0..d {
            emission[j][r] += pasts[i].prob * next[i][r];
        }
    }
    let mut successor = vec![vec![None; d]; count];
    for j in 0..count {
        let total: f64 = emission[j].iter().sum();
        emission[j].iter_mut().for_each(|x| *x /= total);
        for r in 0..d {
            if emission[j][r] > 0.0 {
                successor[j][r] = templates[j][r];
            }
        }
    }

    let mut max_intra: f64 = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            if label[i] == label[k] {
                max_intra = max_intra.max(total_variation(&pasts[i].future, &pasts[k].future));
            }
        }
    }

    let m = EpsilonMachine {
        alphabet: d,
        order: cf.order(),
        states,
        emission,
        successor,
        stationary,
        diagnostics: MachineDiagnostics {
            max_intra_state_distance: max_intra,
            orphan_mass,
            refinement_rounds: rounds,
        },
    };
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compmech::{conditionals, synthetic};

    #[test]
    fn period_two_has_two_states() {
        let cf = conditionals(&synthetic::period_two(2), 1, 0.0).unwrap();
        let m = build_machine(&cf, 1e-9).unwrap();
        assert_eq!(m.num_states(), 2);
        for j in 0..2 {
            assert!((m.stationary()[j] - 0.5).abs() < 1e-15);
            let r = if m.emission(j)[0] == 1.0 { 0 } else { 1 };
            assert_eq!(m.emission(j)[r], 1.0);
            assert_eq!(m.successor(j, r), Some(1 - j));
        }
    }

    #[test]
    fn fair_coin_collapses_to_one_state() {
        let cf = conditionals(&synthetic::fair_coin(6), 3, 0.0).unwrap();
        let m = build_machine(&cf, 1e-9).unwrap();
        assert_eq!(m.num_states(), 1);
        assert_eq!(m.states()[0].len(), 8);
    }

    #[test]
    fn golden_mean_splits_on_last_symbol() {
        let cf = conditionals(&synthetic::golden_mean(4, 0.5), 2, 0.0).unwrap();
        let m = build_machine(&cf, 1e-9).unwrap();
        assert_eq!(m.num_states(), 2);
        // state containing past "00" (0) also holds "10" (2); "01" (1) is alone
        let a = m.states().iter().position(|s| s.contains(&0)).unwrap();
        assert_eq!(m.states()[a], vec![0, 2]);
        assert_eq!(m.states()[1 - a], vec![1]);
        assert!((m.stationary()[a] - 2.0 / 3.0).abs() < 1e-12);
        assert!(m.stationarity_residual() < 1e-12);
    }

    #[test]
    fn zero_tolerance_never_has_fewer_states() {
        for wd in [synthetic::golden_mean(6, 0.3), synthetic::fair_coin(6)] {
            let cf = conditionals(&wd, 3, 0.0).unwrap();
            let strict = build_machine(&cf, 0.0).unwrap().num_states();
            for tol in [1e-12, 1e-8, 0.1, 1.0] {
                assert!(strict >= build_machine(&cf, tol).unwrap().num_states());
            }
        }
    }

    #[test]
    fn large_tolerance_is_refined_back_to_unifilar() {
        // merging everything is not unifilar for the golden mean; refinement
        // must split at least the past ending in 1 back out
        let cf = conditionals(&synthetic::golden_mean(4, 0.5), 2, 0.0).unwrap();
        let m = build_machine(&cf, 1.0).unwrap();
        m.validate().unwrap();
        assert!(m.num_states() >= 1);
    }

    #[test]
    fn from_parts_validates() {
        assert!(EpsilonMachine::from_parts(2, vec![vec![0.5, 0.5]], vec![vec![Some(0), None]], vec![1.0]).is_err());
        assert!(EpsilonMachine::from_parts(2, vec![vec![0.5, 0.6]], vec![vec![Some(0), Some(0)]], vec![1.0]).is_err());
    }
}
