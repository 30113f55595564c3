use super::{entropy_bits, ConditionalFamily, EpsilonMachine, WordDistribution};
use crate::error::{Error, Result};

/// `C_μ = H(P_j)` in bits.
pub fn statistical_complexity(m: &EpsilonMachine) -> f64 {
    entropy_bits(m.stationary().iter().copied())
}

/// Block mutual information `I(R_{−L:0}; R_{0:L})` of a length-`2L` table.
pub fn excess_entropy(wd: &WordDistribution, order: usize) -> Result<f64> {
    if order == 0 || wd.length() != 2 * order {
        return Err(Error::invalid(format!(
            "excess entropy of order {order} needs words of length {}",
            2 * order
        )));
    }
    let block = wd.alphabet().pow(order as u32);
    let probs = wd.probs();
    let mut past = vec![0.0; block];
    let mut future = vec![0.0; block];
    for (w, &p) in probs.iter().enumerate() {
        past[w / block] += p;
        future[w % block] += p;
    }
    let mut mi = 0.0;
    for (w, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            mi += p * (p / (past[w / block] * future[w % block])).log2();
        }
    }
    Ok(mi.max(0.0))
}

/// `h = Σ_u P(u) H(R_0 | u)` in bits per symbol.
pub fn entropy_rate(cf: &ConditionalFamily) -> f64 {
    cf.pasts()
        .iter()
        .map(|p| p.prob * entropy_bits(cf.next_symbol(p)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compmech::{build_machine, conditionals, synthetic};

    #[test]
    fn golden_values() {
        let coin = synthetic::fair_coin(6);
        assert!(excess_entropy(&coin, 3).unwrap().abs() < 1e-12);
        let cf = conditionals(&synthetic::fair_coin(4), 2, 0.0).unwrap();
        assert!((entropy_rate(&cf) - 1.0).abs() < 1e-12);

        let p2 = synthetic::period_two(2);
        assert!((excess_entropy(&p2, 1).unwrap() - 1.0).abs() < 1e-12);
        let cf = conditionals(&p2, 1, 0.0).unwrap();
        assert!(entropy_rate(&cf).abs() < 1e-12);
        let m = build_machine(&cf, 1e-9).unwrap();
        assert!((statistical_complexity(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_rate_and_complexity() {
        let wd = synthetic::golden_mean(4, 0.5);
        let cf = conditionals(&wd, 2, 0.0).unwrap();
        assert!((entropy_rate(&cf) - 2.0 / 3.0).abs() < 1e-12);
        let m = build_machine(&cf, 1e-9).unwrap();
        let want = 3f64.log2() - 2.0 / 3.0;
        assert!((statistical_complexity(&m) - want).abs() < 1e-12);
    }
}
