use proptest::prelude::*;

use qcomplexity::compmech::WordDistribution;
use qcomplexity::models::sigma_theta_basis;
use qcomplexity::mps::{MpsState, Window};
use qcomplexity::pipeline::{measures_from_words, AnalysisOptions};
use qcomplexity::Exec;

/// Length-2 table of a stationary first-order Markov chain.
fn markov_pairs(alphabet: usize, raw: &[f64]) -> WordDistribution {
    let t: Vec<Vec<f64>> = raw
        .chunks(alphabet)
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|x| x / s).collect()
        })
        .collect();
    // stationary distribution by power iteration; rows are strictly positive
    let mut pi = vec![1.0 / alphabet as f64; alphabet];
    for _ in 0..2000 {
        let mut next = vec![0.0; alphabet];
        for (a, row) in t.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                next[b] += pi[a] * p;
            }
        }
        pi = next;
    }
    let probs = (0..alphabet * alphabet).map(|w| pi[w / alphabet] * t[w / alphabet][w % alphabet]).collect();
    WordDistribution::from_weights(alphabet, 2, probs).unwrap()
}

fn markov_table() -> impl Strategy<Value = WordDistribution> {
    (2usize..=3).prop_flat_map(|k| {
        prop::collection::vec(0.05f64..1.0, k * k).prop_map(move |raw| markov_pairs(k, &raw))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_are_ordered(wd in markov_table()) {
        let m = measures_from_words(&wd, 1, &AnalysisOptions::default()).unwrap();
        prop_assert!(m.excess_entropy <= m.c_q + 1e-9, "E={} C_q={}", m.excess_entropy, m.c_q);
        prop_assert!(m.c_q <= m.c_mu + 1e-9, "C_q={} C_mu={}", m.c_q, m.c_mu);
        prop_assert!(m.c_mu <= (m.machine.num_states() as f64).log2() + 1e-9);
        prop_assert!(m.entropy_rate >= 0.0 && m.entropy_rate <= (wd.alphabet() as f64).log2() + 1e-9);
    }

    #[test]
    fn gram_is_a_valid_overlap_matrix(wd in markov_table()) {
        let g = measures_from_words(&wd, 1, &AnalysisOptions::default()).unwrap().gram;
        for j in 0..g.dim() {
            prop_assert_eq!(g.get(j, j), 1.0);
            for k in 0..g.dim() {
                let x = g.get(j, k);
                prop_assert!((0.0..=1.0).contains(&x));
                prop_assert_eq!(x, g.get(k, j));
            }
        }
        prop_assert!(g.residual() <= 1e-12);
        prop_assert!(g.min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn word_tables_are_consistent(seed in 0u64..1000, theta in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let n = 12;
        let win = Window::new(4, 4).unwrap();
        let state = MpsState::random(n, 2, 6, seed)
            .and_then(|s| s.apply_local_basis(&sigma_theta_basis(theta).unwrap()))
            .and_then(|s| s.canonicalize(win.start()))
            .unwrap();
        let wd = state.word_distribution_with(win, Exec::Sequential).unwrap();
        let total: f64 = wd.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(wd.probs().iter().all(|&p| p >= 0.0));

        // the policy must not change a single bit
        let par = state.word_distribution_with(win, Exec::Parallel).unwrap();
        prop_assert_eq!(wd.probs(), par.probs());

        // a shorter window is the marginal of a longer one
        let short = state.word_distribution(Window::new(4, 3).unwrap()).unwrap();
        let marg = wd.marginal_prefix(3).unwrap();
        prop_assert!(short.total_variation(&marg).unwrap() < 1e-12);

        // moving the centre inside the window leaves the table alone
        let moved = state.canonicalize(6).unwrap().word_distribution(win).unwrap();
        prop_assert!(moved.total_variation(&wd).unwrap() < 1e-12);
    }
}
