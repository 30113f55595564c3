//! Self-checks: analytic golden processes and DMRG-versus-dense equivalence
//! on chains small enough to diagonalize.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::compmech::synthetic;
use crate::dmrg::DmrgConfig;
use crate::error::Result;
use crate::models::{BoseHubbardParams, IsingParams, ModelParams};
use crate::mps::Window;
use crate::oracle::{exact_half_chain_entropy, exact_model_ground, exact_word_distribution, memory_state_overlaps, DenseState};
use crate::pipeline::{measures_from_words, solve_ground, window_words, AnalysisOptions, BasisChoice, Measures};
use crate::qmodel::{quantum_memory, GramMatrix};
use crate::Exec;

pub const ENERGY_TOL: f64 = 1e-9;
pub const WORD_TV_TOL: f64 = 1e-8;
pub const MEASURE_TOL: f64 = 1e-6;
pub const NUMBER_VARIANCE_TOL: f64 = 1e-6;
pub const GOLDEN_TOL: f64 = 1e-9;

/// Depth of the explicit future-word memory states used as the `C_q` oracle.
pub const MEMORY_STATE_DEPTH: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// One `PASS`/`FAIL` line per check plus a totals line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{tag} {}: {}", c.name, c.detail).unwrap();
        }
        writeln!(
            s,
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        )
        .unwrap();
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ValidateOptions {
    /// Small oracle grid instead of the full one.
    pub quick: bool,
    pub analysis: AnalysisOptions,
}

/// The measures compared across pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMeasures {
    pub c_mu: f64,
    pub c_q: f64,
    pub excess_entropy: f64,
    pub s_half: f64,
    pub causal_states: usize,
}

impl PointMeasures {
    fn new(m: &Measures, s_half: f64) -> Self {
        PointMeasures {
            c_mu: m.c_mu,
            c_q: m.c_q,
            excess_entropy: m.excess_entropy,
            s_half,
            causal_states: m.machine.num_states(),
        }
    }
}

/// One (basis, L) point computed through DMRG and through the dense state.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub model: ModelParams,
    pub basis: BasisChoice,
    pub order: usize,
    pub energy_dmrg: f64,
    pub energy_exact: f64,
    pub word_tv: f64,
    pub dmrg: PointMeasures,
    pub exact: PointMeasures,
    /// `⟨(Σn − νN)²⟩` of the DMRG state, boson models only.
    pub number_variance: Option<f64>,
    pub dmrg_gram: GramMatrix,
    pub exact_gram: GramMatrix,
}

impl OracleComparison {
    pub fn energy_rel_diff(&self) -> f64 {
        (self.energy_dmrg - self.energy_exact).abs() / self.energy_exact.abs().max(1e-300)
    }

    /// Largest difference among `C_μ`, `C_q`, `E`, `S_½`.
    pub fn measure_diff(&self) -> f64 {
        let (a, b) = (&self.dmrg, &self.exact);
        [
            a.c_mu - b.c_mu,
            a.c_q - b.c_q,
            a.excess_entropy - b.excess_entropy,
            a.s_half - b.s_half,
        ]
        .iter()
        .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Tolerance violations; empty when the point agrees.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.energy_rel_diff() <= ENERGY_TOL) {
            v.push(format!("energy rel diff {:.2e}", self.energy_rel_diff()));
        }
        if !(self.word_tv <= WORD_TV_TOL) {
            v.push(format!("word TV {:.2e}", self.word_tv));
        }
        if !(self.measure_diff() <= MEASURE_TOL) {
            v.push(format!("measure diff {:.2e}", self.measure_diff()));
        }
        if let Some(var) = self.number_variance {
            if !(var <= NUMBER_VARIANCE_TOL) {
                v.push(format!("number variance {var:.2e}"));
            }
        }
        v
    }

    pub fn label(&self) -> String {
        let coupling = match self.model {
            ModelParams::Ising(p) => format!("B/J={}", p.b / p.j),
            ModelParams::BoseHubbard(p) => format!("U/J={}", p.u / p.j),
        };
        format!(
            "{} N={} {coupling} {} L={}",
            self.model.name(),
            self.model.n(),
            self.basis.label(),
            self.order
        )
    }
}

/// Run `model` through DMRG and exact diagonalization once, then compare
/// every (basis, order) point.
pub fn oracle_comparisons(
    model: &ModelParams,
    bases: &[BasisChoice],
    orders: &[usize],
    dmrg: &DmrgConfig,
    opts: &AnalysisOptions,
) -> Result<Vec<OracleComparison>> {
    let ground = solve_ground(model, dmrg)?;
    let (energy_exact, exact) = exact_model_ground(model)?;
    let s_exact = exact_half_chain_entropy(&exact)?;
    let number_variance = match model {
        ModelParams::BoseHubbard(p) => {
            Some(DenseState::from_mps(&ground.state)?.number_variance(p.target_particles()))
        }
        ModelParams::Ising(_) => None,
    };
    let mut out = Vec::new();
    for basis in bases {
        let b = basis.basis(model)?;
        for &l in orders {
            let wd = window_words(&ground.state, &b, l, Exec::default())?;
            let win = Window::centered(model.n(), 2 * l)?;
            let wd_exact = exact_word_distribution(&exact, &b, win)?;
            let m = measures_from_words(&wd, l, opts)?;
            let m_exact = measures_from_words(&wd_exact, l, opts)?;
            out.push(OracleComparison {
                model: *model,
                basis: *basis,
                order: l,
                energy_dmrg: ground.energy,
                energy_exact,
                word_tv: wd.total_variation(&wd_exact)?,
                dmrg: PointMeasures::new(&m, ground.s_half),
                exact: PointMeasures::new(&m_exact, s_exact),
                number_variance,
                dmrg_gram: m.gram,
                exact_gram: m_exact.gram,
            });
        }
    }
    Ok(out)
}

pub fn ising_oracle_model(b_over_j: f64) -> Result<ModelParams> {
    Ok(ModelParams::Ising(IsingParams::new(1.0, b_over_j, 10)?))
}

pub fn bose_hubbard_oracle_model(u_over_j: f64) -> Result<ModelParams> {
    Ok(ModelParams::BoseHubbard(BoseHubbardParams::new(
        1.0, u_over_j, 6, 2, 1.0,
    )?))
}

/// Couplings, bases and orders of the oracle grid.
pub fn ising_oracle_grid(quick: bool) -> (Vec<f64>, Vec<BasisChoice>, Vec<usize>) {
    if quick {
        (vec![0.5], vec![BasisChoice::Theta(0.0), BasisChoice::Theta(PI / 2.0)], vec![1, 2])
    } else {
        (
            vec![0.1, 0.5, 2.0],
            [0.0, PI / 4.0, PI / 2.0].map(BasisChoice::Theta).to_vec(),
            vec![1, 2, 3],
        )
    }
}

pub fn bose_hubbard_oracle_grid(quick: bool) -> (Vec<f64>, Vec<usize>) {
    if quick {
        (vec![4.0], vec![1, 2])
    } else {
        (vec![1.0, 4.0, 10.0], vec![1, 2])
    }
}

/// Bond dimension used for the oracle chains.
pub const ORACLE_CHI: usize = 32;

/// Golden-process checks: period-2, fair coin, golden mean.
pub fn golden_checks(opts: &AnalysisOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let order = 2;
    let cases = [
        ("period-2", synthetic::period_two(2 * order), 1.0),
        ("fair coin", synthetic::fair_coin(2 * order), 0.0),
    ];
    for (name, wd, want) in cases {
        out.push(match measures_from_words(&wd, order, opts) {
            Ok(m) => {
                let worst = [m.c_mu, m.c_q, m.excess_entropy]
                    .iter()
                    .fold(0.0f64, |w, x| w.max((x - want).abs()));
                Check::new(
                    format!("golden {name}"),
                    worst <= GOLDEN_TOL,
                    format!(
                        "C_mu={:.12} C_q={:.12} E={:.12} (want {want})",
                        m.c_mu, m.c_q, m.excess_entropy
                    ),
                )
            }
            Err(e) => Check::new(format!("golden {name}"), false, e.to_string()),
        });
    }

    let wd = synthetic::golden_mean(2 * order, 0.5);
    let m = match measures_from_words(&wd, order, opts) {
        Ok(m) => m,
        Err(e) => {
            out.push(Check::new("golden mean", false, e.to_string()));
            return out;
        }
    };
    let states = m.machine.num_states();
    out.push(Check::new(
        "golden mean state count",
        states == 2,
        format!("{states} causal states (want 2)"),
    ));
    let c_mu_want = 3f64.log2() - 2.0 / 3.0;
    out.push(Check::new(
        "golden mean C_mu",
        (m.c_mu - c_mu_want).abs() <= GOLDEN_TOL,
        format!("C_mu={:.12} (want {c_mu_want:.12})", m.c_mu),
    ));
    if states == 2 {
        let g = m.gram.get(0, 1);
        out.push(Check::new(
            "golden mean overlap",
            (g - 0.5f64.sqrt()).abs() <= 1e-10,
            format!("G_01={g:.12} (want {:.12})", 0.5f64.sqrt()),
        ));
    }
    let explicit = memory_state_overlaps(&m.machine, MEMORY_STATE_DEPTH)
        .and_then(GramMatrix::from_overlaps)
        .and_then(|g| quantum_memory(&g, m.machine.stationary()));
    out.push(match explicit {
        Ok(c_q) => Check::new(
            "golden mean C_q vs explicit memory states",
            (m.c_q - c_q).abs() <= MEASURE_TOL,
            format!("C_q={:.12} explicit={c_q:.12}", m.c_q),
        ),
        Err(e) => Check::new("golden mean C_q vs explicit memory states", false, e.to_string()),
    });
    out
}

fn oracle_checks(model: Result<ModelParams>, bases: &[BasisChoice], orders: &[usize], opts: &AnalysisOptions) -> Vec<Check> {
    let dmrg = DmrgConfig::with_chi(ORACLE_CHI);
    let run = model.and_then(|m| oracle_comparisons(&m, bases, orders, &dmrg, opts).map(|c| (m, c)));
    match run {
        Ok((_, points)) => points
            .iter()
            .map(|c| {
                let v = c.violations();
                let detail = if v.is_empty() {
                    format!(
                        "dE={:.1e} TV={:.1e} dMeasures={:.1e}",
                        c.energy_rel_diff(),
                        c.word_tv,
                        c.measure_diff()
                    )
                } else {
                    v.join(", ")
                };
                Check::new(format!("oracle {}", c.label()), v.is_empty(), detail)
            })
            .collect(),
        Err(e) => vec![Check::new("oracle", false, e.to_string())],
    }
}

/// Golden processes, then oracle equivalence on both models.
pub fn run_validation(opts: &ValidateOptions) -> ValidationReport {
    let a = &opts.analysis;
    let mut checks = golden_checks(a);
    let (couplings, bases, orders) = ising_oracle_grid(opts.quick);
    for b in couplings {
        checks.extend(oracle_checks(ising_oracle_model(b), &bases, &orders, a));
    }
    let (couplings, orders) = bose_hubbard_oracle_grid(opts.quick);
    for u in couplings {
        checks.extend(oracle_checks(
            bose_hubbard_oracle_model(u),
            &[BasisChoice::Number],
            &orders,
            a,
        ));
    }
    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_pass_by_default() {
        let checks = golden_checks(&AnalysisOptions::default());
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(checks.len(), 6);
    }

    #[test]
    fn coarse_merge_tolerance_breaks_golden_mean() {
        let opts = AnalysisOptions {
            merge_tol: 1.0,
            ..Default::default()
        };
        let checks = golden_checks(&opts);
        let count = checks.iter().find(|c| c.name == "golden mean state count").unwrap();
        assert!(!count.passed);
    }
}
