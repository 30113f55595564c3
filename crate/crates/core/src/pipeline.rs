//! One parameter point end to end: MPO, DMRG, basis rotation, central-window
//! word table, causal states, quantum memory.

use std::time::Instant;

use serde::Serialize;

use crate::compmech::{
    build_machine, conditionals, entropy_rate, excess_entropy, statistical_complexity,
    EpsilonMachine, WordDistribution, DEFAULT_MERGE_TOL, DEFAULT_P_FLOOR,
};
use crate::dmrg::{ground_state, DmrgConfig};
use crate::error::{Error, Result};
use crate::models::{number_basis, sigma_theta_basis, MeasurementBasis, ModelParams};
use crate::mps::{MpsState, Window};
use crate::qmodel::{gram_fixed_point, quantum_memory, GramMatrix, DEFAULT_GRAM_MAX_ITER, DEFAULT_GRAM_TOL};
use crate::Exec;

/// Which local observable is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisChoice {
    /// `σ_θ` eigenbasis (spin-½ only).
    Theta(f64),
    /// Occupation numbers.
    Number,
}

impl BasisChoice {
    pub fn label(&self) -> String {
        match self {
            BasisChoice::Theta(t) => format!("theta={}", fmt_num(*t)),
            BasisChoice::Number => "number".into(),
        }
    }

    pub fn basis(&self, model: &ModelParams) -> Result<MeasurementBasis> {
        match (self, model) {
            (BasisChoice::Theta(t), ModelParams::Ising(_)) => sigma_theta_basis(*t),
            (BasisChoice::Number, ModelParams::BoseHubbard(p)) => number_basis(p.n_max),
            (BasisChoice::Theta(_), _) => Err(Error::invalid("theta bases need a spin-1/2 model")),
            (BasisChoice::Number, _) => Err(Error::invalid("number basis needs a boson model")),
        }
    }
}

/// Tolerances of the classical and quantum reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub merge_tol: f64,
    pub p_floor: f64,
    pub gram_tol: f64,
    pub gram_max_iter: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            merge_tol: DEFAULT_MERGE_TOL,
            p_floor: DEFAULT_P_FLOOR,
            gram_tol: DEFAULT_GRAM_TOL,
            gram_max_iter: DEFAULT_GRAM_MAX_ITER,
        }
    }
}

/// Complexity measures of one word table.
#[derive(Debug, Clone)]
pub struct Measures {
    pub c_mu: f64,
    pub c_q: f64,
    pub excess_entropy: f64,
    pub entropy_rate: f64,
    pub dropped_mass: f64,
    pub machine: EpsilonMachine,
    pub gram: GramMatrix,
}

/// Order-`order` analysis of a table of length-`2·order` words.
pub fn measures_from_words(wd: &WordDistribution, order: usize, opts: &AnalysisOptions) -> Result<Measures> {
    if wd.length() != 2 * order {
        return Err(Error::invalid(format!(
            "order {order} needs words of length {}, got {}",
            2 * order,
            wd.length()
        )));
    }
    let cf = conditionals(wd, order, opts.p_floor)?;
    let machine = build_machine(&cf, opts.merge_tol)?;
    let gram = gram_fixed_point(&machine, opts.gram_tol, opts.gram_max_iter)?;
    let c_q = quantum_memory(&gram, machine.stationary())?;
    Ok(Measures {
        c_mu: statistical_complexity(&machine),
        c_q,
        excess_entropy: excess_entropy(wd, order)?,
        entropy_rate: entropy_rate(&cf),
        dropped_mass: cf.dropped_mass(),
        machine,
        gram,
    })
}

/// DMRG output reused across bases and orders.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub model: ModelParams,
    pub chi: usize,
    pub state: MpsState,
    pub energy: f64,
    pub max_truncation_error: f64,
    pub converged: bool,
    pub s_half: f64,
}

pub fn solve_ground(model: &ModelParams, cfg: &DmrgConfig) -> Result<GroundState> {
    let h = model.mpo()?;
    let r = ground_state(&h, cfg)?;
    let s_half = r.ground_state.half_chain_entropy()?;
    Ok(GroundState {
        model: *model,
        chi: cfg.chi,
        state: r.ground_state,
        energy: r.energy,
        max_truncation_error: r.max_truncation_error,
        converged: r.converged,
        s_half,
    })
}

/// Word table of length `2·order` on the central window of `state`.
pub fn window_words(
    state: &MpsState,
    basis: &MeasurementBasis,
    order: usize,
    exec: Exec,
) -> Result<WordDistribution> {
    let win = Window::centered(state.len(), 2 * order)?;
    let s = state.canonicalize(win.start())?;
    let mut wd = s.apply_local_basis(basis)?.word_distribution_with(win, exec)?;
    wd.set_meta("basis", basis.label());
    Ok(wd)
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub model: String,
    pub coupling: f64,
    pub basis: String,
    #[serde(rename = "L")]
    pub order: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub chi: usize,
    pub c_mu: f64,
    pub c_q: f64,
    pub excess_entropy: f64,
    pub s_half: f64,
    pub entropy_rate: f64,
    pub energy: f64,
    pub max_truncation_error: f64,
    pub causal_states: usize,
    pub gram_iterations: usize,
    pub dropped_mass: f64,
    pub dmrg_converged: bool,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ComplexityReport {
    /// Row for a point that failed before any measure was computed.
    pub fn failed(model: &str, n: usize, coupling: f64, basis: &BasisChoice, order: usize, chi: usize, err: &str) -> Self {
        ComplexityReport {
            model: model.into(),
            coupling,
            basis: basis.label(),
            order,
            n,
            chi,
            c_mu: f64::NAN,
            c_q: f64::NAN,
            excess_entropy: f64::NAN,
            s_half: f64::NAN,
            entropy_rate: f64::NAN,
            energy: f64::NAN,
            max_truncation_error: f64::NAN,
            causal_states: 0,
            gram_iterations: 0,
            dropped_mass: f64::NAN,
            dmrg_converged: false,
            error: Some(err.into()),
            wall_time: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub const CSV_HEADER: &'static str = "model,coupling,basis,L,N,chi,C_mu,C_q,E,S_half,h_mu,energy,max_truncation_error,causal_states,gram_iterations,dropped_mass,dmrg_converged,error";

    /// One CSV line (no newline); floats with 17 significant digits.
    pub fn csv_row(&self, timing: bool) -> String {
        let mut cols = vec![
            self.model.clone(),
            fmt_num(self.coupling),
            self.basis.clone(),
            self.order.to_string(),
            self.n.to_string(),
            self.chi.to_string(),
            fmt_num(self.c_mu),
            fmt_num(self.c_q),
            fmt_num(self.excess_entropy),
            fmt_num(self.s_half),
            fmt_num(self.entropy_rate),
            fmt_num(self.energy),
            fmt_num(self.max_truncation_error),
            self.causal_states.to_string(),
            self.gram_iterations.to_string(),
            fmt_num(self.dropped_mass),
            self.dmrg_converged.to_string(),
            self.error.as_deref().map(csv_escape).unwrap_or_default(),
        ];
        if timing {
            cols.push(self.wall_time.map(fmt_num).unwrap_or_default());
        }
        cols.join(",")
    }
}

/// Shortest form that parses back to `x`; exponent notation outside
/// `[1e-5, 1e16)`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if a.is_infinite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\"").replace('\n', " "))
    } else {
        s.to_string()
    }
}

/// Analyze a solved ground state in one basis at one order.
pub fn analyze(
    ground: &GroundState,
    coupling: f64,
    basis: &BasisChoice,
    order: usize,
    opts: &AnalysisOptions,
    exec: Exec,
) -> Result<ComplexityReport> {
    let t0 = Instant::now();
    let b = basis.basis(&ground.model)?;
    let wd = window_words(&ground.state, &b, order, exec)?;
    let m = measures_from_words(&wd, order, opts)?;
    Ok(ComplexityReport {
        model: ground.model.name().into(),
        coupling,
        basis: basis.label(),
        order,
        n: ground.model.n(),
        chi: ground.chi,
        c_mu: m.c_mu,
        c_q: m.c_q,
        excess_entropy: m.excess_entropy,
        s_half: ground.s_half,
        entropy_rate: m.entropy_rate,
        energy: ground.energy,
        max_truncation_error: ground.max_truncation_error,
        causal_states: m.machine.num_states(),
        gram_iterations: m.gram.iterations(),
        dropped_mass: m.dropped_mass,
        dmrg_converged: ground.converged,
        error: None,
        wall_time: Some(t0.elapsed().as_secs_f64()),
    })
}

/// Full pipeline for a single point.
pub fn run_point(
    model: &ModelParams,
    coupling: f64,
    basis: &BasisChoice,
    order: usize,
    dmrg: &DmrgConfig,
    opts: &AnalysisOptions,
) -> Result<ComplexityReport> {
    let t0 = Instant::now();
    let g = solve_ground(model, dmrg)?;
    let mut r = analyze(&g, coupling, basis, order, opts, Exec::default())?;
    r.wall_time = Some(t0.elapsed().as_secs_f64());
    Ok(r)
}
