//! Parameter sweeps: config file, grid execution, CSV / JSON-lines output.
//!
//! Config format, one `key = value` per line under `[section]` headers;
//! `#` starts a comment.
//!
//! ```text
//! [model]
//! name = ising            # ising | bosehubbard
//! N = 64
//! J = 1
//! convention = spin-half  # ising only: spin-half | pauli
//! symmetry_break_h = 1e-8 # ising only, default 1e-8*J
//! n_max = 3               # bosehubbard only
//! nu = 1                  # bosehubbard only
//! penalty_weight = 30     # bosehubbard only, default 10*max(J,U)
//!
//! [grid]
//! coupling = 0.05:1.5:0.05   # B/J or U/J; list or start:stop:step
//! theta = 0, pi/4, pi/2      # ising only
//! L = 1, 3, 5
//!
//! [dmrg]
//! chi = 48
//! max_sweeps = 30
//! energy_tol = 1e-12
//! lanczos_tol = 1e-12
//! lanczos_max_iter = 2000
//! svd_cutoff = 1e-24
//! seed = 0
//!
//! [analysis]
//! merge_tol = 1e-8
//! p_floor = 1e-12
//!
//! [output]
//! path = results.csv      # omitted: stdout
//! format = csv            # csv | jsonl
//! timing = false          # adds wall_time; breaks byte-reproducibility
//! jobs = 0                # worker threads, 0 = all cores
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::dmrg::DmrgConfig;
use crate::error::{Error, Result};
use crate::models::{BoseHubbardParams, IsingParams, ModelParams, SpinConvention};
use crate::pipeline::{analyze, solve_ground, AnalysisOptions, BasisChoice, ComplexityReport};
use crate::Exec;

/// Largest word table a grid point may request, in bits (`2L·log₂d`).
pub const MAX_WORD_BITS: f64 = 26.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Ising {
        j: f64,
        n: usize,
        convention: SpinConvention,
        symmetry_break_h: Option<f64>,
    },
    BoseHubbard {
        j: f64,
        n: usize,
        n_max: usize,
        nu: f64,
        penalty_weight: Option<f64>,
    },
}

impl ModelSpec {
    /// Model at dimensionless coupling `B/J` or `U/J`.
    pub fn at(&self, coupling: f64) -> Result<ModelParams> {
        match *self {
            ModelSpec::Ising {
                j,
                n,
                convention,
                symmetry_break_h,
            } => {
                let mut p = IsingParams::new(j, coupling * j, n)?.with_convention(convention);
                if let Some(h) = symmetry_break_h {
                    p = p.with_symmetry_break(h)?;
                }
                Ok(ModelParams::Ising(p))
            }
            ModelSpec::BoseHubbard {
                j,
                n,
                n_max,
                nu,
                penalty_weight,
            } => {
                let mut p = BoseHubbardParams::new(j, coupling * j, n, n_max, nu)?;
                if let Some(w) = penalty_weight {
                    p = p.with_penalty(w)?;
                }
                Ok(ModelParams::BoseHubbard(p))
            }
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            ModelSpec::Ising { n, .. } | ModelSpec::BoseHubbard { n, .. } => n,
        }
    }

    pub fn local_dim(&self) -> usize {
        match *self {
            ModelSpec::Ising { .. } => 2,
            ModelSpec::BoseHubbard { n_max, .. } => n_max + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    /// `None` writes to stdout.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    pub timing: bool,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub couplings: Vec<f64>,
    pub bases: Vec<BasisChoice>,
    pub orders: Vec<usize>,
    pub dmrg: DmrgConfig,
    pub analysis: AnalysisOptions,
    pub output: OutputSpec,
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = parse_sections(text)?;
        let mut take = |sec: &str| sections.remove(sec).unwrap_or_default();

        let mut m = Section::new("model", take("model"));
        let name = m.required("name")?;
        let n: usize = m.required_parse("N")?;
        let j: f64 = m.parse_or("J", 1.0)?;
        let model = match name.as_str() {
            "ising" => {
                let convention = match m.get("convention").as_deref() {
                    None | Some("spin-half") => SpinConvention::SpinHalf,
                    Some("pauli") => SpinConvention::Pauli,
                    Some(other) => {
                        return Err(Error::Config(format!("unknown convention `{other}`")))
                    }
                };
                ModelSpec::Ising {
                    j,
                    n,
                    convention,
                    symmetry_break_h: m.parse_opt("symmetry_break_h")?,
                }
            }
            "bosehubbard" => ModelSpec::BoseHubbard {
                j,
                n,
                n_max: m.required_parse("n_max")?,
                nu: m.parse_or("nu", 1.0)?,
                penalty_weight: m.parse_opt("penalty_weight")?,
            },
            other => return Err(Error::Config(format!("unknown model `{other}`"))),
        };
        m.finish()?;

        let mut g = Section::new("grid", take("grid"));
        let couplings = parse_grid(&g.required("coupling")?, parse_real)?;
        let bases = match model {
            ModelSpec::Ising { .. } => parse_grid(&g.get("theta").unwrap_or("0".into()), parse_angle)?
                .into_iter()
                .map(BasisChoice::Theta)
                .collect(),
            ModelSpec::BoseHubbard { .. } => match g.get("basis").as_deref() {
                None | Some("number") => vec![BasisChoice::Number],
                Some(other) => return Err(Error::Config(format!("unknown basis `{other}`"))),
            },
        };
        let orders = parse_list(&g.required("L")?, |s| {
            s.parse::<usize>().map_err(|_| format!("bad L `{s}`"))
        })?;
        g.finish()?;

        let mut d = Section::new("dmrg", take("dmrg"));
        let base = DmrgConfig::default();
        let dmrg = DmrgConfig {
            chi: d.parse_or("chi", base.chi)?,
            max_sweeps: d.parse_or("max_sweeps", base.max_sweeps)?,
            energy_tol: d.parse_or("energy_tol", base.energy_tol)?,
            lanczos_tol: d.parse_or("lanczos_tol", base.lanczos_tol)?,
            lanczos_max_iter: d.parse_or("lanczos_max_iter", base.lanczos_max_iter)?,
            svd_cutoff: d.parse_or("svd_cutoff", base.svd_cutoff)?,
            seed: d.parse_or("seed", base.seed)?,
        };
        d.finish()?;

        let mut a = Section::new("analysis", take("analysis"));
        let base = AnalysisOptions::default();
        let analysis = AnalysisOptions {
            merge_tol: a.parse_or("merge_tol", base.merge_tol)?,
            p_floor: a.parse_or("p_floor", base.p_floor)?,
            ..base
        };
        a.finish()?;

        let mut o = Section::new("output", take("output"));
        let output = OutputSpec {
            path: o.get("path").map(PathBuf::from),
            format: o.get("format").map(|s| s.parse()).transpose()?.unwrap_or_default(),
            timing: o.parse_or("timing", false)?,
            jobs: o.parse_or("jobs", 0)?,
        };
        o.finish()?;

        if let Some(extra) = sections.keys().next() {
            return Err(Error::Config(format!("unknown section [{extra}]")));
        }
        let cfg = SweepConfig {
            model,
            couplings,
            bases,
            orders,
            dmrg,
            analysis,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.couplings.is_empty() || self.bases.is_empty() || self.orders.is_empty() {
            return bad("coupling, basis and L grids must be non-empty".into());
        }
        if self.couplings.iter().any(|c| !c.is_finite()) {
            return bad("couplings must be finite".into());
        }
        let n = self.model.n();
        let bits = (self.model.local_dim() as f64).log2();
        for &l in &self.orders {
            if l == 0 {
                return bad("L must be at least 1".into());
            }
            if 2.0 * l as f64 * bits > MAX_WORD_BITS {
                return bad(format!("L = {l} needs {}-bit word tables", 2.0 * l as f64 * bits));
            }
        }
        let max_l = *self.orders.iter().max().expect("non-empty");
        if n < 4 * max_l {
            return bad(format!("N = {n} is below 4*max(L) = {}", 4 * max_l));
        }
        if n % 2 != 0 {
            return bad(format!("N = {n} must be even"));
        }
        self.dmrg.validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.analysis.merge_tol >= 0.0) || !(self.analysis.p_floor >= 0.0) {
            return bad("merge_tol and p_floor must be >= 0".into());
        }
        Ok(())
    }

    /// Number of output rows.
    pub fn num_points(&self) -> usize {
        self.couplings.len() * self.bases.len() * self.orders.len()
    }
}

/// Row and failure counts of a finished sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    pub failures: usize,
}

/// All rows of a sweep, in grid order (coupling, then basis, then L).
/// One DMRG run per coupling; couplings run concurrently under `exec`.
pub fn sweep_rows(cfg: &SweepConfig, exec: Exec) -> Vec<ComplexityReport> {
    let per_coupling = exec.map(&cfg.couplings, |&c| coupling_rows(cfg, c, exec));
    per_coupling.into_iter().flatten().collect()
}

fn coupling_rows(cfg: &SweepConfig, coupling: f64, exec: Exec) -> Vec<ComplexityReport> {
    let t0 = Instant::now();
    let solved = cfg.model.at(coupling).and_then(|m| solve_ground(&m, &cfg.dmrg));
    let dmrg_time = t0.elapsed().as_secs_f64();
    let mut rows = Vec::with_capacity(cfg.bases.len() * cfg.orders.len());
    for basis in &cfg.bases {
        for &l in &cfg.orders {
            let row = match &solved {
                Ok(g) => analyze(g, coupling, basis, l, &cfg.analysis, exec)
                    .map(|mut r| {
                        r.wall_time = r.wall_time.map(|t| t + dmrg_time);
                        r
                    })
                    .map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            rows.push(row.unwrap_or_else(|e| {
                let name = match cfg.model {
                    ModelSpec::Ising { .. } => "ising",
                    ModelSpec::BoseHubbard { .. } => "bosehubbard",
                };
                let msg = format!("coupling {}: {e}", crate::pipeline::fmt_num(coupling));
                ComplexityReport::failed(name, cfg.model.n(), coupling, basis, l, cfg.dmrg.chi, &msg)
            }));
        }
    }
    rows
}

/// Serialize rows plus the summary line.
pub fn render(rows: &[ComplexityReport], format: OutputFormat, timing: bool) -> String {
    let failures = rows.iter().filter(|r| !r.is_ok()).count();
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(ComplexityReport::CSV_HEADER);
            if timing {
                out.push_str(",wall_time");
            }
            out.push('\n');
            for r in rows {
                out.push_str(&r.csv_row(timing));
                out.push('\n');
            }
            writeln!(out, "# summary rows={} failures={failures}", rows.len()).unwrap();
        }
        OutputFormat::Jsonl => {
            for r in rows {
                let mut r = r.clone();
                if !timing {
                    r.wall_time = None;
                }
                out.push_str(&serde_json::to_string(&r).expect("plain data serializes"));
                out.push('\n');
            }
            writeln!(
                out,
                "{{\"summary\":{{\"rows\":{},\"failures\":{failures}}}}}",
                rows.len()
            )
            .unwrap();
        }
    }
    out
}

/// Run the sweep and write its report. The output is opened before any
/// computation so an unwritable path fails fast.
pub fn run_sweep(cfg: &SweepConfig, exec: Exec) -> Result<SweepSummary> {
    cfg.validate()?;
    let mut sink: Box<dyn Write> = match &cfg.output.path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let rows = crate::exec::with_jobs(cfg.output.jobs, || sweep_rows(cfg, exec));
    sink.write_all(render(&rows, cfg.output.format, cfg.output.timing).as_bytes())?;
    sink.flush()?;
    Ok(SweepSummary {
        rows: rows.len(),
        failures: rows.iter().filter(|r| !r.is_ok()).count(),
    })
}

// ---- parsing helpers ----

fn parse_sections(text: &str) -> Result<BTreeMap<String, Vec<(usize, String, String)>>> {
    let mut out: BTreeMap<String, Vec<(usize, String, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (no, raw) in text.lines().enumerate() {
        let no = no + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if out.contains_key(&name) {
                return Err(Error::Config(format!("line {no}: section [{name}] repeated")));
            }
            out.insert(name.clone(), Vec::new());
            current = Some(name);
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {no}: expected `key = value`")));
        };
        let Some(sec) = &current else {
            return Err(Error::Config(format!("line {no}: key outside any section")));
        };
        out.get_mut(sec)
            .expect("section inserted")
            .push((no, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

struct Section {
    name: &'static str,
    entries: BTreeMap<String, String>,
    dup: Option<String>,
}

impl Section {
    fn new(name: &'static str, lines: Vec<(usize, String, String)>) -> Self {
        let mut entries = BTreeMap::new();
        let mut dup = None;
        for (no, k, v) in lines {
            if entries.insert(k.clone(), v).is_some() && dup.is_none() {
                dup = Some(format!("line {no}: [{name}] {k} given twice"));
            }
        }
        Section { name, entries, dup }
    }

    fn get(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("[{}] {key} is required", self.name)))
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str, v: &str) -> Result<T> {
        v.parse()
            .map_err(|_| Error::Config(format!("[{}] {key}: cannot parse `{v}`", self.name)))
    }

    fn required_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.required(key)?;
        self.parse_value(key, &v)
    }

    fn parse_opt<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            Some(v) => self.parse_value(key, &v).map(Some),
            None => Ok(None),
        }
    }

    fn parse_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    fn finish(self) -> Result<()> {
        if let Some(d) = self.dup {
            return Err(Error::Config(d));
        }
        match self.entries.keys().next() {
            Some(k) => Err(Error::Config(format!("[{}] unknown key `{k}`", self.name))),
            None => Ok(()),
        }
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| item(t).map_err(Error::Config))
        .collect()
}

/// Comma list, or an inclusive `start:stop:step` range with each value
/// rounded to 1e-12.
fn parse_grid(s: &str, item: fn(&str) -> std::result::Result<f64, String>) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.len() {
        1 => parse_list(s, item),
        3 => {
            let (a, b, h) = (
                item(parts[0]).map_err(Error::Config)?,
                item(parts[1]).map_err(Error::Config)?,
                item(parts[2]).map_err(Error::Config)?,
            );
            if !(h > 0.0) || b < a {
                return Err(Error::Config(format!("bad range `{s}`")));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(Error::Config(format!("range `{s}` is too long")));
            }
            Ok((0..count)
                .map(|k| ((a + k as f64 * h) * 1e12).round() / 1e12)
                .collect())
        }
        _ => Err(Error::Config(format!("bad grid `{s}`"))),
    }
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("bad number `{s}`"))
}

/// Angles: plain numbers, or `pi` with an optional factor and divisor
/// (`pi/2`, `3pi/4`, `0.5*pi`).
fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let err = || format!("bad angle `{s}`");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), parse_real(d.trim()).map_err(|_| err())?),
        None => (s, 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(f) => {
            let f = f.trim().trim_end_matches('*').trim();
            let factor = if f.is_empty() { 1.0 } else { parse_real(f).map_err(|_| err())? };
            factor * std::f64::consts::PI
        }
        None => parse_real(num).map_err(|_| err())?,
    };
    if den == 0.0 {
        return Err(err());
    }
    Ok(value / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ISING: &str = "
[model]
name = ising
N = 16
[grid]
coupling = 0.2, 2.0   # two points
theta = 0, pi/2
L = 1, 2
[dmrg]
chi = 8
";

    #[test]
    fn parses_minimal_ising() {
        let c = SweepConfig::parse(ISING).unwrap();
        assert_eq!(c.couplings, vec![0.2, 2.0]);
        assert_eq!(c.bases.len(), 2);
        assert_eq!(c.orders, vec![1, 2]);
        assert_eq!(c.dmrg.chi, 8);
        assert_eq!(c.output, OutputSpec::default());
        assert_eq!(c.num_points(), 8);
    }

    #[test]
    fn ranges_are_rounded_and_inclusive() {
        let g = parse_grid("0.05:1.5:0.05", parse_real).unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g[2], 0.15);
        assert_eq!(*g.last().unwrap(), 1.5);
    }

    #[test]
    fn angles() {
        use std::f64::consts::PI;
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let with = |from: &str, to: &str| SweepConfig::parse(&ISING.replace(from, to));
        assert!(with("N = 16", "N = 6").is_err()); // N < 4L
        assert!(with("N = 16", "N = 17").is_err()); // odd
        assert!(with("L = 1, 2", "L = 14").is_err()); // table too large
        assert!(with("coupling = 0.2, 2.0", "coupling = ").is_err());
        assert!(with("chi = 8", "chi = 8\nchi = 9").is_err());
        assert!(with("chi = 8", "bond = 9").is_err());
        assert!(with("[dmrg]", "[dmrgg]").is_err());
        assert!(with("name = ising", "name = potts").is_err());
        assert!(matches!(with("N = 16", "N = x"), Err(Error::Config(_))));
    }

    #[test]
    fn bose_hubbard_section() {
        let c = SweepConfig::parse(
            "[model]\nname = bosehubbard\nN = 8\nn_max = 2\npenalty_weight = 5\n[grid]\ncoupling = 1\nL = 1\n",
        )
        .unwrap();
        assert_eq!(c.bases, vec![BasisChoice::Number]);
        let ModelParams::BoseHubbard(p) = c.model.at(4.0).unwrap() else { panic!() };
        assert_eq!((p.u, p.penalty_weight, p.n_max), (4.0, 5.0, 2));
    }
}
