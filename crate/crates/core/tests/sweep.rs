use qcomplexity::sweep::{render, run_sweep, sweep_rows, OutputFormat, SweepConfig};
use qcomplexity::Exec;

const ISING: &str = "
[model]
name = ising
N = 12

[grid]
coupling = 0.25:1.0:0.25
theta = 0, pi/2
L = 1, 2

[dmrg]
chi = 12
";

#[test]
fn policies_give_identical_output() {
    let cfg = SweepConfig::parse(ISING).unwrap();
    let seq = render(&sweep_rows(&cfg, Exec::Sequential), OutputFormat::Csv, false);
    let par = render(&sweep_rows(&cfg, Exec::Parallel), OutputFormat::Csv, false);
    assert_eq!(seq, par);
    assert_eq!(seq.lines().count(), cfg.num_points() + 2);
}

#[test]
fn rows_follow_grid_order() {
    let cfg = SweepConfig::parse(ISING).unwrap();
    let rows = sweep_rows(&cfg, Exec::Parallel);
    let keys: Vec<(f64, String, usize)> = rows.iter().map(|r| (r.coupling, r.basis.clone(), r.order)).collect();
    assert_eq!(keys[0], (0.25, "theta=0".into(), 1));
    assert_eq!(keys[1], (0.25, "theta=0".into(), 2));
    assert_eq!(keys[2].1, "theta=1.5707963267948966");
    assert_eq!(keys[4].0, 0.5);
    assert!(rows.iter().all(|r| r.is_ok() && r.dmrg_converged));
}

#[test]
fn bose_hubbard_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bh.jsonl");
    let text = format!(
        "[model]\nname = bosehubbard\nN = 8\nn_max = 2\n\n[grid]\ncoupling = 2, 8\nL = 1, 2\n\n[dmrg]\nchi = 16\n\n[output]\npath = {}\nformat = jsonl\n",
        path.display()
    );
    let cfg = SweepConfig::parse(&text).unwrap();
    let s = run_sweep(&cfg, Exec::default()).unwrap();
    assert_eq!((s.rows, s.failures), (4, 0));
    let out = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["basis"], "number");
    // Mott side is more ordered than the superfluid side
    let c_mu = |i: usize| rows[i]["c_mu"].as_f64().unwrap();
    assert!(c_mu(0) > c_mu(2));
    assert_eq!(rows[4]["summary"]["failures"], 0);
}
