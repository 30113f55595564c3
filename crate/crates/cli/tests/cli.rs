use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qcomplexity"));
    c.env_remove("QCOMPLEXITY_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, grid: &str) -> String {
    let text = format!(
        "[model]\nname = ising\nN = 16\n\n[grid]\n{grid}\n\n[dmrg]\nchi = 16\nseed = 3\n"
    );
    let p = dir.join("sweep.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn sweep_to(cfg: &str, out: &Path, extra: &[&str]) -> (Output, String) {
    let mut args = vec!["sweep", "--config", cfg, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    let text = std::fs::read_to_string(out).unwrap_or_default();
    (o, text)
}

fn field(header: &str, row: &str, name: &str) -> String {
    let i = header.split(',').position(|h| h == name).unwrap();
    row.split(',').nth(i).unwrap().to_string()
}

#[test]
fn three_point_grid_gives_header_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coupling = 0.3, 0.5, 0.8\ntheta = 0\nL = 2");
    let (o, text) = sweep_to(&cfg, &dir.path().join("out.csv"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "{text}");
    assert!(lines[0].starts_with("model,coupling,basis,L,"));
    for (row, c) in lines[1..4].iter().zip(["0.3", "0.5", "0.8"]) {
        assert_eq!(field(lines[0], row, "coupling"), c);
        assert_eq!(field(lines[0], row, "error"), "");
    }
    assert_eq!(lines[4], "# summary rows=3 failures=0");
}

#[test]
fn invalid_point_becomes_error_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coupling = -0.5, 0.5\ntheta = 0\nL = 1");
    let (o, text) = sweep_to(&cfg, &dir.path().join("out.csv"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(field(lines[0], lines[1], "error").contains("coupling -0.5"));
    assert_eq!(field(lines[0], lines[2], "error"), "");
    assert_eq!(lines[3], "# summary rows=2 failures=1");
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    // N below 4*max(L)
    let cfg = write_config(dir.path(), "coupling = 0.5\ntheta = 0\nL = 5");
    let (o, _) = sweep_to(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let p = dir.path().join("typo.cfg");
    std::fs::write(&p, "[model]\nname = ising\nN = 16\nchii = 3\n").unwrap();
    let o = run(&["sweep", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("chii"));

    let o = run(&["sweep", "--config", dir.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coupling = 0.2:1.0:0.4\ntheta = 0, pi/4\nL = 1, 2");
    let (a, first) = sweep_to(&cfg, &dir.path().join("a.csv"), &["--jobs", "1"]);
    let (b, second) = sweep_to(&cfg, &dir.path().join("b.csv"), &["--jobs", "1"]);
    let (c, threaded) = sweep_to(&cfg, &dir.path().join("c.csv"), &["--jobs", "3"]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(first.lines().count(), 14);
    assert_eq!(first, second);
    assert_eq!(first, threaded);
}

#[test]
fn jsonl_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "coupling = 0.5\ntheta = pi/2\nL = 1, 2");
    let (o, text) = sweep_to(&cfg, &dir.path().join("out.jsonl"), &["--format", "jsonl"]);
    assert!(o.status.success());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with('{') && lines[0].contains("\"L\":1"), "{}", lines[0]);
    assert_eq!(lines[2], "{\"summary\":{\"rows\":2,\"failures\":0}}");
}

#[test]
fn unwritable_output_fails_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    // a grid that would take a long time if it ran
    let cfg = write_config(dir.path(), "coupling = 0.05:1.5:0.05\ntheta = 0, pi/4, pi/2\nL = 1, 2, 3, 4");
    let out = dir.path().join("no/such/dir/out.csv");
    let t0 = std::time::Instant::now();
    let (o, _) = sweep_to(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(t0.elapsed().as_secs() < 5);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

fn point_row(theta: &str) -> (String, String) {
    let o = run(&[
        "point", "--model", "ising", "--coupling", "5", "--theta", theta, "--L", "3", "--N", "32", "--chi", "16",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    (lines.next().unwrap().to_string(), lines.next().unwrap().to_string())
}

fn num(header: &str, row: &str, name: &str) -> f64 {
    field(header, row, name).parse().unwrap()
}

#[test]
fn point_deep_paramagnet_is_nearly_deterministic() {
    let (h, r) = point_row("0");
    for name in ["C_q", "E", "S_half", "h_mu"] {
        let v = num(&h, &r, name);
        assert!(v < 1e-2, "{name} = {v}");
    }
    // rare spin flips still split off low-weight causal states
    assert!(num(&h, &r, "C_mu") < 0.05);
}

#[test]
fn point_transverse_basis_is_near_random() {
    let (h, r) = point_row("1.5707963267948966");
    assert!((num(&h, &r, "h_mu") - 1.0).abs() < 5e-3);
    assert!(num(&h, &r, "E") < 5e-3);
    assert!(num(&h, &r, "C_q") < 1e-2);
    // every length-3 past is its own causal state
    assert!(num(&h, &r, "C_mu") > 2.9);
    assert_eq!(field(&h, &r, "causal_states"), "8");
}

#[test]
fn point_rejects_out_of_range_theta() {
    let o = run(&["point", "--model", "ising", "--coupling", "0.5", "--theta", "2", "--N", "8", "--L", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("theta"));
}

#[test]
fn validate_quick_passes() {
    let o = run(&["validate", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().ends_with(" 0 failed"));
}

#[test]
fn coarse_merge_tolerance_fails_validation() {
    let o = run(&["validate", "--quick", "--merge-tol", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL golden mean state count"));

    let o = run(&["validate", "--quick", "--merge-tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}
