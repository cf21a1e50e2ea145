use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn spinnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinnet")).args(args).output().expect("binary runs")
}

struct Case {
    dir: TempDir,
}

impl Case {
    fn new(config: &str) -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("c.toml"), config).unwrap();
        Case { dir }
    }

    fn config(&self) -> String {
        self.dir.path().join("c.toml").to_string_lossy().into_owned()
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, command: &str, out: &str, extra: &[&str]) -> Output {
        let cfg = self.config();
        let out = self.out(out);
        let mut args = vec![command, "--config", &cfg, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        spinnet(&args)
    }
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = csv(path);
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn edges(path: &Path) -> Vec<(usize, usize, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("site"))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn build_two_chains() {
    let case = Case::new("[network]\nchains = [{ length = 3 }, { length = 3 }]\n");
    ok(&case.run("build", "o", &[]));
    let e = edges(&case.out("o/edges.txt"));
    assert_eq!(e.iter().map(|x| x.1).max(), Some(6));
    assert_eq!(e.iter().filter(|x| x.2 < 0.0).count(), 1);
    let spectrum = column(&case.out("o/spectrum.csv"), "eigenvalue");
    assert_eq!(spectrum.len(), 6);
}

#[test]
fn build_three_chains_junctions() {
    let case = Case::new("[network]\nchains = [{ length = 3 }, { length = 3 }, { length = 3 }]\n");
    ok(&case.run("build", "o", &[]));
    let e = edges(&case.out("o/edges.txt"));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j, v) in [(2, 3, r), (2, 4, r), (3, 5, r), (4, 5, -r), (5, 6, r), (5, 7, r), (6, 8, r), (7, 8, -r)] {
        let hit = e.iter().find(|x| x.0 == i && x.1 == j).unwrap_or_else(|| panic!("missing {i}-{j}"));
        assert!((hit.2 - v).abs() < 1e-12, "{i}-{j}: {}", hit.2);
    }
}

#[test]
fn build_single_chain_is_a_path() {
    let case = Case::new("[network]\nchains = [{ length = 5, j_max = 2.0 }]\n");
    ok(&case.run("build", "o", &[]));
    let e = edges(&case.out("o/edges.txt"));
    assert_eq!(e.iter().map(|x| (x.0, x.1)).collect::<Vec<_>>(), vec![(1, 2), (2, 3), (3, 4), (4, 5)]);
    assert!(e.iter().all(|x| x.2 > 0.0));
}

#[test]
fn run_centre_injection_leaves_site_after_centre_empty() {
    let case = Case::new("[protocol]\nname = \"ent-center\"\nn = 12\n[trajectory]\nsamples = 41\n");
    let o = case.run("run", "o", &[]);
    ok(&o);
    let report = fs::read_to_string(case.out("o/report.txt")).unwrap();
    assert!(!report.contains("FAIL"), "{report}");
    for p in column(&case.out("o/trajectory.csv"), "site_7") {
        assert!(p < 1e-20, "{p}");
    }
}

#[test]
fn run_router_passes() {
    let case = Case::new("[protocol]\nname = \"router\"\nn = 6\n");
    let o = case.run("run", "o", &[]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let last = *column(&case.out("o/trajectory.csv"), "site_6").last().unwrap();
    assert!((last - 1.0).abs() < 1e-9);
}

#[test]
fn run_twelve_site_period() {
    let case = Case::new(
        "[protocol]\nname = \"mws\"\nsites = 12\n[trajectory]\nduration = \"8 t_m_A\"\nsamples = 9\namplitudes = true\n",
    );
    ok(&case.run("run", "o", &[]));
    let p = case.out("o/trajectory.csv");
    let t = column(&p, "t");
    assert_eq!(t.last(), Some(&8.0));
    assert!((column(&p, "site_5").last().unwrap() - 1.0).abs() < 1e-9);
    assert!((column(&p, "site_4")[4] - 1.0).abs() < 1e-9);
    assert!(case.out("o/amplitudes.csv").exists());
}

#[test]
fn run_with_disorder_reports_ensemble() {
    let case = Case::new(
        "seed = 5\n[protocol]\nname = \"router\"\nn = 8\n[disorder]\nkind = \"diagonal\"\nstrength = 0.05\nrealizations = 50\n",
    );
    let o = case.run("run", "o", &[]);
    ok(&o);
    let report = fs::read_to_string(case.out("o/report.txt")).unwrap();
    assert!(report.contains("diagonal disorder E=0.05"), "{report}");
}

#[test]
fn config_errors_exit_2_with_location() {
    let case = Case::new("[protocol]\nname = \"router\"\nn = 6\nbogus = 1\n");
    let o = case.run("run", "o", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line") && err.contains("bogus"), "{err}");

    let case = Case::new("[protocol]\nname = \"teleport\"\n");
    let o = case.run("run", "o", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("router"));

    let case = Case::new("[protocol]\nname = \"router\"\nn = 7\n");
    assert_eq!(case.run("run", "o", &[]).status.code(), Some(2));
}

const SWEEP: &str = "seed = 11
[protocol]
name = \"router\"
[sweep]
size = [4, 6, 8]
strength = { start = 0.0, stop = 0.6, step = 0.3 }
kinds = [\"diagonal\"]
realizations = 40
";

#[test]
fn sweep_is_worker_independent_and_resumable() {
    let case = Case::new(SWEEP);
    ok(&case.run("sweep", "a", &["--workers", "1"]));
    ok(&case.run("sweep", "b", &["--workers", "3"]));
    let a = fs::read(case.out("a/heatmap.csv")).unwrap();
    assert_eq!(a, fs::read(case.out("b/heatmap.csv")).unwrap());

    let (_, rows) = csv(&case.out("a/heatmap.csv"));
    assert_eq!(rows.len(), 9);
    for r in rows.iter().filter(|r| r[2] == "0") {
        assert!((r[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert!(r[4].parse::<f64>().unwrap() < 1e-12);
    }
    let (_, contour) = csv(&case.out("a/contour.csv"));
    assert!(contour.len() >= 2, "no contour crossing");

    // a partial checkpoint set is completed, giving the same bytes
    let ck = case.out("a/checkpoints");
    let mut files: Vec<_> = fs::read_dir(&ck).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    for f in &files[..4] {
        fs::remove_file(f).unwrap();
    }
    let o = case.run("sweep", "a", &[]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("4 computed, 5 resumed"));
    assert_eq!(a, fs::read(case.out("a/heatmap.csv")).unwrap());

    // checkpoints are actually read: a doctored one shows up in the output
    let target = &files[5];
    let text = fs::read_to_string(target).unwrap();
    let mut ck: serde_json::Value = serde_json::from_str(&text).unwrap();
    ck["mean_bits"] = serde_json::json!(0.5f64.to_bits());
    fs::write(target, ck.to_string()).unwrap();
    ok(&case.run("sweep", "a", &[]));
    assert_ne!(a, fs::read(case.out("a/heatmap.csv")).unwrap());
}

#[test]
fn sweep_seed_changes_results() {
    let case = Case::new(SWEEP);
    ok(&case.run("sweep", "a", &[]));
    ok(&case.run("sweep", "b", &["--seed", "12"]));
    assert_ne!(fs::read(case.out("a/heatmap.csv")).unwrap(), fs::read(case.out("b/heatmap.csv")).unwrap());
}

#[test]
fn replay_matches_and_detects_tampering() {
    let case = Case::new(SWEEP);
    ok(&case.run("sweep", "a", &[]));
    let meta = case.out("a/meta.json");
    let o = spinnet(&["replay", meta.to_str().unwrap()]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("match"));

    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&meta).unwrap()).unwrap();
    assert_eq!(m["seed"], 11);
    assert!(!m["cells"].as_array().unwrap().is_empty());
    m["outputs"]["heatmap.csv"] = serde_json::json!("0".repeat(64));
    fs::write(&meta, m.to_string()).unwrap();
    let o = spinnet(&["replay", meta.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("MISMATCH"));
}

#[test]
fn clean_phase_scan_is_exact() {
    let case = Case::new("[phase_scan]\nn = [8, 12]\ntheta = [0, 45, 170, 300]\ndisorder = [{ kind = \"none\" }]\n");
    ok(&case.run("phase-scan", "o", &[]));
    let p = case.out("o/phase_scan.csv");
    let truth = column(&p, "theta_true");
    let est = column(&p, "theta_mean");
    assert_eq!(truth.len(), 8);
    for (t, e) in truth.iter().zip(&est) {
        assert!((t - e).abs() < 1e-6, "{t} vs {e}");
    }
}

#[test]
fn metadata_records_defaults() {
    let case = Case::new("[protocol]\nname = \"free\"\nn = 8\n");
    ok(&case.run("run", "o", &[]));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(case.out("o/meta.json")).unwrap()).unwrap();
    assert_eq!(m["defaults"]["trajectory.samples"], "201");
    assert_eq!(m["command"], "run");
}
