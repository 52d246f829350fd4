use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use asbm_cli::commands::replicate::{load_runs, summarize, RunRecord};
use asbm_cli::manifest::{RunManifest, MANIFEST_FILE};
use asbm_core::diagnostics::DiagnosticsReport;
use asbm_core::distributions::RngStream;
use asbm_core::samplers::{SamplerConfig, TraceRecord, Variant};
use asbm_core::ChainTrace;
use rand::Rng;

fn asbm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asbm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("ASBM_OUTPUT_ROOT")
        .output()
        .unwrap()
}

fn ok(args: &[&str], cwd: &Path) {
    let out = asbm(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(args: &[&str], cwd: &Path) -> i32 {
    asbm(args, cwd).status.code().unwrap()
}

fn read(path: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_slice(&read(dir.join(MANIFEST_FILE))).unwrap()
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/star.toml")
}

#[test]
fn generate_is_seeded_and_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let star = config_path();
    ok(&["generate", "sbm", "--config", star.to_str().unwrap(), "--seed", "7", "--out", "a"], d);
    ok(&["generate", "sbm", "--config", star.to_str().unwrap(), "--seed", "7", "--out", "b"], d);
    ok(&["generate", "star", "--seed", "7", "--out", "c"], d);
    for f in ["edges.txt", "truth.csv", "stats.json"] {
        assert_eq!(read(d.join("a").join(f)), read(d.join("b").join(f)));
        // the config file describes the same network as the built-in example
        assert_eq!(read(d.join("a").join(f)), read(d.join("c").join(f)));
    }
    assert_eq!(manifest(&d.join("a")).seed, 7);

    ok(&["generate", "lfr", "--reps", "3", "--seed", "1", "--davg", "10", "--out", "lfr"], d);
    let m = manifest(&d.join("lfr"));
    assert_eq!(m.outputs.len(), 3);
    for r in 0..3 {
        let dir = d.join("lfr").join(format!("rep-{r:03}"));
        assert_eq!(manifest(&dir).config["rep"], r);
        // a single replicate can be regenerated from its own manifest
        let again = format!("again-{r}");
        ok(&["generate", "--config", dir.join(MANIFEST_FILE).to_str().unwrap(), "--out", &again], d);
        assert_eq!(read(dir.join("edges.txt")), read(d.join(&again).join("edges.txt")));
    }
    assert_ne!(read(d.join("lfr/rep-000/edges.txt")), read(d.join("lfr/rep-001/edges.txt")));
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_asbm"))
        .args(["generate", "star"])
        .current_dir(tmp.path())
        .env("ASBM_OUTPUT_ROOT", tmp.path().join("root"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("root/generate/edges.txt").is_file());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&["frobnicate"], d), 2);
    assert_eq!(code(&["generate", "lfr", "--mu", "1.5", "--out", "x"], d), 2);
    assert_eq!(code(&["generate", "sbm", "--n", "10", "--out", "x"], d), 2);
    assert_eq!(code(&["generate", "lfr", "--n", "100", "--nmin", "60", "--nmax", "70", "--out", "x"], d), 3);
    std::fs::write(d.join("bad.toml"), "mu = 0.2\nmixing = 0.3\n").unwrap();
    assert_eq!(code(&["generate", "lfr", "--config", "bad.toml", "--out", "x"], d), 2);

    ok(&["generate", "star", "--out", "net"], d);
    assert_eq!(code(&["fit", "--variant", "sbm-k", "--input", "net/edges.txt", "--out", "f"], d), 2);
    assert_eq!(code(&["fit", "--input", "missing.txt", "--out", "f"], d), 2);
    assert_eq!(code(&["fit", "--variant", "nope", "--input", "net/edges.txt"], d), 2);

    let fit = ["fit", "--input", "net/edges.txt", "--burnin", "10", "--thin", "1"];
    ok(&[&fit[..], &["--iters", "20", "--chains", "1", "--out", "one"]].concat(), d);
    assert_eq!(code(&["diagnose", "--traces", "one", "--out", "diag"], d), 4);
    ok(&[&fit[..], &["--iters", "30", "--out", "longer"]].concat(), d);
    assert_eq!(code(&["diagnose", "--traces", "one/chain-0", "longer/chain-0", "--out", "diag"], d), 4);
    assert_eq!(code(&["diagnose", "--traces", "nothing-here", "--out", "diag"], d), 2);
}

#[test]
fn fit_chains_and_schedule() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["generate", "star", "--seed", "3", "--out", "net"], d);
    let fit = ["fit", "--input", "net/edges.txt", "--variant", "asbm", "--iters", "3000", "--burnin", "1000"];
    ok(&[&fit[..], &["--thin", "5", "--lambda", "0.45", "--m", "3", "--out", "two"]].concat(), d);
    for c in 0..2 {
        let t = ChainTrace::read_dir(&d.join(format!("two/chain-{c}"))).unwrap();
        assert_eq!(t.len(), 600);
        assert_eq!(t.records[0].iteration, 1005);
    }
    assert!(!d.join("two/chain-2").exists());

    let short = ["fit", "--input", "net/edges.txt", "--variant", "sbm-k", "--k", "3", "--iters", "50"];
    ok(&[&short[..], &["--burnin", "10", "--chains", "4", "--seed", "11", "--workers", "1", "--out", "w1"]].concat(), d);
    ok(&[&short[..], &["--burnin", "10", "--chains", "4", "--seed", "11", "--workers", "3", "--out", "w3"]].concat(), d);
    let mut seeds = Vec::new();
    for c in 0..4 {
        let a = d.join(format!("w1/chain-{c}"));
        let b = d.join(format!("w3/chain-{c}"));
        for f in ["labels.csv", "p.csv", "scalars.csv", "trace.json"] {
            assert_eq!(read(a.join(f)), read(b.join(f)), "chain {c} {f}");
        }
        seeds.push(ChainTrace::read_dir(&a).unwrap().config.seed);
    }
    seeds.sort();
    seeds.dedup();
    assert_eq!(seeds.len(), 4);

    // rerun from the manifest
    ok(&["fit", "--config", "w1/manifest.json", "--out", "again"], d);
    assert_eq!(read(d.join("w1/chain-2/labels.csv")), read(d.join("again/chain-2/labels.csv")));
}

fn synthetic_trace(deviances: Vec<f64>, n: usize) -> ChainTrace {
    let records = deviances
        .into_iter()
        .enumerate()
        .map(|(t, deviance)| TraceRecord {
            iteration: t + 1,
            z: (0..n).map(|i| i % 2).collect(),
            k: 2,
            p: vec![vec![0.5, 0.1], vec![0.1, 0.5]],
            epsilon: Some(0.3),
            deviance,
        })
        .collect();
    ChainTrace { config: SamplerConfig::new(Variant::Asbm), n, records }
}

fn report(dir: &Path) -> DiagnosticsReport {
    serde_json::from_slice(&read(dir.join("report.json"))).unwrap()
}

#[test]
fn diagnose_flags_drift_and_degenerate_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut rng = RngStream::new(4);
    let mut noise = |len: usize, drift: f64| -> Vec<f64> {
        (0..len).map(|t| 100.0 + drift * t as f64 + rng.random::<f64>() - 0.5).collect()
    };
    synthetic_trace(noise(400, 0.0), 6).write_dir(&d.join("flat/chain-0")).unwrap();
    synthetic_trace(noise(400, 0.0), 6).write_dir(&d.join("flat/chain-1")).unwrap();
    synthetic_trace(noise(400, 0.05), 6).write_dir(&d.join("drift/chain-0")).unwrap();
    synthetic_trace(noise(400, 0.05), 6).write_dir(&d.join("drift/chain-1")).unwrap();

    ok(&["diagnose", "--traces", "flat", "--out", "r-flat"], d);
    let r = report(&d.join("r-flat"));
    assert!(r.converged, "{r:?}");
    assert_eq!(r.n_samples, 800);
    assert_eq!(r.ess_per_sample.len(), 2);

    ok(&["diagnose", "--traces", "drift", "--out", "r-drift"], d);
    let r = report(&d.join("r-drift"));
    assert!(!r.converged);
    assert!(r.rhat_deviance.unwrap() > 1.1);
    assert_eq!(code(&["diagnose", "--traces", "drift", "--strict", "true", "--out", "r-drift"], d), 4);

    // duplicated constant trace: zero within-chain variance
    synthetic_trace(vec![5.0; 50], 6).write_dir(&d.join("same/chain-0")).unwrap();
    synthetic_trace(vec![5.0; 50], 6).write_dir(&d.join("same/chain-1")).unwrap();
    ok(&["diagnose", "--traces", "same", "--out", "r-same"], d);
    let r = report(&d.join("r-same"));
    assert_eq!(r.rhat_deviance, None);
    assert!(!r.converged);
}

#[test]
fn diagnose_star_fit_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(&["generate", "star", "--seed", "2", "--out", "net"], d);
    ok(&["fit", "--input", "net/edges.txt", "--variant", "asbm-k", "--k", "3", "--iters", "300", "--burnin", "100", "--out", "fit"], d);
    ok(&["diagnose", "--traces", "fit", "--truth", "net/truth.csv", "--out", "diag"], d);
    let text = String::from_utf8(read(d.join("diag/report.json"))).unwrap();
    for key in ["rhatDeviance", "essPerSample", "kHat", "ari", "relativeKError", "converged"] {
        assert!(text.contains(key), "{key}");
    }
    let r = report(&d.join("diag"));
    assert!(r.ari.is_some());
    let psm = String::from_utf8(read(d.join("diag/psm.csv"))).unwrap();
    assert_eq!(psm.lines().count(), 100);
    assert!(psm.lines().all(|l| l.split(',').count() == 100));
    let partition = String::from_utf8(read(d.join("diag/partition.csv"))).unwrap();
    assert_eq!(partition.lines().count(), 101);
    let p_hat = String::from_utf8(read(d.join("diag/p_hat.csv"))).unwrap();
    assert_eq!(p_hat.lines().count(), r.k_hat);
    assert_eq!(manifest(&d.join("diag")).inputs.len(), 3);
}

#[test]
fn replicate_is_deterministic_and_aggregates_from_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let grid = [
        "replicate", "--mus", "0.1,0.4", "--davgs", "10,60", "--reps", "2", "--variants", "sbm,asbm", "--n", "60",
        "--nmax", "20", "--dmax", "20", "--iters", "40", "--burnin", "20", "--thin", "2", "--seed", "5",
    ];
    ok(&[&grid[..], &["--workers", "1", "--out", "a"]].concat(), d);
    ok(&[&grid[..], &["--workers", "4", "--out", "b"]].concat(), d);
    assert_eq!(read(d.join("a/results.csv")), read(d.join("b/results.csv")));
    assert_eq!(read(d.join("a/summary.csv")), read(d.join("b/summary.csv")));

    let results = String::from_utf8(read(d.join("a/results.csv"))).unwrap();
    assert_eq!(results.lines().count(), 1 + 2 * 2 * 2 * 2);
    let header = results.lines().next().unwrap();
    for col in ["mu", "davg", "rep", "variant", "converged", "ari", "k_err", "ess_per_sample"] {
        assert!(header.split(',').any(|c| c == col), "{col}");
    }
    // mean degree 60 is above dmax: those cells fail with a usage code and the grid continues
    let runs = load_runs(&d.join("a/runs")).unwrap();
    assert_eq!(runs.len(), 16);
    for r in &runs {
        if r.davg == 60.0 {
            assert_eq!(r.status, "failed:2");
        } else {
            assert_eq!(r.status, "ok", "{r:?}");
        }
    }
    // every summary row equals aggregation of the per-run files of its cell
    assert_eq!(csv::Reader::from_path(d.join("a/summary.csv")).unwrap().records().count(), 8);
    let mut from_csv = csv::Reader::from_path(d.join("a/summary.csv")).unwrap();
    let headers = from_csv.headers().unwrap().clone();
    let idx = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for row in from_csv.records() {
        let row = row.unwrap();
        let mu: f64 = row[idx("mu")].parse().unwrap();
        let davg: f64 = row[idx("davg")].parse().unwrap();
        let variant: Variant = row[idx("variant")].parse().unwrap();
        let cell: Vec<RunRecord> =
            runs.iter().filter(|r| r.mu == mu && r.davg == davg && r.variant == variant).cloned().collect();
        let s = &summarize(&cell)[0];
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        assert_eq!(&row[idx("runs")], s.runs.to_string());
        assert_eq!(&row[idx("converged")], s.converged.to_string());
        assert_eq!(&row[idx("ari_mean")], fmt(s.ari.mean));
        assert_eq!(&row[idx("ari_all_sd")], fmt(s.ari_all.sd));
        assert_eq!(&row[idx("ess_per_sample_mean")], fmt(s.ess_per_sample.mean));
        assert_eq!(&row[idx("ess_per_sample_sd")], fmt(s.ess_per_sample.sd));
    }
    assert_eq!(manifest(&d.join("a")).config["reps"], 2);
}
