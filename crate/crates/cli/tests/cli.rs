use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_structrates"))
}

fn repo_configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).arg("--out").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_RATE: &str = r#"
n_grid = [100, 200, 400, 800, 1600]
trials = 6
eval_grid_size = 50
master_seed = 3
slope_window = "all"

[problem]
kind = "power_margin"
alpha = 1.0

[estimator]
kind = "knn"
k0 = 1.0
beta = 1.0
"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn rate_experiment_writes_reports() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "rate.toml", SMALL_RATE);
    let out = dir.path().join("out");
    let o = run(&["rate-experiment", "--seed", "11"], &config, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("fitted -0.") && last.contains("vs theory -0.667"), "{last}");

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["master_seed"], 11);
    assert_eq!(report["config"]["eval_grid_size"], 50);
    assert_eq!(report["per_n"].as_array().unwrap().len(), 5);
    let long = fs::read_to_string(out.join("rates_long.csv")).unwrap();
    assert_eq!(long.lines().count(), 1 + 5 * 6);
    let summary = fs::read_to_string(out.join("rates_summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("n,mean,stderr,zero_count"));
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "rate.toml", SMALL_RATE);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["rate-experiment", "--workers", "1"], &config, &a).status.success());
    let o = bin()
        .env("STRUCTRATES_WORKERS", "3")
        .args(["rate-experiment", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&b)
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["rates_long.csv", "rates_summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_config_exits_two_with_line() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "rate.toml", &SMALL_RATE.replace("trials = 6", "trials = 6\ntrails = 6"));
    let o = run(&["rate-experiment"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 4") && err.contains("trails"), "{err}");

    let config = write(&dir, "broken.json", "{\"problem\": {\"kind\": \"staircase\"},\n\"estimator\": ");
    let o = run(&["rate-experiment"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let config = write(&dir, "rate.yaml", "trials: 1\n");
    assert_eq!(run(&["rate-experiment"], &config, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn contract_violation_exits_one() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "rate.toml", &SMALL_RATE.replace("k0 = 1.0", "k0 = 0.0"));
    let o = run(&["rate-experiment"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k0"));
}

#[test]
fn margin_profile_reports_alpha_and_gap() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "p.toml", "points = 20000\n[problem]\nkind = \"power_margin\"\nalpha = 1.0\n");
    let out = dir.path().join("out");
    let o = run(&["margin-profile"], &config, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("[PASS"), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("profile.json")).unwrap()).unwrap();
    assert!((report["alpha_hat"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert_eq!(report["config"]["points"], 20000);
    assert_eq!(fs::read_to_string(out.join("profile.csv")).unwrap().lines().count(), 51);

    let o = run(&["margin-profile"], &repo_configs().join("profile_staircase.toml"), &dir.path().join("stair"));
    assert!(o.status.success());
    assert!(stdout(&o).contains("P(d < 1.0000) = 0"), "{}", stdout(&o));
}

#[test]
fn random_sampling_follows_seed() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "p.toml",
        "points = 5000\nsampling = \"random\"\n[problem]\nkind = \"separated_support\"\np = 1.0\n",
    );
    let read = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert!(run(&["margin-profile", "--seed", seed], &config, &out).status.success());
        fs::read(out.join("profile.csv")).unwrap()
    };
    assert_eq!(read("a", "5"), read("b", "5"));
    assert_ne!(read("a", "5"), read("c", "6"));
}

#[test]
fn simplex_inspect_default_loss() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "s.toml", "resolution = 10\n");
    let out = dir.path().join("out");
    let o = run(&["simplex-inspect"], &config, &out);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("regions.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 66);
    assert_eq!(csv.lines().next(), Some("mu_a,mu_b,mu_c,decode,frontier_distance,margin_gap"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let counts: Vec<u64> = report["region_counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(counts.iter().sum::<u64>(), 66);

    let o = run(&["simplex-inspect"], &repo_configs().join("simplex.toml"), &dir.path().join("file"));
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("file/regions.csv")).unwrap(), csv);
}

#[test]
fn predict_labels_queries() {
    let dir = TempDir::new().unwrap();
    for (cfg, name) in [("predict.toml", "knn"), ("predict_krr.json", "krr")] {
        let out = dir.path().join(name);
        let o = run(&["predict"], &repo_configs().join("predict").join(cfg), &out);
        assert!(o.status.success(), "{}", stderr(&o));
        let csv = fs::read_to_string(out.join("predictions.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,label,g_-1,g_+1");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,+1,"), "{}", lines[1]);
        assert!(lines[2].starts_with("1,-1,"), "{}", lines[2]);
    }
}

#[test]
fn predict_missing_data_is_runtime_error() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "p.toml",
        "loss = \"nope.json\"\ntrain = \"t.csv\"\nqueries = \"q.csv\"\n[estimator]\nkind = \"knn\"\nk = 1\n",
    );
    assert_eq!(run(&["predict"], &config, &dir.path().join("out")).status.code(), Some(1));
}
