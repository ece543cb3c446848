//! The `btf` binary end to end: exit codes, output files and reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use btf::io::{read_summary, write_dataset, KeyValues};
use btf_core::{generate_dataset, Dataset, Noise, Scenario, ScenarioKind};
use tempfile::TempDir;

fn btf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btf"))
        .args(args)
        .env_remove("CI")
        .env("BTF_THREADS", "1")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn sqrt_csv(dir: &Path, n: usize) -> (PathBuf, Dataset) {
    let sc = Scenario::new(ScenarioKind::Sqrt, n, Noise::HalfNormal(1.0)).unwrap();
    let (data, _) = generate_dataset(&sc, 3);
    let path = dir.join("data.csv");
    write_dataset(&path, &data).unwrap();
    (path, data)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fit_with_defaults_stays_above_the_data() {
    let tmp = TempDir::new().unwrap();
    let (input, data) = sqrt_csv(tmp.path(), 100);
    let out = tmp.path().join("out");
    let run = btf(&["fit", "--input", s(&input), "--seed", "4", "--output", s(&out)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let rows = read_summary(&out.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 100);
    let above = rows.iter().filter(|r| r.mean >= r.y).count();
    assert!(above >= 95, "{above}");
    for (r, (x, y)) in rows.iter().zip(data.x().iter().zip(data.y())) {
        assert_eq!((r.x, r.y), (*x, *y));
        assert!(r.lo <= r.mean && r.mean <= r.hi);
    }
    let header = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(header.starts_with("x,y,mean,lo,hi,ess\n"));
    assert!(!out.join("draws.csv").exists());
}

#[test]
fn manifest_reproduces_the_run() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = sqrt_csv(tmp.path(), 30);
    let first = tmp.path().join("first");
    let run = btf(&[
        "fit", "--input", s(&input), "--prior", "lap", "--constraint", "ni-inc", "--iters", "1200",
        "--burnin", "200", "--thin", "2", "--seed", "17", "--output", s(&first),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let manifest = KeyValues::read(&first.join("manifest.txt")).unwrap();
    for key in ["version", "input_sha256", "elapsed_seconds", "seed", "prior", "constraint", "a_sigma"] {
        assert!(manifest.get(key).is_some(), "{key}");
    }
    assert_eq!(manifest.get("seed"), Some("17"));
    assert_eq!(manifest.get("retained"), Some("500"));

    let second = tmp.path().join("second");
    let run = btf(&["fit", "--config", s(&first.join("manifest.txt")), "--output", s(&second)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert_eq!(
        fs::read(first.join("summary.csv")).unwrap(),
        fs::read(second.join("summary.csv")).unwrap()
    );

    fs::write(&input, "x,y\n1,0\n2,1\n3,2\n").unwrap();
    let run = btf(&["fit", "--config", s(&first.join("manifest.txt")), "--output", s(&second)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("checksum"));
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = sqrt_csv(tmp.path(), 20);
    let out = tmp.path().join("out");
    let config = write(
        tmp.path(),
        "run.conf",
        &format!(
            "# small run\ninput={}\noutput={}\niters=300\nburnin=100\nthin=1\nseed=5\nprior=nor\n",
            input.display(),
            out.display()
        ),
    );
    let run = btf(&["fit", "--config", s(&config), "--thin", "4", "--save-draws"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let manifest = KeyValues::read(&out.join("manifest.txt")).unwrap();
    assert_eq!(manifest.get("thin"), Some("4"));
    assert_eq!(manifest.get("prior"), Some("nor"));
    let draws = fs::read_to_string(out.join("draws.csv")).unwrap();
    let mut lines = draws.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("sigma2,theta_1,theta_2"));
    assert!(header.ends_with("theta_20"));
    assert_eq!(lines.count(), 50);

    let bad = write(tmp.path(), "bad.conf", "input=x.csv\nwarmup=3\n");
    let run = btf(&["fit", "--config", s(&bad), "--output", s(&out)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("warmup"));
}

#[test]
fn lower_side_is_the_negated_upper_fit() {
    let tmp = TempDir::new().unwrap();
    let (input, data) = sqrt_csv(tmp.path(), 25);
    let negated = Dataset::new(data.x().to_vec(), data.y().iter().map(|v| -v).collect()).unwrap();
    let neg_input = tmp.path().join("neg.csv");
    write_dataset(&neg_input, &negated).unwrap();
    let common = ["--iters", "800", "--burnin", "200", "--thin", "2", "--seed", "8"];
    let (up, low) = (tmp.path().join("up"), tmp.path().join("low"));
    let mut a = vec!["fit", "--input", s(&input), "--output", s(&up)];
    a.extend(common);
    let mut b = vec!["fit", "--input", s(&neg_input), "--side", "lower", "--output", s(&low)];
    b.extend(common);
    assert_eq!(code(&btf(&a)), 0);
    assert_eq!(code(&btf(&b)), 0);
    let (up, low) = (read_summary(&up.join("summary.csv")).unwrap(), read_summary(&low.join("summary.csv")).unwrap());
    for (u, l) in up.iter().zip(&low) {
        assert!((u.mean + l.mean).abs() < 1e-12, "{} {}", u.mean, l.mean);
        assert!((u.lo + l.hi).abs() < 1e-12 && (u.hi + l.lo).abs() < 1e-12);
    }
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("unsorted.csv", "x,y\n1,0\n3,1\n2,0\n", 2, "row 3"),
        ("duplicate.csv", "x,y\n1,0\n2,1\n2,0\n", 2, "strictly increasing"),
        ("nan.csv", "x,y\n1,0\n2,NaN\n3,0\n", 3, "not finite"),
        ("text.csv", "x,y\n1,0\n2,abc\n3,0\n", 3, "not a number"),
        ("header.csv", "a,b\n1,0\n2,1\n3,0\n", 3, "header"),
    ];
    for (name, text, want, message) in cases {
        let p = write(tmp.path(), name, text);
        let run = btf(&["fit", "--input", s(&p), "--seed", "1", "--output", s(&out)]);
        assert_eq!(code(&run), want, "{name}: {}", stderr(&run));
        assert!(stderr(&run).contains(message), "{name}: {}", stderr(&run));
    }
    let run = btf(&["fit", "--input", s(&tmp.path().join("missing.csv")), "--output", s(&out)]);
    assert_ne!(code(&run), 0);
    assert!(stderr(&run).contains("missing.csv"));
}

#[test]
fn ci_mode_requires_a_seed() {
    let tmp = TempDir::new().unwrap();
    let (input, _) = sqrt_csv(tmp.path(), 10);
    let out = tmp.path().join("out");
    let run = Command::new(env!("CARGO_BIN_EXE_btf"))
        .args(["fit", "--input", s(&input), "--output", s(&out), "--iters", "100", "--burnin", "10"])
        .env("CI", "true")
        .output()
        .unwrap();
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("--seed"));
}

#[test]
fn simulate_writes_metrics() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("sim");
    let small = ["--n", "30", "--iters", "600", "--burnin", "100", "--thin", "5", "--seed", "2"];
    let mut args = vec!["simulate", "--scenario", "pc", "--noise", "a", "--reps", "2", "--methods", "hs,lapni", "--out", s(&out)];
    args.extend(small);
    let run = btf(&args);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], "method,rmse_mean,rmse_sd,al,cp");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("hs,") && lines[2].starts_with("lapni,"));
    assert!(lines[1].split(',').all(|f| !f.is_empty()));
    let reps = fs::read_to_string(out.join("replications.csv")).unwrap();
    assert_eq!(reps.lines().count(), 5);

    let again = tmp.path().join("again");
    let mut args2 = vec!["simulate", "--scenario", "pc", "--noise", "a", "--reps", "2", "--methods", "hs,lapni", "--out", s(&again)];
    args2.extend(small);
    let threaded = Command::new(env!("CARGO_BIN_EXE_btf")).args(&args2).env("BTF_THREADS", "3").output().unwrap();
    assert_eq!(code(&threaded), 0);
    assert_eq!(metrics, fs::read_to_string(again.join("metrics.csv")).unwrap());

    let one = tmp.path().join("one");
    let mut args = vec!["simulate", "--reps", "1", "--out", s(&one)];
    args.extend(small);
    assert_eq!(code(&btf(&args)), 0);
    let metrics = fs::read_to_string(one.join("metrics.csv")).unwrap();
    let fields: Vec<&str> = metrics.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields.len(), 5);
    assert_eq!(fields[2], "");
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    let run = btf(&["simulate", "--scenario", "cubic", "--out", s(&out)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("cubic"));
    assert_eq!(code(&btf(&["simulate", "--methods", "hs,ridge", "--seed", "1", "--out", s(&out)])), 2);
    assert_eq!(code(&btf(&["bench", "--sizes", "50,x", "--out", s(&out)])), 2);
    assert_eq!(code(&btf(&["frobnicate"])), 2);
    let run = Command::new(env!("CARGO_BIN_EXE_btf"))
        .args(["simulate", "--reps", "1", "--n", "20", "--iters", "50", "--burnin", "10", "--out", s(&out)])
        .env("BTF_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&run), 2);
}

#[test]
fn bench_reports_both_samplers() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("bench");
    let run = btf(&[
        "bench", "--sizes", "50,100", "--reps", "1", "--iters", "400", "--burnin", "100", "--thin", "1",
        "--seed", "3", "--trace-coord", "10", "--max-lag", "5", "--out", s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let table = fs::read_to_string(out.join("bench.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "n,sampler,seconds,mean_ess,reps");
    assert_eq!(rows.len(), 5);
    let mut labels: Vec<String> = rows[1..].iter().map(|r| r.split(',').take(2).collect::<Vec<_>>().join(",")).collect();
    labels.sort();
    assert_eq!(labels, ["100,cw", "100,pg", "50,cw", "50,pg"]);
    assert_eq!(fs::read_to_string(out.join("trace.csv")).unwrap().lines().count(), 301);
    let acf = fs::read_to_string(out.join("acf.csv")).unwrap();
    assert_eq!(acf.lines().count(), 7);
    assert!(acf.lines().nth(1).unwrap().starts_with("0,1.0000000000000000e0,1.0000000000000000e0"));
}

#[test]
fn eta_writes_paired_records() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("eta");
    let run = btf(&[
        "eta", "--etas", "100,500", "--reps", "2", "--n", "30", "--iters", "500", "--burnin", "100",
        "--seed", "6", "--out", s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = fs::read_to_string(out.join("eta.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("eta=100 median_rmse=") && stdout.contains("eta=500 median_rmse="));
}

#[test]
fn geweke_passes_stock_and_flags_sabotage() {
    let stock = btf(&["geweke", "--prior", "lap", "--constraint", "ni", "--fresh-starts", "--draws", "3000", "--seed", "2"]);
    assert_eq!(code(&stock), 0, "{}", String::from_utf8_lossy(&stock.stdout));
    let stdout = String::from_utf8_lossy(&stock.stdout);
    assert!(stdout.starts_with("statistic,ks,p_value\n"));
    assert!(stdout.contains("PASS"));

    let broken = btf(&["geweke", "--prior", "lap", "--draws", "20000", "--thin", "10", "--break", "sigma2", "--seed", "5"]);
    assert_eq!(code(&broken), 1, "{}", String::from_utf8_lossy(&broken.stdout));
    assert!(String::from_utf8_lossy(&broken.stdout).contains("FAIL"));
}
