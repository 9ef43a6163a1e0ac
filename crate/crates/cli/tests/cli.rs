use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcd-cnoidal"))
        .args(args)
        .args(["--out-dir", dir.to_str().unwrap()])
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const FIG2A: [&str; 18] = [
    "family", "--set", "4.1.2", "--lambda", "1", "--m", "0.70710678", "--sigma", "1", "--a", "1", "--b", "-8/3", "--c", "1",
    "--d", "1", "--sign",
];

fn fig2a(sign: &str) -> Vec<&str> {
    let mut v = FIG2A.to_vec();
    v.push(sign);
    v
}

#[test]
fn family_writes_json_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &fig2a("top"));
    let record = json(dir.path().join("family-4.1.2.json"));
    assert_eq!(record["config"]["command"]["family"]["b"], "-8/3");
    assert!(record["result"]["residual"]["relative"].as_f64().unwrap() <= 1e-9);

    let csv = fs::read_to_string(dir.path().join("family-4.1.2.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("xi,eta,w"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 801);
    for field in rows[1].split(',') {
        assert!(!field.contains('e'), "{field}");
        let digits = field.trim_start_matches('-').replace('.', "");
        assert_eq!(digits.trim_start_matches('0').len(), 17, "{field}");
    }

    let svg = fs::read_to_string(dir.path().join("family-4.1.2.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn flat_eta_member() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["family", "--set", "4.3", "--d", "2", "--lambda", "2", "--m", "0.75", "--sigma", "0.125"]);
    let csv = fs::read_to_string(dir.path().join("family-4.3.csv")).unwrap();
    let etas: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(etas.iter().all(|e| *e == "-1.0000000000000000"));
    let ws: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let spread = ws.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ws.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread > 1.0);
}

#[test]
fn domain_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["family", "--set", "4.1.1", "--m", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m = 0 is excluded"));
    let out = run(dir.path(), &["family", "--set", "4.1.2", "--a", "1", "--b", "1", "--c", "1", "--d", "1", "--m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["classify", "--a", "1/0", "--b", "0", "--c", "0", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_anchor() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["classify", "--a", "0", "--b", "0", "--c", "0.5", "--d", "-0.1667"]);
    assert!(out.starts_with("SemiTrivialEtaConstant"));
    assert_eq!(json(dir.path().join("classify.json"))["result"]["shape"]["kind"], "SemiTrivialEtaConstant");
}

#[test]
fn verify_accepts_family_output_and_rejects_a_perturbed_one() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["family", "--figure", "3a"]);
    let input = dir.path().join("fig3a.json");
    let out = ok(dir.path(), &["verify", "--input", input.to_str().unwrap(), "--samples", "1024"]);
    assert!(out.contains("PASS"));

    let mut sol = json(&input)["result"]["solution"].clone();
    sol["k"][0] = Value::from(sol["k"][0].as_f64().unwrap() * (1.0 + 1e-4));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, sol.to_string()).unwrap();
    let out = run(dir.path(), &["verify", "--input", bad.to_str().unwrap(), "--a", "1", "--b", "-1", "--c", "0", "--d", "1/3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "a bare record needs the constants");
}

#[test]
fn solve_finds_both_branches() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &fig2a("top"));
    ok(dir.path(), &[&fig2a("bottom")[..], &["--name", "bottom"]].concat());
    ok(
        dir.path(),
        &[
            "solve", "--system", "coeffs1", "--pin", "m=0.70710678,lambda=1,sigma=1", "--a", "1", "--b", "-8/3", "--c", "1", "--d", "1",
            "--starts", "2000", "--seed", "42",
        ],
    );
    let found = json(dir.path().join("solve.json"));
    assert_eq!(found["config"]["rng_seed"], 42);
    let solutions = found["result"]["solutions"].as_array().unwrap();
    assert_eq!(solutions.len(), 2);
    for file in ["family-4.1.2.json", "bottom.json"] {
        let want = json(dir.path().join(file))["result"]["solution"].clone();
        let coeffs = |s: &Value| -> Vec<f64> {
            s["j"].as_array().unwrap().iter().chain(s["k"].as_array().unwrap()).map(|x| x.as_f64().unwrap()).collect()
        };
        let best = solutions
            .iter()
            .map(|s| coeffs(s).iter().zip(coeffs(&want)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert!(best <= 1e-8, "{file}: {best}");
    }
}

#[test]
fn family_output_seeds_newton() {
    let dir = TempDir::new().unwrap();
    for name in ["1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b"] {
        ok(dir.path(), &["family", "--figure", name]);
        let seed = dir.path().join(format!("fig{name}.json"));
        ok(dir.path(), &["solve", "--seed-from", seed.to_str().unwrap(), "--name", "seeded"]);
        let root = &json(dir.path().join("seeded.json"))["result"]["root"];
        assert!(root["iterations"].as_u64().unwrap() <= 2, "{name}: {root}");
        let tol = json(dir.path().join("seeded.json"))["result"]["tol"].as_f64().unwrap();
        assert!(root["residual"].as_f64().unwrap() <= tol && tol <= 1e-6, "{name}: {tol}");
    }
}

#[test]
fn failed_newton_exits_3() {
    let dir = TempDir::new().unwrap();
    let seed = dir.path().join("seed.json");
    let record = r#"{"family":"Numeric","j":[5,0,-3,0,0],"k":[40,0,0.001],"lambda":1,"m":0.70710678,"sigma":1}"#;
    fs::write(&seed, record).unwrap();
    let out = run(
        dir.path(),
        &[
            "solve", "--seed-from", seed.to_str().unwrap(), "--a", "1", "--b", "-8/3", "--c", "1", "--d", "1", "--pin",
            "m=0.70710678,lambda=1,sigma=1,j0=-3,k0=40,k2=0.001",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn saved_config_reproduces_the_run() {
    let first = TempDir::new().unwrap();
    let second = TempDir::new().unwrap();
    ok(first.path(), &["family", "--figure", "2b", "--periods", "3"]);
    ok(second.path(), &["--config", first.path().join("fig2b.json").to_str().unwrap()]);
    for ext in ["csv", "svg"] {
        let a = fs::read(first.path().join(format!("fig2b.{ext}"))).unwrap();
        let b = fs::read(second.path().join(format!("fig2b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
    assert_eq!(json(first.path().join("fig2b.json"))["result"], json(second.path().join("fig2b.json"))["result"]);

    let out = run(second.path(), &["--config", first.path().join("fig2b.json").to_str().unwrap(), "classify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_and_limit_reports() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["reduce", "--shape", "c-nonzero", "--n-max", "4"]);
    let report = json(dir.path().join("reduce.json"));
    let runs = report["result"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0]["branches"][0]["steps"][0]["by"], "h2,5");

    let out = run(dir.path(), &["reduce", "--shape", "c-zero", "--a", "-1", "--b", "zero", "--d", "zero", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(1));

    ok(dir.path(), &["limit", "--kind", "c-to-zero", "--a", "1/2", "--b", "2", "--d", "-1", "--lambda", "0.5", "--sigma", "1", "--m", "0.5"]);
    let table = json(dir.path().join("limit.json"));
    assert_eq!(table["result"]["monotone"], true);
    assert!(table["result"]["rows"][5]["error"].as_f64().unwrap() < 1e-8);

    let out = run(dir.path(), &["limit", "--kind", "c-to-zero", "--a", "1/2", "--b", "2", "--d", "-1", "--lambda", "0.5", "--sigma", "-1", "--m", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonexistence_on_one_grid_point() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["nonexistence", "--constrained", "j3", "--grid-a", "1", "--grid-b", "-1", "--grid-d", "1/3", "--starts", "100"]);
    let report = json(dir.path().join("nonexistence-j3.json"));
    assert_eq!(report["config"]["rng_seed"], 7);
    assert_eq!(report["result"]["grid_points"], 1);
    assert_eq!(report["result"]["counterexamples"].as_array().unwrap().len(), 0);

    let out = run(dir.path(), &["nonexistence", "--constrained", "k1", "--values", "1e-4"]);
    assert_eq!(out.status.code(), Some(2), "exclusion band violations are usage errors");
}
