//! End-to-end runs of the `mepack` binary on scenario files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mepack::algebra::parse_expr;
use tempfile::TempDir;

struct Run {
    out: Output,
    dir: PathBuf,
}

impl Run {
    fn code(&self) -> i32 {
        self.out.status.code().expect("exit code")
    }
    fn stdout(&self) -> String {
        String::from_utf8(self.out.stdout.clone()).unwrap()
    }
    fn stderr(&self) -> String {
        String::from_utf8(self.out.stderr.clone()).unwrap()
    }
    fn file(&self, name: &str) -> String {
        std::fs::read_to_string(self.dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }
}

fn run_in(tmp: &Path, scenario: &str, args: &[&str], envs: &[(&str, &str)]) -> Run {
    let path = tmp.join("scenario.json");
    std::fs::write(&path, scenario).unwrap();
    let dir = tmp.join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mepack"));
    cmd.arg("run").arg(&path).arg("--out").arg(&dir).args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    Run {
        out: cmd.output().unwrap(),
        dir,
    }
}

fn run(scenario: &str, args: &[&str]) -> (TempDir, Run) {
    let tmp = TempDir::new().unwrap();
    let r = run_in(tmp.path(), scenario, args, &[]);
    (tmp, r)
}

const FREE: &str = r#"{"packet": {"Q": 0, "P": 0, "dQ": 1, "dP": 1},
 "potential": {"m": 1, "V": [0]},
 "run": {"mode": "evolve", "grid": {"start": 0, "stop": 1, "step": 0.25}}}"#;

#[test]
fn free_particle_width_at_unit_time() {
    let (_tmp, r) = run(FREE, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let csv = r.file("trajectory.csv");
    let last = csv.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "1");
    // dQ(t)^2 = dQ^2 + dP^2 t^2 / m^2
    assert_eq!(cols[3].parse::<f64>().unwrap(), 2f64.sqrt());
    assert!(r.stdout().contains("provenance=quadratic-exact"));
}

#[test]
fn harmonic_csv_header_is_exact() {
    let scenario = r#"{"packet": {"Q": 1, "P": 0, "dQ": 1, "dP": 1},
        "potential": {"m": 1, "V": [0, 0, 1]}, "run": {"mode": "evolve", "grid": [0, 0.5]}}"#;
    let (_tmp, r) = run(scenario, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.file("trajectory.csv").starts_with("t,Q,P,dQ,dP,nu,S\n"));
    let json: serde_json::Value = serde_json::from_str(&r.file("trajectory.json")).unwrap();
    let keys: Vec<&str> = json[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["t", "Q", "P", "dQ", "dP", "nu", "S"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let scenario = r#"{"packet": {"Q": 1, "P": 0, "dQ": 1, "dP": 1},
        "potential": {"m": 1, "V": [0, 0, 1]}, "run": {"mode": "evolve", "grid": []}}"#;
    let (_tmp, r) = run(scenario, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert_eq!(r.file("trajectory.csv"), "t,Q,P,dQ,dP,nu,S\n");
    assert_eq!(r.file("trajectory.json").trim(), "[]");
}

#[test]
fn corrections_report_the_nu_squared_factor() {
    let (_tmp, r) = run(
        r#"{"potential": {"symbolic": 4}, "run": {"mode": "corrections", "order": 5}}"#,
        &[],
    );
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.stdout().contains("21 - 2/nu^2"), "{}", r.stdout());
}

#[test]
fn moments_print_the_ordering_shift() {
    let scenario = r#"{"packet": {"Q": 0.5, "P": -1, "dQ": 1, "dP": 1.5}, "run": {"mode": "moments"}}"#;
    let (_tmp, r) = run(scenario, &["--expr", "q*p"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.stdout().contains("Q*P + (1/2)*i*hbar"), "{}", r.stdout());
}

#[test]
fn limit_sweep_slope_is_minus_two() {
    let scenario = r#"{"packet": {"Q": 0.5, "P": -1, "dQ": 1, "dP": 1.5},
        "potential": {"m": 1, "V": [0, 0, 1, "1/2", "1/3"]},
        "run": {"mode": "limit-sweep", "order": 5, "expressions": ["p*q^2*p"]}}"#;
    let (_tmp, r) = run(scenario, &["--nu", "10,20,40"]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let csv = r.file("limit_sweep.csv");
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for col in [2, 3] {
        let xs: Vec<f64> = rows.iter().map(|r| r[0].ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[col].abs().ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let slope =
            xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope + 2.0).abs() < 0.01, "column {col}: slope {slope}");
    }
}

#[test]
fn identical_scenarios_give_identical_files() {
    let scenario = r#"{"packet": {"Q": 0.3, "P": 0.2, "dQ": 1, "dP": 1.2},
        "potential": {"m": 1, "V": [0, 0, 1, 0.5, 0.2]},
        "run": {"mode": "evolve", "order": 6, "propagation": "taylor-origin", "grid": {"start": 0, "stop": 0.3, "step": 0.1}}}"#;
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let ra = run_in(a.path(), scenario, &[], &[]);
    let rb = run_in(b.path(), scenario, &[], &[("MEPACK_THREADS", "1")]);
    assert_eq!(ra.code(), 0, "{}", ra.stderr());
    for f in ["trajectory.csv", "trajectory.json", "run.json"] {
        assert_eq!(ra.file(f), rb.file(f), "{f}");
    }
    assert_eq!(ra.stdout(), rb.stdout());
}

#[test]
fn printed_expressions_reparse() {
    let (_tmp, r) = run(
        r#"{"potential": {"symbolic": 4}, "run": {"mode": "derivatives", "order": 3}}"#,
        &[],
    );
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let mut seen = 0;
    for line in r.stdout().lines() {
        let Some((lhs, rhs)) = line.split_once(" = ") else { continue };
        if !lhs.starts_with("d^") {
            continue;
        }
        let words = mepack::algebra::parse_words(rhs).unwrap_or_else(|e| panic!("{rhs}: {e}"));
        if let Some(scalar) = words.as_scalar() {
            assert_eq!(parse_expr(&scalar.to_string()).unwrap(), scalar);
            assert_eq!(scalar.to_string(), rhs);
        } else {
            let weyl = words.to_weyl().unwrap();
            assert_eq!(mepack::algebra::parse_weyl(&weyl.to_string()).unwrap(), weyl);
        }
        seen += 1;
    }
    assert!(seen >= 24, "only {seen} expression lines");
}

#[test]
fn footer_and_metadata() {
    let (_tmp, r) = run(FREE, &[]);
    let footer = r.stdout().lines().last().unwrap().to_string();
    assert!(footer.starts_with("# mode=evolve kind=quantum"), "{footer}");
    let meta: serde_json::Value = serde_json::from_str(&r.file("run.json")).unwrap();
    assert_eq!(meta["mode"], "evolve");
    assert_eq!(meta["provenance"][0], "quadratic-exact");
}

#[test]
fn validation_failures_exit_with_two() {
    let (_tmp, r) = run("{\n  \"packet\": {\"Q\": 0,, }\n}", &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("line 2"), "{}", r.stderr());

    let below = r#"{"packet": {"Q": 0, "P": 0, "dQ": 0.1, "dP": 0.1}, "potential": {"V": [0, 0, 1]},
        "run": {"mode": "evolve", "grid": [0, 1]}}"#;
    let (_tmp, r) = run(below, &[]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("uncertainty bound"), "{}", r.stderr());

    let (_tmp, r) = run(
        r#"{"packet": {"Q": 0, "P": 0, "dQ": 1, "dP": 1, "R": 2}, "run": {"mode": "moments"}}"#,
        &[],
    );
    assert_eq!(r.code(), 2);

    let tmp = TempDir::new().unwrap();
    let r = run_in(tmp.path(), FREE, &[], &[("MEPACK_THREADS", "many")]);
    assert_eq!(r.code(), 2);
}

#[test]
fn insufficient_cutoff_exits_with_three() {
    let scenario = r#"{"packet": {"Q": 0.5, "P": -1, "dQ": 1, "dP": 1.5},
        "potential": {"m": 1, "V": [0, 0, 1]}, "run": {"mode": "oracle-check", "expressions": ["q*p"]}}"#;
    let (_tmp, r) = run(scenario, &["--cutoff", "10"]);
    assert_eq!(r.code(), 3, "{}", r.stderr());
    assert!(r.stderr().contains("hint:"), "{}", r.stderr());
}

#[test]
fn unwritable_output_exits_with_four() {
    let tmp = TempDir::new().unwrap();
    let blocker = tmp.path().join("blocker");
    std::fs::write(&blocker, "").unwrap();
    let path = tmp.path().join("scenario.json");
    std::fs::write(&path, FREE).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mepack"))
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocker"));
}

#[test]
fn oracle_check_agrees_for_moments() {
    let scenario = r#"{"packet": {"Q": 0.5, "P": -1, "dQ": 1, "dP": 1.5},
        "run": {"mode": "oracle-check", "expressions": ["q*p", "p*q^2*p"]}}"#;
    let (_tmp, r) = run(scenario, &[]);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    assert!(r.stdout().contains("quantum <p*q^2*p>"), "{}", r.stdout());
}
