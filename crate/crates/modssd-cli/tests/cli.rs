use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modssd")).args(args).env_remove("MODSSD_CONFIG").output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines.map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(String::from)).collect()).collect()
}

fn f(row: &HashMap<String, String>, k: &str) -> f64 {
    row[k].parse().unwrap_or_else(|_| panic!("column {k}"))
}

fn json_rows(text: &str) -> Vec<serde_json::Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn decompose_examples() {
    let r = &csv_rows(&run_ok(&["decompose", "2.0", "--alpha", "sqrt-pi", "--d", "2"]))[0];
    assert_eq!((r["ell"].as_str(), r["m_g"].as_str()), ("1", "0"));
    assert!((f(r, "u_g") - 0.22755).abs() < 1e-5);
    let r = &csv_rows(&run_ok(&["decompose", "0"]))[0];
    assert_eq!((r["ell"].as_str(), r["m_g"].as_str(), f(r, "u_g")), ("0", "0", 0.0));
    let r = &csv_rows(&run_ok(&["decompose", "-1e9", "--alpha", "1", "--d", "3"]))[0];
    assert_eq!(r["status"], "ok");
    assert_eq!(f(r, "recomposed"), -1e9);
}

#[test]
fn csv_format_contract() {
    let text = run_ok(&["squeeze-sweep", "--db-min", "-4", "--db-max", "4", "--steps", "3"]);
    assert!(!text.contains('\r'));
    let header = text.lines().next().unwrap();
    assert!(header.contains("rho_01_re,rho_01_im") && header.ends_with("doublings,residual,status"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    // 17 significant digits in scientific notation
    let z = &rows[0]["zeta"];
    let mantissa = z.split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
    for r in &rows {
        assert_eq!(r["status"], "ok");
        assert!(r.values().all(|v| !v.contains("NaN") && !v.contains("inf")));
    }
}

#[test]
fn sweeps_are_deterministic_across_job_counts() {
    let a = run_ok(&["teleport-avg-sweep", "--delta-db", "8,12", "--zeta-db", "10:14:3", "--jobs", "1"]);
    let b = run_ok(&["teleport-avg-sweep", "--delta-db", "8,12", "--zeta-db", "10:14:3", "--jobs", "4"]);
    assert_eq!(a, b);
    let c = run_ok(&["gkp-fidelity-grid", "--db", "10", "--theta-steps", "3", "--phi-steps", "4"]);
    let d = run_ok(&["gkp-fidelity-grid", "--db", "10", "--theta-steps", "3", "--phi-steps", "4"]);
    assert_eq!(c, d);
}

#[test]
fn squeeze_sweep_claims() {
    let rows = csv_rows(&run_ok(&["squeeze-sweep"]));
    assert_eq!(rows.len(), 19);
    for r in &rows {
        assert!(f(r, "bloch_y").abs() <= 1e-12);
    }
    let at = |db: f64| rows.iter().find(|r| f(r, "db") == db).unwrap();
    assert!(f(at(0.0), "fidelity_zero") > f(at(0.0), "fidelity_plus"));
    assert!(f(at(18.0), "fidelity_plus") > 0.99);
}

#[test]
fn fidelity_grid_claims() {
    let rows = csv_rows(&run_ok(&["gkp-fidelity-grid", "--db", "12", "--theta-steps", "3", "--phi-steps", "12"]));
    assert_eq!(rows.len(), 36);
    let eq: Vec<f64> = rows.iter().filter(|r| (f(r, "theta") - std::f64::consts::FRAC_PI_2).abs() < 1e-12).map(|r| f(r, "fidelity")).collect();
    assert_eq!(eq.len(), 12);
    let spread = eq.iter().cloned().fold(f64::MIN, f64::max) - eq.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-2);
    for db in ["8", "10", "12"] {
        let rows = csv_rows(&run_ok(&["gkp-fidelity-grid", "--db", db, "--theta-steps", "3", "--phi-steps", "8"]));
        let pole = rows.iter().filter(|r| f(r, "theta") == 0.0).map(|r| f(r, "fidelity")).fold(f64::MAX, f64::min);
        let equator = rows.iter().filter(|r| f(r, "theta") > 1.0 && f(r, "theta") < 2.0).map(|r| f(r, "fidelity")).fold(0.0, f64::max);
        assert!(pole >= equator);
        assert!(rows.iter().all(|r| (0.0..=1.0).contains(&f(r, "fidelity"))));
    }
}

#[test]
fn teleport_point_zero_outcome_matches_logical_state() {
    let tel = &json_rows(&run_ok(&["teleport-point", "--formula", "ideal", "--zeta", "0.2", "--state", "plus-i"]))[0];
    let ls = &json_rows(&run_ok(&["logical-state", "--delta", "0.2", "--state", "plus-i", "--format", "json"]))[0];
    assert_eq!(tel["formula"], "ideal");
    for part in ["rho_re", "rho_im"] {
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (tel[part][i][j].as_f64().unwrap(), ls[part][i][j].as_f64().unwrap());
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn teleport_point_oracle_and_hq() {
    let args = ["teleport-point", "--delta", "0.2", "--zeta", "0.2", "--s", "0.3", "--t", "-0.4", "--c0", "0.7071067811865476", "--c1", "0,0.7071067811865476", "--check-oracle"];
    let r = &json_rows(&run_ok(&args))[0];
    assert!(r["oracle_trace_distance"].as_f64().unwrap() < 1e-4);
    assert_eq!(r["status"], "ok");
    let q = format!("{}", 10f64.powf(-0.8));
    let point = |formula: &str| {
        json_rows(&run_ok(&["teleport-point", "--delta", &q, "--zeta", &q, "--s", "0.2", "--t", "0.2", "--state", "plus", "--formula", formula]))
            .remove(0)
    };
    let (full, hq) = (point("full"), point("hq"));
    let mut diff = 0.0f64;
    for part in ["rho_re", "rho_im"] {
        for i in 0..2 {
            for j in 0..2 {
                diff = diff.max((full[part][i][j].as_f64().unwrap() - hq[part][i][j].as_f64().unwrap()).abs());
            }
        }
    }
    assert!(diff < 5e-4);
}

#[test]
fn avg_sweep_claims() {
    let rows = csv_rows(&run_ok(&["teleport-avg-sweep"]));
    assert_eq!(rows.len(), 72);
    for pair in rows.chunks(2) {
        assert_eq!(f(&pair[0], "theta"), 0.0);
        assert!(f(&pair[1], "infidelity") > f(&pair[0], "infidelity"));
    }
    for ddb in (8..=18).step_by(2) {
        let zero: Vec<f64> = rows.iter().filter(|r| f(r, "delta_db") == ddb as f64 && f(r, "theta") == 0.0).map(|r| f(r, "infidelity")).collect();
        assert!(zero.windows(2).all(|w| w[1] < w[0]));
    }
    let best = rows.iter().find(|r| f(r, "delta_db") == 18.0 && f(r, "zeta_db") == 18.0 && f(r, "theta") == 0.0).unwrap();
    assert!(f(best, "infidelity") < 1e-2);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("modssd.conf");
    let out = dir.path().join("out.json");
    writeln!(std::fs::File::create(&cfg).unwrap(), "# defaults\nformat = json\nalpha = 1\noutput = {}", out.display()).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_modssd")).args(["decompose", "2.5"]).env("MODSSD_CONFIG", &cfg).status().unwrap();
    assert!(status.success());
    let r = &json_rows(&std::fs::read_to_string(&out).unwrap())[0];
    assert_eq!(r["alpha"], 1.0);
    assert_eq!(r["m_g"], 1);
    let o = Command::new(env!("CARGO_BIN_EXE_modssd"))
        .args(["decompose", "2.5", "--alpha", "2", "--format", "csv", "--output", "flag.csv"])
        .env("MODSSD_CONFIG", &cfg)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let r = &csv_rows(&std::fs::read_to_string(dir.path().join("flag.csv")).unwrap())[0];
    assert_eq!(f(r, "alpha"), 2.0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["decompose"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "1", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["squeeze-sweep", "--steps", "0"]).status.code(), Some(2));
    assert_eq!(run(&["logical-state", "--delta", "-0.2"]).status.code(), Some(2));
    assert_eq!(run(&["logical-state", "--delta", "0.2", "--d", "3"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "1", "--output", "/nonexistent/dir/out.csv"]).status.code(), Some(4));
    let o = run(&["squeeze-sweep", "--db-min", "-300", "--db-max", "-300", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 0"));
    let o = Command::new(env!("CARGO_BIN_EXE_modssd")).args(["decompose", "1"]).env("MODSSD_CONFIG", "/nonexistent.conf").output().unwrap();
    assert_eq!(o.status.code(), Some(4));
}
