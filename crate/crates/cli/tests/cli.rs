use std::process::{Command, Output};

use akmass::catalog;
use akmass_cli::anchors;
use akmass_cli::config::{RunConfig, Tolerances};
use akmass_cli::report::{mass_table_csv, CheckRecord, VerificationReport};
use akmass_cli::suites;

fn akmass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_akmass")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn catalog_list_json() {
    let out = akmass(&["catalog", "list", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.len() >= 10);
    for e in entries {
        assert!(e["name"].is_string() && e["n"].is_u64() && e["structure"].is_string());
    }
}

#[test]
fn schwarzschild_mass_json() {
    let out = akmass(&["mass", "--metric", "schwarzschild", "--m", "2", "--radii", "50,100,200,400"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m = v["result"]["adm"]["extrapolated"].as_f64().unwrap();
    assert!((m - 2.0).abs() < 0.01);
}

#[test]
fn mass_csv_has_one_row_per_radius_and_a_summary() {
    let out = akmass(&["mass", "--metric", "eguchi_hanson", "--radii", "10,20,40,80", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "radius,value,fit_residual");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("extrapolated,"));
}

#[test]
fn identities_suite_passes_on_random_structure() {
    let out = akmass(&["verify", "identities", "--metric", "random_ak", "--samples", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["report"]["pass"], true);
    assert!(v["report"]["records"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn failing_check_exits_one() {
    let out = akmass(&["verify", "identities", "--metric", "random_ak", "--samples", "5", "--tol", "spinor=1e-30", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let dirac = text.lines().find(|l| l.starts_with("spin.dirac,")).unwrap();
    assert!(dirac.contains(",false,"));
}

#[test]
fn usage_errors_exit_two() {
    let out = akmass(&["mass", "--metric", "nope", "--radii", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eguchi_hanson"));
    assert_eq!(akmass(&["mass", "--bogus"]).status.code(), Some(2));
    assert_eq!(akmass(&["mass", "--metric", "burns", "--radii", "3,2,4"]).status.code(), Some(2));
    assert_eq!(akmass(&["verify", "identities", "--metric", "schwarzschild"]).status.code(), Some(2));
    assert_eq!(akmass(&["blair", "--metric", "fubini_study2", "--tol", "pointwise=-1"]).status.code(), Some(2));
    assert_eq!(akmass(&[]).status.code(), Some(2));
}

#[test]
fn domain_and_io_errors_exit_three() {
    let out = akmass(&["mass", "--metric", "eguchi_hanson", "--radii", "0.5,10,20"]);
    assert_eq!(out.status.code(), Some(3));
    let out = akmass(&["catalog", "list", "--output", "/nonexistent/dir/list.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_reproduces_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"mass\"\nmetric = \"schwarzschild\"\nradii = [50.0, 100.0, 200.0, 400.0]\nformat = \"csv\"\n[params]\nm = 2.0\n",
    )
    .unwrap();
    let from_file = akmass(&["--config", cfg.to_str().unwrap()]);
    let from_flags = akmass(&["mass", "--metric", "schwarzschild", "--m", "2", "--radii", "50,100,200,400", "--format", "csv"]);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_flags.stdout);
    let overridden = akmass(&["--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(json(&overridden)["result"]["adm"]["extrapolated"].is_f64());

    let out_path = dir.path().join("report.csv");
    let out = akmass(&["--config", cfg.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), from_flags.stdout);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"mass\"\nunknown_key = 1\n").unwrap();
    assert_eq!(akmass(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn curvature_command_reports_sphere_scalar() {
    let out = akmass(&["curvature", "--metric", "sphere3", "--point", "0.1,-0.2,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["result"]["scalar"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert_eq!(akmass(&["curvature", "--metric", "sphere3", "--point", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn penrose_blair_and_mass_formula_commands() {
    assert_eq!(akmass(&["penrose", "--metric", "burns", "--c", "0.5"]).status.code(), Some(0));
    assert_eq!(akmass(&["blair", "--metric", "fubini_study1"]).status.code(), Some(0));
    assert_eq!(akmass(&["blair", "--metric", "burns"]).status.code(), Some(3));
    let out = akmass(&["mass-formula", "--metric", "burns", "--radii", "10,20,40,80", "--rmax", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["result"]["lhs"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn report_csv_schema() {
    let empty = VerificationReport::new(false);
    assert_eq!(empty.to_csv().unwrap(), "check_id,anchor,max_residual,tolerance,pass,samples,ms\n");
    assert!(empty.pass);
    let mut rep = VerificationReport::new(false);
    rep.push(CheckRecord::new("a", anchors::BLAIR, 0.5, 1.0, 3));
    rep.push(CheckRecord::new("b", anchors::BLAIR, 2.0, 1.0, 3));
    rep.push(CheckRecord::new("c", anchors::BLAIR, f64::NAN, 1.0, 3));
    assert!(!rep.pass);
    let csv = rep.to_csv().unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[1], "a,total Hermitian scalar curvature is,0.5,1.0,true,3,0");
    assert!(rows[2].contains(",false,") && rows[3].contains(",false,"));
}

#[test]
fn mass_table_schema() {
    let est = akmass::ale_mass::estimate_from_values(vec![1.0, 2.0, 4.0, 8.0], vec![1.5, 1.25, 1.125, 1.0625], 1.0);
    let csv = mass_table_csv(&est).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "extrapolated");
    assert!((last[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn anchors_come_from_the_closed_vocabulary() {
    let tol = Tolerances::default();
    let mut reps = vec![
        suites::identities_suite(&catalog::random_ak(2, 1), 4, 1, &tol, false).unwrap(),
        suites::identities_suite(&catalog::eguchi_hanson(1.0), 4, 1, &tol, false).unwrap(),
        suites::curvature_suite(&catalog::round_sphere(3), 4, 1, &tol, false).unwrap(),
    ];
    reps.push(suites::clifford_algebra_suite(3, &tol).unwrap());
    for rep in reps {
        for r in &rep.records {
            assert!(anchors::ALL.contains(&r.anchor), "{}", r.anchor);
        }
    }
}

#[test]
fn run_config_merge_prefers_flags() {
    let file = RunConfig { metric: Some("burns".into()), seed: Some(1), samples: Some(10), ..Default::default() };
    let flags = RunConfig { seed: Some(9), ..Default::default() };
    let m = flags.over(file);
    assert_eq!((m.metric.as_deref(), m.seed, m.samples), (Some("burns"), Some(9), Some(10)));
    let mut t = Tolerances::default();
    assert!(t.set("nope", 1.0).is_err());
    t.set("mass", 0.5).unwrap();
    assert_eq!(t.mass, 0.5);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_akmass"))
            .env("AKMASS_THREADS", threads)
            .args(["verify", "identities", "--metric", "random_ak", "--samples", "24", "--seed", "3", "--format", "json"])
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
