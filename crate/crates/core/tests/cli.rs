use std::process::{Command, Output};

use hurwitz_cx::partition::{BosonReport, FermionReport};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitz-cx"))
        .args(args)
        .env_remove("HURWITZ_CX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_prints_the_number() {
    let out = run(&["count", "--b", "2", "--d", "2", "--e", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "2\n");

    let out = run(&["count", "--b", "4", "--d", "3", "--e", "3", "--method", "brute"]);
    assert_eq!(stdout(&out), "162\n");
}

#[test]
fn graphs_lists_each_graph_with_its_automorphisms() {
    let out = run(&["graphs", "--b", "2", "--k", "1", "--l", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "z1->x1:1 x1->x2:2 x2->w1:1\taut=2\n1 graph(s) in G_{2,1,1}\n");
}

#[test]
fn verification_exits_zero_when_everything_matches() {
    let out = run(&["--format", "json", "verify-boson", "--b-max", "3", "--k-max", "2", "--l-max", "2", "--d-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report: BosonReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.all_match() && report.is_consistent());
    assert!(!report.rows.is_empty());

    let out = run(&["--format", "json", "verify-fermion", "--b-max", "4", "--d-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let report: FermionReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.all_match() && report.is_consistent());
}

#[test]
fn exceeding_the_work_bound_is_a_usage_error() {
    let out = run(&["--work-bound", "10", "count", "--b", "4", "--d", "3,3", "--e", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("exceeds the bound 10"), "{err}");
}

#[test]
fn malformed_arguments_exit_two() {
    for args in [
        &["count", "--b", "1", "--d", "0", "--e", "1"][..],
        &["count", "--d", "1"],
        &["--work-bound", "0", "count", "--d", "1", "--e", "1"],
        &["integral", "--d", "1", "--e", "1", "--quadrature-points", "16"],
        &["no-such-command"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn integral_numeric_check_reports_agreement() {
    let out = run(&["integral", "--b", "2", "--d", "2", "--e", "2", "--numeric-check", "--z", "0.2", "--w", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("I=4\tF=2"), "{text}");
    assert!(text.ends_with("sum over graphs: 2\n"), "{text}");
}

#[test]
fn output_file_receives_the_report() {
    let path = std::env::temp_dir().join(format!("hurwitz-cx-table-{}.csv", std::process::id()));
    let out = run(&["--format", "csv", "--output", path.to_str().unwrap(), "table", "--b", "0", "--k", "1", "--l", "2", "--d-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, "b,k,l,d,e,n\n0,1,2,2,1;1,0\n");
}

#[test]
fn thread_count_from_the_environment_does_not_change_results() {
    let args = ["--format", "json", "table", "--b", "2", "--k", "2", "--l", "1", "--d-max", "5"];
    let serial = Command::new(env!("CARGO_BIN_EXE_hurwitz-cx"))
        .args(args)
        .env("HURWITZ_CX_THREADS", "1")
        .output()
        .unwrap();
    let parallel = run(&args);
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
}
