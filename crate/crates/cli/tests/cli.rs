use std::io::Write;
use std::process::{Command, Output, Stdio};

use raretest::engine::{perm_pvalue, power, solve_alternative, t1er};
use raretest::{Counts2x2, Method, NullModel, TestKind};

fn raretest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raretest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn raretest_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_raretest"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data lines split on tabs, header dropped.
fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn balanced_table_gives_unit_pvalues() {
    let o = raretest(&["test", "--m0", "1000", "--m1", "1000", "--r0", "5", "--r1", "5"]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert!(rows.len() >= 13);
    for r in rows.iter().filter(|r| r[0] != "fisher") {
        let p: f64 = r[2].parse().unwrap();
        if r[1] == "au" {
            // truncation may drop up to 2 epsilon
            assert!(1.0 - p <= 2e-12, "{r:?}");
        } else {
            assert_eq!(p, 1.0, "{r:?}");
        }
    }
}

#[test]
fn test_passes_through_permutation_pvalue() {
    let o = raretest(&[
        "test", "--m0", "1000", "--m1", "1000", "--r0", "5", "--r1", "10", "--kind", "score",
        "--method", "permutation",
    ]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert_eq!(rows.len(), 1);
    let d = Counts2x2::new(1000, 1000, 5, 10).unwrap();
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), perm_pvalue(TestKind::Score, &d).unwrap());
}

#[test]
fn single_au_pvalue_is_fast() {
    let started = std::time::Instant::now();
    let o = raretest(&[
        "test", "--m0", "5000", "--m1", "5000", "--r0", "10", "--r1", "50", "--kind", "score",
        "--method", "au",
    ]);
    assert!(o.status.success());
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn t1er_rows_match_engine() {
    let o = raretest(&[
        "t1er", "--m0", "9500", "--m1", "500", "--emac", "0,20,60,100", "--kind", "score",
    ]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.0);
    for r in &rows[1..] {
        let emac: f64 = r[0].parse().unwrap();
        let value: f64 = r[1].parse().unwrap();
        let model = NullModel::new(9500, 500, emac).unwrap();
        let direct = t1er(TestKind::Score, Method::Standard, &model, 5e-8, 1e-12).unwrap();
        assert_eq!(value, direct);
        // grossly anti-conservative at a 1:19 ratio
        assert!(value > 5e-8, "{r:?}");
    }
}

#[test]
fn t1er_rows_monotone_in_alpha() {
    let run = |alpha: &str| {
        let o = raretest(&[
            "t1er", "--m0", "5000", "--m1", "5000", "--emac", "1:100:11", "--kind", "score",
            "--alpha", alpha,
        ]);
        assert!(o.status.success());
        rows(&o).iter().map(|r| r[1].parse::<f64>().unwrap()).collect::<Vec<_>>()
    };
    let low = run("1e-8");
    let high = run("1e-4");
    assert_eq!(low.len(), 10);
    assert!(low.iter().zip(&high).all(|(a, b)| a <= b));
}

#[test]
fn power_grid_with_null_rows_equal_to_t1er() {
    let o = raretest(&[
        "power", "--m0", "400", "--m1", "600", "--emac", "5,15", "--odds-ratio", "1,3",
        "--kind", "lrt", "--method", "au", "--alpha", "1e-3",
    ]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let emac: f64 = r[0].parse().unwrap();
        let ratio: f64 = r[1].parse().unwrap();
        let value: f64 = r[2].parse().unwrap();
        let alt = solve_alternative(400, 600, emac, ratio).unwrap();
        assert_eq!(value, power(TestKind::Lrt, Method::Au, &alt, 1e-3, 1e-12).unwrap());
        if ratio == 1.0 {
            let model = NullModel::new(400, 600, emac).unwrap();
            let rate = t1er(TestKind::Lrt, Method::Au, &model, 1e-3, 1e-12).unwrap();
            assert_eq!(value, rate);
        }
    }
}

#[test]
fn power_errors_stay_in_their_row() {
    let o = raretest(&["power", "--m0", "100", "--m1", "100", "--emac", "0,10", "--odds-ratio", "2"]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert_eq!(rows[0][2], "ERR:input_domain");
    assert!(rows[1][2].parse::<f64>().is_ok());
}

#[test]
fn unbalanced_design_needs_larger_effect() {
    // Smallest odds ratio on a grid reaching 80% power at EMAC = 100.
    let threshold = |m0: &str, m1: &str| {
        let o = raretest(&[
            "power", "--m0", m0, "--m1", m1, "--emac", "100", "--odds-ratio", "1.5:30:0.5",
            "--kind", "lrt",
        ]);
        assert!(o.status.success());
        rows(&o)
            .iter()
            .find(|r| r[2].parse::<f64>().unwrap() >= 0.8)
            .map(|r| r[1].parse::<f64>().unwrap())
            .expect("some odds ratio reaches 80% power")
    };
    let balanced = threshold("10000", "10000");
    let unbalanced = threshold("19000", "1000");
    assert!(unbalanced > balanced, "{unbalanced} vs {balanced}");
}

#[test]
fn firth_au_requires_opt_in() {
    let args = ["test", "--m0", "30", "--m1", "30", "--r0", "1", "--r1", "4", "--kind", "firth", "--method", "au"];
    let o = raretest(&args);
    assert_eq!(o.status.code(), Some(1));
    let mut with_flag = args.to_vec();
    with_flag.push("--allow-slow");
    assert!(raretest(&with_flag).status.success());
}

#[test]
fn exit_codes() {
    assert_eq!(raretest(&["--help"]).status.code(), Some(0));
    assert_eq!(raretest(&["--version"]).status.code(), Some(0));
    assert_eq!(raretest(&["test", "--m0", "10"]).status.code(), Some(1));
    assert_eq!(raretest(&["t1er", "--m0", "10", "--m1", "10", "--emac", "5:1"]).status.code(), Some(1));
    assert_eq!(
        raretest(&["test", "--kind", "fisher", "--method", "au", "--m0", "5", "--m1", "5", "--r0", "0", "--r1", "5"])
            .status
            .code(),
        Some(1)
    );
    let bad = raretest(&["test", "--m0", "3", "--m1", "3", "--r0", "4", "--r1", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
    assert_eq!(raretest(&["batch", "--input", "/nonexistent/file.tsv"]).status.code(), Some(2));
    assert_eq!(raretest_stdin(&["batch", "--input", "-"], "id\tm0\n").status.code(), Some(2));
}

#[test]
fn batch_resource_limit_is_a_cell_not_an_abort() {
    // Six strata with wide supports exceed the joint cap.
    let mut input = String::from("variant_id\tm0\tm1\tr0\tr1\tstratum_id\n");
    for s in 0..6 {
        input.push_str(&format!("big\t500\t500\t20\t20\ts{s}\n"));
    }
    input.push_str("small\t500\t500\t3\t9\t\n");
    let o = raretest_stdin(
        &["batch", "--input", "-", "--no-qc", "--kind", "lrt", "--method", "perm"],
        &input,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&o);
    assert_eq!(rows[0], vec!["big", "ERR:resource_limit"]);
    assert!(rows[1][1].parse::<f64>().is_ok());
}

#[test]
fn batch_and_qq_pipeline() {
    let dir = std::env::temp_dir().join(format!("raretest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("variants.tsv");
    std::fs::write(
        &input,
        "# comment\nvariant_id\tm0\tm1\tr0\tr1\tcall_rate\n\
         a\t1000\t1000\t5\t10\t0.99\n\
         b\t1000\t1000\t2\t2\t0.99\n\
         c\t1000\t1000\t30\t10\t0.80\n\
         d\t1000\t1000\tx\t10\t0.99\n\
         e\t1000\t1000\t20\t25\t0.85\n",
    )
    .unwrap();
    let results = dir.join("results.tsv");
    let dropped = dir.join("dropped.tsv");
    let run = |threads: &str| {
        let o = raretest(&[
            "batch", "--input", input.to_str().unwrap(), "--output", results.to_str().unwrap(),
            "--dropped", dropped.to_str().unwrap(), "--threads", threads,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(&results).unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one, four);
    let text = String::from_utf8(one).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split('\t').collect();
    assert_eq!(
        header,
        ["variant_id", "lrt_standard", "lrt_perm", "lrt_au", "firth_standard", "firth_perm"]
    );
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(ids, ["a", "e"]);

    let reasons = std::fs::read_to_string(&dropped).unwrap();
    for code in ["mac_below_min", "call_rate_below_min", "malformed"] {
        assert!(reasons.contains(code), "{reasons}");
    }

    let o = raretest(&["qq", "--input", results.to_str().unwrap(), "--column", "lrt_perm"]);
    assert!(o.status.success());
    let qq = rows(&o);
    assert_eq!(qq.len(), 2);
    let expected: Vec<f64> = qq.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!((expected[0] - 3f64.log10()).abs() < 1e-12);
    assert!((expected[1] - 1.5f64.log10()).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_reports_both_cases() {
    let o = raretest(&["bench"]);
    assert!(o.status.success());
    let rows = rows(&o);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        let diff: f64 = r[6].parse().unwrap();
        assert!(diff <= 2e-12, "{r:?}");
    }
}
