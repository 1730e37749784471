use std::process::Command;
use thinlayer_cli::{run_oracle, run_residual, StudyConfig};

fn thinlayer(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_thinlayer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(pairs: &[(&str, &str)]) -> StudyConfig {
    let mut cfg = StudyConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg
}

fn oracle_csv(pairs: &[(&str, &str)]) -> String {
    let mut out = Vec::new();
    run_oracle(&config(pairs)).unwrap().write_csv(&mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn converge_reruns_are_byte_identical() {
    let args = [
        "converge",
        "--problem",
        "thm2",
        "--q",
        "1",
        "--orders",
        "-1,0,1",
        "--data",
        "1:1,3:0.3",
    ];
    let a = thinlayer(&args);
    let b = thinlayer(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("problem,q,alpha_re,alpha_im,N,h,err_inner_h1,err_membrane_h1g,tail_energy")
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("thm2,1,")).count(), 21);
    assert_eq!(text.lines().filter(|l| l.starts_with("# slope N=")).count(), 3);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["converge", "--orders", "0,1", "--points", "4"];
    let one = Command::new(env!("CARGO_BIN_EXE_thinlayer"))
        .args(args)
        .env("THINLAYER_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_thinlayer"))
        .args(args)
        .env("THINLAYER_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn oracle_with_unit_contrast_has_no_reflected_part() {
    let text = oracle_csv(&[("alpha", "1"), ("data", "1:1,2:-0.5,5:0.25i")]);
    let rows: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[6].parse::<f64>().unwrap(), 0.0, "{row}");
        assert_eq!(cols[7].parse::<f64>().unwrap(), 0.0, "{row}");
    }
}

#[test]
fn both_transmission_problems_agree_at_unit_contrast() {
    let p1 = oracle_csv(&[("alpha", "1"), ("oracle", "p1"), ("data", "1:1,3:0.3")]);
    let p2 = oracle_csv(&[("alpha", "1"), ("oracle", "p2"), ("data", "1:1,3:0.3")]);
    assert_eq!(p1, p2);
}

#[test]
fn zero_data_gives_zero_residuals() {
    for problem in ["thm1", "thm2", "beta0"] {
        let report = run_residual(&config(&[("problem", problem), ("data", "zero"), ("orders", "2")])).unwrap();
        assert!(!report.orders.is_empty());
        assert_eq!(report.max(), 0.0, "{problem}");
    }
}

#[test]
fn wrong_weight_fails_the_residual_check() {
    let ok = thinlayer(&["residual", "--problem", "thm2", "--q", "2", "--orders", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = thinlayer(&[
        "residual",
        "--problem",
        "thm2",
        "--q",
        "2",
        "--orders",
        "2",
        "--weight-variant",
        "eta-1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("thinlayer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ini = dir.join("study.ini");
    let csv = dir.join("out.csv");
    std::fs::write(&ini, "problem = thm1\norders = 0, 1\npoints = 3\nalpha = 0.5i\n").unwrap();
    let out = thinlayer(&[
        "converge",
        "--config",
        ini.to_str().unwrap(),
        "--orders",
        "0",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("thm1,")).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.starts_with("thm1,0,0.0,0.5,0,")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_input_exits_with_status_two() {
    let out = thinlayer(&["converge", "--alpha", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("α"));
    let out = thinlayer(&["converge", "--h-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = thinlayer(&["oracle", "--curve", "ellipse:1.5:1"]);
    assert_eq!(out.status.code(), Some(2));
}
