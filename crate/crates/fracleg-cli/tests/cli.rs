use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracleg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracleg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Column `col` of every data row of a CSV text.
fn column(csv: &str, col: usize) -> Vec<String> {
    csv.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().to_string()).collect()
}

#[test]
fn expand_absx_gives_hand_values() {
    let o = fracleg(&["expand", "--model", "abs-x", "--degree", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,coefficient,provenance"));
    let c: Vec<f64> = column(&text, 1).iter().map(|v| v.parse().unwrap()).collect();
    let want = [0.5, 0.0, 0.625, 0.0, -0.1875];
    assert_eq!(c.len(), want.len());
    for (a, b) in c.iter().zip(want) {
        assert!((a - b).abs() < 1e-14, "{c:?}");
    }
}

#[test]
fn absx_bound_at_zero() {
    let o = fracleg(&["bounds", "--kind", "absx-zero", "--degree", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = column(&stdout(&o), 1)[0].parse().unwrap();
    assert!((v - 0.090946).abs() < 5e-7, "{v}");
    assert!((v - 2.0 / (7.0 * std::f64::consts::PI)).abs() < 1e-15);
}

#[test]
fn convergence_writes_the_two_norm_layout() {
    let o = fracleg(&["convergence", "--model", "abs-power", "--mu", "1.7", "--n", "8,16,32,64,128,256"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("N,linf,linf_order,wlinf,wlinf_order,mu"));
    assert_eq!(text.lines().count(), 7);
    let linf: f64 = column(&text, 1)[1].parse().unwrap();
    assert!((linf / 2.03e-3 - 1.0).abs() < 0.05, "{linf}");

    let o = fracleg(&["convergence", "--model", "endpoint-power", "--mu", "1.2", "--n", "8,16"]);
    assert_eq!(stdout(&o).lines().next(), Some("N,linf,linf_order,l2,l2_order,mu"));
}

#[test]
fn directory_output_uses_table_names() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let runs: [&[&str]; 3] = [
        &["convergence", "--model", "abs-power", "--mu", "1.7,2.6", "--n", "8,16,32"],
        &["decay", "--model", "endpoint-power", "--modulator", "sin", "--mu", "0.1,1.2,2.6", "--n", "8,16,32"],
        &["convergence", "--model", "endpoint-power", "--mu", "0.1,1.2", "--n", "8,16,32"],
    ];
    for args in runs {
        let mut a = args.to_vec();
        a.extend(["--out", d]);
        let o = fracleg(&a);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let t2 = fs::read_to_string(dir.path().join("table2.csv")).unwrap();
    assert!(t2.starts_with("n,coeff_abs,order,mu\n"));
    assert_eq!(t2.lines().count(), 1 + 9);
    assert!(dir.path().join("table1.csv").exists());
    assert!(dir.path().join("table3.csv").exists());
}

#[test]
fn json_carries_meta_block() {
    let o = fracleg(&[
        "--format",
        "json",
        "bounds",
        "--kind",
        "l2-interior",
        "--model",
        "abs-power",
        "--mu",
        "1.7",
        "--n",
        "8,16",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["command"], "bounds");
    assert!(v["meta"]["tolerances"]["parseval_tail_fraction"].is_number());
    assert_eq!(v["meta"]["library_version"], env!("CARGO_PKG_VERSION"));
    assert!(v["data"]["values"]["16"].as_f64().unwrap() < v["data"]["values"]["8"].as_f64().unwrap());
}

fn read_dir_sorted(p: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(p)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = ["convergence", "--model", "endpoint-power", "--mu", "0.1,1.2", "--n", "8,16,32,64,128,256"];
    let a = fracleg(&args);
    let b = fracleg(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let (x, y) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&x, &y] {
        let o = fracleg(&["figures", "--n", "4,8,16", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (fx, fy) = (read_dir_sorted(x.path()), read_dir_sorted(y.path()));
    let names: Vec<&str> = fx.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        ["fig1_n100.csv", "fig2_bounds.csv", "fig2_profile_N16.csv", "fig2_profile_N4.csv", "fig2_profile_N8.csv"]
    );
    assert_eq!(fx, fy);
    assert!(String::from_utf8_lossy(&fx[0].1).starts_with("x,Pn,weighted\n"));
    assert!(String::from_utf8_lossy(&fx[3].1).starts_with("x,error\n"));
}

#[test]
fn tightness_into_directory_writes_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracleg(&["tightness", "--n", "8,16", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("tightness.csv")).unwrap();
    assert!(summary.starts_with("N,error_at_0,bound_at_0,error_at_pm1,bound_at_pm1,argmax_location\n"));
    assert!(dir.path().join("fig2_profile_N8.csv").exists());
    assert!(dir.path().join("fig2_profile_N16.csv").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: [(&[&str], &str); 6] = [
        (&["expand", "--degree", "3"], "--model"),
        (&["expand", "--model", "abs-power", "--mu", "-0.5", "--degree", "3"], "mu > 0"),
        (&["bounds", "--kind", "linf-interior", "--model", "abs-power", "--mu", "0.3", "--degree", "8"], "mu > 1/2"),
        (&["convergence", "--model", "abs-power", "--mu", "1.7", "--n", "8,12"], "doubling"),
        (&["tightness", "--n", "2,4"], "N > 2"),
        (&["frobnicate"], "unrecognized subcommand"),
    ];
    for (args, needle) in cases {
        let o = fracleg(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_documents_flags_and_exits_zero() {
    let o = fracleg(&["convergence", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let h = stdout(&o);
    for flag in ["--model", "--mu", "--theta", "--modulator", "--n", "--norms", "--out", "--format"] {
        assert!(h.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn verify_exit_code_follows_the_report() {
    let o = fracleg(&["verify", "--check", "kershaw_envelope", "--check", "absx_pointwise"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("2 passed, 0 failed\n"));

    let o = fracleg(&["verify"]);
    let text = stdout(&o);
    let failed = text.lines().filter(|l| l.starts_with("FAIL ")).count();
    let passed = text.lines().filter(|l| l.starts_with("PASS ")).count();
    assert!(text.ends_with(&format!("{passed} passed, {failed} failed\n")));
    assert_eq!(o.status.code(), Some(if failed == 0 { 0 } else { 3 }));
}
