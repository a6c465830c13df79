use std::path::PathBuf;
use std::process::{Command, Output};

fn nric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nric")).args(args).output().expect("binary runs")
}

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_value(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .skip_while(|l| l.trim() != "[summary]")
        .find(|l| l.starts_with(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in summary"));
    line.split('=').nth(1).unwrap().parse().unwrap()
}

#[test]
fn design_is_byte_identical_across_runs() {
    let a = nric(&["design", &spec("symmetric.toml")]);
    let b = nric(&["design", &spec("symmetric.toml")]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn symmetric_design_lands_on_the_reference_inductance() {
    let o = nric(&["design", &spec("symmetric.toml")]);
    let text = stdout(&o);
    let l = summary_value(&text, "l_opt_h");
    assert!((l - 400.4e-9).abs() / 400.4e-9 < 0.02, "{l}");
    let pte = summary_value(&text, "pte");
    let pm = summary_value(&text, "pte_max");
    assert!((pte - pm).abs() < 1e-3 * pm);
}

#[test]
fn asymmetric_design_runs_the_whole_chain() {
    let o = nric(&["design", &spec("asymmetric.toml")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(summary_value(&text, "harvester_stages") >= 1.0);
}

#[test]
fn sweep_writes_csv_rows() {
    let o = nric(&["sweep", "--l1", "400e-9", "--l2", "400e-9", "--k", "0.1", "--f-start", "1e6", "--f-stop", "1e8", "--points", "11"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("f_hz,s11_db,s21_db,s22_db,pte_pct,pte_max_pct\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn match_then_s2p_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = nric(&["match", "--l1", "400e-9", "--l2", "400e-9", "--k", "0.1", "--f0", "20e6"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("pF"));

    let src = dir.path().join("a.s2p");
    std::fs::write(&src, "# MHZ S MA R 50\n10 0.5 0 0.5 90 0.5 90 0.5 0\n20 0.4 0 0.6 90 0.6 90 0.4 0\n").unwrap();
    let dst = dir.path().join("b.s2p");
    let o = nric(&["s2p", "convert", src.to_str().unwrap(), dst.to_str().unwrap()]);
    assert!(o.status.success());
    let back = nric(&["sweep", "--s2p", dst.to_str().unwrap(), "--f-start", "1e7", "--f-stop", "2e7", "--points", "3"]);
    assert!(back.status.success(), "{}", String::from_utf8_lossy(&back.stderr));
}

#[test]
fn other_subcommands_succeed() {
    for args in [
        vec!["coil", "synth", "--target", "80e-9", "--max-area", "2.5e-5"],
        vec!["tissue", "table", "--points", "5"],
        vec!["--format", "csv", "coil", "synth", "--target", "400e-9", "--max-area", "3.24e-4"],
    ] {
        let o = nric(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
    let h = nric(&["harvester", "explore", &spec("harvester.toml")]);
    assert!(h.status.code() == Some(0) || h.status.code() == Some(3));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let o = nric(&["--out", path.to_str().unwrap(), "design", &spec("symmetric.toml")]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), nric(&["design", &spec("symmetric.toml")]).stdout);
}

#[test]
fn exit_codes_classify_failures() {
    // usage error
    assert_eq!(nric(&["sweep", "--bogus"]).status.code(), Some(2));
    // invalid input
    assert_eq!(nric(&["sweep", "--l1", "-1", "--l2", "1e-6", "--k", "0.1"]).status.code(), Some(2));
    // unreachable geometry
    assert_eq!(nric(&["coil", "synth", "--target", "1e-3", "--max-area", "1e-6"]).status.code(), Some(3));
    // missing file
    assert_eq!(nric(&["design", "/nonexistent/spec.toml"]).status.code(), Some(4));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "f0 = \"fast\"\n").unwrap();
    let o = nric(&["design", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}
