use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn row(line: &str) -> Vec<f64> {
    line.split(',').map(|x| x.parse().unwrap()).collect()
}

#[test]
fn fig_classical_layout() {
    let out = run(&["fig-classical"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("# twostate: "));
    assert!(text.contains("# seed: 42\n"));
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "theta,f_min_error,f_unambiguous,f_optimized,f_fuchs_peres"
    );
    assert_eq!(lines.len(), 182);
    assert_eq!(lines[1], "0,1,1,1,1");
    let mid = row(lines[91]);
    assert!((mid[1] - 0.92678).abs() < 5e-6);
    assert!((mid[3] - 0.93301).abs() < 5e-6);
}

#[test]
fn fig_channel_rows() {
    let out = run(&[
        "fig-channel",
        "--theta",
        "0.785398163397448",
        "--alpha-steps",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "alpha_sq,f_direct,f_purification,f_combined,alpha_prime_opt"
    );
    assert_eq!(lines.len(), 7);
    let r = row(lines[4]);
    assert!((r[0] - 0.3).abs() < 1e-12);
    assert!((r[1] - 0.97913).abs() < 5e-6);
    assert!((r[2] - 0.973205).abs() < 1e-6);
    assert!(r[3] >= r[1]);
    let last = row(lines[6]);
    assert_eq!(&last[..4], &[0.5, 1.0, 1.0, 1.0]);
}

#[test]
fn fig_channel_unknown() {
    let out = run(&["fig-channel", "--unknown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "alpha_sq,f_direct_avg,f_purif_unknown");
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[1], "0,0.666666666667,0.666666666667");
}

#[test]
fn fig_telecloning_rows() {
    let out = run(&["fig-telecloning", "--theta-steps", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "theta,a,b,c,f_global_teleclone,f_global_optimal,entanglement_alice_receivers"
    );
    let first = row(lines[1]);
    assert!((first[1] - 1.0).abs() < 1e-6 && (first[6] - 1.0).abs() < 1e-9);
    for line in &lines[1..] {
        let r = row(line);
        assert!(r[6] < 3f64.log2());
        assert!(r[4] <= r[5] + 1e-9);
    }
}

#[test]
fn output_is_deterministic_and_file_backed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("classical.csv");
    let out = run(&[
        "fig-classical",
        "--theta-steps",
        "19",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let from_file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        from_file,
        stdout(&run(&["fig-classical", "--theta-steps", "19"]))
    );
    assert!(!from_file.contains('\r'));
}

#[test]
fn verify_passes_and_tamper_fails() {
    let ok = run(&["verify", "--samples", "20000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).lines().all(|l| !l.starts_with("FAIL")));
    let tampered = run(&["verify", "--samples", "20000", "--tamper"]);
    assert_eq!(tampered.status.code(), Some(1));
    assert!(stdout(&tampered).contains("FAIL protocol.enumeration_matches_direct_formula"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["fig-classical", "--theta-steps", "1"][..],
        &["fig-channel"],
        &["fig-channel", "--theta", "2.0"],
        &["verify", "--samples", "10"],
        &["no-such-command"],
        &["fig-classical", "--out", "/nonexistent-dir/x.csv"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
