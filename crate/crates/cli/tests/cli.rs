mod common;

use common::{cdising, run_csv, Csv};

#[test]
fn coeffs_examples() {
    let (csv, code) = run_csv(&["coeffs", "--n", "4", "--g", "1"]);
    assert_eq!(code, 0);
    assert_eq!(csv.header, ["m", "h_m"]);
    assert_eq!(csv.floats("h_m"), [0.125, 0.125]);
    let (csv, _) = run_csv(&["coeffs", "--n", "2", "--g", "2"]);
    assert_eq!(csv.rows, [["1", "5.00000000000000e-2"]]);
    let (csv, _) = run_csv(&["coeffs", "--coupling", "thermo"]);
    assert_eq!(csv.rows.len(), 100);
    assert!((csv.floats("h_m")[1] - 0.95f64.powi(1) / 8.0).abs() < 1e-15);
}

#[test]
fn manifest_layout_and_precision() {
    let out = cdising(&["coeffs", "--n", "8", "--g", "0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("# command: coeffs\n# version: cdising "));
    assert!(text.contains("\n# timestamp: "));
    assert!(text.contains("\n# n = 8\n# g = 0.3\n# coupling = exact\n"));
    let csv = Csv::parse(&text);
    for row in &csv.rows {
        let mantissa = row[1].split('e').next().unwrap().replace(['.', '-'], "");
        assert!(mantissa.len() >= 12, "{}", row[1]);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("run{i}.csv")))
        .collect();
    for (threads, path) in ["1", "3"].iter().zip(&paths) {
        let out = cdising(&[
            "sweep-truncation",
            "--n",
            "10,6",
            "--t-final",
            "2",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let texts: Vec<String> = paths
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap())
        .collect();
    assert_eq!(Csv::body(&texts[0]), Csv::body(&texts[1]));
    let csv = Csv::parse(&texts[0]);
    let keys: Vec<(String, String)> = csv
        .rows
        .iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    assert_eq!(keys.first().unwrap(), &("10".to_string(), "0".to_string()));
    assert_eq!(keys.last().unwrap(), &("6".to_string(), "3".to_string()));
    assert_eq!(keys.len(), 6 + 4);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nn = 6\nt_final = 3\ncoupling = truncated\nm-max = 1\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let (from_file, code) = run_csv(&["evolve", "--config", cfg]);
    assert_eq!(code, 0);
    assert_eq!(from_file.rows[0][0], "6");
    assert_eq!(from_file.rows[0][1], "truncated");
    assert_eq!(from_file.rows[0][2], "1");
    let (overridden, _) = run_csv(&["evolve", "--config", cfg, "--n", "8", "--coupling", "exact"]);
    assert_eq!(overridden.rows[0][0], "8");
    assert_eq!(overridden.rows[0][1], "exact");
    assert_eq!(overridden.floats("T")[0], 3.0);
    assert!(overridden.manifest.iter().any(|l| l == "# n = 8"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| cdising(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["coeffs", "--n", "5"]), 2);
    assert_eq!(code(&["coeffs", "--n", "4,6"]), 2);
    assert_eq!(code(&["coeffs", "--coupling", "sideways"]), 2);
    assert_eq!(
        code(&[
            "evolve",
            "--n",
            "4",
            "--coupling",
            "truncated",
            "--m-max",
            "3"
        ]),
        2
    );
    assert_eq!(code(&["oracle", "--n", "12"]), 2);
    assert_eq!(code(&["evolve", "--rel-tol", "-1"]), 2);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(code(&["coeffs", "--config", bad.to_str().unwrap()]), 2);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(code(&["coeffs", "--config", missing.to_str().unwrap()]), 3);
    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert_eq!(code(&["coeffs", "--out", unwritable.to_str().unwrap()]), 3);
}

#[test]
fn verify_passes_and_fault_injection_fails() {
    let out = cdising(&["verify", "--n", "2,4,8", "--g-grid", "0,0.5,1,2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = Csv::parse(&String::from_utf8(out.stdout).unwrap());
    let status = csv.column("status");
    assert!(csv.rows.iter().all(|r| r[status] == "pass"));

    let out = cdising(&[
        "verify",
        "--n",
        "2,4,8",
        "--g-grid",
        "0,0.5,1,2",
        "--inject-fault",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("h-closed-vs-sum, m = 1, g = 0, N = 2"),
        "{stderr}"
    );
    let csv = Csv::parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(csv.rows.iter().filter(|r| r[status] == "FAIL").count(), 1);
}

#[test]
fn oracle_examples() {
    for (args, tol) in [
        (
            vec![
                "oracle",
                "--n",
                "4",
                "--coupling",
                "exact",
                "--t-final",
                "10",
            ],
            1e-6,
        ),
        (
            vec![
                "oracle",
                "--n",
                "2",
                "--coupling",
                "truncated",
                "--m-max",
                "0",
                "--t-final",
                "10",
            ],
            1e-8,
        ),
        (
            vec![
                "oracle",
                "--n",
                "8",
                "--coupling",
                "thermo",
                "--t-final",
                "1",
            ],
            1e-6,
        ),
    ] {
        let (csv, code) = run_csv(&args);
        assert_eq!(code, 0);
        assert_eq!(csv.rows.len(), 1);
        assert!(csv.floats("abs_diff")[0] <= tol);
    }
}

#[test]
fn trace_starts_in_ground_state() {
    let (csv, code) = run_csv(&["trace", "--n", "20", "--samples", "11"]);
    assert_eq!(code, 0);
    assert_eq!(csv.header, ["t", "g", "p_instant"]);
    assert_eq!(csv.rows.len(), 11);
    let p = csv.floats("p_instant");
    assert!((p[0] - 1.0).abs() < 1e-12);
    assert_eq!(csv.floats("t")[10], 10.0);
    assert_eq!(csv.floats("g")[10], 0.0);
}

#[test]
fn size_sweep_small_chain_is_limited_by_thermo_error() {
    let (csv, code) = run_csv(&["sweep-size", "--n", "10", "--t-final", "100"]);
    assert_eq!(code, 0);
    let p = csv.floats("p_GS")[0];
    assert!(p < 1.0 - 1e-5 && p > 0.99, "{p}");
}
