//! End-to-end checks of the command-line surface: exit codes, config
//! handling, flag overrides and byte-level output determinism.

use std::process::{Command, Output};

fn qotto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qotto"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sweep_n_csv_shape_and_values() {
    let out = qotto(&["--n-max", "2", "--tol", "1e-10", "sweep-n"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("header row");
    assert_eq!(
        header,
        "n,mu,tau_expansion,delta_p_exact,delta_p_magnus1,delta_p_magnus2,\
         delta_a_exact,delta_a_magnus1,delta_pa,error"
    );
    let first: Vec<&str> = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .nth(1)
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(first[0], "1");
    let dp1: f64 = first[4].parse().unwrap();
    assert!((dp1 - 0.17694).abs() < 1e-4);
    let da1: f64 = first[7].parse().unwrap();
    assert!((da1 - 9.80e-4).abs() < 1e-6);
    // Metadata block names the tool and echoes the config.
    assert!(text.lines().any(|l| l.starts_with("# tool: qotto")));
    assert!(text.lines().any(|l| l.starts_with("# omega_c_rad_s:")));
}

#[test]
fn config_file_plus_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "n_max = 5\nratio = 4\ngamma_a_s = 1e-9\n").unwrap();
    let out = qotto(&[
        "--config",
        path.to_str().unwrap(),
        "--n-max",
        "3",
        "sweep-n",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count();
    // Header plus three rows: the flag beats the file.
    assert_eq!(rows, 4);
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "not_a_key = 1\n").unwrap();
    let out = qotto(&["--config", path.to_str().unwrap(), "sweep-n"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn out_of_range_tolerance_exits_one() {
    let out = qotto(&["--tol", "1e-3", "sweep-n"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_file_exits_one() {
    let out = qotto(&["--config", "/nonexistent/qotto.conf", "sweep-n"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_usage_exits_one() {
    let out = qotto(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn non_contractive_cycle_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.conf");
    std::fs::write(
        &path,
        "isochore_duration_hot_s = 0\nisochore_duration_cold_s = 0\n",
    )
    .unwrap();
    let out = qotto(&["--config", path.to_str().unwrap(), "run-cycle"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(text.contains("converged,false"));
    assert!(text.contains("spectral_radius"));
}

#[test]
fn run_cycle_reports_energetics() {
    let out = qotto(&["--tol", "1e-10", "run-cycle"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("converged,true"));
    assert!(text.contains("refrigerating,true"));
    assert!(text.contains("q_cold_J,"));
}

#[test]
fn output_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json", "table"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for path in [&a, &b] {
            let out = qotto(&[
                "--n-max",
                "4",
                "--format",
                format,
                "--out",
                path.to_str().unwrap(),
                "sweep-n",
            ]);
            assert_eq!(out.status.code(), Some(0));
        }
        let bytes_a = std::fs::read(&a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{format} output not deterministic");
        assert!(!bytes_a.is_empty());
    }
}

#[test]
fn json_output_parses_and_carries_rows() {
    let out = qotto(&["--n-max", "2", "--format", "json", "sweep-n"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["metadata"]["command"], "sweep-n");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["rows"][0]["n"], 1);
    assert!(doc["rows"][0]["delta_pa"].is_number());
}

#[test]
fn adiabat_trace_has_monotone_theta() {
    let out = qotto(&["--tol", "1e-10", "adiabat-trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut prev = f64::NEG_INFINITY;
    let mut rows = 0;
    for line in text.lines().skip_while(|l| l.starts_with('#')).skip(1) {
        let theta: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(theta > prev);
        prev = theta;
        rows += 1;
    }
    assert_eq!(rows, 50);
}

#[test]
fn tmin_rows_well_ordered() {
    let out = qotto(&["--format", "csv", "tmin"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let data: Vec<Vec<f64>> = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| {
            l.split(',')
                .take(4)
                .map(|v| v.parse().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(data.len(), 50);
    for row in &data {
        assert!(row[1] <= row[2], "carnot above noisy-single");
        assert!(row[2] <= row[3], "single above additive");
    }
}
