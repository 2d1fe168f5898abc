use std::process::Command;

fn ubeas() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ubeas"))
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ubeas()
        .args(["run", "--stages", "15", "--reps", "2", "--seed", "3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ubeas::output::FILES {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "# z must be positive\nz = 0\n").unwrap();
    let out = ubeas().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = ubeas().args(["run", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn verification_passes_and_fails_with_the_right_codes() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["run", "--reps", "2", "--freeze-fading", "--grid", "500"];
    let ok = ubeas().args(base).args(["--verify", "nash", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let pareto = ubeas().args(base).args(["--verify", "pareto", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(pareto.status.code(), Some(0), "{}", String::from_utf8_lossy(&pareto.stderr));

    // A negative slack cannot be met, so the certificate must fail.
    let bad = ubeas()
        .args(base)
        .args(["--verify", "nash", "--epsilon=-1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("verification failed"));
}

#[test]
fn priority_flag_changes_targets() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, p) in [(&a, "off"), (&b, "on")] {
        let out = ubeas()
            .args(["run", "--stages", "10", "--reps", "1", "--priority", p, "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("trajectory.csv")).unwrap();
    assert_ne!(read(&a), read(&b));
}

#[test]
fn fit_recovers_parameters_from_a_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let (a_c, b_c) = (1.383, 6.565);
    let mut text = String::from("sinr,pdr\n");
    for k in 0..60 {
        let g = 0.3 + 0.02 * k as f64;
        text.push_str(&format!("{g},{}\n", (-(1.0 / (g * a_c)).powf(b_c)).exp()));
    }
    std::fs::write(&path, text).unwrap();
    let out = ubeas().args(["fit", "--samples"]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = stdout.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[0] - a_c).abs() < 1e-6 && (row[1] - b_c).abs() < 1e-6, "{stdout}");
}

#[test]
fn topology_dump_lists_every_entity() {
    let out = ubeas().args(["topology", "--seed", "7"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("entity,x_m,y_m,class"));
    assert_eq!(lines.count(), 2 + 2 * 24);
}
