use std::path::Path;
use std::process::{Command, Output};

const EXE: &str = env!("CARGO_BIN_EXE_piezo-blowup");

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(EXE).args(args).current_dir(dir).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const BLOWUP: &str = r#"
[domain]
N = 64

[physics]
lambda1 = 0.1
lambda2 = 0.1

[source]
kind = "power_difference"
a = 1.0
eta = 8.0

[initial]
v0 = { kind = "sine", amplitude = 2.0 }

[time]
t_end = 10.0
"#;

#[test]
fn simulate_zero_data_writes_zero_columns() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "zero.toml", "[domain]\nN = 16\n[time]\nt_end = 0.1\n");
    let out = run(&["simulate", "--config", "zero.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,E,diss_residual,linf_v,linf_p,l2_v,l2_p,F,Fprime,G,psi");
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 11);
        for i in [1, 3, 4, 5, 6, 10] {
            assert_eq!(cols[i].parse::<f64>().unwrap(), 0.0, "{line}");
        }
        // no negative energy, so no certificate columns
        assert_eq!(cols[7], "nan");
        rows += 1;
    }
    assert!(rows > 3);
    assert!(!csv.contains('\r'));
    let report = std::fs::read_to_string(dir.path().join("out/report.toml")).unwrap();
    assert!(report.contains("[invariant_flags]"));
    assert!(report.contains("dt0 = "));
}

#[test]
fn certify_blowup_is_feasible_with_all_flags() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "b.toml", BLOWUP);
    let out = run(&["certify", "--config", "b.toml", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("res/report.toml")).unwrap().parse().unwrap();
    let flags = report["invariant_flags"].as_table().unwrap();
    for name in ["certificate_feasible", "horizon_consistent", "lemma31_ok", "lemma32_ok", "Q_nonneg_ok", "G_concave_ok"] {
        assert_eq!(flags[name].as_bool(), Some(true), "{name}");
    }
    let t_m = report["certificate"]["report"]["t_m"].as_float().unwrap();
    let t_blow = report["blowup"]["t_blow"].as_float().unwrap();
    assert!(t_m.is_finite() && t_blow <= t_m);
    let csv = std::fs::read_to_string(dir.path().join("res/series.csv")).unwrap();
    let first = csv.lines().nth(1).unwrap();
    assert!(!first.split(',').nth(7).unwrap().contains("nan"));
}

#[test]
fn certify_positive_energy_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p.toml", "[domain]\nN = 32\n[initial]\nv0 = { kind = \"sine\", amplitude = 1.0 }\n[time]\nt_end = 0.2\n");
    let out = run(&["certify", "--config", "p.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let report = std::fs::read_to_string(dir.path().join("out/report.toml")).unwrap();
    assert!(report.contains("status = \"infeasible\""), "{report}");
}

#[test]
fn certify_small_eta_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = BLOWUP.replace("eta = 8.0", "eta = 4.0").replace("amplitude = 2.0", "amplitude = 4.0");
    write(dir.path(), "e.toml", &text);
    let out = run(&["certify", "--config", "e.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k = eta"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "typo.toml", "[physics]\nlamda1 = 0.1\n");
    let out = run(&["simulate", "--config", "typo.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lamda1") && err.contains("line 2"), "{err}");

    write(dir.path(), "a1.toml", "[physics]\ngamma = 1.1\n");
    let out = run(&["simulate", "--config", "a1.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha1"));

    let out = run(&["simulate", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["simulate"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lowerbound_linear_growth_is_infinite() {
    let dir = tempfile::tempdir().unwrap();
    let text = BLOWUP.replace("eta = 8.0", "eta = 8.0\nd = 1.0\nexponents = [1.0, 1.0, 1.0, 1.0]");
    write(dir.path(), "l.toml", &text);
    let out = run(&["lowerbound", "--config", "l.toml", "--simulate"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("out/report.toml")).unwrap().parse().unwrap();
    let lb = &report["lower_bound"]["report"];
    assert_eq!(lb["infinite"].as_bool(), Some(true));
    assert!(lb["T_star"].as_float().unwrap().is_infinite());
    assert!(report["invariant_flags"].get("t_blow_ge_T_star").is_none());
}

#[test]
fn lowerbound_blowup_respects_bound() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "b.toml", BLOWUP);
    let out = run(&["lowerbound", "--config", "b.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("out/report.toml")).unwrap().parse().unwrap();
    let t_star = report["lower_bound"]["report"]["T_star"].as_float().unwrap();
    assert!(t_star > 0.0 && t_star < 1e-6);
    let out = run(&["lowerbound", "--config", "b.toml", "--simulate"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("out/report.toml")).unwrap().parse().unwrap();
    let flags = report["invariant_flags"].as_table().unwrap();
    for name in ["t_blow_ge_T_star", "coercivity_ok", "psi_ode_ok"] {
        assert_eq!(flags[name].as_bool(), Some(true), "{name}");
    }
}

#[test]
fn convergence_linear_and_nonlinear() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lin.toml", "[domain]\nN = 32\n[initial]\nv0 = { kind = \"sine\", amplitude = 1.0 }\n");
    let out = run(&["convergence", "--config", "lin.toml", "--levels", "3", "--out", "lin"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("lin/report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["invariant_flags"]["spatial_order_2"].as_bool(), Some(true));
    assert_eq!(report["invariant_flags"]["temporal_order_4"].as_bool(), Some(true));
    let csv = std::fs::read_to_string(dir.path().join("lin/convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);

    write(dir.path(), "b.toml", BLOWUP);
    let out = run(&["convergence", "--config", "b.toml", "--levels", "2", "--out", "nl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("nl/report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["invariant_flags"]["t_blow_gap_below_5pct"].as_bool(), Some(true));

    let out = run(&["convergence", "--config", "lin.toml", "--levels", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_writes_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "b.toml", BLOWUP);
    write(dir.path(), "grid.toml", "eta = [6.0, 8.0]\nlambda1 = [0.05, 0.1]\n");
    let out = run(&["sweep", "--config", "b.toml", "--grid", "grid.toml", "--out", "sw"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("sw/summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "point,a,eta,lambda1,lambda2,t_blow,t_m,T_star");
    assert_eq!(lines.len(), 5);
    for i in 0..4 {
        let p = dir.path().join(format!("sw/point_{i:04}"));
        assert!(p.join("series.csv").exists() && p.join("report.toml").exists());
        assert!(lines[i + 1].starts_with(&format!("{i},")));
    }
    // eta changes the derived growth data of each point
    let r0 = std::fs::read_to_string(dir.path().join("sw/point_0000/report.toml")).unwrap();
    assert!(r0.contains("exponents = [5.0, 5.0, 5.0, 5.0]"), "{r0}");

    write(dir.path(), "bad.toml", "eta = [1.5]\n");
    let out = run(&["sweep", "--config", "b.toml", "--grid", "bad.toml", "--out", "sw2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    write(dir.path(), "typo.toml", "etaa = [6.0]\n");
    let out = run(&["sweep", "--config", "b.toml", "--grid", "typo.toml", "--out", "sw3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
