use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rtngeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtngeo")).args(args).output().expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let lines = data_lines(text);
    let idx = lines[0].split(',').position(|c| c == name).expect("column present");
    lines[1..].iter().map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn run_writes_full_precision_csv() {
    let out = rtngeo(&["run", "--set", "grid.n=101", "--set", "noise.nu=2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# noise.nu = 2.0"));
    assert!(text.contains("# system.theta = 1.5707963267948966"));
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "t,re_F,im_F,abs_F,phi,s,gamma,r_x,r_y,r_z,eps_plus,Phi_P,Phi_e,Phi_g,delta_Phi_e,N,L,near_zero_flag"
    );
    assert_eq!(lines.len(), 102);
    let second = lines[2].split(',').nth(1).unwrap();
    assert_eq!(second.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let out = rtngeo(&["run", "--set", "noise.a=0.5", "--out", d.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(a.join("run.csv")).unwrap(), fs::read(b.join("run.csv")).unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "[noise]\nnu = 2\na = 0.5\n[grid]\nt_max = 5\nn = 51\n[output]\ncolumns = t,abs_F\n").unwrap();
    let out = rtngeo(&["run", "--config", path.to_str().unwrap(), "--set", "noise.a=-0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# noise.a = -0.5"));
    assert_eq!(data_lines(&text)[0], "t,abs_F");
    assert_eq!(column(&text, "t").last().copied(), Some(5.0));
}

#[test]
fn mixed_runs_leave_pure_phases_blank() {
    let out = rtngeo(&["run", "--set", "system.bloch0=0.5,0,0.5", "--set", "grid.n=51"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(column(&text, "Phi_P").iter().all(|v| v.is_nan()));
    assert!(column(&text, "Phi_g").iter().all(|v| v.is_finite()));
}

#[test]
fn exit_codes() {
    assert_eq!(rtngeo(&["run", "--set", "noise.a=3"]).status.code(), Some(1));
    assert_eq!(rtngeo(&["run", "--set", "noise.bogus=1"]).status.code(), Some(1));
    assert_eq!(rtngeo(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rtngeo(&["run", "--config", "/nonexistent/file.cfg"]).status.code(), Some(1));
    assert_eq!(rtngeo(&["run", "--set", "noise.kappa=inf"]).status.code(), Some(1));
    assert_eq!(rtngeo(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let out = rtngeo(&["run", "--set", "grid.n=11", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_writes_files_and_sorted_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rtngeo(&[
        "sweep", "--axis", "a", "--values", "1,-1,0.5,0,-0.5", "--set", "noise.nu=2", "--out", d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for v in ["-1", "-0.5", "0", "0.5", "1"] {
        assert!(d.join(format!("a={v}.csv")).exists(), "a={v}");
    }
    let summary = fs::read_to_string(d.join("summary.csv")).unwrap();
    let a = column(&summary, "a");
    assert_eq!(a, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    let l = column(&summary, "L");
    assert!(l[4] > l[3] && l[3] > l[2]);

    let empty = rtngeo(&["sweep", "--axis", "a", "--values", "", "--out", d.to_str().unwrap()]);
    assert_eq!(empty.status.code(), Some(1));
    let bad_axis = rtngeo(&["sweep", "--axis", "zeta", "--values", "1", "--out", d.to_str().unwrap()]);
    assert_eq!(bad_axis.status.code(), Some(1));
}

#[test]
fn theta_sweep_without_noise_tracks_unitary_phase() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rtngeo(&[
        "sweep", "--axis", "theta", "--values", "0,pi/4,pi/2,pi",
        "--set", "noise.nu=0", "--set", "system.omega0=1", "--set", "grid.n=201", "--set", "grid.t_max=2pi",
        "--set", "output.columns=t,Phi_e,Phi_e_U,delta_Phi_e", "--out", d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect();
    assert_eq!(files.len(), 5);
    for f in files.iter().filter(|p| !p.ends_with("summary.csv")) {
        let text = fs::read_to_string(f).unwrap();
        let theta: f64 = f.file_stem().unwrap().to_str().unwrap().trim_start_matches("theta=").parse().unwrap();
        for ((t, e), u) in column(&text, "t").iter().zip(column(&text, "Phi_e")).zip(column(&text, "Phi_e_U")) {
            assert!((u - t * (theta / 2.0).cos().powi(2)).abs() < 1e-12);
            assert!((e - u).abs() < 1e-10);
        }
    }
}

#[test]
fn compare_oracles_passes_and_names_faults() {
    let ok = rtngeo(&["compare-oracles", "--set", "noise.nu=2", "--set", "noise.a=0.5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let report = String::from_utf8(ok.stdout).unwrap();
    assert!(report.contains("F analytic-vs-ode") && report.contains("PASS"));

    let memoryless = rtngeo(&["compare-oracles", "--set", "noise.kappa=1e6", "--set", "grid.t_max=10"]);
    assert_eq!(memoryless.status.code(), Some(0));
    assert!(String::from_utf8(memoryless.stdout).unwrap().contains("F analytic-vs-memoryless"));

    let broken = rtngeo(&["compare-oracles", "--fault-residue", "1e-3"]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(String::from_utf8(broken.stderr).unwrap().contains("F analytic-vs-ode"));
}

#[test]
fn compare_oracles_monte_carlo_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<String> = (0..2)
        .map(|k| {
            let d = dir.path().join(k.to_string());
            let out = rtngeo(&[
                "compare-oracles", "--set", "noise.kappa=inf", "--set", "grid.t_max=3", "--mc-traj", "5000", "--seed", "9",
                "--out", d.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
            fs::read_to_string(d.join("compare.txt")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert!(runs[0].contains("5000 trajectories"));
}

fn csv_count(dir: &Path) -> usize {
    fs::read_dir(dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv")).count()
}

#[test]
fn figure_presets() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for fig in ["fig1a", "fig2b"] {
        let out = rtngeo(&["reproduce", fig, "--out", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(csv_count(&d.join(fig)), 6);
    }
    let text = fs::read_to_string(d.join("fig1a/a=0.5.csv")).unwrap();
    assert!(text.contains("# noise.nu = 0.5") && text.contains("# noise.kappa = 1.0"));
    assert_eq!(data_lines(&text).len(), 1502);

    let out = rtngeo(&["reproduce", "fig3", "--out", d.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(csv_count(&d.join("fig3/nu=0.5")), 6);
    assert_eq!(csv_count(&d.join("fig3/nu=2")), 6);
    assert_eq!(rtngeo(&["reproduce", "fig9"]).status.code(), Some(1));
}
