use std::path::Path;
use std::process::{Command, Output};

fn awg(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awg"))
        .args(args)
        .current_dir(cwd)
        .env_remove("AWG_OUTPUT_DIR")
        .output()
        .expect("spawn awg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = r#"
experiment = "cli"
delta_over_c = [0.0, 4.0]
z_checkpoints = [1.0, 2.0]
realizations = 6
master_seed = 3
input_states = ["ccs1", "coherent:10"]
[lattice]
guide_count = 31
injection_index = 16
dz = 0.005
[capture]
archive = "injection"
"#;

#[test]
fn run_then_wigner_then_pnd() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("exp.toml"), CONFIG).unwrap();

    let out = awg(&["run", "--config", "exp.toml", "--output-dir", "out", "--realizations", "4"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(d.join("out/cli_summary.csv")).unwrap();
    assert!(summary.starts_with("state,delta_over_C,z,guide_index,mean_intensity,g2_medium_factor,g2,participation,intensity_variance\n"));
    // 2 states × 2 Δ/C × 2 z × 31 guides
    assert_eq!(summary.lines().count(), 1 + 2 * 2 * 2 * 31);
    assert!(d.join("out/cli_profile_4_2.csv").exists());
    assert!(d.join("out/cli_participation_0.csv").exists());
    let archive = std::fs::read_to_string(d.join("out/cli_archive.txt")).unwrap();
    // flag override reached the archive echo
    assert!(archive.contains("\"realizations\":4"));
    assert_eq!(archive.lines().filter(|l| !l.starts_with('#')).count(), 2 * 2 * 4);

    let out = awg(
        &["wigner", "--archive", "out/cli_archive.txt", "--state", "ccs1", "--delta-over-c", "4", "--z", "2", "--step", "0.2"],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = d.join("out/cli_wigner_ccs_0.1414_10_4_2.csv");
    assert!(grid.exists());
    assert!(d.join("out/cli_wigner_ccs_0.1414_10_4_2.dat").exists());
    let pnd_file = std::fs::read_to_string(d.join("out/cli_pnd_ccs_0.1414_10_4_2.csv")).unwrap();

    let out = awg(&["pnd", "--grid", grid.to_str().unwrap(), "--n-max", "10"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let printed = stdout(&out);
    // same numbers as the file written by `wigner`, minus its comment line
    let table: Vec<&str> = pnd_file.lines().skip(1).collect();
    let reread: Vec<&str> = printed.lines().collect();
    assert_eq!(table.len(), reread.len());
    for (a, b) in table.iter().zip(&reread).skip(1) {
        let pa: Vec<f64> = a.split(',').map(|s| s.parse().unwrap()).collect();
        let pb: Vec<f64> = b.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((pa[2] - pb[2]).abs() < 1e-12);
    }
}

#[test]
fn output_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_awg"))
        .args(["run", "--experiment", "env", "--delta-over-c", "0", "--z", "1", "--realizations", "1", "--guides", "9", "--injection", "5", "--state", "coherent:1"])
        .current_dir(dir.path())
        .env("AWG_OUTPUT_DIR", dir.path().join("from-env"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from-env/env_summary.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(awg(&["run", "--realizations", "0"], d).status.code(), Some(1));
    assert_eq!(awg(&["run", "--delta-over-c", "-1"], d).status.code(), Some(1));
    assert_eq!(awg(&["run", "--state", "bogus:1"], d).status.code(), Some(1));
    assert_eq!(awg(&["run", "--config", "missing.toml"], d).status.code(), Some(2));
    assert_eq!(awg(&["pnd", "--grid", "missing.csv", "--n-max", "3"], d).status.code(), Some(2));
    std::fs::write(d.join("bad.csv"), "x,y,W\n0,0,zzz\n").unwrap();
    assert_eq!(awg(&["pnd", "--grid", "bad.csv", "--n-max", "3"], d).status.code(), Some(2));
    std::fs::write(d.join("empty.csv"), "x,y,W\n0,0,0\n1,0,0\n0,1,0\n1,1,0\n").unwrap();
    assert_eq!(awg(&["pnd", "--grid", "empty.csv", "--n-max", "3"], d).status.code(), Some(3));
    assert_eq!(awg(&["nonsense"], d).status.code(), Some(1));
    assert_eq!(awg(&["--help"], d).status.code(), Some(0));
}

#[test]
fn oracle_check_prints_a_passing_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = awg(&["oracle-check"], dir.path());
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.contains("PASS")));
}
