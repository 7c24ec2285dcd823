use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matched-adi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn header_of(path: &Path) -> (Vec<String>, Vec<String>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (params, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    (
        params.iter().map(|s| s.to_string()).collect(),
        body.iter().map(|s| s.to_string()).collect(),
    )
}

#[test]
fn converge_space_writes_order_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tab.csv");
    let o = cli(&[
        "converge-space", "--example", "1", "--dt", "1e-2", "--tfinal", "0.1", "--meshes", "21,41", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (params, body) = header_of(&out);
    assert!(params.iter().any(|p| p == "# dt = 0.01"));
    assert_eq!(body[0], "N,Linf,order_Linf,L2,order_L2");
    assert_eq!(body.len(), 3);
    assert!(body[1].starts_with("2.100000000e1,") && body[1].contains(",,"));
}

#[test]
fn stability_writes_eigenvalue_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eig.csv");
    let o = cli(&[
        "stability", "--example", "5b", "--n", "21", "--dt", "1", "--alpha-plus", "10", "--k", "10", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (params, body) = header_of(&out);
    assert!(params.iter().any(|p| p == "# alpha_plus = 10"));
    assert_eq!(body[0], "rank,real,imag,modulus");
    assert_eq!(body.len(), 11);
}

#[test]
fn run_dumps_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("field.csv");
    let o = cli(&[
        "run", "--example", "3", "--n", "21", "--dt", "1e-2", "--tfinal", "0.05", "--dump", dump.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("N,dt,t_final,Linf,L2"));
    let (_, body) = header_of(&dump);
    assert_eq!(body[0], "x,y,u_num,u_exact,error");
    assert_eq!(body.len(), 1 + 21 * 21);
}

#[test]
fn identical_invocations_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["a.csv", "b.csv"].iter().map(|f| dir.path().join(f)).collect();
    for f in &files {
        let o = cli(&[
            "--threads", "2", "boundedness", "--example", "4", "--n", "21", "--dts", "0.5", "--steps", "20", "--out",
            f.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let o = cli(&["run", "--example", "7", "--n", "21", "--dt", "0.1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown case"));

    let o = cli(&["run", "--example", "1", "--n", "2", "--dt", "0.1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = cli(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}
