use std::fs;
use std::path::Path;
use std::process::Command;

const SMALL: &str = "\
# unit box, a few steps
box_half_width = 0.5
grading = 0
h = 0.1
max_h = 0.1
y0 = 0
T = 0.003
tau = 1e-3
k_max = 2
snapshot_stride = 1
";

fn ale_fsi(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ale-fsi"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        let rel = entry
            .strip_prefix(dir)
            .unwrap()
            .to_string_lossy()
            .into_owned();
        out.push((rel, fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            files.extend(walk(&p));
        } else {
            files.push(p);
        }
    }
    files
}

#[test]
fn simulate_twice_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.cfg", SMALL);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            let o = ale_fsi(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            listing(&out)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    for expected in [
        "summary.csv",
        "trajectory_guess.csv",
        "trajectory_k000.csv",
        "trajectory_k001.csv",
    ] {
        assert!(names.contains(&expected), "{names:?}");
    }
    // 2 iterations, steps 0..=3
    assert_eq!(names.iter().filter(|n| n.ends_with(".vtk")).count(), 8);
    let summary = String::from_utf8(
        runs[0]
            .iter()
            .find(|(n, _)| n == "summary.csv")
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn mesh_only_writes_a_readable_mesh() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.cfg", SMALL);
    let out = tmp.path().join("mesh.txt");
    let o = ale_fsi(&[
        "mesh-only",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let mesh = ale_fsi::mesh::read_mesh(&out).unwrap();
    assert!(mesh.triangle_count() > 0);
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    let code = |text: &str| {
        let cfg = write_config(tmp.path(), "c.cfg", text);
        ale_fsi(&["simulate", "--config", &cfg, "--out", out])
            .status
            .code()
    };
    assert_eq!(code(&format!("{SMALL}tau = 0\n")), Some(2), "duplicate key");
    assert_eq!(code("bogus = 1\n"), Some(2));
    assert_eq!(code(&SMALL.replace("tau = 1e-3", "tau = 0")), Some(2));
    let missing = ale_fsi(&["simulate", "--config", "/nonexistent/x.cfg"])
        .status
        .code();
    assert_eq!(missing, Some(2));
    // the body falls 0.0245 in the first step, below 95% of the 0.4 gap
    let trip = SMALL
        .replace("T = 0.003", "T = 0.1")
        .replace("tau = 1e-3", "tau = 0.05")
        .replace("snapshot_stride = 1", "collision_fraction = 0.95");
    assert_eq!(code(&trip), Some(3));
}
