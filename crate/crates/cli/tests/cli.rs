use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stabsat::encode::Cnf;
use stabsat::solver::{solve, SolveOutcome, SolverConfig};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn stabsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabsat"))
        .args(args)
        .env_remove("STABSAT_SOLVER")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn distance_exit_codes() {
    let steane = fixture("steane");
    let s = steane.to_str().unwrap();
    let ok = stabsat(&["distance", s, "--d", "3", "--no-cache"]);
    assert_eq!(code(&ok), 0);
    let r = json(&ok);
    assert_eq!(r["distance"]["status"], "proven-lower-bound");
    assert!(r["sectors"].as_array().unwrap().iter().all(|v| v["certified"] == true));

    let refuted = stabsat(&["distance", s, "--d", "4", "--no-cache"]);
    assert_eq!(code(&refuted), 1);
    assert_eq!(json(&refuted)["distance"]["value"], 3);

    let exact = stabsat(&["exact", s, "--no-cache"]);
    assert_eq!(code(&exact), 0);
    assert_eq!(json(&exact)["distance"]["value"], 3);
    let oracle = stabsat(&["exact", s, "--method", "oracle"]);
    assert_eq!(json(&oracle)["distance"]["value"], 3);
}

#[test]
fn invalid_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name":"bad","n":3,"hx":["110"],"hz":["100"]}"#).unwrap();
    assert_eq!(code(&stabsat(&["validate", bad.to_str().unwrap()])), 3);
    assert_eq!(code(&stabsat(&["distance", "/nonexistent.json", "--d", "2"])), 3);
    assert_eq!(code(&stabsat(&["distance"])), 3);
    assert_eq!(code(&stabsat(&["--help"])), 0);
}

#[test]
fn missing_solver_is_unknown() {
    let s = fixture("steane");
    let o = stabsat(&["distance", s.to_str().unwrap(), "--d", "3", "--no-cache", "--solver", "/nonexistent/solver"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["distance"]["status"], "unknown");
}

#[cfg(unix)]
#[test]
fn lying_solver_is_a_soundness_failure() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let liar = dir.path().join("liar.sh");
    fs::write(&liar, "#!/bin/sh\nfor a; do p=\"$a\"; done\necho '999 0 1 0' > \"$p\"\necho 's UNSATISFIABLE'\nexit 20\n").unwrap();
    fs::set_permissions(&liar, fs::Permissions::from_mode(0o755)).unwrap();
    let s = fixture("steane");
    let o = stabsat(&["distance", s.to_str().unwrap(), "--d", "4", "--no-cache", "--solver", liar.to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn encode_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let bb = fixture("bb72");
    let mut outputs = vec![];
    for i in 0..2 {
        let prefix = dir.path().join(format!("q{i}"));
        let o = stabsat(&["encode", bb.to_str().unwrap(), "--sector", "x", "--w", "5", "--out", prefix.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let cnf = fs::read(prefix.with_extension("cnf")).unwrap();
        let vm = fs::read(dir.path().join(format!("q{i}.varmap.json"))).unwrap();
        outputs.push((cnf, vm));
    }
    assert_eq!(outputs[0], outputs[1]);
    let stdout = stabsat(&["encode", bb.to_str().unwrap(), "--sector", "x", "--w", "5"]).stdout;
    assert_eq!(stdout, outputs[0].0);
    assert!(String::from_utf8(stdout).unwrap().starts_with("p cnf "));
}

#[test]
fn bb_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bb72.json");
    let o = stabsat(&["bb", "--l", "6", "--m", "6", "--a", "x3,y1,y2", "--b", "y3,x1,x2", "--name", "bb72", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stabsat(&["validate", out.to_str().unwrap(), "--no-cache"]);
    assert_eq!(code(&v), 0);
    let r = json(&v);
    assert_eq!(r["n"], 72);
    assert_eq!(r["k"], 12);
    assert_eq!(code(&stabsat(&["bb", "--l", "6", "--m", "6", "--a", "x3,y1", "--b", "y3,x1,x2"])), 3);
}

#[test]
fn check_cert_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let text = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";
    let cnf = Cnf::parse_dimacs(text).unwrap();
    let SolveOutcome::Unsat(Some(p)) = solve(&cnf, &SolverConfig::default()) else { panic!() };
    let cnf_path = dir.path().join("f.cnf");
    let good = dir.path().join("good.lrat");
    let bad = dir.path().join("bad.lrat");
    fs::write(&cnf_path, text).unwrap();
    p.write_to(&good).unwrap();
    fs::write(&bad, "5 0 1 0\n").unwrap();
    let c = cnf_path.to_str().unwrap();
    let o = stabsat(&["check-cert", c, good.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["accepted"], true);
    assert_eq!(code(&stabsat(&["check-cert", c, bad.to_str().unwrap()])), 1);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let s = fixture("shor");
    let args = ["distance", s.to_str().unwrap(), "--d", "3", "--cache-dir", cache.to_str().unwrap()];
    let first = json(&stabsat(&args));
    let second = json(&stabsat(&args));
    assert!(first["sectors"].as_array().unwrap().iter().all(|v| v["cached"] == false));
    assert!(second["sectors"].as_array().unwrap().iter().all(|v| v["cached"] == true && v["certified"] == true));
    // a corrupted proof is re-solved, not trusted
    for e in fs::read_dir(&cache).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "lrat") {
            fs::write(&p, "1 0 0\n").unwrap();
        }
    }
    let third = json(&stabsat(&args));
    assert!(third["sectors"].as_array().unwrap().iter().all(|v| v["cached"] == false && v["certified"] == true));
}
