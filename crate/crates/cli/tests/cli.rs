use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclic-chern"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    write(dir, name, &serde_json::to_string_pretty(v).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn constant_plot() -> Value {
    json!({ "format": "cyclic-chern/plot", "m": 1, "d": 1, "a": [[0]], "v": [0], "c": ["1/4"] })
}

#[test]
fn verify_complex_passes() {
    let o = run(&["verify", "--suite", "complex", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout_json(&o);
    assert_eq!(report["format"], "cyclic-chern/report");
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 7);
}

#[test]
fn verify_bch_passes() {
    let o = run(&["verify", "--suite", "bch", "--tolerance", "1e-6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "a.toml", "sead = 3\n");
    let broken = write(dir.path(), "b.toml", "seed = [\n");
    let negative = write(dir.path(), "c.toml", "rk4-step = 0.0\n");
    for cfg in [&unknown, &broken, &negative] {
        let o = run(&["--config", s(cfg), "verify", "--suite", "complex"]);
        assert_eq!(code(&o), 1, "{}", cfg.display());
    }
    assert_eq!(code(&run(&["verify", "--suite", "nonsense"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "suite = [\"complex\"]\nseed = 3\n");
    let from_file = stdout_json(&run(&["--config", s(&cfg), "verify"]));
    assert_eq!(from_file["seed"], 3);
    assert_eq!(from_file["suites"].as_array().unwrap().len(), 1);
    let overridden = stdout_json(&run(&["--config", s(&cfg), "verify", "--seed", "9"]));
    assert_eq!(overridden["seed"], 9);
}

#[test]
fn winding_chain_matches_golden_file() {
    let o = run(&["chern", "--map", "corpus:winding", "--truncate", "1"]);
    assert_eq!(code(&o), 0);
    let golden = fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/winding_odd_n1.json")).unwrap();
    assert_eq!(o.stdout, golden);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = run(&["chern", "--map", "corpus:twisted-pair", "--truncate", "2", "--out", s(out)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let first = run(&["verify", "--suite", "complex", "--seed", "11"]);
    let second = run(&["verify", "--suite", "complex", "--seed", "11"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn even_chern_of_a_constant_map_is_its_rank() {
    let o = run(&["chern", "--map", "corpus:constant", "--parity", "even", "--truncate", "2"]);
    assert_eq!(code(&o), 0);
    let terms = stdout_json(&o)["terms"].as_array().unwrap().clone();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coef"], json!({ "0": [2, 1, 0, 1] }));
    assert_eq!(terms[0]["factors"].as_array().unwrap().len(), 1);
}

#[test]
fn truncation_zero_gives_the_zero_chain() {
    let o = run(&["chern", "--map", "corpus:winding", "--truncate", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["terms"], json!([]));
}

#[test]
fn restriction_reports_the_odd_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("ch.json");
    let o = run(&["chern", "--map", "corpus:twisted-triple", "--truncate", "2", "--out", s(&chain)]);
    assert_eq!(code(&o), 0);
    let o = run(&["eval", "--mode", "restrict", "--in", s(&chain), "--map", "corpus:twisted-triple", "--degree", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["coefficient"]["value"], "-1/6");
}

#[test]
fn compare_on_a_constant_plot_passes() {
    let dir = tempfile::tempdir().unwrap();
    let plot = write_json(dir.path(), "p.json", &constant_plot());
    let o = run(&["eval", "--mode", "compare", "--map", "corpus:winding", "--plot", s(&plot)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout_json(&o);
    assert_eq!(report["tolerance"], 1e-9);
    assert!(report["max_deviation"].as_f64().unwrap() < 1e-9);
}

#[test]
fn failed_comparison_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let plot = json!({ "format": "cyclic-chern/plot", "m": 1, "d": 1, "a": [[1]], "v": [1], "c": ["0"] });
    let plot = write_json(dir.path(), "p.json", &plot);
    let o = run(&["eval", "--mode", "compare", "--map", "corpus:winding", "--plot", s(&plot), "--tolerance", "1e-300"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tilde_rho_of_a_degenerate_chain_is_zero() {
    // [e^{iτx} | 1]: a function inserted in slot 1
    let one = json!({ "coef": { "0": [1, 1, 0, 1] }, "key": [[0, 0]] });
    let wave = json!({ "coef": { "0": [1, 1, 0, 1] }, "key": [[4, 0]] });
    let chain = json!({
        "format": "cyclic-chern/chain",
        "layout": { "coords": 1, "vars": ["periodic"] },
        "terms": [{
            "coef": { "0": [1, 1, 0, 1] },
            "factors": [
                { "alpha": [{ "dz": [], "poly": [wave] }], "beta": [] },
                { "alpha": [{ "dz": [], "poly": [one] }], "beta": [] },
            ],
        }],
    });
    let dir = tempfile::tempdir().unwrap();
    let input = write_json(dir.path(), "w.json", &chain);
    let plot = json!({ "format": "cyclic-chern/plot", "m": 1, "d": 1, "a": [[1]], "v": [1], "c": ["0"] });
    let plot = write_json(dir.path(), "p.json", &plot);
    let o = run(&["eval", "--mode", "tilde-rho", "--in", s(&input), "--plot", s(&plot)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = stdout_json(&o);
    assert_eq!(f["alpha"], json!([]));
    assert_eq!(f["beta"], json!([]));
}

#[test]
fn layout_mismatch_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("ch.json");
    assert_eq!(code(&run(&["chern", "--map", "corpus:twisted-pair", "--truncate", "1", "--out", s(&chain)])), 0);
    let plot = write_json(dir.path(), "p.json", &constant_plot());
    let o = run(&["eval", "--mode", "rho", "--in", s(&chain), "--plot", s(&plot)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("slot"));
}
