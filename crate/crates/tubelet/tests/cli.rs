use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tubelet::pairs::read_pairs;
use tubelet::tubelet_core::compositor::check_shared_tubelet;

const SMALL: &str = "\
[corpus]
count = 8
[train]
epochs = 2
batch_size = 4
queue = 8
[train.encoder]
hidden = 16
proj_hidden = 16
embed = 8
[eval]
probes = 6
corpus = 4
";

fn tubelet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubelet"))
        .args(args)
        .current_dir(cwd)
        .env("TUBELET_LOG", "quiet")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn traj_writes_one_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = tubelet(
        &["traj", "--kind", "nonlinear", "--n", "48", "--sigma", "8", "--count", "5", "--out", "plots"],
        dir.path(),
    );
    ok(&out);
    let written = files(&dir.path().join("plots"));
    assert_eq!(written, ["trajectories-nonlinear.ppm"]);
    let ppm = fs::read(dir.path().join("plots").join(&written[0])).unwrap();
    assert!(ppm.starts_with(b"P6\n32 32\n255\n"));
}

#[test]
fn pairs_pass_the_shared_tubelet_check() {
    let dir = tempfile::tempdir().unwrap();
    ok(&tubelet(&["pairs", "--mode", "tubelet", "--m", "2", "--count", "10", "--out", "p"], dir.path()));
    let pairs = read_pairs(&dir.path().join("p")).unwrap();
    assert_eq!(pairs.len(), 10);
    for p in &pairs {
        assert_eq!(p.record.tubelets.len(), 2);
        check_shared_tubelet(&p.sample()).unwrap();
    }
    ok(&tubelet(&["plot", "--pairs", "p", "--out", "plots", "--count", "3"], dir.path()));
    assert_eq!(files(&dir.path().join("plots")).len(), 6);
}

#[test]
fn every_mode_materializes() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["static", "linear", "nonlinear", "nonlinear+rotation", "scaled-crop-control"] {
        ok(&tubelet(&["pairs", "--mode", mode, "--count", "3", "--out", mode], dir.path()));
        assert!(read_pairs(&dir.path().join(mode)).unwrap().iter().all(|p| p.record.mode.name() == mode));
    }
}

#[test]
fn unknown_subcommand_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = tubelet(&["frobnicate"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn failures_are_one_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[train]\ntemperature = -1.0\n").unwrap();
    let out = tubelet(&["corpus", "--config", "bad.toml"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("train.temperature"));

    let out = tubelet(&["pairs", "--mode", "wobbly"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("wobbly"));
}

#[test]
fn corpus_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    ok(&tubelet(&["corpus", "--count", "2", "--seed", "4", "--out", "c"], dir.path()));
    let c = dir.path().join("c");
    assert_eq!(files(&c), ["clip-00000.tbc", "clip-00001.tbc", "manifest.jsonl"]);
    let before: Vec<Vec<u8>> = files(&c).iter().map(|f| fs::read(c.join(f)).unwrap()).collect();
    ok(&tubelet(&["corpus", "--count", "2", "--seed", "4", "--out", "c"], dir.path()));
    let after: Vec<Vec<u8>> = files(&c).iter().map(|f| fs::read(c.join(f)).unwrap()).collect();
    assert_eq!(before, after);
    assert_eq!(fs::read_to_string(c.join("manifest.jsonl")).unwrap().lines().count(), 2);
}

#[test]
fn train_and_eval_small_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    ok(&tubelet(&["corpus", "--config", "small.toml", "--out", "c"], dir.path()));
    ok(&tubelet(&["train", "--config", "small.toml", "--corpus", "c", "--out", "run"], dir.path()));
    let history = fs::read_to_string(dir.path().join("run/history.csv")).unwrap();
    assert_eq!(history.lines().count(), 3);
    ok(&tubelet(
        &["eval", "--config", "small.toml", "--checkpoint", "run/checkpoint.tbck", "--out", "run"],
        dir.path(),
    ));
    let eval: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/eval.json")).unwrap()).unwrap();
    assert_eq!(eval["count"], 6);
    assert!((0.0..=1.0).contains(&eval["top1"].as_f64().unwrap()));
}

#[test]
fn help_documents_flags() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["corpus", "traj", "pairs", "train", "eval", "ablate", "plot"] {
        let out = tubelet(&[cmd, "--help"], dir.path());
        ok(&out);
        let help = String::from_utf8(out.stdout).unwrap();
        for flag in ["--config", "--seed", "--jobs"] {
            assert!(help.contains(flag), "{cmd} --help lacks {flag}");
        }
    }
    let help = String::from_utf8(tubelet(&["traj", "--help"], dir.path()).stdout).unwrap();
    assert!(help.contains("48") && help.contains("--sigma"));
    let help = String::from_utf8(tubelet(&["train", "--help"], dir.path()).stdout).unwrap();
    assert!(help.contains("0.2") && help.contains("--queue") && help.contains("--epochs"));
}
