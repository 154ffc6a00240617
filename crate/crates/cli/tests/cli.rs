use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL_CCDF: &str = r#"{
  "kind": "ccdf",
  "name": "small",
  "config": { "n_data": 48, "n_se": 6, "n_fft": 128 },
  "seed": 4,
  "filters": [
    { "label": "rrc", "source": "rrc" },
    { "label": "vanilla", "source": "rectangular" }
  ],
  "ccdf": { "n_blocks": 10000, "p": 0.01 }
}"#;

fn fdss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdss")).args(args).output().expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(sub: &str, spec: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    fdss(&args)
}

#[test]
fn ccdf_succeeds_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", SMALL_CCDF);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run("ccdf", &spec, &a, &[]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(run("ccdf", &spec, &b, &["--threads", "1"]).status.code(), Some(0));
    for name in ["ccdf_rrc.csv", "ccdf_vanilla.csv", "ccdf_levels.csv", "ccdf.svg"] {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name} differs");
    }
    assert!(String::from_utf8_lossy(&first.stdout).contains("rrc"));
}

#[test]
fn seed_flag_changes_the_draws() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", SMALL_CCDF);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("ccdf", &spec, &a, &[]).status.code(), Some(0));
    assert_eq!(run("ccdf", &spec, &b, &["--seed", "5"]).status.code(), Some(0));
    assert_ne!(fs::read(a.join("ccdf_rrc.csv")).unwrap(), fs::read(b.join("ccdf_rrc.csv")).unwrap());
}

#[test]
fn kind_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", SMALL_CCDF);
    let out = run("ser-sweep", &spec, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ccdf"));
}

#[test]
fn too_few_blocks_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_CCDF.replace("\"n_blocks\": 4000", "\"n_blocks\": 1").replace("0.01", "0.001");
    let spec = write_spec(dir.path(), "s.json", &text);
    let out = run("ccdf", &spec, &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient samples"));
}

#[test]
fn missing_filter_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_CCDF.replace(
        r#"{ "label": "vanilla", "source": "rectangular" }"#,
        r#"{ "label": "learned", "source": "file", "path": "nowhere.json" }"#,
    );
    let spec = write_spec(dir.path(), "s.json", &text);
    assert_eq!(run("ccdf", &spec, &dir.path().join("o"), &[]).status.code(), Some(2));
}

#[test]
fn missing_spec_and_bad_json_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("ccdf", &dir.path().join("absent.json"), &dir.path().join("o"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let spec = write_spec(dir.path(), "s.json", "{ not json");
    assert_eq!(run("ccdf", &spec, &dir.path().join("o"), &[]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", SMALL_CCDF);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = run("ccdf", &spec, &blocker, &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trained_filter_round_trips_through_a_file_spec() {
    let dir = tempfile::tempdir().unwrap();
    let train = r#"{
      "kind": "train",
      "config": { "n_data": 48, "n_se": 6, "n_fft": 128 },
      "seed": 2,
      "filters": [
        { "label": "z", "source": "train", "design": "zero_isi",
          "weights": { "lambda1": 1.0, "lambda2": 0.0, "gamma": 0.0 },
          "train": { "degree": 4, "steps": 5, "batch_blocks": 16, "valid_blocks": 32, "eval_every": 1 } }
      ]
    }"#;
    let spec = write_spec(dir.path(), "t.json", train);
    let out_dir = dir.path().join("t");
    let out = run("train", &spec, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("filter_z.json").exists());

    let ccdf = SMALL_CCDF.replace(
        r#"{ "label": "vanilla", "source": "rectangular" }"#,
        r#"{ "label": "z", "source": "file", "path": "t/filter_z.json" }"#,
    );
    let spec = write_spec(dir.path(), "c.json", &ccdf);
    assert_eq!(run("ccdf", &spec, &dir.path().join("c"), &[]).status.code(), Some(0));

    // Same record against other dimensions.
    let wide = ccdf.replace("\"n_se\": 6", "\"n_se\": 8");
    let spec = write_spec(dir.path(), "w.json", &wide);
    assert_eq!(run("ccdf", &spec, &dir.path().join("w"), &[]).status.code(), Some(2));
}
