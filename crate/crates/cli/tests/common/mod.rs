#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Output;

use serde_json::Value;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Runs the binary with `QES_OUT_DIR` pointing at `out`.
pub fn qes(out: &Path, args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_qes"))
        .args(args)
        .env("QES_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

pub fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

pub fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

/// Validator for `schemas/<name>.schema.json` with every sibling schema registered.
pub fn validator(name: &str) -> jsonschema::Validator {
    let dir = repo_root().join("schemas");
    let mut options = jsonschema::options();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let schema = read_json(&path);
        let id = schema["$id"].as_str().expect("schema has $id").to_string();
        options = options.with_resource(id, jsonschema::Resource::from_contents(schema).unwrap());
    }
    options.build(&read_json(&dir.join(format!("{name}.schema.json")))).unwrap()
}

pub fn assert_valid(name: &str, instance: &Value) {
    let validator = validator(name);
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

/// Artifacts listed in the manifest, with their contents.
pub fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let manifest = read_json(&dir.join("manifest.json"));
    manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            let name = a.as_str().unwrap().to_string();
            let bytes = fs::read(dir.join(&name)).unwrap();
            (name, bytes)
        })
        .collect()
}

/// Runs `args` into `first`, replays its manifest into `second` and reports
/// whether every artifact and the manifest (minus its timestamp) match.
pub fn replay_matches(first: &Path, second: &Path, args: &[&str]) -> Result<(), String> {
    let run = qes(first, args);
    if !run.status.success() {
        return Err(format!("{args:?} failed: {}", stderr(&run)));
    }
    let manifest = first.join("manifest.json");
    let replay = qes(second, &["replay", "--manifest", manifest.to_str().unwrap()]);
    if !replay.status.success() {
        return Err(format!("replay of {args:?} failed: {}", stderr(&replay)));
    }
    let (a, b) = (artifacts(first), artifacts(second));
    if a.is_empty() || a != b {
        return Err(format!("{args:?}: artifacts differ"));
    }
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    if strip(read_json(&manifest)) != strip(read_json(&second.join("manifest.json"))) {
        return Err(format!("{args:?}: manifests differ"));
    }
    Ok(())
}
