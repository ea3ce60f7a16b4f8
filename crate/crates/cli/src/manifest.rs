use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Everything needed to rerun a command and reproduce its files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Normalized arguments: absolute input paths, explicit seed, no --out.
    pub args: Vec<String>,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub config: serde_json::Value,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
}

const PATH_FLAGS: [&str; 4] = ["--E", "--A", "--M", "--in"];
const DROPPED_VALUE_FLAGS: [&str; 2] = ["--out", "--seed"];

/// Rewrites raw arguments (without the program name) into the replayable
/// form. Returns the normalized list and the input paths it saw.
pub fn normalize_args(raw: &[String], seed: u64) -> Result<(Vec<String>, Vec<String>)> {
    let mut split = Vec::with_capacity(raw.len());
    for a in raw {
        match a.split_once('=') {
            Some((flag, v)) if flag.starts_with("--") => {
                split.push(flag.to_string());
                split.push(v.to_string());
            }
            _ => split.push(a.clone()),
        }
    }
    let mut out = Vec::new();
    let mut inputs = Vec::new();
    let mut it = split.into_iter();
    while let Some(a) = it.next() {
        if a == "--timestamp" {
            continue;
        }
        if DROPPED_VALUE_FLAGS.contains(&a.as_str()) {
            it.next();
            continue;
        }
        if PATH_FLAGS.contains(&a.as_str()) {
            let Some(p) = it.next() else { bail!("{a} needs a value") };
            let abs = std::path::absolute(&p).with_context(|| format!("resolving {p}"))?;
            let abs = abs.to_string_lossy().into_owned();
            inputs.push(abs.clone());
            out.push(a);
            out.push(abs);
            continue;
        }
        out.push(a);
    }
    out.push("--seed".into());
    out.push(seed.to_string());
    Ok((out, inputs))
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

pub fn write_manifest(m: &RunManifest, dir: &Path) -> Result<PathBuf> {
    let p = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(m)? + "\n";
    pindex_core::io::write_atomic(&p, text.as_bytes())?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn normalization_drops_out_and_pins_seed() {
        let (args, inputs) =
            normalize_args(&s(&["sweep", "--E=e.mtx", "--A", "/x/a.mtx", "--out", "d", "--seed", "3", "--timestamp"]), 9).unwrap();
        assert_eq!(args[0], "sweep");
        assert!(args[2].ends_with("/e.mtx") && args[2].starts_with('/'));
        assert_eq!(&args[3..], &s(&["--A", "/x/a.mtx", "--seed", "9"])[..]);
        assert_eq!(inputs.len(), 2);
    }
}
