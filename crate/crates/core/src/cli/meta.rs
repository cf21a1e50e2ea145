//! `meta.json` run records and `replay`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{execute, write_atomic, CliError, Context, Outcome};

pub const META_FILE: &str = "meta.json";

/// Per-cell seed record for Monte-Carlo outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSeed {
    pub label: String,
    pub seed: u64,
}

/// Command-specific metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extra {
    /// Defaults the command filled in because the config left them out.
    pub defaults: BTreeMap<String, String>,
    pub cells: Vec<CellSeed>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub command: String,
    pub code_version: String,
    pub seed: u64,
    pub config: String,
    pub config_sha256: String,
    pub defaults: BTreeMap<String, String>,
    pub cells: Vec<CellSeed>,
    /// Output file name to SHA-256 of its contents.
    pub outputs: BTreeMap<String, String>,
    pub timestamp_unix: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> Result<String, CliError> {
    Ok(sha256_hex(&fs::read(path)?))
}

pub(super) fn write(ctx: &Context, outcome: &Outcome) -> Result<(), CliError> {
    let mut outputs = BTreeMap::new();
    for f in &outcome.files {
        outputs.insert(f.clone(), hash_file(&ctx.out.join(f))?);
    }
    let meta = RunMeta {
        command: ctx.command.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: ctx.seed,
        config: ctx.config_text.clone(),
        config_sha256: sha256_hex(ctx.config_text.as_bytes()),
        defaults: outcome.meta.defaults.clone(),
        cells: outcome.meta.cells.clone(),
        outputs,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_atomic(&ctx.out.join(META_FILE), json.as_bytes())
}

pub fn read(path: &Path) -> Result<RunMeta, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn command_tag(name: &str) -> Result<&'static str, CliError> {
    Ok(match name {
        "build" => "build",
        "run" => "run",
        "sweep" => "sweep",
        "phase-scan" => "phase-scan",
        other => return Err(CliError::Config(format!("metadata names unknown command `{other}`"))),
    })
}

/// Re-runs the recorded command with the recorded config and seed, then
/// compares every recorded output hash. Returns a failure message on any
/// mismatch.
pub fn replay(metadata: &Path, workers: Option<usize>, out: Option<&Path>) -> Result<Option<String>, CliError> {
    let meta = read(metadata)?;
    if meta.code_version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: recorded with version {}, replaying with {}",
            meta.code_version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let out = match out {
        Some(p) => p.to_path_buf(),
        None => metadata.parent().unwrap_or(Path::new(".")).join("replay"),
    };
    let ctx = Context::from_text(command_tag(&meta.command)?, meta.config.clone(), Some(meta.seed), workers, out)?;
    // the checkpoints of a previous replay would short-circuit the rerun
    let _ = fs::remove_dir_all(ctx.out.join(super::sweep::CHECKPOINT_DIR));
    execute(&ctx)?;
    let mut mismatched = Vec::new();
    for (file, expected) in &meta.outputs {
        let path = ctx.out.join(file);
        let got = if path.exists() { hash_file(&path)? } else { "missing".into() };
        let ok = &got == expected;
        println!("{} {file}", if ok { "match   " } else { "MISMATCH" });
        if !ok {
            mismatched.push(file.clone());
        }
    }
    Ok(if mismatched.is_empty() {
        println!("replay reproduced {} outputs", meta.outputs.len());
        None
    } else {
        Some(format!("replay differs in {}", mismatched.join(", ")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
