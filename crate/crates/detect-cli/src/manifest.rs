//! Run manifest: config hash, seed and versions recorded next to every
//! stage's outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_sha256: String,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

pub fn config_hash(config_text: &str) -> String {
    let digest = Sha256::digest(config_text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_manifest(
    out_dir: &Path,
    subcommand: &str,
    config_text: &str,
    seed: u64,
    outputs: &[String],
) -> Result<()> {
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        config_sha256: config_hash(config_text),
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: outputs.to_vec(),
    };
    let path = out_dir.join(format!("manifest-{subcommand}.json"));
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Data(format!("manifest encode: {e}")))?;
    std::fs::write(&path, text).map_err(CliError::io(&path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash("[run]\nseed = 1\n");
        let b = config_hash("[run]\nseed = 1\n");
        let c = config_hash("[run]\nseed = 2\n");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }
}
