//! Run manifests: a small JSON audit record written beside every output
//! file, carrying the exact command, the seed, and 64-bit content digests of
//! all inputs and outputs. Identical inputs and seed give identical output
//! digests, which is the reproducibility contract the CLI advertises.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::CliError;

/// FNV-1a 64-bit content hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    fnv1a64: String,
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tool_version: &'static str,
    wall_time_ms: u128,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

/// Collects input/output digests over the life of one command invocation and
/// writes `<output>.manifest.json` beside each output file.
pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    started: Instant,
    inputs: Vec<FileDigest>,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: String, seed: Option<u64>) -> Self {
        Self {
            command,
            seed,
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            fnv1a64: format!("{:016x}", fnv1a64(bytes)),
        });
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes the manifest beside each recorded output.
    pub fn write(self) -> Result<(), CliError> {
        if self.outputs.is_empty() {
            return Ok(());
        }
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for path in &self.outputs {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            outputs.push(FileDigest {
                path: path.display().to_string(),
                fnv1a64: format!("{:016x}", fnv1a64(&bytes)),
            });
        }
        let manifest = RunManifest {
            command: self.command,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time_ms: self.started.elapsed().as_millis(),
            inputs: self.inputs,
            outputs,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        for path in &self.outputs {
            let manifest_path = manifest_path_for(path);
            fs::write(&manifest_path, format!("{json}\n"))
                .map_err(|e| CliError::io(&manifest_path, e))?;
        }
        Ok(())
    }
}

pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_owned());
    name.push_str(".manifest.json");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_known_vectors() {
        // Reference values for the 64-bit FNV-1a parameters.
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        let p = manifest_path_for(Path::new("/tmp/out/v.txt"));
        assert_eq!(p, Path::new("/tmp/out/v.txt.manifest.json"));
    }
}
