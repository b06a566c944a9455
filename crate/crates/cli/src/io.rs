//! Shared output plumbing: provenance digests, atomic file writes, and the
//! JSON artifact envelope.
//!
//! Every file the binary produces embeds a digest of the effective
//! configuration that produced it — CSV outputs as a `# config_digest=...`
//! header comment, JSON artifacts as a top-level field — so downstream
//! results can be traced back to their exact inputs.  Files are written to a
//! temporary sibling and renamed into place so readers never observe a
//! partially written file.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::AppError;

/// 64-bit FNV-1a hash.
fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET_BASIS;
    for byte in bytes {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Hex digest of the canonical JSON serialization of an effective config.
///
/// Struct fields serialize in declaration order, so the digest is stable
/// for a given configuration and toolchain-independent.
pub fn config_digest<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).expect("config serializes to JSON");
    format!("{:016x}", fnv1a64(json.as_bytes()))
}

/// Standard comment block for CSV outputs.
pub fn csv_comments<T: Serialize>(kind: &str, config: &T) -> Vec<String> {
    vec![
        format!("kind={kind}"),
        format!("config_digest={}", config_digest(config)),
    ]
}

/// Write `bytes` to `path` atomically (temporary sibling + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| AppError::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|err| AppError::io(&tmp, err))?;
    fs::rename(&tmp, path).map_err(|err| AppError::io(path, err))?;
    Ok(())
}

/// JSON artifact envelope: result plus the provenance needed to reproduce it.
#[derive(Debug, Serialize)]
pub struct Artifact<C: Serialize, R: Serialize> {
    /// Artifact discriminator: `fit`, `coupling`, `predict`, or `magic`.
    pub kind: &'static str,
    pub config_digest: String,
    pub config: C,
    pub result: R,
}

/// Serialize an artifact envelope and write it atomically to `path`.
pub fn write_artifact<C: Serialize, R: Serialize>(
    path: &Path,
    kind: &'static str,
    config: C,
    result: R,
) -> Result<(), AppError> {
    let artifact = Artifact {
        kind,
        config_digest: config_digest(&config),
        config,
        result,
    };
    let mut json =
        serde_json::to_string_pretty(&artifact).expect("artifact serializes to JSON");
    json.push('\n');
    write_atomic(path, json.as_bytes())
}

/// Read a whole file as a string, mapping errors to the I/O exit class.
pub fn read_file(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|err| AppError::io(path, err))
}

/// Parse a JSON config file into a command's config type.
pub fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, AppError> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|err| AppError::invalid(format!("config file {}: {err}", path.display())))
}

/// Echo the effective config and its digest on stdout before running.
pub fn echo_config<T: Serialize>(command: &str, config: &T) {
    let json = serde_json::to_string(config).expect("config serializes to JSON");
    println!("# {command} config_digest={}", config_digest(config));
    println!("# {command} config={json}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv1a64_matches_reference_vectors() {
        // Published FNV-1a test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn digest_is_stable_across_calls() {
        #[derive(Serialize)]
        struct Demo {
            x: f64,
            label: String,
        }
        let demo = Demo {
            x: 0.1 + 0.2,
            label: "demo".into(),
        };
        assert_eq!(config_digest(&demo), config_digest(&demo));
        assert_eq!(config_digest(&demo).len(), 16);
    }
}
