//! Run manifest: the provenance record written next to every output file.
//!
//! The manifest pins everything needed to reproduce a run byte for byte:
//! the tool version, the master seed, the SHA-256 of the effective
//! configuration, and the configuration itself in canonical TOML.  It
//! deliberately records nothing volatile — no timestamps, no host names,
//! no worker counts — because none of those may influence the outputs.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct Manifest<'a> {
    /// Version of the tool that produced the run.
    version: &'a str,
    /// Master seed after command-line overrides.
    master_seed: u64,
    /// SHA-256 (hex) of the `config` field below.
    config_sha256: String,
    /// Effective configuration, canonical TOML.
    config: &'a str,
}

/// Hex SHA-256 of a byte string.
#[must_use]
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Renders the manifest for one run.
#[must_use]
pub fn render(canonical_config: &str, master_seed: u64) -> String {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        master_seed,
        config_sha256: sha256_hex(canonical_config.as_bytes()),
        config: canonical_config,
    };
    toml::to_string_pretty(&manifest).expect("manifest serializes to TOML")
}
