//! Driver for system files: parsing, dispatch and JSON/CSV reports.

pub mod dsl;
pub mod run;

use sha2::{Digest, Sha256};

/// Hex SHA-256 of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
