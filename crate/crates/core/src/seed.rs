//! Deterministic seed derivation.

use sha2::{Digest, Sha256};

/// Seed for one experiment cell: the first eight bytes of
/// `SHA-256(master | label | params)`, little endian.
pub fn derive_seed(master: u64, label: &str, params: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(label.as_bytes());
    hasher.update([0x1f]);
    hasher.update(params.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
