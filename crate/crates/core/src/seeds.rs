//! Seed fan-out: every stage derives its own seed from the single root seed
//! and a stage label, so stages are independently reproducible.

use sha2::{Digest, Sha256};

pub fn derive(root: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
