//! Binary on-disk cache of [`SieveTables`], keyed by limit.
//!
//! Layout (little-endian):
//! `magic[8] | version u32 | limit u32 | payload_len u64 | sha256[32] | payload`
//! where the payload is `spf[0..=limit]` as u32 followed by
//! `divisor_count[0..=limit]` as u16.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::SieveTables;
use crate::error::Result;

pub const CACHE_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"DIVSIEVE";
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    /// No usable file existed; tables were built and written.
    Built,
    /// A file existed but failed validation; tables were rebuilt.
    Rebuilt,
}

pub fn cache_path(dir: &Path, limit: u32) -> PathBuf {
    dir.join(format!("sieve-v{CACHE_VERSION}-{limit}.bin"))
}

pub fn load_or_build(dir: &Path, limit: u32) -> Result<(SieveTables, CacheOutcome)> {
    let path = cache_path(dir, limit);
    let existed = path.exists();
    if existed {
        if let Ok(bytes) = fs::read(&path) {
            if let Some(tables) = decode(&bytes, limit) {
                return Ok((tables, CacheOutcome::Hit));
            }
        }
    }
    let tables = SieveTables::build(limit)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(&tables))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    let outcome = if existed { CacheOutcome::Rebuilt } else { CacheOutcome::Built };
    Ok((tables, outcome))
}

fn encode(t: &SieveTables) -> Vec<u8> {
    let mut payload = Vec::with_capacity(t.spf.len() * 6);
    for v in &t.spf {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    for v in &t.divisor_count {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&t.limit.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(&payload));
    out.extend_from_slice(&payload);
    out
}

fn decode(bytes: &[u8], limit: u32) -> Option<SieveTables> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return None;
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().ok()?);
    let stored_limit = u32::from_le_bytes(bytes[12..16].try_into().ok()?);
    let payload_len = u64::from_le_bytes(bytes[16..24].try_into().ok()?) as usize;
    let n = limit as usize + 1;
    if version != CACHE_VERSION || stored_limit != limit || payload_len != n * 6 {
        return None;
    }
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != payload_len || Sha256::digest(payload).as_slice() != &bytes[24..56] {
        return None;
    }
    let (spf_bytes, d_bytes) = payload.split_at(n * 4);
    let spf = spf_bytes.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    let divisor_count = d_bytes.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
    Some(SieveTables::from_parts(limit, spf, divisor_count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_hit_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let (a, o1) = load_or_build(dir.path(), 5000).unwrap();
        assert_eq!(o1, CacheOutcome::Built);
        let (b, o2) = load_or_build(dir.path(), 5000).unwrap();
        assert_eq!(o2, CacheOutcome::Hit);
        assert_eq!(a, b);

        // flip one payload byte: checksum must catch it
        let path = cache_path(dir.path(), 5000);
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0xff;
        fs::write(&path, &bytes).unwrap();
        let (c, o3) = load_or_build(dir.path(), 5000).unwrap();
        assert_eq!(o3, CacheOutcome::Rebuilt);
        assert_eq!(a, c);

        // truncation
        fs::write(&path, &bytes[..100]).unwrap();
        let (_, o4) = load_or_build(dir.path(), 5000).unwrap();
        assert_eq!(o4, CacheOutcome::Rebuilt);
        let (_, o5) = load_or_build(dir.path(), 5000).unwrap();
        assert_eq!(o5, CacheOutcome::Hit);
    }

    #[test]
    fn wrong_limit_is_rejected() {
        let t = SieveTables::build(100).unwrap();
        let bytes = encode(&t);
        assert!(decode(&bytes, 100).is_some());
        assert!(decode(&bytes, 101).is_none());
    }
}
