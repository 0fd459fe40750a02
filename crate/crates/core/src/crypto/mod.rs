//! Cryptographic primitives over a toy bilinear group.
//!
//! Everything here is deliberately small-scale and deterministic so that
//! protocol behaviour — not cryptographic strength — is what gets
//! exercised. The group is the integers modulo a configurable prime with
//! a degenerate pairing (modular multiplication), which preserves exactly
//! the algebraic identities the identity-based schemes rely on while
//! keeping every value printable and checkable by hand.
//!
//! None of this is secure. It must never be used outside the simulator.

pub mod group;
pub mod ibe;
pub mod ibs;
pub mod kdf;
pub mod rootkey;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// A group element: an integer in `[0, p)` for the configured prime `p`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct Element(pub u64);

/// Length of an encoded group element in bytes.
pub const ELEMENT_LEN: usize = 8;
/// Length of an integrity tag in bytes.
pub const TAG_LEN: usize = 32;
/// Upper bound on plaintext accepted by the hybrid encryption layer.
pub const MAX_PLAINTEXT_LEN: usize = 4096;

/// Fixed-width big-endian encoding of a group element.
pub fn encode8(e: Element) -> [u8; ELEMENT_LEN] {
    e.0.to_be_bytes()
}

/// Errors raised by the primitives in this module.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    /// The requested group modulus is not a prime of at least 101.
    #[error("group modulus must be a prime >= 101, got {0}")]
    InvalidModulus(u64),
    /// The plaintext exceeds [`MAX_PLAINTEXT_LEN`].
    #[error("plaintext length {0} exceeds limit {MAX_PLAINTEXT_LEN}")]
    PlaintextTooLong(usize),
    /// Decryption produced a tag mismatch (wrong key or tampered bytes).
    #[error("ciphertext integrity check failed")]
    IntegrityFailure,
}

/// SHA-256 convenience wrapper.
pub fn sha256(data: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(data);
    h.finalize().into()
}

/// HMAC-SHA-256 (RFC 2104 construction over SHA-256).
pub fn hmac_sha256(key: &[u8], data: &[u8]) -> [u8; 32] {
    const BLOCK: usize = 64;
    let mut block = [0u8; BLOCK];
    if key.len() > BLOCK {
        block[..32].copy_from_slice(&sha256(key));
    } else {
        block[..key.len()].copy_from_slice(key);
    }
    let mut inner = Sha256::new();
    let ipad: Vec<u8> = block.iter().map(|b| b ^ 0x36).collect();
    inner.update(&ipad);
    inner.update(data);
    let inner_digest: [u8; 32] = inner.finalize().into();
    let mut outer = Sha256::new();
    let opad: Vec<u8> = block.iter().map(|b| b ^ 0x5c).collect();
    outer.update(&opad);
    outer.update(inner_digest);
    outer.finalize().into()
}

/// Symmetric key bound to a KEM shared secret and the ephemeral value `u`.
fn dem_key(shared: Element, u: Element) -> [u8; 32] {
    let mut data = Vec::with_capacity(2 * ELEMENT_LEN);
    data.extend_from_slice(&encode8(shared));
    data.extend_from_slice(&encode8(u));
    sha256(&data)
}

/// SHA-256-based keystream: block `i` is `SHA-256(key || i_be32)`.
fn keystream_xor(key: &[u8; 32], data: &mut [u8]) {
    for (counter, chunk) in (0u32..).zip(data.chunks_mut(32)) {
        let mut block_input = Vec::with_capacity(36);
        block_input.extend_from_slice(key);
        block_input.extend_from_slice(&counter.to_be_bytes());
        let block = sha256(&block_input);
        for (b, k) in chunk.iter_mut().zip(block.iter()) {
            *b ^= k;
        }
    }
}

/// Authenticated symmetric encryption under a KEM shared secret:
/// returns `(body, tag)` where `tag = HMAC(key, u || body)`.
pub(crate) fn dem_seal(
    shared: Element,
    u: Element,
    plaintext: &[u8],
) -> Result<(Vec<u8>, [u8; TAG_LEN]), CryptoError> {
    if plaintext.len() > MAX_PLAINTEXT_LEN {
        return Err(CryptoError::PlaintextTooLong(plaintext.len()));
    }
    let key = dem_key(shared, u);
    let mut body = plaintext.to_vec();
    keystream_xor(&key, &mut body);
    let mut mac_input = Vec::with_capacity(ELEMENT_LEN + body.len());
    mac_input.extend_from_slice(&encode8(u));
    mac_input.extend_from_slice(&body);
    let tag = hmac_sha256(&key, &mac_input);
    Ok((body, tag))
}

/// Inverse of [`dem_seal`]; checks the tag before releasing plaintext.
pub(crate) fn dem_open(
    shared: Element,
    u: Element,
    body: &[u8],
    tag: &[u8; TAG_LEN],
) -> Result<Vec<u8>, CryptoError> {
    let key = dem_key(shared, u);
    let mut mac_input = Vec::with_capacity(ELEMENT_LEN + body.len());
    mac_input.extend_from_slice(&encode8(u));
    mac_input.extend_from_slice(body);
    if hmac_sha256(&key, &mac_input) != *tag {
        return Err(CryptoError::IntegrityFailure);
    }
    let mut plaintext = body.to_vec();
    keystream_xor(&key, &mut plaintext);
    Ok(plaintext)
}
