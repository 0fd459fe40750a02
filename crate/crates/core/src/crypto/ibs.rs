//! Identity-based signatures over the toy group.
//!
//! The signer holds an extracted key `d = msk * q` for `q = h1(identity)`
//! and produces `(u, v)` with `u = r * q` and `v = (r + h) * d`, where
//! `h` binds the message to `u`. Verification needs only the authority's
//! `mpk` and the signer's identity string:
//!
//! `pair(v, g) == pair(u + h * q, mpk)`
//!
//! since both sides equal `(r + h) * msk * q` in this group. A verifier
//! therefore authenticates the signer without any certificate, knowing
//! only who the signer claims to be.

use rand::RngCore;
use serde::Serialize;

use crate::crypto::group::GroupParams;
use crate::crypto::ibe::IbePrivateKey;
use crate::crypto::{encode8, sha256, Element, ELEMENT_LEN};
use crate::identity::IdentityString;

/// A signature: the commitment `u` and the response `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IbsSignature {
    /// Commitment element, `r * h1(identity)`.
    pub u: Element,
    /// Response element, `(r + h) * d`.
    pub v: Element,
}

/// The challenge scalar binding a message to a commitment: the first 8
/// bytes of `SHA-256(message || encode8(u))` as a big-endian integer
/// mod `p`.
pub fn message_digest_scalar(params: &GroupParams, message: &[u8], u: Element) -> u64 {
    let mut data = Vec::with_capacity(message.len() + ELEMENT_LEN);
    data.extend_from_slice(message);
    data.extend_from_slice(&encode8(u));
    let digest = sha256(&data);
    let mut prefix = [0u8; ELEMENT_LEN];
    prefix.copy_from_slice(&digest[..ELEMENT_LEN]);
    u64::from_be_bytes(prefix) % params.modulus()
}

/// Signs `message` under the extracted key.
pub fn ibs_sign(
    params: &GroupParams,
    key: &IbePrivateKey,
    message: &[u8],
    rng: &mut impl RngCore,
) -> IbsSignature {
    ibs_sign_with_r(params, key, message, params.random_scalar(rng))
}

/// [`ibs_sign`] with the commitment scalar supplied by the caller, so
/// tests can pin exact signatures.
pub fn ibs_sign_with_r(
    params: &GroupParams,
    key: &IbePrivateKey,
    message: &[u8],
    r: u64,
) -> IbsSignature {
    let q = params.hash_to_element(&key.identity);
    let u = params.scalar_mul(r, q);
    let h = message_digest_scalar(params, message, u);
    let scalar = ((r as u128 + h as u128) % params.modulus() as u128) as u64;
    IbsSignature {
        u,
        v: params.scalar_mul(scalar, key.d),
    }
}

/// Verifies a signature against the claimed signer identity.
pub fn ibs_verify(
    params: &GroupParams,
    mpk: Element,
    identity: &IdentityString,
    message: &[u8],
    sig: &IbsSignature,
) -> bool {
    let q = params.hash_to_element(identity);
    let h = message_digest_scalar(params, message, sig.u);
    let lhs = params.pair(sig.v, params.generator());
    let rhs = params.pair(params.add(sig.u, params.scalar_mul(h, q)), mpk);
    lhs == rhs
}
