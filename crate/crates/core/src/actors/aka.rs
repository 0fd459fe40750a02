//! Stub of the classic challenge-response key agreement used on the
//! fallback path and by the legacy baseline.
//!
//! The home network and each subscriber share a 16-byte key and a
//! sequence number. The home network builds an authentication vector
//! from a fresh challenge; the subscriber checks the network's MAC and
//! answers with a response the serving network compares against the
//! expected value. All three derivation functions are HMAC-SHA-256 with
//! distinct one-byte domain prefixes — enough to exercise the protocol
//! flow, not a faithful reproduction of the standardized functions.

use crate::crypto::hmac_sha256;
use serde::Serialize;

/// Length of the shared subscriber key.
pub const AKA_KEY_LEN: usize = 16;
/// Sequence numbers occupy 48 bits.
pub const SQN_MAX: u64 = (1 << 48) - 1;

/// An authentication vector: everything the serving network needs to run
/// one challenge-response round without further home-network contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Av {
    /// The random challenge.
    #[serde(with = "crate::wire::hexfmt")]
    pub rand: [u8; 16],
    /// Expected subscriber response (never sent over the air).
    #[serde(with = "crate::wire::hexfmt")]
    pub xres: [u8; 16],
    /// Network authentication token: sequence number plus MAC.
    #[serde(with = "crate::wire::hexfmt")]
    pub autn: [u8; 16],
    /// Session key both sides derive on success.
    #[serde(with = "crate::wire::hexfmt")]
    pub kasme: [u8; 32],
}

/// Network MAC over the challenge and sequence number (f1 analogue).
fn f1(key: &[u8; AKA_KEY_LEN], rand: &[u8; 16], sqn: u64) -> [u8; 10] {
    let mut data = Vec::with_capacity(1 + 16 + 6);
    data.push(0x01);
    data.extend_from_slice(rand);
    data.extend_from_slice(&sqn.to_be_bytes()[2..]);
    let mac = hmac_sha256(key, &data);
    mac[..10].try_into().expect("10 <= 32")
}

/// Subscriber response to a challenge (f2 analogue).
fn f2(key: &[u8; AKA_KEY_LEN], rand: &[u8; 16]) -> [u8; 16] {
    let mut data = Vec::with_capacity(1 + 16);
    data.push(0x02);
    data.extend_from_slice(rand);
    let out = hmac_sha256(key, &data);
    out[..16].try_into().expect("16 <= 32")
}

/// Session-key derivation (f3 analogue).
fn f3(key: &[u8; AKA_KEY_LEN], rand: &[u8; 16]) -> [u8; 32] {
    let mut data = Vec::with_capacity(1 + 16);
    data.push(0x03);
    data.extend_from_slice(rand);
    hmac_sha256(key, &data)
}

/// Builds the authentication vector for one challenge. The sequence
/// number is truncated to its low 48 bits and embedded in `autn`.
pub fn generate_av(key: &[u8; AKA_KEY_LEN], rand: [u8; 16], sqn: u64) -> Av {
    let sqn = sqn & SQN_MAX;
    let mac = f1(key, &rand, sqn);
    let mut autn = [0u8; 16];
    autn[..6].copy_from_slice(&sqn.to_be_bytes()[2..]);
    autn[6..].copy_from_slice(&mac);
    Av {
        rand,
        xres: f2(key, &rand),
        autn,
        kasme: f3(key, &rand),
    }
}

/// Subscriber-side processing of a challenge: recompute the network MAC
/// over the embedded sequence number; on a match return the response and
/// the derived session key, otherwise `None`.
pub fn ue_process_challenge(
    key: &[u8; AKA_KEY_LEN],
    rand: &[u8; 16],
    autn: &[u8; 16],
) -> Option<([u8; 16], [u8; 32])> {
    let mut sqn_bytes = [0u8; 8];
    sqn_bytes[2..].copy_from_slice(&autn[..6]);
    let sqn = u64::from_be_bytes(sqn_bytes);
    if f1(key, rand, sqn) != autn[6..] {
        return None;
    }
    Some((f2(key, rand), f3(key, rand)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> [u8; 16] {
        core::array::from_fn(|i| i as u8)
    }

    fn rand() -> [u8; 16] {
        core::array::from_fn(|i| 16 + i as u8)
    }

    #[test]
    fn vector_matches_frozen_values() {
        // Computed with an independent HMAC implementation of the same
        // construction: key = 00..0f, rand = 10..1f, sqn = 42.
        let av = generate_av(&key(), rand(), 42);
        assert_eq!(hex::encode(av.autn), "00000000002aa2618f5edefd9d69e496");
        assert_eq!(hex::encode(av.xres), "4fb2bbe3f969dc5d06ae9783a0723f5e");
        assert_eq!(
            hex::encode(av.kasme),
            "edbcf176bfb949ad77b14352254f3cc3b3851530fee258deb37e67f5d9dff8bb"
        );
        assert_eq!(av.rand, rand());
    }

    #[test]
    fn honest_round_trip_agrees_on_everything() {
        let av = generate_av(&key(), rand(), 7);
        let (res, kasme) = ue_process_challenge(&key(), &av.rand, &av.autn).unwrap();
        assert_eq!(res, av.xres);
        assert_eq!(kasme, av.kasme);
    }

    #[test]
    fn wrong_subscriber_key_rejects_the_network() {
        let av = generate_av(&key(), rand(), 7);
        let mut other = key();
        other[0] ^= 1;
        assert!(ue_process_challenge(&other, &av.rand, &av.autn).is_none());
    }

    #[test]
    fn tampered_autn_is_rejected() {
        let av = generate_av(&key(), rand(), 7);
        // Flip a sequence-number bit: the MAC no longer covers it.
        let mut autn = av.autn;
        autn[0] ^= 1;
        assert!(ue_process_challenge(&key(), &av.rand, &autn).is_none());
        // Flip a MAC bit.
        let mut autn = av.autn;
        autn[15] ^= 1;
        assert!(ue_process_challenge(&key(), &av.rand, &autn).is_none());
    }

    #[test]
    fn replayed_rand_under_new_sqn_changes_autn_only() {
        let a = generate_av(&key(), rand(), 7);
        let b = generate_av(&key(), rand(), 8);
        assert_ne!(a.autn, b.autn, "sequence number must show up in autn");
        assert_eq!(a.xres, b.xres, "response depends only on rand");
        assert_eq!(a.kasme, b.kasme, "key depends only on rand");
    }

    #[test]
    fn sqn_is_truncated_to_48_bits() {
        let wrapped = generate_av(&key(), rand(), SQN_MAX + 1 + 42);
        let masked = generate_av(&key(), rand(), 42);
        assert_eq!(wrapped.autn, masked.autn);
    }

    #[test]
    fn distinct_rands_give_distinct_keys() {
        let a = generate_av(&key(), rand(), 7);
        let mut r2 = rand();
        r2[0] ^= 1;
        let b = generate_av(&key(), r2, 7);
        assert_ne!(a.kasme, b.kasme);
        assert_ne!(a.xres, b.xres);
    }
}
