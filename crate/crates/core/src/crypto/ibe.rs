//! Identity-based encryption over the toy group.
//!
//! A master authority publishes `mpk = msk * g` and can extract, for any
//! identity string, the private key `d = msk * h1(identity)`. Encryption
//! needs only `mpk` and the recipient's identity — no per-recipient
//! certificate or key exchange — and produces a KEM/DEM hybrid
//! ciphertext: an ephemeral element `u = r * g`, a keystream-encrypted
//! body, and an integrity tag.
//!
//! Correctness rests on the two shared-secret computations agreeing:
//! the sender forms `r * pair(h1(id), mpk)` and the holder of `d` forms
//! `pair(d, u)`; both equal `r * msk * h1(id)` in this group.

use rand::RngCore;
use serde::Serialize;

use crate::crypto::group::GroupParams;
use crate::crypto::{dem_open, dem_seal, CryptoError, Element, TAG_LEN};
use crate::identity::{ExpiryTime, IdentityString};

/// Master key material for an identity-based authority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterKeyPair {
    /// Master secret scalar.
    pub msk: u64,
    /// Master public key, `msk * g`.
    pub mpk: Element,
}

impl MasterKeyPair {
    /// Builds the pair from a known master secret (used by tests and by
    /// deterministic re-derivation; normal setup goes through [`setup`]).
    pub fn from_msk(params: &GroupParams, msk: u64) -> Self {
        MasterKeyPair {
            msk,
            mpk: params.scalar_mul(msk, params.generator()),
        }
    }
}

/// Generates a fresh master key pair.
pub fn setup(params: &GroupParams, rng: &mut impl RngCore) -> MasterKeyPair {
    MasterKeyPair::from_msk(params, params.random_scalar(rng))
}

/// A private key extracted for one identity string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IbePrivateKey {
    /// The identity the key was extracted for.
    pub identity: IdentityString,
    /// The key element, `msk * h1(identity)`.
    pub d: Element,
    /// Convenience copy of the expiry embedded in the identity.
    pub expiry: ExpiryTime,
}

/// Extracts the private key for `identity`. Extraction is deterministic:
/// the same master secret and identity always yield the same key.
pub fn extract(params: &GroupParams, msk: u64, identity: &IdentityString) -> IbePrivateKey {
    let q = params.hash_to_element(identity);
    IbePrivateKey {
        d: params.scalar_mul(msk, q),
        expiry: identity.expiry(),
        identity: identity.clone(),
    }
}

/// A hybrid ciphertext addressed to one identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IbeCiphertext {
    /// Ephemeral KEM element, `r * g`.
    pub u: Element,
    /// Keystream-encrypted payload.
    #[serde(with = "crate::wire::hexfmt")]
    pub body: Vec<u8>,
    /// Integrity tag over `u` and the body.
    #[serde(with = "crate::wire::hexfmt")]
    pub tag: [u8; TAG_LEN],
}

/// Encrypts `plaintext` to `identity` under the authority `mpk`.
pub fn ibe_encrypt(
    params: &GroupParams,
    mpk: Element,
    identity: &IdentityString,
    plaintext: &[u8],
    rng: &mut impl RngCore,
) -> Result<IbeCiphertext, CryptoError> {
    ibe_encrypt_with_r(params, mpk, identity, plaintext, params.random_scalar(rng))
}

/// [`ibe_encrypt`] with the ephemeral scalar supplied by the caller, so
/// tests can pin exact ciphertexts.
pub fn ibe_encrypt_with_r(
    params: &GroupParams,
    mpk: Element,
    identity: &IdentityString,
    plaintext: &[u8],
    r: u64,
) -> Result<IbeCiphertext, CryptoError> {
    let u = params.scalar_mul(r, params.generator());
    let q = params.hash_to_element(identity);
    let shared = params.scalar_mul(r, params.pair(q, mpk));
    let (body, tag) = dem_seal(shared, u, plaintext)?;
    Ok(IbeCiphertext { u, body, tag })
}

/// Decrypts a ciphertext with the recipient's extracted key.
pub fn ibe_decrypt(
    params: &GroupParams,
    key: &IbePrivateKey,
    ct: &IbeCiphertext,
) -> Result<Vec<u8>, CryptoError> {
    let shared = params.pair(key.d, ct.u);
    dem_open(shared, ct.u, &ct.body, &ct.tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::make_identity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn small() -> GroupParams {
        GroupParams::new(101).unwrap()
    }

    fn id(base: &str) -> IdentityString {
        make_identity(base, ExpiryTime::parse("20250101T000000Z").unwrap()).unwrap()
    }

    /// Identity whose hash lands on 13 mod 101 (found by search), giving
    /// small worked values for the fixed-scalar tests below.
    fn id13() -> IdentityString {
        let who = id("00084");
        assert_eq!(small().hash_to_element(&who), Element(13));
        who
    }

    #[test]
    fn setup_derives_mpk_from_msk() {
        let params = small();
        let kp = MasterKeyPair::from_msk(&params, 7);
        assert_eq!(kp.mpk, Element(7));
        let big = GroupParams::default();
        let kp = MasterKeyPair::from_msk(&big, 123456789);
        assert_eq!(kp.mpk, Element(123456789));
    }

    #[test]
    fn setup_is_seed_stable() {
        let params = GroupParams::default();
        let kp1 = setup(&params, &mut ChaCha20Rng::seed_from_u64(42));
        let kp2 = setup(&params, &mut ChaCha20Rng::seed_from_u64(42));
        assert_eq!(kp1, kp2);
        // Regression pin: the exact value drawn from the seed-42 stream.
        assert_eq!(kp1.msk, 1185316975031003407);
        assert_eq!(kp1.mpk.0, kp1.msk);
        let kp3 = setup(&params, &mut ChaCha20Rng::seed_from_u64(43));
        assert_ne!(kp1, kp3);
    }

    #[test]
    fn extract_matches_worked_example() {
        let key = extract(&small(), 7, &id13());
        assert_eq!(key.d, Element(91)); // 7 * 13 mod 101
        assert_eq!(key.expiry, id13().expiry());
        assert_eq!(key.identity, id13());
    }

    #[test]
    fn extract_is_deterministic_and_identity_sensitive() {
        let params = GroupParams::default();
        let a = extract(&params, 987654321, &id("244051234567"));
        let b = extract(&params, 987654321, &id("244051234567"));
        assert_eq!(a, b);
        let c = extract(&params, 987654321, &id("244051234568"));
        assert_ne!(a.d, c.d);
    }

    #[test]
    fn encrypt_with_fixed_scalar_matches_worked_example() {
        let params = small();
        let ct = ibe_encrypt_with_r(&params, Element(7), &id13(), b"hi", 5).unwrap();
        assert_eq!(ct.u, Element(5));
        // The shared secret must be 5 * (13 * 7) = 455 = 51 mod 101; pin it
        // by recomputing the sealed bytes from that value directly.
        let (body, tag) = crate::crypto::dem_seal(Element(51), Element(5), b"hi").unwrap();
        assert_eq!(ct.body, body);
        assert_eq!(ct.tag, tag);
        // And the extracted key must agree from the other side.
        let key = extract(&params, 7, &id13());
        assert_eq!(ibe_decrypt(&params, &key, &ct).unwrap(), b"hi");
    }

    #[test]
    fn round_trips_at_default_modulus() {
        let params = GroupParams::default();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let kp = setup(&params, &mut rng);
        let who = id("244051234567");
        let key = extract(&params, kp.msk, &who);
        for len in [0usize, 1, 31, 32, 33, 400] {
            let plaintext = vec![0x5a; len];
            let ct = ibe_encrypt(&params, kp.mpk, &who, &plaintext, &mut rng).unwrap();
            assert_eq!(ibe_decrypt(&params, &key, &ct).unwrap(), plaintext);
        }
    }

    #[test]
    fn same_plaintext_encrypts_differently_across_draws() {
        let params = GroupParams::default();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let kp = setup(&params, &mut rng);
        let who = id("244051234567");
        let a = ibe_encrypt(&params, kp.mpk, &who, b"payload", &mut rng).unwrap();
        let b = ibe_encrypt(&params, kp.mpk, &who, b"payload", &mut rng).unwrap();
        assert_ne!(a.u, b.u);
        assert_ne!(a.body, b.body);
    }

    #[test]
    fn wrong_identity_key_fails_to_decrypt() {
        let params = GroupParams::default();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let kp = setup(&params, &mut rng);
        let ct = ibe_encrypt(&params, kp.mpk, &id("244051234567"), b"secret", &mut rng).unwrap();
        for n in 0..100u32 {
            let other = extract(&params, kp.msk, &id(&format!("{:012}", n)));
            assert_eq!(
                ibe_decrypt(&params, &other, &ct),
                Err(CryptoError::IntegrityFailure),
                "key for wrong identity {n} must not decrypt"
            );
        }
    }

    #[test]
    fn tampered_ciphertext_is_rejected() {
        let params = GroupParams::default();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let kp = setup(&params, &mut rng);
        let who = id("244051234567");
        let key = extract(&params, kp.msk, &who);
        let ct = ibe_encrypt(&params, kp.mpk, &who, b"secret", &mut rng).unwrap();

        let mut bad = ct.clone();
        bad.body[0] ^= 1;
        assert_eq!(
            ibe_decrypt(&params, &key, &bad),
            Err(CryptoError::IntegrityFailure)
        );
        let mut bad = ct.clone();
        bad.tag[0] ^= 1;
        assert_eq!(
            ibe_decrypt(&params, &key, &bad),
            Err(CryptoError::IntegrityFailure)
        );
        let mut bad = ct;
        bad.u = params.add(bad.u, Element(1));
        assert_eq!(
            ibe_decrypt(&params, &key, &bad),
            Err(CryptoError::IntegrityFailure)
        );
    }

    #[test]
    fn oversized_plaintext_is_rejected() {
        let params = GroupParams::default();
        let big = vec![0u8; crate::crypto::MAX_PLAINTEXT_LEN + 1];
        let err = ibe_encrypt_with_r(&params, Element(7), &id("24405"), &big, 5).unwrap_err();
        assert!(matches!(err, CryptoError::PlaintextTooLong(_)));
    }
}
