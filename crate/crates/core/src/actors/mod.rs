//! Protocol actors: home network, serving network, and subscriber
//! equipment, plus the classic key-agreement fallback they share.
//!
//! Actors are plain state machines: every method takes explicit time and
//! randomness, returns the messages to transmit, and never touches the
//! network itself. The simulation layer owns delivery and logging.

pub mod aka;
pub mod hn;
pub mod sn;
pub mod ue;

use thiserror::Error;

use crate::crypto::kdf::NONCE_LEN;
use crate::crypto::CryptoError;
use crate::identity::{ExpiryTime, IdentityError, ET_TEXT_LEN, IDENTITY_SEPARATOR};

/// Errors raised by actor state machines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActorError {
    /// A subscriber was presented to the wrong home network.
    #[error("subscriber {imsi} belongs to {actual}, not {expected}")]
    ForeignSubscriber {
        imsi: String,
        expected: String,
        actual: String,
    },
    /// The recovered subscriber identity is not in the subscriber table.
    #[error("unknown subscriber")]
    UnknownSubscriber,
    /// The recovered subscriber identity is on the revocation list.
    #[error("subscriber identity is revoked")]
    RevokedSubscriber,
    /// The presented identity's embedded expiry has passed.
    #[error("identity expired")]
    ExpiredIdentity,
    /// A cryptographic operation rejected its input.
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    /// An identifier failed validation.
    #[error(transparent)]
    Identity(#[from] IdentityError),
    /// A message had the wrong shape for the current step.
    #[error("unexpected message: {0}")]
    BadMessage(&'static str),
    /// The referenced session does not exist.
    #[error("unknown session")]
    UnknownSession,
    /// The session is not in a phase that allows this step.
    #[error("session in wrong phase")]
    BadPhase,
    /// A signature failed verification.
    #[error("signature verification failed")]
    BadSignature,
}

/// Builds the sealed attach payload: `imsi || "||" || et_ue || rand1`,
/// with the expiry in canonical text and the nonce raw.
pub(crate) fn encode_attach_payload(
    imsi_digits: &str,
    et_ue: ExpiryTime,
    rand1: &[u8; NONCE_LEN],
) -> Vec<u8> {
    let mut out = Vec::with_capacity(imsi_digits.len() + 2 + ET_TEXT_LEN + NONCE_LEN);
    out.extend_from_slice(imsi_digits.as_bytes());
    out.extend_from_slice(IDENTITY_SEPARATOR.as_bytes());
    out.extend_from_slice(et_ue.text().as_bytes());
    out.extend_from_slice(rand1);
    out
}

/// Parses the sealed attach payload back into its parts. Returns `None`
/// for any structural mismatch.
pub(crate) fn parse_attach_payload(
    bytes: &[u8],
) -> Option<(String, ExpiryTime, [u8; NONCE_LEN])> {
    let text_len = bytes.len().checked_sub(NONCE_LEN)?;
    let text = std::str::from_utf8(&bytes[..text_len]).ok()?;
    let (imsi, et_text) = text.split_once(IDENTITY_SEPARATOR)?;
    if imsi.is_empty() || !imsi.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let et_ue = ExpiryTime::parse(et_text).ok()?;
    let rand1: [u8; NONCE_LEN] = bytes[text_len..].try_into().ok()?;
    Some((imsi.to_string(), et_ue, rand1))
}

/// The byte string both sides sign: `imsi || rand1 || rand2`.
pub(crate) fn signature_message(
    imsi_digits: &str,
    rand1: &[u8; NONCE_LEN],
    rand2: &[u8; NONCE_LEN],
) -> Vec<u8> {
    let mut out = Vec::with_capacity(imsi_digits.len() + 2 * NONCE_LEN);
    out.extend_from_slice(imsi_digits.as_bytes());
    out.extend_from_slice(rand1);
    out.extend_from_slice(rand2);
    out
}

/// Session-key derivation context: the serving network id and the
/// service-key expiry, which both sides know identically.
pub(crate) fn key_context(snid: &str, et: ExpiryTime) -> Vec<u8> {
    let mut out = Vec::with_capacity(snid.len() + ET_TEXT_LEN);
    out.extend_from_slice(snid.as_bytes());
    out.extend_from_slice(et.text().as_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn et(text: &str) -> ExpiryTime {
        ExpiryTime::parse(text).unwrap()
    }

    #[test]
    fn attach_payload_round_trips() {
        let rand1 = [0xAB; 16];
        let payload = encode_attach_payload("244051234567", et("20270101T000000Z"), &rand1);
        let (imsi, et_ue, r) = parse_attach_payload(&payload).unwrap();
        assert_eq!(imsi, "244051234567");
        assert_eq!(et_ue, et("20270101T000000Z"));
        assert_eq!(r, rand1);
    }

    #[test]
    fn attach_payload_rejects_mangled_inputs() {
        assert!(parse_attach_payload(b"short").is_none(), "below nonce length");
        assert!(
            parse_attach_payload(b"24405123456720270101T000000Z0123456789abcdef").is_none(),
            "missing separator"
        );
        let mut no_digits = encode_attach_payload("244051234567", et("20270101T000000Z"), &[0; 16]);
        no_digits[0] = b'x';
        assert!(parse_attach_payload(&no_digits).is_none(), "non-digit imsi");
        let mut bad_et = encode_attach_payload("244051234567", et("20270101T000000Z"), &[0; 16]);
        let et_start = "244051234567||".len();
        bad_et[et_start] = b'x';
        assert!(parse_attach_payload(&bad_et).is_none(), "mangled expiry");
    }

    #[test]
    fn signature_message_is_order_sensitive() {
        let a = signature_message("244051234567", &[1; 16], &[2; 16]);
        let b = signature_message("244051234567", &[2; 16], &[1; 16]);
        assert_ne!(a, b);
        assert_eq!(a.len(), 12 + 32);
    }

    #[test]
    fn key_context_concatenates_id_and_expiry() {
        assert_eq!(
            key_context("24405", et("20250101T235959Z")),
            b"2440520250101T235959Z".to_vec()
        );
    }
}
