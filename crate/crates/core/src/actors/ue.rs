//! The subscriber: sealed attach, challenge verification, and key
//! derivation.
//!
//! The subscriber never puts its permanent identity on the radio link in
//! the clear. It seals identity, identity expiry, and a fresh nonce to
//! the serving network's time-scoped identity, then authenticates the
//! network by verifying a signature bound to both nonces before
//! answering with its own.

use rand::RngCore;

use crate::actors::aka::ue_process_challenge;
use crate::actors::{encode_attach_payload, key_context, signature_message};
use crate::crypto::group::GroupParams;
use crate::crypto::ibe::{ibe_decrypt, ibe_encrypt, IbePrivateKey};
use crate::crypto::ibs::{ibs_sign, ibs_verify};
use crate::crypto::kdf::{kdf, SessionKey, NONCE_LEN};
use crate::crypto::Element;
use crate::identity::{default_sn_expiry, make_identity, ExpiryTime, Imsi};
use crate::wire::Message;

/// Everything a subscriber is provisioned with at enrollment.
#[derive(Debug, Clone)]
pub struct UeCredentials {
    pub imsi: Imsi,
    /// Home network's published authority key.
    pub mpk: Element,
    /// Identity key for `imsi || et_ue`.
    pub d_ue: IbePrivateKey,
    pub et_ue: ExpiryTime,
    /// Long-term symmetric key for the classic challenge-response path.
    pub aka_key: [u8; 16],
}

/// Why the subscriber walked away from an exchange.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UeAbort {
    #[error("no attach in progress")]
    NotAttached,
    #[error("unexpected message: {0}")]
    BadMessage(&'static str),
    #[error("challenge ciphertext failed to open")]
    BadChallengeCiphertext,
    #[error("invalid serving-network signature")]
    InvalidNetworkSignature,
    #[error("authentication token verification failed")]
    BadAutn,
}

#[derive(Debug, Clone)]
struct PendingAttach {
    rand1: [u8; NONCE_LEN],
    et: ExpiryTime,
    snid: String,
}

/// Subscriber state.
#[derive(Debug, Clone)]
pub struct UeState {
    creds: UeCredentials,
    params: GroupParams,
    pending: Option<PendingAttach>,
    session_key: Option<SessionKey>,
}

impl UeState {
    pub fn new(params: GroupParams, creds: UeCredentials) -> Self {
        UeState {
            creds,
            params,
            pending: None,
            session_key: None,
        }
    }

    pub fn imsi(&self) -> &Imsi {
        &self.creds.imsi
    }

    pub fn creds(&self) -> &UeCredentials {
        &self.creds
    }

    /// The derived session key, once authentication has completed.
    pub fn session_key(&self) -> Option<&SessionKey> {
        self.session_key.as_ref()
    }

    /// Forgets any in-progress attach and derived key.
    pub fn reset(&mut self) {
        self.pending = None;
        self.session_key = None;
    }

    /// Answers a presence announcement with a sealed attach request.
    ///
    /// The destination identity is the announced network id scoped to the
    /// advertised key expiry (or, absent one, to end-of-day — the default
    /// schedule both sides share).
    pub fn attach(
        &mut self,
        broadcast: &Message,
        now: ExpiryTime,
        rng: &mut impl RngCore,
    ) -> Result<Message, UeAbort> {
        let Message::SnBroadcast { snid, et } = broadcast else {
            return Err(UeAbort::BadMessage("expected a presence announcement"));
        };
        let et = et.unwrap_or_else(|| default_sn_expiry(now));
        let sn_identity =
            make_identity(snid, et).map_err(|_| UeAbort::BadMessage("malformed network id"))?;
        let mut rand1 = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut rand1);
        let payload = encode_attach_payload(&self.creds.imsi.digits(), self.creds.et_ue, &rand1);
        let ct = ibe_encrypt(&self.params, self.creds.mpk, &sn_identity, &payload, rng)
            .map_err(|_| UeAbort::BadMessage("attach payload could not be sealed"))?;
        self.session_key = None;
        self.pending = Some(PendingAttach {
            rand1,
            et,
            snid: snid.clone(),
        });
        Ok(Message::AttachRequest {
            hnid: self.creds.imsi.hnid().as_str().to_string(),
            ct,
            et,
        })
    }

    /// The pre-upgrade attach: the permanent identity in the clear.
    pub fn legacy_attach(&self) -> Message {
        Message::LegacyAttach {
            imsi: self.creds.imsi.digits(),
        }
    }

    /// Verifies the serving network's challenge and, if genuine, answers
    /// it and derives the session key. Any failure abandons the attach.
    pub fn handle_challenge(
        &mut self,
        msg: &Message,
        rng: &mut impl RngCore,
    ) -> Result<Message, UeAbort> {
        if self.pending.is_none() {
            return Err(UeAbort::NotAttached);
        }
        let Message::SnAuthChallenge { sig, enc_rand2 } = msg else {
            return Err(self.abort(UeAbort::BadMessage("expected an auth challenge")));
        };
        let plain = match ibe_decrypt(&self.params, &self.creds.d_ue, enc_rand2) {
            Ok(plain) => plain,
            Err(_) => return Err(self.abort(UeAbort::BadChallengeCiphertext)),
        };
        let Ok(rand2) = <[u8; NONCE_LEN]>::try_from(plain.as_slice()) else {
            return Err(self.abort(UeAbort::BadChallengeCiphertext));
        };
        let pending = self.pending.as_ref().expect("pending checked above");
        let Ok(sn_identity) = make_identity(&pending.snid, pending.et) else {
            return Err(self.abort(UeAbort::BadMessage("malformed network id")));
        };
        let to_verify = signature_message(&self.creds.imsi.digits(), &pending.rand1, &rand2);
        if !ibs_verify(
            &self.params,
            self.creds.mpk,
            &sn_identity,
            &to_verify,
            sig,
        ) {
            return Err(self.abort(UeAbort::InvalidNetworkSignature));
        }
        let response = ibs_sign(&self.params, &self.creds.d_ue, &to_verify, rng);
        self.session_key = Some(kdf(
            &pending.rand1,
            &rand2,
            self.creds.mpk,
            &key_context(&pending.snid, pending.et),
        ));
        self.pending = None;
        Ok(Message::UeAuthResponse { sig: response })
    }

    /// Processes a classic challenge; the token authenticates the home
    /// network, so this path needs no prior sealed attach.
    pub fn handle_aka_challenge(&mut self, msg: &Message) -> Result<Message, UeAbort> {
        let Message::AkaChallenge { rand, autn } = msg else {
            return Err(self.abort(UeAbort::BadMessage("expected a classic challenge")));
        };
        match ue_process_challenge(&self.creds.aka_key, rand, autn) {
            Some((res, kasme)) => {
                self.session_key = Some(SessionKey::from(kasme));
                self.pending = None;
                Ok(Message::AkaResponse { res })
            }
            None => Err(self.abort(UeAbort::BadAutn)),
        }
    }

    fn abort(&mut self, why: UeAbort) -> UeAbort {
        self.pending = None;
        why
    }
}
