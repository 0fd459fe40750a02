//! The serving network: key table, attach sessions, and the
//! warm-path/fallback decision.
//!
//! With a usable identity key for the subscriber's home network, the
//! serving network opens the sealed attach locally, vets the subscriber
//! against its synced revocation cache, and runs the signature-based
//! mutual authentication entirely over the radio link — no home-network
//! round trip. Without one it forwards the sealed attach and falls back
//! to the classic challenge-response exchange.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::actors::aka::Av;
use crate::actors::{key_context, parse_attach_payload, signature_message, ActorError};
use crate::crypto::group::GroupParams;
use crate::crypto::ibe::{ibe_decrypt, ibe_encrypt, IbeCiphertext, IbePrivateKey};
use crate::crypto::ibs::{ibs_sign, ibs_verify, IbsSignature};
use crate::crypto::kdf::{kdf, SessionKey, NONCE_LEN};
use crate::crypto::Element;
use crate::identity::{default_sn_expiry, is_expired, make_identity, ExpiryTime, NetId};
use crate::wire::{Message, RevocationEntry};
use chrono::TimeDelta;

/// One usable home-network key: the extracted key, its expiry, and that
/// authority's public key.
#[derive(Debug, Clone)]
pub struct KeyTableEntry {
    pub key: IbePrivateKey,
    pub et: ExpiryTime,
    pub mpk: Element,
}

/// Attach-session lifecycle. Transitions are forward-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionPhase {
    /// Created; waiting on the home network (fallback path).
    AwaitAttach,
    /// A challenge has been sent to the subscriber.
    Challenged,
    /// Mutual authentication completed; a session key is held.
    Authenticated,
    /// Authentication failed; terminal.
    Failed,
}

impl SessionPhase {
    fn rank(self) -> u8 {
        match self {
            SessionPhase::AwaitAttach => 0,
            SessionPhase::Challenged => 1,
            SessionPhase::Authenticated | SessionPhase::Failed => 2,
        }
    }
}

/// Per-attach state.
#[derive(Debug, Clone)]
pub struct Session {
    pub phase: SessionPhase,
    pub hnid: String,
    /// Service-key expiry named in the attach.
    pub et: ExpiryTime,
    pub imsi: Option<String>,
    pub et_ue: Option<ExpiryTime>,
    pub rand1: Option<[u8; NONCE_LEN]>,
    pub rand2: Option<[u8; NONCE_LEN]>,
    mpk: Option<Element>,
    xres: Option<[u8; 16]>,
    kasme: Option<[u8; 32]>,
    key: Option<SessionKey>,
}

impl Session {
    fn new(hnid: &str, et: ExpiryTime) -> Self {
        Session {
            phase: SessionPhase::AwaitAttach,
            hnid: hnid.to_string(),
            et,
            imsi: None,
            et_ue: None,
            rand1: None,
            rand2: None,
            mpk: None,
            xres: None,
            kasme: None,
            key: None,
        }
    }

    fn advance(&mut self, to: SessionPhase) -> Result<(), ActorError> {
        if to.rank() <= self.phase.rank() {
            return Err(ActorError::BadPhase);
        }
        self.phase = to;
        Ok(())
    }

    /// The session key, present once the phase is `Authenticated`.
    pub fn session_key(&self) -> Option<&SessionKey> {
        self.key.as_ref()
    }
}

/// Session handle.
pub type SessionId = u64;

/// Why an attach was rejected locally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    /// The sealed payload failed to open or parse.
    BadCiphertext,
    /// The subscriber identity is on the synced revocation list.
    Revoked,
    /// The subscriber identity's embedded expiry has passed.
    Expired,
}

impl RejectReason {
    /// Stable label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            RejectReason::BadCiphertext => "bad-ciphertext",
            RejectReason::Revoked => "revoked",
            RejectReason::Expired => "expired",
        }
    }
}

/// The serving network's reaction to an attach request.
#[derive(Debug, Clone)]
pub enum AttachAction {
    /// Warm path: challenge the subscriber directly.
    DirectChallenge {
        session: SessionId,
        challenge: Message,
    },
    /// Fallback path: forward the sealed attach to the home network.
    ForwardToHn {
        session: SessionId,
        request: Message,
    },
    /// Local rejection. No identifying information leaves the serving
    /// network; the subscriber simply receives no challenge.
    Reject { reason: RejectReason },
}

/// Serving network state.
#[derive(Debug, Clone)]
pub struct SnState {
    snid: NetId,
    params: GroupParams,
    key_table: BTreeMap<String, KeyTableEntry>,
    known_mpks: BTreeMap<String, Element>,
    revocation_cache: BTreeMap<String, Vec<RevocationEntry>>,
    sessions: BTreeMap<SessionId, Session>,
    next_session: SessionId,
}

impl SnState {
    pub fn new(snid: NetId, params: GroupParams) -> Self {
        SnState {
            snid,
            params,
            key_table: BTreeMap::new(),
            known_mpks: BTreeMap::new(),
            revocation_cache: BTreeMap::new(),
            sessions: BTreeMap::new(),
            next_session: 1,
        }
    }

    /// This network's id.
    pub fn snid(&self) -> &NetId {
        &self.snid
    }

    /// Records a home network's published authority key. These are public
    /// parameters (every subscriber of that network carries one), so the
    /// serving network is assumed to know them for any home network it
    /// peers with.
    pub fn learn_mpk(&mut self, hnid: &str, mpk: Element) {
        self.known_mpks.insert(hnid.to_string(), mpk);
    }

    /// Installs a home-network key into the key table.
    pub fn install_key(&mut self, hnid: &str, key: IbePrivateKey, et: ExpiryTime, mpk: Element) {
        self.key_table
            .insert(hnid.to_string(), KeyTableEntry { key, et, mpk });
    }

    /// Installs a key delivered in a `SnKeyResponse`, pairing it with the
    /// advertised authority key.
    pub fn install_key_response(&mut self, hnid: &str, msg: &Message) -> Result<(), ActorError> {
        let Message::SnKeyResponse { key, et, mpk } = msg else {
            return Err(ActorError::BadMessage("expected a key response"));
        };
        self.learn_mpk(hnid, *mpk);
        self.install_key(hnid, key.clone(), *et, *mpk);
        Ok(())
    }

    /// The current key-table entry for a home network.
    pub fn key_table_entry(&self, hnid: &str) -> Option<&KeyTableEntry> {
        self.key_table.get(hnid)
    }

    /// The presence announcement, optionally advertising the current
    /// service-key expiry so subscribers need not derive it themselves.
    pub fn broadcast(&self, now: ExpiryTime, include_et: bool) -> Message {
        Message::SnBroadcast {
            snid: self.snid.as_str().to_string(),
            et: include_et.then(|| default_sn_expiry(now)),
        }
    }

    /// Handles an attach request: warm path if a key matching the named
    /// expiry is held and still valid, fallback forwarding otherwise,
    /// local rejection when the payload opens but fails vetting.
    pub fn handle_attach(
        &mut self,
        hnid: &str,
        ct: &IbeCiphertext,
        et: ExpiryTime,
        now: ExpiryTime,
        rng: &mut impl RngCore,
    ) -> AttachAction {
        let usable = self
            .key_table
            .get(hnid)
            .filter(|entry| entry.et == et && !is_expired(entry.et, now))
            .cloned();
        let Some(entry) = usable else {
            let session = self.open_session(Session::new(hnid, et));
            let request = Message::HnAuthRequest {
                snid: self.snid.as_str().to_string(),
                ct: ct.clone(),
                et,
            };
            return AttachAction::ForwardToHn { session, request };
        };

        let Ok(plaintext) = ibe_decrypt(&self.params, &entry.key, ct) else {
            return AttachAction::Reject {
                reason: RejectReason::BadCiphertext,
            };
        };
        let Some((imsi, et_ue, rand1)) = parse_attach_payload(&plaintext) else {
            return AttachAction::Reject {
                reason: RejectReason::BadCiphertext,
            };
        };
        if self.cache_revoked(hnid, &imsi, et_ue) {
            return AttachAction::Reject {
                reason: RejectReason::Revoked,
            };
        }
        if is_expired(et_ue, now) {
            return AttachAction::Reject {
                reason: RejectReason::Expired,
            };
        }

        let mut rand2 = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut rand2);
        let to_sign = signature_message(&imsi, &rand1, &rand2);
        let sig = ibs_sign(&self.params, &entry.key, &to_sign, rng);
        let Ok(ue_identity) = make_identity(&imsi, et_ue) else {
            return AttachAction::Reject {
                reason: RejectReason::BadCiphertext,
            };
        };
        let Ok(enc_rand2) = ibe_encrypt(&self.params, entry.mpk, &ue_identity, &rand2, rng) else {
            return AttachAction::Reject {
                reason: RejectReason::BadCiphertext,
            };
        };

        let mut session = Session::new(hnid, et);
        session.phase = SessionPhase::Challenged;
        session.imsi = Some(imsi);
        session.et_ue = Some(et_ue);
        session.rand1 = Some(rand1);
        session.rand2 = Some(rand2);
        session.mpk = Some(entry.mpk);
        let session = self.open_session(session);
        AttachAction::DirectChallenge {
            session,
            challenge: Message::SnAuthChallenge { sig, enc_rand2 },
        }
    }

    /// Consumes the home network's answer to a forwarded attach: store
    /// the delivered key for later local handling and challenge the
    /// subscriber with the vector.
    pub fn handle_hn_response(
        &mut self,
        session: SessionId,
        av: &Av,
        imsi: &str,
        key: IbePrivateKey,
        et: ExpiryTime,
    ) -> Result<Message, ActorError> {
        let hnid = {
            let sess = self
                .sessions
                .get(&session)
                .ok_or(ActorError::UnknownSession)?;
            if sess.phase != SessionPhase::AwaitAttach {
                return Err(ActorError::BadPhase);
            }
            sess.hnid.clone()
        };
        // The delivered key enables future warm handling, provided the
        // authority's public parameters are known.
        if let Some(mpk) = self.known_mpks.get(&hnid).copied() {
            self.install_key(&hnid, key, et, mpk);
        }
        let sess = self.sessions.get_mut(&session).expect("session checked");
        sess.imsi = Some(imsi.to_string());
        sess.xres = Some(av.xres);
        sess.kasme = Some(av.kasme);
        sess.advance(SessionPhase::Challenged)?;
        Ok(Message::AkaChallenge {
            rand: av.rand,
            autn: av.autn,
        })
    }

    /// Compares the subscriber's challenge response against the expected
    /// value. Returns whether authentication succeeded.
    pub fn handle_aka_response(
        &mut self,
        session: SessionId,
        res: &[u8; 16],
    ) -> Result<bool, ActorError> {
        let sess = self
            .sessions
            .get_mut(&session)
            .ok_or(ActorError::UnknownSession)?;
        if sess.phase != SessionPhase::Challenged {
            return Err(ActorError::BadPhase);
        }
        let xres = sess.xres.ok_or(ActorError::BadPhase)?;
        if *res == xres {
            let kasme = sess.kasme.expect("kasme stored with xres");
            sess.key = Some(SessionKey::from(kasme));
            sess.advance(SessionPhase::Authenticated)?;
            Ok(true)
        } else {
            sess.advance(SessionPhase::Failed)?;
            Ok(false)
        }
    }

    /// Verifies the subscriber's answering signature on the warm path
    /// and, on success, derives the session key.
    pub fn finish(
        &mut self,
        session: SessionId,
        sig: &IbsSignature,
        now: ExpiryTime,
    ) -> Result<(), ActorError> {
        let sess = self
            .sessions
            .get_mut(&session)
            .ok_or(ActorError::UnknownSession)?;
        if sess.phase != SessionPhase::Challenged || sess.xres.is_some() {
            return Err(ActorError::BadPhase);
        }
        let (imsi, et_ue, rand1, rand2, mpk) = match (
            sess.imsi.as_ref(),
            sess.et_ue,
            sess.rand1,
            sess.rand2,
            sess.mpk,
        ) {
            (Some(imsi), Some(et_ue), Some(r1), Some(r2), Some(mpk)) => {
                (imsi.clone(), et_ue, r1, r2, mpk)
            }
            _ => return Err(ActorError::BadPhase),
        };
        if is_expired(sess.et, now) {
            sess.advance(SessionPhase::Failed)?;
            return Err(ActorError::ExpiredIdentity);
        }
        let ue_identity = make_identity(&imsi, et_ue)?;
        let to_verify = signature_message(&imsi, &rand1, &rand2);
        if ibs_verify(&self.params, mpk, &ue_identity, &to_verify, sig) {
            sess.key = Some(kdf(
                &rand1,
                &rand2,
                mpk,
                &key_context(self.snid.as_str(), sess.et),
            ));
            sess.advance(SessionPhase::Authenticated)
        } else {
            sess.advance(SessionPhase::Failed)?;
            Err(ActorError::BadSignature)
        }
    }

    /// Key requests for every table entry expiring within `margin`
    /// (including entries already expired), addressed per home network.
    pub fn renewal_requests(
        &self,
        now: ExpiryTime,
        margin: TimeDelta,
    ) -> Vec<(String, Message)> {
        self.key_table
            .iter()
            .filter(|(_, entry)| entry.et < now.advance(margin))
            .map(|(hnid, _)| {
                (
                    hnid.clone(),
                    Message::SnKeyRequest {
                        snid: self.snid.as_str().to_string(),
                    },
                )
            })
            .collect()
    }

    /// Replaces the cached revocation list for one home network.
    pub fn apply_revocation_sync(&mut self, hnid: &str, entries: Vec<RevocationEntry>) {
        self.revocation_cache.insert(hnid.to_string(), entries);
    }

    /// Drops cached revocation entries whose embedded expiry has passed.
    pub fn prune_revocation_cache(&mut self, now: ExpiryTime) {
        for entries in self.revocation_cache.values_mut() {
            entries.retain(|e| !is_expired(e.et, now));
        }
    }

    /// Cached revocation entries for one home network.
    pub fn revocation_cache(&self, hnid: &str) -> &[RevocationEntry] {
        self.revocation_cache
            .get(hnid)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Looks up a session.
    pub fn session(&self, id: SessionId) -> Option<&Session> {
        self.sessions.get(&id)
    }

    /// The session key, once a session has authenticated.
    pub fn session_key(&self, id: SessionId) -> Option<&SessionKey> {
        self.sessions.get(&id).and_then(|s| s.key.as_ref())
    }

    fn open_session(&mut self, session: Session) -> SessionId {
        let id = self.next_session;
        self.next_session += 1;
        self.sessions.insert(id, session);
        id
    }

    fn cache_revoked(&self, hnid: &str, imsi: &str, et_ue: ExpiryTime) -> bool {
        self.revocation_cache(hnid)
            .iter()
            .any(|e| e.imsi == imsi && e.et == et_ue)
    }
}
