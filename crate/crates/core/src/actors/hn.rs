//! The home network: master key authority, subscriber database, and
//! revocation list.
//!
//! The home network owns the master secret. It provisions subscribers
//! with their identity keys, issues serving networks their (daily) keys,
//! answers forwarded attaches from serving networks that hold no usable
//! key, and maintains the revocation list that serving networks sync.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::actors::aka::{generate_av, Av, AKA_KEY_LEN, SQN_MAX};
use crate::actors::ue::UeCredentials;
use crate::actors::{parse_attach_payload, ActorError};
use crate::crypto::group::GroupParams;
use crate::crypto::ibe::{extract, ibe_decrypt, setup, IbeCiphertext, MasterKeyPair};
use crate::crypto::Element;
use crate::identity::{
    default_sn_expiry, is_expired, make_identity, ExpiryTime, Imsi, MncLenMap, NetId,
};
use crate::wire::{Message, RevocationEntry};

/// Per-subscriber long-term state.
#[derive(Debug, Clone)]
pub struct SubscriberRecord {
    /// Shared key for the challenge-response fallback.
    pub aka_key: [u8; AKA_KEY_LEN],
    /// Last sequence number used in an authentication vector.
    pub sqn: u64,
}

/// Home network state.
#[derive(Debug, Clone)]
pub struct HnState {
    hnid: NetId,
    params: GroupParams,
    master: MasterKeyPair,
    mnc_len_map: MncLenMap,
    subscribers: BTreeMap<String, SubscriberRecord>,
    revocations: Vec<RevocationEntry>,
    issued_sn_keys: BTreeMap<String, ExpiryTime>,
}

impl HnState {
    /// Creates a home network with a fresh master key pair.
    pub fn new(
        hnid: NetId,
        params: GroupParams,
        mnc_len_map: MncLenMap,
        rng: &mut impl RngCore,
    ) -> Self {
        HnState {
            hnid,
            params,
            master: setup(&params, rng),
            mnc_len_map,
            subscribers: BTreeMap::new(),
            revocations: Vec::new(),
            issued_sn_keys: BTreeMap::new(),
        }
    }

    /// This network's id.
    pub fn hnid(&self) -> &NetId {
        &self.hnid
    }

    /// The published authority public key.
    pub fn mpk(&self) -> Element {
        self.master.mpk
    }

    /// The group parameters in force.
    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    /// Current revocation list.
    pub fn revocations(&self) -> &[RevocationEntry] {
        &self.revocations
    }

    /// Expiry of the most recent key issued to `snid`, if any.
    pub fn issued_sn_key_expiry(&self, snid: &str) -> Option<ExpiryTime> {
        self.issued_sn_keys.get(snid).copied()
    }

    /// Registers a subscriber and hands back everything their equipment
    /// stores: the authority public key, the identity key for
    /// `imsi || et_ue`, and a fresh challenge-response key. Provisioning
    /// the same subscriber again re-derives the same identity key (key
    /// extraction is deterministic) but rotates the challenge-response
    /// key.
    pub fn provision_ue(
        &mut self,
        imsi: &Imsi,
        et_ue: ExpiryTime,
        rng: &mut impl RngCore,
    ) -> Result<UeCredentials, ActorError> {
        if imsi.hnid() != self.hnid {
            return Err(ActorError::ForeignSubscriber {
                imsi: imsi.digits(),
                expected: self.hnid.as_str().to_string(),
                actual: imsi.hnid().as_str().to_string(),
            });
        }
        let identity = make_identity(&imsi.digits(), et_ue)?;
        let d_ue = extract(&self.params, self.master.msk, &identity);
        let mut aka_key = [0u8; AKA_KEY_LEN];
        rng.fill_bytes(&mut aka_key);
        self.subscribers
            .insert(imsi.digits(), SubscriberRecord { aka_key, sqn: 0 });
        Ok(UeCredentials {
            imsi: imsi.clone(),
            mpk: self.master.mpk,
            d_ue,
            et_ue,
            aka_key,
        })
    }

    /// Issues a serving network its identity key, valid until the end of
    /// the current day.
    pub fn issue_sn_key(&mut self, snid: &NetId, now: ExpiryTime) -> Result<Message, ActorError> {
        let et = default_sn_expiry(now);
        let identity = make_identity(snid.as_str(), et)?;
        let key = extract(&self.params, self.master.msk, &identity);
        self.issued_sn_keys
            .insert(snid.as_str().to_string(), et);
        Ok(Message::SnKeyResponse {
            key,
            et,
            mpk: self.master.mpk,
        })
    }

    /// Handles a forwarded attach from a serving network that had no
    /// usable key: re-derive that network's key, open the sealed payload,
    /// vet the subscriber, and answer with an authentication vector, the
    /// subscriber identity, and the serving network's key.
    pub fn handle_auth_request(
        &mut self,
        snid_raw: &str,
        ct: &IbeCiphertext,
        et: ExpiryTime,
        now: ExpiryTime,
        rng: &mut impl RngCore,
    ) -> Result<Message, ActorError> {
        let snid = NetId::parse(snid_raw)?;
        let identity = make_identity(snid.as_str(), et)?;
        let d_snid = extract(&self.params, self.master.msk, &identity);
        let plaintext = ibe_decrypt(&self.params, &d_snid, ct)?;
        let (imsi, et_ue, _rand1) =
            parse_attach_payload(&plaintext).ok_or(ActorError::BadMessage("attach payload"))?;
        if self.is_revoked(&imsi, et_ue) {
            return Err(ActorError::RevokedSubscriber);
        }
        if is_expired(et_ue, now) {
            return Err(ActorError::ExpiredIdentity);
        }
        let record = self
            .subscribers
            .get_mut(&imsi)
            .ok_or(ActorError::UnknownSubscriber)?;
        record.sqn = (record.sqn + 1) & SQN_MAX;
        let mut rand = [0u8; 16];
        rng.fill_bytes(&mut rand);
        let av = generate_av(&record.aka_key, rand, record.sqn);
        self.issued_sn_keys
            .insert(snid.as_str().to_string(), et);
        Ok(Message::HnAuthResponse {
            av,
            imsi,
            key: d_snid,
            et,
        })
    }

    /// Adds a subscriber identity to the revocation list. Idempotent.
    /// Serves an authentication vector for a subscriber named in the
    /// clear — the pre-upgrade path, where the serving network simply
    /// relays the permanent identity.
    pub fn legacy_av(&mut self, imsi_digits: &str, rng: &mut impl RngCore) -> Result<Av, ActorError> {
        let record = self
            .subscribers
            .get_mut(imsi_digits)
            .ok_or(ActorError::UnknownSubscriber)?;
        record.sqn = (record.sqn + 1) & SQN_MAX;
        let mut rand = [0u8; 16];
        rng.fill_bytes(&mut rand);
        Ok(generate_av(&record.aka_key, rand, record.sqn))
    }

    pub fn revoke_ue(&mut self, imsi_digits: &str, et: ExpiryTime) {
        let entry = RevocationEntry {
            imsi: imsi_digits.to_string(),
            et,
        };
        if !self.revocations.contains(&entry) {
            self.revocations.push(entry);
        }
    }

    /// Whether the identity `imsi || et` is currently revoked.
    pub fn is_revoked(&self, imsi: &str, et: ExpiryTime) -> bool {
        self.revocations
            .iter()
            .any(|e| e.imsi == imsi && e.et == et)
    }

    /// Drops revocation entries whose embedded expiry has passed: a key
    /// for an expired identity is useless, so the entry no longer needs
    /// to be carried.
    pub fn prune_revocations(&mut self, now: ExpiryTime) {
        self.revocations.retain(|e| !is_expired(e.et, now));
    }

    /// The current revocation list as a sync message for serving
    /// networks.
    pub fn revocation_sync_message(&self) -> Message {
        Message::RevocationSync {
            entries: self.revocations.clone(),
        }
    }

    /// The MNC-length table used when parsing subscriber identities.
    pub fn mnc_len_map(&self) -> &MncLenMap {
        &self.mnc_len_map
    }
}
