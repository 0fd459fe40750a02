//! Adversary models: a passive radio-link observer and an active
//! network impersonator.
//!
//! Both work only with what the radio link actually carries. The passive
//! observer scans logged cleartext fields; the impersonator transmits
//! real messages through the simulated link and is bounded in how many
//! key guesses it may try against a sealed attach.

use rand::RngCore;
use serde::Serialize;

use crate::actors::ue::UeState;
use crate::actors::{key_context, parse_attach_payload, signature_message};
use crate::crypto::group::GroupParams;
use crate::crypto::ibe::{extract, ibe_decrypt, ibe_encrypt, IbePrivateKey};
use crate::crypto::ibs::{ibs_sign, ibs_verify};
use crate::crypto::kdf::{kdf, NONCE_LEN};
use crate::crypto::Element;
use crate::identity::{is_expired, make_identity, ExpiryTime, NetId};
use crate::netsim::{SimNetwork, BROADCAST_RECEIVER};
use crate::wire::{Interface, Message, TranscriptEntry};

pub use crate::actors::sn::KeyTableEntry;

/// Key guesses the bounded impersonator may spend per sealed attach.
pub const DEFAULT_MAX_DECRYPT_ATTEMPTS: u32 = 1000;

/// What an attacker ended up with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackOutcome {
    pub attacker: String,
    /// Did any registered permanent identity become readable?
    pub learned_imsi: bool,
    /// Did a home-network id become readable? (It rides in the clear by
    /// design — it is the routing label.)
    pub learned_hnid: bool,
    /// Did the subscriber complete authentication with the attacker?
    pub auth_completed: bool,
    /// Sealed-attach key guesses spent.
    pub decrypt_attempts: u32,
    /// The subscriber's stated reason for walking away, if it did.
    pub ue_abort: Option<String>,
}

impl AttackOutcome {
    fn new(attacker: &str) -> Self {
        AttackOutcome {
            attacker: attacker.to_string(),
            learned_imsi: false,
            learned_hnid: false,
            auth_completed: false,
            decrypt_attempts: 0,
            ue_abort: None,
        }
    }
}

/// Passive observer: reads every radio-link transmission but only its
/// cleartext fields, and reports whether any registered identity or any
/// home-network id appeared.
pub fn pic_observe(
    transcript: &[TranscriptEntry],
    imsis: &[String],
    hnids: &[String],
) -> AttackOutcome {
    let mut outcome = AttackOutcome::new("pic");
    for entry in transcript.iter().filter(|e| e.interface == Interface::Air) {
        if imsis
            .iter()
            .any(|imsi| entry.decoded.cleartext_contains(imsi.as_bytes()))
        {
            outcome.learned_imsi = true;
        }
        if hnids
            .iter()
            .any(|hnid| entry.decoded.cleartext_contains(hnid.as_bytes()))
        {
            outcome.learned_hnid = true;
        }
    }
    outcome
}

/// Prior knowledge a targeted impersonator may hold about its victim.
#[derive(Debug, Clone)]
pub struct AttackHint {
    pub imsi: String,
    pub et_ue: ExpiryTime,
}

/// Active impersonator: announces a network id of its choosing and tries
/// to walk a genuine subscriber through an attach.
#[derive(Debug, Clone)]
pub struct Aic {
    pub id: String,
    pub snid: NetId,
    params: GroupParams,
    /// The victim's home-network authority key (a public parameter).
    hn_mpk: Element,
    /// A genuinely issued service key, for the compromised-network
    /// variant. `None` models an outside impersonator.
    pub granted: Option<KeyTableEntry>,
    pub max_decrypt_attempts: u32,
}

impl Aic {
    pub fn new(id: &str, snid: NetId, params: GroupParams, hn_mpk: Element) -> Self {
        Aic {
            id: id.to_string(),
            snid,
            params,
            hn_mpk,
            granted: None,
            max_decrypt_attempts: DEFAULT_MAX_DECRYPT_ATTEMPTS,
        }
    }

    pub fn with_granted(mut self, entry: KeyTableEntry) -> Self {
        self.granted = Some(entry);
        self
    }

    /// Runs one impersonation attempt against a genuine subscriber. All
    /// legs travel through the simulated radio link.
    pub fn run(
        &self,
        net: &mut SimNetwork,
        ue: &mut UeState,
        ue_name: &str,
        hint: Option<&AttackHint>,
    ) -> AttackOutcome {
        let mut outcome = AttackOutcome::new(&self.id);
        let now = net.clock.now();

        let bc = Message::SnBroadcast {
            snid: self.snid.as_str().to_string(),
            et: None,
        };
        net.send(Interface::Air, &self.id, BROADCAST_RECEIVER, bc.clone())
            .expect("broadcast encodes");
        let attach = match ue.attach(&bc, now, &mut net.rng) {
            Ok(msg) => msg,
            Err(abort) => {
                outcome.ue_abort = Some(abort.to_string());
                return outcome;
            }
        };
        net.send(Interface::Air, ue_name, &self.id, attach.clone())
            .expect("attach encodes");
        let Message::AttachRequest { hnid: _, ct, et } = attach else {
            return outcome;
        };
        outcome.learned_hnid = true;

        // First the key actually granted (if any), then bounded guessing.
        let mut opened: Option<(String, ExpiryTime, [u8; NONCE_LEN])> = None;
        if let Some(granted) = &self.granted {
            if granted.et == et && !is_expired(granted.et, now) {
                outcome.decrypt_attempts += 1;
                if let Ok(plain) = ibe_decrypt(&self.params, &granted.key, &ct) {
                    opened = parse_attach_payload(&plain);
                }
            }
        }
        if opened.is_none() {
            let Ok(sn_identity) = make_identity(self.snid.as_str(), et) else {
                return outcome;
            };
            let budget = self.max_decrypt_attempts.saturating_sub(outcome.decrypt_attempts);
            for guess in 1..=u64::from(budget) {
                outcome.decrypt_attempts += 1;
                let candidate = IbePrivateKey {
                    identity: sn_identity.clone(),
                    d: Element(guess % self.params.modulus()),
                    expiry: et,
                };
                if let Ok(plain) = ibe_decrypt(&self.params, &candidate, &ct) {
                    if let Some(parsed) = parse_attach_payload(&plain) {
                        opened = Some(parsed);
                        break;
                    }
                }
            }
        }
        outcome.learned_imsi = opened.is_some();

        // Without the payload and without prior knowledge of the victim,
        // the impersonator cannot even address a challenge. The
        // subscriber hears nothing further and times out silently.
        let (imsi, et_ue, rand1) = match (opened, hint) {
            (Some((imsi, et_ue, rand1)), _) => (imsi, et_ue, rand1),
            (None, Some(h)) => (h.imsi.clone(), h.et_ue, [0u8; NONCE_LEN]),
            (None, None) => return outcome,
        };

        let mut rand2 = [0u8; NONCE_LEN];
        net.rng.fill_bytes(&mut rand2);
        let to_sign = signature_message(&imsi, &rand1, &rand2);
        let Ok(sn_identity) = make_identity(self.snid.as_str(), et) else {
            return outcome;
        };
        // A compromised network signs with whatever key it holds (stale
        // or not); an outsider can only self-issue under an authority the
        // subscriber does not trust.
        let signing_key = match &self.granted {
            Some(granted) => granted.key.clone(),
            None => {
                let rogue_msk = self.params.random_scalar(&mut net.rng);
                extract(&self.params, rogue_msk, &sn_identity)
            }
        };
        let sig = ibs_sign(&self.params, &signing_key, &to_sign, &mut net.rng);
        let Ok(ue_identity) = make_identity(&imsi, et_ue) else {
            return outcome;
        };
        let Ok(enc_rand2) = ibe_encrypt(&self.params, self.hn_mpk, &ue_identity, &rand2, &mut net.rng)
        else {
            return outcome;
        };
        let challenge = Message::SnAuthChallenge { sig, enc_rand2 };
        net.send(Interface::Air, &self.id, ue_name, challenge.clone())
            .expect("challenge encodes");

        match ue.handle_challenge(&challenge, &mut net.rng) {
            Ok(reply) => {
                net.send(Interface::Air, ue_name, &self.id, reply.clone())
                    .expect("reply encodes");
                let Message::UeAuthResponse { sig } = reply else {
                    return outcome;
                };
                let answered = ibs_verify(&self.params, self.hn_mpk, &ue_identity, &to_sign, &sig);
                let hijacked_key = kdf(
                    &rand1,
                    &rand2,
                    self.hn_mpk,
                    &key_context(self.snid.as_str(), et),
                );
                outcome.auth_completed = answered && ue.session_key() == Some(&hijacked_key);
            }
            Err(abort) => {
                outcome.ue_abort = Some(abort.to_string());
            }
        }
        outcome
    }
}

/// The pre-upgrade contrast: a bare announcement is enough to make a
/// legacy subscriber volunteer its permanent identity in the clear.
pub fn aic_legacy(
    net: &mut SimNetwork,
    ue: &UeState,
    ue_name: &str,
    attacker_id: &str,
    attacker_snid: &NetId,
) -> AttackOutcome {
    let mut outcome = AttackOutcome::new(attacker_id);
    let bc = Message::SnBroadcast {
        snid: attacker_snid.as_str().to_string(),
        et: None,
    };
    net.send(Interface::Air, attacker_id, BROADCAST_RECEIVER, bc)
        .expect("broadcast encodes");
    let attach = ue.legacy_attach();
    net.send(Interface::Air, ue_name, attacker_id, attach.clone())
        .expect("attach encodes");
    outcome.learned_imsi = attach.cleartext_contains(ue.imsi().digits().as_bytes());
    outcome.learned_hnid = attach.cleartext_contains(ue.imsi().hnid().as_str().as_bytes());
    outcome
}
