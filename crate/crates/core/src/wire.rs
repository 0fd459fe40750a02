//! Binary wire format, message schema, and transcript records.
//!
//! Every message is one type byte followed by its fields in a fixed
//! order, each field a 2-byte big-endian length prefix and the payload.
//! The schema below is the single source of truth: encoding walks
//! [`Message::parts`], so every byte on the wire is attributable to a
//! named field with a declared sensitivity, and the privacy checks in
//! the adversary models reuse exactly that attribution.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::actors::aka::Av;
use crate::crypto::ibe::{IbeCiphertext, IbePrivateKey};
use crate::crypto::ibs::IbsSignature;
use crate::crypto::{encode8, Element, ELEMENT_LEN, TAG_LEN};
use crate::identity::{ExpiryTime, IdentityString, ET_TEXT_LEN};

/// Maximum payload length of a single field.
pub const MAX_FIELD_LEN: usize = u16::MAX as usize;

/// Hex serialization for byte fields (keeps JSON transcripts readable).
pub mod hexfmt {
    use super::*;

    pub fn serialize<S: Serializer, T: AsRef<[u8]>>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v.as_ref()))
    }
}

/// The two transports in the model: the radio link between subscriber
/// equipment and serving network, and the inter-network link between
/// serving and home network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interface {
    Air,
    Backhaul,
}

/// Sensitivity class of a wire field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sensitivity {
    /// Readable by anyone observing the link.
    Cleartext,
    /// Ciphertext or key material; carries no readable content.
    EncryptedContent,
}

/// One encoded field with its schema attribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldPart {
    pub name: &'static str,
    pub sensitivity: Sensitivity,
    pub payload: Vec<u8>,
}

impl FieldPart {
    fn new(name: &'static str, sensitivity: Sensitivity, payload: Vec<u8>) -> Self {
        FieldPart {
            name,
            sensitivity,
            payload,
        }
    }
}

/// One revoked identity: the subscriber digits and the expiry embedded in
/// the revoked identity. Entries become prunable once the expiry passes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevocationEntry {
    pub imsi: String,
    pub et: ExpiryTime,
}

/// Every message that can appear on either interface.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Message {
    /// Serving network presence announcement (type 0x01, AIR, broadcast).
    /// Optionally carries the current service-key expiry.
    SnBroadcast {
        snid: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        et: Option<ExpiryTime>,
    },
    /// Subscriber attach: home network id in clear for routing, the
    /// subscriber identity and nonce sealed to the serving network's
    /// identity key (type 0x02, AIR).
    AttachRequest {
        hnid: String,
        ct: IbeCiphertext,
        et: ExpiryTime,
    },
    /// Serving network asks a home network for its identity key
    /// (type 0x03, BACKHAUL).
    SnKeyRequest { snid: String },
    /// Home network delivers the serving network's identity key, its
    /// expiry, and the authority public key (type 0x04, BACKHAUL).
    SnKeyResponse {
        key: IbePrivateKey,
        et: ExpiryTime,
        mpk: Element,
    },
    /// Serving network without a usable key forwards the sealed attach to
    /// the home network (type 0x05, BACKHAUL).
    HnAuthRequest {
        snid: String,
        ct: IbeCiphertext,
        et: ExpiryTime,
    },
    /// Home network answers the fallback: an authentication vector, the
    /// recovered subscriber identity, and the serving network's key so
    /// later attaches can be handled locally (type 0x06, BACKHAUL).
    HnAuthResponse {
        av: Av,
        imsi: String,
        key: IbePrivateKey,
        et: ExpiryTime,
    },
    /// Serving network proves itself: a signature over the subscriber
    /// identity and both nonces, plus the second nonce sealed to the
    /// subscriber's identity key (type 0x07, AIR).
    SnAuthChallenge {
        sig: IbsSignature,
        enc_rand2: IbeCiphertext,
    },
    /// Subscriber's answering signature over the same material
    /// (type 0x08, AIR).
    UeAuthResponse { sig: IbsSignature },
    /// Challenge of the classic key-agreement fallback (type 0x09, AIR).
    AkaChallenge {
        #[serde(with = "hexfmt")]
        rand: [u8; 16],
        #[serde(with = "hexfmt")]
        autn: [u8; 16],
    },
    /// Response of the classic key-agreement fallback (type 0x0A, AIR).
    AkaResponse {
        #[serde(with = "hexfmt")]
        res: [u8; 16],
    },
    /// Home network pushes its current revocation list to a serving
    /// network (type 0x0B, BACKHAUL).
    RevocationSync { entries: Vec<RevocationEntry> },
    /// The legacy baseline attach: subscriber identity in clear
    /// (type 0x0C, AIR).
    LegacyAttach { imsi: String },
}

impl Message {
    /// The wire type byte.
    pub fn type_byte(&self) -> u8 {
        match self {
            Message::SnBroadcast { .. } => 0x01,
            Message::AttachRequest { .. } => 0x02,
            Message::SnKeyRequest { .. } => 0x03,
            Message::SnKeyResponse { .. } => 0x04,
            Message::HnAuthRequest { .. } => 0x05,
            Message::HnAuthResponse { .. } => 0x06,
            Message::SnAuthChallenge { .. } => 0x07,
            Message::UeAuthResponse { .. } => 0x08,
            Message::AkaChallenge { .. } => 0x09,
            Message::AkaResponse { .. } => 0x0A,
            Message::RevocationSync { .. } => 0x0B,
            Message::LegacyAttach { .. } => 0x0C,
        }
    }

    /// Stable kebab-case name (matches the serialized `kind` tag).
    pub fn kind(&self) -> &'static str {
        match self {
            Message::SnBroadcast { .. } => "sn-broadcast",
            Message::AttachRequest { .. } => "attach-request",
            Message::SnKeyRequest { .. } => "sn-key-request",
            Message::SnKeyResponse { .. } => "sn-key-response",
            Message::HnAuthRequest { .. } => "hn-auth-request",
            Message::HnAuthResponse { .. } => "hn-auth-response",
            Message::SnAuthChallenge { .. } => "sn-auth-challenge",
            Message::UeAuthResponse { .. } => "ue-auth-response",
            Message::AkaChallenge { .. } => "aka-challenge",
            Message::AkaResponse { .. } => "aka-response",
            Message::RevocationSync { .. } => "revocation-sync",
            Message::LegacyAttach { .. } => "legacy-attach",
        }
    }

    /// Whether this message is addressed to everyone in radio range.
    pub fn is_broadcast(&self) -> bool {
        matches!(self, Message::SnBroadcast { .. })
    }

    /// The ordered field schema with payloads and sensitivity labels.
    pub fn parts(&self) -> Vec<FieldPart> {
        use Sensitivity::{Cleartext as Ct, EncryptedContent as Ec};
        let text = |s: &str| s.as_bytes().to_vec();
        let et_bytes = |et: &ExpiryTime| et.text().into_bytes();
        let elem = |e: Element| encode8(e).to_vec();
        let ct_parts = |prefix_u: &'static str,
                        prefix_body: &'static str,
                        prefix_tag: &'static str,
                        ct: &IbeCiphertext| {
            vec![
                FieldPart::new(prefix_u, Ec, elem(ct.u)),
                FieldPart::new(prefix_body, Ec, ct.body.clone()),
                FieldPart::new(prefix_tag, Ec, ct.tag.to_vec()),
            ]
        };
        let key_parts = |key: &IbePrivateKey| {
            vec![
                FieldPart::new("key.identity", Ct, text(&key.identity.canonical())),
                FieldPart::new("key.d", Ec, elem(key.d)),
                FieldPart::new("key.expiry", Ct, et_bytes(&key.expiry)),
            ]
        };

        match self {
            Message::SnBroadcast { snid, et } => {
                // The expiry field is always framed; an empty payload
                // means the announcement does not advertise one. A
                // trailing optional field would make truncation at the
                // field boundary undetectable.
                let et_payload = et.as_ref().map(et_bytes).unwrap_or_default();
                vec![
                    FieldPart::new("snid", Ct, text(snid)),
                    FieldPart::new("et", Ct, et_payload),
                ]
            }
            Message::AttachRequest { hnid, ct, et } => {
                let mut parts = vec![FieldPart::new("hnid", Ct, text(hnid))];
                parts.extend(ct_parts("ct.u", "ct.body", "ct.tag", ct));
                parts.push(FieldPart::new("et", Ct, et_bytes(et)));
                parts
            }
            Message::SnKeyRequest { snid } => vec![FieldPart::new("snid", Ct, text(snid))],
            Message::SnKeyResponse { key, et, mpk } => {
                let mut parts = key_parts(key);
                parts.push(FieldPart::new("et", Ct, et_bytes(et)));
                parts.push(FieldPart::new("mpk", Ct, elem(*mpk)));
                parts
            }
            Message::HnAuthRequest { snid, ct, et } => {
                let mut parts = vec![FieldPart::new("snid", Ct, text(snid))];
                parts.extend(ct_parts("ct.u", "ct.body", "ct.tag", ct));
                parts.push(FieldPart::new("et", Ct, et_bytes(et)));
                parts
            }
            Message::HnAuthResponse { av, imsi, key, et } => {
                let mut parts = vec![
                    FieldPart::new("av.rand", Ct, av.rand.to_vec()),
                    FieldPart::new("av.xres", Ec, av.xres.to_vec()),
                    FieldPart::new("av.autn", Ct, av.autn.to_vec()),
                    FieldPart::new("av.kasme", Ec, av.kasme.to_vec()),
                    FieldPart::new("imsi", Ct, text(imsi)),
                ];
                parts.extend(key_parts(key));
                parts.push(FieldPart::new("et", Ct, et_bytes(et)));
                parts
            }
            Message::SnAuthChallenge { sig, enc_rand2 } => {
                let mut parts = vec![
                    FieldPart::new("sig.u", Ct, elem(sig.u)),
                    FieldPart::new("sig.v", Ct, elem(sig.v)),
                ];
                parts.extend(ct_parts("enc.u", "enc.body", "enc.tag", enc_rand2));
                parts
            }
            Message::UeAuthResponse { sig } => vec![
                FieldPart::new("sig.u", Ct, elem(sig.u)),
                FieldPart::new("sig.v", Ct, elem(sig.v)),
            ],
            Message::AkaChallenge { rand, autn } => vec![
                FieldPart::new("rand", Ct, rand.to_vec()),
                FieldPart::new("autn", Ct, autn.to_vec()),
            ],
            Message::AkaResponse { res } => vec![FieldPart::new("res", Ct, res.to_vec())],
            Message::RevocationSync { entries } => {
                let mut parts = vec![FieldPart::new(
                    "count",
                    Ct,
                    (entries.len() as u64).to_be_bytes().to_vec(),
                )];
                for entry in entries {
                    parts.push(FieldPart::new("entry.imsi", Ct, text(&entry.imsi)));
                    parts.push(FieldPart::new("entry.et", Ct, et_bytes(&entry.et)));
                }
                parts
            }
            Message::LegacyAttach { imsi } => vec![FieldPart::new("imsi", Ct, text(imsi))],
        }
    }

    /// Whether any cleartext-labelled field contains `needle` as a
    /// substring of its payload bytes.
    pub fn cleartext_contains(&self, needle: &[u8]) -> bool {
        self.parts().iter().any(|part| {
            part.sensitivity == Sensitivity::Cleartext && contains_subslice(&part.payload, needle)
        })
    }
}

fn contains_subslice(haystack: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Errors raised while encoding a message.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    /// A field payload exceeds the 2-byte length prefix.
    #[error("field {field} is {len} bytes, beyond the {MAX_FIELD_LEN}-byte field limit")]
    FieldTooLong { field: &'static str, len: usize },
}

/// Errors raised while decoding a buffer. Each failure mode is a
/// distinct variant so callers can tell them apart.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    /// The buffer ended inside the type byte, a length prefix, or a
    /// payload.
    #[error("buffer truncated while reading {0}")]
    Truncated(&'static str),
    /// The type byte matches no registered message.
    #[error("unknown message type byte {0:#04x}")]
    UnknownType(u8),
    /// Extra bytes remain after the message's final field.
    #[error("{0} trailing byte(s) after the message end")]
    TrailingBytes(usize),
    /// A field payload is structurally invalid for its declared type.
    #[error("invalid field {field}: {reason}")]
    InvalidField {
        field: &'static str,
        reason: &'static str,
    },
}

/// Encodes a message: type byte, then each field as `len_be16 || payload`.
pub fn encode(msg: &Message) -> Result<Vec<u8>, EncodeError> {
    let parts = msg.parts();
    let total: usize = 1 + parts.iter().map(|p| 2 + p.payload.len()).sum::<usize>();
    let mut out = Vec::with_capacity(total);
    out.push(msg.type_byte());
    for part in &parts {
        if part.payload.len() > MAX_FIELD_LEN {
            return Err(EncodeError::FieldTooLong {
                field: part.name,
                len: part.payload.len(),
            });
        }
        out.extend_from_slice(&(part.payload.len() as u16).to_be_bytes());
        out.extend_from_slice(&part.payload);
    }
    Ok(out)
}

/// Sequential field reader over a raw buffer.
struct FieldReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> FieldReader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        FieldReader { buf, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn next(&mut self, field: &'static str) -> Result<&'a [u8], DecodeError> {
        if self.remaining() < 2 {
            return Err(DecodeError::Truncated(field));
        }
        let len = u16::from_be_bytes([self.buf[self.pos], self.buf[self.pos + 1]]) as usize;
        self.pos += 2;
        if self.remaining() < len {
            return Err(DecodeError::Truncated(field));
        }
        let payload = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(payload)
    }

    fn finish(self) -> Result<(), DecodeError> {
        if self.remaining() > 0 {
            Err(DecodeError::TrailingBytes(self.remaining()))
        } else {
            Ok(())
        }
    }
}

fn read_string(reader: &mut FieldReader, field: &'static str) -> Result<String, DecodeError> {
    let raw = reader.next(field)?;
    String::from_utf8(raw.to_vec()).map_err(|_| DecodeError::InvalidField {
        field,
        reason: "not valid UTF-8",
    })
}

fn read_element(reader: &mut FieldReader, field: &'static str) -> Result<Element, DecodeError> {
    let raw = reader.next(field)?;
    let bytes: [u8; ELEMENT_LEN] = raw.try_into().map_err(|_| DecodeError::InvalidField {
        field,
        reason: "element fields are exactly 8 bytes",
    })?;
    Ok(Element(u64::from_be_bytes(bytes)))
}

fn read_expiry(reader: &mut FieldReader, field: &'static str) -> Result<ExpiryTime, DecodeError> {
    let raw = reader.next(field)?;
    if raw.len() != ET_TEXT_LEN {
        return Err(DecodeError::InvalidField {
            field,
            reason: "expiry fields are exactly 16 bytes",
        });
    }
    let text = std::str::from_utf8(raw).map_err(|_| DecodeError::InvalidField {
        field,
        reason: "not valid UTF-8",
    })?;
    ExpiryTime::parse(text).map_err(|_| DecodeError::InvalidField {
        field,
        reason: "not a canonical expiry timestamp",
    })
}

fn read_array<const N: usize>(
    reader: &mut FieldReader,
    field: &'static str,
    reason: &'static str,
) -> Result<[u8; N], DecodeError> {
    let raw = reader.next(field)?;
    raw.try_into()
        .map_err(|_| DecodeError::InvalidField { field, reason })
}

fn read_ciphertext(reader: &mut FieldReader) -> Result<IbeCiphertext, DecodeError> {
    let u = read_element(reader, "ct.u")?;
    let body = reader.next("ct.body")?.to_vec();
    let tag: [u8; TAG_LEN] = read_array(reader, "ct.tag", "tags are exactly 32 bytes")?;
    Ok(IbeCiphertext { u, body, tag })
}

fn read_private_key(reader: &mut FieldReader) -> Result<IbePrivateKey, DecodeError> {
    let identity_text = read_string(reader, "key.identity")?;
    let identity =
        IdentityString::parse(&identity_text).map_err(|_| DecodeError::InvalidField {
            field: "key.identity",
            reason: "not a canonical identity string",
        })?;
    let d = read_element(reader, "key.d")?;
    let expiry = read_expiry(reader, "key.expiry")?;
    Ok(IbePrivateKey {
        identity,
        d,
        expiry,
    })
}

/// Decodes a buffer into a message, rejecting truncation, unknown types,
/// malformed fields, and trailing bytes.
pub fn decode(buf: &[u8]) -> Result<Message, DecodeError> {
    if buf.is_empty() {
        return Err(DecodeError::Truncated("type byte"));
    }
    let type_byte = buf[0];
    let mut reader = FieldReader::new(&buf[1..]);
    let msg = match type_byte {
        0x01 => {
            let snid = read_string(&mut reader, "snid")?;
            let raw = reader.next("et")?;
            let et = if raw.is_empty() {
                None
            } else {
                let text = std::str::from_utf8(raw).map_err(|_| DecodeError::InvalidField {
                    field: "et",
                    reason: "not valid UTF-8",
                })?;
                Some(ExpiryTime::parse(text).map_err(|_| DecodeError::InvalidField {
                    field: "et",
                    reason: "not a canonical expiry timestamp",
                })?)
            };
            Message::SnBroadcast { snid, et }
        }
        0x02 => Message::AttachRequest {
            hnid: read_string(&mut reader, "hnid")?,
            ct: read_ciphertext(&mut reader)?,
            et: read_expiry(&mut reader, "et")?,
        },
        0x03 => Message::SnKeyRequest {
            snid: read_string(&mut reader, "snid")?,
        },
        0x04 => Message::SnKeyResponse {
            key: read_private_key(&mut reader)?,
            et: read_expiry(&mut reader, "et")?,
            mpk: read_element(&mut reader, "mpk")?,
        },
        0x05 => Message::HnAuthRequest {
            snid: read_string(&mut reader, "snid")?,
            ct: read_ciphertext(&mut reader)?,
            et: read_expiry(&mut reader, "et")?,
        },
        0x06 => {
            let av = Av {
                rand: read_array(&mut reader, "av.rand", "AKA fields are exactly 16 bytes")?,
                xres: read_array(&mut reader, "av.xres", "AKA fields are exactly 16 bytes")?,
                autn: read_array(&mut reader, "av.autn", "AKA fields are exactly 16 bytes")?,
                kasme: read_array(&mut reader, "av.kasme", "kasme is exactly 32 bytes")?,
            };
            Message::HnAuthResponse {
                av,
                imsi: read_string(&mut reader, "imsi")?,
                key: read_private_key(&mut reader)?,
                et: read_expiry(&mut reader, "et")?,
            }
        }
        0x07 => Message::SnAuthChallenge {
            sig: IbsSignature {
                u: read_element(&mut reader, "sig.u")?,
                v: read_element(&mut reader, "sig.v")?,
            },
            enc_rand2: read_ciphertext(&mut reader)?,
        },
        0x08 => Message::UeAuthResponse {
            sig: IbsSignature {
                u: read_element(&mut reader, "sig.u")?,
                v: read_element(&mut reader, "sig.v")?,
            },
        },
        0x09 => Message::AkaChallenge {
            rand: read_array(&mut reader, "rand", "AKA fields are exactly 16 bytes")?,
            autn: read_array(&mut reader, "autn", "AKA fields are exactly 16 bytes")?,
        },
        0x0A => Message::AkaResponse {
            res: read_array(&mut reader, "res", "AKA fields are exactly 16 bytes")?,
        },
        0x0B => {
            let count_bytes: [u8; 8] =
                read_array(&mut reader, "count", "count is exactly 8 bytes")?;
            let count = u64::from_be_bytes(count_bytes);
            let mut entries = Vec::new();
            for _ in 0..count {
                entries.push(RevocationEntry {
                    imsi: read_string(&mut reader, "entry.imsi")?,
                    et: read_expiry(&mut reader, "entry.et")?,
                });
            }
            Message::RevocationSync { entries }
        }
        0x0C => Message::LegacyAttach {
            imsi: read_string(&mut reader, "imsi")?,
        },
        other => return Err(DecodeError::UnknownType(other)),
    };
    reader.finish()?;
    Ok(msg)
}

/// One logged transmission: the raw bytes together with the decoded,
/// schema-attributed message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub interface: Interface,
    pub sender: String,
    pub receiver: String,
    #[serde(with = "hexfmt")]
    pub bytes: Vec<u8>,
    pub decoded: Message,
}

/// Serializes a transcript as JSON Lines (one entry per line).
pub fn transcript_to_jsonl(entries: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&serde_json::to_string(entry).expect("transcript entries serialize"));
        out.push('\n');
    }
    out
}
