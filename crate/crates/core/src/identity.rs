//! Subscriber and network identifiers, and expiry-bound identity strings.
//!
//! Identities used for key derivation are the concatenation of a digit
//! string (an IMSI or a network id) with an expiry timestamp. Binding the
//! expiry into the identity itself is what makes revocation cheap: a key
//! extracted for `base||ET` is useless once `ET` has passed, so revocation
//! lists only need to carry entries until their embedded expiry.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{NaiveDateTime, TimeDelta};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Canonical textual length of an expiry timestamp (`YYYYMMDDTHHMMSSZ`).
pub const ET_TEXT_LEN: usize = 16;
/// Separator between the base digits and the expiry text of an identity.
pub const IDENTITY_SEPARATOR: &str = "||";
/// MNC length assumed when an MCC has no entry in the [`MncLenMap`].
pub const DEFAULT_MNC_LEN: u8 = 3;

const ET_FORMAT: &str = "%Y%m%dT%H%M%SZ";

/// Maps an MCC (3 digits) to the MNC length (2 or 3) used under that MCC.
pub type MncLenMap = BTreeMap<String, u8>;

/// Errors raised while parsing or constructing identifiers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    /// The IMSI digit string was malformed.
    #[error("IMSI must be 6-15 decimal digits with a valid MCC/MNC split, got {0:?}")]
    BadImsi(String),
    /// An [`MncLenMap`] entry requested an MNC length other than 2 or 3.
    #[error("MNC length for MCC {mcc} must be 2 or 3, got {len}")]
    BadMncLen { mcc: String, len: u8 },
    /// The network id was not 5 or 6 decimal digits.
    #[error("network id must be 5-6 decimal digits, got {0:?}")]
    BadNetId(String),
    /// The expiry text did not match `YYYYMMDDTHHMMSSZ`.
    #[error("expiry time must match YYYYMMDDTHHMMSSZ, got {0:?}")]
    BadExpiry(String),
    /// The identity base contained something other than decimal digits.
    #[error("identity base must be non-empty decimal digits, got {0:?}")]
    BadIdentityBase(String),
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// An International Mobile Subscriber Identity, split into its components.
///
/// The raw digit string is `mcc || mnc || msin`; the MCC is always 3 digits,
/// the MNC is 2 or 3 depending on the issuing country, and the MSIN fills
/// the remainder (total length at most 15 digits).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Imsi {
    mcc: String,
    mnc: String,
    msin: String,
}

impl Imsi {
    /// Mobile country code (3 digits).
    pub fn mcc(&self) -> &str {
        &self.mcc
    }

    /// Mobile network code (2 or 3 digits).
    pub fn mnc(&self) -> &str {
        &self.mnc
    }

    /// Subscriber number within the home network.
    pub fn msin(&self) -> &str {
        &self.msin
    }

    /// The full digit string.
    pub fn digits(&self) -> String {
        format!("{}{}{}", self.mcc, self.mnc, self.msin)
    }

    /// The home network id, `mcc || mnc`.
    pub fn hnid(&self) -> NetId {
        NetId(format!("{}{}", self.mcc, self.mnc))
    }
}

impl fmt::Display for Imsi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.mcc, self.mnc, self.msin)
    }
}

/// Splits an IMSI digit string into MCC, MNC and MSIN.
///
/// The MNC length is looked up by MCC in `map`, defaulting to
/// [`DEFAULT_MNC_LEN`] when absent. The MSIN must be non-empty and the
/// total length at most 15 digits.
pub fn parse_imsi(digits: &str, map: &MncLenMap) -> Result<Imsi, IdentityError> {
    if !all_digits(digits) || digits.len() < 6 || digits.len() > 15 {
        return Err(IdentityError::BadImsi(digits.to_string()));
    }
    let mcc = &digits[..3];
    let mnc_len = map.get(mcc).copied().unwrap_or(DEFAULT_MNC_LEN);
    if mnc_len != 2 && mnc_len != 3 {
        return Err(IdentityError::BadMncLen {
            mcc: mcc.to_string(),
            len: mnc_len,
        });
    }
    let split = 3 + mnc_len as usize;
    if digits.len() <= split {
        return Err(IdentityError::BadImsi(digits.to_string()));
    }
    Ok(Imsi {
        mcc: mcc.to_string(),
        mnc: digits[3..split].to_string(),
        msin: digits[split..].to_string(),
    })
}

/// A network identifier (`mcc || mnc`), 5 or 6 decimal digits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetId(String);

impl NetId {
    /// Validates and wraps a network id.
    pub fn parse(s: &str) -> Result<Self, IdentityError> {
        if all_digits(s) && (s.len() == 5 || s.len() == 6) {
            Ok(NetId(s.to_string()))
        } else {
            Err(IdentityError::BadNetId(s.to_string()))
        }
    }

    /// The digit string.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A second-resolution UTC timestamp with the canonical text form
/// `YYYYMMDDTHHMMSSZ`, used both as simulation time and as key expiry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpiryTime(NaiveDateTime);

impl ExpiryTime {
    /// Parses the canonical 16-character form; anything else is rejected.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        if text.len() != ET_TEXT_LEN {
            return Err(IdentityError::BadExpiry(text.to_string()));
        }
        let dt = NaiveDateTime::parse_from_str(text, ET_FORMAT)
            .map_err(|_| IdentityError::BadExpiry(text.to_string()))?;
        let et = ExpiryTime(dt);
        // Guard against chrono accepting a spelling that does not round-trip.
        if et.text() != text {
            return Err(IdentityError::BadExpiry(text.to_string()));
        }
        Ok(et)
    }

    /// Builds a timestamp from calendar components.
    pub fn from_ymd_hms(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Option<Self> {
        let date = chrono::NaiveDate::from_ymd_opt(y, mo, d)?;
        Some(ExpiryTime(date.and_hms_opt(h, mi, s)?))
    }

    /// Canonical 16-character text form.
    pub fn text(&self) -> String {
        self.0.format(ET_FORMAT).to_string()
    }

    /// This timestamp shifted forward (or backward, if negative).
    pub fn advance(&self, delta: TimeDelta) -> Self {
        ExpiryTime(self.0 + delta)
    }

    /// The underlying datetime.
    pub fn inner(&self) -> NaiveDateTime {
        self.0
    }
}

impl fmt::Display for ExpiryTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl Serialize for ExpiryTime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text())
    }
}

impl<'de> Deserialize<'de> for ExpiryTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        ExpiryTime::parse(&text).map_err(de::Error::custom)
    }
}

/// The default service-key expiry for a given moment: the last second of
/// that same (UTC) day. Every serving network key issued during a day
/// therefore shares one expiry, and subscribers can derive it from their
/// own clock without being told.
pub fn default_sn_expiry(now: ExpiryTime) -> ExpiryTime {
    ExpiryTime(
        now.inner()
            .date()
            .and_hms_opt(23, 59, 59)
            .expect("23:59:59 is valid on every date"),
    )
}

/// Whether `et` has passed at time `now`. An identity expiring exactly at
/// `now` is still valid.
pub fn is_expired(et: ExpiryTime, now: ExpiryTime) -> bool {
    et < now
}

/// An identity a key can be extracted for: digit base plus expiry.
///
/// The canonical form is `base || "||" || expiry-text`. Because the base is
/// digits only, the separator can never appear inside it and the canonical
/// form parses back unambiguously.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdentityString {
    base: String,
    expiry: ExpiryTime,
}

impl IdentityString {
    /// The digit base (an IMSI or network id).
    pub fn base(&self) -> &str {
        &self.base
    }

    /// The embedded expiry.
    pub fn expiry(&self) -> ExpiryTime {
        self.expiry
    }

    /// Canonical text form.
    pub fn canonical(&self) -> String {
        format!("{}{}{}", self.base, IDENTITY_SEPARATOR, self.expiry.text())
    }

    /// Canonical form as bytes (the hashing input).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        self.canonical().into_bytes()
    }

    /// Parses a canonical form back into its parts.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let (base, et_text) = text
            .split_once(IDENTITY_SEPARATOR)
            .ok_or_else(|| IdentityError::BadIdentityBase(text.to_string()))?;
        make_identity(base, ExpiryTime::parse(et_text)?)
    }
}

impl fmt::Display for IdentityString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl Serialize for IdentityString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for IdentityString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        IdentityString::parse(&text).map_err(de::Error::custom)
    }
}

/// Builds an identity string, rejecting non-digit bases (which would make
/// the canonical form ambiguous).
pub fn make_identity(base: &str, expiry: ExpiryTime) -> Result<IdentityString, IdentityError> {
    if !all_digits(base) {
        return Err(IdentityError::BadIdentityBase(base.to_string()));
    }
    Ok(IdentityString {
        base: base.to_string(),
        expiry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(entries: &[(&str, u8)]) -> MncLenMap {
        entries
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect()
    }

    fn et(text: &str) -> ExpiryTime {
        ExpiryTime::parse(text).unwrap()
    }

    #[test]
    fn imsi_splits_with_default_mnc_len() {
        let imsi = parse_imsi("310150123456789", &MncLenMap::new()).unwrap();
        assert_eq!(imsi.mcc(), "310");
        assert_eq!(imsi.mnc(), "150");
        assert_eq!(imsi.msin(), "123456789");
        assert_eq!(imsi.hnid().as_str(), "310150");
    }

    #[test]
    fn imsi_splits_with_two_digit_mnc() {
        let imsi = parse_imsi("244051234567", &map(&[("244", 2)])).unwrap();
        assert_eq!(imsi.mcc(), "244");
        assert_eq!(imsi.mnc(), "05");
        assert_eq!(imsi.msin(), "1234567");
        assert_eq!(imsi.hnid().as_str(), "24405");
        assert_eq!(imsi.digits(), "244051234567");
    }

    #[test]
    fn imsi_rejects_bad_inputs() {
        let m = MncLenMap::new();
        assert!(parse_imsi("12345", &m).is_err(), "too short");
        assert!(parse_imsi("1234567890123456", &m).is_err(), "too long");
        assert!(parse_imsi("31015012345678X", &m).is_err(), "non-digit");
        assert!(parse_imsi("310150", &m).is_err(), "empty msin");
        assert!(parse_imsi("", &m).is_err(), "empty");
    }

    #[test]
    fn imsi_rejects_bad_mnc_len_entry() {
        let err = parse_imsi("310150123456789", &map(&[("310", 4)])).unwrap_err();
        assert_eq!(
            err,
            IdentityError::BadMncLen {
                mcc: "310".into(),
                len: 4
            }
        );
    }

    #[test]
    fn netid_accepts_five_or_six_digits() {
        assert_eq!(NetId::parse("24405").unwrap().as_str(), "24405");
        assert_eq!(NetId::parse("310150").unwrap().as_str(), "310150");
        assert!(NetId::parse("2440").is_err());
        assert!(NetId::parse("2440567").is_err());
        assert!(NetId::parse("24x05").is_err());
    }

    #[test]
    fn expiry_round_trips_canonical_text() {
        let text = "20250101T235959Z";
        assert_eq!(et(text).text(), text);
    }

    #[test]
    fn expiry_rejects_malformed_text() {
        for bad in [
            "20250101T235959",   // missing Z
            "20250101235959Z",   // missing T
            "2025-01-01T23:59Z", // separators
            "20250230T000000Z",  // Feb 30
            "20250101T240000Z",  // hour out of range
            "",
        ] {
            assert!(ExpiryTime::parse(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn expiry_orders_chronologically() {
        assert!(et("20250101T000000Z") < et("20250101T000001Z"));
        assert!(et("20241231T235959Z") < et("20250101T000000Z"));
    }

    #[test]
    fn default_sn_expiry_is_end_of_day() {
        assert_eq!(
            default_sn_expiry(et("20250101T080000Z")),
            et("20250101T235959Z")
        );
        assert_eq!(
            default_sn_expiry(et("20250101T235959Z")),
            et("20250101T235959Z")
        );
        assert_eq!(
            default_sn_expiry(et("20251231T000000Z")),
            et("20251231T235959Z")
        );
    }

    #[test]
    fn expiry_boundary_is_inclusive() {
        let deadline = et("20250101T235959Z");
        assert!(!is_expired(deadline, et("20250101T120000Z")));
        assert!(!is_expired(deadline, deadline), "exact expiry still valid");
        assert!(is_expired(deadline, et("20250102T000000Z")));
    }

    #[test]
    fn identity_canonical_form() {
        let id = make_identity("24405", et("20250101T235959Z")).unwrap();
        assert_eq!(id.canonical(), "24405||20250101T235959Z");
        assert_eq!(id.base(), "24405");
        assert_eq!(id.expiry(), et("20250101T235959Z"));
    }

    #[test]
    fn identity_rejects_non_digit_base() {
        let when = et("20250101T235959Z");
        assert!(make_identity("", when).is_err());
        assert!(make_identity("24405||", when).is_err());
        assert!(make_identity("abc", when).is_err());
    }

    #[test]
    fn identity_parse_inverts_canonical() {
        let id = make_identity("244051234567", et("20270101T000000Z")).unwrap();
        assert_eq!(IdentityString::parse(&id.canonical()).unwrap(), id);
        assert!(IdentityString::parse("244051234567").is_err());
        assert!(IdentityString::parse("||20270101T000000Z").is_err());
    }

    #[test]
    fn expiry_serde_uses_canonical_text() {
        let t = et("20250601T120000Z");
        assert_eq!(serde_json::to_string(&t).unwrap(), "\"20250601T120000Z\"");
        let back: ExpiryTime = serde_json::from_str("\"20250601T120000Z\"").unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<ExpiryTime>("\"junk\"").is_err());
    }

    proptest! {
        #[test]
        fn imsi_digits_round_trip(mcc in "[0-9]{3}", msin in "[0-9]{1,9}") {
            let digits = format!("{mcc}{}{msin}", "150");
            let imsi = parse_imsi(&digits, &MncLenMap::new()).unwrap();
            prop_assert_eq!(imsi.digits(), digits);
        }

        #[test]
        fn expiry_text_round_trips(
            y in 2000i32..2100,
            mo in 1u32..=12,
            d in 1u32..=28,
            h in 0u32..24,
            mi in 0u32..60,
            s in 0u32..60,
        ) {
            let t = ExpiryTime::from_ymd_hms(y, mo, d, h, mi, s).unwrap();
            prop_assert_eq!(ExpiryTime::parse(&t.text()).unwrap(), t);
        }
    }
}
