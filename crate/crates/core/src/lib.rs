//! Deterministic simulator and library for an identity-based attach
//! protocol that keeps the permanent subscriber identity off the radio
//! link and lets a device and a serving network authenticate each other
//! without contacting the home network on every visit.
//!
//! The building blocks:
//!
//! - [`crypto`] — a small prime-field pairing stand-in and, on top of
//!   it, identity-based encryption (KEM/DEM), identity-based
//!   signatures, root-key encryption, and the session-key derivation.
//!   Educational parameters: the group is tiny and the pairing is
//!   degenerate, so none of this resists real attack — the point is the
//!   protocol logic, not the arithmetic.
//! - [`identity`] — IMSI parsing, network ids, and the expiry-tagged
//!   identity strings that make every day's keys distinct.
//! - [`wire`] — the message registry with a byte-exact encoding and a
//!   structural cleartext/sealed split that privacy scans rely on.
//! - [`actors`] — home network, serving network, and subscriber state
//!   machines, plus the challenge-response vector stub.
//! - [`netsim`] — the clock, the two simulated links, transcripts,
//!   metrics, the passive and impersonating adversaries, and the named
//!   [`netsim::scenario`] runs.
//! - [`flows`] — size-parameterized message-flow models of seven attach
//!   schemes and the expectations their comparison must satisfy.
//! - [`config`] — the JSON run configuration.

pub mod actors;
pub mod config;
pub mod crypto;
pub mod flows;
pub mod identity;
pub mod netsim;
pub mod wire;

pub use config::{Config, ConfigError};
pub use crypto::group::GroupParams;
pub use crypto::kdf::SessionKey;
pub use crypto::Element;
pub use identity::{ExpiryTime, Imsi, NetId};
pub use netsim::scenario::{
    run_scenario, ScenarioError, ScenarioReport, SCENARIO_NAMES,
};
pub use netsim::{Metrics, SimNetwork};
pub use wire::{transcript_to_jsonl, Interface, Message, TranscriptEntry};
