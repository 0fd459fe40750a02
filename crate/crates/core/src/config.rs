//! Runtime configuration: the simulated population, clock, nominal
//! sizes, and group parameters, loaded from a single JSON document.

use serde::{Deserialize, Serialize};

use crate::crypto::group::GroupParams;
use crate::flows::FlowSizes;
use crate::identity::{parse_imsi, ExpiryTime, MncLenMap, NetId};
use chrono::TimeDelta;

/// Top-level configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub hn: HnConfig,
    /// Serving networks, by id.
    pub sns: Vec<String>,
    pub ues: Vec<UeConfig>,
    pub sim: SimConfig,
    #[serde(default)]
    pub sizes: FlowSizes,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub group: GroupConfig,
}

/// The home network and its subscriber base.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnConfig {
    pub hnid: String,
    pub subscribers: Vec<String>,
    pub mnc_len_map: MncLenMap,
}

/// One simulated subscriber device.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeConfig {
    pub imsi: String,
    /// Identity expiry, canonical text form.
    pub et_ue: String,
}

/// Simulation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    /// Simulated clock at scenario start, canonical text form.
    pub start_time: String,
    /// How long before service-key expiry renewal requests go out.
    pub renewal_margin_secs: u64,
}

/// Behavior toggles.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Advertise the current service-key expiry in announcements
    /// instead of relying on the shared end-of-day schedule.
    #[serde(default)]
    pub et_in_broadcast: bool,
}

/// Algebraic group choice.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub p: u64,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig {
            p: crate::crypto::group::DEFAULT_MODULUS,
        }
    }
}

/// Configuration problems.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("configuration does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl Config {
    /// Parses and validates a JSON configuration document.
    pub fn from_json_str(text: &str) -> Result<Config, ConfigError> {
        let config: Config = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// The configuration shipped with the repository.
    pub fn builtin_default() -> Config {
        Config::from_json_str(include_str!("../../../configs/default.json"))
            .expect("the shipped default configuration is valid")
    }

    /// Checks internal consistency: ids parse, every subscriber belongs
    /// to the configured home network, and every simulated device is a
    /// known subscriber.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| ConfigError::Invalid(msg);
        let hnid = NetId::parse(&self.hn.hnid)
            .map_err(|e| invalid(format!("hn.hnid {:?}: {e}", self.hn.hnid)))?;
        GroupParams::new(self.group.p)
            .map_err(|e| invalid(format!("group.p {}: {e}", self.group.p)))?;
        ExpiryTime::parse(&self.sim.start_time)
            .map_err(|e| invalid(format!("sim.start_time {:?}: {e}", self.sim.start_time)))?;
        if self.sns.is_empty() {
            return Err(invalid("at least one serving network is required".into()));
        }
        for snid in &self.sns {
            NetId::parse(snid).map_err(|e| invalid(format!("sns entry {snid:?}: {e}")))?;
        }
        for imsi in &self.hn.subscribers {
            let parsed = parse_imsi(imsi, &self.hn.mnc_len_map)
                .map_err(|e| invalid(format!("subscriber {imsi:?}: {e}")))?;
            if parsed.hnid() != hnid {
                return Err(invalid(format!(
                    "subscriber {imsi:?} belongs to network {}, not {}",
                    parsed.hnid(),
                    hnid.as_str()
                )));
            }
        }
        if self.ues.is_empty() {
            return Err(invalid("at least one subscriber device is required".into()));
        }
        for ue in &self.ues {
            if !self.hn.subscribers.contains(&ue.imsi) {
                return Err(invalid(format!(
                    "device imsi {:?} is not in hn.subscribers",
                    ue.imsi
                )));
            }
            ExpiryTime::parse(&ue.et_ue)
                .map_err(|e| invalid(format!("device {:?} et_ue: {e}", ue.imsi)))?;
        }
        Ok(())
    }

    /// The configured group (valid after `validate`).
    pub fn group_params(&self) -> GroupParams {
        GroupParams::new(self.group.p).expect("validated configuration")
    }

    pub fn start_time(&self) -> ExpiryTime {
        ExpiryTime::parse(&self.sim.start_time).expect("validated configuration")
    }

    pub fn hnid(&self) -> NetId {
        NetId::parse(&self.hn.hnid).expect("validated configuration")
    }

    pub fn renewal_margin(&self) -> TimeDelta {
        TimeDelta::seconds(self.sim.renewal_margin_secs as i64)
    }
}
