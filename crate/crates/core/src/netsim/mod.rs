//! Deterministic single-threaded network simulation.
//!
//! Two lossless FIFO links — the radio link and the operator backhaul —
//! carry encoded messages between actors. Every transmission is recorded
//! in an append-only transcript; all traffic metrics are recomputed from
//! that transcript, so anything the metrics claim is backed by logged
//! bytes.

pub mod adversary;
pub mod scenario;

use std::collections::VecDeque;

use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::identity::ExpiryTime;
use crate::wire::{encode, EncodeError, Interface, Message, TranscriptEntry};
use chrono::TimeDelta;

/// Receiver name used for broadcast transmissions.
pub const BROADCAST_RECEIVER: &str = "*";

/// A message in flight.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub interface: Interface,
    pub sender: String,
    pub receiver: String,
    pub message: Message,
}

/// Simulated wall clock, advanced explicitly by scenarios.
#[derive(Debug, Clone, Copy)]
pub struct SimClock {
    now: ExpiryTime,
}

impl SimClock {
    pub fn new(start: ExpiryTime) -> Self {
        SimClock { now: start }
    }

    pub fn now(&self) -> ExpiryTime {
        self.now
    }

    pub fn advance(&mut self, delta: TimeDelta) {
        self.now = self.now.advance(delta);
    }

    pub fn set(&mut self, now: ExpiryTime) {
        self.now = now;
    }
}

/// Traffic counters, all derived from the transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Metrics {
    pub air_msgs: u64,
    pub air_bytes: u64,
    pub backhaul_msgs: u64,
    pub backhaul_bytes: u64,
    /// Completed request/reply exchanges on the radio link.
    pub ue_sn_round_trips: u64,
    /// Completed request/reply exchanges on the backhaul.
    pub sn_hn_round_trips: u64,
}

/// Counts completed request/reply pairs: a directed message followed by
/// the next directed message if it reverses that direction. Broadcasts
/// don't participate. An unanswered trailing message is not a round trip.
#[derive(Debug, Clone, Default)]
struct PairCounter {
    pending: Option<(String, String)>,
    completed: u64,
}

impl PairCounter {
    fn observe(&mut self, entry: &TranscriptEntry) {
        if entry.decoded.is_broadcast() || entry.receiver == BROADCAST_RECEIVER {
            return;
        }
        let direction = (entry.sender.clone(), entry.receiver.clone());
        match self.pending.take() {
            Some((from, to)) if from == direction.1 && to == direction.0 => {
                self.completed += 1;
            }
            _ => self.pending = Some(direction),
        }
    }
}

impl Metrics {
    /// Recomputes all counters from a transcript slice.
    pub fn from_transcript(entries: &[TranscriptEntry]) -> Metrics {
        let mut metrics = Metrics::default();
        let mut air_pairs = PairCounter::default();
        let mut backhaul_pairs = PairCounter::default();
        for entry in entries {
            match entry.interface {
                Interface::Air => {
                    metrics.air_msgs += 1;
                    metrics.air_bytes += entry.bytes.len() as u64;
                    air_pairs.observe(entry);
                }
                Interface::Backhaul => {
                    metrics.backhaul_msgs += 1;
                    metrics.backhaul_bytes += entry.bytes.len() as u64;
                    backhaul_pairs.observe(entry);
                }
            }
        }
        metrics.ue_sn_round_trips = air_pairs.completed;
        metrics.sn_hn_round_trips = backhaul_pairs.completed;
        metrics
    }
}

/// The simulated world: clock, deterministic randomness, links, and the
/// transcript.
#[derive(Debug)]
pub struct SimNetwork {
    pub clock: SimClock,
    pub rng: ChaCha20Rng,
    air: VecDeque<Envelope>,
    backhaul: VecDeque<Envelope>,
    transcript: Vec<TranscriptEntry>,
    window_start: usize,
}

impl SimNetwork {
    pub fn new(start: ExpiryTime, rng: ChaCha20Rng) -> Self {
        SimNetwork {
            clock: SimClock::new(start),
            rng,
            air: VecDeque::new(),
            backhaul: VecDeque::new(),
            transcript: Vec::new(),
            window_start: 0,
        }
    }

    /// Encodes, logs, and enqueues one transmission.
    pub fn send(
        &mut self,
        interface: Interface,
        sender: &str,
        receiver: &str,
        message: Message,
    ) -> Result<(), EncodeError> {
        let bytes = encode(&message)?;
        self.transcript.push(TranscriptEntry {
            interface,
            sender: sender.to_string(),
            receiver: receiver.to_string(),
            bytes,
            decoded: message.clone(),
        });
        let envelope = Envelope {
            interface,
            sender: sender.to_string(),
            receiver: receiver.to_string(),
            message,
        };
        match interface {
            Interface::Air => self.air.push_back(envelope),
            Interface::Backhaul => self.backhaul.push_back(envelope),
        }
        Ok(())
    }

    /// Takes the next in-flight message on one link.
    pub fn recv(&mut self, interface: Interface) -> Option<Envelope> {
        match interface {
            Interface::Air => self.air.pop_front(),
            Interface::Backhaul => self.backhaul.pop_front(),
        }
    }

    /// Full transcript since construction.
    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// Starts a fresh measurement window at the current transcript
    /// position.
    pub fn mark_window(&mut self) {
        self.window_start = self.transcript.len();
    }

    /// Index where the current measurement window begins.
    pub fn window_start(&self) -> usize {
        self.window_start
    }

    /// Counters for the current measurement window.
    pub fn window_metrics(&self) -> Metrics {
        Metrics::from_transcript(&self.transcript[self.window_start..])
    }

    /// Counters over the whole transcript.
    pub fn total_metrics(&self) -> Metrics {
        Metrics::from_transcript(&self.transcript)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn start() -> ExpiryTime {
        ExpiryTime::parse("20250101T080000Z").unwrap()
    }

    fn net() -> SimNetwork {
        SimNetwork::new(start(), ChaCha20Rng::seed_from_u64(1))
    }

    fn broadcast() -> Message {
        Message::SnBroadcast {
            snid: "24491".to_string(),
            et: None,
        }
    }

    fn directed(kind: u8) -> Message {
        match kind {
            0 => Message::SnKeyRequest {
                snid: "24491".to_string(),
            },
            _ => Message::AkaResponse { res: [7; 16] },
        }
    }

    #[test]
    fn send_and_recv_preserve_fifo_order_per_link() {
        let mut net = net();
        net.send(Interface::Air, "sn-24491", BROADCAST_RECEIVER, broadcast())
            .unwrap();
        net.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net.send(Interface::Backhaul, "sn-24491", "hn-24405", directed(0))
            .unwrap();

        let first = net.recv(Interface::Air).unwrap();
        assert_eq!(first.sender, "sn-24491");
        assert_eq!(first.receiver, BROADCAST_RECEIVER);
        let second = net.recv(Interface::Air).unwrap();
        assert_eq!(second.sender, "ue-1");
        assert!(net.recv(Interface::Air).is_none());
        assert!(net.recv(Interface::Backhaul).is_some());
        assert!(net.recv(Interface::Backhaul).is_none());
    }

    #[test]
    fn metrics_are_recomputed_from_the_transcript() {
        let mut net = net();
        net.send(Interface::Air, "sn-24491", BROADCAST_RECEIVER, broadcast())
            .unwrap();
        net.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net.send(Interface::Air, "sn-24491", "ue-1", directed(1)).unwrap();
        net.send(Interface::Backhaul, "sn-24491", "hn-24405", directed(0))
            .unwrap();

        let m = net.total_metrics();
        assert_eq!(m.air_msgs, 3);
        assert_eq!(m.backhaul_msgs, 1);
        let expected_air: u64 = net
            .transcript()
            .iter()
            .filter(|e| e.interface == Interface::Air)
            .map(|e| e.bytes.len() as u64)
            .sum();
        assert_eq!(m.air_bytes, expected_air);
        assert_eq!(m.ue_sn_round_trips, 1);
        assert_eq!(m.sn_hn_round_trips, 0);
    }

    #[test]
    fn round_trips_require_a_reversed_reply() {
        let mut net1 = net();
        // Request, reply, request, reply: two round trips.
        net1.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net1.send(Interface::Air, "sn-24491", "ue-1", directed(1)).unwrap();
        net1.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net1.send(Interface::Air, "sn-24491", "ue-1", directed(1)).unwrap();
        assert_eq!(net1.total_metrics().ue_sn_round_trips, 2);

        // A trailing unanswered request adds nothing.
        net1.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        assert_eq!(net1.total_metrics().ue_sn_round_trips, 2);

        // Broadcasts never pair.
        let mut net2 = net();
        net2.send(Interface::Air, "sn-24491", BROADCAST_RECEIVER, broadcast())
            .unwrap();
        net2.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        assert_eq!(net2.total_metrics().ue_sn_round_trips, 0);

        // Two same-direction messages don't pair either; only the
        // reversal completes one.
        let mut net3 = net();
        net3.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net3.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net3.send(Interface::Air, "sn-24491", "ue-1", directed(1)).unwrap();
        assert_eq!(net3.total_metrics().ue_sn_round_trips, 1);
    }

    #[test]
    fn window_metrics_cover_only_the_marked_suffix() {
        let mut net = net();
        net.send(Interface::Air, "sn-24491", BROADCAST_RECEIVER, broadcast())
            .unwrap();
        net.send(Interface::Air, "ue-1", "sn-24491", directed(1)).unwrap();
        net.mark_window();
        assert_eq!(net.window_metrics(), Metrics::default());
        net.send(Interface::Air, "sn-24491", "ue-1", directed(1)).unwrap();
        let w = net.window_metrics();
        assert_eq!(w.air_msgs, 1);
        // The pair straddles the mark, so the window holds no completed
        // round trip — windows measure only what happened inside them.
        assert_eq!(w.ue_sn_round_trips, 0);
        assert_eq!(net.total_metrics().ue_sn_round_trips, 1);
    }

    #[test]
    fn clock_advances_and_sets() {
        let mut clock = SimClock::new(start());
        clock.advance(TimeDelta::seconds(90));
        assert_eq!(clock.now().text(), "20250101T080130Z");
        clock.set(ExpiryTime::parse("20250102T000000Z").unwrap());
        assert_eq!(clock.now().text(), "20250102T000000Z");
    }
}
