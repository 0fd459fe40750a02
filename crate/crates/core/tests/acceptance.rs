//! The release gate: eight numbered criteria, each asserted with pinned
//! bounds and reported as a single `criterion N (...): PASS|FAIL` line.
//! Run with `--nocapture` to see the lines for passing criteria too.

use std::time::{Duration, Instant};

use chrono::TimeDelta;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ibesim_core::actors::hn::HnState;
use ibesim_core::actors::ue::{UeAbort, UeState};
use ibesim_core::crypto::group::GroupParams;
use ibesim_core::crypto::ibe::{extract, ibe_decrypt, ibe_encrypt, setup};
use ibesim_core::crypto::ibs::{ibs_sign, ibs_verify, IbsSignature};
use ibesim_core::crypto::Element;
use ibesim_core::flows::{check_expectations, compare_all, FlowSizes};
use ibesim_core::identity::{make_identity, parse_imsi, ExpiryTime, MncLenMap, NetId};
use ibesim_core::netsim::adversary::{
    Aic, AttackHint, KeyTableEntry, DEFAULT_MAX_DECRYPT_ATTEMPTS,
};
use ibesim_core::netsim::SimNetwork;
use ibesim_core::wire::{transcript_to_jsonl, Interface, Message};
use ibesim_core::{run_scenario, Config, SCENARIO_NAMES};

/// Trial count for the randomized crypto properties.
const TRIALS: usize = 1000;
/// Wall-clock ceiling for each of the two heavy criteria.
const TIME_LIMIT: Duration = Duration::from_secs(10);

fn verdict(n: u32, label: &str, failures: Vec<String>, detail: String) {
    if failures.is_empty() {
        println!("criterion {n} ({label}): PASS — {detail}");
    } else {
        let joined = failures.join("; ");
        println!("criterion {n} ({label}): FAIL — {joined}");
        panic!("criterion {n} ({label}) failed: {joined}");
    }
}

fn random_digits(rng: &mut impl Rng, len: usize) -> String {
    (0..len)
        .map(|_| char::from(b'0' + rng.random_range(0..10) as u8))
        .collect()
}

fn config() -> Config {
    Config::builtin_default()
}

fn registered_imsis(config: &Config) -> Vec<String> {
    config.hn.subscribers.clone()
}

#[test]
fn criterion_1_crypto_suite() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let params = GroupParams::default();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC1);
    let keys = setup(&params, &mut rng);
    let base_et = ExpiryTime::parse("20250101T000000Z").unwrap();

    let mut round_trips = 0usize;
    let mut wrong_key_rejections = 0usize;
    let mut signatures_ok = 0usize;
    let mut forgeries_rejected = 0usize;
    let mut forgeries_total = 0usize;

    for trial in 0..TRIALS {
        let et = base_et.advance(TimeDelta::days(trial as i64 % 365));
        let base_a = random_digits(&mut rng, 12 + trial % 4);
        let mut base_b = random_digits(&mut rng, 12 + (trial + 1) % 4);
        while base_b == base_a {
            base_b = random_digits(&mut rng, 12);
        }
        let id_a = make_identity(&base_a, et).unwrap();
        let id_b = make_identity(&base_b, et).unwrap();
        let key_a = extract(&params, keys.msk, &id_a);
        let key_b = extract(&params, keys.msk, &id_b);

        let mut plaintext = vec![0u8; rng.random_range(0..=64)];
        rng.fill_bytes(&mut plaintext);
        let ct = ibe_encrypt(&params, keys.mpk, &id_a, &plaintext, &mut rng).unwrap();
        if ibe_decrypt(&params, &key_a, &ct).as_deref() == Ok(&plaintext[..]) {
            round_trips += 1;
        }
        if ibe_decrypt(&params, &key_b, &ct).is_err() {
            wrong_key_rejections += 1;
        }

        let mut message = vec![0u8; rng.random_range(1..=64)];
        rng.fill_bytes(&mut message);
        let sig = ibs_sign(&params, &key_a, &message, &mut rng);
        if ibs_verify(&params, keys.mpk, &id_a, &message, &sig) {
            signatures_ok += 1;
        }

        let mut mutated = message.clone();
        mutated[0] ^= 0x01;
        let tampered_u = IbsSignature {
            u: params.add(sig.u, Element(1)),
            v: sig.v,
        };
        let tampered_v = IbsSignature {
            u: sig.u,
            v: params.add(sig.v, Element(1)),
        };
        let forgeries = [
            !ibs_verify(&params, keys.mpk, &id_a, &mutated, &sig),
            !ibs_verify(&params, keys.mpk, &id_a, &message, &tampered_u),
            !ibs_verify(&params, keys.mpk, &id_a, &message, &tampered_v),
            !ibs_verify(&params, keys.mpk, &id_b, &message, &sig),
        ];
        forgeries_total += forgeries.len();
        forgeries_rejected += forgeries.iter().filter(|ok| **ok).count();
    }

    if round_trips != TRIALS {
        failures.push(format!("only {round_trips}/{TRIALS} encrypt/decrypt round trips"));
    }
    if wrong_key_rejections != TRIALS {
        failures.push(format!(
            "only {wrong_key_rejections}/{TRIALS} wrong-key decryptions rejected"
        ));
    }
    if signatures_ok != TRIALS {
        failures.push(format!("only {signatures_ok}/{TRIALS} signatures verified"));
    }
    if forgeries_rejected != forgeries_total {
        failures.push(format!(
            "only {forgeries_rejected}/{forgeries_total} forgeries rejected"
        ));
    }
    let elapsed = start.elapsed();
    if elapsed >= TIME_LIMIT {
        failures.push(format!("took {elapsed:.2?}, limit {TIME_LIMIT:?}"));
    }
    verdict(
        1,
        "crypto suite",
        failures,
        format!(
            "{TRIALS}/{TRIALS} round trips, {TRIALS}/{TRIALS} wrong-key rejections, \
             {TRIALS}/{TRIALS} signatures, {forgeries_total}/{forgeries_total} forgeries \
             rejected in {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_2_bilinearity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let params = GroupParams::new(101).unwrap();
    let p = params.modulus();
    let mut checks = 0u64;
    'outer: for a in 0..p {
        for b in 0..p {
            let base = params.pair(Element(a), Element(b));
            for c in 0..p {
                let lhs = params.pair(params.scalar_mul(c, Element(a)), Element(b));
                let rhs = params.scalar_mul(c, base);
                checks += 1;
                if lhs != rhs {
                    failures.push(format!("pair({a}*{c}, {b}) != {c}*pair({a}, {b})"));
                    break 'outer;
                }
            }
        }
    }
    let expected = p * p * p;
    if checks != expected {
        failures.push(format!("ran {checks} checks, expected {expected}"));
    }
    let elapsed = start.elapsed();
    if elapsed >= TIME_LIMIT {
        failures.push(format!("took {elapsed:.2?}, limit {TIME_LIMIT:?}"));
    }
    verdict(
        2,
        "bilinearity",
        failures,
        format!("{checks} exhaustive checks at p = {p} in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_3_protocol_completeness() {
    let mut failures = Vec::new();
    let cfg = config();

    let cold = run_scenario("attach-cold", &cfg, 7).unwrap();
    let first = &cold.auth_runs[0];
    if !(first.authenticated && first.keys_match) {
        failures.push(format!(
            "cold run: authenticated {} keys_match {}",
            first.authenticated, first.keys_match
        ));
    }
    if cold.metrics.backhaul_msgs != 2 {
        failures.push(format!(
            "cold window carried {} backhaul messages, expected exactly 2",
            cold.metrics.backhaul_msgs
        ));
    }
    let backhaul_kinds: Vec<&str> = cold
        .transcript
        .iter()
        .filter(|e| e.interface == Interface::Backhaul)
        .map(|e| e.decoded.kind())
        .collect();
    if backhaul_kinds != ["hn-auth-request", "hn-auth-response"] {
        failures.push(format!("cold backhaul kinds {backhaul_kinds:?}"));
    }

    let warm = run_scenario("attach-warm", &cfg, 7).unwrap();
    let run = &warm.auth_runs[0];
    if !(run.authenticated && run.keys_match) {
        failures.push(format!(
            "warm run: authenticated {} keys_match {}",
            run.authenticated, run.keys_match
        ));
    }
    if warm.metrics.backhaul_msgs != 0 {
        failures.push(format!(
            "warm window carried {} backhaul messages, expected exactly 0",
            warm.metrics.backhaul_msgs
        ));
    }
    verdict(
        3,
        "protocol completeness",
        failures,
        format!(
            "cold: auth ok, {} backhaul msgs; warm: auth ok, {} backhaul msgs; \
             session keys byte-equal on both paths",
            cold.metrics.backhaul_msgs, warm.metrics.backhaul_msgs
        ),
    );
}

#[test]
fn criterion_4_privacy() {
    let mut failures = Vec::new();
    let cfg = config();
    let imsis = registered_imsis(&cfg);

    let mut scanned = 0usize;
    for name in SCENARIO_NAMES {
        if name == "legacy-baseline" {
            continue;
        }
        let report = run_scenario(name, &cfg, 7).unwrap();
        for entry in &report.transcript {
            if entry.interface != Interface::Air {
                continue;
            }
            scanned += 1;
            for imsi in &imsis {
                if entry.decoded.cleartext_contains(imsi.as_bytes()) {
                    failures.push(format!(
                        "{name}: cleartext identity in a {} from {}",
                        entry.decoded.kind(),
                        entry.sender
                    ));
                }
            }
        }
        if name == "pic-attack" {
            let observer = &report.attacks[0];
            if observer.learned_imsi {
                failures.push("pic-attack: the passive observer learned an identity".into());
            }
        }
    }

    let legacy = run_scenario("legacy-baseline", &cfg, 7).unwrap();
    let observer = &legacy.attacks[0];
    if !observer.learned_imsi {
        failures.push("legacy-baseline: the passive observer missed the cleartext identity".into());
    }
    verdict(
        4,
        "privacy",
        failures,
        format!(
            "{scanned} radio-link entries across {} scenarios carry no cleartext identity; \
             the baseline leaks as expected",
            SCENARIO_NAMES.len() - 1
        ),
    );
}

#[test]
fn criterion_5_active_attacker_defense() {
    let mut failures = Vec::new();
    let cfg = config();
    let params = cfg.group_params();
    let map: MncLenMap = cfg.hn.mnc_len_map.clone();
    let start = cfg.start_time();

    let build = |seed: u64| -> (SimNetwork, HnState, UeState) {
        let mut net = SimNetwork::new(start, ChaCha20Rng::seed_from_u64(seed));
        let mut hn = HnState::new(cfg.hnid(), params, map.clone(), &mut net.rng);
        let imsi = parse_imsi(&cfg.ues[0].imsi, &map).unwrap();
        let et_ue = ExpiryTime::parse(&cfg.ues[0].et_ue).unwrap();
        let creds = hn.provision_ue(&imsi, et_ue, &mut net.rng).unwrap();
        (net, hn, UeState::new(params, creds))
    };
    let rogue = NetId::parse("66601").unwrap();

    // An outsider knowing the victim's identity still loses at the
    // signature check, and the sealed attach resists its key guessing.
    let (mut net, hn, mut ue) = build(0xA1C);
    let hint = AttackHint {
        imsi: ue.creds().imsi.digits(),
        et_ue: ue.creds().et_ue,
    };
    let outsider = Aic::new("aic-66601", rogue.clone(), params, hn.mpk());
    let outcome = outsider.run(&mut net, &mut ue, "ue-1", Some(&hint));
    if outcome.auth_completed {
        failures.push("the outsider completed an authentication".into());
    }
    if outcome.learned_imsi {
        failures.push("the outsider learned the identity".into());
    }
    if outcome.decrypt_attempts != DEFAULT_MAX_DECRYPT_ATTEMPTS {
        failures.push(format!(
            "expected {DEFAULT_MAX_DECRYPT_ATTEMPTS} decrypt attempts, saw {}",
            outcome.decrypt_attempts
        ));
    }
    if outcome.ue_abort.as_deref() != Some(UeAbort::InvalidNetworkSignature.to_string().as_str())
    {
        failures.push(format!(
            "expected the abort at the signature check, got {:?}",
            outcome.ue_abort
        ));
    }
    if net
        .transcript()
        .iter()
        .any(|e| e.decoded.kind() == "ue-auth-response")
    {
        failures.push("the subscriber answered the forged challenge".into());
    }
    if ue.session_key().is_some() {
        failures.push("the subscriber derived a session key for the outsider".into());
    }

    // A compromised network holding a genuinely granted key succeeds —
    // until the day identity the key was issued for expires.
    let (mut net, mut hn, mut ue) = build(0xA1D);
    let now = net.clock.now();
    let Ok(Message::SnKeyResponse { key, et, mpk }) = hn.issue_sn_key(&rogue, now) else {
        panic!("key issuance failed");
    };
    let compromised = Aic::new("aic-66601", rogue, params, hn.mpk())
        .with_granted(KeyTableEntry { key, et, mpk });
    let live = compromised.run(&mut net, &mut ue, "ue-1", None);
    if !(live.auth_completed && live.learned_imsi) {
        failures.push(format!(
            "the compromised network failed inside the key window: auth {} learned {}",
            live.auth_completed, live.learned_imsi
        ));
    }
    net.clock.advance(TimeDelta::days(1));
    ue.reset();
    let stale = compromised.run(&mut net, &mut ue, "ue-1", Some(&hint));
    if stale.auth_completed || stale.learned_imsi {
        failures.push(format!(
            "the compromised network still worked after expiry: auth {} learned {}",
            stale.auth_completed, stale.learned_imsi
        ));
    }
    verdict(
        5,
        "active-attacker defense",
        failures,
        format!(
            "outsider defeated at the signature check after {} futile key guesses; \
             granted key worked once, then expired",
            outcome.decrypt_attempts
        ),
    );
}

#[test]
fn criterion_6_revocation() {
    let mut failures = Vec::new();
    let report = run_scenario("revoked-ue", &config(), 7).unwrap();

    let expect = [
        ("warm", "revoked"),
        ("cold", "revoked"),
        ("warm", "expired"),
    ];
    if report.auth_runs.len() != expect.len() {
        failures.push(format!("{} runs, expected {}", report.auth_runs.len(), expect.len()));
    }
    for (run, (path, reject)) in report.auth_runs.iter().zip(expect) {
        let path_ok = format!("{:?}", run.path).to_lowercase() == path;
        if !path_ok || run.reject.as_deref() != Some(reject) {
            failures.push(format!(
                "expected a {path} rejection {reject:?}, got {:?} {:?}",
                run.path, run.reject
            ));
        }
        if run.authenticated {
            failures.push("a revoked subscriber authenticated".into());
        }
    }
    for check in &report.checks {
        if !check.passed {
            failures.push(format!("check {} failed: {}", check.name, check.detail));
        }
    }
    verdict(
        6,
        "revocation",
        failures,
        "rejected locally when warm, at the home network when cold, and by expiry \
         after the pruned lists emptied"
            .to_string(),
    );
}

#[test]
fn criterion_7_flow_comparison() {
    let mut failures = Vec::new();
    let rows = compare_all(&FlowSizes::default());
    let expectations = check_expectations(&rows);
    for e in &expectations {
        if !e.satisfied {
            failures.push(format!("{}: {}", e.name, e.detail));
        }
    }
    let count = expectations.len();
    verdict(
        7,
        "flow comparison",
        failures,
        format!("all {count} comparison expectations satisfied"),
    );
}

#[test]
fn criterion_8_determinism() {
    let mut failures = Vec::new();
    let cfg = config();

    for name in SCENARIO_NAMES {
        let a = run_scenario(name, &cfg, 11).unwrap();
        let b = run_scenario(name, &cfg, 11).unwrap();
        if transcript_to_jsonl(&a.transcript) != transcript_to_jsonl(&b.transcript) {
            failures.push(format!("{name}: equal seeds diverged"));
        }
    }

    let attach_bytes = |seed: u64| {
        run_scenario("attach-cold", &cfg, seed)
            .unwrap()
            .transcript
            .iter()
            .find(|e| e.decoded.kind() == "attach-request")
            .map(|e| e.bytes.clone())
            .expect("the cold attach sends a sealed request")
    };
    if attach_bytes(11) == attach_bytes(12) {
        failures.push("different seeds produced identical sealed attaches".into());
    }
    verdict(
        8,
        "determinism",
        failures,
        format!(
            "{} scenarios byte-identical under equal seeds; sealed attach varies with the seed",
            SCENARIO_NAMES.len()
        ),
    );
}
