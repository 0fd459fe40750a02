//! Command-line front end for the attach simulator: named scenario
//! runs, the scheme comparison table, and crypto self-tests.
//!
//! Exit codes are the contract: 0 on success, 1 when a scenario check
//! or self-test fails, 2 on usage or configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use ibesim_core::crypto::group::GroupParams;
use ibesim_core::crypto::ibe::{extract, ibe_decrypt, ibe_encrypt, setup};
use ibesim_core::crypto::ibs::{ibs_sign, ibs_verify, IbsSignature};
use ibesim_core::crypto::Element;
use ibesim_core::flows::{check_expectations, compare_all, render_table};
use ibesim_core::identity::{make_identity, ExpiryTime};
use ibesim_core::{run_scenario, transcript_to_jsonl, Config, ScenarioError};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "ibesim",
    version,
    about = "Deterministic simulator for an identity-based attach protocol",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named scenario and report its checks.
    Run {
        /// Scenario name (see `run help` for the list).
        scenario: String,
        /// JSON configuration file (defaults to the built-in population).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Simulation seed (defaults to the configured one).
        #[arg(long)]
        seed: Option<u64>,
        /// Write the message transcript as JSON Lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the full run report (metrics, outcomes, checks) as JSON.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Compare all modeled attach schemes and check the expectations.
    Compare {
        /// JSON configuration file (defaults to the built-in population).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write rows and expectation verdicts as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the crypto property self-tests.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            config,
            seed,
            trace,
            metrics,
        } => cmd_run(&scenario, config, seed, trace, metrics),
        Command::Compare { config, out } => cmd_compare(config, out),
        Command::Selftest => cmd_selftest(),
    }
    .unwrap_or_else(|(code, message)| {
        eprintln!("error: {message}");
        ExitCode::from(code)
    })
}

type CmdResult = Result<ExitCode, (u8, String)>;

fn load_config(path: Option<&PathBuf>) -> Result<Config, (u8, String)> {
    let Some(path) = path else {
        return Ok(Config::builtin_default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    Config::from_json_str(&text)
        .map_err(|e| (EXIT_USAGE, format!("invalid config {}: {e}", path.display())))
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), (u8, String)> {
    fs::write(path, contents)
        .map_err(|e| (EXIT_USAGE, format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(
    scenario: &str,
    config: Option<PathBuf>,
    seed: Option<u64>,
    trace: Option<PathBuf>,
    metrics: Option<PathBuf>,
) -> CmdResult {
    let config = load_config(config.as_ref())?;
    let seed = seed.unwrap_or(config.sim.seed);
    let report = match run_scenario(scenario, &config, seed) {
        Ok(report) => report,
        Err(err @ ScenarioError::UnknownScenario { .. }) => {
            return Err((EXIT_USAGE, err.to_string()));
        }
        Err(err @ ScenarioError::Config(_)) => return Err((EXIT_USAGE, err.to_string())),
        Err(err) => return Err((EXIT_CHECK_FAILED, err.to_string())),
    };

    println!("scenario {} (seed {seed})", report.scenario);
    for check in &report.checks {
        let verdict = if check.passed { "pass" } else { "FAIL" };
        println!("  check {}: {verdict} — {}", check.name, check.detail);
    }
    let m = &report.metrics;
    println!(
        "metrics: air {} msgs / {} B, backhaul {} msgs / {} B, round trips {} air / {} backhaul",
        m.air_msgs, m.air_bytes, m.backhaul_msgs, m.backhaul_bytes,
        m.ue_sn_round_trips, m.sn_hn_round_trips
    );

    if let Some(path) = &trace {
        write_file(path, &transcript_to_jsonl(&report.transcript))?;
    }
    if let Some(path) = &metrics {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| (EXIT_CHECK_FAILED, format!("report serialization failed: {e}")))?;
        write_file(path, &json)?;
    }

    let (passed, total) = (
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len(),
    );
    if report.all_checks_passed() {
        println!("result: PASS ({passed}/{total} checks)");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("result: FAIL ({passed}/{total} checks)");
        Ok(ExitCode::from(EXIT_CHECK_FAILED))
    }
}

fn cmd_compare(config: Option<PathBuf>, out: Option<PathBuf>) -> CmdResult {
    let config = load_config(config.as_ref())?;
    let rows = compare_all(&config.sizes);
    let expectations = check_expectations(&rows);

    println!("{}", render_table(&rows));
    for e in &expectations {
        let verdict = if e.satisfied { "pass" } else { "FAIL" };
        println!("  expectation {}: {verdict} — {}", e.name, e.detail);
    }

    if let Some(path) = &out {
        let json = serde_json::json!({ "rows": rows, "expectations": expectations });
        let text = serde_json::to_string_pretty(&json)
            .map_err(|e| (EXIT_CHECK_FAILED, format!("table serialization failed: {e}")))?;
        write_file(path, &text)?;
    }

    let satisfied = expectations.iter().filter(|e| e.satisfied).count();
    if satisfied == expectations.len() {
        println!("result: PASS ({satisfied}/{} expectations)", expectations.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("result: FAIL ({satisfied}/{} expectations)", expectations.len());
        Ok(ExitCode::from(EXIT_CHECK_FAILED))
    }
}

/// Randomized property suites over the crypto layer, smaller than the
/// release gate but covering the same ground.
fn cmd_selftest() -> CmdResult {
    const TRIALS: usize = 250;
    let params = GroupParams::default();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5E1F);
    let keys = setup(&params, &mut rng);
    let et = ExpiryTime::parse("20250101T000000Z").expect("literal timestamp");
    let mut failed = false;
    let mut suite = |name: &str, ok: bool, detail: String| {
        println!("selftest {name}: {} — {detail}", if ok { "ok" } else { "FAIL" });
        failed |= !ok;
    };

    let random_digits = |rng: &mut ChaCha20Rng, len: usize| -> String {
        (0..len)
            .map(|_| char::from(b'0' + rng.random_range(0..10) as u8))
            .collect()
    };

    let mut round_trips = 0;
    let mut rejections = 0;
    let mut verified = 0;
    let mut forgeries_rejected = 0;
    for _ in 0..TRIALS {
        let base_a = random_digits(&mut rng, 12);
        let mut base_b = random_digits(&mut rng, 12);
        while base_b == base_a {
            base_b = random_digits(&mut rng, 12);
        }
        let id_a = make_identity(&base_a, et).expect("digit base");
        let id_b = make_identity(&base_b, et).expect("digit base");
        let key_a = extract(&params, keys.msk, &id_a);
        let key_b = extract(&params, keys.msk, &id_b);

        let mut plaintext = vec![0u8; rng.random_range(0..=48)];
        rng.fill_bytes(&mut plaintext);
        let ct = ibe_encrypt(&params, keys.mpk, &id_a, &plaintext, &mut rng)
            .expect("plaintext within bounds");
        round_trips += usize::from(ibe_decrypt(&params, &key_a, &ct).as_deref() == Ok(&plaintext[..]));
        rejections += usize::from(ibe_decrypt(&params, &key_b, &ct).is_err());

        let mut message = vec![0u8; rng.random_range(1..=48)];
        rng.fill_bytes(&mut message);
        let sig = ibs_sign(&params, &key_a, &message, &mut rng);
        verified += usize::from(ibs_verify(&params, keys.mpk, &id_a, &message, &sig));
        let mut mutated = message.clone();
        mutated[0] ^= 0x01;
        let tampered = IbsSignature {
            u: params.add(sig.u, Element(1)),
            v: sig.v,
        };
        forgeries_rejected += usize::from(!ibs_verify(&params, keys.mpk, &id_a, &mutated, &sig));
        forgeries_rejected += usize::from(!ibs_verify(&params, keys.mpk, &id_a, &message, &tampered));
        forgeries_rejected += usize::from(!ibs_verify(&params, keys.mpk, &id_b, &message, &sig));
    }
    suite(
        "encrypt/decrypt round trip",
        round_trips == TRIALS,
        format!("{round_trips}/{TRIALS}"),
    );
    suite(
        "wrong-key rejection",
        rejections == TRIALS,
        format!("{rejections}/{TRIALS}"),
    );
    suite(
        "signature completeness",
        verified == TRIALS,
        format!("{verified}/{TRIALS}"),
    );
    suite(
        "forgery rejection",
        forgeries_rejected == 3 * TRIALS,
        format!("{forgeries_rejected}/{}", 3 * TRIALS),
    );

    let small = GroupParams::new(101).expect("101 is a valid modulus");
    let p = small.modulus();
    let mut pairing_ok = true;
    for a in 0..p {
        for b in 0..p {
            let base = small.pair(Element(a), Element(b));
            for c in 0..p {
                if small.pair(small.scalar_mul(c, Element(a)), Element(b))
                    != small.scalar_mul(c, base)
                {
                    pairing_ok = false;
                }
            }
        }
    }
    suite(
        "pairing linearity",
        pairing_ok,
        format!("{} exhaustive checks at p = {p}", p * p * p),
    );

    if failed {
        println!("result: FAIL");
        Ok(ExitCode::from(EXIT_CHECK_FAILED))
    } else {
        println!("result: PASS");
        Ok(ExitCode::SUCCESS)
    }
}
