//! The `run` command: named scenarios, their expected outcome and the
//! JSON report and board transcript they leave behind.
//!
//! Exit status 0 means the scenario ended as expected (an honest run
//! names the right winner, an attack succeeds with its countermeasure off
//! and is stopped with it on), 1 means it did not, 2 means the run itself
//! failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::json;

use crate::adversary::{
    self, default_losing_cell, AffineClaim, AttackReport, AttackerExponent, NoiseRemover,
};
use crate::defenses::DefenseFlags;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::protocol::{expected_winner, AuctionConfig, AuctionRun, Cell, Honest, Outcome, RunEvent};
use crate::recovery::{apply_f, build_matrix, recover_bids_counted, RecoveredBids};
use crate::sigma::{self, FiatShamir, FixedChallenge, ProofMode, Prover, ProverSession, RandomVerifier};

pub const SEED_ENV: &str = "BRANDT_LAB_SEED";

#[derive(Parser, Debug)]
#[command(name = "brandt-lab", version, about = "Sealed-bid auction lab: honest runs, attacks and countermeasures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one scenario and write report.json and transcript.json.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Honest,
    FullPrivacyAttack,
    MitmDemo,
    ForgedEqdl,
    Impersonation,
    ExceptionalValues,
    WrongKey,
    RecoveryBench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupChoice {
    Small,
    Large,
    Custom,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Comma-separated prices, one per bidder. Drawn from the seed if absent.
    #[arg(long)]
    pub bids: Option<String>,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GroupChoice::Small)]
    pub group: GroupChoice,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    /// Bid marker; `g^2` if absent.
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long)]
    pub ni_proofs: bool,
    #[arg(long)]
    pub authenticate: bool,
    #[arg(long)]
    pub noise_product_check: bool,
    #[arg(long)]
    pub key_consistency: bool,
    #[arg(long)]
    pub unblinded_product_check: bool,
    /// The four countermeasures above except the unblinded-product check.
    #[arg(long)]
    pub all_defenses: bool,
    /// `one`, `random` or a nonzero integer.
    #[arg(long, default_value = "one")]
    pub attacker_exponent: String,
    /// Mallory's bidder index for the noise-removal scenarios; defaults to the last bidder.
    #[arg(long)]
    pub mallory: Option<usize>,
    /// Bidder whose price the impersonation attack is after.
    #[arg(long, default_value_t = 1)]
    pub target: usize,
    /// Re-randomize the impersonated bid copies.
    #[arg(long)]
    pub rerandomize: bool,
    /// Cell `i,j` for the exceptional-values scenario.
    #[arg(long)]
    pub cell: Option<String>,
    /// Bidder that cheats in the exceptional-values and wrong-key scenarios.
    #[arg(long, default_value_t = 1)]
    pub cheater: usize,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// A validated `run` invocation.
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub k: usize,
    pub bids: Vec<usize>,
    pub seed: u64,
    pub params: GroupParams,
    pub big_y: GroupElement,
    pub defenses: DefenseFlags,
    pub exponent: AttackerExponent,
    pub mallory: usize,
    pub target: usize,
    pub rerandomize: bool,
    pub cell: Option<Cell>,
    pub cheater: usize,
    pub out_dir: Option<PathBuf>,
    pub warnings: Vec<String>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_big(flag: &str, value: &str) -> Result<BigUint> {
    value
        .trim()
        .parse::<BigUint>()
        .map_err(|_| usage(format!("--{flag}: {value:?} is not a decimal integer")))
}

fn parse_exponent(value: &str) -> Result<AttackerExponent> {
    match value {
        "one" | "1" => Ok(AttackerExponent::One),
        "random" => Ok(AttackerExponent::Random),
        other => other
            .parse::<u64>()
            .ok()
            .filter(|&t| t > 0)
            .map(AttackerExponent::Fixed)
            .ok_or_else(|| usage(format!("--attacker-exponent: expected one, random or a positive integer, got {other:?}"))),
    }
}

fn parse_cell(value: &str, n: usize, k: usize) -> Result<Cell> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let bad = || usage(format!("--cell: expected i,j with 1 <= i <= {n} and 1 <= j <= {k}, got {value:?}"));
    let [i, j] = parts.as_slice() else { return Err(bad()) };
    let (i, j) = (i.parse::<usize>().map_err(|_| bad())?, j.parse::<usize>().map_err(|_| bad())?);
    if !(1..=n).contains(&i) || !(1..=k).contains(&j) {
        return Err(bad());
    }
    Ok((i, j))
}

fn check_index(flag: &str, value: usize, n: usize) -> Result<usize> {
    if (1..=n).contains(&value) {
        Ok(value)
    } else {
        Err(usage(format!("--{flag}: bidder {value} does not exist (n = {n})")))
    }
}

/// Random prices in `1..=k` from the seed.
pub fn seeded_bids(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xb1d5);
    (0..n).map(|_| rng.gen_range(1..=k)).collect()
}

impl ScenarioSpec {
    pub fn from_args(args: RunArgs) -> Result<Self> {
        let (n, k) = (args.n, args.k);
        if n == 0 {
            return Err(usage("--n: need at least one bidder"));
        }
        if k == 0 {
            return Err(usage("--k: need at least one price"));
        }
        let bids = match &args.bids {
            Some(list) => {
                let bids = list
                    .split(',')
                    .map(|b| b.trim().parse::<usize>().map_err(|_| usage(format!("--bids: {b:?} is not a price"))))
                    .collect::<Result<Vec<_>>>()?;
                if bids.len() != n {
                    return Err(usage(format!("--bids: {} prices given but --n is {n}", bids.len())));
                }
                if let Some(b) = bids.iter().find(|&&b| b == 0 || b > k) {
                    return Err(usage(format!("--bids: price {b} is outside 1..={k}")));
                }
                bids
            }
            None => seeded_bids(n, k, args.seed),
        };
        let params = match args.group {
            GroupChoice::Small => GroupParams::small(),
            GroupChoice::Large => GroupParams::large(),
            GroupChoice::Custom => {
                let need = |flag: &str, v: &Option<String>| {
                    v.as_deref()
                        .ok_or_else(|| usage(format!("--{flag} is required with --group custom")))
                        .and_then(|s| parse_big(flag, s))
                };
                let (p, q, g) = (need("p", &args.p)?, need("q", &args.q)?, need("g", &args.g)?);
                GroupParams::new(p, q, g).map_err(|e| usage(format!("--p/--q/--g: {e}")))?
            }
        };
        if args.group != GroupChoice::Custom && (args.p.is_some() || args.q.is_some() || args.g.is_some()) {
            return Err(usage("--p/--q/--g: only valid with --group custom"));
        }
        let big_y = match &args.y {
            Some(y) => {
                let y = params
                    .element(parse_big("y", y)?)
                    .map_err(|_| usage(format!("--y: {y} is not in the subgroup")))?;
                if y.is_one() {
                    return Err(usage("--y: the marker must not be 1"));
                }
                y
            }
            None => params.exp_g(&params.scalar(2u32)),
        };
        let mut defenses = if args.all_defenses {
            DefenseFlags::all()
        } else {
            DefenseFlags::none()
        };
        defenses.ni_proofs |= args.ni_proofs;
        defenses.authenticate |= args.authenticate;
        defenses.noise_product_check |= args.noise_product_check;
        defenses.key_consistency |= args.key_consistency;
        defenses.unblinded_product_check |= args.unblinded_product_check;

        let is_crypto = args.scenario != ScenarioKind::RecoveryBench;
        if is_crypto && params.q() <= &BigUint::from(n) {
            return Err(usage(format!("--n: {n} bidders need q > n, but q = {}", params.q())));
        }
        let mut warnings = Vec::new();
        if args.scenario == ScenarioKind::FullPrivacyAttack && defenses.ni_proofs {
            warnings.push("full-privacy-attack with non-interactive proofs: expecting the attack to be blocked".into());
        }
        let cell = args.cell.as_deref().map(|c| parse_cell(c, n, k)).transpose()?;
        Ok(ScenarioSpec {
            scenario: args.scenario,
            n,
            k,
            bids,
            seed: args.seed,
            params,
            big_y,
            defenses,
            exponent: parse_exponent(&args.attacker_exponent)?,
            mallory: check_index("mallory", args.mallory.unwrap_or(n), n)?,
            target: check_index("target", args.target, n)?,
            rerandomize: args.rerandomize,
            cell,
            cheater: check_index("cheater", args.cheater, n)?,
            out_dir: args.out_dir,
            warnings,
        })
    }

    pub fn config(&self) -> Result<AuctionConfig> {
        Ok(AuctionConfig::new(self.params.clone(), self.n, self.k)?
            .with_y(self.big_y.clone())?
            .with_defenses(self.defenses))
    }
}

/// Parses `brandt-lab run ...` into a spec.
pub fn parse_args<I, T>(argv: I) -> Result<ScenarioSpec>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(e.to_string()))?;
    let Command::Run(args) = cli.command;
    ScenarioSpec::from_args(args)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    CorrectWinner,
    AttackSucceeds,
    AttackBlocked,
    BoundHolds,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub p: String,
    pub q: String,
    pub g: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub group: GroupReport,
    pub y: String,
    pub proof_mode: ProofMode,
}

/// Contents of report.json, in field order.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: ScenarioKind,
    pub params: ParamsReport,
    pub defenses: DefenseFlags,
    pub expectation: Expectation,
    pub matched: bool,
    pub true_bids: Vec<usize>,
    pub winner: Option<Outcome>,
    pub expected_winner: Option<Outcome>,
    pub recovered: Option<Vec<usize>>,
    pub success: Option<bool>,
    /// The rejection that stopped the run, if any.
    pub blocked_by: Option<String>,
    pub events: Vec<RunEvent>,
    pub op_count: Option<u64>,
    pub op_bound: Option<u64>,
    pub details: serde_json::Value,
    pub warnings: Vec<String>,
    pub transcript: Option<String>,
}

pub struct ScenarioOutput {
    pub report: Report,
    /// transcript.json contents.
    pub transcript: String,
}

impl ScenarioOutput {
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.report.matched)
    }
}

impl Report {
    fn new(spec: &ScenarioSpec, expectation: Expectation) -> Self {
        let crypto = spec.scenario != ScenarioKind::RecoveryBench;
        Report {
            scenario: spec.scenario,
            params: ParamsReport {
                n: spec.n,
                k: spec.k,
                seed: spec.seed,
                group: GroupReport {
                    p: spec.params.p().to_string(),
                    q: spec.params.q().to_string(),
                    g: spec.params.generator().to_string(),
                },
                y: spec.big_y.to_string(),
                proof_mode: spec.defenses.proof_mode(),
            },
            defenses: spec.defenses,
            expectation,
            matched: false,
            true_bids: spec.bids.clone(),
            winner: None,
            expected_winner: crypto.then(|| expected_winner(&spec.bids)),
            recovered: None,
            success: None,
            blocked_by: None,
            events: Vec::new(),
            op_count: None,
            op_bound: None,
            details: json!({}),
            warnings: spec.warnings.clone(),
            transcript: None,
        }
    }

    fn attack(mut self, attack: Result<AttackReport>) -> Result<Self> {
        match attack {
            Ok(r) => {
                self.winner = r.outcome;
                self.recovered = r.recovered_bids;
                self.success = Some(r.success);
                self.events = r.events;
            }
            Err(e) if e.is_detection() => {
                self.success = Some(false);
                self.blocked_by = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        let blocked_expected = self.expectation == Expectation::AttackBlocked;
        self.matched = self.success == Some(!blocked_expected);
        Ok(self)
    }
}

fn attack_expectation(blocked: bool) -> Expectation {
    if blocked {
        Expectation::AttackBlocked
    } else {
        Expectation::AttackSucceeds
    }
}

/// Runs one scenario. Errors are internal failures (exit status 2).
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioOutput> {
    let d = spec.defenses;
    match spec.scenario {
        ScenarioKind::Honest => {
            let mut run = AuctionRun::new(spec.config()?, &spec.bids, spec.seed)?;
            let result = run.execute(&mut Honest)?;
            let mut report = Report::new(spec, Expectation::CorrectWinner);
            report.matched = Some(&result.outcome) == report.expected_winner.as_ref();
            report.winner = Some(result.outcome.clone());
            report.events = result.events.clone();
            report.details = json!({ "v": result.v, "epoch": result.epoch });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::FullPrivacyAttack => {
            let blocked = d.ni_proofs || (d.unblinded_product_check && spec.exponent == AttackerExponent::One);
            let mut run = AuctionRun::new(spec.config()?, &spec.bids, spec.seed)?;
            let attack = adversary::full_privacy_attack_on(&mut run, spec.mallory, spec.exponent);
            let mut report = Report::new(spec, attack_expectation(blocked)).attack(attack)?;
            report.details = json!({ "mallory": spec.mallory, "attacker_exponent": spec.exponent });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::MitmDemo => mitm_demo(spec),
        ScenarioKind::ForgedEqdl => {
            let mut run = AuctionRun::new(spec.config()?, &spec.bids, spec.seed)?;
            let t = spec.exponent.draw(&spec.params, run.rng())?;
            let outcome = run.execute(&mut NoiseRemover { mallory: spec.mallory, t });
            let mut report = Report::new(spec, attack_expectation(d.ni_proofs));
            let accepted = run.view().outcome(spec.mallory).is_some();
            match outcome {
                Ok(result) => {
                    report.winner = Some(result.outcome);
                    report.events = result.events;
                }
                Err(e) if e.is_detection() => report.blocked_by = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            report.success = Some(accepted);
            report.matched = accepted != d.ni_proofs;
            report.details = json!({ "mallory": spec.mallory, "forged_outcome_post_accepted": accepted });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::Impersonation => {
            let blocked = d.authenticate || (d.ni_proofs && spec.rerandomize);
            let mut run = AuctionRun::new(spec.config()?, &spec.bids, spec.seed)?;
            let attack = adversary::impersonation_attack_on(&mut run, spec.target, spec.rerandomize);
            let mut report = Report::new(spec, attack_expectation(blocked)).attack(attack)?;
            report.details = json!({ "target": spec.target, "rerandomize": spec.rerandomize });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::ExceptionalValues => {
            let config = spec.config()?;
            let cell = match spec.cell {
                Some(c) => c,
                None => default_losing_cell(&config, &spec.bids)?,
            };
            let mut run = AuctionRun::new(config, &spec.bids, spec.seed)?;
            let attack = adversary::force_zero_noise_on(&mut run, spec.cheater, cell);
            let mut report = Report::new(spec, attack_expectation(d.noise_product_check)).attack(attack)?;
            report.details = json!({ "colluder": spec.cheater, "cell": cell });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::WrongKey => {
            let mut run = AuctionRun::new(spec.config()?, &spec.bids, spec.seed)?;
            let attack = adversary::wrong_key_decrypt_on(&mut run, spec.cheater, spec.params.one());
            let mut report = Report::new(spec, attack_expectation(d.key_consistency)).attack(attack)?;
            report.details = json!({ "cheater": spec.cheater, "key_offset": 1 });
            Ok(ScenarioOutput {
                report,
                transcript: run.board().to_json(),
            })
        }
        ScenarioKind::RecoveryBench => recovery_bench(spec),
    }
}

fn mitm_demo(spec: &ScenarioSpec) -> Result<ScenarioOutput> {
    let p = &spec.params;
    let mode = spec.defenses.proof_mode();
    let blocked = spec.defenses.ni_proofs;
    let mut report = Report::new(spec, attack_expectation(blocked));
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut runs = Vec::new();
    let mut accepted = 0usize;
    let mut rejected = Vec::new();
    const CLAIMS: usize = 100;
    for i in 0..CLAIMS {
        let x = p.random_scalar(&mut rng);
        let claim = AffineClaim::new(
            p.random_scalar(&mut rng),
            rng.gen_range(-10i64..=10),
            rng.gen_range(-10i64..=10),
        );
        let mut peggy = ProverSession::pdl(p, &p.generator(), x, mode);
        let result = match mode {
            ProofMode::InteractiveMalleable => {
                let mut victor = RandomVerifier::new(p, spec.seed.wrapping_add(i as u64));
                adversary::mitm_affine_pdl(p, &claim, &mut peggy, &mut victor, &mut rng).map(|run| {
                    let ok = sigma::verify(p, &run.statement, &run.victor)
                        && victor.issued(&run.statement, &run.victor.commitments, &run.victor.challenge);
                    (run, ok)
                })
            }
            ProofMode::FiatShamir => {
                adversary::mitm_affine_pdl(p, &claim, &mut peggy, &mut FiatShamir::new(p), &mut rng).map(|run| {
                    let ok = sigma::verify(p, &run.statement, &run.victor)
                        && run.victor.challenge == sigma::fiat_shamir_challenge(p, &run.statement, &run.victor.commitments);
                    (run, ok)
                })
            }
        };
        match result {
            Ok((run, ok)) => {
                accepted += usize::from(ok);
                runs.push(json!({ "claim": claim, "victor": run.victor, "peggy": run.peggy, "accepted": ok }));
            }
            Err(e) if e.is_detection() => rejected.push(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    let mut details = json!({ "claims": CLAIMS, "accepted": accepted, "refused": rejected.len() });
    if spec.params == GroupParams::small() && mode == ProofMode::InteractiveMalleable {
        details["one_minus_x"] = one_minus_x_instance(p)?;
    }
    report.success = Some(accepted == CLAIMS);
    report.blocked_by = rejected.first().cloned();
    report.matched = report.success == Some(!blocked);
    report.details = details;
    Ok(ScenarioOutput {
        report,
        transcript: serde_json::to_string_pretty(&runs).expect("transcripts serialize"),
    })
}

/// Peggy commits with a fixed nonce.
struct FixedNoncePeggy {
    session: ProverSession,
    nonce: crate::group::Scalar,
}

impl Prover for FixedNoncePeggy {
    fn statement(&self) -> &sigma::SigmaStatement {
        self.session.statement()
    }

    fn commit(&mut self, _: &mut dyn RngCore) -> Result<Vec<GroupElement>> {
        self.session.commit_with_nonce(self.nonce.clone())
    }

    fn respond(&mut self, challenge: &crate::group::Scalar) -> Result<Vec<crate::group::Scalar>> {
        self.session.respond(challenge)
    }
}

/// Mallory proving knowledge of `1 - x` from Peggy's `x = 3`, nonce 4,
/// challenge 2.
fn one_minus_x_instance(p: &GroupParams) -> Result<serde_json::Value> {
    let g = p.generator();
    let mut peggy = FixedNoncePeggy {
        session: ProverSession::pdl(p, &g, p.scalar(3u32), ProofMode::InteractiveMalleable),
        nonce: p.scalar(4u32),
    };
    let claim = AffineClaim::new(p.one(), 1, -1);
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let run = adversary::mitm_affine_pdl(p, &claim, &mut peggy, &mut FixedChallenge(p.scalar(2u32)), &mut rng)?;
    let sigma::SigmaStatement::Pdl { v: w, .. } = &run.statement else {
        unreachable!("affine claims are PDL statements")
    };
    Ok(json!({
        "x": 3,
        "v": p.exp_g(&p.scalar(3u32)),
        "w": w,
        "r": 4,
        "z": run.peggy.commitments[0],
        "y": run.victor.commitments[0],
        "c": run.victor.challenge,
        "s": run.peggy.response(),
        "u": run.victor.response(),
        "g_u": p.exp_g(run.victor.response()),
        "accepted": sigma::verify(p, &run.statement, &run.victor),
    }))
}

fn recovery_bench(spec: &ScenarioSpec) -> Result<ScenarioOutput> {
    let (n, k) = (spec.n, spec.k);
    let truth = RecoveredBids::from_prices(k, &spec.bids)?;
    let l = apply_f(&build_matrix(n, k), &truth.b)?;
    let recovery = recover_bids_counted(&l)?;
    let bound = (n as u64).pow(2) * (k as u64).pow(2);
    let mut report = Report::new(spec, Expectation::BoundHolds);
    let recovered = recovery.bids.prices();
    report.matched = recovered == spec.bids && recovery.additions <= bound;
    report.success = Some(recovered == spec.bids);
    report.recovered = Some(recovered);
    report.op_count = Some(recovery.additions);
    report.op_bound = Some(bound);
    Ok(ScenarioOutput {
        report,
        transcript: "[]".into(),
    })
}

/// Writes report.json and transcript.json into `dir`.
pub fn emit_report(output: &mut ScenarioOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("transcript.json"), format!("{}\n", output.transcript))?;
    output.report.transcript = Some("transcript.json".into());
    let report = serde_json::to_string_pretty(&output.report).expect("report serializes");
    std::fs::write(dir.join("report.json"), format!("{report}\n"))?;
    Ok(())
}

fn describe(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Winner { bidder, price } => format!("bidder {bidder} wins at price {price}"),
        Outcome::NoWinner => "no cell decrypted to 1".into(),
        Outcome::MultipleOnes { cells } => format!("several cells decrypted to 1: {cells:?}"),
    }
}

/// Human-readable lines for stdout.
pub fn summary(report: &Report) -> String {
    let mut out = String::new();
    let name = serde_json::to_value(report.scenario).expect("scenario name");
    let _ = writeln!(out, "scenario     {}", name.as_str().unwrap_or_default());
    let _ = writeln!(out, "bidders      {} prices {} seed {}", report.params.n, report.params.k, report.params.seed);
    let _ = writeln!(out, "proofs       {}", report.params.proof_mode.tag());
    if report.params.n <= 32 {
        let _ = writeln!(out, "true bids    {:?}", report.true_bids);
    }
    if let Some(w) = &report.winner {
        let _ = writeln!(out, "result       {}", describe(w));
    }
    if let (Some(r), true) = (&report.recovered, report.params.n <= 32) {
        let _ = writeln!(out, "recovered    {r:?}");
    }
    if let Some(b) = &report.blocked_by {
        let _ = writeln!(out, "blocked by   {b}");
    }
    if let (Some(ops), Some(bound)) = (report.op_count, report.op_bound) {
        let _ = writeln!(out, "additions    {ops} (bound {bound})");
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning      {w}");
    }
    let expectation = serde_json::to_value(report.expectation).expect("expectation name");
    let verdict = if report.matched { "as expected" } else { "MISMATCH" };
    let _ = writeln!(out, "expected     {} ... {verdict}", expectation.as_str().unwrap_or_default());
    out
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Command::Run(args) = cli.command;
    let spec = match ScenarioSpec::from_args(args) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let mut output = match run_scenario(&spec) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("internal error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = &spec.out_dir {
        if let Err(e) = emit_report(&mut output, dir) {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }
    print!("{}", summary(&output.report));
    ExitCode::from(output.exit_code())
}
