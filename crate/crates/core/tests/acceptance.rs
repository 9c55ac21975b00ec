//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines reach stdout; exits nonzero if any check fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use brandt_lab::adversary::{self, AffineClaim, AttackerExponent};
use brandt_lab::defenses::DefenseFlags;
use brandt_lab::group::{GroupElement, GroupParams, Scalar};
use brandt_lab::protocol::{
    base_factors, expected_winner, AuctionConfig, AuctionRun, Honest, Message, Outcome,
};
use brandt_lab::recovery::{
    apply_dense, apply_f, build_matrix, recover_bids, recover_bids_counted, RecoveredBids,
};
use brandt_lab::scenario::{parse_args, run_scenario};
use brandt_lab::sigma::{self, FixedChallenge, ProofMode, Prover, ProverSession, RandomVerifier, SigmaStatement};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn constellations(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                (1..=k).map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p);
                    v
                })
            })
            .collect()
    })
}

fn small_grid() -> Vec<(usize, usize, Vec<usize>)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for k in 1..=3 {
            for bids in constellations(n, k) {
                out.push((n, k, bids));
            }
        }
    }
    out
}

fn c1_matrix_fidelity() -> Check {
    let printed: [[u8; 9]; 9] = [
        [0, 1, 1, 0, 1, 1, 0, 1, 1],
        [1, 0, 1, 0, 0, 1, 0, 0, 1],
        [1, 1, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 0, 1, 1, 0, 1, 1],
        [0, 1, 1, 1, 0, 1, 0, 0, 1],
        [0, 0, 1, 1, 1, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 1, 0, 1, 1],
        [0, 1, 1, 0, 1, 1, 1, 0, 1],
        [0, 0, 1, 0, 0, 1, 1, 1, 0],
    ];
    let start = Instant::now();
    let m = build_matrix(3, 3);
    let dense = m.to_dense();
    let l = apply_f(&m, &[1, 0, 0, 0, 1, 0, 1, 0, 0]).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for (r, (row, want)) in dense.iter().zip(printed).enumerate() {
        ensure!(row.as_slice() == want.as_slice(), "row {} is {:?}", r + 1, row);
    }
    ensure!(l.flat() == [1, 1, 1, 2, 0, 1, 2, 2, 1], "f(b) = {:?}", l.flat());
    ensure!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    Ok(format!("9x9 matrix and f(b) exact, {elapsed:?}"))
}

fn c2_injectivity() -> Check {
    let mut checked = 0;
    for (n, k) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        let m = build_matrix(n, k);
        let mut seen = HashSet::new();
        for prices in constellations(n, k) {
            let b = RecoveredBids::from_prices(k, &prices).map_err(|e| e.to_string())?;
            let l = apply_f(&m, &b.b).map_err(|e| e.to_string())?;
            ensure!(seen.insert(l.flat()), "collision at ({n},{k}) for {prices:?}");
            checked += 1;
        }
    }
    Ok(format!("{checked} bid vectors, no collisions"))
}

/// Independent inversion: the constellation whose dense product equals `l`.
fn brute_force_inverse(n: usize, k: usize, l: &[u32]) -> Vec<Vec<usize>> {
    let m = build_matrix(n, k);
    constellations(n, k)
        .into_iter()
        .filter(|prices| {
            let b = RecoveredBids::from_prices(k, prices).expect("in range");
            apply_dense(&m, &b.b) == l
        })
        .collect()
}

fn c3_solver() -> Check {
    let mut checked = 0;
    for (n, k) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        let m = build_matrix(n, k);
        for prices in constellations(n, k) {
            let b = RecoveredBids::from_prices(k, &prices).map_err(|e| e.to_string())?;
            let l = apply_f(&m, &b.b).map_err(|e| e.to_string())?;
            let got = recover_bids(&l).map_err(|e| e.to_string())?;
            ensure!(got == b, "({n},{k}) {prices:?} recovered as {:?}", got.prices());
            let oracle = brute_force_inverse(n, k, &l.flat());
            ensure!(oracle == vec![got.prices()], "oracle gives {oracle:?} for {prices:?}");
            checked += 1;
        }
    }
    Ok(format!("{checked} round trips agree with brute force"))
}

fn c4_complexity() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for n in [5usize, 10, 20] {
        for k in [5usize, 10, 20] {
            let prices: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=k)).collect();
            let b = RecoveredBids::from_prices(k, &prices).map_err(|e| e.to_string())?;
            let l = apply_f(&build_matrix(n, k), &b.b).map_err(|e| e.to_string())?;
            let r = recover_bids_counted(&l).map_err(|e| e.to_string())?;
            let bound = (n * n * k * k) as u64;
            ensure!(r.bids == b, "({n},{k}) wrong bids");
            ensure!(r.additions <= bound, "({n},{k}) {} additions > {bound}", r.additions);
            worst = worst.max(r.additions as f64 / bound as f64);
        }
    }
    let spec = parse_args(["brandt-lab", "run", "--scenario", "recovery-bench", "--n", "100", "--k", "1000", "--seed", "1"])
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let out = run_scenario(&spec).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(out.report.matched, "recovery-bench mismatch");
    ensure!(elapsed < Duration::from_secs(60), "recovery-bench took {elapsed:?}");
    Ok(format!(
        "max additions/n^2k^2 = {worst:.4}; 100x1000 bench {} additions in {elapsed:?}",
        out.report.op_count.unwrap_or_default()
    ))
}

/// Re-checks every proof on the board and in the seller's inbox with the
/// bare verification equations.
fn all_proofs_verify(run: &AuctionRun) -> Result<usize, String> {
    let p = run.params();
    let view = run.view();
    let y = view.public_key().map_err(|e| e.to_string())?;
    let bases = view.bases().map_err(|e| e.to_string())?;
    let (_, deltas) = view.outcome_products().map_err(|e| e.to_string())?;
    let mut count = 0;
    let posts = run.board().posts().iter().chain(run.seller_inbox());
    for post in posts.filter(|post| post.epoch == run.epoch()) {
        let bidder = match post.author {
            brandt_lab::protocol::Party::Bidder(i) => i,
            _ => continue,
        };
        let marker = run.config().marker(bidder);
        let ok = match &post.message {
            Message::KeyShare { y, proof } => {
                count += 1;
                sigma::verify(p, &SigmaStatement::pdl(p.generator(), y.clone()), proof)
            }
            Message::Bid { ciphertexts, validity, sum } => {
                count += validity.len() + 1;
                ciphertexts
                    .iter()
                    .zip(validity)
                    .all(|(ct, t)| sigma::verify(p, &SigmaStatement::bid_validity(p, &y, marker, ct), t))
                    && sigma::verify(p, &SigmaStatement::sum_validity(p, &y, marker, ciphertexts), sum)
            }
            Message::Outcome { gamma, delta, proofs } if Some(post) == latest_outcome(run, bidder) => {
                count += proofs.len();
                bases.iter().enumerate().all(|(c, (a, b))| {
                    let st = SigmaStatement::eqdl(a.clone(), b.clone(), gamma[c].clone(), delta[c].clone());
                    sigma::verify(p, &st, &proofs[c])
                })
            }
            Message::Decryption { phi, proof } => {
                count += 1;
                let y_a = view.key_share(bidder).ok_or("missing key share")?;
                let st = brandt_lab::defenses::decryption_statement(
                    p,
                    run.config().defenses.key_consistency,
                    y_a,
                    &deltas,
                    phi,
                );
                sigma::verify(p, &st, proof)
            }
            _ => true,
        };
        ensure!(ok, "a {} proof from {} does not verify", post.kind(), post.author);
    }
    Ok(count)
}

fn latest_outcome(run: &AuctionRun, bidder: usize) -> Option<&brandt_lab::protocol::Post> {
    run.board().posts().iter().rev().find(|post| {
        post.epoch == run.epoch()
            && post.author == brandt_lab::protocol::Party::Bidder(bidder)
            && matches!(post.message, Message::Outcome { .. })
    })
}

/// Seed oracle: no cell's randomizers sum to zero mod q, judged from the
/// agents' secrets before anything runs.
fn free_of_exceptional_values(config: &AuctionConfig, bids: &[usize]) -> u64 {
    let p = &config.params;
    (0u64..)
        .find(|&seed| {
            let run = AuctionRun::new(config.clone(), bids, seed).expect("valid setup");
            brandt_lab::recovery::cells(config.n, config.k)
                .filter(|&c| !base_factors(config.n, config.k, c).is_empty())
                .all(|c| {
                    let sum = p.sum((1..=config.n).map(|i| run.bidder(i).randomizer(config.k, c)));
                    !sum.is_zero()
                })
        })
        .expect("some seed works")
}

fn c5_protocol_correctness() -> Check {
    let params = GroupParams::small();
    let mut proofs = 0;
    let grid = small_grid();
    for (n, k, bids) in &grid {
        let base = AuctionConfig::new(params.clone(), *n, *k).map_err(|e| e.to_string())?;
        for (config, seed) in [
            (base.clone(), free_of_exceptional_values(&base, bids)),
            (base.clone().with_defenses(DefenseFlags::all()), 5),
        ] {
            let mut run = AuctionRun::new(config.clone(), bids, seed).map_err(|e| e.to_string())?;
            let result = run.execute(&mut Honest).map_err(|e| format!("{bids:?} seed {seed}: {e}"))?;
            ensure!(result.ones().len() == 1, "{bids:?} seed {seed}: ones at {:?}", result.ones());
            ensure!(
                result.outcome == expected_winner(bids),
                "{bids:?} seed {seed}: {:?}",
                result.outcome
            );
            proofs += all_proofs_verify(&run).map_err(|e| format!("{bids:?} seed {seed}: {e}"))?;
        }
    }
    Ok(format!("{} constellations, both proof modes, {proofs} proofs re-verified", grid.len()))
}

struct FixedNonce(ProverSession, Scalar);

impl Prover for FixedNonce {
    fn statement(&self) -> &SigmaStatement {
        self.0.statement()
    }
    fn commit(&mut self, _: &mut dyn RngCore) -> brandt_lab::Result<Vec<GroupElement>> {
        self.0.commit_with_nonce(self.1.clone())
    }
    fn respond(&mut self, c: &Scalar) -> brandt_lab::Result<Vec<Scalar>> {
        self.0.respond(c)
    }
}

fn c6_mitm() -> Check {
    let p = GroupParams::small();
    let g = p.generator();
    for seed in 0..100u64 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let x = p.random_scalar(&mut rng);
        let claim = AffineClaim::new(p.random_scalar(&mut rng), rng.gen_range(-10..=10), rng.gen_range(-10..=10));
        let mut peggy = ProverSession::pdl(&p, &g, x.clone(), ProofMode::InteractiveMalleable);
        let mut victor = RandomVerifier::new(&p, seed);
        let run = adversary::mitm_affine_pdl(&p, &claim, &mut peggy, &mut victor, &mut rng).map_err(|e| e.to_string())?;
        let SigmaStatement::Pdl { v: w, .. } = &run.statement else {
            return Err("relay statement is not PDL".into());
        };
        ensure!(*w == p.exp_g(&claim.witness(&p, &x)), "seed {seed}: w is not g^(a h + b x)");
        ensure!(
            sigma::verify(&p, &run.statement, &run.victor)
                && victor.issued(&run.statement, &run.victor.commitments, &run.victor.challenge),
            "seed {seed}: Victor rejects"
        );
        ensure!(
            sigma::verify(&p, &SigmaStatement::pdl(g.clone(), p.exp_g(&x)), &run.peggy),
            "seed {seed}: Peggy's own run fails"
        );
    }
    let el = |v: u32| p.element(v).expect("subgroup element");
    let mut peggy = FixedNonce(
        ProverSession::pdl(&p, &g, p.scalar(3u32), ProofMode::InteractiveMalleable),
        p.scalar(4u32),
    );
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let claim = AffineClaim::new(p.one(), 1, -1);
    let run = adversary::mitm_affine_pdl(&p, &claim, &mut peggy, &mut FixedChallenge(p.scalar(2u32)), &mut rng)
        .map_err(|e| e.to_string())?;
    let got = (
        run.statement.clone(),
        run.peggy.commitments[0].clone(),
        run.victor.commitments[0].clone(),
        run.peggy.response().clone(),
        run.victor.response().clone(),
    );
    let want = (
        SigmaStatement::pdl(g.clone(), el(6)),
        el(16),
        el(13),
        p.scalar(10u32),
        p.scalar(3u32),
    );
    ensure!(got == want, "instance gave {got:?}");
    let gu = p.exp_g(run.victor.response());
    let rhs = p.mul(&el(13), &p.exp(&el(6), &p.scalar(2u32)));
    ensure!(gu == el(8) && rhs == el(8), "g^u = {gu}, y w^c = {rhs}");
    Ok("100/100 relayed claims accepted; g^u = y w^c = 8".into())
}

fn c7_full_privacy() -> Check {
    let params = GroupParams::small();
    let grid = small_grid();
    for (n, k, bids) in &grid {
        let config = AuctionConfig::new(params.clone(), *n, *k).map_err(|e| e.to_string())?;
        for (seed, exponent) in [(0, AttackerExponent::One), (1, AttackerExponent::Random)] {
            let mut run = AuctionRun::new(config.clone(), bids, seed).map_err(|e| e.to_string())?;
            let report = adversary::full_privacy_attack_on(&mut run, *n, exponent)
                .map_err(|e| format!("{bids:?}: detected or failed: {e}"))?;
            ensure!(report.recovered_bids.as_ref() == Some(bids), "{bids:?}: recovered {:?}", report.recovered_bids);
            ensure!(report.outcome == Some(expected_winner(bids)), "{bids:?}: declared {:?}", report.outcome);
            all_proofs_verify(&run).map_err(|e| format!("{bids:?}: {e}"))?;
        }
    }
    Ok(format!("{} constellations recovered exactly, nothing detected, winners unchanged", grid.len()))
}

fn scenario(args: &str) -> Result<brandt_lab::scenario::ScenarioOutput, String> {
    let spec = parse_args(std::iter::once("brandt-lab").chain(args.split_whitespace())).map_err(|e| e.to_string())?;
    run_scenario(&spec).map_err(|e| format!("{args}: {e}"))
}

fn c8_countermeasures() -> Check {
    let mut verdicts = Vec::new();
    for group in ["small", "large"] {
        for (args, needle) in [
            ("mitm-demo --ni-proofs", "non-interactive prover"),
            ("forged-eqdl --ni-proofs", "non-interactive prover"),
            ("impersonation --authenticate", "bid round"),
            ("exceptional-values --noise-product-check", ""),
            ("wrong-key --key-consistency", "decrypt round"),
        ] {
            let full = format!("run --scenario {args} --n 3 --k 3 --bids 1,2,1 --seed 0 --group {group}");
            let out = scenario(&full)?;
            let r = &out.report;
            ensure!(out.exit_code() == 0, "{full}: exit {}", out.exit_code());
            ensure!(r.success == Some(false), "{full}: attack succeeded");
            if needle.is_empty() {
                ensure!(
                    r.winner == Some(Outcome::Winner { bidder: 2, price: 2 }),
                    "{full}: result {:?}",
                    r.winner
                );
            } else {
                let blocked = r.blocked_by.as_deref().unwrap_or_default();
                ensure!(blocked.contains(needle), "{full}: blocked by {blocked:?}");
            }
            verdicts.push(out.exit_code());
        }
    }
    let forged = {
        let config = AuctionConfig::new(GroupParams::small(), 2, 2)
            .map_err(|e| e.to_string())?
            .with_defenses(DefenseFlags { ni_proofs: true, ..DefenseFlags::none() });
        let mut run = AuctionRun::new(config, &[1, 2], 0).map_err(|e| e.to_string())?;
        for i in 1..=2 {
            run.post_keyshare(i).map_err(|e| e.to_string())?;
        }
        for i in 1..=2 {
            run.post_bid(i).map_err(|e| e.to_string())?;
        }
        run.post_outcome(1).map_err(|e| e.to_string())?;
        let one = run.params().one();
        let share = adversary::noise_removal_shares(&run.view(), 2, &one).map_err(|e| e.to_string())?;
        adversary::forge_outcome_eqdl(&mut run, 2, (1, 1), &share, &one)
    };
    ensure!(forged.is_err(), "forge_outcome_eqdl produced a transcript under Fiat-Shamir");
    Ok(format!("{} defended scenarios exit 0 with the attack stopped", verdicts.len()))
}

fn c9_verifiability() -> Check {
    let config = AuctionConfig::new(GroupParams::small(), 2, 2).map_err(|e| e.to_string())?;
    let mut spurious = 0;
    for seed in 0..100 {
        let report = adversary::force_zero_noise(&config, &[2, 1], (1, 1), seed).map_err(|e| e.to_string())?;
        spurious += usize::from(report.success);
    }
    ensure!(spurious == 100, "zero noise produced a spurious 1 in only {spurious}/100 runs");
    let mut no_winner = 0;
    for seed in 0..100 {
        let report = adversary::wrong_key_decrypt(&config, &[2, 1], 1, seed).map_err(|e| e.to_string())?;
        no_winner += usize::from(report.outcome == Some(Outcome::NoWinner));
    }
    ensure!(
        no_winner >= 95,
        "spurious 1 in 100/100 zero-noise runs, but wrong-key gave NoWinner in only {no_winner}/100 runs (need >= 95)"
    );
    Ok(format!("spurious 1 in 100/100 runs; NoWinner in {no_winner}/100 runs"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("matrix fidelity", c1_matrix_fidelity),
        ("injectivity", c2_injectivity),
        ("solver correctness", c3_solver),
        ("complexity", c4_complexity),
        ("protocol correctness", c5_protocol_correctness),
        ("affine MITM", c6_mitm),
        ("full privacy attack", c7_full_privacy),
        ("countermeasure efficacy", c8_countermeasures),
        ("verifiability failures", c9_verifiability),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
