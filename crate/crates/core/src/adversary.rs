//! Attacks on the auction and its proofs.
//!
//! Every attack runs inside [`AuctionRun`] and goes through the same
//! checks honest parties apply to posts. Mallory is always a bidder; the
//! seller collects the loot.

use std::collections::BTreeSet;

use rand::RngCore;
use serde::Serialize;

use crate::elgamal::Ciphertext;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::protocol::board::{cell_index, BoardView};
use crate::protocol::{
    expected_winner, Adversary, AuctionConfig, AuctionResult, AuctionRun, Cell, Message, Outcome, Party, Post,
    Round, RunEvent,
};
use crate::recovery::{cells, recover_bids, ExponentTable, ExponentVector};
use crate::sigma::{ChallengeSource, Prover, ProverSession, SigmaStatement, Transcript};

/// Claim of knowing `a*h + b*x` for Peggy's secret `x`, with public value
/// `w = g^(a*h) * v^b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineClaim {
    pub h: Scalar,
    pub a: i64,
    pub b: i64,
}

impl AffineClaim {
    pub fn new(h: Scalar, a: i64, b: i64) -> Self {
        AffineClaim { h, a, b }
    }

    fn ah(&self, params: &GroupParams) -> Scalar {
        params.smul(&params.scalar_i64(self.a), &self.h)
    }

    /// PDL statement for `w` over Peggy's base.
    pub fn statement(&self, params: &GroupParams, g: &GroupElement, v: &GroupElement) -> SigmaStatement {
        let w = params.mul(&params.exp(g, &self.ah(params)), &params.exp(v, &params.scalar_i64(self.b)));
        SigmaStatement::pdl(g.clone(), w)
    }

    pub fn witness(&self, params: &GroupParams, x: &Scalar) -> Scalar {
        params.add(&self.ah(params), &params.smul(&params.scalar_i64(self.b), x))
    }
}

/// Mallory between Peggy and Victor: sends `z^b` as her commitment,
/// forwards Victor's challenge unchanged and answers `c*a*h + b*s`.
pub struct AffineRelay<'p> {
    params: GroupParams,
    claim: AffineClaim,
    statement: SigmaStatement,
    peggy: &'p mut dyn Prover,
    peggy_commitments: Vec<GroupElement>,
    peggy_challenge: Option<Scalar>,
    peggy_responses: Vec<Scalar>,
}

impl<'p> AffineRelay<'p> {
    pub fn new(params: &GroupParams, claim: AffineClaim, peggy: &'p mut dyn Prover) -> Result<Self> {
        let SigmaStatement::Pdl { g, v } = peggy.statement() else {
            return Err(Error::InvalidConfig("the affine relay needs a PDL prover".into()));
        };
        let statement = claim.statement(params, g, v);
        Ok(AffineRelay {
            params: params.clone(),
            claim,
            statement,
            peggy,
            peggy_commitments: Vec::new(),
            peggy_challenge: None,
            peggy_responses: Vec::new(),
        })
    }

    /// Peggy's side of the run as she saw it.
    pub fn peggy_transcript(&self) -> Option<Transcript> {
        Some(Transcript {
            commitments: self.peggy_commitments.clone(),
            challenge: self.peggy_challenge.clone()?,
            responses: self.peggy_responses.clone(),
        })
    }
}

impl Prover for AffineRelay<'_> {
    fn statement(&self) -> &SigmaStatement {
        &self.statement
    }

    fn commit(&mut self, rng: &mut dyn RngCore) -> Result<Vec<GroupElement>> {
        self.peggy_commitments = self.peggy.commit(rng)?;
        let b = self.params.scalar_i64(self.claim.b);
        Ok(vec![self.params.exp(&self.peggy_commitments[0], &b)])
    }

    fn respond(&mut self, challenge: &Scalar) -> Result<Vec<Scalar>> {
        self.peggy_responses = self.peggy.respond(challenge)?;
        self.peggy_challenge = Some(challenge.clone());
        let p = &self.params;
        let s = &self.peggy_responses[0];
        let u = p.add(
            &p.smul(challenge, &self.claim.ah(p)),
            &p.smul(&p.scalar_i64(self.claim.b), s),
        );
        Ok(vec![u])
    }
}

/// Both sides of one relayed PDL run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MitmRun {
    pub statement: SigmaStatement,
    pub victor: Transcript,
    pub peggy: Transcript,
}

/// Relays an honest PDL session of Peggy's into a proof of the affine
/// claim for Victor. Peggy's session refuses a foreign challenge in
/// Fiat-Shamir mode, which surfaces here as `ModeMismatch`.
pub fn mitm_affine_pdl(
    params: &GroupParams,
    claim: &AffineClaim,
    peggy: &mut dyn Prover,
    victor: &mut dyn ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<MitmRun> {
    let mut relay = AffineRelay::new(params, claim.clone(), peggy)?;
    let victor_transcript = crate::sigma::prove(&mut relay, victor, rng)?;
    let peggy_transcript = relay.peggy_transcript().expect("relay answered");
    Ok(MitmRun {
        statement: relay.statement,
        victor: victor_transcript,
        peggy: peggy_transcript,
    })
}

/// Noise exponent Mallory leaves in every cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackerExponent {
    One,
    Random,
    Fixed(u64),
}

impl AttackerExponent {
    pub fn draw(self, params: &GroupParams, rng: &mut dyn RngCore) -> Result<Scalar> {
        match self {
            AttackerExponent::One => Ok(params.one()),
            AttackerExponent::Random => loop {
                let t = params.random_nonzero_scalar(rng);
                if t != params.one() {
                    return Ok(t);
                }
            },
            AttackerExponent::Fixed(t) => {
                let t = params.scalar(t);
                if t.is_zero() {
                    return Err(Error::InvalidConfig("attacker exponent must be nonzero mod q".into()));
                }
                Ok(t)
            }
        }
    }
}

/// One bidder's outcome-round values in row-major cell order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeShare {
    pub gamma: Vec<GroupElement>,
    pub delta: Vec<GroupElement>,
}

/// `gamma = A^t / prod_o gamma^o` and `delta = B^t / prod_o delta^o` over
/// the other bidders `o`, so the combined cell becomes `(A^t, B^t)`.
pub fn noise_removal_shares(view: &BoardView<'_>, mallory: usize, t: &Scalar) -> Result<OutcomeShare> {
    let p = view.params();
    let others = (1..=view.n())
        .filter(|&o| o != mallory)
        .map(|o| view.outcome(o).ok_or(Error::MissingShares(o)))
        .collect::<Result<Vec<_>>>()?;
    let bases = view.bases()?;
    let (gamma, delta) = bases
        .iter()
        .enumerate()
        .map(|(c, (a, b))| {
            let g_others = p.product(others.iter().map(|(g, _)| &g[c]));
            let d_others = p.product(others.iter().map(|(_, d)| &d[c]));
            (p.div(&p.exp(a, t), &g_others), p.div(&p.exp(b, t), &d_others))
        })
        .unzip();
    Ok(OutcomeShare { gamma, delta })
}

/// EQDL prover for Mallory's noise-removing cell without knowing its
/// exponent. Commits `(prod lambda_o^-1, prod mu_o^-1)` from fresh sessions
/// of the other bidders, forwards the challenge to them and answers
/// `c*t - sum r_o`.
pub struct OutcomeForger {
    params: GroupParams,
    statement: SigmaStatement,
    t: Scalar,
    others: Vec<ProverSession>,
}

impl OutcomeForger {
    pub fn new(run: &AuctionRun, mallory: usize, cell: Cell, target: (GroupElement, GroupElement), t: Scalar) -> Result<Self> {
        let base = run.view().base(cell)?;
        let others = (1..=run.config().n)
            .filter(|&o| o != mallory)
            .map(|o| run.bidder(o).outcome_prover(run.config(), cell, &base))
            .collect();
        Ok(OutcomeForger {
            params: run.params().clone(),
            statement: SigmaStatement::eqdl(base.0, base.1, target.0, target.1),
            t,
            others,
        })
    }
}

impl Prover for OutcomeForger {
    fn statement(&self) -> &SigmaStatement {
        &self.statement
    }

    fn commit(&mut self, rng: &mut dyn RngCore) -> Result<Vec<GroupElement>> {
        let p = &self.params;
        let mut lambda = p.identity();
        let mut mu = p.identity();
        for session in &mut self.others {
            let z = session.commit(rng)?;
            lambda = p.div(&lambda, &z[0]);
            mu = p.div(&mu, &z[1]);
        }
        Ok(vec![lambda, mu])
    }

    fn respond(&mut self, challenge: &Scalar) -> Result<Vec<Scalar>> {
        let p = &self.params;
        let mut r = p.smul(challenge, &self.t);
        for session in &mut self.others {
            r = p.sub(&r, &session.respond(challenge)?[0]);
        }
        Ok(vec![r])
    }
}

/// Runs the forged outcome proof for one cell against the auction's
/// verifier.
pub fn forge_outcome_eqdl(run: &mut AuctionRun, mallory: usize, cell: Cell, share: &OutcomeShare, t: &Scalar) -> Result<Transcript> {
    let c = cell_index(run.config().k, cell);
    let target = (share.gamma[c].clone(), share.delta[c].clone());
    let mut forger = OutcomeForger::new(run, mallory, cell, target, t.clone())?;
    run.run_proof(&mut forger)
}

/// Mallory posts her outcome last, cancelling everyone else's noise.
pub struct NoiseRemover {
    pub mallory: usize,
    pub t: Scalar,
}

impl Adversary for NoiseRemover {
    fn controls(&self, bidder: usize, round: Round) -> bool {
        bidder == self.mallory && round == Round::Outcome
    }

    fn outcome(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        let share = noise_removal_shares(&run.view(), bidder, &self.t)?;
        let all: Vec<Cell> = run.view().cells().collect();
        let proofs = all
            .into_iter()
            .map(|cell| forge_outcome_eqdl(run, bidder, cell, &share, &self.t))
            .collect::<Result<Vec<_>>>()?;
        let OutcomeShare { gamma, delta } = share;
        run.publish_as(Party::Bidder(bidder), Round::Outcome, Message::Outcome { gamma, delta, proofs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttackReport {
    pub scenario: String,
    pub n: usize,
    pub k: usize,
    pub true_bids: Vec<usize>,
    pub recovered_bids: Option<Vec<usize>>,
    pub outcome: Option<Outcome>,
    pub expected_outcome: Outcome,
    pub success: bool,
    pub events: Vec<RunEvent>,
    /// Path of the board transcript, once written.
    pub transcript: Option<String>,
}

impl AttackReport {
    fn new(scenario: &str, run: &AuctionRun) -> Self {
        AttackReport {
            scenario: scenario.to_string(),
            n: run.config().n,
            k: run.config().k,
            true_bids: run.prices().to_vec(),
            recovered_bids: None,
            outcome: None,
            expected_outcome: expected_winner(run.prices()),
            success: false,
            events: Vec::new(),
            transcript: None,
        }
    }

    fn with_result(mut self, result: &AuctionResult) -> Self {
        self.outcome = Some(result.outcome.clone());
        self.events = result.events.clone();
        self
    }
}

/// Exponent candidates per cell for `v = (prod_{h in S} Y_h)^t`; with a
/// single marker this is just `|S|`.
fn exponent_candidates(config: &AuctionConfig, t: &Scalar, v: &[GroupElement]) -> Result<Vec<Vec<u32>>> {
    let p = &config.params;
    match &config.bidder_y {
        None => {
            let table = ExponentTable::new(p, &p.exp(&config.big_y, t), config.n);
            v.iter().map(|x| table.lookup(x).map(|l| vec![l])).collect()
        }
        Some(ys) => {
            if config.n > 16 {
                return Err(Error::InvalidConfig("per-bidder markers are decoded for at most 16 bidders".into()));
            }
            let mut table: Vec<(GroupElement, u32)> = Vec::with_capacity(1 << config.n);
            for subset in 0u32..(1 << config.n) {
                let product = p.product(ys.iter().enumerate().filter(|(h, _)| subset >> h & 1 == 1).map(|(_, y)| y));
                table.push((p.exp(&product, t), subset.count_ones()));
            }
            v.iter()
                .map(|x| {
                    let found: BTreeSet<u32> = table.iter().filter(|(e, _)| e == x).map(|(_, l)| *l).collect();
                    if found.is_empty() {
                        Err(Error::NotAPower(config.n))
                    } else {
                        Ok(found.into_iter().collect())
                    }
                })
                .collect()
        }
    }
}

const MAX_EXPONENT_COMBINATIONS: usize = 1 << 16;

/// Seller's side: reads `l` off the noise-free cells and solves for the
/// bids. Ambiguous cells (per-bidder markers) are resolved by trying every
/// combination until one solves.
pub fn recover_from_outcome(config: &AuctionConfig, v: &[GroupElement], t: &Scalar) -> Result<Vec<usize>> {
    let candidates = exponent_candidates(config, t, v)?;
    let combinations = candidates.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    if combinations.is_none_or(|c| c > MAX_EXPONENT_COMBINATIONS) {
        return Err(Error::InconsistentExponents("too many ambiguous cells".into()));
    }
    let mut choice = vec![0usize; candidates.len()];
    let mut last_err: Error;
    loop {
        let flat: Vec<u32> = choice.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        match ExponentVector::from_flat(config.n, config.k, &flat).and_then(|l| recover_bids(&l)) {
            Ok(bids) => return Ok(bids.prices()),
            Err(e) => last_err = e,
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Err(last_err);
            }
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Noise removal by `mallory`, then recovery of every bid by the seller.
pub fn full_privacy_attack_on(run: &mut AuctionRun, mallory: usize, exponent: AttackerExponent) -> Result<AttackReport> {
    let t = exponent.draw(&run.params().clone(), run.rng())?;
    let result = run.execute(&mut NoiseRemover { mallory, t: t.clone() })?;
    let recovered = recover_from_outcome(run.config(), &result.v, &t)?;
    let mut report = AttackReport::new("full-privacy-attack", run).with_result(&result);
    report.success = recovered == report.true_bids;
    report.recovered_bids = Some(recovered);
    Ok(report)
}

/// [`full_privacy_attack_on`] with the last bidder as Mallory and exponent 1.
pub fn full_privacy_attack(config: &AuctionConfig, true_bids: &[usize], seed: u64) -> Result<AttackReport> {
    let mut run = AuctionRun::new(config.clone(), true_bids, seed)?;
    full_privacy_attack_on(&mut run, config.n, AttackerExponent::One)
}

/// `(alpha * y^x, beta * g^x)`: the same plaintext under fresh randomness.
pub fn reencrypt_bid_copy(params: &GroupParams, ct: &Ciphertext, y: &GroupElement, x: &Scalar) -> Ciphertext {
    Ciphertext {
        alpha: params.mul(&ct.alpha, &params.exp(y, x)),
        beta: params.mul(&ct.beta, &params.exp_g(x)),
    }
}

/// Turns the target's live proof for a ciphertext into one for its
/// re-randomized copy by shifting each response by `challenge * x`.
struct ShiftRelay {
    params: GroupParams,
    statement: SigmaStatement,
    inner: ProverSession,
    x: Scalar,
}

impl Prover for ShiftRelay {
    fn statement(&self) -> &SigmaStatement {
        &self.statement
    }

    fn commit(&mut self, rng: &mut dyn RngCore) -> Result<Vec<GroupElement>> {
        self.inner.commit(rng)
    }

    fn respond(&mut self, challenge: &Scalar) -> Result<Vec<Scalar>> {
        let p = &self.params;
        let r = self.inner.respond(challenge)?;
        Ok(match r.as_slice() {
            [s] => vec![p.add(s, &p.smul(challenge, &self.x))],
            [c0, s0, s1] => {
                let c1 = p.sub(challenge, c0);
                vec![c0.clone(), p.add(s0, &p.smul(c0, &self.x)), p.add(s1, &p.smul(&c1, &self.x))]
            }
            _ => unreachable!("linear or OR responses"),
        })
    }
}

/// Mallory takes over every identity but the target's and copies the
/// target's bid for each, tagging posts with her own key.
pub struct Impersonator {
    pub target: usize,
    pub rerandomize: bool,
    pub key: [u8; 32],
}

impl Impersonator {
    fn copy_bid(&self, run: &mut AuctionRun) -> Result<Message> {
        let original = run
            .view()
            .bid_message(self.target)
            .cloned()
            .ok_or(Error::RoundIncomplete(Round::Bid))?;
        if !self.rerandomize {
            return Ok(original);
        }
        let Message::Bid { ciphertexts, .. } = original else {
            unreachable!("bid round holds bids")
        };
        let p = run.params().clone();
        let config = run.config().clone();
        let y = run.view().public_key()?;
        let marker = config.marker(self.target).clone();
        let xs: Vec<Scalar> = ciphertexts.iter().map(|_| p.random_nonzero_scalar(run.rng())).collect();
        let copies: Vec<Ciphertext> = ciphertexts
            .iter()
            .zip(&xs)
            .map(|(ct, x)| reencrypt_bid_copy(&p, ct, &y, x))
            .collect();
        let mut validity = Vec::with_capacity(copies.len());
        for (j, (ct, x)) in copies.iter().zip(&xs).enumerate() {
            let inner = run.bidder(self.target).bid_validity_prover(&config, &y, j + 1)?;
            let mut relay = ShiftRelay {
                params: p.clone(),
                statement: SigmaStatement::bid_validity(&p, &y, &marker, ct),
                inner,
                x: x.clone(),
            };
            validity.push(run.run_proof(&mut relay)?);
        }
        let mut relay = ShiftRelay {
            params: p.clone(),
            statement: SigmaStatement::sum_validity(&p, &y, &marker, &copies),
            inner: run.bidder(self.target).sum_validity_prover(&config, &y),
            x: p.sum(&xs),
        };
        let sum = run.run_proof(&mut relay)?;
        Ok(Message::Bid {
            ciphertexts: copies,
            validity,
            sum,
        })
    }
}

impl Adversary for Impersonator {
    fn controls(&self, bidder: usize, round: Round) -> bool {
        bidder != self.target && round == Round::Bid
    }

    fn bid(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        let message = self.copy_bid(run)?;
        let mut post = Post::new(run.epoch(), Round::Bid, Party::Bidder(bidder), message);
        run.tag_with_key(&mut post, &self.key);
        run.publish(post)
    }
}

/// Prices announced as winning.
fn revealed_prices(outcome: &Outcome) -> BTreeSet<usize> {
    match outcome {
        Outcome::Winner { price, .. } => BTreeSet::from([*price]),
        Outcome::NoWinner => BTreeSet::new(),
        Outcome::MultipleOnes { cells } => cells.iter().map(|&(_, j)| j).collect(),
    }
}

pub fn impersonation_attack_on(run: &mut AuctionRun, target: usize, rerandomize: bool) -> Result<AttackReport> {
    let mut key = [0u8; 32];
    run.rng().fill_bytes(&mut key);
    let mut mallory = Impersonator { target, rerandomize, key };
    let result = run.execute(&mut mallory)?;
    let mut report = AttackReport::new("impersonation", run).with_result(&result);
    let target_price = run.prices()[target - 1];
    report.success = revealed_prices(&result.outcome) == BTreeSet::from([target_price]);
    report.recovered_bids = Some(vec![target_price]);
    Ok(report)
}

/// Mallory learns `target`'s bid by bidding it under every other identity.
pub fn impersonation_attack(target: usize, config: &AuctionConfig, true_bids: &[usize], seed: u64) -> Result<AttackReport> {
    let mut run = AuctionRun::new(config.clone(), true_bids, seed)?;
    impersonation_attack_on(&mut run, target, false)
}

/// Colluding bidder picks its randomizer so the cell's randomizers sum to
/// zero. Only on its first outcome post; a re-randomization pass is
/// answered honestly.
pub struct ZeroNoise {
    pub colluder: usize,
    pub cell: Cell,
    done: bool,
}

impl ZeroNoise {
    pub fn new(colluder: usize, cell: Cell) -> Self {
        ZeroNoise {
            colluder,
            cell,
            done: false,
        }
    }
}

impl Adversary for ZeroNoise {
    fn controls(&self, bidder: usize, round: Round) -> bool {
        bidder == self.colluder && round == Round::Outcome
    }

    fn outcome(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        if !self.done {
            self.done = true;
            let p = run.params().clone();
            let k = run.config().k;
            let others = (1..=run.config().n)
                .filter(|&o| o != bidder)
                .map(|o| run.bidder(o).randomizer(k, self.cell).clone())
                .collect::<Vec<_>>();
            let m = p.neg(&p.sum(&others));
            run.bidder_mut(bidder).set_randomizer(k, self.cell, m);
        }
        run.post_outcome(bidder)
    }
}

/// First cell that is not the true winner's.
pub fn default_losing_cell(config: &AuctionConfig, prices: &[usize]) -> Result<Cell> {
    let winner = match expected_winner(prices) {
        Outcome::Winner { bidder, price } => Some((bidder, price)),
        _ => None,
    };
    cells(config.n, config.k)
        .find(|&c| Some(c) != winner)
        .ok_or_else(|| Error::InvalidConfig("no losing cell with one bidder and one price".into()))
}

pub fn force_zero_noise_on(run: &mut AuctionRun, colluder: usize, cell: Cell) -> Result<AttackReport> {
    let mut adversary = ZeroNoise::new(colluder, cell);
    let result = run.execute(&mut adversary)?;
    let mut report = AttackReport::new("exceptional-values", run).with_result(&result);
    report.success = result.value(cell).is_one() && Outcome::Winner { bidder: cell.0, price: cell.1 } != report.expected_outcome;
    Ok(report)
}

/// Bidder 1 zeroes the noise at `cell`.
pub fn force_zero_noise(config: &AuctionConfig, true_bids: &[usize], cell: Cell, seed: u64) -> Result<AttackReport> {
    let mut run = AuctionRun::new(config.clone(), true_bids, seed)?;
    force_zero_noise_on(&mut run, 1, cell)
}

/// Decrypts with `x + shift` consistently across all cells.
pub struct WrongKey {
    pub cheater: usize,
    pub shift: Scalar,
}

impl Adversary for WrongKey {
    fn controls(&self, bidder: usize, round: Round) -> bool {
        bidder == self.cheater && round == Round::Decrypt
    }

    fn decrypt(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        let p = run.params().clone();
        let x = p.add(&run.bidder(bidder).key().x, &self.shift);
        run.send_decryption_with(bidder, &x)
    }
}

/// Succeeds when every proof passes yet the announced result is wrong.
pub fn wrong_key_decrypt_on(run: &mut AuctionRun, cheater: usize, shift: Scalar) -> Result<AttackReport> {
    let result = run.execute(&mut WrongKey { cheater, shift })?;
    let mut report = AttackReport::new("wrong-key", run).with_result(&result);
    report.success = result.outcome != report.expected_outcome;
    Ok(report)
}

/// `cheater` decrypts with `x + 1`.
pub fn wrong_key_decrypt(config: &AuctionConfig, true_bids: &[usize], cheater: usize, seed: u64) -> Result<AttackReport> {
    let mut run = AuctionRun::new(config.clone(), true_bids, seed)?;
    let one = config.params.one();
    wrong_key_decrypt_on(&mut run, cheater, one)
}
