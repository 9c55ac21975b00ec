//! Sigma protocols over the subgroup: knowledge of a discrete log (PDL),
//! equality of discrete logs under several bases (EQDL), the OR-composed
//! bid-validity proof, and the sum-validity proof over a whole bid vector.
//!
//! Proofs run through two traits. A [`Prover`] commits and answers one
//! challenge; a [`ChallengeSource`] supplies that challenge. The interactive
//! verifier draws challenges at random and logs which challenge it issued
//! for which commitment, while [`FiatShamir`] derives the challenge by
//! hashing the statement and commitment. The interactive flavour is
//! malleable on purpose: a transcript only binds the algebra, not who
//! computed the response.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use num_bigint::BigUint;

use crate::codec::{Decoder, Encoder};
use crate::elgamal::Ciphertext;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};

/// Hash used for Fiat-Shamir challenges and challenge bookkeeping.
pub const HASH_NAME: &str = "sha256";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofMode {
    InteractiveMalleable,
    FiatShamir,
}

impl ProofMode {
    pub fn tag(self) -> &'static str {
        match self {
            ProofMode::InteractiveMalleable => "interactive",
            ProofMode::FiatShamir => "fiat-shamir-sha256",
        }
    }
}

/// Public input of a proof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaStatement {
    /// Knowledge of `x` with `v = g^x`.
    Pdl { g: GroupElement, v: GroupElement },
    /// One `x` with `values[i] = bases[i]^x` for every `i`.
    Eqdl {
        bases: Vec<GroupElement>,
        values: Vec<GroupElement>,
    },
    /// `log_g(beta) = log_y(alpha)` or `log_g(beta) = log_y(alpha / big_y)`.
    BidValidity {
        y: GroupElement,
        g: GroupElement,
        big_y: GroupElement,
        alpha: GroupElement,
        beta: GroupElement,
    },
    /// `log_y(prod(alphas) / big_y) = log_g(prod(betas))`.
    SumValidity {
        y: GroupElement,
        g: GroupElement,
        big_y: GroupElement,
        alphas: Vec<GroupElement>,
        betas: Vec<GroupElement>,
    },
}

impl SigmaStatement {
    pub fn pdl(g: GroupElement, v: GroupElement) -> Self {
        SigmaStatement::Pdl { g, v }
    }

    /// Two-base EQDL: `v = g1^x` and `w = g2^x`.
    pub fn eqdl(g1: GroupElement, g2: GroupElement, v: GroupElement, w: GroupElement) -> Self {
        SigmaStatement::Eqdl {
            bases: vec![g1, g2],
            values: vec![v, w],
        }
    }

    pub fn bid_validity(params: &GroupParams, y: &GroupElement, big_y: &GroupElement, ct: &Ciphertext) -> Self {
        SigmaStatement::BidValidity {
            y: y.clone(),
            g: params.generator(),
            big_y: big_y.clone(),
            alpha: ct.alpha.clone(),
            beta: ct.beta.clone(),
        }
    }

    pub fn sum_validity(params: &GroupParams, y: &GroupElement, big_y: &GroupElement, cts: &[Ciphertext]) -> Self {
        SigmaStatement::SumValidity {
            y: y.clone(),
            g: params.generator(),
            big_y: big_y.clone(),
            alphas: cts.iter().map(|c| c.alpha.clone()).collect(),
            betas: cts.iter().map(|c| c.beta.clone()).collect(),
        }
    }

    /// Per-proof-type domain separator.
    pub fn domain_tag(&self) -> &'static str {
        match self {
            SigmaStatement::Pdl { .. } => "brandt-lab/pdl/v1",
            SigmaStatement::Eqdl { .. } => "brandt-lab/eqdl/v1",
            SigmaStatement::BidValidity { .. } => "brandt-lab/bid-validity/v1",
            SigmaStatement::SumValidity { .. } => "brandt-lab/sum-validity/v1",
        }
    }

    pub fn encode(&self, enc: &mut Encoder<'_>) {
        match self {
            SigmaStatement::Pdl { g, v } => {
                enc.put_element(g).put_element(v);
            }
            SigmaStatement::Eqdl { bases, values } => {
                enc.put_elements(bases).put_elements(values);
            }
            SigmaStatement::BidValidity {
                y,
                g,
                big_y,
                alpha,
                beta,
            } => {
                enc.put_element(y)
                    .put_element(g)
                    .put_element(big_y)
                    .put_element(alpha)
                    .put_element(beta);
            }
            SigmaStatement::SumValidity {
                y,
                g,
                big_y,
                alphas,
                betas,
            } => {
                enc.put_element(y)
                    .put_element(g)
                    .put_element(big_y)
                    .put_elements(alphas)
                    .put_elements(betas);
            }
        }
    }

    /// Domain tag, group, statement and commitments in canonical form.
    pub fn transcript_prefix(&self, params: &GroupParams, commitments: &[GroupElement]) -> Vec<u8> {
        let mut enc = Encoder::new(params);
        enc.put_tag(self.domain_tag()).put_params();
        self.encode(&mut enc);
        enc.put_elements(commitments);
        enc.finish()
    }

    /// Bases and values of the linear relation behind PDL, EQDL and
    /// sum-validity. `None` for the OR statement.
    fn linear_form(&self, params: &GroupParams) -> Option<(Vec<GroupElement>, Vec<GroupElement>)> {
        match self {
            SigmaStatement::Pdl { g, v } => Some((vec![g.clone()], vec![v.clone()])),
            SigmaStatement::Eqdl { bases, values } => Some((bases.clone(), values.clone())),
            SigmaStatement::SumValidity {
                y,
                g,
                big_y,
                alphas,
                betas,
            } => {
                let alpha = params.div(&params.product(alphas), big_y);
                let beta = params.product(betas);
                Some((vec![g.clone(), y.clone()], vec![beta, alpha]))
            }
            SigmaStatement::BidValidity { .. } => None,
        }
    }

    fn elements(&self) -> Vec<&GroupElement> {
        match self {
            SigmaStatement::Pdl { g, v } => vec![g, v],
            SigmaStatement::Eqdl { bases, values } => bases.iter().chain(values).collect(),
            SigmaStatement::BidValidity {
                y,
                g,
                big_y,
                alpha,
                beta,
            } => vec![y, g, big_y, alpha, beta],
            SigmaStatement::SumValidity {
                y,
                g,
                big_y,
                alphas,
                betas,
            } => [y, g, big_y].into_iter().chain(alphas).chain(betas).collect(),
        }
    }
}

/// `(commitment, challenge, response)`.
///
/// Linear statements carry one response. The OR statement carries four
/// commitments `[lambda_0, mu_0, lambda_1, mu_1]` and responses
/// `[c_0, s_0, s_1]`, with `c_1 = challenge - c_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub commitments: Vec<GroupElement>,
    pub challenge: Scalar,
    pub responses: Vec<Scalar>,
}

impl Transcript {
    pub fn encode(&self, enc: &mut Encoder<'_>) {
        enc.put_elements(&self.commitments)
            .put_scalar(&self.challenge)
            .put_scalars(&self.responses);
    }

    pub fn decode(dec: &mut Decoder<'_, '_>) -> Result<Self> {
        Ok(Transcript {
            commitments: dec.elements()?,
            challenge: dec.scalar()?,
            responses: dec.scalars()?,
        })
    }

    pub fn response(&self) -> &Scalar {
        &self.responses[0]
    }
}

/// Checks the verification equations only. Who picked the challenge is the
/// [`Verifier`]'s concern.
pub fn verify(params: &GroupParams, statement: &SigmaStatement, t: &Transcript) -> bool {
    if !statement.elements().into_iter().all(|x| params.contains(x))
        || !t.commitments.iter().all(|x| params.contains(x))
    {
        return false;
    }
    match statement.linear_form(params) {
        Some((bases, values)) => {
            t.responses.len() == 1
                && linear_check(params, &bases, &values, &t.commitments, &t.challenge, &t.responses[0])
        }
        None => verify_or(params, statement, t),
    }
}

fn linear_check(
    params: &GroupParams,
    bases: &[GroupElement],
    values: &[GroupElement],
    commitments: &[GroupElement],
    c: &Scalar,
    s: &Scalar,
) -> bool {
    bases.len() == values.len()
        && commitments.len() == bases.len()
        && bases
            .iter()
            .zip(values)
            .zip(commitments)
            .all(|((b, v), z)| params.exp(b, s) == params.mul(z, &params.exp(v, c)))
}

fn or_branches(params: &GroupParams, statement: &SigmaStatement) -> [(Vec<GroupElement>, Vec<GroupElement>); 2] {
    let SigmaStatement::BidValidity {
        y,
        g,
        big_y,
        alpha,
        beta,
    } = statement
    else {
        unreachable!("only the bid-validity statement is OR-composed")
    };
    let bases = vec![g.clone(), y.clone()];
    [
        (bases.clone(), vec![beta.clone(), alpha.clone()]),
        (bases, vec![beta.clone(), params.div(alpha, big_y)]),
    ]
}

fn verify_or(params: &GroupParams, statement: &SigmaStatement, t: &Transcript) -> bool {
    if t.commitments.len() != 4 || t.responses.len() != 3 {
        return false;
    }
    let [(b0, v0), (b1, v1)] = or_branches(params, statement);
    let c0 = &t.responses[0];
    let c1 = params.sub(&t.challenge, c0);
    linear_check(params, &b0, &v0, &t.commitments[..2], c0, &t.responses[1])
        && linear_check(params, &b1, &v1, &t.commitments[2..], &c1, &t.responses[2])
}

/// `H(domain-tag || p || q || g || statement || commitments) mod q`.
pub fn fiat_shamir_challenge(params: &GroupParams, statement: &SigmaStatement, commitments: &[GroupElement]) -> Scalar {
    let digest = Sha256::digest(statement.transcript_prefix(params, commitments));
    params.scalar(BigUint::from_bytes_be(&digest))
}

/// The prover side of one proof run.
pub trait Prover {
    fn statement(&self) -> &SigmaStatement;
    fn commit(&mut self, rng: &mut dyn RngCore) -> Result<Vec<GroupElement>>;
    fn respond(&mut self, challenge: &Scalar) -> Result<Vec<Scalar>>;
}

/// Supplies the challenge for a commitment.
pub trait ChallengeSource {
    fn challenge(&mut self, statement: &SigmaStatement, commitments: &[GroupElement]) -> Scalar;
}

/// Runs commit, challenge, response.
pub fn prove(prover: &mut dyn Prover, source: &mut dyn ChallengeSource, rng: &mut dyn RngCore) -> Result<Transcript> {
    let commitments = prover.commit(rng)?;
    let challenge = source.challenge(prover.statement(), &commitments);
    let responses = prover.respond(&challenge)?;
    Ok(Transcript {
        commitments,
        challenge,
        responses,
    })
}

#[derive(Clone, Debug)]
enum SessionState {
    Fresh,
    Committed {
        nonce: Scalar,
        simulated: Option<(Scalar, Scalar)>,
        commitments: Vec<GroupElement>,
    },
    Finished,
}

/// Honest prover state: statement, witness and the single-use nonce.
#[derive(Clone, Debug)]
pub struct ProverSession {
    params: GroupParams,
    statement: SigmaStatement,
    witness: Scalar,
    real_branch: usize,
    mode: ProofMode,
    state: SessionState,
}

impl ProverSession {
    /// Wraps an arbitrary statement and witness without checking that they
    /// match. A mismatched witness simply yields a failing transcript.
    pub fn new(params: &GroupParams, statement: SigmaStatement, witness: Scalar, mode: ProofMode) -> Self {
        ProverSession {
            params: params.clone(),
            statement,
            witness,
            real_branch: 0,
            mode,
            state: SessionState::Fresh,
        }
    }

    pub fn pdl(params: &GroupParams, g: &GroupElement, x: Scalar, mode: ProofMode) -> Self {
        let v = params.exp(g, &x);
        Self::new(params, SigmaStatement::pdl(g.clone(), v), x, mode)
    }

    pub fn eqdl(params: &GroupParams, bases: Vec<GroupElement>, x: Scalar, mode: ProofMode) -> Self {
        let values = bases.iter().map(|b| params.exp(b, &x)).collect();
        Self::new(params, SigmaStatement::Eqdl { bases, values }, x, mode)
    }

    /// OR proof for one encrypted bid entry. Fails with `WitnessMismatch`
    /// unless `ct` encrypts `big_y` (when `is_y`) or 1 under randomness `r`.
    pub fn bid_validity(
        params: &GroupParams,
        y: &GroupElement,
        big_y: &GroupElement,
        ct: &Ciphertext,
        r: Scalar,
        is_y: bool,
        mode: ProofMode,
    ) -> Result<Self> {
        let plain = if is_y { big_y.clone() } else { params.identity() };
        if ct.beta != params.exp_g(&r) || ct.alpha != params.mul(&plain, &params.exp(y, &r)) {
            return Err(Error::WitnessMismatch);
        }
        let mut session = Self::new(params, SigmaStatement::bid_validity(params, y, big_y, ct), r, mode);
        session.real_branch = usize::from(is_y);
        Ok(session)
    }

    /// Sum-validity proof with witness `r_sum = sum of the r_j`. No witness
    /// check: a vector without exactly one `big_y` just fails to verify.
    pub fn sum_validity(
        params: &GroupParams,
        y: &GroupElement,
        big_y: &GroupElement,
        cts: &[Ciphertext],
        r_sum: Scalar,
        mode: ProofMode,
    ) -> Self {
        Self::new(params, SigmaStatement::sum_validity(params, y, big_y, cts), r_sum, mode)
    }

    pub fn mode(&self) -> ProofMode {
        self.mode
    }

    /// Commitments, once committed.
    pub fn commitments(&self) -> Option<&[GroupElement]> {
        match &self.state {
            SessionState::Committed { commitments, .. } => Some(commitments),
            _ => None,
        }
    }

    /// Commits with a caller-chosen nonce. Linear statements only.
    pub fn commit_with_nonce(&mut self, nonce: Scalar) -> Result<Vec<GroupElement>> {
        if !matches!(self.state, SessionState::Fresh) {
            return Err(Error::AlreadyCommitted);
        }
        let (bases, _) = self
            .statement
            .linear_form(&self.params)
            .expect("fixed-nonce commitments are only defined for linear statements");
        let commitments: Vec<_> = bases.iter().map(|b| self.params.exp(b, &nonce)).collect();
        self.state = SessionState::Committed {
            nonce,
            simulated: None,
            commitments: commitments.clone(),
        };
        Ok(commitments)
    }

    fn commit_or(&mut self, rng: &mut dyn RngCore) -> Vec<GroupElement> {
        let p = &self.params;
        let branches = or_branches(p, &self.statement);
        let nonce = p.random_scalar(rng);
        let sim_c = p.random_scalar(rng);
        let sim_s = p.random_scalar(rng);
        let real = self.real_branch;
        let mut commitments = Vec::with_capacity(4);
        for (i, (bases, values)) in branches.iter().enumerate() {
            for (b, v) in bases.iter().zip(values) {
                let z = if i == real {
                    p.exp(b, &nonce)
                } else {
                    p.div(&p.exp(b, &sim_s), &p.exp(v, &sim_c))
                };
                commitments.push(z);
            }
        }
        self.state = SessionState::Committed {
            nonce,
            simulated: Some((sim_c, sim_s)),
            commitments: commitments.clone(),
        };
        commitments
    }
}

impl Prover for ProverSession {
    fn statement(&self) -> &SigmaStatement {
        &self.statement
    }

    fn commit(&mut self, rng: &mut dyn RngCore) -> Result<Vec<GroupElement>> {
        if !matches!(self.state, SessionState::Fresh) {
            return Err(Error::AlreadyCommitted);
        }
        if matches!(self.statement, SigmaStatement::BidValidity { .. }) {
            return Ok(self.commit_or(rng));
        }
        let nonce = self.params.random_scalar(rng);
        self.commit_with_nonce(nonce)
    }

    fn respond(&mut self, challenge: &Scalar) -> Result<Vec<Scalar>> {
        let (nonce, simulated, commitments) = match std::mem::replace(&mut self.state, SessionState::Finished) {
            SessionState::Committed {
                nonce,
                simulated,
                commitments,
            } => (nonce, simulated, commitments),
            SessionState::Fresh => {
                self.state = SessionState::Fresh;
                return Err(Error::NotCommitted);
            }
            SessionState::Finished => return Err(Error::SessionFinished),
        };
        let p = &self.params;
        if self.mode == ProofMode::FiatShamir
            && *challenge != fiat_shamir_challenge(p, &self.statement, &commitments)
        {
            return Err(Error::ModeMismatch("non-interactive prover only answers its own hash challenge"));
        }
        Ok(match simulated {
            None => vec![p.add(&nonce, &p.smul(challenge, &self.witness))],
            Some((sim_c, sim_s)) => {
                let real_c = p.sub(challenge, &sim_c);
                let real_s = p.add(&nonce, &p.smul(&real_c, &self.witness));
                if self.real_branch == 0 {
                    vec![real_c, real_s, sim_s]
                } else {
                    vec![sim_c, sim_s, real_s]
                }
            }
        })
    }
}

/// Hash-derived challenges.
#[derive(Clone, Debug)]
pub struct FiatShamir {
    params: GroupParams,
}

impl FiatShamir {
    pub fn new(params: &GroupParams) -> Self {
        FiatShamir { params: params.clone() }
    }
}

impl ChallengeSource for FiatShamir {
    fn challenge(&mut self, statement: &SigmaStatement, commitments: &[GroupElement]) -> Scalar {
        fiat_shamir_challenge(&self.params, statement, commitments)
    }
}

/// Always answers with the same challenge. For reproducing worked examples.
#[derive(Clone, Debug)]
pub struct FixedChallenge(pub Scalar);

impl ChallengeSource for FixedChallenge {
    fn challenge(&mut self, _: &SigmaStatement, _: &[GroupElement]) -> Scalar {
        self.0.clone()
    }
}

/// Interactive verifier with public coins.
///
/// Draws each challenge at random after seeing the commitment and records
/// it. Identical commitments to identical statements are common in a tiny
/// group, so every challenge sent for a pair is kept. A transcript later found on the board can be checked against the
/// challenge the verifier actually sent for that statement and commitment.
#[derive(Clone, Debug)]
pub struct RandomVerifier {
    params: GroupParams,
    rng: ChaCha20Rng,
    issued: HashMap<[u8; 32], Vec<Scalar>>,
}

impl RandomVerifier {
    pub fn new(params: &GroupParams, seed: u64) -> Self {
        RandomVerifier {
            params: params.clone(),
            rng: ChaCha20Rng::seed_from_u64(seed),
            issued: HashMap::new(),
        }
    }

    fn key(&self, statement: &SigmaStatement, commitments: &[GroupElement]) -> [u8; 32] {
        Sha256::digest(statement.transcript_prefix(&self.params, commitments)).into()
    }

    pub fn issued(&self, statement: &SigmaStatement, commitments: &[GroupElement], challenge: &Scalar) -> bool {
        self.issued
            .get(&self.key(statement, commitments))
            .is_some_and(|cs| cs.contains(challenge))
    }
}

impl ChallengeSource for RandomVerifier {
    fn challenge(&mut self, statement: &SigmaStatement, commitments: &[GroupElement]) -> Scalar {
        let c = self.params.random_scalar(&mut self.rng);
        let key = self.key(statement, commitments);
        self.issued.entry(key).or_default().push(c.clone());
        c
    }
}

/// The verifier an auction uses, one per proof mode.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Verifier {
    Interactive(RandomVerifier),
    FiatShamir(FiatShamir),
}

impl Verifier {
    pub fn new(params: &GroupParams, mode: ProofMode, seed: u64) -> Self {
        match mode {
            ProofMode::InteractiveMalleable => Verifier::Interactive(RandomVerifier::new(params, seed)),
            ProofMode::FiatShamir => Verifier::FiatShamir(FiatShamir::new(params)),
        }
    }

    pub fn mode(&self) -> ProofMode {
        match self {
            Verifier::Interactive(_) => ProofMode::InteractiveMalleable,
            Verifier::FiatShamir(_) => ProofMode::FiatShamir,
        }
    }

    /// Equations hold and the challenge is the one this verifier sent (or
    /// the hash of statement and commitment).
    pub fn accepts(&self, params: &GroupParams, statement: &SigmaStatement, t: &Transcript) -> bool {
        let challenge_ok = match self {
            Verifier::Interactive(v) => v.issued(statement, &t.commitments, &t.challenge),
            Verifier::FiatShamir(_) => t.challenge == fiat_shamir_challenge(params, statement, &t.commitments),
        };
        challenge_ok && verify(params, statement, t)
    }
}

impl ChallengeSource for Verifier {
    fn challenge(&mut self, statement: &SigmaStatement, commitments: &[GroupElement]) -> Scalar {
        match self {
            Verifier::Interactive(v) => v.challenge(statement, commitments),
            Verifier::FiatShamir(v) => v.challenge(statement, commitments),
        }
    }
}

/// Non-interactive proof: Fiat-Shamir transcript plus a header naming the
/// hash and proof type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NIProof {
    pub hash: String,
    pub tag: String,
    pub transcript: Transcript,
}

impl NIProof {
    pub fn create(params: &GroupParams, prover: &mut dyn Prover, rng: &mut dyn RngCore) -> Result<Self> {
        let tag = prover.statement().domain_tag().to_string();
        let transcript = prove(prover, &mut FiatShamir::new(params), rng)?;
        Ok(NIProof {
            hash: HASH_NAME.to_string(),
            tag,
            transcript,
        })
    }

    pub fn verify(&self, params: &GroupParams, statement: &SigmaStatement) -> bool {
        self.hash == HASH_NAME
            && self.tag == statement.domain_tag()
            && self.transcript.challenge == fiat_shamir_challenge(params, statement, &self.transcript.commitments)
            && verify(params, statement, &self.transcript)
    }

    pub fn encode(&self, params: &GroupParams) -> Vec<u8> {
        let mut enc = Encoder::new(params);
        enc.put_tag(&self.hash).put_tag(&self.tag);
        self.transcript.encode(&mut enc);
        enc.finish()
    }

    pub fn decode(params: &GroupParams, bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(params, bytes);
        let hash = dec.tag()?;
        let tag = dec.tag()?;
        let transcript = Transcript::decode(&mut dec)?;
        dec.finish()?;
        Ok(NIProof { hash, tag, transcript })
    }
}

/// Special soundness: two accepting linear transcripts with the same
/// commitment and different challenges reveal the witness.
pub fn extract_witness(params: &GroupParams, a: &Transcript, b: &Transcript) -> Option<Scalar> {
    if a.commitments != b.commitments || a.responses.len() != 1 || b.responses.len() != 1 {
        return None;
    }
    let dc = params.sinv(&params.sub(&a.challenge, &b.challenge))?;
    Some(params.smul(&params.sub(a.response(), b.response()), &dc))
}

/// Honest two-base EQDL run.
pub fn eqdl_run(
    params: &GroupParams,
    g1: &GroupElement,
    g2: &GroupElement,
    x: Scalar,
    source: &mut dyn ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<Transcript> {
    let mut session = ProverSession::eqdl(params, vec![g1.clone(), g2.clone()], x, ProofMode::InteractiveMalleable);
    prove(&mut session, source, rng)
}

#[allow(clippy::too_many_arguments)]
pub fn bid_validity_prove(
    params: &GroupParams,
    ct: &Ciphertext,
    r: Scalar,
    is_y: bool,
    y: &GroupElement,
    big_y: &GroupElement,
    mode: ProofMode,
    source: &mut dyn ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<Transcript> {
    let mut session = ProverSession::bid_validity(params, y, big_y, ct, r, is_y, mode)?;
    prove(&mut session, source, rng)
}

#[allow(clippy::too_many_arguments)]
pub fn sum_validity_prove(
    params: &GroupParams,
    cts: &[Ciphertext],
    r_sum: Scalar,
    y: &GroupElement,
    big_y: &GroupElement,
    mode: ProofMode,
    source: &mut dyn ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<Transcript> {
    let mut session = ProverSession::sum_validity(params, y, big_y, cts, r_sum, mode);
    prove(&mut session, source, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elgamal::encrypt;
    use proptest::prelude::*;

    const MALLEABLE: ProofMode = ProofMode::InteractiveMalleable;

    fn toy() -> GroupParams {
        GroupParams::small()
    }

    fn el(v: u64) -> GroupElement {
        toy().element(v).unwrap()
    }

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn pdl_commit_respond_examples() {
        let g = toy();
        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), MALLEABLE);
        assert_eq!(s.commit_with_nonce(g.scalar(4u32)).unwrap(), vec![el(16)]);
        assert_eq!(s.commit(&mut rng(0)), Err(Error::AlreadyCommitted));
        assert_eq!(s.respond(&g.scalar(2u32)).unwrap(), vec![g.scalar(10u32)]);
        assert_eq!(s.respond(&g.scalar(2u32)), Err(Error::SessionFinished));

        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), MALLEABLE);
        assert_eq!(s.commit_with_nonce(g.zero()).unwrap(), vec![g.identity()]);

        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), MALLEABLE);
        assert_eq!(s.respond(&g.one()), Err(Error::NotCommitted));
        s.commit_with_nonce(g.scalar(4u32)).unwrap();
        assert_eq!(s.respond(&g.zero()).unwrap(), vec![g.scalar(4u32)]);

        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), MALLEABLE);
        s.commit_with_nonce(g.scalar(4u32)).unwrap();
        assert_eq!(s.respond(&g.scalar(10u32)).unwrap(), vec![g.one()]);
    }

    #[test]
    fn pdl_verify_examples() {
        let g = toy();
        let stmt = SigmaStatement::pdl(g.generator(), el(8));
        let t = |z, c, s| Transcript {
            commitments: vec![el(z)],
            challenge: g.scalar(c as u32),
            responses: vec![g.scalar(s as u32)],
        };
        assert!(verify(&g, &stmt, &t(16, 2, 10)));
        assert!(!verify(&g, &stmt, &t(16, 2, 9)));
        let trivial = SigmaStatement::pdl(g.generator(), g.identity());
        for c in 0..11 {
            assert!(verify(&g, &trivial, &t(1, c, 0)));
        }
    }

    #[test]
    fn eqdl_worked_example() {
        let g = toy();
        let (g1, g2) = (el(2), el(4));
        let mut s = ProverSession::eqdl(&g, vec![g1.clone(), g2.clone()], g.scalar(3u32), MALLEABLE);
        assert_eq!(s.statement(), &SigmaStatement::eqdl(g1.clone(), g2.clone(), el(8), el(18)));
        assert_eq!(s.commit_with_nonce(g.scalar(5u32)).unwrap(), vec![el(9), el(12)]);
        let resp = s.respond(&g.scalar(7u32)).unwrap();
        assert_eq!(resp, vec![g.scalar(4u32)]);
        // both sides of both checks: 2^4 = 16 and 4^4 = 3
        assert_eq!(g.exp(&g1, &resp[0]), el(16));
        assert_eq!(g.mul(&el(9), &g.exp(&el(8), &g.scalar(7u32))), el(16));
        assert_eq!(g.exp(&g2, &resp[0]), el(3));
        assert_eq!(g.mul(&el(12), &g.exp(&el(18), &g.scalar(7u32))), el(3));

        let stmt = SigmaStatement::eqdl(g1, g2, el(8), el(18));
        let mut t = Transcript {
            commitments: vec![el(9), el(12)],
            challenge: g.scalar(7u32),
            responses: resp,
        };
        assert!(verify(&g, &stmt, &t));
        t.responses[0] = g.add(&t.responses[0], &g.one());
        assert!(!verify(&g, &stmt, &t));

        let zero = SigmaStatement::eqdl(el(2), el(4), g.identity(), g.identity());
        for c in 0..11u32 {
            let mut fixed = FixedChallenge(g.scalar(c));
            let t = eqdl_run(&g, &el(2), &el(4), g.zero(), &mut fixed, &mut rng(c as u64)).unwrap();
            assert!(verify(&g, &zero, &t));
        }
    }

    #[test]
    fn eqdl_rejects_unequal_logs() {
        let g = toy();
        // gamma = base^3, delta = base'^4
        let stmt = SigmaStatement::eqdl(el(2), el(4), g.exp(&el(2), &g.scalar(3u32)), g.exp(&el(4), &g.scalar(4u32)));
        for seed in 0..20 {
            let mut s = ProverSession::new(&g, stmt.clone(), g.scalar(3u32), MALLEABLE);
            let t = prove(&mut s, &mut RandomVerifier::new(&g, seed), &mut rng(seed)).unwrap();
            // fails unless the challenge happens to be 0
            assert_eq!(verify(&g, &stmt, &t), t.challenge.is_zero());
        }
    }

    #[test]
    fn bid_validity_examples() {
        let g = toy();
        let y = el(3);
        let big_y = el(4);
        let mut v = RandomVerifier::new(&g, 9);
        for seed in 0..30 {
            let ct = encrypt(&g, &g.identity(), &y, &g.scalar(2u32));
            let t = bid_validity_prove(&g, &ct, g.scalar(2u32), false, &y, &big_y, MALLEABLE, &mut v, &mut rng(seed))
                .unwrap();
            assert!(verify(&g, &SigmaStatement::bid_validity(&g, &y, &big_y, &ct), &t));

            let ct = encrypt(&g, &big_y, &y, &g.scalar(2u32));
            let t = bid_validity_prove(&g, &ct, g.scalar(2u32), true, &y, &big_y, MALLEABLE, &mut v, &mut rng(seed))
                .unwrap();
            assert!(verify(&g, &SigmaStatement::bid_validity(&g, &y, &big_y, &ct), &t));
        }
        let ct = encrypt(&g, &el(9), &y, &g.scalar(2u32));
        for is_y in [false, true] {
            assert_eq!(
                ProverSession::bid_validity(&g, &y, &big_y, &ct, g.scalar(2u32), is_y, MALLEABLE).err(),
                Some(Error::WitnessMismatch)
            );
        }
    }

    #[test]
    fn sum_validity_examples() {
        let g = toy();
        let y = el(3);
        let big_y = el(4);
        let rs = [2u32, 5, 7].map(|r| g.scalar(r));
        let r_sum = g.sum(&rs);
        let enc_vec = |plains: [&GroupElement; 3]| -> Vec<Ciphertext> {
            plains.iter().zip(&rs).map(|(m, r)| encrypt(&g, m, &y, r)).collect()
        };
        let one = g.identity();
        let honest = enc_vec([&one, &big_y, &one]);
        let none = enc_vec([&one, &one, &one]);
        let mut v = RandomVerifier::new(&g, 3);
        let mut passes_without_y = 0;
        for seed in 0..30 {
            let t = sum_validity_prove(&g, &honest, r_sum.clone(), &y, &big_y, MALLEABLE, &mut v, &mut rng(seed)).unwrap();
            assert!(verify(&g, &SigmaStatement::sum_validity(&g, &y, &big_y, &honest), &t));

            let t = sum_validity_prove(&g, &none, r_sum.clone(), &y, &big_y, MALLEABLE, &mut v, &mut rng(seed)).unwrap();
            if verify(&g, &SigmaStatement::sum_validity(&g, &y, &big_y, &none), &t) {
                passes_without_y += 1;
                assert!(t.challenge.is_zero());
            }
        }
        assert!(passes_without_y < 30);

        let single = vec![encrypt(&g, &big_y, &y, &rs[0])];
        let t = sum_validity_prove(&g, &single, rs[0].clone(), &y, &big_y, MALLEABLE, &mut v, &mut rng(1)).unwrap();
        assert!(verify(&g, &SigmaStatement::sum_validity(&g, &y, &big_y, &single), &t));
    }

    #[test]
    fn fiat_shamir_challenge_properties() {
        let g = GroupParams::large();
        let stmt = SigmaStatement::pdl(g.generator(), g.exp_g(&g.scalar(77u32)));
        let z1 = vec![g.exp_g(&g.scalar(5u32))];
        let z2 = vec![g.exp_g(&g.scalar(6u32))];
        let c1 = fiat_shamir_challenge(&g, &stmt, &z1);
        assert_eq!(c1, fiat_shamir_challenge(&g, &stmt, &z1));
        assert_ne!(c1, fiat_shamir_challenge(&g, &stmt, &z2));
        assert!(c1.value() < g.q());

        let toy = toy();
        let stmt = SigmaStatement::pdl(toy.generator(), el(8));
        assert!(fiat_shamir_challenge(&toy, &stmt, &[el(16)]).value() < toy.q());
    }

    #[test]
    fn ni_proofs_bind_every_statement_byte() {
        let g = GroupParams::large();
        let x = g.scalar(123_456u32);
        let mut s = ProverSession::pdl(&g, &g.generator(), x, ProofMode::FiatShamir);
        let stmt = s.statement().clone();
        let proof = NIProof::create(&g, &mut s, &mut rng(4)).unwrap();
        assert!(proof.verify(&g, &stmt));
        assert_eq!(NIProof::decode(&g, &proof.encode(&g)).unwrap(), proof);

        let SigmaStatement::Pdl { g: base, v } = &stmt else { unreachable!() };
        let mut enc = Encoder::new(&g);
        stmt.encode(&mut enc);
        let bytes = enc.finish();
        // flip each byte of the serialized statement
        for i in 0..bytes.len() {
            let mut mutated = bytes.clone();
            mutated[i] ^= 0x01;
            let mut dec = Decoder::new(&g, &mutated);
            let (Ok(b2), Ok(v2)) = (dec.element(), dec.element()) else { continue };
            let other = SigmaStatement::pdl(b2, v2);
            assert_ne!(&other, &stmt);
            assert!(!proof.verify(&g, &other), "byte {i}");
        }
        // the honest statement is still accepted and a different tag is not
        assert!(proof.verify(&g, &SigmaStatement::pdl(base.clone(), v.clone())));
        let mut wrong = proof.clone();
        wrong.tag = "brandt-lab/eqdl/v1".into();
        assert!(!wrong.verify(&g, &stmt));
    }

    #[test]
    fn fiat_shamir_prover_refuses_foreign_challenges() {
        let g = toy();
        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), ProofMode::FiatShamir);
        let z = s.commit(&mut rng(1)).unwrap();
        let own = fiat_shamir_challenge(&g, s.statement(), &z);
        let foreign = g.add(&own, &g.one());
        assert!(matches!(s.respond(&foreign), Err(Error::ModeMismatch(_))));
    }

    #[test]
    fn verifier_checks_who_picked_the_challenge() {
        let g = toy();
        let mut victor = Verifier::new(&g, MALLEABLE, 11);
        let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(3u32), MALLEABLE);
        let stmt = s.statement().clone();
        let t = prove(&mut s, &mut victor, &mut rng(2)).unwrap();
        assert!(victor.accepts(&g, &stmt, &t));

        // a simulated transcript satisfies the equations but was never challenged
        let c = g.add(&t.challenge, &g.one());
        let resp = g.scalar(6u32);
        let z = g.div(&g.exp_g(&resp), &g.exp(&el(8), &c));
        let simulated = Transcript {
            commitments: vec![z],
            challenge: c,
            responses: vec![resp],
        };
        assert!(verify(&g, &stmt, &simulated));
        assert!(!victor.accepts(&g, &stmt, &simulated));
    }

    #[test]
    fn exhaustive_completeness_and_special_soundness() {
        let g = toy();
        for x in 0..11u32 {
            let x = g.scalar(x);
            for r in 0..11u32 {
                let mut ts = Vec::new();
                for c in [3u32, 8] {
                    let mut s = ProverSession::pdl(&g, &g.generator(), x.clone(), MALLEABLE);
                    s.commit_with_nonce(g.scalar(r)).unwrap();
                    let t = prove_committed(&mut s, g.scalar(c));
                    assert!(verify(&g, s.statement(), &t));
                    ts.push(t);

                    let mut e = ProverSession::eqdl(&g, vec![el(2), el(13)], x.clone(), MALLEABLE);
                    e.commit_with_nonce(g.scalar(r)).unwrap();
                    let te = prove_committed(&mut e, g.scalar(c));
                    assert!(verify(&g, e.statement(), &te));
                }
                assert_eq!(extract_witness(&g, &ts[0], &ts[1]), Some(x.clone()));
            }
        }
    }

    fn prove_committed(s: &mut ProverSession, c: Scalar) -> Transcript {
        let commitments = s.commitments().unwrap().to_vec();
        let responses = s.respond(&c).unwrap();
        Transcript {
            commitments,
            challenge: c,
            responses,
        }
    }

    proptest! {
        #[test]
        fn honest_proofs_verify_in_both_modes(seed in any::<u64>(), x in 1u32..11, r in 0u32..11, is_y in any::<bool>()) {
            let g = toy();
            let y = g.exp_g(&g.scalar(x));
            let big_y = el(4);
            let plain = if is_y { big_y.clone() } else { g.identity() };
            let ct = encrypt(&g, &plain, &y, &g.scalar(r));
            for mode in [MALLEABLE, ProofMode::FiatShamir] {
                let mut verifier = Verifier::new(&g, mode, seed);
                let mut s = ProverSession::bid_validity(&g, &y, &big_y, &ct, g.scalar(r), is_y, mode).unwrap();
                let stmt = s.statement().clone();
                let t = prove(&mut s, &mut verifier, &mut rng(seed)).unwrap();
                prop_assert!(verifier.accepts(&g, &stmt, &t));

                let mut s = ProverSession::pdl(&g, &g.generator(), g.scalar(x), mode);
                let stmt = s.statement().clone();
                let t = prove(&mut s, &mut verifier, &mut rng(seed)).unwrap();
                prop_assert!(verifier.accepts(&g, &stmt, &t));
            }
        }
    }
}
