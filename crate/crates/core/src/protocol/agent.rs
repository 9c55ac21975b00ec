use rand::Rng;

use crate::defenses::decryption_statement;
use crate::elgamal::{encrypt, gen_keyshare, Ciphertext, KeyShare};
use crate::error::Result;
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::sigma::{ProverSession, SigmaStatement};

use super::board::cell_index;
use super::{encode_bid, AuctionConfig, BidVector, Cell};

/// One bidder's secrets for an epoch: key share, bid randomizers `r_j`
/// and outcome randomizers `m_ij`, all drawn up front.
#[derive(Clone, Debug)]
pub struct Bidder {
    index: usize,
    bid: BidVector,
    key: KeyShare,
    r: Vec<Scalar>,
    m: Vec<Scalar>,
}

impl Bidder {
    pub fn new<R: Rng + ?Sized>(index: usize, price: usize, config: &AuctionConfig, rng: &mut R) -> Result<Self> {
        let p = &config.params;
        let bid = encode_bid(price, config.k, p, config.marker(index))?;
        let key = gen_keyshare(p, rng);
        let r = (0..config.k).map(|_| p.random_scalar(rng)).collect();
        let m = (0..config.n * config.k).map(|_| p.random_nonzero_scalar(rng)).collect();
        Ok(Bidder { index, bid, key, r, m })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn price(&self) -> usize {
        self.bid.price
    }

    pub fn key(&self) -> &KeyShare {
        &self.key
    }

    pub fn bid_vector(&self) -> &BidVector {
        &self.bid
    }

    pub fn bid_randomizers(&self) -> &[Scalar] {
        &self.r
    }

    pub fn randomizer(&self, k: usize, cell: Cell) -> &Scalar {
        &self.m[cell_index(k, cell)]
    }

    pub fn set_randomizer(&mut self, k: usize, cell: Cell, m: Scalar) {
        self.m[cell_index(k, cell)] = m;
    }

    /// Fresh nonzero randomizers for the given cells.
    pub fn rerandomize<R: Rng + ?Sized>(&mut self, params: &GroupParams, k: usize, cells: &[Cell], rng: &mut R) {
        for &cell in cells {
            self.m[cell_index(k, cell)] = params.random_nonzero_scalar(rng);
        }
    }

    pub fn keyshare_prover(&self, config: &AuctionConfig) -> ProverSession {
        let p = &config.params;
        ProverSession::pdl(p, &p.generator(), self.key.x.clone(), config.proof_mode())
    }

    pub fn ciphertexts(&self, params: &GroupParams, y: &GroupElement) -> Vec<Ciphertext> {
        self.bid
            .entries
            .iter()
            .zip(&self.r)
            .map(|(b, r)| encrypt(params, b, y, r))
            .collect()
    }

    /// Prover for entry `j` (1-based) of this bidder's encrypted bid.
    pub fn bid_validity_prover(&self, config: &AuctionConfig, y: &GroupElement, j: usize) -> Result<ProverSession> {
        let p = &config.params;
        let ct = encrypt(p, &self.bid.entries[j - 1], y, &self.r[j - 1]);
        ProverSession::bid_validity(
            p,
            y,
            config.marker(self.index),
            &ct,
            self.r[j - 1].clone(),
            j == self.bid.price,
            config.proof_mode(),
        )
    }

    pub fn sum_validity_prover(&self, config: &AuctionConfig, y: &GroupElement) -> ProverSession {
        let p = &config.params;
        let cts = self.ciphertexts(p, y);
        ProverSession::sum_validity(p, y, config.marker(self.index), &cts, p.sum(&self.r), config.proof_mode())
    }

    /// `(A^m, B^m)` for one cell.
    pub fn blind(&self, params: &GroupParams, k: usize, cell: Cell, base: &(GroupElement, GroupElement)) -> (GroupElement, GroupElement) {
        let m = self.randomizer(k, cell);
        (params.exp(&base.0, m), params.exp(&base.1, m))
    }

    /// Answers a proof request for one outcome cell.
    pub fn outcome_prover(&self, config: &AuctionConfig, cell: Cell, base: &(GroupElement, GroupElement)) -> ProverSession {
        ProverSession::eqdl(
            &config.params,
            vec![base.0.clone(), base.1.clone()],
            self.randomizer(config.k, cell).clone(),
            config.proof_mode(),
        )
    }

    pub fn partials(&self, params: &GroupParams, deltas: &[GroupElement]) -> Vec<GroupElement> {
        deltas.iter().map(|d| params.exp(d, &self.key.x)).collect()
    }

    /// Prover for partials made with secret `x`; the statement form
    /// follows the key-consistency flag.
    pub fn decryption_prover(
        &self,
        config: &AuctionConfig,
        deltas: &[GroupElement],
        x: &Scalar,
    ) -> (Vec<GroupElement>, ProverSession) {
        let p = &config.params;
        let phis: Vec<GroupElement> = deltas.iter().map(|d| p.exp(d, x)).collect();
        let statement: SigmaStatement =
            decryption_statement(p, config.defenses.key_consistency, &self.key.y, deltas, &phis);
        (phis, ProverSession::new(p, statement, x.clone(), config.proof_mode()))
    }
}
