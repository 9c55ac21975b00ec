use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::defenses::{self, decryption_statement, mac_tag, AuthRegistry, NoiseCheck};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::sigma::{self, ProofMode, Prover, SigmaStatement, Transcript, Verifier};

use super::board::{cell_index, BoardView, BulletinBoard};
use super::{AuctionConfig, Bidder, Cell, Message, Outcome, Party, Post, Round};

/// Hook for dishonest behaviour. Bidders an adversary controls in a round
/// are scheduled after every honest bidder of that round; the default
/// methods behave honestly.
pub trait Adversary {
    fn controls(&self, _bidder: usize, _round: Round) -> bool {
        false
    }

    fn keygen(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        run.post_keyshare(bidder)
    }

    fn bid(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        run.post_bid(bidder)
    }

    fn outcome(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        run.post_outcome(bidder)
    }

    fn decrypt(&mut self, run: &mut AuctionRun, bidder: usize) -> Result<()> {
        run.send_decryption(bidder)
    }
}

/// Everyone follows the protocol.
pub struct Honest;

impl Adversary for Honest {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum RunEvent {
    Restart { epoch: u32, cells: Vec<Cell> },
    Rerandomize { epoch: u32, cells: Vec<Cell> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuctionResult {
    pub outcome: Outcome,
    /// Decrypted cells in row-major order.
    pub v: Vec<GroupElement>,
    pub n: usize,
    pub k: usize,
    pub epoch: u32,
    pub events: Vec<RunEvent>,
}

impl AuctionResult {
    pub fn value(&self, cell: Cell) -> &GroupElement {
        &self.v[cell_index(self.k, cell)]
    }

    pub fn ones(&self) -> Vec<Cell> {
        crate::recovery::cells(self.n, self.k)
            .filter(|&c| self.value(c).is_one())
            .collect()
    }
}

/// Honest run with seeded randomness.
pub fn run_auction(config: &AuctionConfig, prices: &[usize], seed: u64) -> Result<AuctionResult> {
    AuctionRun::new(config.clone(), prices, seed)?.execute(&mut Honest)
}

/// One auction: agents, seller, bulletin board and the verifier every
/// honest party uses.
///
/// In interactive mode the verifier hands out challenges and keeps a log of
/// them, so a proof on the board is accepted only if its challenge is the
/// one the verifier issued for that statement and commitment.
pub struct AuctionRun {
    config: AuctionConfig,
    prices: Vec<usize>,
    board: BulletinBoard,
    verifier: Verifier,
    registry: AuthRegistry,
    bidders: Vec<Bidder>,
    inbox: Vec<Post>,
    rng: ChaCha20Rng,
    epoch: u32,
    events: Vec<RunEvent>,
}

impl AuctionRun {
    pub fn new(config: AuctionConfig, prices: &[usize], seed: u64) -> Result<Self> {
        config.validate()?;
        if prices.len() != config.n {
            return Err(Error::InvalidConfig(format!("{} bids for {} bidders", prices.len(), config.n)));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let verifier = Verifier::new(&config.params, config.proof_mode(), rng.next_u64());
        let mut registry = AuthRegistry::new();
        for i in 1..=config.n {
            registry.register(Party::Bidder(i), &mut rng);
        }
        registry.register(Party::Seller, &mut rng);
        let bidders = (1..=config.n)
            .map(|i| Bidder::new(i, prices[i - 1], &config, &mut rng))
            .collect::<Result<_>>()?;
        Ok(AuctionRun {
            board: BulletinBoard::new(&config.params, config.proof_mode()),
            prices: prices.to_vec(),
            config,
            verifier,
            registry,
            bidders,
            inbox: Vec::new(),
            rng,
            epoch: 0,
            events: Vec::new(),
        })
    }

    pub fn config(&self) -> &AuctionConfig {
        &self.config
    }

    pub fn params(&self) -> &GroupParams {
        &self.config.params
    }

    pub fn mode(&self) -> ProofMode {
        self.config.proof_mode()
    }

    pub fn prices(&self) -> &[usize] {
        &self.prices
    }

    pub fn board(&self) -> &BulletinBoard {
        &self.board
    }

    /// Decryption posts the seller received, oldest first.
    pub fn seller_inbox(&self) -> &[Post] {
        &self.inbox
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn events(&self) -> &[RunEvent] {
        &self.events
    }

    pub fn bidder(&self, i: usize) -> &Bidder {
        &self.bidders[i - 1]
    }

    pub fn bidder_mut(&mut self, i: usize) -> &mut Bidder {
        &mut self.bidders[i - 1]
    }

    pub fn registry(&self) -> &AuthRegistry {
        &self.registry
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn view(&self) -> BoardView<'_> {
        self.board.view(self.epoch, self.config.n, self.config.k)
    }

    /// Runs a proof against the shared verifier.
    pub fn run_proof(&mut self, prover: &mut dyn Prover) -> Result<Transcript> {
        sigma::prove(prover, &mut self.verifier, &mut self.rng)
    }

    /// Post tagged with the author's own registered key when authentication
    /// is on.
    pub fn signed_post(&self, author: Party, round: Round, message: Message) -> Post {
        let mut post = Post::new(self.epoch, round, author, message);
        if self.config.defenses.authenticate {
            post.auth = self.registry.authenticate_post(self.params(), self.mode(), &post).ok();
        }
        post
    }

    /// Tags `post` with a key that is not necessarily the author's.
    pub fn tag_with_key(&self, post: &mut Post, key: &[u8]) {
        post.auth = Some(mac_tag(key, &post.authenticated_bytes(self.params(), self.mode())));
    }

    /// Runs the checks every honest party applies, then appends.
    pub fn publish(&mut self, post: Post) -> Result<()> {
        self.check_post(&post)?;
        self.board.append(post);
        Ok(())
    }

    pub fn publish_as(&mut self, author: Party, round: Round, message: Message) -> Result<()> {
        let post = self.signed_post(author, round, message);
        self.publish(post)
    }

    /// Private channel to the seller; the seller runs the same checks.
    pub fn deliver_to_seller(&mut self, post: Post) -> Result<()> {
        self.check_post(&post)?;
        self.inbox.push(post);
        Ok(())
    }

    fn check_post(&self, post: &Post) -> Result<()> {
        let (party, round) = (post.author, post.round);
        if self.config.defenses.authenticate
            && !self.registry.verify_post(self.params(), self.mode(), post).unwrap_or(false)
        {
            return Err(Error::AuthRejected { party, round });
        }
        if !self.verify_message(post)? {
            return Err(Error::ProofRejected { party, round });
        }
        Ok(())
    }

    fn accepts(&self, statement: &SigmaStatement, t: &Transcript) -> bool {
        self.verifier.accepts(self.params(), statement, t)
    }

    fn verify_message(&self, post: &Post) -> Result<bool> {
        let (n, k) = (self.config.n, self.config.k);
        let p = self.params();
        let view = self.view();
        let bidder = match post.author {
            Party::Bidder(i) if (1..=n).contains(&i) => Some(i),
            Party::Bidder(_) | Party::Outsider => return Err(Error::UnknownAuthor(post.author)),
            Party::Seller => None,
        };
        Ok(match (&post.message, bidder) {
            (Message::KeyShare { y, proof }, Some(_)) => {
                self.accepts(&SigmaStatement::pdl(p.generator(), y.clone()), proof)
            }
            (
                Message::Bid {
                    ciphertexts,
                    validity,
                    sum,
                },
                Some(i),
            ) => {
                let y = view.public_key()?;
                let marker = self.config.marker(i);
                ciphertexts.len() == k
                    && validity.len() == k
                    && ciphertexts
                        .iter()
                        .zip(validity)
                        .all(|(ct, t)| self.accepts(&SigmaStatement::bid_validity(p, &y, marker, ct), t))
                    && self.accepts(&SigmaStatement::sum_validity(p, &y, marker, ciphertexts), sum)
            }
            (Message::Outcome { gamma, delta, proofs }, Some(_)) => {
                let bases = view.bases()?;
                gamma.len() == n * k
                    && delta.len() == n * k
                    && proofs.len() == n * k
                    && bases.iter().enumerate().all(|(c, (a, b))| {
                        let st = SigmaStatement::eqdl(a.clone(), b.clone(), gamma[c].clone(), delta[c].clone());
                        self.accepts(&st, &proofs[c])
                    })
            }
            (Message::Decryption { phi, proof }, Some(i)) => {
                let (_, deltas) = view.outcome_products()?;
                let y_a = view.key_share(i).ok_or(Error::RoundIncomplete(Round::Keygen))?;
                phi.len() == n * k && {
                    let st = decryption_statement(p, self.config.defenses.key_consistency, y_a, &deltas, phi);
                    self.accepts(&st, proof)
                }
            }
            (Message::Restart { .. } | Message::Rerandomize { .. }, Some(_)) => true,
            (Message::PublishedShares { .. } | Message::Result { .. }, None) => true,
            _ => false,
        })
    }

    pub fn post_keyshare(&mut self, i: usize) -> Result<()> {
        let mut session = self.bidder(i).keyshare_prover(&self.config);
        let proof = self.run_proof(&mut session)?;
        let y = self.bidder(i).key().y.clone();
        self.publish_as(Party::Bidder(i), Round::Keygen, Message::KeyShare { y, proof })
    }

    /// Ciphertexts and proofs for bidder `i`'s honest bid.
    pub fn honest_bid_message(&mut self, i: usize) -> Result<Message> {
        let y = self.view().public_key()?;
        let bidder = self.bidder(i);
        let ciphertexts = bidder.ciphertexts(self.params(), &y);
        let mut sessions = (1..=self.config.k)
            .map(|j| bidder.bid_validity_prover(&self.config, &y, j))
            .collect::<Result<Vec<_>>>()?;
        let mut sum_session = bidder.sum_validity_prover(&self.config, &y);
        let validity = sessions
            .iter_mut()
            .map(|s| self.run_proof(s))
            .collect::<Result<Vec<_>>>()?;
        let sum = self.run_proof(&mut sum_session)?;
        Ok(Message::Bid {
            ciphertexts,
            validity,
            sum,
        })
    }

    pub fn post_bid(&mut self, i: usize) -> Result<()> {
        let msg = self.honest_bid_message(i)?;
        self.publish_as(Party::Bidder(i), Round::Bid, msg)
    }

    pub fn post_outcome(&mut self, i: usize) -> Result<()> {
        let bases = self.view().bases()?;
        let k = self.config.k;
        let cells: Vec<Cell> = crate::recovery::cells(self.config.n, k).collect();
        let bidder = self.bidder(i);
        let (gamma, delta): (Vec<_>, Vec<_>) = cells
            .iter()
            .zip(&bases)
            .map(|(&cell, base)| bidder.blind(self.params(), k, cell, base))
            .unzip();
        let mut sessions: Vec<_> = cells
            .iter()
            .zip(&bases)
            .map(|(&cell, base)| bidder.outcome_prover(&self.config, cell, base))
            .collect();
        let proofs = sessions
            .iter_mut()
            .map(|s| self.run_proof(s))
            .collect::<Result<Vec<_>>>()?;
        self.publish_as(Party::Bidder(i), Round::Outcome, Message::Outcome { gamma, delta, proofs })
    }

    /// Partial decryptions with secret `x`, proved and sent to the seller.
    pub fn send_decryption_with(&mut self, i: usize, x: &crate::group::Scalar) -> Result<()> {
        let (_, deltas) = self.view().outcome_products()?;
        let (phi, mut session) = self.bidder(i).decryption_prover(&self.config, &deltas, x);
        let proof = self.run_proof(&mut session)?;
        let post = self.signed_post(Party::Bidder(i), Round::Decrypt, Message::Decryption { phi, proof });
        self.deliver_to_seller(post)
    }

    pub fn send_decryption(&mut self, i: usize) -> Result<()> {
        let x = self.bidder(i).key().x.clone();
        self.send_decryption_with(i, &x)
    }

    /// Partials per bidder as received by the seller in this epoch.
    pub fn seller_partials(&self) -> Result<Vec<&[GroupElement]>> {
        (1..=self.config.n)
            .map(|i| {
                self.inbox
                    .iter()
                    .rev()
                    .find(|p| p.epoch == self.epoch && p.author == Party::Bidder(i))
                    .and_then(|p| match &p.message {
                        Message::Decryption { phi, .. } => Some(phi.as_slice()),
                        _ => None,
                    })
                    .ok_or(Error::RoundIncomplete(Round::Decrypt))
            })
            .collect()
    }

    /// Seller forwards, for each row, every partial except the row owner's.
    pub fn publish_shares(&mut self) -> Result<()> {
        let (n, k) = (self.config.n, self.config.k);
        let partials = self.seller_partials()?;
        let mut shares = Vec::new();
        for row in 1..=n {
            for (h, phi) in partials.iter().enumerate().map(|(h, phi)| (h + 1, phi)) {
                if h != row {
                    shares.push((h, row, phi[(row - 1) * k..row * k].to_vec()));
                }
            }
        }
        self.publish_as(Party::Seller, Round::Decrypt, Message::PublishedShares { shares })
    }

    /// `v = prod gamma / prod phi` for every cell, from the seller's inbox.
    pub fn decrypt_cells(&self) -> Result<Vec<GroupElement>> {
        let p = self.params();
        let (gamma, _) = self.view().outcome_products()?;
        let partials = self.seller_partials()?;
        Ok(gamma
            .iter()
            .enumerate()
            .map(|(c, g)| p.div(g, &p.product(partials.iter().map(|phi| &phi[c]))))
            .collect())
    }

    /// Bidder `i`'s own row, from the forwarded partials and its own.
    pub fn bidder_view(&self, i: usize) -> Result<Vec<GroupElement>> {
        let p = self.params();
        let k = self.config.k;
        let view = self.view();
        let (gamma, _) = view.outcome_products()?;
        let own = self.seller_partials()?[i - 1];
        let forwarded = view.published_shares(i);
        if forwarded.len() + 1 != self.config.n {
            return Err(Error::RoundIncomplete(Round::Decrypt));
        }
        Ok((1..=k)
            .map(|j| {
                let c = cell_index(k, (i, j));
                let others = p.product(forwarded.iter().map(|(_, phi)| &phi[j - 1]));
                p.div(&gamma[c], &p.mul(&others, &own[c]))
            })
            .collect())
    }

    pub fn determine_winner(&mut self) -> Result<AuctionResult> {
        let (n, k) = (self.config.n, self.config.k);
        let v = self.decrypt_cells()?;
        let ones: Vec<Cell> = crate::recovery::cells(n, k)
            .filter(|&c| v[cell_index(k, c)].is_one())
            .collect();
        let outcome = match ones.as_slice() {
            [] => Outcome::NoWinner,
            [(bidder, price)] => Outcome::Winner {
                bidder: *bidder,
                price: *price,
            },
            _ => Outcome::MultipleOnes { cells: ones },
        };
        self.publish_as(Party::Seller, Round::Result, Message::Result { outcome: outcome.clone() })?;
        Ok(AuctionResult {
            outcome,
            v,
            n,
            k,
            epoch: self.epoch,
            events: self.events.clone(),
        })
    }

    fn schedule(&self, adversary: &dyn Adversary, round: Round) -> Vec<usize> {
        let (controlled, honest): (Vec<usize>, Vec<usize>) =
            (1..=self.config.n).partition(|&i| adversary.controls(i, round));
        honest.into_iter().chain(controlled).collect()
    }

    fn announcer(&self, adversary: &dyn Adversary) -> usize {
        (1..=self.config.n)
            .find(|&i| !adversary.controls(i, Round::Outcome))
            .unwrap_or(1)
    }

    fn round(&mut self, adversary: &mut dyn Adversary, round: Round) -> Result<()> {
        for i in self.schedule(adversary, round) {
            let controlled = adversary.controls(i, round);
            match (round, controlled) {
                (Round::Keygen, true) => adversary.keygen(self, i)?,
                (Round::Keygen, false) => self.post_keyshare(i)?,
                (Round::Bid, true) => adversary.bid(self, i)?,
                (Round::Bid, false) => self.post_bid(i)?,
                (Round::Outcome, true) => adversary.outcome(self, i)?,
                (Round::Outcome, false) => self.post_outcome(i)?,
                (Round::Decrypt, true) => adversary.decrypt(self, i)?,
                (Round::Decrypt, false) => self.send_decryption(i)?,
                (Round::Result, _) => unreachable!("the seller runs the result round"),
            }
        }
        Ok(())
    }

    /// New epoch: fresh keys and randomizers for everyone.
    fn restart(&mut self) -> Result<()> {
        self.epoch += 1;
        let config = &self.config;
        self.bidders = (1..=config.n)
            .map(|i| Bidder::new(i, self.prices[i - 1], config, &mut self.rng))
            .collect::<Result<_>>()?;
        Ok(())
    }

    /// All rounds, with restart and re-randomization when the
    /// corresponding defense is on.
    pub fn execute(&mut self, adversary: &mut dyn Adversary) -> Result<AuctionResult> {
        let flags = self.config.defenses;
        let limit = self.config.max_restarts;
        loop {
            self.round(adversary, Round::Keygen)?;
            self.round(adversary, Round::Bid)?;
            if flags.noise_product_check {
                let cells = defenses::exceptional_cells(&self.view())?;
                if !cells.is_empty() {
                    if self.epoch as usize >= limit {
                        return Err(Error::RestartLimit(limit));
                    }
                    let who = Party::Bidder(self.announcer(adversary));
                    self.publish_as(who, Round::Outcome, Message::Restart { cells: cells.clone() })?;
                    self.events.push(RunEvent::Restart { epoch: self.epoch, cells });
                    self.restart()?;
                    continue;
                }
            }
            self.round(adversary, Round::Outcome)?;
            let mut passes = 0;
            loop {
                if flags.unblinded_product_check {
                    defenses::check_unblinded_products(&self.view())?;
                }
                if !flags.noise_product_check {
                    break;
                }
                let NoiseCheck::Rerandomize(cells) = defenses::check_noise_products(&self.view())? else {
                    break;
                };
                passes += 1;
                if passes > limit {
                    return Err(Error::RestartLimit(limit));
                }
                let who = Party::Bidder(self.announcer(adversary));
                self.publish_as(who, Round::Outcome, Message::Rerandomize { cells: cells.clone() })?;
                self.events.push(RunEvent::Rerandomize {
                    epoch: self.epoch,
                    cells: cells.clone(),
                });
                let (params, k) = (self.config.params.clone(), self.config.k);
                for b in &mut self.bidders {
                    b.rerandomize(&params, k, &cells, &mut self.rng);
                }
                self.round(adversary, Round::Outcome)?;
            }
            self.round(adversary, Round::Decrypt)?;
            self.publish_shares()?;
            return self.determine_winner();
        }
    }
}
