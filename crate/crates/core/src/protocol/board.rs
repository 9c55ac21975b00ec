use serde::Serialize;

use crate::elgamal::Ciphertext;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::sigma::ProofMode;

use super::message::{Cell, Message, Post};
use super::{Party, Round};

/// Append-only log of accepted posts.
#[derive(Clone, Debug)]
pub struct BulletinBoard {
    params: GroupParams,
    mode: ProofMode,
    posts: Vec<Post>,
}

/// JSON form of one post.
#[derive(Debug, Serialize)]
pub struct PostRecord {
    pub epoch: u32,
    pub round: Round,
    pub author: Party,
    pub kind: &'static str,
    pub payload: String,
    pub auth: Option<String>,
}

impl BulletinBoard {
    pub fn new(params: &GroupParams, mode: ProofMode) -> Self {
        BulletinBoard {
            params: params.clone(),
            mode,
            posts: Vec::new(),
        }
    }

    pub fn append(&mut self, post: Post) {
        self.posts.push(post);
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn mode(&self) -> ProofMode {
        self.mode
    }

    /// Posts of one round, in arrival order.
    pub fn round(&self, epoch: u32, round: Round) -> impl Iterator<Item = &Post> {
        self.posts
            .iter()
            .filter(move |p| p.epoch == epoch && p.round == round)
    }

    pub fn records(&self) -> Vec<PostRecord> {
        self.posts
            .iter()
            .map(|p| PostRecord {
                epoch: p.epoch,
                round: p.round,
                author: p.author,
                kind: p.kind(),
                payload: hex::encode(p.message.encode(&self.params, self.mode)),
                auth: p.auth.as_ref().map(hex::encode),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records()).expect("post records serialize")
    }

    pub fn view(&self, epoch: u32, n: usize, k: usize) -> BoardView<'_> {
        BoardView {
            board: self,
            epoch,
            n,
            k,
        }
    }
}

/// Factors of the outcome product for cell `(i, j)`: every entry above
/// price `j`, bidder `i`'s entries below `j`, and entries at `j` from
/// bidders before `i`.
pub fn base_factors(n: usize, k: usize, (i, j): Cell) -> Vec<Cell> {
    let above = (1..=n).flat_map(move |h| (j + 1..=k).map(move |d| (h, d)));
    let own_lower = (1..j).map(move |d| (i, d));
    let earlier = (1..i).map(move |h| (h, j));
    above.chain(own_lower).chain(earlier).collect()
}

/// Products of the alpha and beta components over [`base_factors`].
/// `bids[h - 1]` holds bidder `h`'s ciphertexts.
pub fn compute_gamma_delta_base(params: &GroupParams, bids: &[&[Ciphertext]], cell: Cell) -> (GroupElement, GroupElement) {
    let k = bids.first().map_or(0, |b| b.len());
    let factors = base_factors(bids.len(), k, cell);
    let alpha = params.product(factors.iter().map(|&(h, d)| &bids[h - 1][d - 1].alpha));
    let beta = params.product(factors.iter().map(|&(h, d)| &bids[h - 1][d - 1].beta));
    (alpha, beta)
}

pub fn cell_index(k: usize, (i, j): Cell) -> usize {
    (i - 1) * k + j - 1
}

/// Read-only snapshot of one epoch. Later posts by the same author in the
/// same round supersede earlier ones.
#[derive(Clone, Copy)]
pub struct BoardView<'b> {
    board: &'b BulletinBoard,
    epoch: u32,
    n: usize,
    k: usize,
}

impl<'b> BoardView<'b> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &'b GroupParams {
        &self.board.params
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> {
        crate::recovery::cells(self.n, self.k)
    }

    fn latest(&self, round: Round, author: Party) -> Option<&'b Message> {
        self.board
            .posts
            .iter()
            .rev()
            .find(|p| p.epoch == self.epoch && p.round == round && p.author == author)
            .map(|p| &p.message)
    }

    pub fn key_share(&self, bidder: usize) -> Option<&'b GroupElement> {
        match self.latest(Round::Keygen, Party::Bidder(bidder)) {
            Some(Message::KeyShare { y, .. }) => Some(y),
            _ => None,
        }
    }

    pub fn key_shares(&self) -> Result<Vec<&'b GroupElement>> {
        (1..=self.n)
            .map(|i| self.key_share(i).ok_or(Error::RoundIncomplete(Round::Keygen)))
            .collect()
    }

    /// Joint key `prod y_a`, once every bidder has posted a share.
    pub fn public_key(&self) -> Result<GroupElement> {
        Ok(self.params().product(self.key_shares()?))
    }

    pub fn bid_message(&self, bidder: usize) -> Option<&'b Message> {
        self.latest(Round::Bid, Party::Bidder(bidder))
    }

    pub fn bid(&self, bidder: usize) -> Option<&'b [Ciphertext]> {
        match self.bid_message(bidder) {
            Some(Message::Bid { ciphertexts, .. }) => Some(ciphertexts),
            _ => None,
        }
    }

    pub fn bids(&self) -> Result<Vec<&'b [Ciphertext]>> {
        (1..=self.n)
            .map(|i| self.bid(i).ok_or(Error::RoundIncomplete(Round::Bid)))
            .collect()
    }

    /// Base products for every cell in row-major order.
    pub fn bases(&self) -> Result<Vec<(GroupElement, GroupElement)>> {
        let bids = self.bids()?;
        Ok(self
            .cells()
            .map(|cell| compute_gamma_delta_base(self.params(), &bids, cell))
            .collect())
    }

    pub fn base(&self, cell: Cell) -> Result<(GroupElement, GroupElement)> {
        Ok(compute_gamma_delta_base(self.params(), &self.bids()?, cell))
    }

    pub fn outcome(&self, bidder: usize) -> Option<(&'b [GroupElement], &'b [GroupElement])> {
        match self.latest(Round::Outcome, Party::Bidder(bidder)) {
            Some(Message::Outcome { gamma, delta, .. }) => Some((gamma, delta)),
            _ => None,
        }
    }

    pub fn outcomes(&self) -> Result<Vec<(&'b [GroupElement], &'b [GroupElement])>> {
        (1..=self.n)
            .map(|i| self.outcome(i).ok_or(Error::RoundIncomplete(Round::Outcome)))
            .collect()
    }

    /// `prod_a gamma^a` and `prod_a delta^a` per cell.
    pub fn outcome_products(&self) -> Result<(Vec<GroupElement>, Vec<GroupElement>)> {
        let outcomes = self.outcomes()?;
        let p = self.params();
        let cells = self.n * self.k;
        let gamma = (0..cells).map(|c| p.product(outcomes.iter().map(|(g, _)| &g[c]))).collect();
        let delta = (0..cells).map(|c| p.product(outcomes.iter().map(|(_, d)| &d[c]))).collect();
        Ok((gamma, delta))
    }

    /// Partials the seller forwarded for `row`, keyed by sender.
    pub fn published_shares(&self, row: usize) -> Vec<(usize, &'b [GroupElement])> {
        match self.latest(Round::Decrypt, Party::Seller) {
            Some(Message::PublishedShares { shares }) => shares
                .iter()
                .filter(|(_, r, _)| *r == row)
                .map(|(from, _, values)| (*from, values.as_slice()))
                .collect(),
            _ => Vec::new(),
        }
    }
}
