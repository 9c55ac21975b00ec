//! The five-round sealed-bid auction over a bulletin board.
//!
//! Rounds: every bidder publishes a key share with a proof of knowledge;
//! every bidder encrypts a one-hot bid vector under the joint key with
//! validity proofs; every bidder blinds each outcome cell with a random
//! exponent and proves it used the same exponent on both ciphertext
//! halves; every bidder sends partial decryptions of every cell to the
//! seller; the seller decrypts and the single cell equal to 1 names the
//! winner and the price.

mod agent;
pub mod board;
mod message;
mod party;
mod run;

use serde::Serialize;

use crate::defenses::DefenseFlags;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::sigma::ProofMode;

pub use agent::Bidder;
pub use board::{base_factors, compute_gamma_delta_base, BoardView, BulletinBoard, PostRecord};
pub use message::{Cell, Message, Outcome, Post};
pub use party::{Party, Round};
pub use run::{run_auction, Adversary, AuctionResult, AuctionRun, Honest, RunEvent};

#[derive(Clone, Debug)]
pub struct AuctionConfig {
    pub n: usize,
    pub k: usize,
    pub params: GroupParams,
    /// The bid marker `Y`.
    pub big_y: GroupElement,
    /// Optional per-bidder markers replacing `big_y`.
    pub bidder_y: Option<Vec<GroupElement>>,
    pub defenses: DefenseFlags,
    /// Cap on restarts and on re-randomization passes.
    pub max_restarts: usize,
}

impl AuctionConfig {
    /// `Y = g^2` and no defenses.
    pub fn new(params: GroupParams, n: usize, k: usize) -> Result<Self> {
        let big_y = params.exp_g(&params.scalar(2u32));
        let config = AuctionConfig {
            n,
            k,
            params,
            big_y,
            bidder_y: None,
            defenses: DefenseFlags::none(),
            max_restarts: 32,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_defenses(mut self, defenses: DefenseFlags) -> Self {
        self.defenses = defenses;
        self
    }

    pub fn with_y(mut self, big_y: GroupElement) -> Result<Self> {
        self.big_y = big_y;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bidder_y(mut self, ys: Vec<GroupElement>) -> Result<Self> {
        self.bidder_y = Some(ys);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 || self.k == 0 {
            return bad("need at least one bidder and one price".into());
        }
        if self.params.q() <= &self.n.into() {
            return bad(format!("n = {} must be below q = {}", self.n, self.params.q()));
        }
        let markers: Vec<&GroupElement> = match &self.bidder_y {
            Some(ys) if ys.len() != self.n => return bad(format!("{} per-bidder markers for {} bidders", ys.len(), self.n)),
            Some(ys) => ys.iter().collect(),
            None => vec![&self.big_y],
        };
        for y in markers {
            if !self.params.contains(y) {
                return bad(format!("marker {y} is not in the subgroup"));
            }
            if y.is_one() {
                return bad("marker must not be 1".into());
            }
        }
        Ok(())
    }

    pub fn proof_mode(&self) -> ProofMode {
        self.defenses.proof_mode()
    }

    /// Marker bidder `i` (1-based) encrypts at its price.
    pub fn marker(&self, bidder: usize) -> &GroupElement {
        match &self.bidder_y {
            Some(ys) => &ys[bidder - 1],
            None => &self.big_y,
        }
    }
}

/// `Y` at the chosen price, 1 elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BidVector {
    pub price: usize,
    pub entries: Vec<GroupElement>,
}

pub fn encode_bid(price: usize, k: usize, params: &GroupParams, big_y: &GroupElement) -> Result<BidVector> {
    if price == 0 || price > k {
        return Err(Error::PriceOutOfRange { price, k });
    }
    let entries = (1..=k)
        .map(|j| if j == price { big_y.clone() } else { params.identity() })
        .collect();
    Ok(BidVector { price, entries })
}

/// Winner implied by the bids: highest price, lowest index among ties.
pub fn expected_winner(prices: &[usize]) -> Outcome {
    let Some(&top) = prices.iter().max() else {
        return Outcome::NoWinner;
    };
    let bidder = prices.iter().position(|&p| p == top).expect("max exists") + 1;
    Outcome::Winner { bidder, price: top }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bid_encoding() {
        let g = GroupParams::small();
        let y = g.element(4u32).unwrap();
        let one = g.identity();
        assert_eq!(encode_bid(2, 3, &g, &y).unwrap().entries, vec![one.clone(), y.clone(), one]);
        assert_eq!(encode_bid(1, 1, &g, &y).unwrap().entries, vec![y.clone()]);
        assert_eq!(encode_bid(4, 3, &g, &y), Err(Error::PriceOutOfRange { price: 4, k: 3 }));
        assert_eq!(encode_bid(0, 3, &g, &y), Err(Error::PriceOutOfRange { price: 0, k: 3 }));
    }

    #[test]
    fn config_validation() {
        let g = GroupParams::small();
        let c = AuctionConfig::new(g.clone(), 3, 3).unwrap();
        assert_eq!(c.big_y, g.element(4u32).unwrap());
        assert!(AuctionConfig::new(g.clone(), 0, 3).is_err());
        assert!(AuctionConfig::new(g.clone(), 2, 0).is_err());
        assert!(AuctionConfig::new(g.clone(), 11, 2).is_err());
        assert!(AuctionConfig::new(g.clone(), 10, 2).is_ok());
        assert!(c.clone().with_y(g.identity()).is_err());
        assert!(c.clone().with_y(GroupElement::from_raw_unchecked(5u32.into())).is_err());
        assert!(c.clone().with_bidder_y(vec![g.element(4u32).unwrap()]).is_err());
        let per = c.with_bidder_y((0..3).map(|_| g.element(4u32).unwrap()).collect()).unwrap();
        assert_eq!(per.marker(2), &g.element(4u32).unwrap());
    }

    #[test]
    fn expected_winner_ties_go_to_lowest_index() {
        assert_eq!(expected_winner(&[1, 2, 1]), Outcome::Winner { bidder: 2, price: 2 });
        assert_eq!(expected_winner(&[3, 1, 3]), Outcome::Winner { bidder: 1, price: 3 });
        assert_eq!(expected_winner(&[1]), Outcome::Winner { bidder: 1, price: 1 });
    }
}
