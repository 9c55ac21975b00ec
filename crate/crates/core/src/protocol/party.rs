use std::fmt;

use serde::{Serialize, Serializer};

/// Author of a board post. Bidders are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Bidder(usize),
    Seller,
    /// Someone outside the registry.
    Outsider,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Bidder(i) => write!(f, "bidder-{i}"),
            Party::Seller => f.write_str("seller"),
            Party::Outsider => f.write_str("outsider"),
        }
    }
}

impl Serialize for Party {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Round {
    Keygen,
    Bid,
    Outcome,
    Decrypt,
    Result,
}

impl Round {
    pub fn name(self) -> &'static str {
        match self {
            Round::Keygen => "keygen",
            Round::Bid => "bid",
            Round::Outcome => "outcome",
            Round::Decrypt => "decrypt",
            Round::Result => "result",
        }
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
