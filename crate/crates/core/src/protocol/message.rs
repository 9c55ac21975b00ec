use serde::Serialize;

use crate::codec::{Decoder, Encoder};
use crate::elgamal::Ciphertext;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::sigma::{ProofMode, Transcript};

use super::{Party, Round};

/// 1-based `(bidder, price)` cell of the outcome matrix.
pub type Cell = (usize, usize);

/// What the seller announces after decryption.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Winner { bidder: usize, price: usize },
    NoWinner,
    /// More than one cell decrypted to 1; the seller cannot tell which is real.
    MultipleOnes { cells: Vec<Cell> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    KeyShare {
        y: GroupElement,
        proof: Transcript,
    },
    Bid {
        ciphertexts: Vec<Ciphertext>,
        validity: Vec<Transcript>,
        sum: Transcript,
    },
    /// `gamma` and `delta` in row-major cell order, one EQDL proof per cell.
    Outcome {
        gamma: Vec<GroupElement>,
        delta: Vec<GroupElement>,
        proofs: Vec<Transcript>,
    },
    /// Partial decryptions for every cell, sent to the seller.
    Decryption {
        phi: Vec<GroupElement>,
        proof: Transcript,
    },
    /// `(from, row, values)`: the seller forwards bidder `from`'s partials
    /// for `row` to everyone but the owner of that row.
    PublishedShares {
        shares: Vec<(usize, usize, Vec<GroupElement>)>,
    },
    Restart {
        cells: Vec<Cell>,
    },
    Rerandomize {
        cells: Vec<Cell>,
    },
    Result {
        outcome: Outcome,
    },
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::KeyShare { .. } => "keyshare",
            Message::Bid { .. } => "bid",
            Message::Outcome { .. } => "outcome",
            Message::Decryption { .. } => "decryption",
            Message::PublishedShares { .. } => "published-shares",
            Message::Restart { .. } => "restart",
            Message::Rerandomize { .. } => "rerandomize",
            Message::Result { .. } => "result",
        }
    }

    /// Canonical payload: kind tag, proof-system tag, then the fields.
    pub fn encode(&self, params: &GroupParams, mode: ProofMode) -> Vec<u8> {
        let mut enc = Encoder::new(params);
        enc.put_tag(self.kind()).put_tag(mode.tag());
        match self {
            Message::KeyShare { y, proof } => {
                enc.put_element(y);
                proof.encode(&mut enc);
            }
            Message::Bid {
                ciphertexts,
                validity,
                sum,
            } => {
                enc.put_len(ciphertexts.len());
                for ct in ciphertexts {
                    ct.encode(&mut enc);
                }
                put_transcripts(&mut enc, validity);
                sum.encode(&mut enc);
            }
            Message::Outcome { gamma, delta, proofs } => {
                enc.put_elements(gamma).put_elements(delta);
                put_transcripts(&mut enc, proofs);
            }
            Message::Decryption { phi, proof } => {
                enc.put_elements(phi);
                proof.encode(&mut enc);
            }
            Message::PublishedShares { shares } => {
                enc.put_len(shares.len());
                for (from, row, values) in shares {
                    enc.put_len(*from).put_len(*row).put_elements(values);
                }
            }
            Message::Restart { cells } | Message::Rerandomize { cells } => put_cells(&mut enc, cells),
            Message::Result { outcome } => match outcome {
                Outcome::Winner { bidder, price } => {
                    enc.put_tag("winner").put_len(*bidder).put_len(*price);
                }
                Outcome::NoWinner => {
                    enc.put_tag("no-winner");
                }
                Outcome::MultipleOnes { cells } => {
                    enc.put_tag("multiple-ones");
                    put_cells(&mut enc, cells);
                }
            },
        }
        enc.finish()
    }

    pub fn decode(params: &GroupParams, bytes: &[u8]) -> Result<(Message, ProofMode)> {
        let mut dec = Decoder::new(params, bytes);
        let kind = dec.tag()?;
        let mode = match dec.tag()?.as_str() {
            t if t == ProofMode::InteractiveMalleable.tag() => ProofMode::InteractiveMalleable,
            t if t == ProofMode::FiatShamir.tag() => ProofMode::FiatShamir,
            other => return Err(Error::Decode(format!("unknown proof system {other:?}"))),
        };
        let msg = match kind.as_str() {
            "keyshare" => Message::KeyShare {
                y: dec.element()?,
                proof: Transcript::decode(&mut dec)?,
            },
            "bid" => {
                let n = dec.length()?;
                let ciphertexts = (0..n).map(|_| Ciphertext::decode(&mut dec)).collect::<Result<_>>()?;
                Message::Bid {
                    ciphertexts,
                    validity: get_transcripts(&mut dec)?,
                    sum: Transcript::decode(&mut dec)?,
                }
            }
            "outcome" => Message::Outcome {
                gamma: dec.elements()?,
                delta: dec.elements()?,
                proofs: get_transcripts(&mut dec)?,
            },
            "decryption" => Message::Decryption {
                phi: dec.elements()?,
                proof: Transcript::decode(&mut dec)?,
            },
            "published-shares" => {
                let n = dec.length()?;
                let shares = (0..n)
                    .map(|_| Ok((dec.length()?, dec.length()?, dec.elements()?)))
                    .collect::<Result<_>>()?;
                Message::PublishedShares { shares }
            }
            "restart" => Message::Restart {
                cells: get_cells(&mut dec)?,
            },
            "rerandomize" => Message::Rerandomize {
                cells: get_cells(&mut dec)?,
            },
            "result" => {
                let outcome = match dec.tag()?.as_str() {
                    "winner" => Outcome::Winner {
                        bidder: dec.length()?,
                        price: dec.length()?,
                    },
                    "no-winner" => Outcome::NoWinner,
                    "multiple-ones" => Outcome::MultipleOnes {
                        cells: get_cells(&mut dec)?,
                    },
                    other => return Err(Error::Decode(format!("unknown outcome {other:?}"))),
                };
                Message::Result { outcome }
            }
            other => return Err(Error::Decode(format!("unknown message kind {other:?}"))),
        };
        dec.finish()?;
        Ok((msg, mode))
    }
}

fn put_transcripts(enc: &mut Encoder<'_>, ts: &[Transcript]) {
    enc.put_len(ts.len());
    for t in ts {
        t.encode(enc);
    }
}

fn get_transcripts(dec: &mut Decoder<'_, '_>) -> Result<Vec<Transcript>> {
    let n = dec.length()?;
    (0..n).map(|_| Transcript::decode(dec)).collect()
}

fn put_cells(enc: &mut Encoder<'_>, cells: &[Cell]) {
    enc.put_len(cells.len());
    for &(i, j) in cells {
        enc.put_len(i).put_len(j);
    }
}

fn get_cells(dec: &mut Decoder<'_, '_>) -> Result<Vec<Cell>> {
    let n = dec.length()?;
    (0..n).map(|_| Ok((dec.length()?, dec.length()?))).collect()
}

/// One entry of the bulletin board. `epoch` counts protocol restarts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Post {
    pub epoch: u32,
    pub round: Round,
    pub author: Party,
    pub message: Message,
    pub auth: Option<Vec<u8>>,
}

impl Post {
    pub fn new(epoch: u32, round: Round, author: Party, message: Message) -> Self {
        Post {
            epoch,
            round,
            author,
            message,
            auth: None,
        }
    }

    pub fn kind(&self) -> &'static str {
        self.message.kind()
    }

    /// Bytes an authentication tag covers: author, epoch, round and payload.
    pub fn authenticated_bytes(&self, params: &GroupParams, mode: ProofMode) -> Vec<u8> {
        let mut enc = Encoder::new(params);
        enc.put_tag(&self.author.to_string())
            .put_u32(self.epoch)
            .put_tag(self.round.name())
            .put_bytes(&self.message.encode(params, mode));
        enc.finish()
    }
}
