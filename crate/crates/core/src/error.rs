use thiserror::Error;

use crate::protocol::{Party, Round};

/// Errors raised anywhere in the lab.
///
/// Protocol-level rejections (`ProofRejected`, `AuthRejected`, `ModeMismatch`)
/// are what honest parties observe when an attack is caught; attack drivers
/// turn them into a failed [`AttackReport`](crate::adversary::AttackReport)
/// rather than propagating them.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(&'static str),
    #[error("subgroup order q does not divide p - 1")]
    OrderMismatch,
    #[error("g does not generate the order-q subgroup")]
    BadGenerator,
    #[error("value is not an element of the order-q subgroup")]
    NotInSubgroup,

    #[error("cannot aggregate an empty list of key shares")]
    EmptyShareList,
    #[error("cannot combine an empty list of partial decryptions")]
    EmptyPartials,

    #[error("prover session already committed")]
    AlreadyCommitted,
    #[error("prover session has not committed yet")]
    NotCommitted,
    #[error("prover session already answered a challenge")]
    SessionFinished,
    #[error("witness does not match the statement")]
    WitnessMismatch,
    #[error("challenge was not derived from the statement; prover refuses ({0})")]
    ModeMismatch(&'static str),

    #[error("price {price} outside 1..={k}")]
    PriceOutOfRange { price: usize, k: usize },
    #[error("invalid auction configuration: {0}")]
    InvalidConfig(String),
    #[error("proof from {party} rejected in {round} round")]
    ProofRejected { party: Party, round: Round },
    #[error("post claiming to be from {party} failed authentication in {round} round")]
    AuthRejected { party: Party, round: Round },
    #[error("unknown author {0}")]
    UnknownAuthor(Party),
    #[error("{0} round is not complete")]
    RoundIncomplete(Round),
    #[error("outcome shares missing for bidder {0}")]
    MissingShares(usize),
    #[error("gave up after {0} protocol restarts")]
    RestartLimit(usize),
    #[error("noise removal detected: product of outcome shares equals the unblinded base at cell ({0}, {1})")]
    NoiseRemovalDetected(usize, usize),

    #[error("not a valid bid vector: {0}")]
    InvalidBidVector(String),
    #[error("exponent vector invalid: {0}")]
    InvalidExponents(String),
    #[error("exponents are inconsistent with any valid bid constellation: {0}")]
    InconsistentExponents(String),
    #[error("value is not a power Y^l with 0 <= l <= {0}")]
    NotAPower(usize),

    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for the rejections an honest party raises when it catches a
    /// deviation, as opposed to internal failures.
    pub fn is_detection(&self) -> bool {
        matches!(
            self,
            Error::ProofRejected { .. }
                | Error::AuthRejected { .. }
                | Error::ModeMismatch(_)
                | Error::NoiseRemovalDetected(..)
        )
    }
}
