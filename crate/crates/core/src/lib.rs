pub mod adversary;
pub mod codec;
pub mod defenses;
pub mod elgamal;
pub mod error;
pub mod group;
pub mod protocol;
pub mod recovery;
pub mod scenario;
pub mod sigma;

pub use error::{Error, Result};
