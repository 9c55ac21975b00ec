//! Countermeasures, each behind a flag.
//!
//! * `ni_proofs`: every proof is made non-interactive with Fiat-Shamir, so
//!   no party ever answers a challenge it did not derive itself.
//! * `authenticate`: every post carries an HMAC tag under the claimed
//!   author's registered key.
//! * `noise_product_check`: before the outcome round every bidder checks
//!   that no cell's base product is 1 (restart with fresh keys if one is),
//!   and afterwards that no cell's combined `prod gamma` is 1 (fresh
//!   randomizers for the flagged cells).
//! * `key_consistency`: the decryption proof also ties the decryption key
//!   to the key share published at key generation.
//! * `unblinded_product_check`: the older check that `prod gamma` differs
//!   from the unblinded base. Defeated by an attacker who removes the noise
//!   with an exponent other than 1.

use std::collections::BTreeMap;

use hmac::{Hmac, Mac};
use rand::RngCore;
use serde::Serialize;
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};
use crate::protocol::board::{base_factors, cell_index, BoardView};
use crate::protocol::{Cell, Party, Post};
use crate::sigma::{self, ChallengeSource, ProofMode, ProverSession, SigmaStatement, Transcript};

type HmacSha256 = Hmac<Sha256>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DefenseFlags {
    pub ni_proofs: bool,
    pub authenticate: bool,
    pub noise_product_check: bool,
    pub key_consistency: bool,
    pub unblinded_product_check: bool,
}

impl DefenseFlags {
    pub fn none() -> Self {
        Self::default()
    }

    /// The four countermeasures that hold up; the unblinded-product check
    /// stays off.
    pub fn all() -> Self {
        DefenseFlags {
            ni_proofs: true,
            authenticate: true,
            noise_product_check: true,
            key_consistency: true,
            unblinded_product_check: false,
        }
    }

    pub fn proof_mode(&self) -> ProofMode {
        if self.ni_proofs {
            ProofMode::FiatShamir
        } else {
            ProofMode::InteractiveMalleable
        }
    }

    pub fn any(&self) -> bool {
        *self != Self::none()
    }
}

pub fn mac_tag(key: &[u8], bytes: &[u8]) -> Vec<u8> {
    let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
    mac.update(bytes);
    mac.finalize().into_bytes().to_vec()
}

/// Per-party MAC keys, standing in for a PKI.
#[derive(Clone, Debug, Default)]
pub struct AuthRegistry {
    keys: BTreeMap<Party, [u8; 32]>,
}

impl AuthRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, party: Party, rng: &mut dyn RngCore) -> [u8; 32] {
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        self.keys.insert(party, key);
        key
    }

    pub fn is_registered(&self, party: Party) -> bool {
        self.keys.contains_key(&party)
    }

    /// Tag binding author, epoch, round and payload.
    pub fn authenticate_post(&self, params: &GroupParams, mode: ProofMode, post: &Post) -> Result<Vec<u8>> {
        let key = self.keys.get(&post.author).ok_or(Error::UnknownAuthor(post.author))?;
        Ok(mac_tag(key, &post.authenticated_bytes(params, mode)))
    }

    pub fn verify_post(&self, params: &GroupParams, mode: ProofMode, post: &Post) -> Result<bool> {
        let key = self.keys.get(&post.author).ok_or(Error::UnknownAuthor(post.author))?;
        let Some(tag) = &post.auth else { return Ok(false) };
        let mut mac = HmacSha256::new_from_slice(key).expect("hmac accepts any key length");
        mac.update(&post.authenticated_bytes(params, mode));
        Ok(mac.verify_slice(tag).is_ok())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseCheck {
    Ok,
    RestartRequired,
}

/// Restart is required when the alpha base product of the cell is 1. A cell
/// with no factors at all (a single bidder with a single price) always
/// reports it.
pub fn check_exceptional_base(view: &BoardView<'_>, i: usize, j: usize) -> Result<BaseCheck> {
    let (alpha, _) = view.base((i, j))?;
    Ok(if alpha.is_one() {
        BaseCheck::RestartRequired
    } else {
        BaseCheck::Ok
    })
}

fn structurally_empty(view: &BoardView<'_>, cell: Cell) -> bool {
    base_factors(view.n(), view.k(), cell).is_empty()
}

/// Cells whose base product is 1, skipping the factor-free cell whose base
/// is 1 by construction.
pub fn exceptional_cells(view: &BoardView<'_>) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for cell in view.cells().filter(|&c| !structurally_empty(view, c)) {
        if check_exceptional_base(view, cell.0, cell.1)? == BaseCheck::RestartRequired {
            out.push(cell);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseCheck {
    Ok,
    Rerandomize(Vec<Cell>),
}

/// Flags every cell where the randomizers cancel, i.e. `prod_a gamma^a = 1`.
pub fn check_noise_products(view: &BoardView<'_>) -> Result<NoiseCheck> {
    let (gamma, _) = view.outcome_products()?;
    let flagged: Vec<Cell> = view
        .cells()
        .filter(|&c| !structurally_empty(view, c) && gamma[cell_index(view.k(), c)].is_one())
        .collect();
    Ok(if flagged.is_empty() {
        NoiseCheck::Ok
    } else {
        NoiseCheck::Rerandomize(flagged)
    })
}

/// Fails when some cell's combined `prod gamma` equals its unblinded base.
/// Honest randomizers hit this with probability `1/q` per cell.
pub fn check_unblinded_products(view: &BoardView<'_>) -> Result<()> {
    let (gamma, _) = view.outcome_products()?;
    let bases = view.bases()?;
    for cell in view.cells().filter(|&c| !structurally_empty(view, c)) {
        let idx = cell_index(view.k(), cell);
        if gamma[idx] == bases[idx].0 {
            return Err(Error::NoiseRemovalDetected(cell.0, cell.1));
        }
    }
    Ok(())
}

/// Statement for a bidder's partial decryptions. The weak form only proves
/// one exponent across all cells; the key-consistent form adds `(g, y_a)`.
pub fn decryption_statement(
    params: &GroupParams,
    key_consistency: bool,
    key_share: &GroupElement,
    deltas: &[GroupElement],
    phis: &[GroupElement],
) -> SigmaStatement {
    let mut bases = Vec::with_capacity(deltas.len() + 1);
    let mut values = Vec::with_capacity(deltas.len() + 1);
    if key_consistency {
        bases.push(params.generator());
        values.push(key_share.clone());
    }
    bases.extend_from_slice(deltas);
    values.extend_from_slice(phis);
    SigmaStatement::Eqdl { bases, values }
}

pub fn key_consistency_statement(
    params: &GroupParams,
    key_share: &GroupElement,
    deltas: &[GroupElement],
    phis: &[GroupElement],
) -> SigmaStatement {
    decryption_statement(params, true, key_share, deltas, phis)
}

/// Partials `delta^x` and a key-consistency proof for them.
pub fn key_consistency_prove(
    params: &GroupParams,
    x: &Scalar,
    deltas: &[GroupElement],
    mode: ProofMode,
    source: &mut dyn ChallengeSource,
    rng: &mut dyn RngCore,
) -> Result<(Vec<GroupElement>, Transcript)> {
    let mut bases = vec![params.generator()];
    bases.extend_from_slice(deltas);
    let phis = deltas.iter().map(|d| params.exp(d, x)).collect();
    let mut session = ProverSession::eqdl(params, bases, x.clone(), mode);
    let t = sigma::prove(&mut session, source, rng)?;
    Ok((phis, t))
}

pub fn key_consistency_verify(
    params: &GroupParams,
    key_share: &GroupElement,
    deltas: &[GroupElement],
    phis: &[GroupElement],
    t: &Transcript,
) -> bool {
    sigma::verify(params, &key_consistency_statement(params, key_share, deltas, phis), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Message, Round};
    use crate::sigma::FiatShamir;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn el(v: u64) -> GroupElement {
        GroupParams::small().element(v).unwrap()
    }

    #[test]
    fn post_tags() {
        let g = GroupParams::small();
        let mode = ProofMode::FiatShamir;
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let mut reg = AuthRegistry::new();
        reg.register(Party::Bidder(1), &mut rng);
        reg.register(Party::Bidder(2), &mut rng);

        let mut post = Post::new(0, Round::Bid, Party::Bidder(1), Message::Restart { cells: vec![(1, 1)] });
        post.auth = Some(reg.authenticate_post(&g, mode, &post).unwrap());
        assert!(reg.verify_post(&g, mode, &post).unwrap());

        // Bidder 2 posting as bidder 1 with its own key
        let mut forged = post.clone();
        forged.author = Party::Bidder(2);
        let tag_2 = reg.authenticate_post(&g, mode, &forged).unwrap();
        forged.author = Party::Bidder(1);
        forged.auth = Some(tag_2);
        assert!(!reg.verify_post(&g, mode, &forged).unwrap());

        let mut mutated = post.clone();
        mutated.message = Message::Restart { cells: vec![(1, 2)] };
        assert!(!reg.verify_post(&g, mode, &mutated).unwrap());

        let mut untagged = post.clone();
        untagged.auth = None;
        assert!(!reg.verify_post(&g, mode, &untagged).unwrap());

        let stranger = Post::new(0, Round::Bid, Party::Outsider, Message::Restart { cells: vec![] });
        assert_eq!(reg.authenticate_post(&g, mode, &stranger), Err(Error::UnknownAuthor(Party::Outsider)));
        assert_eq!(reg.verify_post(&g, mode, &stranger), Err(Error::UnknownAuthor(Party::Outsider)));
    }

    #[test]
    fn key_consistency_proofs() {
        let g = GroupParams::small();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = g.scalar(3u32);
        let y_a = g.exp_g(&x);
        let deltas = vec![el(4), el(13), el(9)];
        let (phis, t) =
            key_consistency_prove(&g, &x, &deltas, ProofMode::FiatShamir, &mut FiatShamir::new(&g), &mut rng).unwrap();
        assert_eq!(phis, deltas.iter().map(|d| g.exp(d, &x)).collect::<Vec<_>>());
        assert!(key_consistency_verify(&g, &y_a, &deltas, &phis, &t));

        // consistent wrong key: passes the weak statement, fails the strong one
        let wrong = g.add(&x, &g.one());
        let wrong_phis: Vec<_> = deltas.iter().map(|d| g.exp(d, &wrong)).collect();
        let weak = decryption_statement(&g, false, &y_a, &deltas, &wrong_phis);
        let mut session = ProverSession::new(&g, weak.clone(), wrong.clone(), ProofMode::FiatShamir);
        let t = sigma::prove(&mut session, &mut FiatShamir::new(&g), &mut rng).unwrap();
        assert!(sigma::verify(&g, &weak, &t));
        let strong = key_consistency_statement(&g, &y_a, &deltas, &wrong_phis);
        let mut session = ProverSession::new(&g, strong.clone(), wrong, ProofMode::FiatShamir);
        let t = sigma::prove(&mut session, &mut FiatShamir::new(&g), &mut rng).unwrap();
        // a zero challenge carries no soundness in a group of order 11
        assert_eq!(sigma::verify(&g, &strong, &t), t.challenge.is_zero());

        // single delta
        let (phis, t) =
            key_consistency_prove(&g, &x, &[el(2)], ProofMode::FiatShamir, &mut FiatShamir::new(&g), &mut rng).unwrap();
        assert!(key_consistency_verify(&g, &y_a, &[el(2)], &phis, &t));
    }

    #[test]
    fn all_flags() {
        let all = DefenseFlags::all();
        assert!(all.ni_proofs && all.authenticate && all.noise_product_check && all.key_consistency);
        assert_eq!(all.proof_mode(), ProofMode::FiatShamir);
        assert_eq!(DefenseFlags::none().proof_mode(), ProofMode::InteractiveMalleable);
        assert!(!DefenseFlags::none().any());
    }
}
