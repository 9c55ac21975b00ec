//! n-of-n distributed ElGamal.
//!
//! Every bidder holds a share `x_a`; the joint public key is the product of
//! the published `y_a = g^{x_a}`. Decryption needs a partial from every
//! share. Partial decryption works on products of `beta` components, which
//! is how the outcome round uses it.

use rand::Rng;
use serde::Serialize;

use crate::codec::{Decoder, Encoder};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyShare {
    pub x: Scalar,
    pub y: GroupElement,
}

impl KeyShare {
    pub fn from_secret(params: &GroupParams, x: Scalar) -> Self {
        let y = params.exp_g(&x);
        KeyShare { x, y }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PublicKeyAggregate {
    pub y: GroupElement,
    pub shares: Vec<GroupElement>,
}

/// `(alpha, beta) = (m * y^r, g^r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ciphertext {
    pub alpha: GroupElement,
    pub beta: GroupElement,
}

impl Ciphertext {
    pub fn identity(params: &GroupParams) -> Self {
        Ciphertext {
            alpha: params.identity(),
            beta: params.identity(),
        }
    }

    /// Componentwise product; encrypts the product of the plaintexts.
    pub fn mul(&self, params: &GroupParams, other: &Ciphertext) -> Ciphertext {
        Ciphertext {
            alpha: params.mul(&self.alpha, &other.alpha),
            beta: params.mul(&self.beta, &other.beta),
        }
    }

    /// Componentwise power; encrypts the plaintext raised to `e`.
    pub fn pow(&self, params: &GroupParams, e: &Scalar) -> Ciphertext {
        Ciphertext {
            alpha: params.exp(&self.alpha, e),
            beta: params.exp(&self.beta, e),
        }
    }

    pub fn encode(&self, enc: &mut Encoder<'_>) {
        enc.put_element(&self.alpha).put_element(&self.beta);
    }

    pub fn decode(dec: &mut Decoder<'_, '_>) -> Result<Self> {
        Ok(Ciphertext {
            alpha: dec.element()?,
            beta: dec.element()?,
        })
    }
}

/// Draws `x` uniformly from `[1, q)`; zero would make `y = 1`.
pub fn gen_keyshare<R: Rng + ?Sized>(params: &GroupParams, rng: &mut R) -> KeyShare {
    KeyShare::from_secret(params, params.random_nonzero_scalar(rng))
}

pub fn aggregate_keys(params: &GroupParams, shares: &[GroupElement]) -> Result<PublicKeyAggregate> {
    if shares.is_empty() {
        return Err(Error::EmptyShareList);
    }
    Ok(PublicKeyAggregate {
        y: params.product(shares),
        shares: shares.to_vec(),
    })
}

pub fn encrypt(params: &GroupParams, m: &GroupElement, y: &GroupElement, r: &Scalar) -> Ciphertext {
    Ciphertext {
        alpha: params.mul(m, &params.exp(y, r)),
        beta: params.exp_g(r),
    }
}

/// `beta_product^x` for one share.
pub fn partial_decrypt(params: &GroupParams, beta_product: &GroupElement, share: &KeyShare) -> GroupElement {
    params.exp(beta_product, &share.x)
}

/// `alpha_product / prod(partials)`.
pub fn combine_decrypt(
    params: &GroupParams,
    alpha_product: &GroupElement,
    partials: &[GroupElement],
) -> Result<GroupElement> {
    if partials.is_empty() {
        return Err(Error::EmptyPartials);
    }
    Ok(params.div(alpha_product, &params.product(partials)))
}

/// Full decryption with every share; test and simulation helper.
pub fn decrypt_with_all(params: &GroupParams, ct: &Ciphertext, shares: &[KeyShare]) -> Result<GroupElement> {
    let partials: Vec<_> = shares
        .iter()
        .map(|s| partial_decrypt(params, &ct.beta, s))
        .collect();
    combine_decrypt(params, &ct.alpha, &partials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> GroupParams {
        GroupParams::small()
    }

    fn el(v: u64) -> GroupElement {
        toy().element(v).unwrap()
    }

    #[test]
    fn keyshare_examples() {
        let g = toy();
        assert_eq!(KeyShare::from_secret(&g, g.scalar(3u32)).y, el(8));
        assert_eq!(KeyShare::from_secret(&g, g.scalar(5u32)).y, el(9));
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..50 {
            let share = gen_keyshare(&g, &mut rng);
            assert!(!share.x.is_zero());
            assert!(g.contains(&share.y));
        }
    }

    #[test]
    fn aggregation_examples() {
        let g = toy();
        assert_eq!(aggregate_keys(&g, &[el(8), el(9)]).unwrap().y, el(3));
        assert_eq!(aggregate_keys(&g, &[el(13)]).unwrap().y, el(13));
        assert!(aggregate_keys(&g, &[el(8), g.inv(&el(8))]).unwrap().y.is_one());
        assert_eq!(aggregate_keys(&g, &[]), Err(Error::EmptyShareList));
    }

    #[test]
    fn encryption_and_decryption_examples() {
        let g = toy();
        let ct = encrypt(&g, &el(4), &el(3), &g.scalar(2u32));
        assert_eq!((ct.alpha.clone(), ct.beta.clone()), (el(13), el(4)));
        assert_eq!(encrypt(&g, &g.identity(), &el(3), &g.zero()), Ciphertext::identity(&g));

        let s3 = KeyShare::from_secret(&g, g.scalar(3u32));
        let s5 = KeyShare::from_secret(&g, g.scalar(5u32));
        assert_eq!(partial_decrypt(&g, &el(4), &s3), el(18));
        assert_eq!(partial_decrypt(&g, &el(4), &s5), el(12));
        assert!(partial_decrypt(&g, &g.identity(), &s5).is_one());

        assert_eq!(combine_decrypt(&g, &el(13), &[el(18), el(12)]).unwrap(), el(4));
        assert_eq!(combine_decrypt(&g, &el(6), &[g.identity()]).unwrap(), el(6));
        assert_eq!(combine_decrypt(&g, &el(6), &[]), Err(Error::EmptyPartials));
    }

    #[test]
    fn exhaustive_round_trip_and_homomorphism() {
        let g = toy();
        let shares = [3u32, 5].map(|x| KeyShare::from_secret(&g, g.scalar(x)));
        let y = aggregate_keys(&g, &[shares[0].y.clone(), shares[1].y.clone()]).unwrap().y;
        let elements = g.enumerate();
        for m1 in &elements {
            for r1 in 0..11u32 {
                let c1 = encrypt(&g, m1, &y, &g.scalar(r1));
                assert_eq!(&decrypt_with_all(&g, &c1, &shares).unwrap(), m1);
                for m2 in &elements {
                    let r2 = g.scalar(7u32);
                    let c2 = encrypt(&g, m2, &y, &r2);
                    let product = c1.mul(&g, &c2);
                    assert_eq!(product, encrypt(&g, &g.mul(m1, m2), &y, &g.add(&g.scalar(r1), &r2)));
                    assert_eq!(decrypt_with_all(&g, &product, &shares).unwrap(), g.mul(m1, m2));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn decrypt_inverts_encrypt(seed in any::<u64>(), n in 1usize..=4, m in 0u32..11) {
            let g = toy();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let shares: Vec<_> = (0..n).map(|_| gen_keyshare(&g, &mut rng)).collect();
            let publics: Vec<_> = shares.iter().map(|s| s.y.clone()).collect();
            let agg = aggregate_keys(&g, &publics).unwrap();
            let mut reversed = publics.clone();
            reversed.reverse();
            prop_assert_eq!(&aggregate_keys(&g, &reversed).unwrap().y, &agg.y);

            let m = g.exp_g(&g.scalar(m));
            let ct = encrypt(&g, &m, &agg.y, &g.random_scalar(&mut rng));
            prop_assert_eq!(decrypt_with_all(&g, &ct, &shares).unwrap(), m);
        }
    }
}
