//! Arithmetic in a prime-order subgroup of `Z_p^*`, with exponents mod `q`.
//!
//! Two instantiations ship with the crate: the toy group `p = 23, q = 11,
//! g = 2`, small enough to enumerate, and a 256-bit safe-prime group for
//! realism runs. Anything else can be supplied through [`GroupParams::new`],
//! which validates primality, `q | p - 1`, and the generator.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const LARGE_P: &str = "ac68eba790019a98dac132abce58ada2f3de726e6ff46a52623909e874ce1887";
const LARGE_Q: &str = "563475d3c800cd4c6d609955e72c56d179ef393737fa3529311c84f43a670c43";

/// Below this bound primality is decided by trial division.
const TRIAL_DIVISION_LIMIT: u64 = 1 << 20;
const MILLER_RABIN_ROUNDS: usize = 48;

/// Exponent in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigUint);

/// Element of the order-`q` subgroup, stored as its residue in `[1, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(BigUint);

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Wraps a raw residue without the subgroup membership check.
    ///
    /// Only for handling values an adversary or a test injects; everything
    /// the protocol produces goes through [`GroupParams::element`].
    pub fn from_raw_unchecked(value: BigUint) -> Self {
        GroupElement(value)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

/// Validated `(p, q, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    element_width: usize,
    scalar_width: usize,
}

impl GroupParams {
    /// Validates raw parameters.
    pub fn new(p: BigUint, q: BigUint, g: BigUint) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime("p"));
        }
        if !is_prime(&q) {
            return Err(Error::NotPrime("q"));
        }
        if !(&p - 1u32).is_multiple_of(&q) {
            return Err(Error::OrderMismatch);
        }
        let g = g % &p;
        if g.is_zero() || g.is_one() || !g.modpow(&q, &p).is_one() {
            return Err(Error::BadGenerator);
        }
        let element_width = p.bits().div_ceil(8) as usize;
        let scalar_width = q.bits().div_ceil(8) as usize;
        Ok(GroupParams {
            p,
            q,
            g,
            element_width,
            scalar_width,
        })
    }

    pub fn from_u64(p: u64, q: u64, g: u64) -> Result<Self> {
        Self::new(p.into(), q.into(), g.into())
    }

    /// `p = 23, q = 11, g = 2`.
    pub fn small() -> Self {
        Self::from_u64(23, 11, 2).expect("toy group is valid")
    }

    /// 256-bit safe prime `p = 2q + 1`, generator 4.
    pub fn large() -> Self {
        let p = BigUint::parse_bytes(LARGE_P.as_bytes(), 16).expect("hex constant");
        let q = BigUint::parse_bytes(LARGE_Q.as_bytes(), 16).expect("hex constant");
        Self::new(p, q, BigUint::from(4u32)).expect("built-in group is valid")
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// Byte width of a fixed-width encoded group element.
    pub fn element_width(&self) -> usize {
        self.element_width
    }

    /// Byte width of a fixed-width encoded scalar.
    pub fn scalar_width(&self) -> usize {
        self.scalar_width
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g.clone())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(BigUint::one())
    }

    /// Checks subgroup membership.
    pub fn element(&self, value: impl Into<BigUint>) -> Result<GroupElement> {
        let value = value.into();
        if value.is_zero() || value >= self.p || !value.modpow(&self.q, &self.p).is_one() {
            return Err(Error::NotInSubgroup);
        }
        Ok(GroupElement(value))
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        !x.0.is_zero() && x.0 < self.p && x.0.modpow(&self.q, &self.p).is_one()
    }

    /// Reduces an arbitrary integer mod `q`.
    pub fn scalar(&self, value: impl Into<BigUint>) -> Scalar {
        Scalar(value.into() % &self.q)
    }

    /// Reduces a signed integer mod `q`.
    pub fn scalar_i64(&self, value: i64) -> Scalar {
        let magnitude = self.scalar(value.unsigned_abs());
        if value < 0 {
            self.neg(&magnitude)
        } else {
            magnitude
        }
    }

    /// Accepts a scalar only if it is already reduced.
    pub fn scalar_strict(&self, value: BigUint) -> Result<Scalar> {
        if value >= self.q {
            return Err(Error::Decode("scalar not reduced mod q".into()));
        }
        Ok(Scalar(value))
    }

    pub fn zero(&self) -> Scalar {
        Scalar(BigUint::zero())
    }

    pub fn one(&self) -> Scalar {
        Scalar(BigUint::one())
    }

    /// Uniform in `[0, q)`.
    pub fn random_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_biguint_below(&self.q))
    }

    /// Uniform in `[1, q)`.
    pub fn random_nonzero_scalar<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(rng.gen_biguint_range(&BigUint::one(), &self.q))
    }

    pub fn exp(&self, x: &GroupElement, e: &Scalar) -> GroupElement {
        GroupElement(x.0.modpow(&e.0, &self.p))
    }

    /// `g^e`.
    pub fn exp_g(&self, e: &Scalar) -> GroupElement {
        GroupElement(self.g.modpow(&e.0, &self.p))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement((&a.0 * &b.0) % &self.p)
    }

    /// Inverse inside the subgroup, computed as `x^(q-1)`.
    pub fn inv(&self, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.modpow(&(&self.q - 1u32), &self.p))
    }

    pub fn div(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.mul(a, &self.inv(b))
    }

    pub fn product<'a, I>(&self, items: I) -> GroupElement
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        items
            .into_iter()
            .fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.q)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &self.q - &b.0) % &self.q)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.sub(&self.zero(), a)
    }

    pub fn smul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 * &b.0) % &self.q)
    }

    /// Inverse mod `q`; `None` for zero.
    pub fn sinv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        Some(Scalar(a.0.modpow(&(&self.q - 2u32), &self.q)))
    }

    pub fn sum<'a, I>(&self, items: I) -> Scalar
    where
        I: IntoIterator<Item = &'a Scalar>,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Every element of the subgroup, as `g^0, g^1, ..., g^(q-1)`.
    ///
    /// Only sensible for toy groups; panics if `q` does not fit in a `u32`.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        let q = self.q.to_u32().expect("enumeration needs a toy group");
        (0..q).map(|e| self.exp_g(&self.scalar(e))).collect()
    }
}

/// Primality test: trial division below 2^20, Miller-Rabin above.
///
/// Miller-Rabin witnesses come from a fixed-seed generator so the verdict
/// is reproducible.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_LIMIT {
            return trial_division(small);
        }
    }
    const SMALL_PRIMES: [u32; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    for sp in SMALL_PRIMES {
        if (n % sp).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - 1u32;
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0f7e57);
    let two = BigUint::from(2u32);
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = rng.gen_biguint_range(&two, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
