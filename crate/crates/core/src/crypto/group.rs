//! The toy bilinear group: integers modulo a prime with a degenerate
//! pairing.
//!
//! Elements are integers in `[0, p)`, the generator is fixed at 1, group
//! addition is addition mod `p`, scalar multiplication is multiplication
//! mod `p`, and the pairing of two elements is their product mod `p`.
//! With generator 1 an element *is* its own discrete log, so the pairing
//! identities the identity-based schemes need hold exactly.

use rand::{Rng, RngCore};

use crate::crypto::{sha256, CryptoError, Element, ELEMENT_LEN};
use crate::identity::IdentityString;

/// Default group modulus: the Mersenne prime `2^61 - 1`.
pub const DEFAULT_MODULUS: u64 = (1 << 61) - 1;
/// Smallest accepted modulus.
pub const MIN_MODULUS: u64 = 101;

/// Parameters of the toy group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupParams {
    p: u64,
    generator: Element,
}

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            p: DEFAULT_MODULUS,
            generator: Element(1),
        }
    }
}

impl GroupParams {
    /// Creates parameters for modulus `p`, which must be a prime of at
    /// least [`MIN_MODULUS`].
    pub fn new(p: u64) -> Result<Self, CryptoError> {
        if p < MIN_MODULUS || !is_prime_u64(p) {
            return Err(CryptoError::InvalidModulus(p));
        }
        Ok(GroupParams {
            p,
            generator: Element(1),
        })
    }

    /// The group modulus.
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The fixed generator (always 1 in this toy group).
    pub fn generator(&self) -> Element {
        self.generator
    }

    /// Reduces an arbitrary integer into the group.
    pub fn reduce(&self, x: u64) -> Element {
        Element(x % self.p)
    }

    /// Group addition.
    pub fn add(&self, a: Element, b: Element) -> Element {
        Element(((a.0 as u128 + b.0 as u128) % self.p as u128) as u64)
    }

    /// Scalar multiplication of an element.
    pub fn scalar_mul(&self, k: u64, e: Element) -> Element {
        Element(((k as u128 * e.0 as u128) % self.p as u128) as u64)
    }

    /// The degenerate pairing: the product of the two elements mod `p`.
    pub fn pair(&self, a: Element, b: Element) -> Element {
        self.scalar_mul(a.0, b)
    }

    /// A uniform scalar in `[1, p)`.
    pub fn random_scalar(&self, rng: &mut impl RngCore) -> u64 {
        rng.random_range(1..self.p)
    }

    /// Hashes an identity onto a nonzero group element: the first 8 bytes
    /// of `SHA-256(canonical form)` as a big-endian integer mod `p`,
    /// rehashing the full digest until the result is nonzero.
    pub fn hash_to_element(&self, identity: &IdentityString) -> Element {
        self.hash_bytes_to_element(&identity.canonical_bytes())
    }

    /// [`Self::hash_to_element`] over raw bytes.
    pub fn hash_bytes_to_element(&self, bytes: &[u8]) -> Element {
        let mut digest = sha256(bytes);
        loop {
            let mut prefix = [0u8; ELEMENT_LEN];
            prefix.copy_from_slice(&digest[..ELEMENT_LEN]);
            let e = u64::from_be_bytes(prefix) % self.p;
            if e != 0 {
                return Element(e);
            }
            digest = sha256(&digest);
        }
    }
}

/// Deterministic Miller-Rabin primality test, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n.is_multiple_of(small) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // These witnesses are known to be exact for every n < 3.3e24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}
