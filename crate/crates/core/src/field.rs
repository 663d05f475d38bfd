//! Arithmetic in the prime field F_q.
//!
//! Elements are plain `u64` residues in `[0, q)`; the context carries the
//! modulus and all operations. Only prime moduli are accepted — extension
//! fields would need a different element representation and are deliberately
//! not modelled here.

use crate::{Error, Result};

/// Immutable arithmetic context for F_q, q prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldCtx {
    q: u64,
}

impl FieldCtx {
    /// Builds a context after a deterministic primality check.
    pub fn new(q: u64) -> Result<Self> {
        if q >= 2 && is_prime(q) {
            Ok(FieldCtx { q })
        } else {
            Err(Error::NotPrime(q))
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// True for the bit-packed F_2 fast paths.
    #[inline]
    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.q - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.q == 2 {
            a & b
        } else {
            ((a as u128 * b as u128) % self.q as u128) as u64
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // q prime, so gcd(a, q) = 1 and the Bezout coefficient is the inverse.
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.q as i128) as u64)
    }

    /// `a^e` with signed exponent; negative exponents invert first.
    pub fn pow(&self, a: u64, e: i64) -> Result<u64> {
        let (base, exp) = if e < 0 {
            (self.inv(a)?, e.unsigned_abs())
        } else {
            (a, e as u64)
        };
        let mut result = 1u64;
        let mut b = base;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        Ok(result)
    }
}

/// Deterministic Miller-Rabin, exact for all u64 with this witness set.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
