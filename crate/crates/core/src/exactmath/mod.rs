//! Exact arithmetic shared by the verification modules.
//!
//! [`Rational`] is an always-reduced arbitrary-precision fraction,
//! [`PrimeFieldElement`] a residue modulo an odd prime, and [`Polynomial`]
//! a dense univariate polynomial with rational coefficients.

mod field;
mod poly;
mod rational;

pub use field::{PrimeField, PrimeFieldElement};
pub use poly::{Degree, Polynomial};
pub use rational::Rational;

use num_bigint::BigUint;

/// Deterministic primality test for every `u64`.
///
/// Small inputs go through trial division by the first few primes; the rest
/// use Miller-Rabin with the first twelve prime bases, which is exact below
/// 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }

    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }

    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact `k!`.
pub fn factorial(k: u32) -> BigUint {
    (1..=k).fold(BigUint::from(1u32), |acc, i| acc * i)
}
