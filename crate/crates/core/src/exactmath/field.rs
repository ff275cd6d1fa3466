use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use super::{is_prime, mul_mod, pow_mod};
use crate::Error;

/// The field of integers modulo an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Rejects even and composite moduli. `p` must also fit in 63 bits so
    /// that sums of two residues never overflow.
    pub fn new(p: u64) -> Result<Self, Error> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into the field.
    pub fn element(&self, value: i64) -> PrimeFieldElement {
        let v = value.rem_euclid(self.p as i64) as u64;
        PrimeFieldElement { value: v, p: self.p }
    }

    pub fn zero(&self) -> PrimeFieldElement {
        PrimeFieldElement { value: 0, p: self.p }
    }

    pub fn one(&self) -> PrimeFieldElement {
        PrimeFieldElement { value: 1, p: self.p }
    }

    pub fn elements(&self) -> impl Iterator<Item = PrimeFieldElement> + '_ {
        (0..self.p).map(move |value| PrimeFieldElement { value, p: self.p })
    }
}

/// A residue in `[0, p)` tagged with its modulus. Mixing moduli in one
/// operation is a programming error and panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeFieldElement {
    value: u64,
    #[serde(rename = "modulus")]
    p: u64,
}

impl PrimeFieldElement {
    pub fn new(value: u64, p: u64) -> Result<Self, Error> {
        let field = PrimeField::new(p)?;
        Ok(PrimeFieldElement { value: value % field.p, p })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> Self {
        PrimeFieldElement { value: pow_mod(self.value, exp, self.p), p: self.p }
    }

    /// Euler's criterion: `x^((p-1)/2)` is 1 for nonzero squares.
    pub fn euler_criterion(&self) -> Option<bool> {
        (!self.is_zero()).then(|| self.pow((self.p - 1) / 2).value == 1)
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(self.p, other.p, "operands live in different prime fields");
    }
}

impl fmt::Debug for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for PrimeFieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        let s = self.value + rhs.value;
        PrimeFieldElement { value: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
}

impl Sub for PrimeFieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PrimeFieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        let value = if self.value == 0 { 0 } else { self.p - self.value };
        PrimeFieldElement { value, p: self.p }
    }
}

impl Mul for PrimeFieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        PrimeFieldElement { value: mul_mod(self.value, rhs.value, self.p), p: self.p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 4, 9, 15, 1001] {
            assert!(PrimeField::new(p).is_err(), "p = {p}");
        }
        assert!(PrimeFieldElement::new(3, 8).is_err());
        assert!(PrimeField::new(3).is_ok());
    }

    #[test]
    fn agrees_with_integer_arithmetic() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let (x, y) = (f.element(a), f.element(b));
                    assert_eq!((x + y).value() as i64, (a + b) % p as i64);
                    assert_eq!((x * y).value() as i64, (a * b) % p as i64);
                    assert_eq!((x - y).value() as i64, (a - b).rem_euclid(p as i64));
                }
            }
        }
    }

    #[test]
    fn negative_inputs_reduce() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.element(-3).value(), 4);
        assert_eq!(f.element(4 - 5).value(), 6);
    }

    #[test]
    #[should_panic(expected = "different prime fields")]
    fn mixing_fields_panics() {
        let a = PrimeField::new(5).unwrap().one();
        let b = PrimeField::new(7).unwrap().one();
        let _ = a + b;
    }

    #[test]
    fn fermat() {
        let f = PrimeField::new(101).unwrap();
        for x in f.elements().skip(1) {
            assert_eq!(x.pow(100), f.one());
        }
    }
}
