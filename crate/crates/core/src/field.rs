//! Prime-field arithmetic, random polynomials, Shamir share generation and
//! Lagrange reconstruction at zero.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(BigUint),
    #[error("modulus must be at least 3")]
    TooSmall,
    #[error("value {value} is not below the field prime {prime}")]
    OutOfRange { value: BigUint, prime: BigUint },
    #[error("threshold must be at least 1")]
    InvalidThreshold,
    #[error("threshold {threshold} exceeds the number of shareholders {shares}")]
    ThresholdExceedsN { threshold: usize, shares: usize },
    #[error("{shares} shareholders need a field prime larger than {shares}")]
    TooManyShareholders { shares: usize },
    #[error("share index {0} appears more than once")]
    DuplicateIndex(u64),
    #[error("share index 0 is reserved for the secret")]
    ZeroIndex,
    #[error("no shares given")]
    EmptyInput,
}

/// A prime field `GF(P)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldParams {
    prime: BigUint,
}

/// A residue in `[0, P)`. Arithmetic goes through [`FieldParams`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(BigUint);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

/// A point `(i, f(i))` handed to shareholder `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Share {
    pub index: u64,
    pub value: FieldElement,
}

impl FieldParams {
    pub fn new(prime: BigUint) -> Result<Self, FieldError> {
        if prime < BigUint::from(3u32) {
            return Err(FieldError::TooSmall);
        }
        if !arith::is_probable_prime(&prime) {
            return Err(FieldError::NotPrime(prime));
        }
        Ok(Self { prime })
    }

    /// A uniformly random prime field with a `bits`-bit modulus.
    pub fn random<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<Self, FieldError> {
        if bits < 2 {
            return Err(FieldError::TooSmall);
        }
        loop {
            let p = arith::random_prime(bits, rng);
            if p >= BigUint::from(3u32) {
                return Ok(Self { prime: p });
            }
        }
    }

    pub fn prime(&self) -> &BigUint {
        &self.prime
    }

    /// Checked conversion into the field.
    pub fn element(&self, value: BigUint) -> Result<FieldElement, FieldError> {
        if value >= self.prime {
            return Err(FieldError::OutOfRange { value, prime: self.prime.clone() });
        }
        Ok(FieldElement(value))
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(&self, value: &BigUint) -> FieldElement {
        FieldElement(value % &self.prime)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(BigUint::zero())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement((&a.0 + &b.0) % &self.prime)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement((&a.0 + &self.prime - &b.0) % &self.prime)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement((&a.0 * &b.0) % &self.prime)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.0.is_zero() {
            return None;
        }
        Some(FieldElement(arith::inverse_mod_prime(&a.0, &self.prime)))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_biguint_below(&self.prime))
    }
}

impl FieldElement {
    #[cfg(test)]
    pub(crate) fn unchecked(value: BigUint) -> Self {
        Self(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Polynomial {
    /// `f(x) = secret + a_1 x + ... + a_{t-1} x^{t-1}` with each `a_j` uniform in
    /// `[0, P)`. Zero coefficients are allowed, including the leading one.
    pub fn random<R: Rng + ?Sized>(
        field: &FieldParams,
        secret: &FieldElement,
        threshold: usize,
        rng: &mut R,
    ) -> Result<Self, FieldError> {
        if threshold < 1 {
            return Err(FieldError::InvalidThreshold);
        }
        let secret = field.element(secret.0.clone())?;
        let mut coeffs = Vec::with_capacity(threshold);
        coeffs.push(secret);
        coeffs.extend((1..threshold).map(|_| field.random_element(rng)));
        Ok(Self { coeffs })
    }

    /// Builds a polynomial from explicit coefficients, lowest degree first.
    pub fn from_coefficients(field: &FieldParams, coeffs: Vec<BigUint>) -> Result<Self, FieldError> {
        if coeffs.is_empty() {
            return Err(FieldError::InvalidThreshold);
        }
        let coeffs = coeffs.into_iter().map(|c| field.element(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { coeffs })
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn secret(&self) -> &FieldElement {
        &self.coeffs[0]
    }

    /// Horner evaluation mod `P`.
    pub fn eval(&self, field: &FieldParams, x: &FieldElement) -> FieldElement {
        let p = field.prime();
        let acc = self.coeffs.iter().rev().fold(BigUint::zero(), |acc, c| (acc * &x.0 + &c.0) % p);
        FieldElement(acc)
    }

    /// `sum_j a_j * x^j` over the integers, without reduction.
    pub fn eval_integer(&self, x: u64) -> BigUint {
        let x = BigUint::from(x);
        self.coeffs.iter().rev().fold(BigUint::zero(), |acc, c| acc * &x + &c.0)
    }

    /// Shares `(i, f(i))` for `i = 1..=n`.
    pub fn shares(&self, field: &FieldParams, n: usize) -> Result<Vec<Share>, FieldError> {
        if BigUint::from(n) >= field.prime {
            return Err(FieldError::TooManyShareholders { shares: n });
        }
        if self.threshold() > n {
            return Err(FieldError::ThresholdExceedsN { threshold: self.threshold(), shares: n });
        }
        Ok((1..=n as u64)
            .map(|i| Share { index: i, value: self.eval(field, &field.reduce(&BigUint::from(i))) })
            .collect())
    }

    /// Overwrites every coefficient with zero.
    pub(crate) fn wipe(&mut self) {
        for c in self.coeffs.iter_mut() {
            c.0.set_zero();
        }
        self.coeffs.clear();
    }
}

impl Share {
    pub fn new(index: u64, value: FieldElement) -> Self {
        Self { index, value }
    }
}

/// Interpolates `f(0)` through every given point.
///
/// Uses `f(0) = sum_i y_i * w_i` with `w_i = prod_{j != i} x_j / (x_j - x_i)`.
pub fn lagrange_reconstruct(field: &FieldParams, shares: &[Share]) -> Result<FieldElement, FieldError> {
    if shares.is_empty() {
        return Err(FieldError::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    for s in shares {
        if s.index == 0 {
            return Err(FieldError::ZeroIndex);
        }
        if !seen.insert(s.index) {
            return Err(FieldError::DuplicateIndex(s.index));
        }
        if s.value.0 >= field.prime {
            return Err(FieldError::OutOfRange { value: s.value.0.clone(), prime: field.prime.clone() });
        }
    }

    let xs: Vec<FieldElement> = shares.iter().map(|s| field.reduce(&BigUint::from(s.index))).collect();
    // Indices are distinct integers but may still collide mod a tiny P.
    let mut reduced = BTreeSet::new();
    for (s, x) in shares.iter().zip(&xs) {
        if x.0.is_zero() {
            return Err(FieldError::ZeroIndex);
        }
        if !reduced.insert(x.0.clone()) {
            return Err(FieldError::DuplicateIndex(s.index));
        }
    }

    let mut acc = field.zero();
    for (i, share) in shares.iter().enumerate() {
        let mut num = FieldElement(BigUint::one());
        let mut den = FieldElement(BigUint::one());
        for (j, xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            num = field.mul(&num, xj);
            den = field.mul(&den, &field.sub(xj, &xs[i]));
        }
        let weight = field.mul(&num, &field.inv(&den).expect("distinct nodes"));
        acc = field.add(&acc, &field.mul(&share.value, &weight));
    }
    Ok(acc)
}
