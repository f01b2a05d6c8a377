//! Digit-level encodings. A message is a string of digits over the
//! alphabet `{0, ..., d_max}`; the encoders map it to a single integer by
//! evaluating a base-`b` polynomial whose coefficients are the digits
//! plus injected "garbage". Garbage keeps zero digits visible, so the
//! decoder can recover both the digits and the length.

use crate::numtheory::next_prime;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("digit {digit} exceeds alphabet maximum {d_max}")]
    DigitOutOfRange { digit: u32, d_max: u32 },
    #[error("digit at position {position} is outside the alphabet: wrong key or corrupted data")]
    MalformedCiphertext { position: usize },
}

/// A digit string over the alphabet `{0, ..., d_max}`. Digit order is
/// most significant first, matching how humans write numerals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    digits: Vec<u32>,
    d_max: u32,
}

impl DigitString {
    /// Validates every digit against the alphabet bound.
    pub fn new(digits: Vec<u32>, d_max: u32) -> Result<Self, CodecError> {
        assert!(d_max >= 1, "alphabet needs at least two symbols");
        for &digit in &digits {
            if digit > d_max {
                return Err(CodecError::DigitOutOfRange { digit, d_max });
            }
        }
        Ok(Self { digits, d_max })
    }

    /// Bytes as digits over the full byte alphabet (`d_max = 255`).
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            digits: bytes.iter().map(|&b| b as u32).collect(),
            d_max: 255,
        }
    }

    /// Inverse of [`DigitString::from_bytes`]; `None` if any digit
    /// exceeds a byte.
    pub fn as_bytes(&self) -> Option<Vec<u8>> {
        self.digits
            .iter()
            .map(|&d| d.to_u8())
            .collect::<Option<Vec<u8>>>()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Strictly increasing primes seeded from `v`: `next_prime(v)`,
/// `next_prime(next_prime(v))`, ... The sequence is infinite.
pub struct GarbageChain {
    current: BigUint,
}

impl GarbageChain {
    pub fn new(v: &BigUint) -> Self {
        Self { current: v.clone() }
    }
}

impl Iterator for GarbageChain {
    type Item = BigUint;

    fn next(&mut self) -> Option<BigUint> {
        self.current = next_prime(&self.current);
        Some(self.current.clone())
    }
}

/// Plain base-`b` evaluation: the first digit lands on the highest power.
/// The empty string maps to zero, as do all-zero strings (rebase alone
/// does not preserve length; that is what garbage is for).
pub fn rebase(s: &DigitString, b: &BigUint) -> BigUint {
    assert!(*b >= BigUint::from(2u32), "base must be at least 2");
    s.digits
        .iter()
        .fold(BigUint::zero(), |acc, &d| acc * b + d)
}

/// Garbage-chain encoding: digit `i` is offset by the `i`-th prime of the
/// chain from `v` and placed at power `i + 1` (never `b^0`), so the first
/// digit sits on the lowest used power.
pub fn inflate(s: &DigitString, b: &BigUint, v: &BigUint) -> BigUint {
    assert!(*b >= BigUint::from(2u32), "base must be at least 2");
    assert!(!v.is_zero(), "garbage seed must be positive");
    let garbage: Vec<BigUint> = GarbageChain::new(v).take(s.len()).collect();
    let folded = s
        .digits
        .iter()
        .zip(&garbage)
        .rev()
        .fold(BigUint::zero(), |acc, (&d, c)| acc * b + c + d);
    folded * b
}

/// Constant-garbage encoding: every digit is offset by `v`, first digit
/// on `b^0`. Decodable by [`extract`] whenever `b > v + d_max`.
pub fn taint(s: &DigitString, b: &BigUint, v: &BigUint) -> BigUint {
    assert!(*b >= BigUint::from(2u32), "base must be at least 2");
    assert!(!v.is_zero(), "garbage seed must be positive");
    s.digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * b + v + d)
}

/// Inverse of [`taint`]: peel base-`b` digits off `y`, subtract `v` from
/// each, and stop at zero. Any digit outside `{0, ..., d_max}` after
/// subtraction means the key is wrong or the value is corrupted.
pub fn extract(
    y: &BigUint,
    b: &BigUint,
    v: &BigUint,
    d_max: u32,
) -> Result<DigitString, CodecError> {
    assert!(*b >= BigUint::from(2u32), "base must be at least 2");
    assert!(!v.is_zero(), "garbage seed must be positive");
    let mut y = y.clone();
    let mut digits = Vec::new();
    while !y.is_zero() {
        let (q, a) = y.div_rem(b);
        if a < *v {
            return Err(CodecError::MalformedCiphertext {
                position: digits.len(),
            });
        }
        let digit = a - v;
        if digit > BigUint::from(d_max) {
            return Err(CodecError::MalformedCiphertext {
                position: digits.len(),
            });
        }
        digits.push(digit.to_u32().expect("bounded by d_max"));
        y = q;
    }
    Ok(DigitString { digits, d_max })
}
