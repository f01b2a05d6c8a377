//! Arbitrary-precision integer primitives: probabilistic primality,
//! next-prime search, bitwise xor, exact division, and the seedable
//! randomness contract used by every module above this one.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::sync::OnceLock;
use thiserror::Error;

/// Default Miller-Rabin round count; error probability <= 4^-40.
pub const DEFAULT_PRIMALITY_ROUNDS: u32 = 40;

/// Upper bound of the lazily built small-prime table.
const SIEVE_LIMIT: usize = 1 << 20;

/// Trial-division bound inside [`is_probable_prime`]. Candidates below
/// `TRIAL_LIMIT`^2 are decided exactly.
const TRIAL_LIMIT: u64 = 2048;

/// Miller-Rabin is deterministic below 3.3e24 with the first 13 primes
/// as bases; later rounds fall back to bases derived from the input.
const FIXED_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("division by zero")]
    DivisionByZero,
}

/// Randomness contract: anything that yields uniform bytes. Tests inject
/// a seeded generator so every higher layer is reproducible; production
/// callers use [`entropy_source`]. A generator is single-owner; do not
/// share one across concurrent tasks.
pub trait RandomSource: RngCore {}

impl<T: RngCore + ?Sized> RandomSource for T {}

/// Fresh generator seeded from OS entropy.
pub fn entropy_source() -> ChaCha20Rng {
    ChaCha20Rng::from_seed(rand::random())
}

/// Deterministic generator for tests and reproducible runs.
pub fn seeded_source(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT];
        let mut primes = Vec::with_capacity(82_025);
        for n in 2..SIEVE_LIMIT {
            if !composite[n] {
                primes.push(n as u32);
                let mut m = n * n;
                while m < SIEVE_LIMIT {
                    composite[m] = true;
                    m += n;
                }
            }
        }
        primes
    })
}

/// Remainder of a little-endian u64-limb magnitude modulo `m`.
fn limbs_mod_u64(limbs: &[u64], m: u64) -> u64 {
    let mut r: u128 = 0;
    for &limb in limbs.iter().rev() {
        r = ((r << 64) | limb as u128) % m as u128;
    }
    r as u64
}

/// Probabilistic primality test.
///
/// Trial-divides by small primes first (exact below `TRIAL_LIMIT`^2),
/// then runs `rounds` Miller-Rabin rounds. Base selection is
/// deterministic for a given input, so repeated calls always agree.
/// `false` means certainly composite (or below 2); `true` means prime
/// with error probability at most 4^-`rounds`.
pub fn is_probable_prime(x: &BigUint, rounds: u32) -> bool {
    assert!(rounds >= 1, "at least one round required");
    let two = BigUint::from(2u32);
    if *x < two {
        return false;
    }
    let limbs = x.to_u64_digits();
    for &p in small_primes() {
        let p = p as u64;
        if p >= TRIAL_LIMIT {
            break;
        }
        if limbs_mod_u64(&limbs, p) == 0 {
            return limbs == [p];
        }
    }
    if limbs.len() == 1 && limbs[0] < TRIAL_LIMIT * TRIAL_LIMIT {
        // trial division was exhaustive
        return true;
    }
    miller_rabin(x, rounds)
}

/// Core Miller-Rabin loop; `n` is odd and has no factor below `TRIAL_LIMIT`.
fn miller_rabin(n: &BigUint, rounds: u32) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_1 >> s;
    let mut derived_bases: Option<ChaCha20Rng> = None;
    let two = BigUint::from(2u32);
    for round in 0..rounds {
        let base = match FIXED_BASES.get(round as usize) {
            Some(&b) => BigUint::from(b),
            None => {
                let rng = derived_bases.get_or_insert_with(|| base_generator(n));
                rng.gen_biguint_range(&two, &n_minus_1)
            }
        };
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        let mut witness = true;
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                witness = false;
                break;
            }
        }
        if witness {
            return false;
        }
    }
    true
}

/// Deterministic per-input generator for Miller-Rabin bases beyond the
/// fixed table, so the test result never flickers between calls.
fn base_generator(n: &BigUint) -> ChaCha20Rng {
    let mut seed = [0u8; 32];
    for (i, byte) in n.to_bytes_le().into_iter().enumerate() {
        seed[i % 32] ^= byte;
    }
    ChaCha20Rng::from_seed(seed)
}

/// Smallest prime strictly greater than `x`, using
/// [`DEFAULT_PRIMALITY_ROUNDS`].
pub fn next_prime(x: &BigUint) -> BigUint {
    next_prime_rounds(x, DEFAULT_PRIMALITY_ROUNDS)
}

/// Smallest prime strictly greater than `x` with an explicit round count.
///
/// Small inputs use plain increment-and-test, which is exact there. Large
/// inputs sieve a window of odd candidates by the small-prime table first;
/// the first survivor to pass [`is_probable_prime`] is returned. Both
/// paths scan every integer above `x`, so the minimality contract holds.
pub fn next_prime_rounds(x: &BigUint, rounds: u32) -> BigUint {
    let two = BigUint::from(2u32);
    if *x < two {
        return two;
    }
    if x.bits() <= 32 {
        let mut candidate = x + 1u32;
        if candidate.is_even() {
            candidate += 1u32;
        }
        loop {
            if is_probable_prime(&candidate, rounds) {
                return candidate;
            }
            candidate += 2u32;
        }
    }
    // start odd; x >= 2^32 here so no sieve prime can equal a candidate
    let mut start = x + 1u32;
    if start.is_even() {
        start += 1u32;
    }
    let window = start.bits().max(256) as usize;
    let bound = (start.bits() * start.bits()).clamp(1 << 10, SIEVE_LIMIT as u64) as u32;
    let mut composite = vec![false; window];
    loop {
        composite.fill(false);
        let limbs = start.to_u64_digits();
        for &p in small_primes() {
            if p > bound {
                break;
            }
            if p == 2 {
                continue;
            }
            let p = p as u64;
            let r = limbs_mod_u64(&limbs, p);
            // smallest even offset with (start + offset) % p == 0
            let mut offset = (p - r) % p;
            if offset % 2 == 1 {
                offset += p;
            }
            let mut k = (offset / 2) as usize;
            while k < window {
                composite[k] = true;
                k += p as usize;
            }
        }
        for (k, &marked) in composite.iter().enumerate() {
            if marked {
                continue;
            }
            let candidate = &start + BigUint::from(2 * k);
            if is_probable_prime(&candidate, rounds) {
                return candidate;
            }
        }
        start += BigUint::from(2 * window);
    }
}

/// Bitwise exclusive-or of two magnitudes; the shorter operand is
/// zero-extended.
pub fn xor_big(a: &BigUint, b: &BigUint) -> BigUint {
    a ^ b
}

/// Euclidean division: `a = q * d + r` with `0 <= r < d`.
pub fn divmod(a: &BigUint, d: &BigUint) -> Result<(BigUint, BigUint), NumTheoryError> {
    if d.is_zero() {
        return Err(NumTheoryError::DivisionByZero);
    }
    Ok(a.div_rem(d))
}

/// Uniform integer in `[2^(bits-1), 2^bits)`: the top bit is forced so the
/// requested size is honored.
pub fn random_integer<R: RandomSource + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 2, "bit length must be at least 2");
    let nbytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    rng.fill_bytes(&mut buf);
    let mut x = BigUint::from_bytes_be(&buf);
    x >>= nbytes as u64 * 8 - bits;
    x.set_bit(bits - 1, true);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Sieve of Eratosthenes, the independent oracle for the small range.
    fn sieve(limit: usize) -> Vec<bool> {
        let mut is_prime = vec![true; limit];
        is_prime[0] = false;
        is_prime[1] = false;
        for n in 2..limit {
            if is_prime[n] {
                let mut m = n * n;
                while m < limit {
                    is_prime[m] = false;
                    m += n;
                }
            }
        }
        is_prime
    }

    #[test]
    fn primality_base_cases() {
        assert!(!is_probable_prime(&big(0), 40));
        assert!(!is_probable_prime(&big(1), 40));
        assert!(is_probable_prime(&big(2), 40));
        assert!(is_probable_prime(&big(3), 40));
        assert!(!is_probable_prime(&big(4), 40));
    }

    #[test]
    fn primality_agrees_with_sieve_on_sample() {
        let oracle = sieve(20_000);
        for n in 0..20_000u64 {
            assert_eq!(
                is_probable_prime(&big(n), 40),
                oracle[n as usize],
                "disagreement at {n}"
            );
        }
    }

    #[test]
    fn primality_beyond_trial_division() {
        // 2^61 - 1 is a Mersenne prime; its neighbors are composite.
        let m61 = (BigUint::one() << 61) - 1u32;
        assert!(is_probable_prime(&m61, 40));
        assert!(!is_probable_prime(&(&m61 - 2u32), 40));
        assert!(!is_probable_prime(&(&m61 + 2u32), 40));
        // Carmichael number 561 and a strong base-2 pseudoprime.
        assert!(!is_probable_prime(&big(561), 40));
        assert!(!is_probable_prime(&big(2047), 40));
    }

    #[test]
    fn next_prime_frozen_values() {
        assert_eq!(next_prime(&big(0)), big(2));
        assert_eq!(next_prime(&big(1)), big(2));
        assert_eq!(next_prime(&big(2)), big(3));
        assert_eq!(next_prime(&big(7)), big(11), "strictly greater than 7");
        assert_eq!(next_prime(&big(20)), big(23));
        assert_eq!(next_prime(&big(200)), big(211));
    }

    #[test]
    fn next_prime_matches_sieve_below_10000() {
        let oracle = sieve(20_000);
        let mut expected = 0usize;
        for x in 0..10_000usize {
            expected = (x + 1..).find(|&n| oracle[n]).unwrap();
            assert_eq!(next_prime(&big(x as u64)), big(expected as u64));
        }
        let _ = expected;
    }

    #[test]
    fn next_prime_large_input_uses_window_path() {
        // Straddles the 32-bit cutoff and a known 64-bit prime gap.
        let x = big(0x1_0000_0000);
        let p = next_prime(&x);
        assert!(p > x);
        assert!(is_probable_prime(&p, 40));
        let q = next_prime_rounds(&(BigUint::one() << 80), 40);
        assert!(is_probable_prime(&q, 40));
        assert!(q > (BigUint::one() << 80));
        // nothing prime in between: the window scan is exhaustive, so the
        // predecessor check only needs the returned value to be minimal
        let mut n = (BigUint::one() << 80) + 1u32;
        while n < q {
            assert!(!is_probable_prime(&n, 40));
            n += 2u32;
        }
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_big(&big(12), &big(10)), big(6));
        assert_eq!(xor_big(&big(194), &big(211)), big(17));
        let a = big(0xDEAD_BEEF);
        assert_eq!(xor_big(&a, &a), BigUint::zero());
        assert_eq!(xor_big(&a, &BigUint::zero()), a);
    }

    #[test]
    fn divmod_examples() {
        assert_eq!(divmod(&big(29_545), &big(140)), Ok((big(211), big(5))));
        assert_eq!(divmod(&big(0), &big(7)), Ok((big(0), big(0))));
        assert_eq!(divmod(&big(5), &big(7)), Ok((big(0), big(5))));
        assert_eq!(
            divmod(&big(5), &big(0)),
            Err(NumTheoryError::DivisionByZero)
        );
    }

    #[test]
    fn random_integer_contract() {
        let mut rng = seeded_source(1);
        for _ in 0..50 {
            let x = random_integer(2, &mut rng);
            assert!(x == big(2) || x == big(3));
        }
        let mut a = seeded_source(99);
        let mut b = seeded_source(99);
        for bits in [2u64, 17, 64, 256] {
            assert_eq!(random_integer(bits, &mut a), random_integer(bits, &mut b));
        }
        let mut rng = seeded_source(7);
        for _ in 0..20 {
            let x = random_integer(256, &mut rng);
            assert_eq!(x.bits(), 256, "top bit forced");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]

            #[test]
            fn divmod_reconstructs(a in any::<u128>(), d in 1..=u128::MAX) {
                let (a, d) = (BigUint::from(a), BigUint::from(d));
                let (q, r) = divmod(&a, &d).unwrap();
                prop_assert!(r < d);
                prop_assert_eq!(q * &d + r, a);
            }

            #[test]
            fn xor_is_commutative_and_self_inverse(a in any::<u128>(), b in any::<u128>()) {
                let (a, b) = (BigUint::from(a), BigUint::from(b));
                prop_assert_eq!(xor_big(&a, &b), xor_big(&b, &a));
                prop_assert_eq!(xor_big(&xor_big(&a, &b), &b), a);
            }

            #[test]
            fn xor_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
                let (a, b, c) = (BigUint::from(a), BigUint::from(b), BigUint::from(c));
                prop_assert_eq!(
                    xor_big(&xor_big(&a, &b), &c),
                    xor_big(&a, &xor_big(&b, &c))
                );
            }

            #[test]
            fn next_prime_is_greater_and_prime(x in any::<u64>()) {
                let x = BigUint::from(x >> 16);
                let p = next_prime(&x);
                prop_assert!(p > x);
                prop_assert!(is_probable_prime(&p, 40));
            }
        }
    }
}
