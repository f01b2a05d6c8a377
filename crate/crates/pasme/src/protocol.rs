//! The PASME key-envelope protocol. Encryption derives five public
//! primes from seven secret random draws, folds the passphrase into a
//! divisor `w`, encodes the message as `s`, and publishes
//!
//! - `p = w * q + k4`, where `q` is the next prime after `s + r7`, and
//! - `x = s xor q`,
//!
//! so a holder of the passphrase can check `p mod w == k4`, divide to
//! recover `q`, and xor to recover `s`. The secret draws are never
//! serialized and never logged; only [`PublicParams`] travels.

use crate::codec::{extract, inflate, taint, CodecError, DigitString};
use crate::numtheory::{next_prime_rounds, random_integer, xor_big, RandomSource};
use crate::numtheory::DEFAULT_PRIMALITY_ROUNDS;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("passphrase must not be empty")]
    EmptyPassphrase,
    #[error("passphrase does not open this envelope")]
    KeyRejected,
    #[error("envelope is internally inconsistent")]
    InconsistentEnvelope,
    #[error(transparent)]
    Malformed(#[from] CodecError),
    #[error("validation residue k4 must stay below the divisor w")]
    K4ExceedsW,
}

/// Bit sizes for the seven secret draws, the message alphabet size, and
/// the Miller-Rabin round count. `r6` is drawn and discarded; it exists
/// only to keep the draw sequence shape stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecurityConfig {
    pub bits_r1: u64,
    pub bits_r2: u64,
    pub bits_r3: u64,
    pub bits_r4: u64,
    pub bits_r5: u64,
    pub bits_r6: u64,
    pub bits_r7: u64,
    /// Alphabet size; messages must satisfy `d_max == base - 1`.
    pub base: u32,
    pub primality_rounds: u32,
}

impl SecurityConfig {
    /// Scales every draw from one headline size: `r3` at a quarter,
    /// `r5` at half, the rest at full size. Alphabet stays bytes.
    pub fn with_main_bits(bits: u64) -> Self {
        assert!(bits >= 8, "draws below 8 bits leave no room to scale");
        Self {
            bits_r1: bits,
            bits_r2: bits,
            bits_r3: (bits / 4).max(2),
            bits_r4: bits,
            bits_r5: (bits / 2).max(2),
            bits_r6: bits,
            bits_r7: bits,
            base: 256,
            primality_rounds: DEFAULT_PRIMALITY_ROUNDS,
        }
    }
}

impl Default for SecurityConfig {
    fn default() -> Self {
        Self::with_main_bits(256)
    }
}

/// The seven secret draws. Deliberately opaque: no getters, no Debug,
/// no serialization. Dropping the struct is the only way out.
pub struct SecretParams {
    r1: BigUint,
    r2: BigUint,
    r3: BigUint,
    r4: BigUint,
    r5: BigUint,
    #[allow(dead_code)] // drawn for sequence stability, never used
    r6: BigUint,
    r7: BigUint,
}

impl SecretParams {
    /// Draws `r1` through `r7` in order, so a seeded generator yields a
    /// reproducible parameter set.
    pub fn generate<R: RandomSource + ?Sized>(cfg: &SecurityConfig, rng: &mut R) -> Self {
        Self {
            r1: random_integer(cfg.bits_r1, rng),
            r2: random_integer(cfg.bits_r2, rng),
            r3: random_integer(cfg.bits_r3, rng),
            r4: random_integer(cfg.bits_r4, rng),
            r5: random_integer(cfg.bits_r5, rng),
            r6: random_integer(cfg.bits_r6, rng),
            r7: random_integer(cfg.bits_r7, rng),
        }
    }

    /// Fixed draws `[r1, ..., r7]`, for reproducing known answers.
    pub fn from_values(r: [BigUint; 7]) -> Self {
        let [r1, r2, r3, r4, r5, r6, r7] = r;
        Self {
            r1,
            r2,
            r3,
            r4,
            r5,
            r6,
            r7,
        }
    }
}

/// The five published primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pub k1: BigUint,
    pub k2: BigUint,
    pub k3: BigUint,
    pub k4: BigUint,
    pub k5: BigUint,
}

/// Everything the recipient needs: the primes plus the envelope pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicBundle {
    pub params: PublicParams,
    pub p: BigUint,
    pub x: BigUint,
}

/// `k1, k2, k4, k5` are the next primes after their draws; `k3` sits far
/// enough above `k5 + d_max` that [`taint`] under base `k3` with garbage
/// `k5` is always decodable.
pub fn derive_public_params(secret: &SecretParams, d_max: u32, rounds: u32) -> PublicParams {
    let k5 = next_prime_rounds(&secret.r5, rounds);
    let k3 = next_prime_rounds(&(&k5 + d_max + &secret.r3 + 1u32), rounds);
    PublicParams {
        k1: next_prime_rounds(&secret.r1, rounds),
        k2: next_prime_rounds(&secret.r2, rounds),
        k3,
        k4: next_prime_rounds(&secret.r4, rounds),
        k5,
    }
}

/// Folds the passphrase into the divisor: `inflate` under base `k3` with
/// the garbage chain from `k2`, plus `k1`. Deterministic given the
/// public params, which is what makes validation possible — and what the
/// dictionary attack exploits.
pub fn derive_w(passphrase: &DigitString, params: &PublicParams) -> Result<BigUint, ProtocolError> {
    if passphrase.is_empty() {
        return Err(ProtocolError::EmptyPassphrase);
    }
    Ok(inflate(passphrase, &params.k3, &params.k2) + &params.k1)
}

/// Everything after `w` and `k4` are settled: encode, pick `q`, publish.
fn assemble(
    message: &DigitString,
    r7: &BigUint,
    params: PublicParams,
    w: &BigUint,
    rounds: u32,
) -> PublicBundle {
    let s = taint(message, &params.k3, &params.k5);
    let q = next_prime_rounds(&(&s + r7), rounds);
    let p = w * &q + &params.k4;
    let x = xor_big(&s, &q);
    PublicBundle { params, p, x }
}

/// Full encryption with fresh secrets. `k4` must end up below `w` for
/// the validation residue to round-trip, so `r4` is redrawn until it
/// does; the draw size halves every eight misses, and since `w >= 57`
/// for any nonempty passphrase the loop always terminates.
pub fn encrypt<R: RandomSource + ?Sized>(
    message: &DigitString,
    passphrase: &DigitString,
    cfg: &SecurityConfig,
    rng: &mut R,
) -> Result<PublicBundle, ProtocolError> {
    assert_eq!(
        message.d_max() + 1,
        cfg.base,
        "message alphabet must match the configured base"
    );
    if passphrase.is_empty() {
        return Err(ProtocolError::EmptyPassphrase);
    }
    let rounds = cfg.primality_rounds;
    let mut secret = SecretParams::generate(cfg, rng);
    let mut params = derive_public_params(&secret, message.d_max(), rounds);
    let w = derive_w(passphrase, &params)?;
    let mut draw_bits = cfg.bits_r4;
    let mut misses = 0u32;
    while params.k4 >= w {
        misses += 1;
        if misses.is_multiple_of(8) && draw_bits > 2 {
            draw_bits = (draw_bits / 2).max(2);
        }
        secret.r4 = random_integer(draw_bits, rng);
        params.k4 = next_prime_rounds(&secret.r4, rounds);
    }
    Ok(assemble(message, &secret.r7, params, &w, rounds))
}

/// Encryption from fixed draws. Unlike [`encrypt`] there is no redraw
/// loop, so an oversized `k4` is an error instead.
pub fn encrypt_with_secret(
    message: &DigitString,
    passphrase: &DigitString,
    secret: &SecretParams,
    rounds: u32,
) -> Result<PublicBundle, ProtocolError> {
    if passphrase.is_empty() {
        return Err(ProtocolError::EmptyPassphrase);
    }
    let params = derive_public_params(secret, message.d_max(), rounds);
    let w = derive_w(passphrase, &params)?;
    if params.k4 >= w {
        return Err(ProtocolError::K4ExceedsW);
    }
    Ok(assemble(message, &secret.r7, params, &w, rounds))
}

/// Does this passphrase open the envelope? True iff `p mod w == k4`.
pub fn validate_key(
    bundle: &PublicBundle,
    passphrase: &DigitString,
) -> Result<bool, ProtocolError> {
    let w = derive_w(passphrase, &bundle.params)?;
    Ok(bundle.p.mod_floor(&w) == bundle.params.k4)
}

/// Validates, then unwinds the envelope: `q = (p - k4) / w`,
/// `s = x xor q`, and digit extraction under `(k3, k5)`.
pub fn decrypt(
    bundle: &PublicBundle,
    passphrase: &DigitString,
    d_max: u32,
) -> Result<DigitString, ProtocolError> {
    let w = derive_w(passphrase, &bundle.params)?;
    if bundle.p.mod_floor(&w) != bundle.params.k4 {
        return Err(ProtocolError::KeyRejected);
    }
    // residue match implies k4 < w <= p, so the subtraction is safe
    let (q, rem) = (&bundle.p - &bundle.params.k4).div_rem(&w);
    if !rem.is_zero() {
        return Err(ProtocolError::InconsistentEnvelope);
    }
    let s = xor_big(&bundle.x, &q);
    Ok(extract(&s, &bundle.params.k3, &bundle.params.k5, d_max)?)
}
