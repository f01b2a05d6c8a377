//! Hybrid file encryption: a short random key-sheet goes through the
//! PASME envelope, and the payload is xored against the sheet repeated
//! end to end. The sheet is the only thing the envelope has to carry, so
//! payload size no longer drives the prime search. A repeating-xor body
//! is of course trivially breakable; see the audit module.

use crate::codec::DigitString;
use crate::container::HybridContainer;
use crate::numtheory::RandomSource;
use crate::protocol::{self, ProtocolError, SecurityConfig};
use thiserror::Error;

/// Default key-sheet length in bytes. Sized so the envelope's prime
/// search stays in the seconds range at default security; longer sheets
/// grow it roughly cubically.
pub const DEFAULT_SHEET_LEN: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HybridError {
    #[error("passphrase must not be empty")]
    EmptyPassphrase,
    #[error("key-sheet length must be at least 1 byte")]
    ZeroLength,
    #[error("container carries an empty key-sheet")]
    EmptyKeySheet,
    #[error("plaintext checksum mismatch: wrong key or corrupted data")]
    ChecksumMismatch,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// The xor keystream: a byte string repeated cyclically over the
/// payload. Never serialized; it travels only inside the envelope.
#[derive(Clone, PartialEq, Eq)]
pub struct KeySheet {
    bytes: Vec<u8>,
}

impl std::fmt::Debug for KeySheet {
    // deliberately redacted: sheets are key material
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KeySheet({} bytes)", self.bytes.len())
    }
}

impl KeySheet {
    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self, HybridError> {
        if bytes.is_empty() {
            return Err(HybridError::ZeroLength);
        }
        Ok(Self { bytes })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction forbids empty sheets
    }
}

/// Uniform random sheet of `length` bytes.
pub fn generate_keysheet<R: RandomSource + ?Sized>(
    length: usize,
    rng: &mut R,
) -> Result<KeySheet, HybridError> {
    if length == 0 {
        return Err(HybridError::ZeroLength);
    }
    let mut bytes = vec![0u8; length];
    rng.fill_bytes(&mut bytes);
    Ok(KeySheet { bytes })
}

/// Xors `data[i]` with the sheet byte at cyclic position `offset + i`.
/// The offset parameter lets chunked callers keep the cycle aligned.
pub fn stream_xor_at(data: &mut [u8], sheet: &KeySheet, offset: u64) {
    let len = sheet.bytes.len() as u64;
    for (i, byte) in data.iter_mut().enumerate() {
        *byte ^= sheet.bytes[((offset + i as u64) % len) as usize];
    }
}

/// Whole-buffer xor against the cycled sheet. Involutive: applying it
/// twice with the same sheet returns the input.
pub fn stream_xor(data: &[u8], sheet: &KeySheet) -> Vec<u8> {
    let mut out = data.to_vec();
    stream_xor_at(&mut out, sheet, 0);
    out
}

/// Draws a fresh sheet and seals it in an envelope, without touching any
/// payload. For callers that stream the xor pass themselves; the sheet
/// is always drawn before the envelope secrets, so a seeded generator
/// reproduces both.
pub fn seal_keysheet<R: RandomSource + ?Sized>(
    passphrase: &[u8],
    cfg: &SecurityConfig,
    sheet_len: usize,
    rng: &mut R,
) -> Result<(KeySheet, crate::protocol::PublicBundle), HybridError> {
    if passphrase.is_empty() {
        return Err(HybridError::EmptyPassphrase);
    }
    let sheet = generate_keysheet(sheet_len, rng)?;
    let bundle = protocol::encrypt(
        &DigitString::from_bytes(sheet.bytes()),
        &DigitString::from_bytes(passphrase),
        cfg,
        rng,
    )?;
    Ok((sheet, bundle))
}

/// Draws a fresh sheet, seals it with the passphrase, and xors the
/// payload. The returned container always carries a plaintext CRC-32;
/// callers that prefer deniability over integrity can drop it before
/// serialization.
pub fn hybrid_encrypt<R: RandomSource + ?Sized>(
    payload: &[u8],
    passphrase: &[u8],
    cfg: &SecurityConfig,
    sheet_len: usize,
    rng: &mut R,
) -> Result<HybridContainer, HybridError> {
    let (sheet, bundle) = seal_keysheet(passphrase, cfg, sheet_len, rng)?;
    Ok(HybridContainer {
        bundle,
        ciphertext: stream_xor(payload, &sheet),
        plaintext_crc32: Some(crc32fast::hash(payload)),
    })
}

/// Opens the envelope to recover the sheet, then undoes the xor. When
/// the container carries a checksum the recovered plaintext is verified
/// against it.
pub fn hybrid_decrypt(
    container: &HybridContainer,
    passphrase: &[u8],
) -> Result<Vec<u8>, HybridError> {
    if passphrase.is_empty() {
        return Err(HybridError::EmptyPassphrase);
    }
    let sheet = recover_keysheet(&container.bundle, passphrase)?;
    let payload = stream_xor(&container.ciphertext, &sheet);
    if let Some(expected) = container.plaintext_crc32 {
        if crc32fast::hash(&payload) != expected {
            return Err(HybridError::ChecksumMismatch);
        }
    }
    Ok(payload)
}

/// Envelope-opening half of [`hybrid_decrypt`], shared with streaming
/// callers that cannot hold the whole ciphertext in memory.
pub fn recover_keysheet(
    bundle: &crate::protocol::PublicBundle,
    passphrase: &[u8],
) -> Result<KeySheet, HybridError> {
    if passphrase.is_empty() {
        return Err(HybridError::EmptyPassphrase);
    }
    let digits = protocol::decrypt(bundle, &DigitString::from_bytes(passphrase), 255)?;
    let bytes = digits.as_bytes().expect("extraction bounded by d_max 255");
    KeySheet::from_bytes(bytes).map_err(|_| HybridError::EmptyKeySheet)
}
