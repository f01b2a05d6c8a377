//! On-disk framing for hybrid ciphertexts. Fixed little-endian header,
//! seven length-prefixed big-endian integers, then the ciphertext and an
//! optional plaintext CRC-32. Readers never trust a declared length:
//! every field is bounds-checked before allocation and trailing bytes
//! are rejected.

use crate::protocol::{PublicBundle, PublicParams};
use num_bigint::BigUint;
use num_traits::Zero;
use std::io::{self, Cursor, Read, Write};
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"PASM";
pub const FORMAT_VERSION: u8 = 1;

const FLAG_CHECKSUM: u8 = 0b0000_0001;

/// Hard ceiling on a single integer field, far above anything a real
/// bundle produces; exists so a forged length cannot force a huge
/// allocation when reading from a stream.
const MAX_INT_FIELD: usize = 64 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not a PASME container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown flag bits 0x{0:02x}")]
    UnknownFlags(u8),
    #[error("container is truncated")]
    Truncated,
    #[error("integer field has a leading zero byte")]
    NonCanonicalInteger,
    #[error("integer field length is implausibly large")]
    FieldTooLarge,
    #[error("trailing bytes after container end")]
    TrailingData,
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// A parsed hybrid ciphertext: the public bundle, the xored payload, and
/// the optional CRC-32 of the plaintext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridContainer {
    pub bundle: PublicBundle,
    pub ciphertext: Vec<u8>,
    pub plaintext_crc32: Option<u32>,
}

/// Everything before the ciphertext bytes; lets callers stream the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub bundle: PublicBundle,
    pub ciphertext_len: u64,
    pub has_checksum: bool,
}

fn write_bignat(out: &mut impl Write, value: &BigUint) -> io::Result<()> {
    if value.is_zero() {
        return out.write_all(&0u32.to_le_bytes());
    }
    let bytes = value.to_bytes_be();
    let len = u32::try_from(bytes.len()).expect("integer field exceeds u32 length");
    out.write_all(&len.to_le_bytes())?;
    out.write_all(&bytes)
}

/// Writes everything up to (not including) the ciphertext bytes, so the
/// body can be streamed behind it.
pub fn write_header(
    bundle: &PublicBundle,
    ciphertext_len: u64,
    has_checksum: bool,
    out: &mut impl Write,
) -> io::Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&[FORMAT_VERSION])?;
    out.write_all(&[if has_checksum { FLAG_CHECKSUM } else { 0 }])?;
    let p = &bundle.params;
    for field in [&p.k1, &p.k2, &p.k3, &p.k4, &p.k5, &bundle.p, &bundle.x] {
        write_bignat(out, field)?;
    }
    out.write_all(&ciphertext_len.to_le_bytes())
}

/// Serializes a whole container to bytes.
pub fn write_container(container: &HybridContainer) -> Vec<u8> {
    let mut out = Vec::new();
    write_header(
        &container.bundle,
        container.ciphertext.len() as u64,
        container.plaintext_crc32.is_some(),
        &mut out,
    )
    .expect("writing to a Vec cannot fail");
    out.extend_from_slice(&container.ciphertext);
    if let Some(crc) = container.plaintext_crc32 {
        out.extend_from_slice(&crc.to_le_bytes());
    }
    out
}

fn read_exact_or_truncated(r: &mut impl Read, buf: &mut [u8]) -> Result<(), ContainerError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => ContainerError::Truncated,
        _ => ContainerError::Io(e),
    })
}

fn read_u32_le(r: &mut impl Read) -> Result<u32, ContainerError> {
    let mut buf = [0u8; 4];
    read_exact_or_truncated(r, &mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64_le(r: &mut impl Read) -> Result<u64, ContainerError> {
    let mut buf = [0u8; 8];
    read_exact_or_truncated(r, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_bignat(r: &mut impl Read) -> Result<BigUint, ContainerError> {
    let len = read_u32_le(r)? as usize;
    if len > MAX_INT_FIELD {
        return Err(ContainerError::FieldTooLarge);
    }
    let mut bytes = vec![0u8; len];
    read_exact_or_truncated(r, &mut bytes)?;
    if let Some(0) = bytes.first() {
        return Err(ContainerError::NonCanonicalInteger);
    }
    Ok(BigUint::from_bytes_be(&bytes))
}

/// Parses the header from a stream, leaving the reader positioned at the
/// first ciphertext byte.
pub fn read_header(r: &mut impl Read) -> Result<Header, ContainerError> {
    let mut magic = [0u8; 4];
    read_exact_or_truncated(r, &mut magic)?;
    if magic != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let mut version_and_flags = [0u8; 2];
    read_exact_or_truncated(r, &mut version_and_flags)?;
    let [version, flags] = version_and_flags;
    if version != FORMAT_VERSION {
        return Err(ContainerError::UnsupportedVersion(version));
    }
    if flags & !FLAG_CHECKSUM != 0 {
        return Err(ContainerError::UnknownFlags(flags));
    }
    let k1 = read_bignat(r)?;
    let k2 = read_bignat(r)?;
    let k3 = read_bignat(r)?;
    let k4 = read_bignat(r)?;
    let k5 = read_bignat(r)?;
    let p = read_bignat(r)?;
    let x = read_bignat(r)?;
    let ciphertext_len = read_u64_le(r)?;
    Ok(Header {
        bundle: PublicBundle {
            params: PublicParams { k1, k2, k3, k4, k5 },
            p,
            x,
        },
        ciphertext_len,
        has_checksum: flags & FLAG_CHECKSUM != 0,
    })
}

/// Parses a complete container from memory. Strict: declared lengths
/// must exactly account for the remaining bytes.
pub fn read_container(data: &[u8]) -> Result<HybridContainer, ContainerError> {
    let mut cursor = Cursor::new(data);
    let header = read_header(&mut cursor)?;
    let body = &data[cursor.position() as usize..];
    let trailer_len = if header.has_checksum { 4u64 } else { 0 };
    let need = header
        .ciphertext_len
        .checked_add(trailer_len)
        .ok_or(ContainerError::Truncated)?;
    if (body.len() as u64) < need {
        return Err(ContainerError::Truncated);
    }
    if (body.len() as u64) > need {
        return Err(ContainerError::TrailingData);
    }
    let clen = header.ciphertext_len as usize;
    let ciphertext = body[..clen].to_vec();
    let plaintext_crc32 = header
        .has_checksum
        .then(|| u32::from_le_bytes(body[clen..clen + 4].try_into().unwrap()));
    Ok(HybridContainer {
        bundle: header.bundle,
        ciphertext,
        plaintext_crc32,
    })
}

/// Human-readable summary of a parsed header. Reveals only sizes and the
/// checksum flag, never values derived from the plaintext or passphrase.
pub fn describe(header: &Header) -> String {
    let p = &header.bundle.params;
    let mut out = format!("PASME container v{FORMAT_VERSION}\n");
    for (name, value) in [
        ("k1", &p.k1),
        ("k2", &p.k2),
        ("k3", &p.k3),
        ("k4", &p.k4),
        ("k5", &p.k5),
        ("p", &header.bundle.p),
        ("x", &header.bundle.x),
    ] {
        out.push_str(&format!("  {name}: {} bits\n", value.bits()));
    }
    out.push_str(&format!(
        "  ciphertext: {} bytes\n  plaintext checksum: {}\n",
        header.ciphertext_len,
        if header.has_checksum {
            "present"
        } else {
            "absent"
        }
    ));
    out
}

/// [`describe`] for a complete in-memory container, parsed strictly.
pub fn inspect(data: &[u8]) -> Result<String, ContainerError> {
    let container = read_container(data)?;
    let ciphertext_len = container.ciphertext.len() as u64;
    let has_checksum = container.plaintext_crc32.is_some();
    Ok(describe(&Header {
        bundle: container.bundle,
        ciphertext_len,
        has_checksum,
    }))
}
