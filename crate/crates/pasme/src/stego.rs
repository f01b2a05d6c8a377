//! Trailer steganography: the payload is appended to a carrier file,
//! followed by a 4-byte little-endian payload length. Formats that
//! ignore bytes past their logical end (PNG, JPEG, many archives) still
//! open normally. This hides nothing from anyone who looks at the file
//! size or tail — it is concealment, not encryption.

use thiserror::Error;

/// Byte length of the trailing length field.
pub const TRAILER_LEN: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StegoError {
    #[error("payload too large for the 4-byte length trailer")]
    PayloadTooLarge,
    #[error("malformed stego data: {0}")]
    MalformedStego(&'static str),
}

/// `carrier || payload || payload-length`. The carrier passes through
/// untouched, so the result opens wherever the carrier did.
pub fn hide(carrier: &[u8], payload: &[u8]) -> Result<Vec<u8>, StegoError> {
    let declared = u32::try_from(payload.len()).map_err(|_| StegoError::PayloadTooLarge)?;
    let mut out = Vec::with_capacity(carrier.len() + payload.len() + TRAILER_LEN);
    out.extend_from_slice(carrier);
    out.extend_from_slice(payload);
    out.extend_from_slice(&declared.to_le_bytes());
    Ok(out)
}

/// Splits a stego file back into `(carrier, payload)` using the trailer.
pub fn reveal(data: &[u8]) -> Result<(&[u8], &[u8]), StegoError> {
    if data.len() < TRAILER_LEN {
        return Err(StegoError::MalformedStego(
            "shorter than the length trailer",
        ));
    }
    let (body, trailer) = data.split_at(data.len() - TRAILER_LEN);
    let declared = u32::from_le_bytes(trailer.try_into().expect("four bytes")) as usize;
    if declared > body.len() {
        return Err(StegoError::MalformedStego(
            "declared payload exceeds file size",
        ));
    }
    Ok(body.split_at(body.len() - declared))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_vectors() {
        assert_eq!(
            hide(&[1, 2, 3], &[9, 9]).unwrap(),
            vec![1, 2, 3, 9, 9, 2, 0, 0, 0]
        );
        let (carrier, payload) = reveal(&[1, 2, 3, 9, 9, 2, 0, 0, 0]).unwrap();
        assert_eq!(carrier, &[1, 2, 3]);
        assert_eq!(payload, &[9, 9]);
    }

    #[test]
    fn empty_payload_and_empty_carrier() {
        assert_eq!(hide(&[7, 7], &[]).unwrap(), vec![7, 7, 0, 0, 0, 0]);
        assert_eq!(reveal(&[7, 7, 0, 0, 0, 0]).unwrap(), (&[7u8, 7][..], &[][..]));
        assert_eq!(hide(&[], &[5]).unwrap(), vec![5, 1, 0, 0, 0]);
        assert_eq!(reveal(&[5, 1, 0, 0, 0]).unwrap(), (&[][..], &[5u8][..]));
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(
            reveal(&[1, 2, 3]),
            Err(StegoError::MalformedStego("shorter than the length trailer"))
        );
        // declares 9 payload bytes but only 1 exists before the trailer
        assert_eq!(
            reveal(&[0, 9, 0, 0, 0]),
            Err(StegoError::MalformedStego("declared payload exceeds file size"))
        );
    }

    #[test]
    fn trailer_exactly_covering_the_body_leaves_no_carrier() {
        let stego = hide(&[], &[1, 2, 3]).unwrap();
        let (carrier, payload) = reveal(&stego).unwrap();
        assert!(carrier.is_empty());
        assert_eq!(payload, &[1, 2, 3]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn roundtrip_preserves_carrier_and_payload(
                carrier in proptest::collection::vec(any::<u8>(), 0..256),
                payload in proptest::collection::vec(any::<u8>(), 0..256),
            ) {
                let stego = hide(&carrier, &payload).unwrap();
                prop_assert!(stego.starts_with(&carrier), "carrier prefix intact");
                let (c, p) = reveal(&stego).unwrap();
                prop_assert_eq!(c, carrier.as_slice());
                prop_assert_eq!(p, payload.as_slice());
            }

            #[test]
            fn reveal_never_panics(data in proptest::collection::vec(any::<u8>(), 0..64)) {
                let _ = reveal(&data);
            }
        }
    }
}
