//! Bit sequences and their packed (MSB-first) byte and hex forms.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HexError {
    #[error("invalid hex: {0}")]
    Invalid(#[from] hex::FromHexError),
    #[error("expected {expected} hex characters, got {actual}")]
    Length { expected: usize, actual: usize },
}

/// Packs bits into bytes, most significant bit first. The final byte is
/// zero-padded.
pub fn pack(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Unpacks the first `len` bits of `bytes`.
///
/// Panics if `bytes` holds fewer than `len` bits.
pub fn unpack(bytes: &[u8], len: usize) -> Vec<bool> {
    assert!(len <= bytes.len() * 8, "{len} bits requested from {} bytes", bytes.len());
    (0..len).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect()
}

pub fn to_hex(bits: &[bool]) -> String {
    hex::encode(pack(bits))
}

/// Decodes a hex string of exactly `bytes * 2` characters.
pub fn parse_hex_exact<const N: usize>(s: &str) -> Result<[u8; N], HexError> {
    let s = s.trim();
    if s.len() != N * 2 {
        return Err(HexError::Length {
            expected: N * 2,
            actual: s.len(),
        });
    }
    let mut out = [0u8; N];
    hex::decode_to_slice(s, &mut out)?;
    Ok(out)
}

/// Position-wise XOR of two equally long sequences.
pub fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    assert_eq!(a.len(), b.len(), "xor of unequal lengths");
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn popcount(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming_distance(a: &[bool], b: &[bool]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Parses a string of `0`/`1` characters. Handy in tests and the demo.
pub fn from_bit_str(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn to_bit_str(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_packing() {
        let bits = from_bit_str("1000 0000 0000 0001 1").unwrap();
        assert_eq!(pack(&bits), vec![0x80, 0x01, 0x80]);
        assert_eq!(to_hex(&bits), "800180");
    }

    #[test]
    fn hex_length_is_checked() {
        assert_eq!(
            parse_hex_exact::<2>("abc"),
            Err(HexError::Length { expected: 4, actual: 3 })
        );
        assert!(parse_hex_exact::<2>("zzzz").is_err());
        assert_eq!(parse_hex_exact::<2>("BEef").unwrap(), [0xbe, 0xef]);
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            prop_assert_eq!(unpack(&pack(&bits), bits.len()), bits);
        }
    }
}
