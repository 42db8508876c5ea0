//! Frame-level physical-layer encryption.
//!
//! A frame is `L` codewords of `n` bits each, encrypted as one flat bit
//! stream. The first `disclosed_prefix` bits (e.g. a destination address)
//! travel in the clear and do not consume keystream: keystream bit 0 always
//! encrypts the first bit after the prefix.

use thiserror::Error;

use crate::bits;
use crate::grain::Keystream;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("codeword length must be positive")]
    ZeroCodewordLength,
    #[error("frame is empty")]
    Empty,
    #[error("{len} bits is not a multiple of the codeword length {codeword_len}")]
    NotDivisible { len: usize, codeword_len: usize },
    #[error("disclosed prefix {prefix} exceeds frame length {len}")]
    PrefixTooLong { prefix: usize, len: usize },
    #[error("keystream has {available} bits, {needed} needed")]
    InsufficientKeystream { needed: usize, available: usize },
    #[error("malformed frame file: {0}")]
    Malformed(&'static str),
}

fn check_shape(len: usize, codeword_len: usize, prefix: usize) -> Result<(), FrameError> {
    if codeword_len == 0 {
        return Err(FrameError::ZeroCodewordLength);
    }
    if len == 0 {
        return Err(FrameError::Empty);
    }
    if len % codeword_len != 0 {
        return Err(FrameError::NotDivisible { len, codeword_len });
    }
    if prefix > len {
        return Err(FrameError::PrefixTooLong { prefix, len });
    }
    Ok(())
}

/// A plaintext (channel-coded) frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    bits: Vec<bool>,
    codeword_len: usize,
    disclosed_prefix: usize,
}

impl Frame {
    /// Splits `bits` into codewords of `codeword_len` bits, nothing disclosed.
    pub fn segment(bits: Vec<bool>, codeword_len: usize) -> Result<Self, FrameError> {
        check_shape(bits.len(), codeword_len, 0)?;
        Ok(Self {
            bits,
            codeword_len,
            disclosed_prefix: 0,
        })
    }

    pub fn with_disclosed_prefix(mut self, prefix: usize) -> Result<Self, FrameError> {
        check_shape(self.bits.len(), self.codeword_len, prefix)?;
        self.disclosed_prefix = prefix;
        Ok(self)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    pub fn codeword_count(&self) -> usize {
        self.bits.len() / self.codeword_len
    }

    pub fn codewords(&self) -> std::slice::ChunksExact<'_, bool> {
        self.bits.chunks_exact(self.codeword_len)
    }

    pub fn disclosed_prefix(&self) -> usize {
        self.disclosed_prefix
    }

    /// Keystream bits needed to encrypt this frame.
    pub fn encrypted_len(&self) -> usize {
        self.bits.len() - self.disclosed_prefix
    }
}

/// A frame as transmitted: disclosed prefix in the clear, the rest XORed
/// with keystream. Also represents what the receiver got off the channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedFrame {
    bits: Vec<bool>,
    codeword_len: usize,
    disclosed_prefix: usize,
}

impl EncryptedFrame {
    /// Wraps received bits, e.g. after the channel.
    pub fn from_received(
        bits: Vec<bool>,
        codeword_len: usize,
        disclosed_prefix: usize,
    ) -> Result<Self, FrameError> {
        check_shape(bits.len(), codeword_len, disclosed_prefix)?;
        Ok(Self {
            bits,
            codeword_len,
            disclosed_prefix,
        })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    pub fn disclosed_prefix(&self) -> usize {
        self.disclosed_prefix
    }

    pub fn encrypted_len(&self) -> usize {
        self.bits.len() - self.disclosed_prefix
    }

    /// XORs an error vector into the frame.
    pub fn with_errors(&self, errors: &[bool]) -> Self {
        Self {
            bits: bits::xor(&self.bits, errors),
            ..*self
        }
    }
}

fn xor_suffix(bits: &[bool], prefix: usize, keystream: &Keystream) -> Result<Vec<bool>, FrameError> {
    let needed = bits.len() - prefix;
    let z = keystream.bits();
    if z.len() < needed {
        return Err(FrameError::InsufficientKeystream {
            needed,
            available: z.len(),
        });
    }
    let mut out = bits.to_vec();
    for (bit, &k) in out[prefix..].iter_mut().zip(z) {
        *bit ^= k;
    }
    Ok(out)
}

pub fn encrypt_frame(frame: &Frame, keystream: &Keystream) -> Result<EncryptedFrame, FrameError> {
    Ok(EncryptedFrame {
        bits: xor_suffix(&frame.bits, frame.disclosed_prefix, keystream)?,
        codeword_len: frame.codeword_len,
        disclosed_prefix: frame.disclosed_prefix,
    })
}

/// Inverse of [`encrypt_frame`]. Any bit flipped on the channel comes out
/// flipped at the same position and nowhere else.
pub fn decrypt_frame(received: &EncryptedFrame, keystream: &Keystream) -> Result<Frame, FrameError> {
    Ok(Frame {
        bits: xor_suffix(&received.bits, received.disclosed_prefix, keystream)?,
        codeword_len: received.codeword_len,
        disclosed_prefix: received.disclosed_prefix,
    })
}

/// The `PLE1` binary frame file.
///
/// ```text
/// offset  size  field
/// 0       4     magic "PLE1"
/// 4       4     codeword length n, u32 big-endian
/// 8       4     disclosed prefix in bits, u32 big-endian
/// 12      ..    frame bits packed MSB-first, then a single 1 bit, then
///               zero bits up to the next byte boundary
/// ```
///
/// The terminating 1 bit makes the bit length recoverable for any `n`.
pub mod file {
    use super::{check_shape, EncryptedFrame, Frame, FrameError};
    use crate::bits;

    pub const MAGIC: &[u8; 4] = b"PLE1";
    pub const HEADER_LEN: usize = 12;

    /// Header fields and bits of a frame file, encrypted or not.
    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct FrameFile {
        pub codeword_len: usize,
        pub disclosed_prefix: usize,
        pub bits: Vec<bool>,
    }

    impl From<&Frame> for FrameFile {
        fn from(f: &Frame) -> Self {
            Self {
                codeword_len: f.codeword_len,
                disclosed_prefix: f.disclosed_prefix,
                bits: f.bits.clone(),
            }
        }
    }

    impl From<&EncryptedFrame> for FrameFile {
        fn from(f: &EncryptedFrame) -> Self {
            Self {
                codeword_len: f.codeword_len,
                disclosed_prefix: f.disclosed_prefix,
                bits: f.bits.clone(),
            }
        }
    }

    impl FrameFile {
        pub fn into_frame(self) -> Result<Frame, FrameError> {
            Frame::segment(self.bits, self.codeword_len)?.with_disclosed_prefix(self.disclosed_prefix)
        }

        pub fn into_encrypted(self) -> Result<EncryptedFrame, FrameError> {
            EncryptedFrame::from_received(self.bits, self.codeword_len, self.disclosed_prefix)
        }

        pub fn to_bytes(&self) -> Vec<u8> {
            let n = u32::try_from(self.codeword_len).expect("codeword length fits in u32");
            let p = u32::try_from(self.disclosed_prefix).expect("prefix fits in u32");
            let mut padded = self.bits.clone();
            padded.push(true);
            padded.resize(padded.len().div_ceil(8) * 8, false);

            let mut out = Vec::with_capacity(HEADER_LEN + padded.len() / 8);
            out.extend_from_slice(MAGIC);
            out.extend_from_slice(&n.to_be_bytes());
            out.extend_from_slice(&p.to_be_bytes());
            out.extend_from_slice(&bits::pack(&padded));
            out
        }

        pub fn from_bytes(data: &[u8]) -> Result<Self, FrameError> {
            if data.len() < HEADER_LEN {
                return Err(FrameError::Malformed("shorter than header"));
            }
            if &data[..4] != MAGIC {
                return Err(FrameError::Malformed("bad magic"));
            }
            let n = u32::from_be_bytes(data[4..8].try_into().unwrap()) as usize;
            let p = u32::from_be_bytes(data[8..12].try_into().unwrap()) as usize;
            let payload = &data[HEADER_LEN..];
            let last = payload
                .iter()
                .rposition(|&b| b != 0)
                .ok_or(FrameError::Malformed("missing end marker"))?;
            if last != payload.len() - 1 {
                return Err(FrameError::Malformed("trailing zero bytes after end marker"));
            }
            let len = last * 8 + 7 - payload[last].trailing_zeros() as usize;
            let bits = bits::unpack(payload, len);
            check_shape(bits.len(), n, p)?;
            Ok(Self {
                codeword_len: n,
                disclosed_prefix: p,
                bits,
            })
        }
    }
}
