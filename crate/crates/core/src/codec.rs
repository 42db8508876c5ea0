//! Channel codes for the encoder/decoder stages: repetition-3 and a
//! systematic Hamming(7,4).
//!
//! Hamming(7,4) codeword layout is `d1 d2 d3 d4 p1 p2 p3` with
//!
//! ```text
//! p1 = d1 ^ d2 ^ d4
//! p2 = d1 ^ d3 ^ d4
//! p3 = d2 ^ d3 ^ d4
//! ```
//!
//! Both codes are perfect, so every received word lies within distance 1 of
//! exactly one codeword. The decoder always returns that nearest codeword;
//! when the channel flipped two or more bits the result is silently wrong
//! and only ground truth can tell (see `channel::uncorrectable_codewords`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("{len} bits is not a multiple of {block} for {codec}")]
    Length {
        codec: Codec,
        len: usize,
        block: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Codec {
    Repetition3,
    Hamming74,
}

impl Codec {
    pub const ALL: [Codec; 2] = [Codec::Repetition3, Codec::Hamming74];

    pub fn name(self) -> &'static str {
        match self {
            Codec::Repetition3 => "repetition3",
            Codec::Hamming74 => "hamming74",
        }
    }

    /// Codeword length.
    pub fn n(self) -> usize {
        match self {
            Codec::Repetition3 => 3,
            Codec::Hamming74 => 7,
        }
    }

    /// Data bits per codeword.
    pub fn k(self) -> usize {
        match self {
            Codec::Repetition3 => 1,
            Codec::Hamming74 => 4,
        }
    }

    /// Errors per codeword the decoder is guaranteed to correct.
    pub fn correctable(self) -> usize {
        1
    }

    pub fn encode(self, data: &[bool]) -> Result<Vec<bool>, CodecError> {
        let k = self.k();
        if data.len() % k != 0 {
            return Err(CodecError::Length {
                codec: self,
                len: data.len(),
                block: k,
            });
        }
        let mut out = Vec::with_capacity(data.len() / k * self.n());
        for block in data.chunks_exact(k) {
            match self {
                Codec::Repetition3 => out.extend([block[0]; 3]),
                Codec::Hamming74 => {
                    let [d1, d2, d3, d4] = [block[0], block[1], block[2], block[3]];
                    out.extend([d1, d2, d3, d4, d1 ^ d2 ^ d4, d1 ^ d3 ^ d4, d2 ^ d3 ^ d4]);
                }
            }
        }
        Ok(out)
    }

    pub fn decode(self, received: &[bool]) -> Result<DecodeOutcome, CodecError> {
        let n = self.n();
        if received.len() % n != 0 {
            return Err(CodecError::Length {
                codec: self,
                len: received.len(),
                block: n,
            });
        }
        let mut outcome = DecodeOutcome {
            data: Vec::with_capacity(received.len() / n * self.k()),
            corrected: 0,
            failed_codewords: 0,
        };
        for word in received.chunks_exact(n) {
            let repaired = match self {
                Codec::Repetition3 => {
                    let ones = word.iter().filter(|&&b| b).count();
                    outcome.data.push(ones >= 2);
                    ones == 1 || ones == 2
                }
                Codec::Hamming74 => {
                    let mut w = [word[0], word[1], word[2], word[3], word[4], word[5], word[6]];
                    let syndrome = hamming_syndrome(&w);
                    if let Some(pos) = syndrome_position(syndrome) {
                        w[pos] ^= true;
                    }
                    outcome.data.extend_from_slice(&w[..4]);
                    syndrome != 0
                }
            };
            if repaired {
                outcome.corrected += 1;
            }
        }
        Ok(outcome)
    }
}

/// Syndrome bits `(s1, s2, s3)` packed as `s1 << 2 | s2 << 1 | s3`.
fn hamming_syndrome(w: &[bool; 7]) -> u8 {
    let [d1, d2, d3, d4, p1, p2, p3] = *w;
    let s1 = p1 ^ d1 ^ d2 ^ d4;
    let s2 = p2 ^ d1 ^ d3 ^ d4;
    let s3 = p3 ^ d2 ^ d3 ^ d4;
    (u8::from(s1) << 2) | (u8::from(s2) << 1) | u8::from(s3)
}

/// Position of the single flipped bit for a nonzero syndrome.
fn syndrome_position(syndrome: u8) -> Option<usize> {
    match syndrome {
        0b110 => Some(0),
        0b101 => Some(1),
        0b011 => Some(2),
        0b111 => Some(3),
        0b100 => Some(4),
        0b010 => Some(5),
        0b001 => Some(6),
        _ => None,
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Codec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repetition3" => Ok(Codec::Repetition3),
            "hamming74" => Ok(Codec::Hamming74),
            other => Err(format!("unknown codec `{other}` (expected repetition3|hamming74)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub data: Vec<bool>,
    /// Codewords in which the decoder flipped a bit back.
    pub corrected: usize,
    /// Codewords the decoder itself flagged as beyond repair. Always zero for
    /// these perfect codes; the channel simulator counts true decoding
    /// failures against the known error vector instead.
    pub failed_codewords: usize,
}
