//! The Grain-128PLE keystream generator.
//!
//! Two interchangeable backends implement [`GrainCipher`]:
//!
//! * [`ReferenceGrain`] clocks one bit at a time over plain bit arrays and
//!   evaluates the feedback and filter functions straight from their tap
//!   tables.
//! * [`WordGrain`] keeps each register in a `u128` and advances up to 32
//!   rounds per step.
//!
//! Both must be observably identical, including for partial-length requests.
//!
//! A state is created by loading the key into the NFSR and the nonce (padded
//! with 31 ones and a zero) into the LFSR, then clocked 512 times. During
//! rounds 0..384 the pre-output is fed back into both registers; during
//! rounds 320..384 the key is mixed in again. Keystream bit `i` is the
//! pre-output at round `512 + i`.

mod reference;
pub mod taps;
mod word;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::{self, HexError};

pub use reference::ReferenceGrain;
pub use word::WordGrain;

pub const KEY_BITS: usize = 128;
pub const NONCE_BITS: usize = 96;
/// Rounds clocked before the first keystream bit.
pub const INIT_ROUNDS: u64 = 512;
/// First round of the key re-introduction phase.
pub const KEY_REINTRO_START: u64 = 320;
/// First round without pre-output feedback. The key copy is erased here.
pub const FEEDBACK_END: u64 = 384;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrainError {
    #[error("keystream requested at round {round}, initialization ends at round 512")]
    NotInitialized { round: u64 },
}

/// A 128-bit secret key, `k_0` being the most significant bit of byte 0.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyMaterial([u8; 16]);

impl KeyMaterial {
    pub const fn from_bytes(bytes: [u8; 16]) -> Self {
        Self(bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        bits::parse_hex_exact::<16>(s).map(Self)
    }

    pub fn from_bits(bits: &[bool; KEY_BITS]) -> Self {
        let mut bytes = [0u8; 16];
        bytes.copy_from_slice(&bits::pack(bits));
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }

    /// Key bit `k_i`.
    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Register layout: bit `i` of the result is `k_i`.
    pub fn to_register(&self) -> u128 {
        u128::from_be_bytes(self.0).reverse_bits()
    }

    /// Public identifier: the first 8 bytes of SHA-256 over the key.
    pub fn fingerprint(&self) -> u64 {
        let digest = Sha256::digest(self.0);
        u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
    }

    pub fn with_bit_flipped(&self, i: usize) -> Self {
        let mut bytes = self.0;
        bytes[i / 8] ^= 0x80 >> (i % 8);
        Self(bytes)
    }
}

impl fmt::Debug for KeyMaterial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyMaterial({:016x})", self.fingerprint())
    }
}

impl Drop for KeyMaterial {
    fn drop(&mut self) {
        self.0 = [0; 16];
    }
}

/// A 96-bit public nonce, `IV_0` being the most significant bit of byte 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nonce([u8; 12]);

impl Nonce {
    pub const MAX_COUNTER: u128 = (1u128 << NONCE_BITS) - 1;

    pub const fn from_bytes(bytes: [u8; 12]) -> Self {
        Self(bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self, HexError> {
        bits::parse_hex_exact::<12>(s).map(Self)
    }

    /// Big-endian counter encoding, so `IV_0` is the counter's most
    /// significant bit. Returns `None` past `2^96 - 1`.
    pub fn from_counter(counter: u128) -> Option<Self> {
        if counter > Self::MAX_COUNTER {
            return None;
        }
        let mut bytes = [0u8; 12];
        bytes.copy_from_slice(&counter.to_be_bytes()[4..]);
        Some(Self(bytes))
    }

    pub fn counter(&self) -> u128 {
        let mut wide = [0u8; 16];
        wide[4..].copy_from_slice(&self.0);
        u128::from_be_bytes(wide)
    }

    pub fn as_bytes(&self) -> &[u8; 12] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Register layout: bit `i` of the result is `IV_i`, bits 96.. are zero.
    pub fn to_register(&self) -> u128 {
        self.counter().reverse_bits() >> 32
    }

    pub fn with_bit_flipped(&self, i: usize) -> Self {
        let mut bytes = self.0;
        bytes[i / 8] ^= 0x80 >> (i % 8);
        Self(bytes)
    }
}

impl fmt::Debug for Nonce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Nonce({})", self.to_hex())
    }
}

/// Register contents at some round. Bit `i` of `lfsr` is `s_i`, bit `i` of
/// `nfsr` is `b_i`.
///
/// Obtained through [`GrainCipher::diagnostic_snapshot`]; it exposes
/// initialization-phase state and exists for conformance tests and golden
/// files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterSnapshot {
    pub round: u64,
    pub lfsr: u128,
    pub nfsr: u128,
}

impl RegisterSnapshot {
    pub fn lfsr_bit(&self, i: usize) -> bool {
        (self.lfsr >> i) & 1 == 1
    }

    pub fn nfsr_bit(&self, i: usize) -> bool {
        (self.nfsr >> i) & 1 == 1
    }

    /// The pre-output `y` of these register contents.
    pub fn pre_output(&self) -> bool {
        taps::pre_output(&self.lfsr_bits(), &self.nfsr_bits())
    }

    pub fn lfsr_bits(&self) -> [bool; 128] {
        std::array::from_fn(|i| self.lfsr_bit(i))
    }

    pub fn nfsr_bits(&self) -> [bool; 128] {
        std::array::from_fn(|i| self.nfsr_bit(i))
    }
}

/// Where a keystream came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeystreamOrigin {
    pub key_id: u64,
    pub nonce: Nonce,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Keystream {
    bits: Vec<bool>,
    origin: KeystreamOrigin,
}

impl Keystream {
    pub fn new(bits: Vec<bool>, origin: KeystreamOrigin) -> Self {
        Self { bits, origin }
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

    pub fn origin(&self) -> KeystreamOrigin {
        self.origin
    }

    pub fn to_hex(&self) -> String {
        bits::to_hex(&self.bits)
    }
}

/// Common interface of the two backends.
pub trait GrainCipher: Sized {
    /// Loads key and nonce into the registers at round 0, without clocking.
    fn load_initial_state(key: &KeyMaterial, nonce: &Nonce) -> Self;

    /// Advances one round.
    fn clock(&mut self);

    /// Advances `rounds` rounds. Backends override this with faster paths.
    fn clock_rounds(&mut self, rounds: u64) {
        for _ in 0..rounds {
            self.clock();
        }
    }

    fn round(&self) -> u64;

    fn origin(&self) -> KeystreamOrigin;

    fn diagnostic_snapshot(&self) -> RegisterSnapshot;

    /// Appends `len` keystream bits to `out`. Requires round >= 512.
    fn fill_keystream(&mut self, out: &mut Vec<bool>, len: usize) -> Result<(), GrainError>;

    /// Loads and runs the 512 initialization rounds.
    fn initialize(key: &KeyMaterial, nonce: &Nonce) -> Self {
        let mut state = Self::load_initial_state(key, nonce);
        state.clock_rounds(INIT_ROUNDS);
        state
    }

    /// The next `len` keystream bits. Successive calls continue the stream.
    fn generate_keystream(&mut self, len: usize) -> Result<Keystream, GrainError> {
        let mut bits = Vec::with_capacity(len);
        self.fill_keystream(&mut bits, len)?;
        Ok(Keystream::new(bits, self.origin()))
    }
}

/// Backend selector for callers that pick at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    Reference,
    #[default]
    Optimized,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::Reference, Backend::Optimized];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Reference => "reference",
            Backend::Optimized => "optimized",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" => Ok(Backend::Reference),
            "optimized" => Ok(Backend::Optimized),
            other => Err(format!("unknown backend `{other}` (expected reference|optimized)")),
        }
    }
}

/// A cipher state of either backend.
#[derive(Clone, Debug)]
pub enum Grain {
    Reference(ReferenceGrain),
    Optimized(WordGrain),
}

impl Grain {
    pub fn initialize(backend: Backend, key: &KeyMaterial, nonce: &Nonce) -> Self {
        match backend {
            Backend::Reference => Grain::Reference(ReferenceGrain::initialize(key, nonce)),
            Backend::Optimized => Grain::Optimized(WordGrain::initialize(key, nonce)),
        }
    }

    pub fn load_initial_state(backend: Backend, key: &KeyMaterial, nonce: &Nonce) -> Self {
        match backend {
            Backend::Reference => Grain::Reference(ReferenceGrain::load_initial_state(key, nonce)),
            Backend::Optimized => Grain::Optimized(WordGrain::load_initial_state(key, nonce)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Grain::Reference(_) => Backend::Reference,
            Grain::Optimized(_) => Backend::Optimized,
        }
    }

    pub fn clock_rounds(&mut self, rounds: u64) {
        match self {
            Grain::Reference(g) => g.clock_rounds(rounds),
            Grain::Optimized(g) => g.clock_rounds(rounds),
        }
    }

    pub fn round(&self) -> u64 {
        match self {
            Grain::Reference(g) => g.round(),
            Grain::Optimized(g) => g.round(),
        }
    }

    pub fn diagnostic_snapshot(&self) -> RegisterSnapshot {
        match self {
            Grain::Reference(g) => g.diagnostic_snapshot(),
            Grain::Optimized(g) => g.diagnostic_snapshot(),
        }
    }

    pub fn generate_keystream(&mut self, len: usize) -> Result<Keystream, GrainError> {
        match self {
            Grain::Reference(g) => g.generate_keystream(len),
            Grain::Optimized(g) => g.generate_keystream(len),
        }
    }
}

/// Initializes a fresh state and returns its first `len` keystream bits.
pub fn keystream(backend: Backend, key: &KeyMaterial, nonce: &Nonce, len: usize) -> Keystream {
    Grain::initialize(backend, key, nonce)
        .generate_keystream(len)
        .expect("state is initialized")
}

/// Text form of register snapshots and keystream prefixes used by golden
/// files: lowercase hex, bits packed MSB-first.
pub mod golden {
    use super::{Keystream, RegisterSnapshot};

    pub fn register_hex(register: u128) -> String {
        hex::encode(register.reverse_bits().to_be_bytes())
    }

    pub fn snapshot_line(s: &RegisterSnapshot) -> String {
        format!(
            "round={} lfsr={} nfsr={}",
            s.round,
            register_hex(s.lfsr),
            register_hex(s.nfsr)
        )
    }

    pub fn keystream_line(z: &Keystream) -> String {
        format!("z[0..{})={}", z.len(), z.to_hex())
    }

    /// Parses a `round=.. lfsr=.. nfsr=..` line.
    pub fn parse_snapshot_line(line: &str) -> Option<RegisterSnapshot> {
        let mut round = None;
        let mut lfsr = None;
        let mut nfsr = None;
        for field in line.split_whitespace() {
            let (name, value) = field.split_once('=')?;
            match name {
                "round" => round = value.parse().ok(),
                "lfsr" => lfsr = parse_register(value),
                "nfsr" => nfsr = parse_register(value),
                _ => return None,
            }
        }
        Some(RegisterSnapshot {
            round: round?,
            lfsr: lfsr?,
            nfsr: nfsr?,
        })
    }

    fn parse_register(s: &str) -> Option<u128> {
        let bytes = crate::bits::parse_hex_exact::<16>(s).ok()?;
        Some(u128::from_be_bytes(bytes).reverse_bits())
    }
}
