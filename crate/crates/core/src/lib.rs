//! Grain-128PLE: a synchronous stream cipher for physical-layer encryption.
//!
//! The crate is organised around the transmit chain of a physical-layer
//! encryption link:
//!
//! ```text
//! data -> codec::encode -> frame::encrypt_frame -> channel (BSC) -> frame::decrypt_frame -> codec::decode
//! ```
//!
//! Because decryption is a plain XOR with a keystream that depends only on
//! the key and nonce, every bit flipped by the channel shows up at exactly
//! the same position after decryption. The channel decoder therefore sees the
//! same error pattern it would have seen without encryption.
//!
//! Bit order: wherever bits are packed into bytes (hex, files, keys, nonces),
//! bit `i` is bit `7 - (i % 8)` of byte `i / 8`, i.e. most significant bit
//! first.

pub mod bits;
pub mod channel;
pub mod codec;
pub mod frame;
pub mod grain;
pub mod session;

pub use channel::{BscChannel, ChannelReport, PipelineConfig, PipelineOutcome, SweepConfig};
pub use codec::{Codec, DecodeOutcome};
pub use frame::{EncryptedFrame, Frame};
pub use grain::{Backend, Grain, GrainCipher, KeyMaterial, Keystream, Nonce};
pub use session::SessionRecord;
