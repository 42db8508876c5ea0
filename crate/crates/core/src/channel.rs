//! Monte-Carlo simulation of a coded, encrypted link over a binary symmetric
//! channel, with an eavesdropper tapping the same channel output.
//!
//! ```text
//! Alice: data -> encode -> encrypt ─┐
//!                                   BSC ─┬─> Bob: decrypt -> decode
//!                                        └─> Eve: decode (no key)
//! ```
//!
//! Modulation is the identity; the BSC stands for modulator, physical
//! channel and hard-decision demodulator together.
//!
//! Randomness: every trial owns a ChaCha8 generator seeded with
//! [`trial_seed`]. Stream 0 drives the channel, stream 1 draws the payload,
//! so toggling encryption never changes the error realization.

use std::io;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::bits;
use crate::codec::{Codec, CodecError};
use crate::frame::{self, EncryptedFrame, Frame, FrameError};
use crate::grain::{Backend, Grain, KeyMaterial, Nonce};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("crossover probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("no data bits to send")]
    EmptyData,
    #[error("sweep needs at least one probability")]
    NoProbabilities,
    #[error("sweep needs at least one trial")]
    NoTrials,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial`: `mix64(base_seed + trial)` with wrapping addition.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    mix64(base_seed.wrapping_add(trial))
}

/// Uniform in [0, 1) with 53 bits of resolution.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random payload bits for a trial.
pub fn random_bits(seed: u64, len: usize) -> Vec<bool> {
    let mut rng = rng_stream(seed, 1);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        let take = (len - out.len()).min(64);
        out.extend((0..take).map(|j| (word >> j) & 1 == 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BscChannel {
    crossover_p: f64,
    seed: u64,
}

impl BscChannel {
    pub fn new(crossover_p: f64, seed: u64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&crossover_p) {
            return Err(SimError::Probability(crossover_p));
        }
        Ok(Self { crossover_p, seed })
    }

    pub fn crossover_p(&self) -> f64 {
        self.crossover_p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The error vector for a transmission of `len` bits. Bit `i` is set
    /// iff the `i`-th uniform draw is below `p`.
    pub fn error_vector(&self, len: usize) -> Vec<bool> {
        let mut rng = rng_stream(self.seed, 0);
        (0..len).map(|_| unit_f64(&mut rng) < self.crossover_p).collect()
    }

    /// Returns `(received, error_vector)`.
    pub fn transmit(&self, bits: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let e = self.error_vector(bits.len());
        (bits::xor(bits, &e), e)
    }
}

/// Codewords whose error weight exceeds what the codec corrects.
pub fn uncorrectable_codewords(errors: &[bool], codec: Codec) -> usize {
    errors
        .chunks(codec.n())
        .filter(|cw| bits::popcount(cw) > codec.correctable())
        .count()
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub key: KeyMaterial,
    pub nonce: Nonce,
    pub codec: Codec,
    pub ple_enabled: bool,
    /// Leading code bits sent in the clear, counted after encoding.
    pub disclosed_prefix: usize,
    pub backend: Backend,
}

/// One row of simulation output.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelReport {
    pub trial: u64,
    pub crossover_p: f64,
    pub ple_enabled: bool,
    pub codec: Codec,
    pub disclosed_prefix: usize,
    /// Bob's bit error rate before decoding: `errors_injected / code bits`.
    pub raw_ber: f64,
    /// Fraction of codewords Bob decoded to the wrong data block.
    pub post_fer: f64,
    /// Bit error rate of Eve's decoded output against the true data.
    pub eve_ber: f64,
    pub errors_injected: usize,
    pub seed: u64,
}

/// Everything a pipeline run produced, beyond the report.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub report: ChannelReport,
    pub error_vector: Vec<bool>,
    /// Bob's channel-decoder input (after decryption).
    pub bob_codeword_bits: Vec<bool>,
    pub bob_data: Vec<bool>,
    pub eve_data: Vec<bool>,
    /// Codewords hit by more errors than the code corrects.
    pub uncorrectable_codewords: usize,
    /// Data bits whose codewords lie entirely inside the disclosed prefix.
    pub disclosed_data_bits: usize,
    /// Eve's bit error rate restricted to those data bits.
    pub eve_prefix_ber: Option<f64>,
    /// Eve's bit error rate on the remaining data bits.
    pub eve_suffix_ber: Option<f64>,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs encode, encrypt, channel, decrypt and decode once.
pub fn run_pipeline(
    data: &[bool],
    config: &PipelineConfig,
    channel: &BscChannel,
) -> Result<PipelineOutcome, SimError> {
    run_trial(data, config, channel, 0)
}

fn run_trial(
    data: &[bool],
    config: &PipelineConfig,
    channel: &BscChannel,
    trial: u64,
) -> Result<PipelineOutcome, SimError> {
    if data.is_empty() {
        return Err(SimError::EmptyData);
    }
    let codec = config.codec;
    let encoded = codec.encode(data)?;
    let frame = Frame::segment(encoded, codec.n())?.with_disclosed_prefix(config.disclosed_prefix)?;

    let sent = if config.ple_enabled {
        let z = Grain::initialize(config.backend, &config.key, &config.nonce)
            .generate_keystream(frame.encrypted_len())
            .expect("initialized");
        frame::encrypt_frame(&frame, &z)?.into_bits()
    } else {
        frame.bits().to_vec()
    };

    let (received, errors) = channel.transmit(&sent);

    let bob_codeword_bits = if config.ple_enabled {
        let received = EncryptedFrame::from_received(received.clone(), codec.n(), config.disclosed_prefix)?;
        let z = Grain::initialize(config.backend, &config.key, &config.nonce)
            .generate_keystream(received.encrypted_len())
            .expect("initialized");
        frame::decrypt_frame(&received, &z)?.into_bits()
    } else {
        received.clone()
    };
    let bob_data = codec.decode(&bob_codeword_bits)?.data;
    let eve_data = codec.decode(&received)?.data;

    let k = codec.k();
    let blocks = data.len() / k;
    let block_errors = data
        .chunks_exact(k)
        .zip(bob_data.chunks_exact(k))
        .filter(|(a, b)| a != b)
        .count();
    let errors_injected = bits::popcount(&errors);

    let disclosed_data_bits = (config.disclosed_prefix / codec.n()) * k;
    let (prefix_ber, suffix_ber) = {
        let (dp, ds) = data.split_at(disclosed_data_bits);
        let (ep, es) = eve_data.split_at(disclosed_data_bits);
        let ber = |a: &[bool], b: &[bool]| (!a.is_empty()).then(|| rate(bits::hamming_distance(a, b), a.len()));
        (ber(dp, ep), ber(ds, es))
    };

    let report = ChannelReport {
        trial,
        crossover_p: channel.crossover_p(),
        ple_enabled: config.ple_enabled,
        codec,
        disclosed_prefix: config.disclosed_prefix,
        raw_ber: rate(errors_injected, sent.len()),
        post_fer: rate(block_errors, blocks),
        eve_ber: rate(bits::hamming_distance(data, &eve_data), data.len()),
        errors_injected,
        seed: channel.seed(),
    };

    Ok(PipelineOutcome {
        report,
        uncorrectable_codewords: uncorrectable_codewords(&errors, codec),
        error_vector: errors,
        bob_codeword_bits,
        bob_data,
        eve_data,
        disclosed_data_bits,
        eve_prefix_ber: prefix_ber,
        eve_suffix_ber: suffix_ber,
    })
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub p_values: Vec<f64>,
    pub trials: u64,
    /// Payload bits per trial; must be a multiple of the codec's `k`.
    pub data_bits: usize,
    pub base_seed: u64,
    /// `nonce` is the counter of the first trial; later trials count up.
    pub pipeline: PipelineConfig,
}

/// Runs `trials` trials for each probability, in order.
///
/// Trial `i` uses seed [`trial_seed`]`(base_seed, i)` for every
/// probability, so the same uniform draws are compared across `p` and each
/// error vector is a superset of the one at a smaller `p`. The nonce is the
/// base nonce plus the running trial count across the whole sweep.
pub fn sweep(config: &SweepConfig) -> Result<Vec<ChannelReport>, SimError> {
    if config.p_values.is_empty() {
        return Err(SimError::NoProbabilities);
    }
    if config.trials == 0 {
        return Err(SimError::NoTrials);
    }
    let base_counter = config.pipeline.nonce.counter();
    let mut reports = Vec::with_capacity(config.p_values.len() * config.trials as usize);
    for (pi, &p) in config.p_values.iter().enumerate() {
        for trial in 0..config.trials {
            let seed = trial_seed(config.base_seed, trial);
            let data = random_bits(seed, config.data_bits);
            let run = pi as u128 * u128::from(config.trials) + u128::from(trial);
            let nonce = Nonce::from_counter((base_counter + run) & Nonce::MAX_COUNTER).expect("masked");
            let pipeline = PipelineConfig {
                nonce,
                ..config.pipeline.clone()
            };
            let channel = BscChannel::new(p, seed)?;
            reports.push(run_trial(&data, &pipeline, &channel, trial)?.report);
        }
    }
    Ok(reports)
}

pub const CSV_HEADER: &str = "trial,p,ple,codec,disclosed_prefix,raw_ber,post_fer,eve_ber,errors_injected,seed";

#[derive(Serialize)]
struct CsvRow<'a> {
    trial: u64,
    p: f64,
    ple: &'a str,
    codec: &'a str,
    disclosed_prefix: usize,
    raw_ber: f64,
    post_fer: f64,
    eve_ber: f64,
    errors_injected: usize,
    seed: u64,
}

pub fn write_csv<W: io::Write>(reports: &[ChannelReport], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    if reports.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in reports {
        w.serialize(CsvRow {
            trial: r.trial,
            p: r.crossover_p,
            ple: if r.ple_enabled { "on" } else { "off" },
            codec: r.codec.name(),
            disclosed_prefix: r.disclosed_prefix,
            raw_ber: r.raw_ber,
            post_fer: r.post_fer,
            eve_ber: r.eve_ber,
            errors_injected: r.errors_injected,
            seed: r.seed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(reports: &[ChannelReport]) -> Result<String, SimError> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(codec: Codec, ple: bool, prefix: usize) -> PipelineConfig {
        PipelineConfig {
            key: KeyMaterial::from_bytes(*b"0123456789abcdef"),
            nonce: Nonce::from_counter(7).unwrap(),
            codec,
            ple_enabled: ple,
            disclosed_prefix: prefix,
            backend: Backend::Optimized,
        }
    }

    #[test]
    fn probability_is_validated() {
        assert!(BscChannel::new(-0.1, 0).is_err());
        assert!(BscChannel::new(1.5, 0).is_err());
        assert!(BscChannel::new(f64::NAN, 0).is_err());
        assert!(BscChannel::new(1.0, 0).is_ok());
    }

    #[test]
    fn noiseless_and_certain_flip() {
        let bits = random_bits(1, 500);
        let (r, e) = BscChannel::new(0.0, 9).unwrap().transmit(&bits);
        assert_eq!(r, bits);
        assert!(e.iter().all(|&b| !b));
        let (r, _) = BscChannel::new(1.0, 9).unwrap().transmit(&bits);
        assert!(r.iter().zip(&bits).all(|(a, b)| a != b));
    }

    #[test]
    fn error_vector_is_reproducible() {
        let ch = BscChannel::new(0.3, 42).unwrap();
        assert_eq!(ch.error_vector(1000), ch.error_vector(1000));
        // prefix-stable: a longer transmission starts with the same errors
        assert_eq!(ch.error_vector(1000)[..], ch.error_vector(1500)[..1000]);
        assert_ne!(ch.error_vector(1000), BscChannel::new(0.3, 43).unwrap().error_vector(1000));
    }

    #[test]
    fn noiseless_pipeline_delivers_data() {
        let data = random_bits(3, 400);
        let out = run_pipeline(&data, &config(Codec::Hamming74, true, 0), &BscChannel::new(0.0, 1).unwrap()).unwrap();
        assert_eq!(out.bob_data, data);
        assert_eq!(out.report.post_fer, 0.0);
        assert_eq!(out.report.errors_injected, 0);
        assert!(out.report.eve_ber > 0.3);
    }

    #[test]
    fn empty_data_and_bad_length() {
        let ch = BscChannel::new(0.1, 1).unwrap();
        assert!(matches!(run_pipeline(&[], &config(Codec::Hamming74, true, 0), &ch), Err(SimError::EmptyData)));
        assert!(matches!(
            run_pipeline(&[true; 5], &config(Codec::Hamming74, true, 0), &ch),
            Err(SimError::Codec(_))
        ));
        assert!(matches!(
            run_pipeline(&[true; 4], &config(Codec::Hamming74, true, 8), &ch),
            Err(SimError::Frame(FrameError::PrefixTooLong { .. }))
        ));
    }

    #[test]
    fn sweep_rejects_degenerate_configs() {
        let mut cfg = SweepConfig {
            p_values: vec![],
            trials: 1,
            data_bits: 8,
            base_seed: 0,
            pipeline: config(Codec::Repetition3, true, 0),
        };
        assert!(matches!(sweep(&cfg), Err(SimError::NoProbabilities)));
        cfg.p_values = vec![0.1];
        cfg.trials = 0;
        assert!(matches!(sweep(&cfg), Err(SimError::NoTrials)));
    }

    #[test]
    fn csv_header_matches_columns() {
        let cfg = SweepConfig {
            p_values: vec![0.1],
            trials: 2,
            data_bits: 8,
            base_seed: 5,
            pipeline: config(Codec::Repetition3, false, 0),
        };
        let csv = to_csv_string(&sweep(&cfg).unwrap()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 2);
        assert_eq!(to_csv_string(&[]).unwrap().trim_end(), CSV_HEADER);
    }

    #[test]
    fn uncorrectable_count() {
        let e = bits::from_bit_str("110 100 111 000").unwrap();
        assert_eq!(uncorrectable_codewords(&e, Codec::Repetition3), 2);
    }
}
