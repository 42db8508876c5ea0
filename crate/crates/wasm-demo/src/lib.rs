//! Browser demo: keystream generation, a single noisy transmission shown
//! bit by bit, and a BER/FER sweep for plotting.
//!
//! The plain functions are usable natively; the `#[wasm_bindgen]` items are
//! thin wrappers over them.

use grain_ple::bits::{self, to_bit_str};
use grain_ple::channel::{random_bits, run_pipeline, trial_seed};
use grain_ple::frame::{self, Frame};
use grain_ple::grain;
use grain_ple::{Backend, BscChannel, Codec, KeyMaterial, Nonce, PipelineConfig};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn keystream_hex_native(key: &str, nonce: &str, bits: usize, backend: &str) -> Result<String, String> {
    let key = KeyMaterial::from_hex(key).map_err(|e| format!("key: {e}"))?;
    let nonce = Nonce::from_hex(nonce).map_err(|e| format!("nonce: {e}"))?;
    let backend: Backend = backend.parse()?;
    Ok(grain::keystream(backend, &key, &nonce, bits).to_hex())
}

#[wasm_bindgen]
pub fn keystream_hex(key: &str, nonce: &str, bits: usize, backend: &str) -> Result<String, JsValue> {
    keystream_hex_native(key, nonce, bits, backend).map_err(js_err)
}

/// One frame through encrypt, channel and decrypt, as `0`/`1` strings.
#[wasm_bindgen(getter_with_clone)]
#[derive(Clone, Debug)]
pub struct Transmission {
    pub plaintext: String,
    pub keystream: String,
    pub ciphertext: String,
    pub errors: String,
    pub received: String,
    pub decrypted: String,
    /// Positions where `decrypted` differs from `plaintext` XOR `errors`.
    pub mismatches: usize,
}

pub fn transmit_native(
    key: &str,
    nonce: &str,
    bits: usize,
    disclosed_prefix: usize,
    p: f64,
    seed: u64,
) -> Result<Transmission, String> {
    let key = KeyMaterial::from_hex(key).map_err(|e| format!("key: {e}"))?;
    let nonce = Nonce::from_hex(nonce).map_err(|e| format!("nonce: {e}"))?;
    let plain = random_bits(seed, bits);
    let frame = Frame::segment(plain.clone(), 1)
        .and_then(|f| f.with_disclosed_prefix(disclosed_prefix))
        .map_err(|e| e.to_string())?;
    let z = grain::keystream(Backend::Optimized, &key, &nonce, frame.encrypted_len());
    let sent = frame::encrypt_frame(&frame, &z).map_err(|e| e.to_string())?;
    let channel = BscChannel::new(p, seed).map_err(|e| e.to_string())?;
    let (_, errors) = channel.transmit(sent.bits());
    let received = sent.with_errors(&errors);
    let decrypted = frame::decrypt_frame(&received, &z).map_err(|e| e.to_string())?;
    let expected = bits::xor(&plain, &errors);

    let mut shown_z = vec![false; disclosed_prefix];
    shown_z.extend_from_slice(z.bits());
    Ok(Transmission {
        plaintext: to_bit_str(&plain),
        keystream: to_bit_str(&shown_z),
        ciphertext: to_bit_str(sent.bits()),
        errors: to_bit_str(&errors),
        received: to_bit_str(received.bits()),
        decrypted: to_bit_str(decrypted.bits()),
        mismatches: bits::hamming_distance(decrypted.bits(), &expected),
    })
}

#[wasm_bindgen]
pub fn transmit(
    key: &str,
    nonce: &str,
    bits: usize,
    disclosed_prefix: usize,
    p: f64,
    seed: u64,
) -> Result<Transmission, JsValue> {
    transmit_native(key, nonce, bits, disclosed_prefix, p, seed).map_err(js_err)
}

/// Mean rates per probability, flattened as
/// `[p, raw_ber, bob_post_fer, eve_ber, raw_ber_off, bob_post_fer_off, ...]`.
/// The `_off` columns repeat the run without encryption.
pub fn ber_curve_native(
    codec: &str,
    p_values: &[f64],
    trials: u64,
    data_bits: usize,
    disclosed_prefix: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let codec: Codec = codec.parse()?;
    if trials == 0 {
        return Err("trials must be at least 1".into());
    }
    let key = KeyMaterial::from_hex("000102030405060708090a0b0c0d0e0f").expect("literal");
    let mut out = Vec::with_capacity(p_values.len() * 6);
    for &p in p_values {
        let mut acc = [0.0f64; 5];
        for trial in 0..trials {
            let s = trial_seed(seed, trial);
            let data = random_bits(s, data_bits - data_bits % codec.k());
            let ch = BscChannel::new(p, s).map_err(|e| e.to_string())?;
            let mut config = PipelineConfig {
                key: key.clone(),
                nonce: Nonce::from_counter(u128::from(trial)).expect("small"),
                codec,
                ple_enabled: true,
                disclosed_prefix,
                backend: Backend::Optimized,
            };
            let on = run_pipeline(&data, &config, &ch).map_err(|e| e.to_string())?.report;
            config.ple_enabled = false;
            let off = run_pipeline(&data, &config, &ch).map_err(|e| e.to_string())?.report;
            for (a, v) in acc.iter_mut().zip([on.raw_ber, on.post_fer, on.eve_ber, off.raw_ber, off.post_fer]) {
                *a += v;
            }
        }
        out.push(p);
        out.extend(acc.iter().map(|a| a / trials as f64));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn ber_curve(
    codec: &str,
    p_values: Vec<f64>,
    trials: u32,
    data_bits: usize,
    disclosed_prefix: usize,
    seed: u32,
) -> Result<Vec<f64>, JsValue> {
    ber_curve_native(codec, &p_values, u64::from(trials), data_bits, disclosed_prefix, u64::from(seed)).map_err(js_err)
}
