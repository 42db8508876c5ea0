#![allow(dead_code)]

pub mod oracle;

use grain_ple::{Backend, Codec, KeyMaterial, Nonce, PipelineConfig, SweepConfig};

/// xorshift64* for test inputs, independent of the crate's simulator RNG.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn bytes<const N: usize>(&mut self) -> [u8; N] {
        std::array::from_fn(|_| self.next_u64() as u8)
    }

    pub fn bits(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.next_u64() >> 63 == 1).collect()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn key(&mut self) -> KeyMaterial {
        KeyMaterial::from_bytes(self.bytes())
    }

    pub fn nonce(&mut self) -> Nonce {
        Nonce::from_bytes(self.bytes())
    }
}

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// The sweep committed as `tests/golden/sweep.csv`.
pub fn golden_sweep_config() -> SweepConfig {
    SweepConfig {
        p_values: vec![0.0, 0.01, 0.05],
        trials: 3,
        data_bits: 400,
        base_seed: 2024,
        pipeline: PipelineConfig {
            key: KeyMaterial::from_hex("000102030405060708090a0b0c0d0e0f").unwrap(),
            nonce: Nonce::from_counter(0).unwrap(),
            codec: Codec::Hamming74,
            ple_enabled: true,
            disclosed_prefix: 0,
            backend: Backend::Optimized,
        },
    }
}
