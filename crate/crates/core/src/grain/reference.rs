use super::taps;
use super::{
    GrainCipher, GrainError, KeyMaterial, KeystreamOrigin, Nonce, RegisterSnapshot,
    FEEDBACK_END, INIT_ROUNDS, KEY_REINTRO_START,
};

/// Bit-at-a-time backend over plain bit arrays.
#[derive(Clone)]
pub struct ReferenceGrain {
    lfsr: [bool; 128],
    nfsr: [bool; 128],
    round: u64,
    // erased once round reaches FEEDBACK_END
    key: Option<[bool; 128]>,
    origin: KeystreamOrigin,
}

impl std::fmt::Debug for ReferenceGrain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceGrain")
            .field("round", &self.round)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

impl ReferenceGrain {
    /// Builds a state from raw register contents at the given round, for
    /// crafted-state tests. `key` is only consulted in rounds 320..384.
    pub fn from_registers(
        lfsr: [bool; 128],
        nfsr: [bool; 128],
        round: u64,
        key: Option<&KeyMaterial>,
    ) -> Self {
        let key_bits = key
            .filter(|_| round < FEEDBACK_END)
            .map(|k| std::array::from_fn(|i| k.bit(i)));
        Self {
            lfsr,
            nfsr,
            round,
            key: key_bits,
            origin: KeystreamOrigin {
                key_id: key.map_or(0, KeyMaterial::fingerprint),
                nonce: Nonce::from_bytes([0; 12]),
            },
        }
    }

    /// Pre-output of the current registers. Only callable once
    /// initialization is complete; earlier values are fed back and never
    /// exposed.
    pub fn pre_output(&self) -> Result<bool, GrainError> {
        if self.round < INIT_ROUNDS {
            return Err(GrainError::NotInitialized { round: self.round });
        }
        Ok(taps::pre_output(&self.lfsr, &self.nfsr))
    }

    pub fn has_key_copy(&self) -> bool {
        self.key.is_some()
    }

    fn step(&mut self) -> bool {
        let t = self.round;
        let f = taps::linear_feedback(&self.lfsr);
        let g = taps::nonlinear_feedback(&self.nfsr);
        let y = taps::pre_output(&self.lfsr, &self.nfsr);

        let mut nfsr_in = g ^ self.lfsr[0];
        let mut lfsr_in = f;
        if t < FEEDBACK_END {
            nfsr_in ^= y;
            lfsr_in ^= y;
        }
        if (KEY_REINTRO_START..FEEDBACK_END).contains(&t) {
            let key = self.key.as_ref().expect("key copy held until round 384");
            let i = (t - KEY_REINTRO_START) as usize;
            nfsr_in ^= key[i];
            lfsr_in ^= key[i + 64];
        }

        self.nfsr.copy_within(1.., 0);
        self.nfsr[127] = nfsr_in;
        self.lfsr.copy_within(1.., 0);
        self.lfsr[127] = lfsr_in;

        self.round += 1;
        if self.round == FEEDBACK_END {
            if let Some(k) = self.key.as_mut() {
                *k = [false; 128];
            }
            self.key = None;
        }
        y
    }
}

impl GrainCipher for ReferenceGrain {
    fn load_initial_state(key: &KeyMaterial, nonce: &Nonce) -> Self {
        let nfsr = std::array::from_fn(|i| key.bit(i));
        let lfsr = std::array::from_fn(|i| match i {
            0..=95 => nonce.bit(i),
            96..=126 => true,
            _ => false,
        });
        Self {
            lfsr,
            nfsr,
            round: 0,
            key: Some(nfsr),
            origin: KeystreamOrigin {
                key_id: key.fingerprint(),
                nonce: *nonce,
            },
        }
    }

    fn clock(&mut self) {
        self.step();
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn origin(&self) -> KeystreamOrigin {
        self.origin
    }

    fn diagnostic_snapshot(&self) -> RegisterSnapshot {
        let pack = |r: &[bool; 128]| {
            r.iter()
                .enumerate()
                .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i))
        };
        RegisterSnapshot {
            round: self.round,
            lfsr: pack(&self.lfsr),
            nfsr: pack(&self.nfsr),
        }
    }

    fn fill_keystream(&mut self, out: &mut Vec<bool>, len: usize) -> Result<(), GrainError> {
        if self.round < INIT_ROUNDS {
            return Err(GrainError::NotInitialized { round: self.round });
        }
        out.reserve(len);
        for _ in 0..len {
            out.push(self.step());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_key() -> KeyMaterial {
        KeyMaterial::from_bytes([0; 16])
    }

    fn zero_nonce() -> Nonce {
        Nonce::from_bytes([0; 12])
    }

    #[test]
    fn load_zero_key_zero_nonce() {
        let s = ReferenceGrain::load_initial_state(&zero_key(), &zero_nonce()).diagnostic_snapshot();
        assert_eq!(s.round, 0);
        assert_eq!(s.nfsr, 0);
        assert_eq!(s.lfsr, ((1u128 << 31) - 1) << 96);
    }

    #[test]
    fn load_all_ones() {
        let s = ReferenceGrain::load_initial_state(
            &KeyMaterial::from_bytes([0xff; 16]),
            &Nonce::from_bytes([0xff; 12]),
        )
        .diagnostic_snapshot();
        assert_eq!(s.nfsr, u128::MAX);
        assert_eq!(s.lfsr, u128::MAX >> 1);
    }

    #[test]
    fn load_first_key_bit() {
        let mut bytes = [0u8; 16];
        bytes[0] = 0x80;
        let s = ReferenceGrain::load_initial_state(&KeyMaterial::from_bytes(bytes), &zero_nonce())
            .diagnostic_snapshot();
        assert_eq!(s.nfsr, 1);
        assert_eq!(s.lfsr, ((1u128 << 31) - 1) << 96);
    }

    #[test]
    fn zero_registers_are_a_fixed_point_after_init() {
        let mut g = ReferenceGrain::from_registers([false; 128], [false; 128], 512, None);
        let z = g.generate_keystream(300).unwrap();
        assert!(z.bits().iter().all(|&b| !b));
        let s = g.diagnostic_snapshot();
        assert_eq!((s.lfsr, s.nfsr, s.round), (0, 0, 812));
    }

    #[test]
    fn key_reintroduced_at_round_320() {
        let mut bytes = [0u8; 16];
        bytes[0] = 0x80; // k0
        bytes[8] = 0x80; // k64
        let key = KeyMaterial::from_bytes(bytes);
        let mut g = ReferenceGrain::from_registers([false; 128], [false; 128], 320, Some(&key));
        g.clock();
        let s = g.diagnostic_snapshot();
        assert!(s.nfsr_bit(127));
        assert!(s.lfsr_bit(127));
        assert_eq!(s.round, 321);
    }

    #[test]
    fn key_copy_erased_at_384() {
        let mut g = ReferenceGrain::load_initial_state(&zero_key(), &zero_nonce());
        g.clock_rounds(383);
        assert!(g.has_key_copy());
        g.clock();
        assert!(!g.has_key_copy());
    }

    #[test]
    fn keystream_rejected_before_init() {
        let mut g = ReferenceGrain::load_initial_state(&zero_key(), &zero_nonce());
        g.clock_rounds(511);
        assert_eq!(
            g.generate_keystream(1).unwrap_err(),
            GrainError::NotInitialized { round: 511 }
        );
        assert!(g.pre_output().is_err());
        g.clock();
        assert!(g.generate_keystream(0).unwrap().is_empty());
        assert_eq!(g.round(), 512);
    }
}
