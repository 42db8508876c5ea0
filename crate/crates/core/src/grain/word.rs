use super::{
    GrainCipher, GrainError, KeyMaterial, KeystreamOrigin, Nonce, RegisterSnapshot,
    FEEDBACK_END, INIT_ROUNDS, KEY_REINTRO_START,
};

/// Word-parallel backend: registers are `u128` with slot `i` at bit `i`,
/// and up to 32 rounds are computed per step.
///
/// The highest tap index read by any function is 96, so the 32 windows
/// `reg >> tap` for taps <= 96 only touch bits that are still pre-shift
/// state, and 32 consecutive outputs can be evaluated at once.
#[derive(Clone)]
pub struct WordGrain {
    lfsr: u128,
    nfsr: u128,
    round: u64,
    key: u128,
    origin: KeystreamOrigin,
}

impl std::fmt::Debug for WordGrain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WordGrain")
            .field("round", &self.round)
            .field("origin", &self.origin)
            .finish_non_exhaustive()
    }
}

#[inline(always)]
fn w(reg: u128, tap: u32) -> u32 {
    (reg >> tap) as u32
}

#[inline(always)]
fn mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

struct Outputs {
    f: u32,
    g: u32,
    y: u32,
    s0: u32,
}

#[inline(always)]
fn evaluate(s: u128, b: u128) -> Outputs {
    let f = w(s, 0) ^ w(s, 7) ^ w(s, 38) ^ w(s, 70) ^ w(s, 81) ^ w(s, 96);

    let g = w(b, 0)
        ^ w(b, 26)
        ^ w(b, 56)
        ^ w(b, 91)
        ^ w(b, 96)
        ^ (w(b, 3) & w(b, 67))
        ^ (w(b, 11) & w(b, 13))
        ^ (w(b, 17) & w(b, 18))
        ^ (w(b, 27) & w(b, 59))
        ^ (w(b, 40) & w(b, 48))
        ^ (w(b, 61) & w(b, 65))
        ^ (w(b, 68) & w(b, 84))
        ^ (w(b, 22) & w(b, 24) & w(b, 25))
        ^ (w(b, 70) & w(b, 78) & w(b, 82))
        ^ (w(b, 88) & w(b, 92) & w(b, 93) & w(b, 95));

    let b12 = w(b, 12);
    let b95 = w(b, 95);
    let h = (b12 & w(s, 8))
        ^ (w(s, 13) & w(s, 20))
        ^ (b95 & w(s, 42))
        ^ (w(s, 60) & w(s, 79))
        ^ (b12 & b95 & w(s, 94));

    let y = h
        ^ w(s, 93)
        ^ w(b, 2)
        ^ w(b, 15)
        ^ w(b, 36)
        ^ w(b, 45)
        ^ w(b, 64)
        ^ w(b, 73)
        ^ w(b, 89);

    Outputs { f, g, y, s0: w(s, 0) }
}

impl WordGrain {
    /// Builds a state from raw register contents (slot `i` at bit `i`) at
    /// the given round.
    pub fn from_registers(lfsr: u128, nfsr: u128, round: u64, key: Option<&KeyMaterial>) -> Self {
        Self {
            lfsr,
            nfsr,
            round,
            key: key
                .filter(|_| round < FEEDBACK_END)
                .map_or(0, KeyMaterial::to_register),
            origin: KeystreamOrigin {
                key_id: key.map_or(0, KeyMaterial::fingerprint),
                nonce: Nonce::from_bytes([0; 12]),
            },
        }
    }

    /// Rounds that can be taken in one step from the current round without
    /// crossing a schedule boundary, capped at 32.
    fn chunk_len(&self, wanted: u64) -> u32 {
        let t = self.round;
        let boundary = [KEY_REINTRO_START, FEEDBACK_END]
            .into_iter()
            .find(|&b| t < b)
            .map_or(u64::MAX, |b| b - t);
        wanted.min(boundary).min(32) as u32
    }

    /// Advances `n` (1..=32) rounds that all lie in one schedule phase and
    /// returns their pre-outputs in the low `n` bits.
    #[inline(always)]
    fn step(&mut self, n: u32) -> u32 {
        debug_assert!((1..=32).contains(&n));
        let t = self.round;
        let o = evaluate(self.lfsr, self.nfsr);

        let mut nfsr_in = o.g ^ o.s0;
        let mut lfsr_in = o.f;
        if t < FEEDBACK_END {
            nfsr_in ^= o.y;
            lfsr_in ^= o.y;
        }
        if (KEY_REINTRO_START..FEEDBACK_END).contains(&t) {
            let offset = (t - KEY_REINTRO_START) as u32;
            nfsr_in ^= w(self.key, offset);
            lfsr_in ^= w(self.key, offset + 64);
        }

        let m = mask(n);
        let shift = 128 - n;
        self.nfsr = (self.nfsr >> n) | (u128::from(nfsr_in & m) << shift);
        self.lfsr = (self.lfsr >> n) | (u128::from(lfsr_in & m) << shift);
        self.round += u64::from(n);
        if t < FEEDBACK_END && self.round >= FEEDBACK_END {
            self.key = 0;
        }
        o.y & m
    }

    pub fn has_key_copy(&self) -> bool {
        self.round < FEEDBACK_END
    }

    /// Appends keystream bytes (MSB-first packing) covering `len_bytes * 8`
    /// bits. Same bits as [`GrainCipher::fill_keystream`].
    pub fn fill_keystream_bytes(&mut self, out: &mut Vec<u8>, len_bytes: usize) -> Result<(), GrainError> {
        if self.round < INIT_ROUNDS {
            return Err(GrainError::NotInitialized { round: self.round });
        }
        out.reserve(len_bytes);
        let mut remaining = len_bytes;
        while remaining >= 4 {
            // bit j of the word is keystream bit j; MSB-first means reversing
            let y = self.step(32).reverse_bits();
            out.extend_from_slice(&y.to_be_bytes());
            remaining -= 4;
        }
        if remaining > 0 {
            let n = remaining as u32 * 8;
            let y = self.step(n).reverse_bits();
            out.extend_from_slice(&y.to_be_bytes()[..remaining]);
        }
        Ok(())
    }
}

impl GrainCipher for WordGrain {
    fn load_initial_state(key: &KeyMaterial, nonce: &Nonce) -> Self {
        let ones = ((1u128 << 31) - 1) << 96;
        Self {
            lfsr: nonce.to_register() | ones,
            nfsr: key.to_register(),
            round: 0,
            key: key.to_register(),
            origin: KeystreamOrigin {
                key_id: key.fingerprint(),
                nonce: *nonce,
            },
        }
    }

    fn clock(&mut self) {
        self.step(1);
    }

    fn clock_rounds(&mut self, rounds: u64) {
        let mut left = rounds;
        while left > 0 {
            let n = self.chunk_len(left);
            self.step(n);
            left -= u64::from(n);
        }
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn origin(&self) -> KeystreamOrigin {
        self.origin
    }

    fn diagnostic_snapshot(&self) -> RegisterSnapshot {
        RegisterSnapshot {
            round: self.round,
            lfsr: self.lfsr,
            nfsr: self.nfsr,
        }
    }

    fn fill_keystream(&mut self, out: &mut Vec<bool>, len: usize) -> Result<(), GrainError> {
        if self.round < INIT_ROUNDS {
            return Err(GrainError::NotInitialized { round: self.round });
        }
        out.reserve(len);
        let mut left = len;
        while left > 0 {
            let n = left.min(32) as u32;
            let y = self.step(n);
            out.extend((0..n).map(|j| (y >> j) & 1 == 1));
            left -= n as usize;
        }
        Ok(())
    }
}
