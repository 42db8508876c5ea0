//! Straight transcription of the Grain-128PLE equations, one bit per `u8`.
//! Shares no code with the crate's backends.

pub struct Oracle {
    pub s: Vec<u8>,
    pub b: Vec<u8>,
    pub k: Vec<u8>,
    pub t: u64,
}

fn byte_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |j| (byte >> (7 - j)) & 1))
        .collect()
}

impl Oracle {
    pub fn load(key: &[u8; 16], iv: &[u8; 12]) -> Self {
        let k = byte_bits(key);
        let iv = byte_bits(iv);
        let mut s = Vec::with_capacity(128);
        for i in 0..128 {
            s.push(if i <= 95 {
                iv[i]
            } else if i <= 126 {
                1
            } else {
                0
            });
        }
        Oracle {
            s,
            b: k.clone(),
            k,
            t: 0,
        }
    }

    pub fn f(&self) -> u8 {
        let s = &self.s;
        s[0] ^ s[7] ^ s[38] ^ s[70] ^ s[81] ^ s[96]
    }

    pub fn g(&self) -> u8 {
        let b = &self.b;
        b[0] ^ b[26] ^ b[56] ^ b[91] ^ b[96]
            ^ (b[3] & b[67])
            ^ (b[11] & b[13])
            ^ (b[17] & b[18])
            ^ (b[27] & b[59])
            ^ (b[40] & b[48])
            ^ (b[61] & b[65])
            ^ (b[68] & b[84])
            ^ (b[22] & b[24] & b[25])
            ^ (b[70] & b[78] & b[82])
            ^ (b[88] & b[92] & b[93] & b[95])
    }

    pub fn h(&self) -> u8 {
        let (s, b) = (&self.s, &self.b);
        (b[12] & s[8]) ^ (s[13] & s[20]) ^ (b[95] & s[42]) ^ (s[60] & s[79]) ^ (b[12] & b[95] & s[94])
    }

    pub fn y(&self) -> u8 {
        let (s, b) = (&self.s, &self.b);
        self.h() ^ s[93] ^ b[2] ^ b[15] ^ b[36] ^ b[45] ^ b[64] ^ b[73] ^ b[89]
    }

    /// One time slot; returns y_t.
    pub fn clock(&mut self) -> u8 {
        let t = self.t as usize;
        let (f, g, y) = (self.f(), self.g(), self.y());
        let s0 = self.s[0];
        let new_b = match t {
            0..=319 => g ^ s0 ^ y,
            320..=383 => g ^ s0 ^ y ^ self.k[t - 320],
            _ => g ^ s0,
        };
        let new_s = match t {
            0..=319 => f ^ y,
            320..=383 => f ^ y ^ self.k[t - 256],
            _ => f,
        };
        self.b.remove(0);
        self.b.push(new_b);
        self.s.remove(0);
        self.s.push(new_s);
        self.t += 1;
        y
    }

    pub fn keystream(&mut self, len: usize) -> Vec<u8> {
        assert!(self.t >= 512);
        (0..len).map(|_| self.clock()).collect()
    }

    pub fn hex(bits: &[u8]) -> String {
        bits.chunks(8)
            .map(|c| {
                let byte = c.iter().enumerate().fold(0u8, |acc, (j, &v)| acc | (v << (7 - j)));
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn snapshot_line(&self) -> String {
        format!("round={} lfsr={} nfsr={}", self.t, Self::hex(&self.s), Self::hex(&self.b))
    }
}
