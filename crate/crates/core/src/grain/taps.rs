//! Tap tables of the feedback and filter functions, and their bit-level
//! evaluation. `s` is the LFSR, `b` the NFSR.

/// A register reference inside a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tap {
    S(usize),
    B(usize),
}

/// Linear feedback `f`: XOR of these LFSR slots.
pub const F_LINEAR: [usize; 6] = [0, 7, 38, 70, 81, 96];

/// Linear part of the nonlinear feedback `g` (NFSR slots).
pub const G_LINEAR: [usize; 5] = [0, 26, 56, 91, 96];

/// Product terms of `g` (NFSR slots).
pub const G_PRODUCTS: [&[usize]; 10] = [
    &[3, 67],
    &[11, 13],
    &[17, 18],
    &[27, 59],
    &[40, 48],
    &[61, 65],
    &[68, 84],
    &[22, 24, 25],
    &[70, 78, 82],
    &[88, 92, 93, 95],
];

/// Product terms of the filter `h`.
pub const H_PRODUCTS: [&[Tap]; 5] = [
    &[Tap::B(12), Tap::S(8)],
    &[Tap::S(13), Tap::S(20)],
    &[Tap::B(95), Tap::S(42)],
    &[Tap::S(60), Tap::S(79)],
    &[Tap::B(12), Tap::B(95), Tap::S(94)],
];

/// LFSR slots added linearly to `h` to form the pre-output.
pub const Y_LINEAR_S: [usize; 1] = [93];
/// NFSR slots added linearly to `h` to form the pre-output.
pub const Y_LINEAR_B: [usize; 7] = [2, 15, 36, 45, 64, 73, 89];

fn read(tap: Tap, s: &[bool; 128], b: &[bool; 128]) -> bool {
    match tap {
        Tap::S(i) => s[i],
        Tap::B(i) => b[i],
    }
}

pub fn linear_feedback(s: &[bool; 128]) -> bool {
    F_LINEAR.iter().fold(false, |acc, &i| acc ^ s[i])
}

pub fn nonlinear_feedback(b: &[bool; 128]) -> bool {
    let linear = G_LINEAR.iter().fold(false, |acc, &i| acc ^ b[i]);
    G_PRODUCTS
        .iter()
        .fold(linear, |acc, term| acc ^ term.iter().all(|&i| b[i]))
}

pub fn filter(s: &[bool; 128], b: &[bool; 128]) -> bool {
    H_PRODUCTS
        .iter()
        .fold(false, |acc, term| acc ^ term.iter().all(|&t| read(t, s, b)))
}

pub fn pre_output(s: &[bool; 128], b: &[bool; 128]) -> bool {
    let acc = Y_LINEAR_S.iter().fold(filter(s, b), |acc, &i| acc ^ s[i]);
    Y_LINEAR_B.iter().fold(acc, |acc, &i| acc ^ b[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: [bool; 128] = [false; 128];

    fn with(bits: &[usize]) -> [bool; 128] {
        let mut r = Z;
        for &i in bits {
            r[i] = true;
        }
        r
    }

    #[test]
    fn zero_state_outputs_zero() {
        assert!(!linear_feedback(&Z));
        assert!(!nonlinear_feedback(&Z));
        assert!(!filter(&Z, &Z));
        assert!(!pre_output(&Z, &Z));
    }

    #[test]
    fn single_linear_tap_s93() {
        assert!(pre_output(&with(&[93]), &Z));
    }

    #[test]
    fn b12_s8_monomial() {
        assert!(filter(&with(&[8]), &with(&[12])));
        assert!(pre_output(&with(&[8]), &with(&[12])));
    }

    #[test]
    fn g_has_29_inputs_h_has_9() {
        let mut g: Vec<usize> = G_LINEAR.to_vec();
        g.extend(G_PRODUCTS.iter().flat_map(|t| t.iter().copied()));
        g.sort_unstable();
        g.dedup();
        assert_eq!(g.len(), 29);

        let mut h: Vec<Tap> = H_PRODUCTS.iter().flat_map(|t| t.iter().copied()).collect();
        h.sort_by_key(|t| match *t {
            Tap::S(i) => i,
            Tap::B(i) => 1000 + i,
        });
        h.dedup();
        assert_eq!(h.iter().filter(|t| matches!(t, Tap::S(_))).count(), 7);
        assert_eq!(h.iter().filter(|t| matches!(t, Tap::B(_))).count(), 2);
    }
}
