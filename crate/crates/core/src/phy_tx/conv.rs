//! Terminated rate-1/2 convolutional code, constraint length 7,
//! generators 133/171 (octal).

use crate::{Bit, Error, Result};

pub const CONSTRAINT_LEN: usize = 7;
/// Zero bits appended to flush the encoder back to state 0.
pub const TAIL_BITS: usize = CONSTRAINT_LEN - 1;
pub const GENERATORS: [u8; 2] = [0o133, 0o171];
pub const STATES: usize = 1 << TAIL_BITS;

#[inline]
fn parity(x: u8) -> Bit {
    (x.count_ones() & 1) as Bit
}

/// Output pair for the 7-bit register `(input << 6) | state`.
#[inline]
pub(crate) fn branch_output(state: usize, input: Bit) -> [Bit; 2] {
    let reg = ((input as usize) << TAIL_BITS | state) as u8;
    [parity(reg & GENERATORS[0]), parity(reg & GENERATORS[1])]
}

#[inline]
pub(crate) fn next_state(state: usize, input: Bit) -> usize {
    ((input as usize) << TAIL_BITS | state) >> 1
}

/// Number of coded bits for `info_len` information bits.
pub fn coded_len(info_len: usize) -> usize {
    2 * (info_len + TAIL_BITS)
}

pub fn conv_encode(info_bits: &[Bit]) -> Result<Vec<Bit>> {
    if info_bits.is_empty() {
        return Err(Error::invalid("cannot encode an empty frame"));
    }
    let mut out = Vec::with_capacity(coded_len(info_bits.len()));
    let mut state = 0usize;
    for &b in info_bits.iter().chain([0; TAIL_BITS].iter()) {
        out.extend_from_slice(&branch_output(state, b & 1));
        state = next_state(state, b & 1);
    }
    debug_assert_eq!(state, 0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Generator taps read from the octal digits, most significant tap
    /// first: the response to a single 1 at time t is tap t.
    fn impulse_response(octal: &str) -> Vec<Bit> {
        let bits: String = octal
            .chars()
            .map(|c| format!("{:03b}", c.to_digit(8).unwrap()))
            .collect();
        // 3 octal digits carry 9 bits; the code has 7 taps
        bits[2..].bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn zero_frame_encodes_to_zeros() {
        let out = conv_encode(&[0; 100]).unwrap();
        assert_eq!(out.len(), 212);
        assert!(out.iter().all(|&b| b == 0));
    }

    #[test]
    fn impulse_gives_generator_taps() {
        let mut input = vec![0; 10];
        input[0] = 1;
        let out = conv_encode(&input).unwrap();
        let g0 = impulse_response("133");
        let g1 = impulse_response("171");
        assert_eq!(g0, vec![1, 0, 1, 1, 0, 1, 1]);
        assert_eq!(g1, vec![1, 1, 1, 1, 0, 0, 1]);
        let expected: Vec<Bit> = g0.iter().zip(&g1).flat_map(|(&a, &b)| [a, b]).collect();
        assert_eq!(&out[..14], expected.as_slice());
        assert!(out[14..].iter().all(|&b| b == 0));
    }

    #[test]
    fn empty_frame_rejected() {
        assert!(conv_encode(&[]).is_err());
    }
}
