use crate::phy_tx::{branch_output, coded_len, next_state, STATES, TAIL_BITS};
use crate::{Bit, Error, Result};

/// Hard-decision maximum-likelihood decoding of a terminated 133/171
/// codeword carrying `info_len` information bits.
///
/// Path metrics are Hamming distances; the trellis starts and ends in
/// state 0. Equal metrics keep the predecessor with the lower index.
pub fn viterbi_decode(coded: &[Bit], info_len: usize) -> Result<Vec<Bit>> {
    let expected = coded_len(info_len);
    if coded.len() != expected {
        return Err(Error::DimensionMismatch {
            what: "coded block length",
            expected,
            got: coded.len(),
        });
    }
    let steps = info_len + TAIL_BITS;
    // predecessors of state s are (2s mod 64) and (2s mod 64) + 1, both
    // reached with input bit s >> 5
    let mut outputs = [[[0u8; 2]; 2]; STATES];
    for (s, out) in outputs.iter_mut().enumerate() {
        let input = (s >> (TAIL_BITS - 1)) as Bit;
        let p0 = (s << 1) & (STATES - 1);
        for (j, o) in out.iter_mut().enumerate() {
            debug_assert_eq!(next_state(p0 | j, input), s);
            *o = branch_output(p0 | j, input);
        }
    }

    const INF: u32 = u32::MAX / 2;
    let mut metric = [INF; STATES];
    metric[0] = 0;
    let mut next = [INF; STATES];
    let mut decisions = vec![0u64; steps];
    for (t, pair) in coded.chunks_exact(2).enumerate() {
        let mut dec = 0u64;
        for s in 0..STATES {
            let p0 = (s << 1) & (STATES - 1);
            let cost = |o: [u8; 2]| ((o[0] ^ pair[0]) + (o[1] ^ pair[1])) as u32;
            let m0 = metric[p0] + cost(outputs[s][0]);
            let m1 = metric[p0 | 1] + cost(outputs[s][1]);
            if m1 < m0 {
                next[s] = m1;
                dec |= 1 << s;
            } else {
                next[s] = m0;
            }
        }
        decisions[t] = dec;
        std::mem::swap(&mut metric, &mut next);
    }

    let mut bits = vec![0; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (state >> (TAIL_BITS - 1)) as Bit;
        let j = (decisions[t] >> state) & 1;
        state = ((state << 1) & (STATES - 1)) | j as usize;
    }
    debug_assert_eq!(state, 0);
    bits.truncate(info_len);
    Ok(bits)
}
