//! Modified group matching pursuit.

use num_complex::Complex64;

use super::{check_patterns, check_problem, ActivityMetric, DetectionResult, StoppingRule};
use crate::channel::{ChannelState, ReceivedFrame};
use crate::codebook::{SequenceMatrix, ShiftPattern};
use crate::linalg::{cdot, col, col_mut, dist_sqr, frobenius};
use crate::Result;

/// Effective codewords `h_k .* shift(s_k, p_{k,m})` beyond this many
/// complex entries are rebuilt every iteration instead of cached.
const CACHE_LIMIT: usize = 1 << 22;

/// Shifted base sequences laid out as `[k][m][n]`.
pub(super) fn shifted_codewords(sequences: &SequenceMatrix, patterns: &[ShiftPattern]) -> Vec<Complex64> {
    let n = sequences.seq_len();
    let mut out = Vec::with_capacity(sequences.users() * patterns[0].order() * n);
    for (k, p) in patterns.iter().enumerate() {
        let s = sequences.column(k);
        for &shift in p.shifts() {
            out.extend((0..n).map(|t| s[(t + n - shift) % n]));
        }
    }
    out
}

fn fill_effective(out: &mut [Complex64], shifted: &[Complex64], state: &ChannelState, per_user: usize, n: usize) {
    for k in 0..state.users() {
        let h = state.user(k);
        let base = k * per_user * n;
        for (e, s) in out[base..base + per_user * n]
            .chunks_exact_mut(n)
            .zip(shifted[base..base + per_user * n].chunks_exact(n))
        {
            for ((ei, si), hi) in e.iter_mut().zip(s).zip(h) {
                *ei = hi * si;
            }
        }
    }
}

/// Joint activity and data detection for the direct scheme, scoring
/// activity with [`ActivityMetric::Normalized`].
pub fn gmp_detect(
    received: &ReceivedFrame,
    sequences: &SequenceMatrix,
    channel: &[ChannelState],
    patterns: &[ShiftPattern],
    stop: StoppingRule,
) -> Result<DetectionResult> {
    gmp_detect_with(received, sequences, channel, patterns, stop, ActivityMetric::Normalized)
}

/// [`gmp_detect`] with an explicit activity metric.
///
/// Each iteration:
/// 1. scores every user not yet detected by `sum_l max_m |<h_k .* c_{k,m}, r_l>|`
///    (weighted per fading block as `metric` says) and picks the largest
///    (ties to the lowest index);
/// 2. decides each of that user's symbols as the codeword closest to the
///    residual column;
/// 3. subtracts the chosen codewords from the residual.
///
/// `c_{k,m}` is user `k`'s base sequence shifted by `patterns[k].shifts()[m]`
/// and `h_k` is taken from the fading block of symbol `l`.
pub fn gmp_detect_with(
    received: &ReceivedFrame,
    sequences: &SequenceMatrix,
    channel: &[ChannelState],
    patterns: &[ShiftPattern],
    stop: StoppingRule,
    metric: ActivityMetric,
) -> Result<DetectionResult> {
    let (n, users, ld) = check_problem(received, sequences, channel)?;
    let order = check_patterns(patterns, users, n)?;
    stop.validate(users)?;

    let mut residual = received.y.clone();
    let mut result = DetectionResult::empty(users, ld, order, frobenius(&residual));
    if ld == 0 || stop.residual_small(result.final_residual_norm()) {
        return Ok(result);
    }

    let shifted = shifted_codewords(sequences, patterns);
    let block_len = channel[0].block_len;
    let n_blocks = ld.div_ceil(block_len);
    let block_size = users * order * n;
    let cache = block_size * n_blocks <= CACHE_LIMIT;
    let mut effective: Vec<Vec<Complex64>> = if cache {
        channel[..n_blocks]
            .iter()
            .map(|st| {
                let mut e = vec![Complex64::default(); block_size];
                fill_effective(&mut e, &shifted, st, order, n);
                e
            })
            .collect()
    } else {
        vec![vec![Complex64::default(); block_size]]
    };

    let mut detected = vec![false; users];
    let mut score = vec![0.0f64; users];
    let mut best = vec![0.0f64; block_len];
    let mut candidate = vec![Complex64::default(); n];

    for _ in 0..stop.max_iterations(users) {
        // activity detection
        score.fill(0.0);
        for b in 0..n_blocks {
            let (l0, l1) = (b * block_len, ((b + 1) * block_len).min(ld));
            let eff = if cache {
                &effective[b]
            } else {
                fill_effective(&mut effective[0], &shifted, &channel[b], order, n);
                &effective[0]
            };
            for (k, sc) in score.iter_mut().enumerate() {
                let best = &mut best[..l1 - l0];
                best.fill(0.0);
                for m in 0..order {
                    let e = &eff[(k * order + m) * n..(k * order + m + 1) * n];
                    for (bl, l) in best.iter_mut().zip(l0..l1) {
                        let c = cdot(e, col(&residual, l)).norm_sqr();
                        if c > *bl {
                            *bl = c;
                        }
                    }
                }
                *sc += metric.weight(channel[b].user(k)) * best.iter().map(|c| c.sqrt()).sum::<f64>();
            }
            let span = (l1 - l0) as u64;
            result.op_counts.multiplications += span * (users * order * n) as u64;
            result.op_counts.additions += span * users as u64;
        }
        let mut pick = None;
        let mut pick_score = f64::NEG_INFINITY;
        for (k, &sc) in score.iter().enumerate() {
            if !detected[k] && sc > pick_score {
                pick_score = sc;
                pick = Some(k);
            }
        }
        let Some(user) = pick else { break };
        detected[user] = true;
        result.active_set.push(user);

        // data detection and residual update
        for l in 0..ld {
            let h = channel[l / block_len].user(user);
            let r = col_mut(&mut residual, l);
            let mut best_m = 0;
            let mut best_d = f64::INFINITY;
            for m in 0..order {
                let s = &shifted[(user * order + m) * n..(user * order + m + 1) * n];
                for ((c, hi), si) in candidate.iter_mut().zip(h).zip(s) {
                    *c = hi * si;
                }
                let d = dist_sqr(&candidate, r);
                if d < best_d {
                    best_d = d;
                    best_m = m;
                }
            }
            result.symbols[user][l] = best_m;
            let s = &shifted[(user * order + best_m) * n..(user * order + best_m + 1) * n];
            for ((ri, hi), si) in r.iter_mut().zip(h).zip(s) {
                *ri -= hi * si;
            }
        }
        result.op_counts.additions += (ld * (order * n + n)) as u64;

        let norm = frobenius(&residual);
        result.residual_norm_history.push(norm);
        if stop.residual_small(norm) {
            break;
        }
    }
    Ok(result)
}
