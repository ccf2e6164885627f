//! Group OMP baseline for the conventional scheme.

use num_complex::Complex64;

use super::{check_problem, ActivityMetric, DetectionResult, StoppingRule};
use crate::channel::{ChannelState, ReceivedFrame};
use crate::codebook::SequenceMatrix;
use crate::linalg::{cdot, col, col_mut, frobenius, LeastSquares};
use crate::phy_tx::{bits_per_symbol, psk_demodulate};
use crate::Result;

/// Joint activity and data detection for PSK symbols spread with each
/// user's base sequence, scoring activity with
/// [`ActivityMetric::Normalized`].
pub fn gomp_detect(
    received: &ReceivedFrame,
    sequences: &SequenceMatrix,
    channel: &[ChannelState],
    stop: StoppingRule,
    order: usize,
) -> Result<DetectionResult> {
    gomp_detect_with(received, sequences, channel, stop, order, ActivityMetric::Normalized)
}

/// [`gomp_detect`] with an explicit activity metric.
///
/// Each iteration picks the undetected user maximizing
/// `sum_l |<h_k .* s_k, r_l>|` (weighted per block by `metric`), then re-estimates the complex symbols of
/// all detected users by least squares on every OFDM symbol (one
/// factorization per fading block) and recomputes the residual from `Y`.
/// After the last iteration the final estimates are PSK-demodulated.
pub fn gomp_detect_with(
    received: &ReceivedFrame,
    sequences: &SequenceMatrix,
    channel: &[ChannelState],
    stop: StoppingRule,
    order: usize,
    metric: ActivityMetric,
) -> Result<DetectionResult> {
    let (n, users, ld) = check_problem(received, sequences, channel)?;
    bits_per_symbol(order)?;
    stop.validate(users)?;

    let mut residual = received.y.clone();
    let mut result = DetectionResult::empty(users, ld, order, frobenius(&residual));
    if ld == 0 || stop.residual_small(result.final_residual_norm()) {
        return Ok(result);
    }

    let block_len = channel[0].block_len;
    let n_blocks = ld.div_ceil(block_len);
    // effective signatures h_k .* s_k per block, laid out [b][k][n]
    let effective: Vec<Vec<Complex64>> = channel[..n_blocks]
        .iter()
        .map(|st| {
            let mut e = Vec::with_capacity(users * n);
            for k in 0..users {
                e.extend(st.user(k).iter().zip(sequences.column(k)).map(|(h, s)| h * s));
            }
            e
        })
        .collect();

    let mut detected = vec![false; users];
    let mut score = vec![0.0f64; users];
    let mut estimates: Vec<Vec<Complex64>> = Vec::new();

    for _ in 0..stop.max_iterations(users) {
        score.fill(0.0);
        for (b, eff) in effective.iter().enumerate() {
            let (l0, l1) = (b * block_len, ((b + 1) * block_len).min(ld));
            for (k, sc) in score.iter_mut().enumerate() {
                let a = &eff[k * n..(k + 1) * n];
                let w = metric.weight(channel[b].user(k));
                for l in l0..l1 {
                    *sc += w * cdot(a, col(&residual, l)).norm();
                }
            }
            let span = (l1 - l0) as u64;
            result.op_counts.multiplications += span * (users * n) as u64;
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

        // joint least squares over the detected set
        estimates = vec![vec![Complex64::default(); ld]; result.active_set.len()];
        for (b, eff) in effective.iter().enumerate() {
            let (l0, l1) = (b * block_len, ((b + 1) * block_len).min(ld));
            let cols: Vec<&[Complex64]> = result
                .active_set
                .iter()
                .map(|&k| &eff[k * n..(k + 1) * n])
                .collect();
            let ls = LeastSquares::new(&cols);
            for l in l0..l1 {
                let y = col(&received.y, l);
                let x = ls.solve(y);
                ls.residual(y, &x, col_mut(&mut residual, l));
                for (est, xi) in estimates.iter_mut().zip(x.iter()) {
                    est[l] = *xi;
                }
            }
        }
        result.op_counts.pseudoinverses += 1;
        result.op_counts.additions += (ld * n) as u64;

        let norm = frobenius(&residual);
        result.residual_norm_history.push(norm);
        if stop.residual_small(norm) {
            break;
        }
    }

    let q = result.active_set.len() as u64;
    result.op_counts.multiplications += q * (ld * n) as u64 * (users as u64 + q);

    for (&k, est) in result.active_set.iter().zip(&estimates) {
        for (d, x) in result.symbols[k].iter_mut().zip(est) {
            *d = psk_demodulate(*x, order);
        }
    }
    Ok(result)
}
