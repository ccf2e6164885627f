#![allow(dead_code)]

use mccdma::channel::{superpose, ActivityVector, ChannelState, ReceivedFrame};
use mccdma::codebook::{build_codebook, design_shift_pattern, Codebook, SequenceMatrix, ShiftPattern};
use mccdma::phy_tx::{psk_modulate, spread_conventional, spread_direct, SpreadFrame};
use mccdma::linalg::dist_sqr;
use mccdma::Complex64;
use rand::Rng;

pub fn greedy_codebooks(seqs: &SequenceMatrix, order: usize) -> (Vec<Codebook>, Vec<ShiftPattern>) {
    let cbs: Vec<Codebook> = (0..seqs.users())
        .map(|k| {
            let s = seqs.sequence(k);
            build_codebook(&s, &design_shift_pattern(&s, order).unwrap()).unwrap()
        })
        .collect();
    let pats = cbs.iter().map(|c| c.pattern().clone()).collect();
    (cbs, pats)
}

/// Random symbols for each active user.
pub fn random_symbols<R: Rng>(rng: &mut R, active: &[usize], order: usize, len: usize) -> Vec<(usize, Vec<usize>)> {
    active
        .iter()
        .map(|&k| (k, (0..len).map(|_| rng.random_range(0..order)).collect()))
        .collect()
}

/// Noiseless received frame for the direct scheme.
pub fn direct_frame(
    cbs: &[Codebook],
    users: &[(usize, Vec<usize>)],
    channel: &[ChannelState],
    total_users: usize,
    len: usize,
) -> ReceivedFrame {
    let frames: Vec<(usize, SpreadFrame)> = users
        .iter()
        .map(|(k, d)| (*k, spread_direct(d, &cbs[*k]).unwrap()))
        .collect();
    let refs: Vec<(usize, &SpreadFrame)> = frames.iter().map(|(k, f)| (*k, f)).collect();
    let active: Vec<usize> = users.iter().map(|(k, _)| *k).collect();
    let act = ActivityVector::from_active(total_users, &active).unwrap();
    superpose(&refs, channel, &act, cbs[0].seq_len(), len).unwrap()
}

/// Noiseless received frame for the conventional scheme.
pub fn conventional_frame(
    seqs: &SequenceMatrix,
    users: &[(usize, Vec<usize>)],
    channel: &[ChannelState],
    order: usize,
    len: usize,
) -> ReceivedFrame {
    let frames: Vec<(usize, SpreadFrame)> = users
        .iter()
        .map(|(k, d)| (*k, spread_conventional(&psk_modulate(d, order).unwrap(), &seqs.sequence(*k))))
        .collect();
    let refs: Vec<(usize, &SpreadFrame)> = frames.iter().map(|(k, f)| (*k, f)).collect();
    let active: Vec<usize> = users.iter().map(|(k, _)| *k).collect();
    let act = ActivityVector::from_active(seqs.users(), &active).unwrap();
    superpose(&refs, channel, &act, seqs.seq_len(), len).unwrap()
}

/// Distinct users drawn uniformly.
pub fn pick_users<R: Rng>(rng: &mut R, total: usize, count: usize) -> Vec<usize> {
    let mut v = rand::seq::index::sample(rng, total, count).into_vec();
    v.sort_unstable();
    v
}

/// Exhaustive joint maximum-likelihood search over every `ka`-subset of
/// users and every symbol combination, for a single fading block.
/// Returns `(squared residual, users ascending, symbols[user][l])`.
pub fn ml_search(y: &ReceivedFrame, cbs: &[Codebook], state: &ChannelState, ka: usize) -> (f64, Vec<usize>, Vec<Vec<usize>>) {
    let users = cbs.len();
    let order = cbs[0].order();
    let n = cbs[0].seq_len();
    let eff = |k: usize, m: usize| -> Vec<Complex64> {
        cbs[k].codeword(m).iter().zip(state.user(k)).map(|(c, h)| c * h).collect()
    };
    let mut best = (f64::INFINITY, Vec::new(), Vec::new());
    for set in subsets(users, ka) {
        let mut cost = 0.0;
        let mut syms = vec![Vec::new(); ka];
        for l in 0..y.symbols() {
            let mut bl = (f64::INFINITY, vec![0; ka]);
            for combo in 0..order.pow(ka as u32) {
                let digits: Vec<usize> = (0..ka).map(|i| combo / order.pow(i as u32) % order).collect();
                let mut sum = vec![Complex64::default(); n];
                for (&k, &m) in set.iter().zip(&digits) {
                    for (s, e) in sum.iter_mut().zip(eff(k, m)) {
                        *s += e;
                    }
                }
                let d = dist_sqr(&sum, y.column(l));
                if d < bl.0 {
                    bl = (d, digits);
                }
            }
            cost += bl.0;
            for (s, m) in syms.iter_mut().zip(bl.1) {
                s.push(m);
            }
        }
        if cost < best.0 {
            best = (cost, set, syms);
        }
    }
    best
}

/// All `size`-subsets of `0..total`, each ascending.
pub fn subsets(total: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    (size - 1..total)
        .flat_map(|last| {
            subsets(last, size - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}
