mod common;

use common::*;
use mccdma::channel::{add_noise, ChannelState};
use mccdma::codebook::generate_base_sequences;
use mccdma::rx_mud::{gmp_detect, gomp_detect, StoppingRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn oracle_runs_exactly_the_given_number_of_iterations() {
    let (k, n, ld) = (30, 16, 8);
    let seqs = generate_base_sequences(k, n, 1).unwrap();
    let (cbs, pats) = greedy_codebooks(&seqs, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let active = pick_users(&mut rng, k, 2);
    let users = random_symbols(&mut rng, &active, 4, ld);
    let ch = vec![ChannelState::flat(k, n, 10)];
    let y = direct_frame(&cbs, &users, &ch, k, ld);
    for want in [0, 1, 2, 5] {
        let stop = StoppingRule::Oracle { active: want };
        let r = gmp_detect(&y, &seqs, &ch, &pats, stop).unwrap();
        assert_eq!(r.active_set.len(), want);
        assert_eq!(r.residual_norm_history.len(), want + 1);
        let y2 = conventional_frame(&seqs, &users, &ch, 4, ld);
        let r = gomp_detect(&y2, &seqs, &ch, stop, 4).unwrap();
        assert_eq!(r.active_set.len(), want);
    }
}

#[test]
fn threshold_halts_at_the_first_small_residual() {
    let (k, n, ld) = (30, 16, 8);
    let seqs = generate_base_sequences(k, n, 2).unwrap();
    let (cbs, pats) = greedy_codebooks(&seqs, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let active = pick_users(&mut rng, k, 3);
    let users = random_symbols(&mut rng, &active, 4, ld);
    let ch = vec![ChannelState::flat(k, n, 10)];
    let y = add_noise(direct_frame(&cbs, &users, &ch, k, ld), 1e-4, 3);
    for gamma in [0.05, 1.0, 2.5, 100.0] {
        let r = gmp_detect(&y, &seqs, &ch, &pats, StoppingRule::Threshold { gamma }).unwrap();
        let h = &r.residual_norm_history;
        let last = *h.last().unwrap();
        assert!(last < gamma || r.active_set.len() == k, "gamma {gamma}");
        assert!(h[..h.len() - 1].iter().all(|&x| x >= gamma), "gamma {gamma}: {h:?}");
    }
    let r = gmp_detect(&y, &seqs, &ch, &pats, StoppingRule::noise_threshold(n, ld, 1e-4, 0.1)).unwrap();
    let mut got = r.active_set.clone();
    got.sort_unstable();
    assert_eq!(got, active);
}
