mod common;

use common::*;
use mccdma::channel::{add_noise, generate_block_fading, FadingProfile};
use mccdma::codebook::generate_base_sequences;
use mccdma::phy_tx::Scheme;
use mccdma::rx_mud::{count_expected_ops, gmp_detect, gomp_detect, StoppingRule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Runs both detectors on a random noisy frame and returns the counted
/// operations next to the closed-form ones for the iterations actually run.
fn instrumented(order: usize, ka: usize, n: usize, k: usize, ld: usize, seed: u64) {
    let seqs = generate_base_sequences(k, n, seed).unwrap();
    let (cbs, pats) = greedy_codebooks(&seqs, order);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let active = pick_users(&mut rng, k, ka);
    let users = random_symbols(&mut rng, &active, order, ld);
    let blocks = ld.div_ceil(4);
    let ch = generate_block_fading(k, n, blocks, 4, FadingProfile { taps: 2, decay: 2.0 }, seed).unwrap();
    let stop = StoppingRule::Oracle { active: ka };

    let y = add_noise(direct_frame(&cbs, &users, &ch, k, ld), 0.01, seed);
    let r = gmp_detect(&y, &seqs, &ch, &pats, stop).unwrap();
    assert_eq!(r.op_counts, count_expected_ops(order, ld, ka, n, k, Scheme::Direct));

    let y = add_noise(conventional_frame(&seqs, &users, &ch, order, ld), 0.01, seed);
    let r = gomp_detect(&y, &seqs, &ch, stop, order).unwrap();
    assert_eq!(r.op_counts, count_expected_ops(order, ld, ka, n, k, Scheme::Conventional));
}

#[test]
fn counters_match_formulas_on_a_fixed_grid() {
    for &(m, ka, n, k) in &[(2, 1, 8, 16), (4, 2, 16, 64), (8, 5, 32, 64), (8, 1, 8, 16)] {
        instrumented(m, ka, n, k, 7, 1);
    }
}

#[test]
fn threshold_runs_count_the_iterations_performed() {
    let (m, n, k, ld) = (4, 16, 30, 9);
    let seqs = generate_base_sequences(k, n, 4).unwrap();
    let (cbs, pats) = greedy_codebooks(&seqs, m);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let active = pick_users(&mut rng, k, 2);
    let users = random_symbols(&mut rng, &active, m, ld);
    let ch = generate_block_fading(k, n, 1, 10, FadingProfile { taps: 1, decay: 2.0 }, 4).unwrap();
    let y = add_noise(direct_frame(&cbs, &users, &ch, k, ld), 1e-3, 4);
    let r = gmp_detect(&y, &seqs, &ch, &pats, StoppingRule::noise_threshold(n, ld, 1e-3, 0.1)).unwrap();
    let q = r.active_set.len();
    assert_eq!(r.residual_norm_history.len(), q + 1);
    assert_eq!(r.op_counts, count_expected_ops(m, ld, q, n, k, Scheme::Direct));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counters_match_formulas(
        m in prop::sample::select(vec![2usize, 4, 8]),
        ka in prop::sample::select(vec![1usize, 2, 5]),
        n in prop::sample::select(vec![8usize, 16, 32]),
        k in prop::sample::select(vec![16usize, 64]),
        ld in 1usize..12,
        seed in 0u64..1000,
    ) {
        instrumented(m, ka, n, k, ld, seed);
    }
}
