use mccdma::harness::{run_sweep, run_trial, write_csv, Setup, SimConfig, CSV_HEADER};
use mccdma::phy_tx::Scheme;

fn config(extra: &str) -> SimConfig {
    SimConfig::from_toml_str(&format!(
        "users = 48\nseq_len = 16\norder = 4\np_active = 0.06\ninfo_bits = 40\ntaps = 2\nframes = 40\nsnr_db = [4.0, 10.0]\n{extra}"
    ))
    .unwrap()
}

fn csv(cfg: &SimConfig) -> Vec<u8> {
    let res = run_sweep(cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &res.rows, cfg.seed).unwrap();
    buf
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let cfg = config("seed = 12");
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| csv(&cfg));
    let b = four.install(|| csv(&cfg));
    let c = csv(&cfg);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(String::from_utf8(a).unwrap().starts_with(CSV_HEADER));
}

#[test]
fn different_seeds_give_different_results() {
    assert_ne!(csv(&config("seed = 1")), csv(&config("seed = 2")));
}

#[test]
fn accounting_closes() {
    let cfg = config("");
    let setup = Setup::new(cfg.clone()).unwrap();
    let active: u64 = (0..cfg.frames as u64).map(|t| run_trial(&setup, t).unwrap().active.len() as u64).sum();
    let res = run_sweep(&cfg).unwrap();
    assert_eq!(res.rows.len(), 4);
    for r in &res.rows {
        assert_eq!(r.bits, active * cfg.info_bits as u64);
        assert!(r.bit_errors <= r.bits);
        assert_eq!(r.ber, r.bit_errors as f64 / r.bits as f64);
        assert_eq!(r.lambda, 3.0);
        for rate in [r.ber, r.fer, r.md_rate, r.fa_rate] {
            assert!((0.0..=1.0).contains(&rate));
        }
    }
}

#[test]
fn noiseless_single_user_frames_are_error_free() {
    let mut cfg = config("forced_active = 1");
    cfg.snr_db = vec![f64::INFINITY];
    cfg.frames = 10;
    let res = run_sweep(&cfg).unwrap();
    for r in &res.rows {
        assert_eq!((r.bits, r.bit_errors, r.md_rate, r.fa_rate), (400, 0, 0.0, 0.0));
    }
}

#[test]
fn silent_system_only_reports_false_alarms() {
    let mut cfg = config("");
    cfg.p_active = 0.0;
    cfg.frames = 5;
    let res = run_sweep(&cfg).unwrap();
    for r in &res.rows {
        assert_eq!((r.bits, r.bit_errors, r.ber), (0, 0, 0.0));
        assert!(r.fa_rate >= 0.0);
    }
}

/// BER falls with SNR once every point has enough bits; checked with a
/// one-sided slack of two standard errors.
#[test]
fn ber_does_not_increase_with_snr() {
    let cfg = SimConfig::from_toml_str(
        "users = 64\nseq_len = 16\norder = 4\nforced_active = 2\nframes = 520\nstop = \"oracle\"\nsnr_db = [0.0, 2.0, 4.0, 6.0]\ntaps = 2\nseed = 3",
    )
    .unwrap();
    let res = run_sweep(&cfg).unwrap();
    for scheme in [Scheme::Direct, Scheme::Conventional] {
        let rows: Vec<_> = res.rows.iter().filter(|r| r.scheme == scheme).collect();
        for w in rows.windows(2) {
            assert!(w[0].bits >= 100_000);
            let slack = 2.0 * (w[0].ber_se.powi(2) + w[1].ber_se.powi(2)).sqrt();
            assert!(w[1].ber <= w[0].ber + slack, "{scheme}: {} -> {}", w[0].ber, w[1].ber);
        }
    }
}
