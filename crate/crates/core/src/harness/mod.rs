//! Monte-Carlo harness: configuration, trials, sweeps and output files.

mod config;
mod output;
mod sweep;
mod trial;

pub use config::{mix, PatternMode, SchemeSelection, Seeds, SimConfig, StopMode};
pub use output::{write_csv, write_manifest, write_outputs, write_plot_data, write_traces, OutputFiles, CSV_HEADER};
pub use sweep::{run_sweep, run_sweep_with, SweepResult, SweepRow};
pub use trial::{run_trial, Outcome, Setup, TraceEntry, TrialRecord};

/// Result of the measurement-count advisory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sufficiency {
    /// `c * K_a * ln(M K)`.
    pub bound: f64,
    /// Whether `N` meets the bound.
    pub sufficient: bool,
}

/// Checks `N >= c * K_a * ln(M K)`, the order of measurements greedy
/// recovery of `K_a`-sparse signals from `M K` candidates needs. Advisory
/// only; nothing refuses to run when it fails.
pub fn measurement_sufficiency(seq_len: usize, active: usize, users: usize, order: usize, c: f64) -> Sufficiency {
    let bound = if active == 0 {
        0.0
    } else {
        c * active as f64 * ((order * users) as f64).ln()
    };
    Sufficiency {
        bound,
        sufficient: seq_len as f64 >= bound,
    }
}

/// Expected active users rounded up, `ceil(p_a K)`.
pub fn expected_active(cfg: &SimConfig) -> usize {
    match cfg.forced_active {
        Some(n) => n,
        None => (cfg.p_active * cfg.users as f64).ceil() as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_two_parameters_are_sufficient() {
        let s = measurement_sufficiency(139, 14, 1390, 8, 1.0);
        let oracle = 14.0 * 11120f64.ln();
        assert!((s.bound - oracle).abs() < 1e-9);
        assert!((s.bound - 130.4).abs() < 0.05);
        assert!(s.sufficient);
        assert_eq!(expected_active(&SimConfig::paper_scale()), 14);
    }

    #[test]
    fn advisory_edges() {
        assert_eq!(measurement_sufficiency(10, 0, 100, 8, 1.0), Sufficiency { bound: 0.0, sufficient: true });
        assert!(!measurement_sufficiency(139, 14, 1390, 8, 10.0).sufficient);
    }
}
