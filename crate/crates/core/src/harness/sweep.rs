//! Sweeps: many trials, aggregated per `(scheme, snr)`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SimConfig;
use super::trial::{run_trial, Outcome, Setup, TraceEntry, TrialRecord};
use crate::phy_tx::Scheme;
use crate::Result;

/// Aggregated metrics of one `(scheme, snr)` point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub order: usize,
    pub p_active: f64,
    pub snr_db: f64,
    pub lambda: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    /// `bit_errors / bits`, 0 when no bits were sent.
    pub ber: f64,
    /// Standard error of `ber`, treating frames as independent clusters
    /// (errors inside a frame are strongly correlated).
    pub ber_se: f64,
    /// Fraction of active user frames with at least one bit error.
    pub fer: f64,
    /// Missed detections per active user.
    pub md_rate: f64,
    /// False alarms per inactive user.
    pub fa_rate: f64,
    pub mean_active: f64,
    pub mean_mults: f64,
    pub mean_adds: f64,
    pub mean_pinvs: f64,
    /// Detection and decoding time summed over frames, in seconds. Not
    /// part of any reproducible output.
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub traces: Vec<TraceEntry>,
    pub wall_seconds: f64,
}

impl SweepResult {
    pub fn row(&self, scheme: Scheme, snr_db: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.snr_db == snr_db)
    }
}

/// Running sums for one point; folded in trial order so results do not
/// depend on scheduling.
#[derive(Debug, Default, Clone)]
struct Accumulator {
    frames: u64,
    active: u64,
    total: Outcome,
    mults: f64,
    adds: f64,
    pinvs: f64,
    // for the clustered standard error
    e2: f64,
    b2: f64,
    eb: f64,
}

impl Accumulator {
    fn add(&mut self, o: &Outcome, active: usize) {
        self.frames += 1;
        self.active += active as u64;
        let t = &mut self.total;
        t.bits += o.bits;
        t.bit_errors += o.bit_errors;
        t.packets += o.packets;
        t.packet_errors += o.packet_errors;
        t.missed += o.missed;
        t.false_alarms += o.false_alarms;
        t.inactive += o.inactive;
        t.seconds += o.seconds;
        self.mults += o.ops.multiplications as f64;
        self.adds += o.ops.additions as f64;
        self.pinvs += o.ops.pseudoinverses as f64;
        let (e, b) = (o.bit_errors as f64, o.bits as f64);
        self.e2 += e * e;
        self.b2 += b * b;
        self.eb += e * b;
    }

    fn row(&self, cfg: &SimConfig, scheme: Scheme, snr_db: f64) -> SweepRow {
        let t = &self.total;
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let ber = ratio(t.bit_errors, t.bits);
        let n = self.frames as f64;
        let ber_se = if self.frames > 1 && t.bits > 0 {
            let ss = (self.e2 - 2.0 * ber * self.eb + ber * ber * self.b2).max(0.0);
            let mean_bits = t.bits as f64 / n;
            (ss / (n * (n - 1.0))).sqrt() / mean_bits
        } else {
            0.0
        };
        let per_frame = |x: f64| if self.frames == 0 { 0.0 } else { x / n };
        SweepRow {
            scheme,
            order: cfg.order,
            p_active: cfg.p_active,
            snr_db,
            lambda: cfg.lambda(),
            frames: self.frames,
            bits: t.bits,
            bit_errors: t.bit_errors,
            ber,
            ber_se,
            fer: ratio(t.packet_errors, t.packets),
            md_rate: ratio(t.missed, t.packets),
            fa_rate: ratio(t.false_alarms, t.inactive),
            mean_active: per_frame(self.active as f64),
            mean_mults: per_frame(self.mults),
            mean_adds: per_frame(self.adds),
            mean_pinvs: per_frame(self.pinvs),
            seconds: t.seconds,
        }
    }
}

/// Runs `cfg.frames` trials in parallel and aggregates them.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepResult> {
    let setup = Setup::new(cfg.clone())?;
    run_sweep_with(&setup)
}

/// [`run_sweep`] reusing precomputed sequences and codebooks.
pub fn run_sweep_with(setup: &Setup) -> Result<SweepResult> {
    let cfg = &setup.cfg;
    let started = Instant::now();
    let records: Vec<TrialRecord> = (0..cfg.frames as u64)
        .into_par_iter()
        .map(|t| run_trial(setup, t))
        .collect::<Result<_>>()?;

    let schemes = cfg.schemes();
    let mut acc = vec![vec![Accumulator::default(); cfg.snr_db.len()]; schemes.len()];
    let mut traces = Vec::new();
    for rec in records {
        for (a_s, o_s) in acc.iter_mut().zip(&rec.outcomes) {
            for (a, o) in a_s.iter_mut().zip(o_s) {
                a.add(o, rec.active.len());
            }
        }
        traces.extend(rec.traces);
    }
    let rows = schemes
        .iter()
        .zip(&acc)
        .flat_map(|(&scheme, a_s)| {
            a_s.iter()
                .zip(&cfg.snr_db)
                .map(move |(a, &snr)| a.row(cfg, scheme, snr))
        })
        .collect();
    let wall_seconds = started.elapsed().as_secs_f64();
    log::info!("{} frames in {wall_seconds:.1} s", cfg.frames);
    Ok(SweepResult {
        rows,
        traces,
        wall_seconds,
    })
}
