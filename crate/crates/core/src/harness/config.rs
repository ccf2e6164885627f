//! Sweep configuration.
//!
//! A config file is flat TOML, one key per field. Every key is optional;
//! unknown keys are rejected. Example:
//!
//! ```toml
//! users = 320
//! seq_len = 32
//! order = 8
//! p_active = 0.01
//! snr_db = [4.0, 6.0, 8.0]
//! frames = 2000
//! scheme = "both"
//! seed = 7
//! ```
//!
//! `snr_db` is `Eb/N0` per information bit, so the noise variance per
//! complex chip is `1 / (R * log2(M) * 10^(snr/10))` with `R = L / L_c`
//! (see [`crate::channel::noise_variance`]). `inf` means no noise.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::phy_tx::{bits_per_symbol, coded_len, symbols_for_bits, Scheme};
use crate::rx_mud::ActivityMetric;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeSelection {
    Direct,
    Conventional,
    Both,
}

impl SchemeSelection {
    pub fn name(self) -> &'static str {
        match self {
            SchemeSelection::Direct => "direct",
            SchemeSelection::Conventional => "conventional",
            SchemeSelection::Both => "both",
        }
    }

    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeSelection::Direct => vec![Scheme::Direct],
            SchemeSelection::Conventional => vec![Scheme::Conventional],
            SchemeSelection::Both => vec![Scheme::Direct, Scheme::Conventional],
        }
    }
}

impl std::str::FromStr for SchemeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SchemeSelection::Direct),
            "conventional" => Ok(SchemeSelection::Conventional),
            "both" => Ok(SchemeSelection::Both),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

/// How the receiver decides to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopMode {
    /// Residual norm against `sqrt(N L_d sigma^2) (1 + gamma_delta)`.
    Threshold,
    /// The true number of active users is given to the receiver.
    Oracle,
}

impl StopMode {
    pub fn name(self) -> &'static str {
        match self {
            StopMode::Threshold => "threshold",
            StopMode::Oracle => "oracle",
        }
    }
}

/// How each user's shift pattern is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternMode {
    Greedy,
    Random,
}

impl PatternMode {
    pub fn name(self) -> &'static str {
        match self {
            PatternMode::Greedy => "greedy",
            PatternMode::Random => "random",
        }
    }
}

/// Seeds of the independent random streams. A missing seed is derived
/// from the base seed, so a config with only `seed` is still fully
/// reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub sequence: u64,
    pub pattern: u64,
    pub activity: u64,
    pub data: u64,
    pub channel: u64,
    pub noise: u64,
    pub interleaver: u64,
}

impl Seeds {
    pub fn derived(base: u64) -> Self {
        Self {
            sequence: mix(base, 1),
            pattern: mix(base, 2),
            activity: mix(base, 3),
            data: mix(base, 4),
            channel: mix(base, 5),
            noise: mix(base, 6),
            interleaver: mix(base, 7),
        }
    }
}

/// SplitMix64 finalizer over `a` and `b`; used to derive independent
/// stream seeds from a base seed and an index.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_add(b.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Everything a sweep needs, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    /// `K`, potential users.
    pub users: usize,
    /// `N`, subcarriers and sequence length.
    pub seq_len: usize,
    /// `M`, codebook size / PSK order.
    pub order: usize,
    /// Bernoulli activity probability `p_a`.
    pub p_active: f64,
    /// When set, exactly this many users are active in every frame.
    pub forced_active: Option<usize>,
    /// `L`, information bits per active user and frame.
    pub info_bits: usize,
    pub snr_db: Vec<f64>,
    pub frames: usize,
    pub scheme: SchemeSelection,
    pub stop: StopMode,
    pub gamma_delta: f64,
    pub activity_metric: ActivityMetric,
    pub pattern: PatternMode,
    pub taps: usize,
    pub decay: f64,
    pub block_len: usize,
    pub seed: u64,
    pub seeds: Seeds,
    pub out_dir: PathBuf,
    /// Detailed traces are written for trials `0..trace_frames`.
    pub trace_frames: usize,
    /// Constant `c` of the measurement-sufficiency advisory.
    pub sufficiency_c: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let seed = 1;
        Self {
            users: 320,
            seq_len: 32,
            order: 8,
            p_active: 0.01,
            forced_active: None,
            info_bits: 100,
            snr_db: vec![0.0, 2.0, 4.0, 6.0, 8.0],
            frames: 200,
            scheme: SchemeSelection::Both,
            stop: StopMode::Threshold,
            gamma_delta: 0.1,
            activity_metric: ActivityMetric::Normalized,
            pattern: PatternMode::Greedy,
            taps: 4,
            decay: 2.0,
            block_len: 10,
            seed,
            seeds: Seeds::derived(seed),
            out_dir: PathBuf::from("out"),
            trace_frames: 0,
            sufficiency_c: 1.0,
        }
    }
}

/// On-disk form: every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    users: Option<usize>,
    seq_len: Option<usize>,
    order: Option<usize>,
    p_active: Option<f64>,
    forced_active: Option<usize>,
    info_bits: Option<usize>,
    snr_db: Option<Vec<f64>>,
    frames: Option<usize>,
    scheme: Option<SchemeSelection>,
    stop: Option<StopMode>,
    gamma_delta: Option<f64>,
    activity_metric: Option<ActivityMetric>,
    pattern: Option<PatternMode>,
    taps: Option<usize>,
    decay: Option<f64>,
    block_len: Option<usize>,
    seed: Option<u64>,
    seed_sequence: Option<u64>,
    seed_pattern: Option<u64>,
    seed_activity: Option<u64>,
    seed_data: Option<u64>,
    seed_channel: Option<u64>,
    seed_noise: Option<u64>,
    seed_interleaver: Option<u64>,
    out_dir: Option<PathBuf>,
    trace_frames: Option<usize>,
    sufficiency_c: Option<f64>,
}

impl SimConfig {
    /// Default config at Table II scale.
    pub fn paper_scale() -> Self {
        let mut cfg = Self::default();
        cfg.apply_paper_scale();
        cfg
    }

    /// Overrides the system dimensions with the Table II values: 1390
    /// users on 139 subcarriers, `p_a = 0.01`, 100-bit frames, 14-tap
    /// channels fading every 10 OFDM symbols. Grid, seeds and receiver
    /// options are kept.
    pub fn apply_paper_scale(&mut self) {
        self.users = 1390;
        self.seq_len = 139;
        self.p_active = 0.01;
        self.info_bits = 100;
        self.taps = 14;
        self.block_len = 10;
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_base(text, Self::default())
    }

    /// Parses `text` on top of `base`, so presets can be combined with a
    /// file.
    pub fn from_toml_with_base(text: &str, base: Self) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = base;
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = raw.$f { cfg.$f = v; })* };
        }
        take!(
            users, seq_len, order, p_active, info_bits, snr_db, frames, scheme, stop, gamma_delta,
            activity_metric, pattern, taps, decay, block_len, out_dir, trace_frames, sufficiency_c
        );
        if raw.forced_active.is_some() {
            cfg.forced_active = raw.forced_active;
        }
        if let Some(seed) = raw.seed {
            cfg.set_seed(seed);
        }
        let s = &mut cfg.seeds;
        macro_rules! seed {
            ($($raw:ident => $f:ident),*) => { $(if let Some(v) = raw.$raw { s.$f = v; })* };
        }
        seed!(
            seed_sequence => sequence,
            seed_pattern => pattern,
            seed_activity => activity,
            seed_data => data,
            seed_channel => channel,
            seed_noise => noise,
            seed_interleaver => interleaver
        );
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with_base(path, Self::default())
    }

    pub fn load_with_base(path: &Path, base: Self) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_with_base(&text, base)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Replaces the base seed and re-derives every stream seed.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.seeds = Seeds::derived(seed);
    }

    /// Overloading factor `K / N`.
    pub fn lambda(&self) -> f64 {
        self.users as f64 / self.seq_len as f64
    }

    pub fn coded_len(&self) -> usize {
        coded_len(self.info_bits)
    }

    /// `L_d`, OFDM symbols per frame.
    pub fn frame_symbols(&self) -> usize {
        symbols_for_bits(self.coded_len(), self.order).expect("order validated")
    }

    /// Code rate `L / L_c`.
    pub fn code_rate(&self) -> f64 {
        self.info_bits as f64 / self.coded_len() as f64
    }

    pub fn schemes(&self) -> Vec<Scheme> {
        self.scheme.schemes()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.users == 0 || self.seq_len == 0 {
            return bad("users and seq_len must be positive".into());
        }
        bits_per_symbol(self.order).map_err(|e| Error::Config(e.to_string()))?;
        if self.order > self.seq_len {
            return bad(format!("order {} exceeds seq_len {}", self.order, self.seq_len));
        }
        if !(0.0..=1.0).contains(&self.p_active) {
            return bad(format!("p_active {} outside [0, 1]", self.p_active));
        }
        if let Some(n) = self.forced_active {
            if n > self.users {
                return bad(format!("forced_active {n} exceeds users {}", self.users));
            }
        }
        if self.info_bits == 0 {
            return bad("info_bits must be positive".into());
        }
        if self.snr_db.is_empty() {
            return bad("snr_db grid is empty".into());
        }
        if let Some(s) = self.snr_db.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return bad(format!("snr_db entry {s} is not a finite value or +inf"));
        }
        if self.taps == 0 || self.taps > self.seq_len {
            return bad(format!("taps {} must lie in 1..={}", self.taps, self.seq_len));
        }
        if !(self.decay >= 0.0) || !self.decay.is_finite() {
            return bad(format!("decay {} must be a finite non-negative number", self.decay));
        }
        if self.block_len == 0 {
            return bad("block_len must be positive".into());
        }
        if !(self.gamma_delta >= 0.0) {
            return bad(format!("gamma_delta {} must be non-negative", self.gamma_delta));
        }
        if !(self.sufficiency_c > 0.0) {
            return bad(format!("sufficiency_c {} must be positive", self.sufficiency_c));
        }
        Ok(())
    }

    /// Resolved config as TOML in the same flat layout the loader reads.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let q = |s: &str| format!("{s:?}");
        let f = |x: f64| {
            if x == f64::INFINITY {
                "inf".to_string()
            } else {
                format!("{x:?}")
            }
        };
        kv("users", self.users.to_string());
        kv("seq_len", self.seq_len.to_string());
        kv("order", self.order.to_string());
        kv("p_active", f(self.p_active));
        if let Some(n) = self.forced_active {
            kv("forced_active", n.to_string());
        }
        kv("info_bits", self.info_bits.to_string());
        let grid: Vec<String> = self.snr_db.iter().map(|&x| f(x)).collect();
        kv("snr_db", format!("[{}]", grid.join(", ")));
        kv("frames", self.frames.to_string());
        kv("scheme", q(self.scheme.name()));
        kv("stop", q(self.stop.name()));
        kv("gamma_delta", f(self.gamma_delta));
        kv("activity_metric", q(self.activity_metric.name()));
        kv("pattern", q(self.pattern.name()));
        kv("taps", self.taps.to_string());
        kv("decay", f(self.decay));
        kv("block_len", self.block_len.to_string());
        kv("seed", self.seed.to_string());
        let s = &self.seeds;
        kv("seed_sequence", s.sequence.to_string());
        kv("seed_pattern", s.pattern.to_string());
        kv("seed_activity", s.activity.to_string());
        kv("seed_data", s.data.to_string());
        kv("seed_channel", s.channel.to_string());
        kv("seed_noise", s.noise.to_string());
        kv("seed_interleaver", s.interleaver.to_string());
        kv("out_dir", q(&self.out_dir.display().to_string()));
        kv("trace_frames", self.trace_frames.to_string());
        kv("sufficiency_c", f(self.sufficiency_c));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_keep_overload_factor_ten() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.lambda(), 10.0);
        assert_eq!(SimConfig::paper_scale().lambda(), 10.0);
        assert_eq!(cfg.frame_symbols(), 71);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = SimConfig::from_toml_str("users = 10\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn base_seed_derives_all_streams() {
        let a = SimConfig::from_toml_str("seed = 5").unwrap();
        let b = SimConfig::from_toml_str("seed = 5\nseed_noise = 99").unwrap();
        assert_eq!(a.seeds.channel, b.seeds.channel);
        assert_eq!(b.seeds.noise, 99);
        assert_ne!(a.seeds.noise, a.seeds.channel);
    }

    #[test]
    fn resolved_toml_round_trips() {
        let mut cfg = SimConfig::from_toml_str(
            "order = 4\nsnr_db = [1.5, inf]\nscheme = \"direct\"\nstop = \"oracle\"\nforced_active = 2",
        )
        .unwrap();
        cfg.seeds.noise = 3;
        let back = SimConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for text in [
            "order = 3",
            "p_active = 1.5",
            "snr_db = []",
            "taps = 0",
            "seq_len = 4\norder = 8",
            "forced_active = 400",
        ] {
            assert!(SimConfig::from_toml_str(text).is_err(), "{text}");
        }
    }
}
