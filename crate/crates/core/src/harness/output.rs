//! Result files: CSV, plot data, manifest and detector traces.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::SimConfig;
use super::sweep::{SweepResult, SweepRow};
use super::trial::TraceEntry;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "scheme,M,p_a,snr_db,bits,bit_errors,ber,fer,md_rate,fa_rate,mults,adds,pinvs,seed";

/// Writes the results table. Floats use the shortest representation
/// that round-trips, so equal sweeps give equal bytes.
pub fn write_csv<W: Write>(w: &mut W, rows: &[SweepRow], seed: u64) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.scheme,
            r.order,
            r.p_active,
            r.snr_db,
            r.bits,
            r.bit_errors,
            r.ber,
            r.fer,
            r.md_rate,
            r.fa_rate,
            r.mean_mults,
            r.mean_adds,
            r.mean_pinvs,
            seed
        )?;
    }
    Ok(())
}

/// Whitespace-separated `snr_db log10_ber_<scheme>...`, one line per SNR
/// point. A point without errors is written as `nan`.
pub fn write_plot_data<W: Write>(w: &mut W, cfg: &SimConfig, result: &SweepResult) -> std::io::Result<()> {
    let schemes = cfg.schemes();
    write!(w, "# snr_db")?;
    for s in &schemes {
        write!(w, " log10_ber_{s}")?;
    }
    writeln!(w)?;
    for &snr in &cfg.snr_db {
        write!(w, "{snr}")?;
        for &s in &schemes {
            let ber = result.row(s, snr).map_or(0.0, |r| r.ber);
            if ber > 0.0 {
                write!(w, " {}", ber.log10())?;
            } else {
                write!(w, " nan")?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Resolved config plus the library version and the overloading factor.
pub fn write_manifest<W: Write>(w: &mut W, cfg: &SimConfig) -> std::io::Result<()> {
    writeln!(w, "# mccdma {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# lambda = {}", cfg.lambda())?;
    write!(w, "{}", cfg.to_toml())
}

/// One JSON object per line. Non-finite numbers (an `inf` SNR point)
/// become `null`.
pub fn write_traces<W: Write>(w: &mut W, traces: &[TraceEntry]) -> std::io::Result<()> {
    for t in traces {
        serde_json::to_writer(&mut *w, t)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Paths of everything [`write_outputs`] produced.
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub plot: PathBuf,
    pub manifest: PathBuf,
    pub traces: Option<PathBuf>,
}

/// Writes `results.csv`, `ber.dat`, `manifest.toml` and, when traces
/// were recorded, `traces.jsonl` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &SimConfig, result: &SweepResult) -> Result<OutputFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = OutputFiles {
        csv: dir.join("results.csv"),
        plot: dir.join("ber.dat"),
        manifest: dir.join("manifest.toml"),
        traces: (!result.traces.is_empty()).then(|| dir.join("traces.jsonl")),
    };
    let emit = |path: &Path, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    };
    emit(&files.csv, &|w| write_csv(w, &result.rows, cfg.seed))?;
    emit(&files.plot, &|w| write_plot_data(w, cfg, result))?;
    emit(&files.manifest, &|w| write_manifest(w, cfg))?;
    if let Some(path) = &files.traces {
        emit(path, &|w| write_traces(w, &result.traces))?;
    }
    Ok(files)
}
