use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mccdma::codebook::coherence_report;
use mccdma::harness::{
    expected_active, measurement_sufficiency, run_sweep_with, write_outputs, SchemeSelection, Setup, SimConfig,
};

#[derive(Parser)]
#[command(version, about = "Codebook-based MC-CDMA link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep and write results.csv, ber.dat and manifest.toml.
    Simulate {
        /// TOML config; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Use the 1390-user, 139-subcarrier system dimensions.
        #[arg(long)]
        paper_scale: bool,
        #[arg(long)]
        scheme: Option<SchemeSelection>,
        /// Output directory (overrides `out_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed; re-derives every stream seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Frames per SNR point.
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Codebook statistics.
    Codebook {
        #[command(subcommand)]
        command: CodebookCommand,
    },
    /// Check the measurement-count advisory N >= c K_a ln(M K).
    CheckSufficiency {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
}

#[derive(Subcommand)]
enum CodebookCommand {
    /// Intra- and inter-codebook correlation magnitudes.
    Report {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        paper_scale: bool,
    },
}

fn load(config: Option<&PathBuf>, paper_scale: bool) -> mccdma::Result<SimConfig> {
    let mut cfg = match config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if paper_scale {
        cfg.apply_paper_scale();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> mccdma::Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            paper_scale,
            scheme,
            out,
            seed,
            frames,
        } => {
            let mut cfg = load(config.as_ref(), paper_scale)?;
            if let Some(s) = scheme {
                cfg.scheme = s;
            }
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            if let Some(s) = seed {
                cfg.set_seed(s);
            }
            if let Some(f) = frames {
                cfg.frames = f;
            }
            cfg.validate()?;
            let adv = measurement_sufficiency(cfg.seq_len, expected_active(&cfg), cfg.users, cfg.order, cfg.sufficiency_c);
            if !adv.sufficient {
                log::warn!("N = {} is below the advisory bound {:.1}", cfg.seq_len, adv.bound);
            }
            let setup = Setup::new(cfg.clone())?;
            let result = run_sweep_with(&setup)?;
            for r in &result.rows {
                println!(
                    "{:<12} snr {:>6} dB  ber {:.3e} (se {:.1e})  fer {:.3e}  md {:.3e}  fa {:.3e}",
                    r.scheme.name(),
                    r.snr_db,
                    r.ber,
                    r.ber_se,
                    r.fer,
                    r.md_rate,
                    r.fa_rate
                );
            }
            let files = write_outputs(&cfg.out_dir, &cfg, &result)?;
            println!("wrote {}", files.csv.display());
        }
        Command::Codebook {
            command: CodebookCommand::Report { config, paper_scale },
        } => {
            let cfg = load(config.as_ref(), paper_scale)?;
            let setup = Setup::new(cfg)?;
            let report = coherence_report(&setup.codebooks)?;
            let worst = report.intra.iter().map(|s| s.max).fold(0.0, f64::max);
            let mean = report.intra.iter().map(|s| s.mean).sum::<f64>() / report.intra.len() as f64;
            println!("users {}  N {}  M {}", setup.cfg.users, setup.cfg.seq_len, setup.cfg.order);
            println!("intra-codebook |corr|: max {worst:.4}  mean {mean:.4}");
            if let Some(inter) = report.inter {
                println!("inter-codebook |corr|: max {:.4}  mean {:.4}", inter.max, inter.mean);
            }
        }
        Command::CheckSufficiency { config, paper_scale } => {
            let cfg = load(config.as_ref(), paper_scale)?;
            let ka = expected_active(&cfg);
            let adv = measurement_sufficiency(cfg.seq_len, ka, cfg.users, cfg.order, cfg.sufficiency_c);
            println!(
                "N = {}  K_a = {ka}  bound c K_a ln(M K) = {:.1}  -> {}",
                cfg.seq_len,
                adv.bound,
                if adv.sufficient { "sufficient" } else { "insufficient (advisory)" }
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
