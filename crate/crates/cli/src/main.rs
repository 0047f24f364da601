//! `pbsim`: BER sweeps, rate adaptation and the codec self test.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use polar_bch::sim::{
    self, codec_selftest, parse_config_text, parse_k1_range, Fault, SweepConfig, SweepError,
};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "pbsim",
    version,
    about = "Polar-BCH and BCH-BCH product code simulator"
)]
struct Cli {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Post-FEC BER over an SNR grid.
    BerSweep {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Largest row dimension meeting the target BER at each SNR.
    RateAdapt {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Inclusive row-dimension range, `lo:hi`.
        #[arg(long)]
        k1_range: Option<String>,
    },
    /// Exhaustive small-code checks of every codec component.
    Selftest {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// `polar-bch` or `bch-bch`.
    #[arg(long)]
    code: Option<String>,
    /// `hshd`, `ibdd` or `sabm`.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    k1: Option<usize>,
    /// Es/N0 grid in dB, `start:stop:step`.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    target_ber: Option<f64>,
    /// Conflict update step [default: 3].
    #[arg(long)]
    alpha: Option<f64>,
    /// Maximum decoder iterations [default: 10].
    #[arg(long)]
    lmax: Option<usize>,
    /// SCL list size [default: 8].
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    min_frames: Option<u64>,
    /// Post-FEC bit errors that end a point early [default: 100].
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replay recorded noise from this file instead of drawing AWGN.
    #[arg(long)]
    noise_replay: Option<PathBuf>,
    /// Net rate per unit code rate [default: 100].
    #[arg(long)]
    rate_scale: Option<f64>,
    /// Reliability threshold for soft-aided bit marking.
    #[arg(long)]
    hrb_threshold: Option<f64>,
    /// `exact` or `max-log`.
    #[arg(long)]
    demap: Option<String>,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: available cores].
    #[arg(long)]
    threads: Option<usize>,
}

struct Resolved {
    cfg: SweepConfig,
    out: Option<PathBuf>,
    k1_range: Option<String>,
}

fn resolve(
    config: Option<&PathBuf>,
    args: &SweepArgs,
    k1_range: Option<&String>,
) -> Result<Resolved> {
    let mut cfg = SweepConfig {
        threads_hint: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SweepConfig::default()
    };
    let mut out = None;
    let mut range = None;
    if let Some(path) = config {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (k, v) in parse_config_text(&text)? {
            match k.as_str() {
                "out" => out = Some(PathBuf::from(v)),
                "k1-range" => range = Some(v),
                _ => cfg.set(&k, &v)?,
            }
        }
    }
    let flags: [(&str, Option<String>); 17] = [
        ("code", args.code.clone()),
        ("decoder", args.decoder.clone()),
        ("k1", args.k1.map(|v| v.to_string())),
        ("snr", args.snr.clone()),
        ("target-ber", args.target_ber.map(|v| v.to_string())),
        ("alpha", args.alpha.map(|v| v.to_string())),
        ("lmax", args.lmax.map(|v| v.to_string())),
        ("list-size", args.list_size.map(|v| v.to_string())),
        ("max-frames", args.max_frames.map(|v| v.to_string())),
        ("min-frames", args.min_frames.map(|v| v.to_string())),
        ("min-errors", args.min_errors.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        (
            "noise-replay",
            args.noise_replay.as_ref().map(|p| p.display().to_string()),
        ),
        ("rate-scale", args.rate_scale.map(|v| v.to_string())),
        ("hrb-threshold", args.hrb_threshold.map(|v| v.to_string())),
        ("demap", args.demap.clone()),
        ("threads", args.threads.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    if args.out.is_some() {
        out = args.out.clone();
    }
    if k1_range.is_some() {
        range = k1_range.cloned();
    }
    Ok(Resolved {
        cfg,
        out,
        k1_range: range,
    })
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::BerSweep { sweep } => {
            let r = resolve(cli.config.as_ref(), sweep, None)?;
            r.cfg.validate()?;
            let mut w = output(r.out.as_ref())?;
            writeln!(w, "{}", sim::CSV_HEADER)?;
            w.flush()?;
            sim::run_ber_sweep_with(&r.cfg, |row| {
                writeln!(w, "{}", sim::format_csv_row(row))?;
                w.flush().map_err(SweepError::from)
            })?;
        }
        Command::RateAdapt { sweep, k1_range } => {
            let r = resolve(cli.config.as_ref(), sweep, k1_range.as_ref())?;
            r.cfg.validate()?;
            let range = match &r.k1_range {
                Some(s) => parse_k1_range(s)?,
                None => bail!("rate-adapt needs --k1-range lo:hi"),
            };
            let rows = sim::run_rate_adapt(&r.cfg, range)?;
            let mut w = output(r.out.as_ref())?;
            sim::write_rate_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Command::Selftest { inject_fault } => {
            let fault = if *inject_fault {
                Fault::CorruptAntilog
            } else {
                Fault::None
            };
            let report = codec_selftest(fault);
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
