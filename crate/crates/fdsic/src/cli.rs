//! `fdsic` command line.
//!
//! Settings are layered: built-in defaults, then `--config FILE`, then flags.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fdsic_core::complexity::{
    runtime_hammerstein, runtime_proposed, training_hammerstein_with, training_proposed, ComplexityInput, TrainingSpan,
};
use fdsic_core::sim::{
    run_ber, run_packets, summarize, sweep, BerOptions, DesiredLink, ExperimentConfig, Method, PacketRunner,
    SweepParam, SweepPoint, SweepResult,
};

use crate::config_file::{apply_config_file, parse_timing};
use crate::executor::RayonExecutor;
use crate::mf_csv::write_mf_csv;
use crate::report::{write_ber_csv, write_packets_csv, write_sweep_csv};

/// Fits at or above this fraction failing make the run exit nonzero.
pub const MAX_FAILED_FRACTION: f64 = 1e-3;

/// Exit status when too many fits failed; output is still written.
pub const EXIT_FAILED_FITS: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "fdsic", version, about = "Full-duplex self-interference cancellation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual SI of both cancellers at one operating point.
    Single {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write per-packet residuals to this CSV.
        #[arg(long)]
        per_packet: Option<PathBuf>,
    },
    /// Mean residual SI while one parameter varies.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        /// `start:step:stop` (inclusive) or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Two-node BPSK bit-error rate with SI cancellation at node 1.
    Ber {
        #[command(flatten)]
        common: CommonArgs,
        /// Desired-signal SNR grid in dB.
        #[arg(long, default_value = "0:2:12", allow_hyphen_values = true)]
        snr_grid: String,
        #[arg(long, value_enum, default_value_t = DesiredLinkArg::Flat)]
        desired_link: DesiredLinkArg,
        /// Run the interference-free baseline instead of the two cancellers.
        #[arg(long)]
        no_si: bool,
    },
    /// Real-multiplication counts of both cancellers.
    Complexity {
        #[command(flatten)]
        common: CommonArgs,
        /// Filter length multiplying `(P+1)/2` in the Hammerstein training count.
        #[arg(long, value_enum, default_value_t = TrainingSpanArg::Memory)]
        training_span: TrainingSpanArg,
    },
    /// Fit the learned filter on one packet's pilots and write its taps.
    ExportMf {
        #[command(flatten)]
        common: CommonArgs,
        /// Packet whose pilot block trains the filter.
        #[arg(long, default_value_t = 0)]
        packet: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParamArg {
    Snr,
    Lg,
    M,
    Ibo,
}

impl From<ParamArg> for SweepParam {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Snr => SweepParam::SnrDb,
            ParamArg::Lg => SweepParam::Lg,
            ParamArg::M => SweepParam::M,
            ParamArg::Ibo => SweepParam::IboDb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesiredLinkArg {
    Flat,
    Multipath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainingSpanArg {
    Memory,
    PulseSpan,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Data symbols per packet.
    #[arg(long)]
    pub n: Option<usize>,
    /// Pilot symbols per packet.
    #[arg(long)]
    pub np: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub lg: Option<usize>,
    #[arg(long)]
    pub lq: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub rolloff: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// `inf` bypasses the amplifier.
    #[arg(long, allow_negative_numbers = true)]
    pub ibo_db: Option<f64>,
    #[arg(long)]
    pub smoothness: Option<f64>,
    #[arg(long)]
    pub channel_span: Option<usize>,
    /// `centered` or `causal`.
    #[arg(long)]
    pub channel_timing: Option<String>,
    #[arg(long)]
    pub ridge: Option<f64>,
    #[arg(long)]
    pub packets: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `hammerstein`, `learned_mf` or `both`.
    #[arg(long)]
    pub method: Option<String>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` file applied before the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            apply_config_file(&mut cfg, path)?;
        }
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag.clone() {
                    cfg.$field = v;
                }
            };
        }
        set!(n => n);
        set!(np => n_pilot);
        set!(m => m);
        set!(lg => lg);
        set!(lq => lq);
        set!(p => p);
        set!(rolloff => rolloff);
        set!(snr_db => snr_db);
        set!(ibo_db => ibo_db);
        set!(smoothness => rapp_smoothness);
        set!(channel_span => channel_span_symbols);
        set!(ridge => ridge);
        set!(packets => n_packets);
        set!(seed => master_seed);
        if let Some(t) = &self.channel_timing {
            cfg.channel_timing = parse_timing(t)?;
        }
        if let Some(m) = &self.method {
            cfg.method = m.parse::<Method>()?;
        }
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

/// Parses `start:step:stop` (inclusive, step > 0) or `a,b,c`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("`{s}` is not a number"))
    };
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts.as_slice() else {
            bail!("range must be start:step:stop");
        };
        let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
        if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
            bail!("range needs finite bounds and a positive step");
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count < 0.0 {
            bail!("range stop lies below its start");
        }
        if count > 1e6 {
            bail!("range has too many points");
        }
        (0..=count as usize).map(|k| start + k as f64 * step).collect()
    } else {
        spec.split(',').map(parse).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        bail!("no values given");
    }
    Ok(values)
}

fn check_failures(failed: usize, total: usize) -> ExitCode {
    if total > 0 && failed as f64 >= MAX_FAILED_FRACTION * total as f64 && failed > 0 {
        eprintln!(
            "warning: {failed} of {total} fits failed ({:.3}%), at or above the {:.1}% tolerance",
            100.0 * failed as f64 / total as f64,
            100.0 * MAX_FAILED_FRACTION
        );
        ExitCode::from(EXIT_FAILED_FITS)
    } else {
        ExitCode::SUCCESS
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Single { common, per_packet } => {
            let cfg = common.resolve()?;
            let exec = RayonExecutor::new(common.jobs)?;
            let packets = run_packets(&cfg, &exec)?;
            let (hammerstein, learned_mf) = summarize(&packets);
            let result = SweepResult {
                param: SweepParam::SnrDb,
                points: vec![SweepPoint {
                    value: cfg.snr_db,
                    hammerstein,
                    learned_mf,
                }],
            };
            let mut out = common.output()?;
            write_sweep_csv(&mut out, "single", &cfg, &result)?;
            out.flush()?;
            if let Some(path) = per_packet {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(f);
                write_packets_csv(&mut w, &cfg, &packets)?;
                w.flush()?;
            }
            Ok(check_failures(result.total_failed(), result.total_fits()))
        }
        Command::Sweep { common, param, values } => {
            let cfg = common.resolve()?;
            let param = SweepParam::from(param);
            let values = parse_values(&values)?;
            for &v in &values {
                param.apply(&cfg, v).with_context(|| format!("sweep value {v}"))?;
            }
            let exec = RayonExecutor::new(common.jobs)?;
            let result = sweep(&cfg, param, &values, &exec)?;
            let mut out = common.output()?;
            write_sweep_csv(&mut out, "sweep", &cfg, &result)?;
            out.flush()?;
            Ok(check_failures(result.total_failed(), result.total_fits()))
        }
        Command::Ber {
            common,
            snr_grid,
            desired_link,
            no_si,
        } => {
            let cfg = common.resolve()?;
            let opts = BerOptions {
                snr_grid: parse_values(&snr_grid)?,
                desired_link: match desired_link {
                    DesiredLinkArg::Flat => DesiredLink::Flat,
                    DesiredLinkArg::Multipath => DesiredLink::Multipath,
                },
                include_si: !no_si,
            };
            let exec = RayonExecutor::new(common.jobs)?;
            let points = run_ber(&cfg, &opts, &exec)?;
            let extra = [
                ("desired_link", format!("{desired_link:?}").to_lowercase()),
                ("include_si", opts.include_si.to_string()),
            ];
            let mut out = common.output()?;
            write_ber_csv(&mut out, &cfg, &extra, &points)?;
            out.flush()?;
            let failed: usize = points.iter().map(|p| p.n_failed).sum();
            let total = points.iter().filter(|p| p.bits > 0 || p.n_failed > 0).count() * cfg.n_packets;
            Ok(check_failures(failed, total))
        }
        Command::Complexity { common, training_span } => {
            let cfg = common.resolve()?;
            let c = ComplexityInput::new(cfg.n as u64, cfg.m as u64, cfg.lg as u64, cfg.lq as u64, cfg.p as u64)?;
            let span = match training_span {
                TrainingSpanArg::Memory => TrainingSpan::Memory,
                TrainingSpanArg::PulseSpan => TrainingSpan::PulseSpan,
            };
            let mut out = common.output()?;
            writeln!(out, "{:<12} {:<9} {:>16}", "method", "phase", "real_mults")?;
            for (method, phase, count) in [
                ("hammerstein", "runtime", runtime_hammerstein(&c)),
                ("proposed", "runtime", runtime_proposed(&c)),
                ("hammerstein", "training", training_hammerstein_with(&c, span)),
                ("proposed", "training", training_proposed(&c)),
            ] {
                writeln!(out, "{method:<12} {phase:<9} {count:>16}")?;
            }
            writeln!(
                out,
                "# closed-form counts for N={} M={} L_g={} L_q={} P={} (training span: {}); not measured from the solver",
                cfg.n,
                cfg.m,
                cfg.lg,
                cfg.lq,
                cfg.p,
                match span {
                    TrainingSpan::Memory => "L_q",
                    TrainingSpan::PulseSpan => "L_g",
                }
            )?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportMf { common, packet } => {
            let cfg = common.resolve()?;
            let mf = PacketRunner::new(&cfg)?
                .fit_learned_mf(packet)
                .with_context(|| format!("fitting the learned filter on packet {packet}"))?;
            let mut out = common.output()?;
            write_mf_csv(&mut out, &mf)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
