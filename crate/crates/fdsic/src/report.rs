//! CSV output for residual sweeps and BER tables.
//!
//! Every file starts with `#` lines holding the schema version, the command,
//! the fully resolved configuration and the master seed. dB values carry
//! three decimals; counts are exact integers.

use std::io::Write;

use anyhow::Result;
use fdsic_core::sim::{BerPoint, ExperimentConfig, MethodStats, PacketResult, SweepResult};

use crate::config_file::render_config;

pub const SCHEMA_VERSION: u32 = 1;

pub const AVERAGING_NOTE: &str = "mean_residual_db = 10*log10(mean of per-packet linear residual power ratios); \
std_residual_db = standard deviation of per-packet residuals in dB";

/// Writes the `#` metadata block.
pub fn write_header<W: Write>(out: &mut W, command: &str, cfg: &ExperimentConfig, extra: &[(&str, String)]) -> Result<()> {
    writeln!(out, "# fdsic schema_version={SCHEMA_VERSION}")?;
    writeln!(out, "# command={command}")?;
    let rendered: Vec<String> = render_config(cfg).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "# config {}", rendered.join(" "))?;
    for (k, v) in extra {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "# master_seed={}", cfg.master_seed)?;
    Ok(())
}

pub fn fmt_db(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.3}")
    }
}

/// One row per (value, method).
pub fn write_sweep_csv<W: Write>(mut out: W, command: &str, cfg: &ExperimentConfig, result: &SweepResult) -> Result<()> {
    write_header(&mut out, command, cfg, &[("sweep_param", result.param.to_string())])?;
    writeln!(out, "# averaging: {AVERAGING_NOTE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "param",
        "value",
        "method",
        "mean_residual_db",
        "std_residual_db",
        "gain_db",
        "n_packets",
        "n_failed",
        "seed",
    ])?;
    for p in &result.points {
        let gain = p.gain_db().map(fmt_db).unwrap_or_default();
        let rows: [(&str, Option<MethodStats>); 2] = [("hammerstein", p.hammerstein), ("learned_mf", p.learned_mf)];
        for (name, stats) in rows {
            let Some(s) = stats else { continue };
            w.write_record([
                result.param.to_string(),
                p.value.to_string(),
                name.to_string(),
                fmt_db(s.mean_residual_db),
                fmt_db(s.std_residual_db),
                gain.clone(),
                s.n_packets().to_string(),
                s.n_failed.to_string(),
                cfg.master_seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-packet residuals, one row per (packet, method).
pub fn write_packets_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, packets: &[PacketResult]) -> Result<()> {
    write_header(&mut out, "single/per-packet", cfg, &[])?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["packet", "method", "residual_db", "pre_cancel_si_db", "failed", "seed"])?;
    for p in packets {
        for (name, outcome) in [("hammerstein", &p.hammerstein), ("learned_mf", &p.learned_mf)] {
            let Some(outcome) = outcome else { continue };
            let (res, failed) = match outcome {
                Ok(r) => (fmt_db(r.residual_db()), "0"),
                Err(_) => ("nan".to_string(), "1"),
            };
            w.write_record([
                p.packet.to_string(),
                name.to_string(),
                res,
                fmt_db(p.pre_cancel_si_db),
                failed.to_string(),
                p.master_seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ber_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, extra: &[(&str, String)], points: &[BerPoint]) -> Result<()> {
    write_header(&mut out, "ber", cfg, extra)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["snr_db", "method", "ber", "bits_counted", "seed"])?;
    for p in points {
        w.write_record([
            fmt_db(p.snr_db),
            p.mode.to_string(),
            format!("{:.6e}", p.ber()),
            p.bits.to_string(),
            cfg.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
