//! Flat `key = value` experiment files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the CLI flag
//! names without the leading dashes; `-` and `_` are interchangeable.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fdsic_core::frontend::ChannelTiming;
use fdsic_core::sim::{ExperimentConfig, Method};

pub fn parse_timing(s: &str) -> Result<ChannelTiming> {
    match s {
        "centered" => Ok(ChannelTiming::Centered),
        "causal" => Ok(ChannelTiming::Causal),
        other => bail!("unknown channel timing `{other}` (expected centered or causal)"),
    }
}

pub fn timing_name(t: ChannelTiming) -> &'static str {
    match t {
        ChannelTiming::Centered => "centered",
        ChannelTiming::Causal => "causal",
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

/// Sets one field of `cfg` from its textual form.
pub fn apply_setting(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    let norm = key.trim().replace('-', "_");
    let value = value.trim();
    match norm.as_str() {
        "n" => cfg.n = parse(key, value)?,
        "np" => cfg.n_pilot = parse(key, value)?,
        "m" => cfg.m = parse(key, value)?,
        "lg" => cfg.lg = parse(key, value)?,
        "lq" => cfg.lq = parse(key, value)?,
        "p" => cfg.p = parse(key, value)?,
        "rolloff" => cfg.rolloff = parse(key, value)?,
        "snr_db" => cfg.snr_db = parse(key, value)?,
        "ibo_db" => cfg.ibo_db = parse(key, value)?,
        "smoothness" => cfg.rapp_smoothness = parse(key, value)?,
        "channel_span" => cfg.channel_span_symbols = parse(key, value)?,
        "channel_timing" => cfg.channel_timing = parse_timing(value)?,
        "ridge" => cfg.ridge = parse(key, value)?,
        "packets" => cfg.n_packets = parse(key, value)?,
        "seed" => cfg.master_seed = parse(key, value)?,
        "method" => cfg.method = value.parse::<Method>()?,
        _ => bail!("unknown configuration key `{key}`"),
    }
    Ok(())
}

/// Applies every setting in `text` to `cfg` in file order.
pub fn apply_config_text(cfg: &mut ExperimentConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected `key = value`", lineno + 1))?;
        apply_setting(cfg, key, value).with_context(|| format!("line {}", lineno + 1))?;
    }
    Ok(())
}

pub fn apply_config_file(cfg: &mut ExperimentConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    apply_config_text(cfg, &text).with_context(|| format!("in {}", path.display()))
}

/// Every field of `cfg` as `key=value` pairs in a fixed order; the output
/// parses back through [`apply_config_text`] to the same configuration.
pub fn render_config(cfg: &ExperimentConfig) -> Vec<(&'static str, String)> {
    vec![
        ("n", cfg.n.to_string()),
        ("np", cfg.n_pilot.to_string()),
        ("m", cfg.m.to_string()),
        ("lg", cfg.lg.to_string()),
        ("lq", cfg.lq.to_string()),
        ("p", cfg.p.to_string()),
        ("rolloff", cfg.rolloff.to_string()),
        ("snr_db", cfg.snr_db.to_string()),
        ("ibo_db", cfg.ibo_db.to_string()),
        ("smoothness", cfg.rapp_smoothness.to_string()),
        ("channel_span", cfg.channel_span_symbols.to_string()),
        ("channel_timing", timing_name(cfg.channel_timing).to_string()),
        ("ridge", cfg.ridge.to_string()),
        ("packets", cfg.n_packets.to_string()),
        ("seed", cfg.master_seed.to_string()),
        ("method", cfg.method.to_string()),
    ]
}
