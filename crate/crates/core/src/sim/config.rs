use alloc::{format, string::String};
use core::fmt;
use core::str::FromStr;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::frontend::ChannelTiming;
use crate::lsq::LsOptions;

/// Which canceller(s) a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Hammerstein,
    LearnedMf,
    #[default]
    Both,
}

impl Method {
    pub fn includes_hammerstein(self) -> bool {
        matches!(self, Method::Hammerstein | Method::Both)
    }

    pub fn includes_learned_mf(self) -> bool {
        matches!(self, Method::LearnedMf | Method::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hammerstein => "hammerstein",
            Method::LearnedMf => "learned_mf",
            Method::Both => "both",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hammerstein" => Ok(Method::Hammerstein),
            "learned_mf" | "learned-mf" | "mf" | "proposed" => Ok(Method::LearnedMf),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Parameters of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Data symbols per packet.
    pub n: usize,
    /// Pilot symbols per packet.
    pub n_pilot: usize,
    /// Oversampling factor.
    pub m: usize,
    /// Pulse and learned-filter span in symbols.
    pub lg: usize,
    /// Hammerstein memory in symbols.
    pub lq: usize,
    /// Highest odd polynomial degree.
    pub p: usize,
    pub rolloff: f64,
    /// SI power over noise power before the receive filter.
    pub snr_db: f64,
    /// `f64::INFINITY` bypasses the amplifier.
    pub ibo_db: f64,
    pub rapp_smoothness: f64,
    pub channel_span_symbols: usize,
    pub channel_timing: ChannelTiming,
    /// Tikhonov weight for both least-squares fits; 0 is plain LS.
    pub ridge: f64,
    pub n_packets: usize,
    pub master_seed: u64,
    pub method: Method,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 128,
            n_pilot: 128,
            m: 8,
            lg: 4,
            lq: 4,
            p: 3,
            rolloff: 0.35,
            snr_db: 0.0,
            ibo_db: 5.0,
            rapp_smoothness: 2.0,
            channel_span_symbols: 4,
            channel_timing: ChannelTiming::Centered,
            ridge: 0.0,
            n_packets: 500,
            master_seed: 1,
            method: Method::Both,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() {
            return Err(invalid("N must be a power of two"));
        }
        if !self.n_pilot.is_power_of_two() {
            return Err(invalid("N_p must be a power of two"));
        }
        if self.m == 0 || self.lg == 0 || self.lq == 0 || self.channel_span_symbols == 0 {
            return Err(invalid("M, L_g, L_q and the channel span must be at least 1"));
        }
        if self.p == 0 || self.p % 2 == 0 {
            return Err(invalid("P must be a positive odd integer"));
        }
        if self.n <= 2 * self.lg {
            return Err(invalid("N must exceed 2 L_g so that interior symbols remain"));
        }
        if !(0.0..=1.0).contains(&self.rolloff) {
            return Err(invalid("rolloff must lie in [0, 1]"));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(invalid("SNR must be a number below +inf or +inf"));
        }
        if self.ibo_db.is_nan() || self.ibo_db == f64::NEG_INFINITY {
            return Err(invalid("IBO must be a number or +inf"));
        }
        if !(self.rapp_smoothness > 0.0 && self.rapp_smoothness.is_finite()) {
            return Err(invalid("Rapp smoothness must be positive"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(invalid("ridge weight must be a nonnegative number"));
        }
        if self.n_packets == 0 {
            return Err(invalid("at least one packet is required"));
        }
        Ok(())
    }

    /// Range of data-symbol indices over which residuals are measured; the
    /// first and last `L_g` symbols carry filter edge transients.
    pub fn ls_options(&self) -> LsOptions {
        LsOptions { ridge: self.ridge }
    }

    pub fn interior(&self) -> core::ops::Range<usize> {
        self.lg..self.n - self.lg
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    SnrDb,
    Lg,
    M,
    IboDb,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::SnrDb => "snr_db",
            SweepParam::Lg => "lg",
            SweepParam::M => "m",
            SweepParam::IboDb => "ibo_db",
        }
    }

    /// `cfg` with this parameter set to `value`. Integer parameters reject
    /// fractional or nonpositive values.
    pub fn apply(self, cfg: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut out = cfg.clone();
        match self {
            SweepParam::SnrDb => out.snr_db = value,
            SweepParam::IboDb => out.ibo_db = value,
            SweepParam::Lg => out.lg = positive_integer(value, "L_g")?,
            SweepParam::M => out.m = positive_integer(value, "M")?,
        }
        out.validate()?;
        Ok(out)
    }
}

fn positive_integer(value: f64, name: &str) -> Result<usize> {
    if value >= 1.0 && Float::fract(value) == 0.0 && value < 1e9 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be a positive integer, got {value}")))
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = String::from(s).to_ascii_lowercase();
        match lower.as_str() {
            "snr" | "snr_db" | "snr-db" => Ok(SweepParam::SnrDb),
            "lg" | "l_g" => Ok(SweepParam::Lg),
            "m" => Ok(SweepParam::M),
            "ibo" | "ibo_db" | "ibo-db" => Ok(SweepParam::IboDb),
            _ => Err(Error::InvalidParameter(format!("unknown sweep parameter `{s}`"))),
        }
    }
}
