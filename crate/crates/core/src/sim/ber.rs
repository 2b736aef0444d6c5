//! Two-node BER experiment.
//!
//! Node 1 is full duplex: it receives the desired BPSK signal from node 2 on
//! top of its own OFDM-like SI. Both arrive at unit mean power per sample and
//! the SNR is desired-signal power over noise power at node 1's input. In the
//! Hammerstein mode node 2 shapes with `g_T` and node 1 filters with `g_R`; in
//! the learned mode node 2 shapes with `conj(g1)` and node 1 filters with
//! `g1`, so the desired symbol's main tap is `|g1|^2`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frontend::{add_noise_with_variance, apply_channel, draw_channel, MultipathChannel};
use crate::hammerstein::{self, HammersteinConfig};
use crate::mf::{apply_mf, fit_mf_with, LearnedMf};
use crate::signal::{measure_power, pulse_shape, FirTaps, SampleStream, SymbolBlock};

use super::config::ExperimentConfig;
use super::executor::PacketExecutor;
use super::link::SiLink;
use super::ofdm::{gen_bpsk_symbols, gen_ofdm_like_symbols};
use super::streams::{packet_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DesiredLink {
    /// Unit-gain pass-through.
    #[default]
    Flat,
    /// A fresh random multipath channel per packet, left unequalized.
    Multipath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerOptions {
    pub snr_grid: Vec<f64>,
    pub desired_link: DesiredLink,
    /// `false` runs the interference-free baseline only.
    pub include_si: bool,
}

impl Default for BerOptions {
    fn default() -> Self {
        Self {
            snr_grid: (0..=6).map(|k| 2.0 * k as f64).collect(),
            desired_link: DesiredLink::Flat,
            include_si: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerMode {
    Hammerstein,
    LearnedMf,
    /// Conventional receiver with no SI present.
    NoSi,
}

impl BerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BerMode::Hammerstein => "hammerstein",
            BerMode::LearnedMf => "learned_mf",
            BerMode::NoSi => "no_si",
        }
    }
}

impl fmt::Display for BerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub mode: BerMode,
    pub errors: u64,
    pub bits: u64,
    pub n_failed: usize,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.errors as f64 / self.bits as f64
    }
}

/// Bit-error counts `(errors, bits)` per mode for one packet.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPacket {
    pub hammerstein: Option<core::result::Result<(u64, u64), Error>>,
    pub learned_mf: Option<core::result::Result<(u64, u64), Error>>,
    pub no_si: Option<(u64, u64)>,
}

struct Node2 {
    u: SymbolBlock,
    bits: Vec<bool>,
    channel: Option<MultipathChannel>,
}

impl Node2 {
    fn transmit(&self, pulse: &FirTaps) -> Result<SampleStream> {
        let mut z = pulse_shape(&self.u, pulse)?;
        if let Some(h) = &self.channel {
            z = apply_channel(&z, h);
        }
        let p = measure_power(&z)?;
        Ok(z.scaled(Float::sqrt(p).recip()))
    }
}

fn padded_sum(a: &SampleStream, b: &SampleStream) -> Result<SampleStream> {
    let len = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    let data = (0..len)
        .map(|k| a.get(k).copied().unwrap_or(zero) + b.get(k).copied().unwrap_or(zero))
        .collect();
    SampleStream::new(data, a.oversampling())
}

fn count_errors(d: &SymbolBlock, bits: &[bool], range: core::ops::Range<usize>) -> (u64, u64) {
    let errors = range.clone().filter(|&n| (d[n].re < 0.0) != bits[n]).count() as u64;
    (errors, range.len() as u64)
}

/// One packet of the two-node experiment at `snr_db`.
pub fn ber_packet(
    cfg: &ExperimentConfig,
    link: &SiLink,
    opts: &BerOptions,
    packet: u64,
    snr_db: f64,
) -> Result<BerPacket> {
    let seed = cfg.master_seed;
    let variance = 10f64.powf(-snr_db / 10.0);
    let (u, bits) = gen_bpsk_symbols(&mut packet_rng(seed, packet, Stream::DesiredBits), cfg.n)?;
    let channel = match opts.desired_link {
        DesiredLink::Flat => None,
        DesiredLink::Multipath => Some(draw_channel(
            &mut packet_rng(seed, packet, Stream::DesiredChannel),
            cfg.channel_span_symbols,
            cfg.m,
        )?
        .with_timing(cfg.channel_timing)),
    };
    let node2 = Node2 { u, bits, channel };
    let interior = cfg.interior();
    let noise_for = |len: usize, stream: Stream| -> Result<SampleStream> {
        let zeros = SampleStream::new(alloc::vec![Complex64::new(0.0, 0.0); len], cfg.m)?;
        Ok(add_noise_with_variance(&zeros, variance, &mut packet_rng(seed, packet, stream)))
    };

    if !opts.include_si {
        let z = node2.transmit(link.pulse())?;
        let eta = padded_sum(&z, &noise_for(z.len(), Stream::DataNoise)?)?;
        let d = link.conventional_receive(&eta, cfg.n)?;
        return Ok(BerPacket {
            hammerstein: None,
            learned_mf: None,
            no_si: Some(count_errors(&d, &node2.bits, interior)),
        });
    }

    let si_channel = draw_channel(&mut packet_rng(seed, packet, Stream::Channel), cfg.channel_span_symbols, cfg.m)?
        .with_timing(cfg.channel_timing);
    let s_pilot = gen_ofdm_like_symbols(&mut packet_rng(seed, packet, Stream::PilotSymbols), cfg.n_pilot)?;
    let s_data = gen_ofdm_like_symbols(&mut packet_rng(seed, packet, Stream::DataSymbols), cfg.n)?;
    let y_pilot = link.transmit(&s_pilot, &si_channel)?;
    let si_scale = Float::sqrt(measure_power(&y_pilot)?).recip();
    let y_pilot = y_pilot.scaled(si_scale);
    let eta_pilot = padded_sum(&y_pilot, &noise_for(y_pilot.len(), Stream::PilotNoise)?)?;
    let y_data = link.transmit(&s_data, &si_channel)?.scaled(si_scale);
    // Longest node-2 waveform sets the common noise length for both modes.
    let data_noise = noise_for(y_data.len() + cfg.m * cfg.lg, Stream::DataNoise)?;

    let hammerstein = cfg.method.includes_hammerstein().then(|| {
        let hcfg = HammersteinConfig::new(cfg.p, cfg.lq)?;
        let lambda_pilot = link.conventional_receive(&eta_pilot, cfg.n_pilot)?;
        let model = hammerstein::fit_with(&s_pilot, &lambda_pilot, &hcfg, cfg.ls_options())?;
        let z = node2.transmit(link.pulse())?;
        let eta = padded_sum(&padded_sum(&y_data, &z)?, &data_noise)?;
        let lambda = link.conventional_receive(&eta, cfg.n)?;
        let d = hammerstein::cancel(&lambda, &hammerstein::regenerate(&model, &s_data)?)?;
        Ok(count_errors(&d, &node2.bits, interior.clone()))
    });

    let learned_mf = cfg.method.includes_learned_mf().then(|| {
        let mf = fit_mf_with(&eta_pilot, &s_pilot, cfg.m, cfg.lg, cfg.ls_options())?;
        let z = node2.transmit(&conjugate_pulse(&mf)?)?;
        let eta = padded_sum(&padded_sum(&y_data, &z)?, &data_noise)?;
        let lambda = apply_mf(&eta, &mf, cfg.n)?;
        let d = crate::mf::cancel_known(&lambda, &s_data)?;
        Ok(count_errors(&d, &node2.bits, interior.clone()))
    });

    Ok(BerPacket {
        hammerstein,
        learned_mf,
        no_si: None,
    })
}

/// Node-2 pulse `conj(g1)`, which node 1's filter `g1` matches.
fn conjugate_pulse(mf: &LearnedMf) -> Result<FirTaps> {
    FirTaps::new(
        mf.coeffs().iter().map(Complex64::conj).collect(),
        mf.span_symbols(),
        mf.oversampling(),
    )
}

/// BER per grid SNR and mode, accumulated over `cfg.n_packets` packets.
/// Points are ordered by SNR, then mode.
pub fn run_ber<E: PacketExecutor>(cfg: &ExperimentConfig, opts: &BerOptions, exec: &E) -> Result<Vec<BerPoint>> {
    let link = SiLink::from_config(cfg)?;
    let mut out = Vec::new();
    for &snr_db in &opts.snr_grid {
        if snr_db.is_nan() {
            return Err(crate::error::invalid("SNR grid contains NaN"));
        }
        let packets: Vec<BerPacket> = exec
            .map_packets(cfg.n_packets as u64, |k| ber_packet(cfg, &link, opts, k, snr_db))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut push = |mode: BerMode, items: Vec<Option<core::result::Result<(u64, u64), Error>>>| {
            if items.iter().all(Option::is_none) {
                return;
            }
            let mut point = BerPoint {
                snr_db,
                mode,
                errors: 0,
                bits: 0,
                n_failed: 0,
            };
            for item in items.into_iter().flatten() {
                match item {
                    Ok((e, b)) => {
                        point.errors += e;
                        point.bits += b;
                    }
                    Err(_) => point.n_failed += 1,
                }
            }
            out.push(point);
        };
        push(BerMode::Hammerstein, packets.iter().map(|p| p.hammerstein.clone()).collect());
        push(BerMode::LearnedMf, packets.iter().map(|p| p.learned_mf.clone()).collect());
        push(BerMode::NoSi, packets.iter().map(|p| p.no_si.map(Ok)).collect());
    }
    Ok(out)
}
