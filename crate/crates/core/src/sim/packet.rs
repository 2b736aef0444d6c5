use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frontend::{add_awgn, draw_channel, MultipathChannel, NoiseSpec};
use crate::hammerstein::{self, HammersteinConfig};
use crate::mf::{apply_mf, cancel_known, fit_mf_with, LearnedMf};
use crate::signal::{SampleStream, SymbolBlock};

use super::config::ExperimentConfig;
use super::link::SiLink;
use super::ofdm::gen_ofdm_like_symbols;
use super::streams::{packet_rng, Stream};

/// Residual of one canceller on one packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodResidual {
    /// `sum |eps|^2 / sum |r|^2` over the interior symbols.
    pub ratio: f64,
}

impl MethodResidual {
    pub fn residual_db(&self) -> f64 {
        10.0 * Float::log10(self.ratio)
    }
}

/// Per-method outcomes of one packet. `None` means the method was not run;
/// `Some(Err(_))` is a failed fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketResult {
    pub packet: u64,
    pub master_seed: u64,
    /// Mean interior SI power at the conventional receiver output, noiseless.
    pub pre_cancel_si_db: f64,
    pub hammerstein: Option<core::result::Result<MethodResidual, Error>>,
    pub learned_mf: Option<core::result::Result<MethodResidual, Error>>,
}

/// Slack allowed above the pre-cancellation level before a residual is
/// considered a blow-up.
pub const SANITY_MARGIN_DB: f64 = 6.0;

impl PacketResult {
    /// Every successful residual lies at most [`SANITY_MARGIN_DB`] above the
    /// pre-cancellation SI level, which is 0 dB on the relative scale.
    pub fn within_sanity_bound(&self) -> bool {
        [&self.hammerstein, &self.learned_mf]
            .into_iter()
            .flatten()
            .flatten()
            .all(|r| r.residual_db() <= SANITY_MARGIN_DB)
    }

    pub fn any_failed(&self) -> bool {
        [&self.hammerstein, &self.learned_mf]
            .into_iter()
            .flatten()
            .any(|r| r.is_err())
    }
}

/// Shared per-configuration state for running many packets.
#[derive(Debug, Clone)]
pub struct PacketRunner {
    cfg: ExperimentConfig,
    link: SiLink,
    hcfg: HammersteinConfig,
}

impl PacketRunner {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            link: SiLink::from_config(cfg)?,
            hcfg: HammersteinConfig::new(cfg.p, cfg.lq)?,
            cfg: cfg.clone(),
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn link(&self) -> &SiLink {
        &self.link
    }

    /// Trains on the noisy pilot block and measures the out-of-sample residual
    /// on an independent data block against its noiseless SI reference.
    pub fn run(&self, packet: u64) -> Result<PacketResult> {
        let cfg = &self.cfg;
        let seed = cfg.master_seed;
        let Pilot {
            channel,
            s_pilot,
            eta_pilot,
        } = self.pilot(packet)?;
        let s_data = gen_ofdm_like_symbols(&mut packet_rng(seed, packet, Stream::DataSymbols), cfg.n)?;
        let y_data = self.link.transmit(&s_data, &channel)?;
        let r_conv = self.link.conventional_receive(&y_data, cfg.n)?;
        let interior = cfg.interior();

        let hammerstein = cfg.method.includes_hammerstein().then(|| {
            let lambda_pilot = self.link.conventional_receive(&eta_pilot, cfg.n_pilot)?;
            let model = hammerstein::fit_with(&s_pilot, &lambda_pilot, &self.hcfg, cfg.ls_options())?;
            let r_hat = hammerstein::regenerate(&model, &s_data)?;
            let eps = hammerstein::cancel(&r_conv, &r_hat)?;
            Ok(MethodResidual {
                ratio: energy_ratio(&eps, &r_conv, interior.clone()),
            })
        });

        let learned_mf = cfg.method.includes_learned_mf().then(|| {
            let mf = fit_mf_with(&eta_pilot, &s_pilot, cfg.m, cfg.lg, cfg.ls_options())?;
            let r = apply_mf(&y_data, &mf, cfg.n)?;
            let eps = cancel_known(&r, &s_data)?;
            Ok(MethodResidual {
                ratio: energy_ratio(&eps, &r, interior.clone()),
            })
        });

        let pre = r_conv[interior.clone()].iter().map(Complex64::norm_sqr).sum::<f64>() / interior.len() as f64;
        Ok(PacketResult {
            packet,
            master_seed: seed,
            pre_cancel_si_db: 10.0 * Float::log10(pre),
            hammerstein,
            learned_mf,
        })
    }
}

struct Pilot {
    channel: MultipathChannel,
    s_pilot: SymbolBlock,
    eta_pilot: SampleStream,
}

impl PacketRunner {
    fn pilot(&self, packet: u64) -> Result<Pilot> {
        let cfg = &self.cfg;
        let seed = cfg.master_seed;
        let channel = draw_channel(
            &mut packet_rng(seed, packet, Stream::Channel),
            cfg.channel_span_symbols,
            cfg.m,
        )?
        .with_timing(cfg.channel_timing);
        let s_pilot = gen_ofdm_like_symbols(&mut packet_rng(seed, packet, Stream::PilotSymbols), cfg.n_pilot)?;
        let y_pilot = self.link.transmit(&s_pilot, &channel)?;
        let eta_pilot = add_awgn(
            &y_pilot,
            NoiseSpec { snr_db: cfg.snr_db },
            &mut packet_rng(seed, packet, Stream::PilotNoise),
        )?;
        Ok(Pilot {
            channel,
            s_pilot,
            eta_pilot,
        })
    }

    /// The learned filter fitted on `packet`'s pilot block.
    pub fn fit_learned_mf(&self, packet: u64) -> Result<LearnedMf> {
        let Pilot { s_pilot, eta_pilot, .. } = self.pilot(packet)?;
        fit_mf_with(&eta_pilot, &s_pilot, self.cfg.m, self.cfg.lg, self.cfg.ls_options())
    }
}

fn energy_ratio(eps: &SymbolBlock, r: &SymbolBlock, range: core::ops::Range<usize>) -> f64 {
    let num: f64 = eps[range.clone()].iter().map(Complex64::norm_sqr).sum();
    let den: f64 = r[range].iter().map(Complex64::norm_sqr).sum();
    num / den
}

/// Runs one packet of `cfg`. For many packets, build a [`PacketRunner`] once.
pub fn run_packet(cfg: &ExperimentConfig, packet: u64) -> Result<PacketResult> {
    PacketRunner::new(cfg)?.run(packet)
}
