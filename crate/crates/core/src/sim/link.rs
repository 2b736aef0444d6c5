use alloc::vec;

use num_complex::Complex64;

use crate::error::Result;
use crate::frontend::{apply_channel, set_ibo, Amplifier, MultipathChannel, RappPaModel};
use crate::signal::{cascade_delay, matched_filter, pulse_shape, rrc_taps, FirTaps, SampleStream, SymbolBlock};

use super::config::ExperimentConfig;

/// Transmit side of the self-interference path and the conventional receive
/// filter matched to it.
#[derive(Debug, Clone)]
pub struct SiLink {
    pulse: FirTaps,
    receive: FirTaps,
    amplifier: Amplifier,
    delay: usize,
}

impl SiLink {
    /// RRC pulse for `M > 1`; a delta padded to `L_g` taps for `M = 1`. The
    /// Rapp drive is set so that the nominal pulse-shaped signal power
    /// `|g_T|^2 / M` sits `ibo_db` below compression.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let pulse = if cfg.m == 1 {
            let mut taps = vec![Complex64::new(0.0, 0.0); cfg.lg];
            taps[0] = Complex64::new(1.0, 0.0);
            FirTaps::new(taps, cfg.lg, 1)?
        } else {
            rrc_taps(cfg.rolloff, cfg.lg, cfg.m)?
        };
        let amplifier = if cfg.ibo_db == f64::INFINITY {
            Amplifier::Linear
        } else {
            let pa = RappPaModel::new(cfg.rapp_smoothness, 1.0)?;
            Amplifier::Rapp(set_ibo(&pa, cfg.ibo_db, pulse.energy() / cfg.m as f64)?)
        };
        Ok(Self::with_parts(pulse, amplifier))
    }

    pub fn with_parts(pulse: FirTaps, amplifier: Amplifier) -> Self {
        let receive = pulse.matched();
        let delay = cascade_delay(&pulse, &receive);
        Self {
            pulse,
            receive,
            amplifier,
            delay,
        }
    }

    pub fn pulse(&self) -> &FirTaps {
        &self.pulse
    }

    pub fn receive_filter(&self) -> &FirTaps {
        &self.receive
    }

    pub fn amplifier(&self) -> &Amplifier {
        &self.amplifier
    }

    /// Noiseless SI waveform at the receiver input.
    pub fn transmit(&self, s: &SymbolBlock, channel: &MultipathChannel) -> Result<SampleStream> {
        let x = pulse_shape(s, &self.pulse)?;
        Ok(apply_channel(&self.amplifier.amplify(&x), channel))
    }

    /// Conventional matched-filter output aligned with the transmitted symbols.
    pub fn conventional_receive(&self, eta: &SampleStream, n_symbols: usize) -> Result<SymbolBlock> {
        matched_filter(eta, &self.receive, self.delay, n_symbols)
    }
}
