//! Baseband-equivalent radio impairments: power amplifier, multipath channel
//! and receiver noise.

use alloc::vec::Vec;

use num_complex::Complex64;
// Redundant when the build graph links std's inherent float math.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::signal::{convolve, FilterMode, SampleStream};

/// Rapp solid-state amplifier AM/AM curve
/// `out = g x / (1 + (|g x| / A)^(2 sigma))^(1 / (2 sigma))`.
///
/// There is no AM/PM term: the output phase always equals the input phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RappPaModel {
    smoothness: f64,
    sat_amplitude: f64,
    input_gain: f64,
}

impl RappPaModel {
    pub fn new(smoothness: f64, sat_amplitude: f64) -> Result<Self> {
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(invalid("Rapp smoothness must be positive"));
        }
        if !(sat_amplitude > 0.0 && sat_amplitude.is_finite()) {
            return Err(invalid("Rapp saturation amplitude must be positive"));
        }
        Ok(Self {
            smoothness,
            sat_amplitude,
            input_gain: 1.0,
        })
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn sat_amplitude(&self) -> f64 {
        self.sat_amplitude
    }

    pub fn input_gain(&self) -> f64 {
        self.input_gain
    }

    pub fn with_input_gain(self, input_gain: f64) -> Self {
        Self { input_gain, ..self }
    }

    /// Ratio `|out| / |in|` of the curve at input amplitude `a`, unit gain.
    fn compression(&self, a: f64) -> f64 {
        let two_s = 2.0 * self.smoothness;
        (1.0 + (a / self.sat_amplitude).powf(two_s)).powf(-1.0 / two_s)
    }

    pub fn amplify_sample(&self, x: Complex64) -> Complex64 {
        let u = x * self.input_gain;
        let a = u.norm();
        if a == 0.0 {
            return u;
        }
        u * self.compression(a)
    }

    /// Input power (unit gain) at which the output sits 3 dB below the linear
    /// extrapolation, found by bisection on the amplitude.
    pub fn compression_point_3db(&self) -> Result<f64> {
        let target = 10f64.powf(-3.0 / 20.0);
        let mut lo = 0.0;
        let mut hi = self.sat_amplitude;
        let mut expansions = 0;
        while self.compression(hi) > target {
            hi *= 2.0;
            expansions += 1;
            if expansions > 64 {
                return Err(Error::NoConvergence("3 dB point not bracketed".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.compression(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                let a = 0.5 * (lo + hi);
                return Ok(a * a);
            }
        }
        Err(Error::NoConvergence("3 dB bisection did not settle".into()))
    }
}

/// Returns `pa` with its input gain chosen so that a drive signal of mean
/// power `ref_input_power` sits `ibo_db` below the 3 dB compression point.
/// An infinite back-off gives zero gain.
pub fn set_ibo(pa: &RappPaModel, ibo_db: f64, ref_input_power: f64) -> Result<RappPaModel> {
    if !(ref_input_power > 0.0 && ref_input_power.is_finite()) {
        return Err(invalid("reference input power must be positive"));
    }
    if ibo_db.is_nan() || ibo_db == f64::NEG_INFINITY {
        return Err(invalid("input back-off must be a number"));
    }
    if ibo_db == f64::INFINITY {
        return Ok(pa.with_input_gain(0.0));
    }
    let p3 = pa.compression_point_3db()?;
    let target = p3 * 10f64.powf(-ibo_db / 10.0);
    Ok(pa.with_input_gain((target / ref_input_power).sqrt()))
}

pub fn rapp_amplify(x: &SampleStream, pa: &RappPaModel) -> SampleStream {
    let data = x.iter().map(|&v| pa.amplify_sample(v)).collect();
    SampleStream::new(data, x.oversampling()).expect("nonempty input")
}

/// Memoryless transmit amplifier in front of the self-interference channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Amplifier {
    Linear,
    Rapp(RappPaModel),
    /// `sum_i c[i] x |x|^(2i)`, i.e. coefficients of the odd degrees 1, 3, 5, ...
    OddPolynomial(Vec<Complex64>),
}

impl Amplifier {
    pub fn amplify(&self, x: &SampleStream) -> SampleStream {
        match self {
            Amplifier::Linear => x.clone(),
            Amplifier::Rapp(pa) => rapp_amplify(x, pa),
            Amplifier::OddPolynomial(coeffs) => {
                let data = x
                    .iter()
                    .map(|&v| {
                        let p = v.norm_sqr();
                        let mut basis = v;
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &c in coeffs {
                            acc += c * basis;
                            basis *= p;
                        }
                        acc
                    })
                    .collect();
                SampleStream::new(data, x.oversampling()).expect("nonempty input")
            }
        }
    }
}

/// Where a channel's impulse response sits relative to the transmit instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelTiming {
    /// Output sample `k` is centered on tap `floor((len - 1) / 2)`, like every
    /// other filter in the chain.
    #[default]
    Centered,
    /// Tap 0 is the first arrival; nothing precedes the transmit instant.
    Causal,
}

impl ChannelTiming {
    fn mode(self) -> FilterMode {
        match self {
            ChannelTiming::Centered => FilterMode::Aligned,
            ChannelTiming::Causal => FilterMode::Causal,
        }
    }

    fn reference_tap(self, len: usize) -> usize {
        match self {
            ChannelTiming::Centered => (len - 1) / 2,
            ChannelTiming::Causal => 0,
        }
    }
}

/// Sample-spaced multipath impulse response, normalized to unit energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathChannel {
    taps: Vec<Complex64>,
    span_symbols: usize,
    timing: ChannelTiming,
}

impl MultipathChannel {
    /// Normalizes `taps` to unit energy. The length must be
    /// `span_symbols * oversampling`.
    pub fn new(taps: Vec<Complex64>, span_symbols: usize, oversampling: usize) -> Result<Self> {
        if span_symbols == 0 || oversampling == 0 {
            return Err(invalid("channel span and oversampling must be at least 1"));
        }
        if taps.len() != span_symbols * oversampling {
            return Err(invalid("channel length must equal span * oversampling"));
        }
        let energy: f64 = taps.iter().map(|t| t.norm_sqr()).sum();
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(invalid("channel must have finite nonzero energy"));
        }
        let scale = energy.sqrt().recip();
        Ok(Self {
            taps: taps.into_iter().map(|t| t * scale).collect(),
            span_symbols,
            timing: ChannelTiming::default(),
        })
    }

    pub fn with_timing(mut self, timing: ChannelTiming) -> Self {
        self.timing = timing;
        self
    }

    /// Pass-through channel of one symbol span under `timing`.
    pub fn identity(oversampling: usize, timing: ChannelTiming) -> Result<Self> {
        let len = oversampling.max(1);
        let mut taps = alloc::vec![Complex64::new(0.0, 0.0); len];
        taps[timing.reference_tap(len)] = Complex64::new(1.0, 0.0);
        Ok(Self::new(taps, 1, oversampling)?.with_timing(timing))
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn span_symbols(&self) -> usize {
        self.span_symbols
    }

    pub fn timing(&self) -> ChannelTiming {
        self.timing
    }
}

/// Draws `span_symbols * oversampling` i.i.d. circular Gaussian taps with a
/// uniform power profile, normalized to unit energy, with centered timing.
pub fn draw_channel<R: Rng + ?Sized>(
    rng: &mut R,
    span_symbols: usize,
    oversampling: usize,
) -> Result<MultipathChannel> {
    let len = span_symbols * oversampling;
    let taps = (0..len).map(|_| complex_gaussian(rng, 1.0)).collect();
    MultipathChannel::new(taps, span_symbols, oversampling)
}

/// Convolution with the channel, keeping the input length and trimming
/// according to the channel's timing.
pub fn apply_channel(x: &SampleStream, h: &MultipathChannel) -> SampleStream {
    let data = convolve(x, h.taps(), h.timing.mode());
    SampleStream::new(data, x.oversampling()).expect("nonempty input")
}

/// Receiver noise level, as signal power over noise power before the matched
/// filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
}

/// Adds i.i.d. circular Gaussian noise of variance `power(x) / 10^(snr/10)`.
/// `snr_db = +inf` returns `x` unchanged.
pub fn add_awgn<R: Rng + ?Sized>(x: &SampleStream, spec: NoiseSpec, rng: &mut R) -> Result<SampleStream> {
    if spec.snr_db.is_nan() {
        return Err(invalid("SNR must be a number"));
    }
    if spec.snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    let power = crate::signal::measure_power(x)?;
    let variance = power / 10f64.powf(spec.snr_db / 10.0);
    Ok(add_noise_with_variance(x, variance, rng))
}

/// Adds circular Gaussian noise with per-complex-sample variance `variance`.
pub fn add_noise_with_variance<R: Rng + ?Sized>(
    x: &SampleStream,
    variance: f64,
    rng: &mut R,
) -> SampleStream {
    let data = x.iter().map(|&v| v + complex_gaussian(rng, variance)).collect();
    SampleStream::new(data, x.oversampling()).expect("nonempty input")
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{measure_power, SampleStream};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn stream(v: &[Complex64], m: usize) -> SampleStream {
        SampleStream::new(v.to_vec(), m).unwrap()
    }

    #[test]
    fn rapp_small_signal_is_linear() {
        let pa = RappPaModel::new(2.0, 1.0).unwrap().with_input_gain(3.0);
        let x = Complex64::new(1e-3, -2e-3);
        let y = pa.amplify_sample(x);
        assert!(((y - x * 3.0).norm() / (x * 3.0).norm()) < 1e-3);
    }

    #[test]
    fn rapp_closed_form_points() {
        let pa = RappPaModel::new(2.0, 1.0).unwrap();
        let y = pa.amplify_sample(Complex64::new(0.0, 1.0));
        assert!((y.norm() - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!((y.arg() - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let big = pa.amplify_sample(Complex64::new(1e3, 0.0));
        assert!((big.norm() - 1.0).abs() < 1e-9 && big.norm() < 1.0);
    }

    #[test]
    fn rapp_rejects_bad_parameters() {
        assert!(RappPaModel::new(0.0, 1.0).is_err());
        assert!(RappPaModel::new(2.0, -1.0).is_err());
    }

    #[test]
    fn compression_point_matches_grid_scan() {
        let pa = RappPaModel::new(2.0, 1.0).unwrap();
        let p3 = pa.compression_point_3db().unwrap();
        // Dense amplitude scan of the gain curve, independent of the bisection.
        let target_db = -3.0;
        let mut best = (f64::INFINITY, 0.0);
        let steps = 4_000_000;
        for i in 1..=steps {
            let a = 4.0 * i as f64 / steps as f64;
            let out = pa.amplify_sample(Complex64::new(a, 0.0)).norm();
            let err = (20.0 * (out / a).log10() - target_db).abs();
            if err < best.0 {
                best = (err, a);
            }
        }
        let grid = best.1 * best.1;
        assert!(((p3 - grid) / grid).abs() < 1e-6, "{p3} vs {grid}");
        // Closed form for this curve: a = A (10^(0.3 sigma) - 1)^(1 / (2 sigma)).
        let closed = (10f64.powf(0.6) - 1.0).powf(0.25).powi(2);
        assert!(((p3 - closed) / closed).abs() < 1e-9);
    }

    #[test]
    fn set_ibo_places_mean_input_power() {
        let pa = RappPaModel::new(2.0, 1.0).unwrap();
        let p3 = pa.compression_point_3db().unwrap();
        let tuned = set_ibo(&pa, 5.0, 0.125).unwrap();
        let drive = tuned.input_gain().powi(2) * 0.125;
        assert!((10.0 * (p3 / drive).log10() - 5.0).abs() < 1e-9);
        assert_eq!(set_ibo(&pa, f64::INFINITY, 0.125).unwrap().input_gain(), 0.0);
        assert!(set_ibo(&pa, 5.0, 0.0).is_err());
        assert!(set_ibo(&pa, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn odd_polynomial_amplifier() {
        let amp = Amplifier::OddPolynomial(alloc::vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.1, 0.05),
        ]);
        let x = Complex64::new(0.5, 0.5);
        let y = amp.amplify(&stream(&[x], 1));
        let expected = x + Complex64::new(-0.1, 0.05) * x * x.norm_sqr();
        assert!((y[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn channel_draws_are_unit_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = draw_channel(&mut rng, 4, 8).unwrap();
        assert_eq!(h.taps().len(), 32);
        for _ in 0..50 {
            let h = draw_channel(&mut rng, 4, 8).unwrap();
            let e: f64 = h.taps().iter().map(|t| t.norm_sqr()).sum();
            assert!((e - 1.0).abs() < 1e-9);
        }
        let one = draw_channel(&mut rng, 1, 1).unwrap();
        assert!((one.taps()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_channel_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = draw_channel(&mut rng, 2, 3).unwrap();
        let x: Vec<_> = (0..30).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        for (timing, offset) in [(ChannelTiming::Causal, 0), (ChannelTiming::Centered, 2)] {
            let h = h.clone().with_timing(timing);
            let y = apply_channel(&stream(&x, 3), &h);
            assert_eq!(y.len(), x.len());
            for k in 0..x.len() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, t) in h.taps().iter().enumerate() {
                    if j <= k + offset && k + offset - j < x.len() {
                        acc += t * x[k + offset - j];
                    }
                }
                assert!((y[k] - acc).norm() < 1e-12);
            }
            for m in [1, 3, 8] {
                let xs: Vec<_> = (0..20).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
                let id = MultipathChannel::identity(m, timing).unwrap();
                assert_eq!(apply_channel(&stream(&xs, m), &id).as_slice(), &xs[..]);
            }
        }
    }

    #[test]
    fn amplifier_then_channel_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pa = RappPaModel::new(2.0, 1.0).unwrap().with_input_gain(1.5);
        let h = draw_channel(&mut rng, 2, 2).unwrap();
        let x: Vec<_> = (0..20).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let y = apply_channel(&rapp_amplify(&stream(&x, 2), &pa), &h);
        let fx: Vec<_> = x.iter().map(|&v| pa.amplify_sample(v)).collect();
        let oracle = convolve(&fx, h.taps(), FilterMode::Aligned);
        for (a, b) in y.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn awgn_power_and_determinism() {
        let x = stream(&alloc::vec![Complex64::new(1.0, 0.0); 100_000], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let y = add_awgn(&x, NoiseSpec { snr_db: 0.0 }, &mut rng).unwrap();
        let noise: Vec<_> = y.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let ratio = measure_power(&noise).unwrap() / measure_power(&x).unwrap();
        assert!((0.95..=1.05).contains(&ratio), "{ratio}");

        let clean = add_awgn(&x, NoiseSpec { snr_db: f64::INFINITY }, &mut rng).unwrap();
        assert_eq!(clean, x);

        let short = stream(&[Complex64::new(1.0, 1.0); 64], 1);
        let a = add_awgn(&short, NoiseSpec { snr_db: 3.0 }, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = add_awgn(&short, NoiseSpec { snr_db: 3.0 }, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn rapp_is_odd_and_bounded(
            re in -10.0..10.0f64,
            im in -10.0..10.0f64,
            gain in 0.01..10.0f64,
            sigma in 0.5..6.0f64,
        ) {
            let pa = RappPaModel::new(sigma, 1.0).unwrap().with_input_gain(gain);
            let x = Complex64::new(re, im);
            let y = pa.amplify_sample(x);
            prop_assert!((pa.amplify_sample(-x) + y).norm() <= 1e-12);
            prop_assert!(y.norm() <= (gain * x.norm()).min(1.0) + 1e-12);
            if x.norm() > 1e-9 {
                prop_assert!((y.arg() - x.arg()).abs() < 1e-9);
            }
        }

        #[test]
        fn rapp_is_monotone(a in 0.0..20.0f64, da in 1e-6..1.0f64) {
            let pa = RappPaModel::new(2.0, 1.0).unwrap();
            let lo = pa.amplify_sample(Complex64::new(a, 0.0)).norm();
            let hi = pa.amplify_sample(Complex64::new(a + da, 0.0)).norm();
            prop_assert!(hi >= lo);
        }

        #[test]
        fn channel_commutes_with_scaling(seed in 0u64..1000, sre in -3.0..3.0f64, sim in -3.0..3.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = draw_channel(&mut rng, 2, 4).unwrap();
            let x: Vec<_> = (0..24).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let s = Complex64::new(sre, sim);
            let scaled: Vec<_> = x.iter().map(|v| v * s).collect();
            let a = apply_channel(&stream(&scaled, 4), &h);
            let b = apply_channel(&stream(&x, 4), &h);
            for (u, v) in a.iter().zip(b.iter()) {
                prop_assert!((u - v * s).norm() <= 1e-12 * (1.0 + s.norm()));
            }
        }
    }
}
