//! Complex discrete-time signal primitives.
//!
//! Symbol-rate sequences ([`SymbolBlock`]) and sample-rate sequences
//! ([`SampleStream`]) are kept as distinct types; the only ways between them
//! are [`upsample`]/[`pulse_shape`] and [`downsample`]/[`matched_filter`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::ops::Deref;

use num_complex::Complex64;
// Redundant when the build graph links std's inherent float math.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A nonempty sequence of complex values at the symbol rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock(Vec<Complex64>);

impl SymbolBlock {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(invalid("symbol block must be nonempty"));
        }
        Ok(Self(data))
    }

    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for SymbolBlock {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// A sequence of complex samples at `oversampling` samples per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    data: Vec<Complex64>,
    oversampling: usize,
}

impl SampleStream {
    pub fn new(data: Vec<Complex64>, oversampling: usize) -> Result<Self> {
        if oversampling == 0 {
            return Err(invalid("oversampling must be at least 1"));
        }
        if data.is_empty() {
            return Err(invalid("sample stream must be nonempty"));
        }
        Ok(Self { data, oversampling })
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.data
    }

    /// Elementwise sum of two streams at the same rate. The shorter stream is
    /// treated as zero-extended.
    pub fn superpose(&self, other: &SampleStream) -> Result<SampleStream> {
        if self.oversampling != other.oversampling {
            return Err(invalid("cannot superpose streams at different rates"));
        }
        let len = self.data.len().max(other.data.len());
        let at = |d: &[Complex64], k: usize| d.get(k).copied().unwrap_or(ZERO);
        let data = (0..len)
            .map(|k| at(&self.data, k) + at(&other.data, k))
            .collect();
        SampleStream::new(data, self.oversampling)
    }

    pub fn scaled(&self, factor: f64) -> SampleStream {
        SampleStream {
            data: self.data.iter().map(|&v| v * factor).collect(),
            oversampling: self.oversampling,
        }
    }
}

impl Deref for SampleStream {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.data
    }
}

/// FIR filter taps spanning `span_symbols` symbols at `oversampling` samples
/// per symbol. Always exactly `oversampling * span_symbols` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FirTaps {
    coeffs: Vec<Complex64>,
    span_symbols: usize,
    oversampling: usize,
}

impl FirTaps {
    pub fn new(coeffs: Vec<Complex64>, span_symbols: usize, oversampling: usize) -> Result<Self> {
        if span_symbols == 0 || oversampling == 0 {
            return Err(invalid("filter span and oversampling must be at least 1"));
        }
        if coeffs.len() != span_symbols * oversampling {
            return Err(invalid("filter length must equal oversampling * span_symbols"));
        }
        Ok(Self {
            coeffs,
            span_symbols,
            oversampling,
        })
    }

    /// Single unit tap at M = 1.
    pub fn delta() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
            span_symbols: 1,
            oversampling: 1,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn span_symbols(&self) -> usize {
        self.span_symbols
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Conjugate time-reverse, i.e. the conventional matched receive filter.
    pub fn matched(&self) -> FirTaps {
        FirTaps {
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
            span_symbols: self.span_symbols,
            oversampling: self.oversampling,
        }
    }
}

/// Sample delay between a symbol entering `tx` (pulse shaping, full
/// convolution) and its peak at the output of `rx`.
///
/// Both filters are symmetric about their midpoints, so the delay is the sum
/// of their half-lengths; for equal lengths it is an integer.
pub fn cascade_delay(tx: &FirTaps, rx: &FirTaps) -> usize {
    (tx.len() + rx.len() - 2) / 2
}

/// Root-raised-cosine taps, symmetric about index `(M*L_g - 1) / 2` and
/// normalized to unit energy.
pub fn rrc_taps(rolloff: f64, span_symbols: usize, oversampling: usize) -> Result<FirTaps> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(invalid("rolloff must lie in (0, 1]"));
    }
    if span_symbols == 0 || oversampling == 0 {
        return Err(invalid("filter span and oversampling must be at least 1"));
    }
    let len = span_symbols * oversampling;
    let center = (len as f64 - 1.0) / 2.0;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| rrc_value((i as f64 - center) / oversampling as f64, rolloff))
        .collect();
    let norm = taps.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut taps {
        *v /= norm;
    }
    FirTaps::new(
        taps.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        span_symbols,
        oversampling,
    )
}

/// Continuous RRC impulse response at `t` symbol periods (unnormalized).
fn rrc_value(t: f64, beta: f64) -> f64 {
    const EPS: f64 = 1e-9;
    if t.abs() < EPS {
        return 1.0 + beta * (4.0 / PI - 1.0);
    }
    if (t.abs() - 1.0 / (4.0 * beta)).abs() < EPS {
        let arg = PI / (4.0 * beta);
        return beta
            * FRAC_1_SQRT_2
            * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Zero-stuffing by `m`: `out[k] = s[k/m]` when `m | k`, else 0.
pub fn upsample(s: &SymbolBlock, m: usize) -> Result<SampleStream> {
    if m == 0 {
        return Err(invalid("upsampling factor must be at least 1"));
    }
    let mut data = vec![ZERO; s.len() * m];
    for (n, &v) in s.iter().enumerate() {
        data[n * m] = v;
    }
    SampleStream::new(data, m)
}

/// `out[n] = x[n*m + phase]` for every complete index.
pub fn downsample(x: &SampleStream, m: usize, phase: usize) -> Result<SymbolBlock> {
    if m == 0 {
        return Err(invalid("downsampling factor must be at least 1"));
    }
    if phase >= m {
        return Err(invalid("downsampling phase must be below the factor"));
    }
    let data: Vec<_> = x.iter().skip(phase).step_by(m).copied().collect();
    SymbolBlock::new(data)
}

/// How much of a linear convolution to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    /// All `len(x) + len(f) - 1` samples.
    Full,
    /// `len(x)` samples starting at the filter's group delay
    /// `floor((len(f) - 1) / 2)`.
    Aligned,
    /// The first `len(x)` samples (no delay compensation).
    Causal,
}

/// Direct-form linear convolution of two complex sequences.
pub fn convolve(x: &[Complex64], f: &[Complex64], mode: FilterMode) -> Vec<Complex64> {
    if x.is_empty() || f.is_empty() {
        return Vec::new();
    }
    let full_len = x.len() + f.len() - 1;
    let (start, len) = match mode {
        FilterMode::Full => (0, full_len),
        FilterMode::Aligned => ((f.len() - 1) / 2, x.len()),
        FilterMode::Causal => (0, x.len()),
    };
    (start..start + len)
        .map(|k| {
            let lo = k.saturating_sub(x.len() - 1);
            let hi = k.min(f.len() - 1);
            (lo..=hi).map(|j| f[j] * x[k - j]).sum()
        })
        .collect()
}

/// Filters a stream with `f`. The filter's oversampling must match the
/// stream's.
pub fn fir_convolve(x: &SampleStream, f: &FirTaps, mode: FilterMode) -> Result<SampleStream> {
    if x.oversampling() != f.oversampling() {
        return Err(invalid("filter and stream oversampling differ"));
    }
    SampleStream::new(convolve(x, f.coeffs(), mode), x.oversampling())
}

/// Transmit pulse shaping, `x[k] = sum_n s[n] g[k - n*M]`, full length
/// `N*M + len(g) - 1`.
pub fn pulse_shape(s: &SymbolBlock, g: &FirTaps) -> Result<SampleStream> {
    let m = g.oversampling();
    let mut out = vec![ZERO; s.len() * m + g.len() - 1];
    for (n, &sym) in s.iter().enumerate() {
        for (j, &c) in g.coeffs().iter().enumerate() {
            out[n * m + j] += sym * c;
        }
    }
    SampleStream::new(out, m)
}

/// Filter-and-downsample receiver, `r[n] = sum_m y[m] g[n*M + delay - m]`
/// for `n < n_symbols`.
///
/// `delay = 0` is the plain symbol-instant sampling; a
/// [`cascade_delay`] offset aligns output `n` with input symbol `n`.
pub fn matched_filter(
    y: &SampleStream,
    g: &FirTaps,
    delay: usize,
    n_symbols: usize,
) -> Result<SymbolBlock> {
    let m = g.oversampling();
    if y.oversampling() != m {
        return Err(invalid("filter and stream oversampling differ"));
    }
    let taps = g.coeffs();
    let out = (0..n_symbols)
        .map(|n| {
            let k = n * m + delay;
            let hi = k.min(taps.len() - 1);
            let lo = k.saturating_sub(y.len() - 1);
            if lo > hi {
                return ZERO;
            }
            (lo..=hi).map(|j| taps[j] * y[k - j]).sum()
        })
        .collect();
    SymbolBlock::new(out)
}

/// Mean power `mean |x|^2`.
pub fn measure_power(x: &[Complex64]) -> Result<f64> {
    if x.is_empty() {
        return Err(invalid("power of an empty sequence"));
    }
    Ok(x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64)
}

/// Peak-to-average power ratio in dB.
pub fn measure_papr_db(x: &[Complex64]) -> Result<f64> {
    let mean = measure_power(x)?;
    let peak = x.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    Ok(10.0 * (peak / mean).log10())
}
