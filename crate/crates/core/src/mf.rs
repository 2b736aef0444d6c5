//! Learned receive filter for self-interference cancellation.
//!
//! A fractionally spaced filter `g1` of `M * L_g` taps is fitted so that
//! `sum_j g1[j] eta[n*M + j]` reproduces the known transmitted pilot symbol
//! `s[n]`. During data reception the filter output for the interference is
//! then approximately the transmitted symbol itself, and cancellation is a
//! subtraction of `s[n]` with no regeneration model.
//!
//! Observation rows read past the end of short streams as zeros; training and
//! application share [`observation_row`], so the padding is identical in both.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_len, invalid, Error, Result};
use crate::lsq::{solve_ls_with, DesignMatrix, LsOptions};
use crate::signal::{SampleStream, SymbolBlock};

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedMf {
    g1: Vec<Complex64>,
    oversampling: usize,
    span_symbols: usize,
}

impl LearnedMf {
    pub fn new(g1: Vec<Complex64>, oversampling: usize, span_symbols: usize) -> Result<Self> {
        if oversampling == 0 || span_symbols == 0 {
            return Err(invalid("filter span and oversampling must be at least 1"));
        }
        check_len(oversampling * span_symbols, g1.len())?;
        Ok(Self {
            g1,
            oversampling,
            span_symbols,
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.g1
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn span_symbols(&self) -> usize {
        self.span_symbols
    }

    pub fn energy(&self) -> f64 {
        self.g1.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn observation_row(eta: &[Complex64], n: usize, m: usize, len: usize) -> impl Iterator<Item = Complex64> + '_ {
    let start = n * m;
    (start..start + len).map(move |k| eta.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0)))
}

/// `N_p x M L_g` matrix whose row `n` is `eta[n M .. n M + M L_g]`.
pub fn build_observation_matrix(
    eta_pilot: &SampleStream,
    n_pilot: usize,
    oversampling: usize,
    span_symbols: usize,
) -> Result<DesignMatrix> {
    if oversampling == 0 || span_symbols == 0 || n_pilot == 0 {
        return Err(invalid("observation matrix dimensions must be positive"));
    }
    if eta_pilot.oversampling() != oversampling {
        return Err(invalid("stream oversampling differs from the filter's"));
    }
    let len = oversampling * span_symbols;
    if eta_pilot.len() < len {
        return Err(invalid("pilot stream shorter than one observation row"));
    }
    let mut entries = Vec::with_capacity(n_pilot * len);
    for n in 0..n_pilot {
        entries.extend(observation_row(eta_pilot, n, oversampling, len));
    }
    DesignMatrix::from_rows(n_pilot, len, entries)
}

/// Fits `g1` by least squares on the pilot stream and its symbols.
pub fn fit_mf(
    eta_pilot: &SampleStream,
    s_pilot: &SymbolBlock,
    oversampling: usize,
    span_symbols: usize,
) -> Result<LearnedMf> {
    fit_mf_with(eta_pilot, s_pilot, oversampling, span_symbols, LsOptions::default())
}

/// [`fit_mf`] with explicit solver options. A small ridge makes noiseless,
/// strictly band-limited pilot streams solvable.
pub fn fit_mf_with(
    eta_pilot: &SampleStream,
    s_pilot: &SymbolBlock,
    oversampling: usize,
    span_symbols: usize,
    opts: LsOptions,
) -> Result<LearnedMf> {
    let cols = oversampling * span_symbols;
    if s_pilot.len() < cols {
        // Underdetermined: the first column past the pilot count is free.
        return Err(Error::Singular {
            column: s_pilot.len(),
        });
    }
    let e = build_observation_matrix(eta_pilot, s_pilot.len(), oversampling, span_symbols)?;
    let g1 = solve_ls_with(&e, s_pilot, opts)?;
    LearnedMf::new(g1, oversampling, span_symbols)
}

/// Filter output for the first `n_symbols` symbols of `eta`.
pub fn apply_mf(eta: &SampleStream, mf: &LearnedMf, n_symbols: usize) -> Result<SymbolBlock> {
    if eta.oversampling() != mf.oversampling {
        return Err(invalid("stream oversampling differs from the filter's"));
    }
    let len = mf.g1.len();
    let out = (0..n_symbols)
        .map(|n| {
            observation_row(eta, n, mf.oversampling, len)
                .zip(&mf.g1)
                .map(|(e, g)| e * g)
                .sum()
        })
        .collect();
    SymbolBlock::new(out)
}

/// `lambda - s`, elementwise.
pub fn cancel_known(lambda_rx: &SymbolBlock, s_known: &SymbolBlock) -> Result<SymbolBlock> {
    check_len(lambda_rx.len(), s_known.len())?;
    SymbolBlock::new(lambda_rx.iter().zip(s_known.iter()).map(|(a, b)| a - b).collect())
}
