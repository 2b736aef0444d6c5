//! Conventional memory-polynomial (Hammerstein) canceller.
//!
//! The regressor for symbol `n` stacks `s[n-l] |s[n-l]|^(p-1)` for taps
//! `l = 0..L_q` (outer) and odd degrees `p = 1, 3, ..., P` (inner). Symbols
//! before the start of the block are zero. The stacked coefficient vector is
//! fitted unconstrained, so it is not forced into a rank-one
//! tap-times-polynomial product.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_len, invalid, Result};
use crate::lsq::{solve_ls_with, DesignMatrix, LsOptions};
use crate::signal::SymbolBlock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammersteinConfig {
    degree: usize,
    memory: usize,
}

impl HammersteinConfig {
    /// `degree` is the maximum odd polynomial degree `P`, `memory` the FIR
    /// length `L_q` in symbols.
    pub fn new(degree: usize, memory: usize) -> Result<Self> {
        if degree == 0 || degree % 2 == 0 {
            return Err(invalid("polynomial degree must be odd and at least 1"));
        }
        if memory == 0 {
            return Err(invalid("Hammerstein memory must be at least 1 symbol"));
        }
        Ok(Self { degree, memory })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Basis functions per tap, `(P + 1) / 2`.
    pub fn terms_per_tap(&self) -> usize {
        (self.degree + 1) / 2
    }

    pub fn n_coeffs(&self) -> usize {
        self.memory * self.terms_per_tap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HammersteinModel {
    q: Vec<Complex64>,
    config: HammersteinConfig,
}

impl HammersteinModel {
    pub fn new(q: Vec<Complex64>, config: HammersteinConfig) -> Result<Self> {
        check_len(config.n_coeffs(), q.len())?;
        Ok(Self { q, config })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.q
    }

    pub fn config(&self) -> HammersteinConfig {
        self.config
    }
}

/// One regressor row from `window = [s[n], s[n-1], ..., s[n-L_q+1]]`.
pub fn basis_row(window: &[Complex64], cfg: &HammersteinConfig) -> Result<Vec<Complex64>> {
    check_len(cfg.memory, window.len())?;
    let mut row = Vec::with_capacity(cfg.n_coeffs());
    for &s in window {
        push_terms(&mut row, s, cfg.terms_per_tap());
    }
    Ok(row)
}

fn push_terms(row: &mut Vec<Complex64>, s: Complex64, terms: usize) {
    let p = s.norm_sqr();
    let mut v = s;
    for _ in 0..terms {
        row.push(v);
        v *= p;
    }
}

/// The `N x L_q (P+1)/2` regressor matrix of a block.
pub fn build_regressor(s: &SymbolBlock, cfg: &HammersteinConfig) -> Result<DesignMatrix> {
    if s.len() < cfg.memory {
        return Err(invalid("block shorter than the Hammerstein memory"));
    }
    let cols = cfg.n_coeffs();
    let terms = cfg.terms_per_tap();
    let zero = Complex64::new(0.0, 0.0);
    let mut entries = Vec::with_capacity(s.len() * cols);
    for n in 0..s.len() {
        for l in 0..cfg.memory {
            let v = if n >= l { s[n - l] } else { zero };
            push_terms(&mut entries, v, terms);
        }
    }
    DesignMatrix::from_rows(s.len(), cols, entries)
}

/// Least-squares fit of the stacked coefficients from pilot symbols and the
/// received pilot symbols.
pub fn fit(
    s_pilot: &SymbolBlock,
    lambda_pilot: &SymbolBlock,
    cfg: &HammersteinConfig,
) -> Result<HammersteinModel> {
    fit_with(s_pilot, lambda_pilot, cfg, LsOptions::default())
}

/// [`fit`] with explicit solver options.
pub fn fit_with(
    s_pilot: &SymbolBlock,
    lambda_pilot: &SymbolBlock,
    cfg: &HammersteinConfig,
    opts: LsOptions,
) -> Result<HammersteinModel> {
    check_len(s_pilot.len(), lambda_pilot.len())?;
    if s_pilot.len() < cfg.n_coeffs() {
        return Err(invalid("fewer pilot symbols than Hammerstein coefficients"));
    }
    let regressor = build_regressor(s_pilot, cfg)?;
    let q = solve_ls_with(&regressor, lambda_pilot, opts)?;
    HammersteinModel::new(q, *cfg)
}

/// Regenerated interference symbols for a data block.
pub fn regenerate(model: &HammersteinModel, s_data: &SymbolBlock) -> Result<SymbolBlock> {
    let regressor = build_regressor(s_data, &model.config)?;
    SymbolBlock::new(regressor.mul_vec(&model.q)?)
}

/// `lambda - r_hat`, elementwise.
pub fn cancel(lambda_rx: &SymbolBlock, r_hat: &SymbolBlock) -> Result<SymbolBlock> {
    check_len(lambda_rx.len(), r_hat.len())?;
    SymbolBlock::new(lambda_rx.iter().zip(r_hat.iter()).map(|(a, b)| a - b).collect())
}
