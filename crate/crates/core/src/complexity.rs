//! Real-multiplication counts for both cancellers.
//!
//! These are closed-form evaluations of the normal-equation operation counts,
//! not measurements of this crate's QR-based solver.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityInput {
    pub n: u64,
    pub m: u64,
    pub lg: u64,
    pub lq: u64,
    pub p: u64,
}

impl ComplexityInput {
    pub fn new(n: u64, m: u64, lg: u64, lq: u64, p: u64) -> Result<Self> {
        if n == 0 || m == 0 || lg == 0 || lq == 0 || p == 0 {
            return Err(invalid("complexity inputs must be positive"));
        }
        if p % 2 == 0 {
            return Err(invalid("polynomial degree must be odd"));
        }
        Ok(Self { n, m, lg, lq, p })
    }

    /// `(P + 1) / 2`.
    pub fn p_tilde(&self) -> u64 {
        (self.p + 1) / 2
    }

    fn mf_len(&self) -> u64 {
        self.m * self.lg
    }
}

/// Which filter length multiplies `P~` in the Hammerstein training count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainingSpan {
    /// `P~ L_q`, the number of regressor columns.
    #[default]
    Memory,
    /// `P~ L_g`, as typeset in the closed-form training expression.
    PulseSpan,
}

/// Runtime count of the conventional receiver: matched filter plus
/// regressor construction and regeneration.
pub fn runtime_hammerstein(c: &ComplexityInput) -> u64 {
    runtime_proposed(c) + 6 * c.n * c.p_tilde() * c.lq
}

/// Runtime count of the learned filter: one `N x M L_g` matrix-vector product.
pub fn runtime_proposed(c: &ComplexityInput) -> u64 {
    2 * c.n * (c.mf_len() + 1)
}

pub fn training_hammerstein(c: &ComplexityInput) -> u64 {
    training_hammerstein_with(c, TrainingSpan::Memory)
}

pub fn training_hammerstein_with(c: &ComplexityInput, span: TrainingSpan) -> u64 {
    let len = match span {
        TrainingSpan::Memory => c.lq,
        TrainingSpan::PulseSpan => c.lg,
    };
    let k = c.p_tilde() * len;
    2 * c.n * (c.mf_len() + 1) + 2 * c.n * k * (4 * k + 3) + 4 * k.pow(3)
}

pub fn training_proposed(c: &ComplexityInput) -> u64 {
    let k = c.mf_len();
    4 * c.n * (2 * k * k + k) + 4 * k.pow(3)
}
