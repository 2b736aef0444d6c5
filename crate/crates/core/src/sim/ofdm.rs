use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::signal::SymbolBlock;

/// One block of `n` time-domain symbols: the inverse DFT of `n` i.i.d.
/// uniform QPSK subcarriers, scaled to unit mean power.
pub fn gen_ofdm_like_symbols<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SymbolBlock> {
    if !n.is_power_of_two() {
        return Err(invalid("block length must be a power of two"));
    }
    let subcarriers: Vec<Complex64> = (0..n)
        .map(|_| {
            let re = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let im = if rng.random::<bool>() { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        })
        .collect();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64))
        .collect();
    let mut time: Vec<Complex64> = (0..n)
        .map(|k| {
            subcarriers
                .iter()
                .enumerate()
                .map(|(f, &x)| x * twiddle[(f * k) % n])
                .sum()
        })
        .collect();
    let power = time.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    let scale = Float::sqrt(power).recip();
    for v in &mut time {
        *v *= scale;
    }
    SymbolBlock::new(time)
}

/// `n` equiprobable BPSK symbols `+-1` and the bits they carry (`true` is `-1`).
pub fn gen_bpsk_symbols<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(SymbolBlock, Vec<bool>)> {
    let bits: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let symbols = bits
        .iter()
        .map(|&b| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0))
        .collect();
    Ok((SymbolBlock::new(symbols)?, bits))
}
