//! Complex linear least squares by Householder QR.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Redundant when the build graph links std's inherent float math.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{check_len, invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative threshold on `|R_jj| / ||A||_F` below which a column counts as
/// dependent.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl DesignMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_len(rows * cols, entries.len())?;
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.cols, x.len())?;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A^H y`.
    pub fn adjoint_mul_vec(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.rows, y.len())?;
        let mut out = vec![ZERO; self.cols];
        for (r, yv) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * yv;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LsOptions {
    /// Tikhonov weight `mu` in `min ||Ax - b||^2 + mu ||x||^2`.
    pub ridge: f64,
}

/// `argmin ||A x - b||_2` for tall `A` with full column rank.
pub fn solve_ls(a: &DesignMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    solve_ls_with(a, b, LsOptions::default())
}

pub fn solve_ls_with(a: &DesignMatrix, b: &[Complex64], opts: LsOptions) -> Result<Vec<Complex64>> {
    check_len(a.rows, b.len())?;
    if a.cols == 0 {
        return Err(invalid("design matrix has no columns"));
    }
    if !(opts.ridge >= 0.0 && opts.ridge.is_finite()) {
        return Err(invalid("ridge weight must be a nonnegative number"));
    }
    let extra = if opts.ridge > 0.0 { a.cols } else { 0 };
    let m = a.rows + extra;
    let n = a.cols;
    if m < n {
        return Err(invalid("least-squares system has fewer rows than columns"));
    }

    // Column-major working copy, stacked with sqrt(mu) I for the ridge.
    let mut q = vec![ZERO; m * n];
    for r in 0..a.rows {
        for c in 0..n {
            q[c * m + r] = a.get(r, c);
        }
    }
    let mut rhs: Vec<Complex64> = b.to_vec();
    if extra > 0 {
        let s = opts.ridge.sqrt();
        for c in 0..n {
            q[c * m + a.rows + c] = Complex64::new(s, 0.0);
        }
        rhs.resize(m, ZERO);
    }

    let scale = q.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let threshold = RANK_TOLERANCE * scale;
    let mut diag = vec![ZERO; n];

    for k in 0..n {
        let (head, tail) = q.split_at_mut((k + 1) * m);
        let col = &mut head[k * m..];
        let norm = col[k..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm <= threshold {
            return Err(Error::Singular { column: k });
        }
        // Reflect x onto alpha e1 with alpha = -e^{i arg x0} ||x||.
        let x0 = col[k];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        col[k] -= alpha;
        let vnorm = col[k..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut col[k..] {
            *v /= vnorm;
        }
        diag[k] = alpha;
        let v = &col[k..];
        for j in 0..n - k - 1 {
            let target = &mut tail[j * m + k..j * m + m];
            reflect(v, target);
        }
        reflect(v, &mut rhs[k..]);
    }

    // Back substitution on R x = Q^H b.
    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let mut acc = rhs[k];
        for (j, xj) in x.iter().enumerate().skip(k + 1) {
            acc -= q[j * m + k] * xj;
        }
        x[k] = acc / diag[k];
    }
    Ok(x)
}

/// Applies `I - 2 v v^H` (with `||v|| = 1`) to `target` in place.
fn reflect(v: &[Complex64], target: &mut [Complex64]) {
    let dot: Complex64 = v.iter().zip(target.iter()).map(|(a, b)| a.conj() * b).sum();
    let f = dot * 2.0;
    for (t, a) in target.iter_mut().zip(v) {
        *t -= a * f;
    }
}
