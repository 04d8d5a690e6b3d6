//! Periodic blur operators applied in the Fourier domain.
//!
//! H is circular convolution with a small nonnegative point spread
//! function. The psf is normalized to unit mass at construction, which
//! makes both row and column sums of H equal to one: He = Hᵀe = e. The
//! adjoint Hᵀ is circular correlation, i.e. multiplication by the
//! conjugate transfer function.

use crate::error::{Error, Result};
use crate::imaging::grid::ImageGrid;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// Circular convolution operator with a normalized psf, plus the constant
/// background term b of the imaging model Hx + b.
#[derive(Clone)]
pub struct BlurOperator {
    side: usize,
    /// transfer function: FFT of the psf embedded in the N×N grid
    otf: Vec<Complex<f64>>,
    /// cached Hᵀe (numerically the all-ones vector for a normalized psf)
    ht_e: Vec<f64>,
    background: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for BlurOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlurOperator")
            .field("side", &self.side)
            .field("background", &self.background)
            .finish()
    }
}

impl BlurOperator {
    /// Builds the operator from a k×k psf kernel (k odd, k <= N). The
    /// kernel must be nonnegative with positive mass; it is normalized to
    /// sum one and embedded centered at the origin with periodic wrap.
    pub fn from_kernel(side: usize, kernel: &[f64], ksize: usize, background: f64) -> Result<Self> {
        if kernel.len() != ksize * ksize {
            return Err(Error::DimensionMismatch {
                expected: ksize * ksize,
                got: kernel.len(),
            });
        }
        if ksize == 0 || ksize % 2 == 0 || ksize > side {
            return Err(Error::InvalidParam(format!(
                "psf size must be odd and <= image side, got {ksize} (side {side})"
            )));
        }
        if kernel.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParam(
                "psf entries must be finite and nonnegative".into(),
            ));
        }
        let mass: f64 = kernel.iter().sum();
        if mass <= 0.0 {
            return Err(Error::InvalidParam("psf has zero mass".into()));
        }
        if !(background >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "background must be >= 0, got {background}"
            )));
        }

        // embed normalized kernel with its center at pixel (0,0)
        let mut embedded = vec![0.0f64; side * side];
        let half = (ksize / 2) as isize;
        for kr in 0..ksize {
            for kc in 0..ksize {
                let dr = kr as isize - half;
                let dc = kc as isize - half;
                let r = dr.rem_euclid(side as isize) as usize;
                let c = dc.rem_euclid(side as isize) as usize;
                embedded[r * side + c] += kernel[kr * ksize + kc] / mass;
            }
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(side);
        let inv = planner.plan_fft_inverse(side);
        let mut otf: Vec<Complex<f64>> =
            embedded.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft2_with(&mut otf, side, &fwd);

        let mut op = Self {
            side,
            otf,
            ht_e: Vec::new(),
            background,
            fwd,
            inv,
        };
        op.ht_e = op.apply_adjoint(&vec![1.0; side * side])?;
        Ok(op)
    }

    /// Gaussian psf truncated to a k×k window (the classic 9×9 setup).
    pub fn gaussian(side: usize, ksize: usize, sigma: f64, background: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParam(format!("sigma must be > 0, got {sigma}")));
        }
        let half = (ksize / 2) as isize;
        let mut kernel = Vec::with_capacity(ksize * ksize);
        for kr in -half..=half {
            for kc in -half..=half {
                let d2 = (kr * kr + kc * kc) as f64;
                kernel.push((-d2 / (2.0 * sigma * sigma)).exp());
            }
        }
        Self::from_kernel(side, &kernel, ksize, background)
    }

    /// Identity blur (delta psf).
    pub fn delta(side: usize, background: f64) -> Result<Self> {
        Self::from_kernel(side, &[1.0], 1, background)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    /// Hᵀe, cached at construction; equal to the all-ones vector up to
    /// roundoff for a normalized psf.
    pub fn ht_e(&self) -> &[f64] {
        &self.ht_e
    }

    /// Hx via pointwise multiplication with the transfer function.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_spectral(x, false)
    }

    /// Hᵀx via the conjugate transfer function.
    pub fn apply_adjoint(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_spectral(x, true)
    }

    pub fn apply_grid(&self, x: &ImageGrid) -> Result<ImageGrid> {
        ImageGrid::new(self.side, self.apply(x.data())?)
    }

    fn apply_spectral(&self, x: &[f64], adjoint: bool) -> Result<Vec<f64>> {
        let n = self.side * self.side;
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft2_with(&mut buf, self.side, &self.fwd);
        if adjoint {
            for (b, h) in buf.iter_mut().zip(&self.otf) {
                *b *= h.conj();
            }
        } else {
            for (b, h) in buf.iter_mut().zip(&self.otf) {
                *b *= h;
            }
        }
        fft2_with(&mut buf, self.side, &self.inv);
        let scale = 1.0 / n as f64;
        Ok(buf.iter().map(|c| c.re * scale).collect())
    }
}

/// In-place 2-D FFT over an N×N row-major complex buffer: transform the
/// rows, then the columns (via transpose, row pass, transpose back).
fn fft2_with(buf: &mut [Complex<f64>], side: usize, plan: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex::default(); plan.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(side) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose(buf, side);
    for row in buf.chunks_exact_mut(side) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose(buf, side);
}

fn transpose(buf: &mut [Complex<f64>], side: usize) {
    for r in 0..side {
        for c in (r + 1)..side {
            buf.swap(r * side + c, c * side + r);
        }
    }
}
