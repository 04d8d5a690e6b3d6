//! Square pixel grids and synthetic test phantoms.
//!
//! An image is a flat vector of N² nonnegative reals in row-major order:
//! pixel (r, c) lives at linear index r*N + c. All neighbor arithmetic in
//! this crate (gradients, shrink-factor indexing, blur) wraps periodically.

use crate::error::{Error, Result};

/// N×N image stored as a flat row-major vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    side: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(side: usize, data: Vec<f64>) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidParam(format!(
                "image side must be >= 2, got {side}"
            )));
        }
        if data.len() != side * side {
            return Err(Error::DimensionMismatch {
                expected: side * side,
                got: data.len(),
            });
        }
        Ok(Self { side, data })
    }

    pub fn zeros(side: usize) -> Result<Self> {
        Self::new(side, vec![0.0; side * side])
    }

    pub fn constant(side: usize, value: f64) -> Result<Self> {
        Self::new(side, vec![value; side * side])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.side + col] = value;
    }

    pub fn min(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Synthetic phantom families used by the benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhantomKind {
    /// Nested ellipses on a dark background, in the spirit of the classic
    /// Shepp-Logan head phantom: a large mid-intensity ellipse, an offset
    /// darker ellipse inside it, and a small bright disk at full intensity.
    Disks,
    /// Two axis-aligned rectangles at full and half intensity on a
    /// background at the low end of the range.
    Blocks,
    /// Eight vertical bands stepping linearly from the low to the high end
    /// of the range; strictly positive everywhere when lo > 0.
    Ramp,
}

impl PhantomKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disks" => Ok(Self::Disks),
            "blocks" => Ok(Self::Blocks),
            "ramp" => Ok(Self::Ramp),
            other => Err(Error::InvalidParam(format!(
                "unknown phantom kind '{other}' (expected disks|blocks|ramp)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Disks => "disks",
            Self::Blocks => "blocks",
            Self::Ramp => "ramp",
        }
    }
}

/// Deterministic piecewise-constant phantom with intensities in [lo, hi].
pub fn synth_phantom(kind: PhantomKind, side: usize, lo: f64, hi: f64) -> Result<ImageGrid> {
    if side < 8 {
        return Err(Error::InvalidParam(format!(
            "phantom side must be >= 8, got {side}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi <= lo {
        return Err(Error::InvalidParam(format!(
            "intensity range must satisfy 0 <= lo < hi, got [{lo}, {hi}]"
        )));
    }
    let n = side as f64;
    let span = hi - lo;
    let mut img = ImageGrid::constant(side, lo)?;
    match kind {
        PhantomKind::Disks => {
            let inside = |r: f64, c: f64, cr: f64, cc: f64, ar: f64, ac: f64| {
                let dr = (r - cr) / ar;
                let dc = (c - cc) / ac;
                dr * dr + dc * dc <= 1.0
            };
            for row in 0..side {
                for col in 0..side {
                    let (r, c) = (row as f64 + 0.5, col as f64 + 0.5);
                    let mut v = lo;
                    // outer head ellipse
                    if inside(r, c, 0.5 * n, 0.5 * n, 0.42 * n, 0.36 * n) {
                        v = lo + 0.45 * span;
                    }
                    // darker inner ellipse, offset up-left
                    if inside(r, c, 0.42 * n, 0.42 * n, 0.18 * n, 0.13 * n) {
                        v = lo + 0.2 * span;
                    }
                    // small bright disk, offset down-right
                    if inside(r, c, 0.64 * n, 0.62 * n, 0.09 * n, 0.09 * n) {
                        v = hi;
                    }
                    img.set(row, col, v);
                }
            }
        }
        PhantomKind::Blocks => {
            let b = |f: f64| (f * n) as usize;
            for row in b(0.125)..b(0.5) {
                for col in b(0.125)..b(0.5) {
                    img.set(row, col, hi);
                }
            }
            for row in b(0.5)..b(0.875) {
                for col in b(0.25)..b(0.625) {
                    img.set(row, col, lo + 0.5 * span);
                }
            }
        }
        PhantomKind::Ramp => {
            let bands = 8usize;
            for row in 0..side {
                for col in 0..side {
                    let band = col * bands / side;
                    let v = lo + span * band as f64 / (bands - 1) as f64;
                    img.set(row, col, v);
                }
            }
        }
    }
    Ok(img)
}
