//! Seeded Poisson data simulation.
//!
//! Pipeline (all parameters recorded in the problem manifest):
//!
//! 1. rescale the ground truth so its maximum intensity equals `i_max`:
//!    x_s = x_true * s with s = i_max / max(x_true);
//! 2. blur and add the background in that count domain: λ = H x_s + b;
//! 3. draw one Poisson sample per pixel from a ChaCha8 stream seeded with
//!    the problem seed;
//! 4. scale back to the original intensity range: g = counts / s.
//!
//! The background stays in the count domain; the equivalent background for
//! the scaled-back data is b_eff = b / s, which is what a solver working
//! on g must use. Determinism: a fixed seed yields bitwise-identical data.

use crate::error::{Error, Result};
use crate::imaging::blur::BlurOperator;
use crate::imaging::grid::ImageGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Simulated observation plus the bookkeeping needed to pose the inverse
/// problem consistently.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    /// Observed image in the intensity range of the ground truth.
    pub g: ImageGrid,
    /// Raw Poisson counts (g * scale).
    pub counts: ImageGrid,
    /// Rescale factor s = i_max / max(x_true).
    pub scale: f64,
    /// Background in the count domain, as passed in.
    pub background: f64,
    /// Background consistent with `g`: b / scale.
    pub background_effective: f64,
}

/// Simulates Poisson-corrupted blurred data from a ground-truth image.
pub fn simulate_data(
    x_true: &ImageGrid,
    op: &BlurOperator,
    i_max: f64,
    b: f64,
    seed: u64,
) -> Result<SimulatedData> {
    if op.side() != x_true.side() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            got: op.side() * op.side(),
        });
    }
    if !(i_max > 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "need i_max > 0 and b >= 0, got i_max={i_max}, b={b}"
        )));
    }
    let peak = x_true.max();
    if !(peak > 0.0) {
        return Err(Error::InvalidParam(
            "ground truth must have a positive maximum".into(),
        ));
    }
    let scale = i_max / peak;
    let scaled: Vec<f64> = x_true.data().iter().map(|v| v * scale).collect();
    let blurred = op.apply(&scaled)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(blurred.len());
    for &m in &blurred {
        let lambda = (m + b).max(0.0); // blur roundoff can leave -1e-17
        counts.push(sample_poisson(&mut rng, lambda)?);
    }
    let g: Vec<f64> = counts.iter().map(|c| c / scale).collect();
    Ok(SimulatedData {
        g: ImageGrid::new(x_true.side(), g)?,
        counts: ImageGrid::new(x_true.side(), counts)?,
        scale,
        background: b,
        background_effective: b / scale,
    })
}

fn sample_poisson(rng: &mut ChaCha8Rng, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::InvalidParam(format!("poisson rate {lambda}: {e}")))?;
    Ok(dist.sample(rng))
}
