//! Diagonal variable metrics, energy norms and scaled projections.
//!
//! A scaled iteration replaces the Euclidean geometry with the norm
//! ‖x‖_D = √(xᵀDx) induced by a symmetric positive definite matrix D.
//! Only diagonal metrics are supported here: they cost O(n) to store and
//! apply, and the projection onto the nonnegative orthant under a diagonal
//! metric stays closed-form (componentwise max with zero). The diagonal
//! entries are clamped into [1/L, L] at construction so that
//! ‖D‖ ≤ L and ‖D⁻¹‖ ≤ L.

use crate::error::{Error, Result};

/// Diagonal scaling matrix with eigenvalues confined to [1/L, L].
#[derive(Debug, Clone, PartialEq)]
pub struct DiagMetric {
    entries: Vec<f64>,
    bound: f64,
}

impl DiagMetric {
    /// Builds a metric from proposed diagonal entries, clamping each one
    /// into [1/bound, bound]. Rejects non-finite entries and bounds < 1.
    pub fn new(entries: Vec<f64>, bound: f64) -> Result<Self> {
        if !bound.is_finite() || bound < 1.0 {
            return Err(Error::InvalidParam(format!(
                "metric bound must be finite and >= 1, got {bound}"
            )));
        }
        let lo = 1.0 / bound;
        let mut clamped = entries;
        for e in &mut clamped {
            if !e.is_finite() {
                return Err(Error::NonFinite {
                    context: "diagonal metric entry",
                });
            }
            *e = e.clamp(lo, bound);
        }
        Ok(Self {
            entries: clamped,
            bound,
        })
    }

    /// The identity metric (all entries one, bound one).
    pub fn identity(n: usize) -> Self {
        Self {
            entries: vec![1.0; n],
            bound: 1.0,
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// D⁻¹; entries 1/dᵢ also lie in [1/L, L], so the bound carries over.
    pub fn inverse(&self) -> DiagMetric {
        DiagMetric {
            entries: self.entries.iter().map(|d| 1.0 / d).collect(),
            bound: self.bound,
        }
    }

    /// Largest diagonal entry, i.e. ‖D‖_∞ for a diagonal matrix.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Matrix-vector product Dx.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(self
            .entries
            .iter()
            .zip(x)
            .map(|(d, xi)| d * xi)
            .collect())
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                got,
            });
        }
        Ok(())
    }
}

/// Energy norm ‖x‖_D = √(Σ dᵢxᵢ²). Reduces to the Euclidean norm for D = I.
pub fn energy_norm(x: &[f64], d: &DiagMetric) -> Result<f64> {
    Ok(energy_dot(x, d, x)?.sqrt())
}

/// Weighted inner product aᵀDb.
pub fn energy_dot(a: &[f64], d: &DiagMetric, b: &[f64]) -> Result<f64> {
    if a.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: a.len(),
        });
    }
    if b.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(d.entries())
        .zip(b)
        .map(|((ai, di), bi)| ai * di * bi)
        .sum())
}

/// Projection onto the nonnegative orthant under the metric induced by D⁻¹.
///
/// For a diagonal metric the minimization of ‖z−x‖²_{D⁻¹} over z ≥ 0 is
/// separable, so the result is componentwise max(0, xᵢ) independently of D.
pub fn project_nonneg_scaled(x: &[f64], d: &DiagMetric) -> Result<Vec<f64>> {
    if x.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            got: x.len(),
        });
    }
    Ok(x.iter().map(|xi| xi.max(0.0)).collect())
}

/// In-place variant used by the solver hot loops.
pub fn project_nonneg_inplace(x: &mut [f64]) {
    for xi in x {
        if *xi < 0.0 {
            *xi = 0.0;
        }
    }
}
