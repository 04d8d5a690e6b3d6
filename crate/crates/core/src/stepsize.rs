//! Stepsize schedules and their summability checks.
//!
//! The polynomial family used throughout the experiments is
//!
//! ```text
//! tau_k   = t1 + t2*k
//! alpha_k = 1 / (t3 + t4*k)
//! gamma_k = t5 / k^(1+t6)        (gamma_0 := t5)
//! L_k     = sqrt(1 + gamma_k)
//! ```
//!
//! With t4 > 0 the primal stepsizes form a diminishing, divergent,
//! square-summable sequence (alpha_k = Θ(1/k), so Σ alpha_k = ∞ and
//! Σ alpha_k² < ∞); with t2 > 0 the dual stepsizes diverge, which drives
//! the subgradient inaccuracy eps_k = O(1/tau_k) to zero fast enough for
//! Σ alpha_k·eps_k < ∞; with t6 > 0 the metric-bound increments gamma_k
//! are summable, keeping the products Π(1+gamma_j) bounded.
//!
//! gamma_0 is not defined by the display above (k = 0); we reuse t5, which
//! only affects the very first scaling bound and deliberately keeps L_0
//! large, matching the observation that generous freedom for the initial
//! scaling matrix helps in practice.
//!
//! Validation is structural: it inspects the exponents of the parametric
//! form rather than summing finitely many terms, since summability is not
//! decidable from any finite prefix. Numerical Cauchy checks live in tests.

use crate::error::{Error, Result};
use std::fmt;

/// Polynomial stepsize schedule, parameterized by the six coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolySchedule {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
}

/// One evaluation of a schedule at iteration k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValues {
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    /// Scaling bound L = sqrt(1 + gamma) >= 1.
    pub scale_bound: f64,
}

impl PolySchedule {
    pub fn new(t: [f64; 6]) -> Result<Self> {
        if t.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParam(format!(
                "schedule coefficients must be finite and nonnegative, got {t:?}"
            )));
        }
        Ok(Self {
            t1: t[0],
            t2: t[1],
            t3: t[2],
            t4: t[3],
            t5: t[4],
            t6: t[5],
        })
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.t1, self.t2, self.t3, self.t4, self.t5, self.t6]
    }

    /// Evaluates (alpha_k, tau_k, gamma_k, L_k).
    pub fn at(&self, k: usize) -> Result<ScheduleValues> {
        let alpha = self.alpha_at(k)?;
        let tau = self.tau_at(k);
        let gamma = self.gamma_at(k);
        let scale_bound = (1.0 + gamma).sqrt();
        if !tau.is_finite() || !gamma.is_finite() || !scale_bound.is_finite() {
            return Err(Error::NonFinite {
                context: "schedule evaluation",
            });
        }
        Ok(ScheduleValues {
            alpha,
            tau,
            gamma,
            scale_bound,
        })
    }

    pub fn tau_at(&self, k: usize) -> f64 {
        self.t1 + self.t2 * k as f64
    }

    pub fn gamma_at(&self, k: usize) -> f64 {
        if k == 0 {
            self.t5
        } else {
            self.t5 / (k as f64).powf(1.0 + self.t6)
        }
    }

    /// The level strategies provide no alpha schedule, so this is the only
    /// accessor that can fail (t3 = t4 = 0).
    pub fn alpha_at(&self, k: usize) -> Result<f64> {
        let alpha = 1.0 / (self.t3 + self.t4 * k as f64);
        if !alpha.is_finite() {
            return Err(Error::NonFinite {
                context: "schedule evaluation",
            });
        }
        Ok(alpha)
    }
}

/// A named summability condition that a schedule can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// alpha_0 = 1/t3 is not finite and positive (t3 <= 0).
    AlphaNotPositive,
    /// t4 = 0 keeps alpha constant, so Σ alpha_k² = ∞.
    AlphaSquaredNotSummable,
    /// t5 > 0 with t6 = 0 gives gamma_k = t5/k, so Σ gamma_k = ∞.
    GammaNotSummable,
    /// t2 = 0 keeps tau bounded, so eps_k = O(1/tau_k) does not vanish
    /// and Σ alpha_k·eps_k = ∞.
    TauBounded,
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Self::AlphaNotPositive => "alpha_0 = 1/t3 must be finite and positive (t3 > 0)",
            Self::AlphaSquaredNotSummable => {
                "sum(alpha_k^2) diverges: alpha_k = 1/(t3 + t4*k) needs t4 > 0"
            }
            Self::GammaNotSummable => {
                "sum(gamma_k) diverges: gamma_k = t5/k^(1+t6) needs t6 > 0 (or t5 = 0)"
            }
            Self::TauBounded => {
                "tau_k = t1 + t2*k must diverge (t2 > 0) so that eps_k = O(1/tau_k) -> 0"
            }
        };
        f.write_str(msg)
    }
}

/// Outcome of the structural schedule validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<ScheduleViolation>,
    /// Decay exponent of alpha_k (alpha_k = Θ(1/k^p)); required 1/2 < p <= 1.
    pub p: f64,
    /// Decay exponent of gamma_k (gamma_k = Θ(1/k^q)); required q > 1.
    /// Infinite when gamma is identically zero.
    pub q: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the diminishing, divergent-series, square-summable conditions:
/// alpha_k = O(1/k^p) with 1/2 < p <= 1, tau_k = Θ(k^p), and
/// gamma_k = O(1/k^q) with q > 1, so that Σ alpha = ∞, Σ alpha² < ∞,
/// Σ alpha·eps < ∞ and Σ gamma < ∞ all hold.
pub fn validate_square_summable(s: &PolySchedule) -> ValidationReport {
    let mut violations = Vec::new();
    if !(s.t3 > 0.0) {
        violations.push(ScheduleViolation::AlphaNotPositive);
    }
    let p = if s.t4 > 0.0 { 1.0 } else { 0.0 };
    if s.t4 <= 0.0 {
        violations.push(ScheduleViolation::AlphaSquaredNotSummable);
    }
    if s.t2 <= 0.0 {
        violations.push(ScheduleViolation::TauBounded);
    }
    let q = gamma_exponent(s, &mut violations);
    ValidationReport { violations, p, q }
}

/// Lighter check for level-stepsize (adaptive) mode, which provides no
/// alpha schedule: only tau_k -> ∞ and Σ gamma_k < ∞ are required.
pub fn validate_level_mode(s: &PolySchedule) -> ValidationReport {
    let mut violations = Vec::new();
    if s.t2 <= 0.0 {
        violations.push(ScheduleViolation::TauBounded);
    }
    let q = gamma_exponent(s, &mut violations);
    ValidationReport {
        violations,
        p: f64::NAN,
        q,
    }
}

fn gamma_exponent(s: &PolySchedule, violations: &mut Vec<ScheduleViolation>) -> f64 {
    if s.t5 == 0.0 {
        f64::INFINITY
    } else {
        if s.t6 <= 0.0 {
            violations.push(ScheduleViolation::GammaNotSummable);
        }
        1.0 + s.t6
    }
}

/// Classical stepsize selection rules kept for comparison runs. None of
/// them carries a convergence certificate in the scaled setting; the
/// harness labels such runs "heuristic".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicRule {
    /// alpha_k = alpha for all k.
    Constant(f64),
    /// alpha_k = c (f(x_k) - f_star) / max(1, |u_k|^2), c in (0,2),
    /// for a known optimal value f_star.
    Polyak { c: f64, f_star: f64 },
    /// Diminishing divergent series alpha_k = a0 / (k+1)^exponent,
    /// exponent in (0, 1].
    Ermoliev { a0: f64, exponent: f64 },
    /// alpha_k = (f(x_k) - f_estimate) / max(1, |u_k|^2) for an externally
    /// maintained estimate of the optimal value.
    Dynamic { f_estimate: f64 },
}

/// Evaluates a classical rule at iteration k.
pub fn classic_step(rule: &ClassicRule, k: usize, f_x: f64, grad_norm_sq: f64) -> Result<f64> {
    match *rule {
        ClassicRule::Constant(a) => {
            if !(a > 0.0) {
                return Err(Error::InvalidParam(format!("constant stepsize {a} <= 0")));
            }
            Ok(a)
        }
        ClassicRule::Polyak { c, f_star } => {
            if !(0.0 < c && c < 2.0) {
                return Err(Error::InvalidParam(format!("Polyak c = {c} not in (0,2)")));
            }
            if f_x < f_star {
                return Err(Error::InvalidParam(format!(
                    "Polyak rule given f(x) = {f_x} below the declared optimum {f_star}"
                )));
            }
            Ok(c * (f_x - f_star) / grad_norm_sq.max(1.0))
        }
        ClassicRule::Ermoliev { a0, exponent } => {
            if !(a0 > 0.0) || !(0.0 < exponent && exponent <= 1.0) {
                return Err(Error::InvalidParam(format!(
                    "Ermoliev rule needs a0 > 0 and exponent in (0,1], got a0={a0}, s={exponent}"
                )));
            }
            Ok(a0 / ((k + 1) as f64).powf(exponent))
        }
        ClassicRule::Dynamic { f_estimate } => Ok((f_x - f_estimate) / grad_norm_sq.max(1.0)),
    }
}

/// Partial product Π_{j=0..k_max} (1 + gamma_j). Used by tests to verify
/// empirically that summable gamma keeps the product bounded.
pub fn theta_partial_product(gamma: impl Fn(usize) -> f64, k_max: usize) -> Result<f64> {
    let mut theta = 1.0f64;
    for k in 0..=k_max {
        let g = gamma(k);
        if g < 0.0 || !g.is_finite() {
            return Err(Error::InvalidParam(format!("gamma_{k} = {g} invalid")));
        }
        theta *= 1.0 + g;
        if !theta.is_finite() {
            return Err(Error::Overflow { k });
        }
    }
    Ok(theta)
}
