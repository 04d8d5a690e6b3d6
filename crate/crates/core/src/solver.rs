//! Generic scaled ε-subgradient projection loop and the adaptive level
//! stepsize state machine.
//!
//! The basic iteration is
//!
//! ```text
//! x_{k+1} = P_{X,D_k^{-1}}( x_k - alpha_k * D_k * u_k ),   u_k ∈ ∂_{eps_k} f(x_k)
//! ```
//!
//! with a diagonal metric D_k whose eigenvalues live in [1/L_k, L_k]. The
//! normalized variant divides the direction by max(1, ‖u_k‖_{D_k}); the
//! level strategy computes alpha_k adaptively from a record value and a
//! target level, shrinking the gap parameter delta whenever the cumulative
//! path length since the last target update exceeds a bound B.
//!
//! Stepsizes from an a-priori square-summable schedule or from the level
//! machinery come with convergence guarantees; the classical comparison
//! rules (constant, Polyak, Ermoliev, dynamic) do not, and runs using them
//! are labeled heuristic.

use crate::error::{Error, Result};
use crate::metric::{energy_norm, DiagMetric};
use crate::stepsize::{classic_step, ClassicRule, PolySchedule};
use std::time::Instant;

/// Problem interface for the subgradient solvers.
///
/// `eps_subgradient` returns a pair (u, eps) with u ∈ ∂_eps f(x); eps must
/// be nonnegative. The default projection is onto the nonnegative orthant;
/// override it for other feasible sets.
pub trait ProblemOracle {
    fn f_value(&mut self, x: &[f64]) -> f64;

    fn eps_subgradient(&mut self, x: &[f64], k: usize) -> (Vec<f64>, f64);

    fn project(&self, x: &[f64], _d: &DiagMetric) -> Vec<f64> {
        x.iter().map(|v| v.max(0.0)).collect()
    }

    /// Known optimal value, when available (used only for reporting).
    fn f_star(&self) -> Option<f64> {
        None
    }
}

/// One row of a solver trace. Step quantities are `None` on the terminal
/// record (the final iterate is evaluated but not stepped) and the level
/// fields are `None` for non-level strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    pub time_s: f64,
    pub f: f64,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub u_norm: Option<f64>,
    pub delta: Option<f64>,
    pub f_lev: Option<f64>,
}

/// Mutable state of a solver run.
#[derive(Debug, Clone)]
pub struct IterState {
    pub x: Vec<f64>,
    pub k: usize,
    /// Last ε-subgradient drawn from the oracle.
    pub u: Vec<f64>,
    /// Last ε value.
    pub eps: f64,
    /// Metric used by the last step.
    pub d: DiagMetric,
    pub trace: Vec<IterRecord>,
    started: Instant,
}

impl IterState {
    pub fn new(x0: Vec<f64>) -> Self {
        let n = x0.len();
        Self {
            x: x0,
            k: 0,
            u: vec![0.0; n],
            eps: 0.0,
            d: DiagMetric::identity(n),
            trace: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn elapsed_s(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}

/// Scaled step x⁺ = P_{X,D⁻¹}(x − α·D·u) with (u, eps) drawn fresh from
/// the oracle; appends the iteration record.
pub fn step_scaled(
    state: &mut IterState,
    alpha: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    let f_x = oracle.f_value(&state.x);
    step_scaled_with(state, f_x, alpha, d, oracle)
}

/// Normalized variant: the direction is u / max(1, ‖u‖_D). Coincides with
/// `step_scaled` whenever ‖u‖_D ≤ 1.
pub fn step_normalized(
    state: &mut IterState,
    alpha: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    let f_x = oracle.f_value(&state.x);
    step_normalized_with(state, f_x, alpha, d, oracle)
}

fn step_scaled_with(
    state: &mut IterState,
    f_x: f64,
    alpha: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    apply_step(state, f_x, alpha, d, oracle, false, None, None)
}

fn step_normalized_with(
    state: &mut IterState,
    f_x: f64,
    alpha: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    apply_step(state, f_x, alpha, d, oracle, true, None, None)
}

/// Shared step kernel. With `normalize` the applied direction is
/// u / max(1, ‖u‖_D); level runs pass delta/f_lev for the trace.
#[allow(clippy::too_many_arguments)]
fn apply_step(
    state: &mut IterState,
    f_x: f64,
    alpha: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
    normalize: bool,
    delta: Option<f64>,
    f_lev: Option<f64>,
) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "stepsize must be positive and finite, got {alpha}"
        )));
    }
    if !f_x.is_finite() {
        return Err(Error::NonFinite {
            context: "objective value",
        });
    }
    let (u, eps) = oracle.eps_subgradient(&state.x, state.k);
    if u.len() != state.x.len() {
        return Err(Error::DimensionMismatch {
            expected: state.x.len(),
            got: u.len(),
        });
    }
    if u.iter().any(|v| !v.is_finite()) || !eps.is_finite() || eps < 0.0 {
        return Err(Error::NonFinite {
            context: "epsilon-subgradient",
        });
    }
    let u_norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if normalize {
        alpha / energy_norm(&u, d)?.max(1.0)
    } else {
        alpha
    };
    let z: Vec<f64> = state
        .x
        .iter()
        .zip(d.entries())
        .zip(&u)
        .map(|((xi, di), ui)| xi - scale * di * ui)
        .collect();
    let x_next = oracle.project(&z, d);
    if x_next.len() != state.x.len() || x_next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "projected iterate",
        });
    }
    state.trace.push(IterRecord {
        k: state.k,
        time_s: state.elapsed_s(),
        f: f_x,
        alpha: Some(alpha),
        eps: Some(eps),
        u_norm: Some(u_norm),
        delta,
        f_lev,
    });
    state.x = x_next;
    state.u = u;
    state.eps = eps;
    state.d = d.clone();
    state.k += 1;
    Ok(())
}

/// What a level-state update did at the current iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelEvent {
    /// Neither rule fired; only the target level was refreshed.
    None,
    /// Sufficient descent: the target moves down, delta is kept.
    Descent,
    /// Path bound exceeded: delta shrinks by nu2, the target moves up.
    PathBound,
}

/// Bookkeeping of the adaptive level stepsize rule.
///
/// Invariants: `f_rec` is the running minimum of all observed f values;
/// `sigma` is the exact sum of the stepsizes taken since the last target
/// update; `delta` only ever shrinks, by the factor nu2.
#[derive(Debug, Clone)]
pub struct LevelState {
    pub path_bound: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Best objective value seen so far (f_rec).
    pub f_rec: f64,
    /// Record value at the iteration of the last target update.
    f_rec_at_update: f64,
    /// Current gap parameter delta_l.
    pub delta: f64,
    /// Number of target updates performed (l).
    pub level_count: usize,
    /// Iteration index of the last target update (k(l)).
    pub k_last_update: usize,
    /// Cumulative path length since the last target update (sigma_k).
    pub sigma: f64,
    /// Current target level f_lev = f_rec_at_update - delta.
    pub f_lev: f64,
}

impl LevelState {
    pub fn new(delta0: f64, nu1: f64, nu2: f64, path_bound: f64) -> Result<Self> {
        if !(delta0 > 0.0) || !delta0.is_finite() {
            return Err(Error::InvalidParam(format!("delta0 must be > 0, got {delta0}")));
        }
        if !(0.0 < nu1 && nu1 < 1.0) || !(0.0 < nu2 && nu2 < 1.0) {
            return Err(Error::InvalidParam(format!(
                "nu1, nu2 must lie in (0,1), got {nu1}, {nu2}"
            )));
        }
        if !(path_bound > 0.0) {
            return Err(Error::InvalidParam(format!(
                "path bound must be > 0, got {path_bound}"
            )));
        }
        Ok(Self {
            path_bound,
            nu1,
            nu2,
            f_rec: f64::INFINITY,
            f_rec_at_update: f64::INFINITY,
            delta: delta0,
            level_count: 0,
            k_last_update: 0,
            sigma: 0.0,
            f_lev: f64::NEG_INFINITY,
        })
    }

    /// Record value at the last target update, f_rec_{k(l)}.
    pub fn f_rec_at_update(&self) -> f64 {
        self.f_rec_at_update
    }

    /// Runs the record/target update for iteration k, before the step:
    /// refresh the record with f_x; move the target down on sufficient
    /// descent (delta kept), or shrink delta when the path bound is
    /// exceeded; equality at the descent test falls through to the path
    /// test. Returns which rule fired.
    pub fn update(&mut self, f_x: f64, k: usize) -> LevelEvent {
        if f_x < self.f_rec {
            self.f_rec = f_x;
        }
        if !self.f_rec_at_update.is_finite() {
            // first iteration: the reference record starts at f(x0)
            self.f_rec_at_update = self.f_rec;
        }
        let event = if f_x < self.f_rec_at_update - self.nu1 * self.delta {
            self.k_last_update = k;
            self.sigma = 0.0;
            self.level_count += 1;
            self.f_rec_at_update = self.f_rec;
            LevelEvent::Descent
        } else if self.sigma > self.path_bound {
            self.k_last_update = k;
            self.sigma = 0.0;
            self.delta *= self.nu2;
            self.level_count += 1;
            self.f_rec_at_update = self.f_rec;
            LevelEvent::PathBound
        } else {
            LevelEvent::None
        };
        self.f_lev = self.f_rec_at_update - self.delta;
        event
    }
}

/// Level step: alpha_k = (f(x_k) − f_lev) / max(1, ‖u_k‖_{D_k}), iterate
/// with the normalized direction, then accumulate the path length. The
/// level state must already be current for iteration k (see
/// [`LevelState::update`]). alpha停 is guaranteed positive because the
/// target level sits strictly below the record value.
pub fn ssl_step(
    state: &mut IterState,
    level: &mut LevelState,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    let f_x = oracle.f_value(&state.x);
    ssl_step_with(state, level, f_x, d, oracle)
}

fn ssl_step_with(
    state: &mut IterState,
    level: &mut LevelState,
    f_x: f64,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<()> {
    let alpha = level_alpha(level, f_x, &peek_norm(state, d, oracle)?)?;
    apply_step(
        state,
        f_x,
        alpha,
        d,
        oracle,
        true,
        Some(level.delta),
        Some(level.f_lev),
    )?;
    level.sigma += alpha;
    Ok(())
}

// The level stepsize needs ‖u‖_D before the step draws u again, so peek
// the subgradient once here; oracles are required to be deterministic per
// (x, k), which makes the second draw identical.
fn peek_norm(
    state: &IterState,
    d: &DiagMetric,
    oracle: &mut dyn ProblemOracle,
) -> Result<(Vec<f64>, f64)> {
    let (u, _eps) = oracle.eps_subgradient(&state.x, state.k);
    let nd = energy_norm(&u, d)?;
    Ok((u, nd))
}

// alpha = (f_x - f_lev)/max(1, ||u||_D), evaluated as
// ((f_x - f_rec_at_update) + delta)/... so the delta contribution survives
// even when it is far below the ulp of f_x.
fn level_alpha(level: &LevelState, f_x: f64, peeked: &(Vec<f64>, f64)) -> Result<f64> {
    let gap = (f_x - level.f_rec_at_update) + level.delta;
    let alpha = gap / peeked.1.max(1.0);
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::NonFinite {
            context: "level stepsize",
        });
    }
    Ok(alpha)
}

/// Stepsize selection strategy for [`run`].
#[derive(Debug, Clone)]
pub enum Strategy {
    /// A-priori schedule; `normalized` selects the u/max(1,‖u‖_D) variant.
    Schedule {
        schedule: PolySchedule,
        normalized: bool,
    },
    /// Adaptive level stepsizes (always normalized).
    Level(SslParams),
    /// Classical comparison rules; runs are labeled heuristic.
    Classic(ClassicRule),
}

/// Level-strategy parameters. `delta0` defaults to 0.9·f(x0) and the path
/// bound to 0.9·‖u0‖·‖D0‖_∞^(1/2) when left unset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SslParams {
    pub nu1: f64,
    pub nu2: f64,
    pub delta0: Option<f64>,
    pub path_bound: Option<f64>,
}

impl Default for SslParams {
    fn default() -> Self {
        Self {
            nu1: 0.5,
            nu2: 0.5,
            delta0: None,
            path_bound: None,
        }
    }
}

/// Termination rule on top of the iteration budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Run exactly `max_iter` iterations (the experimental protocol).
    FixedBudget,
    /// Stop when |f_k − f_{k−window}| ≤ tol·max(1, |f_k|).
    RelF { tol: f64, window: usize },
    /// Stop when ‖x_k − x_{k−window}‖ ≤ tol·max(1, ‖x_k‖).
    RelX { tol: f64, window: usize },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_iter: usize,
    pub stop: StopRule,
    /// Divergence guard: abort when ‖u_k‖ exceeds this cap.
    pub rho_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_iter: 3000,
            stop: StopRule::FixedBudget,
            rho_max: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    BudgetExhausted,
    ToleranceReached { at: usize },
}

/// Result of a full solver run.
#[derive(Debug)]
pub struct RunOutcome {
    pub state: IterState,
    pub level: Option<LevelState>,
    /// True for classical stepsize rules without a convergence certificate.
    pub heuristic: bool,
    pub stopped: StopReason,
}

/// Runs the scaled ε-subgradient method from `x0`, drawing the metric for
/// each iteration from `d_builder`. The trace carries one record per
/// iteration plus a terminal record holding only the final objective
/// value (so a zero budget yields exactly one record).
pub fn run(
    oracle: &mut dyn ProblemOracle,
    strategy: &Strategy,
    mut d_builder: impl FnMut(usize, &[f64]) -> Result<DiagMetric>,
    config: &RunConfig,
    x0: Vec<f64>,
) -> Result<RunOutcome> {
    let mut state = IterState::new(x0);
    let mut level: Option<LevelState> = None;
    let mut f_hist: Vec<f64> = Vec::new();
    let mut x_hist: Vec<Vec<f64>> = Vec::new();
    let mut stopped = StopReason::BudgetExhausted;

    for k in 0..config.max_iter {
        let f_x = oracle.f_value(&state.x);
        if !f_x.is_finite() {
            return Err(Error::NonFinite {
                context: "objective value",
            });
        }
        let d = d_builder(k, &state.x)?;
        // divergence guard on the subgradient about to be used
        let (u_peek, _) = oracle.eps_subgradient(&state.x, k);
        let u_norm = u_peek.iter().map(|v| v * v).sum::<f64>().sqrt();
        if u_norm > config.rho_max {
            return Err(Error::Divergence {
                k,
                u_norm,
                cap: config.rho_max,
            });
        }

        match strategy {
            Strategy::Schedule {
                schedule,
                normalized,
            } => {
                let alpha = schedule.at(k)?.alpha;
                if *normalized {
                    step_normalized_with(&mut state, f_x, alpha, &d, oracle)?;
                } else {
                    step_scaled_with(&mut state, f_x, alpha, &d, oracle)?;
                }
            }
            Strategy::Level(params) => {
                if level.is_none() {
                    let delta0 = params.delta0.unwrap_or(0.9 * f_x);
                    let bound = params.path_bound.unwrap_or_else(|| {
                        0.9 * u_norm * d.max_entry().sqrt()
                    });
                    level = Some(LevelState::new(delta0, params.nu1, params.nu2, bound)?);
                }
                let lvl = level.as_mut().unwrap();
                lvl.update(f_x, k);
                ssl_step_with(&mut state, lvl, f_x, &d, oracle)?;
            }
            Strategy::Classic(rule) => {
                let alpha = classic_step(rule, k, f_x, u_norm * u_norm)?;
                if alpha <= 0.0 {
                    // Polyak/dynamic rules return zero exactly at their
                    // target value: the rule has converged
                    stopped = StopReason::ToleranceReached { at: k };
                    break;
                }
                step_scaled_with(&mut state, f_x, alpha, &d, oracle)?;
            }
        }

        f_hist.push(f_x);
        if matches!(config.stop, StopRule::RelX { .. }) {
            x_hist.push(state.x.clone());
        }
        if stop_fires(&config.stop, &f_hist, &x_hist) {
            stopped = StopReason::ToleranceReached { at: k };
            break;
        }
    }

    // terminal record: the last iterate evaluated but not stepped
    let f_final = oracle.f_value(&state.x);
    state.trace.push(IterRecord {
        k: state.k,
        time_s: state.elapsed_s(),
        f: f_final,
        alpha: None,
        eps: None,
        u_norm: None,
        delta: level.as_ref().map(|l| l.delta),
        f_lev: level.as_ref().map(|l| l.f_lev),
    });

    Ok(RunOutcome {
        state,
        level,
        heuristic: matches!(strategy, Strategy::Classic(_)),
        stopped,
    })
}

fn stop_fires(rule: &StopRule, f_hist: &[f64], x_hist: &[Vec<f64>]) -> bool {
    match *rule {
        StopRule::FixedBudget => false,
        StopRule::RelF { tol, window } => {
            if f_hist.len() <= window {
                return false;
            }
            let cur = f_hist[f_hist.len() - 1];
            let old = f_hist[f_hist.len() - 1 - window];
            (cur - old).abs() <= tol * cur.abs().max(1.0)
        }
        StopRule::RelX { tol, window } => {
            if x_hist.len() <= window {
                return false;
            }
            let cur = &x_hist[x_hist.len() - 1];
            let old = &x_hist[x_hist.len() - 1 - window];
            let diff: f64 = cur
                .iter()
                .zip(old)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = cur.iter().map(|a| a * a).sum::<f64>().sqrt();
            diff <= tol * norm.max(1.0)
        }
    }
}
