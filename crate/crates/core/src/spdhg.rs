//! Scaled primal-dual hybrid gradient method for min f0(x) + f1(Ax) with
//! f0 the Kullback-Leibler data term, f1 = beta*TV and A the periodic
//! forward-difference gradient.
//!
//! Each iteration alternates
//!
//! ```text
//! y~      = y_k + beta*tau_k * A x_k
//! s_l     = 1 / max(1, ||y~_l||)            (blockwise shrink factors)
//! y_{k+1} = S_k y~                          (resolvent: ball projection)
//! x_{k+1} = P_{>=0}( x_k - alpha_k D_k (grad f0(x_k) + beta*A' y_{k+1}) )
//! ```
//!
//! The vector u_k = grad f0(x_k) + beta*A'y_{k+1} is an eps_k-subgradient
//! of the full objective at x_k with eps_k = beta*TV(x_k) - beta*y_{k+1}'Ax_k,
//! which the dual stepsize tau_k drives to zero.
//!
//! The diagonal metric D_k comes from a split-gradient construction: with
//! u_k = V(x_k) - U(x_k), V > 0, U >= 0, the entries are the clamp of
//! x_l / V(x_k)_l into [1/L_k, L_k]. The positive part
//!
//! ```text
//! V(x_k) = H'e + 2p_k + q_k + r_k
//! ```
//!
//! is maintained by three auxiliary vectors updated in O(n) per iteration
//! with the shrink factors of the current dual step; materializing the
//! accumulated shrink products directly would cost O(k*n) and exists only
//! as a test oracle. Shrink-factor neighbor indices wrap periodically,
//! consistent with the boundary conditions of A and H.

use crate::error::{Error, Result};
use crate::imaging::blur::BlurOperator;
use crate::imaging::ops::{div_op, grad_op, kl_grad_parts_given_hx, kl_value_given_hx, tv_value};
use crate::metric::{energy_norm, DiagMetric};
use crate::solver::{IterRecord, LevelState, SslParams};
use crate::stepsize::{validate_level_mode, validate_square_summable, PolySchedule};
use std::time::Instant;

/// Dual variable y ∈ ℝ²ⁿ, one 2-block per pixel, interleaved storage.
/// Feasible when every block has Euclidean norm at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVar {
    y: Vec<f64>,
}

impl DualVar {
    pub fn zeros(n_pixels: usize) -> Self {
        Self {
            y: vec![0.0; 2 * n_pixels],
        }
    }

    pub fn from_vec(y: Vec<f64>) -> Result<Self> {
        if y.len() % 2 != 0 {
            return Err(Error::InvalidParam(
                "dual variable length must be even".into(),
            ));
        }
        Ok(Self { y })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.y
    }

    pub fn block(&self, l: usize) -> (f64, f64) {
        (self.y[2 * l], self.y[2 * l + 1])
    }

    pub fn n_blocks(&self) -> usize {
        self.y.len() / 2
    }

    pub fn max_block_norm(&self) -> f64 {
        self.y
            .chunks_exact(2)
            .map(|b| (b[0] * b[0] + b[1] * b[1]).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Blockwise shrink factors s_l = 1/max(1, ||y~_l||) ∈ (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkFactors {
    s: Vec<f64>,
}

impl ShrinkFactors {
    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }
}

/// Auxiliary vectors of the recursive positive-part update; all entries
/// stay nonnegative as long as the iterates and dual stepsizes do.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxDecomp {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

impl AuxDecomp {
    pub fn zeros(n: usize) -> Self {
        Self {
            p: vec![0.0; n],
            q: vec![0.0; n],
            r: vec![0.0; n],
        }
    }
}

/// Dual step: y~ = y + beta*tau*Ax, then blockwise radial projection onto
/// the unit ball. Returns the projected dual and the shrink factors.
pub fn dual_update(
    y: &DualVar,
    x: &[f64],
    tau: f64,
    beta: f64,
    side: usize,
) -> Result<(DualVar, ShrinkFactors)> {
    let n = side * side;
    if y.y.len() != 2 * n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if !tau.is_finite() || !beta.is_finite() || tau <= 0.0 || beta < 0.0 {
        return Err(Error::InvalidParam(format!(
            "dual step needs tau > 0 and beta >= 0, got tau={tau}, beta={beta}"
        )));
    }
    let ax = grad_op(x, side);
    dual_update_given_ax(y, &ax, tau, beta)
}

/// Dual step when Ax is already available (the solver loop reuses it).
pub fn dual_update_given_ax(
    y: &DualVar,
    ax: &[f64],
    tau: f64,
    beta: f64,
) -> Result<(DualVar, ShrinkFactors)> {
    let n = ax.len() / 2;
    let mut out = vec![0.0; 2 * n];
    let mut s = vec![0.0; n];
    for l in 0..n {
        let t0 = y.y[2 * l] + beta * tau * ax[2 * l];
        let t1 = y.y[2 * l + 1] + beta * tau * ax[2 * l + 1];
        if !t0.is_finite() || !t1.is_finite() {
            return Err(Error::NonFinite {
                context: "dual update",
            });
        }
        let norm = (t0 * t0 + t1 * t1).sqrt();
        let sl = 1.0 / norm.max(1.0);
        s[l] = sl;
        out[2 * l] = sl * t0;
        out[2 * l + 1] = sl * t1;
    }
    Ok((DualVar { y: out }, ShrinkFactors { s }))
}

/// Inaccuracy of the dual variable as a subgradient certificate:
///
/// ```text
/// sigma = beta*TV(x) - beta * y' (Ax)  >= 0   for feasible y
/// ```
///
/// The pair (beta*A'y, sigma) then satisfies the eps-subgradient
/// inequality for beta*TV at x. A significantly negative value can only
/// come from an infeasible y and is reported as an error.
pub fn epsilon_of_dual(x: &[f64], y_plus: &DualVar, beta: f64, side: usize) -> Result<f64> {
    let ax = grad_op(x, side);
    let tv = tv_value(x, side);
    epsilon_given_ax(&ax, tv, y_plus, beta)
}

fn epsilon_given_ax(ax: &[f64], tv: f64, y_plus: &DualVar, beta: f64) -> Result<f64> {
    let dot: f64 = ax.iter().zip(&y_plus.y).map(|(a, b)| a * b).sum();
    let sigma = beta * tv - beta * dot;
    let tol = 1e-10 * (beta * tv).max(1.0);
    if sigma < -tol {
        return Err(Error::InfeasibleDual { gap: sigma });
    }
    Ok(sigma.max(0.0))
}

/// Recursive update of the decomposition vectors with the shrink factors
/// of the current iteration. The q and r updates read the shrink factor of
/// the left and upper neighbor respectively, wrapping periodically.
pub fn update_aux(
    aux: &AuxDecomp,
    x: &[f64],
    s: &ShrinkFactors,
    tau: f64,
    beta: f64,
    side: usize,
) -> AuxDecomp {
    let n = side * side;
    debug_assert_eq!(aux.p.len(), n);
    debug_assert_eq!(x.len(), n);
    debug_assert_eq!(s.s.len(), n);
    let w = beta * beta * tau;
    let mut out = AuxDecomp::zeros(n);
    for r in 0..side {
        let rn = r * side;
        let rup = if r == 0 { (side - 1) * side } else { rn - side };
        for c in 0..side {
            let l = rn + c;
            let lleft = if c == 0 { rn + side - 1 } else { l - 1 };
            let inc = w * x[l];
            out.p[l] = (aux.p[l] + inc) * s.s[l];
            out.q[l] = (aux.q[l] + inc) * s.s[lleft];
            out.r[l] = (aux.r[l] + inc) * s.s[rup + c];
        }
    }
    out
}

/// Positive part of the subgradient decomposition, V(x) = H'e + 2p + q + r.
/// Every entry must be strictly positive (H'e > 0 by assumption on the
/// blur operator and the auxiliary vectors are nonnegative).
pub fn positive_part(aux: &AuxDecomp, ht_e: &[f64]) -> Result<Vec<f64>> {
    let n = ht_e.len();
    if aux.p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: aux.p.len(),
        });
    }
    let mut v = vec![0.0; n];
    for i in 0..n {
        v[i] = ht_e[i] + 2.0 * aux.p[i] + aux.q[i] + aux.r[i];
        if !(v[i] > 0.0) {
            return Err(Error::Domain(format!(
                "positive part V_{i} = {} is not strictly positive; operator assumptions violated",
                v[i]
            )));
        }
    }
    Ok(v)
}

/// Split-gradient scaling: diagonal entries clamp(x_l / V_l, 1/L, L).
/// L = 1 collapses the clamp and disables the scaling entirely.
pub fn build_scaling(x: &[f64], v: &[f64], l_bound: f64) -> Result<DiagMetric> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: x.len(),
        });
    }
    if v.iter().any(|vi| !(*vi > 0.0)) {
        return Err(Error::Domain(
            "scaling denominator must be strictly positive".into(),
        ));
    }
    let entries: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi / vi).collect();
    DiagMetric::new(entries, l_bound)
}

/// Primal step x⁺ = P_{>=0}(x - alpha*D*(grad_f0 + beta*A'y⁺)). Returns
/// the new iterate together with the eps-subgradient u that was applied.
pub fn primal_update(
    x: &[f64],
    d: &DiagMetric,
    alpha: f64,
    grad_f0: &[f64],
    y_plus: &DualVar,
    beta: f64,
    side: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let aty = div_op(y_plus.as_slice(), side);
    let u: Vec<f64> = grad_f0
        .iter()
        .zip(&aty)
        .map(|(g, a)| g + beta * a)
        .collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "primal subgradient",
        });
    }
    let x_next: Vec<f64> = x
        .iter()
        .zip(d.entries())
        .zip(&u)
        .map(|((xi, di), ui)| (xi - alpha * di * ui).max(0.0))
        .collect();
    Ok((x_next, u))
}

/// A Poisson/TV deblurring instance: observed counts g, blur operator H
/// with background b, regularization weight beta.
#[derive(Debug, Clone)]
pub struct SpdhgProblem {
    op: BlurOperator,
    g: Vec<f64>,
    beta: f64,
    side: usize,
}

impl SpdhgProblem {
    pub fn new(op: BlurOperator, g: Vec<f64>, beta: f64) -> Result<Self> {
        let side = op.side();
        if g.len() != side * side {
            return Err(Error::DimensionMismatch {
                expected: side * side,
                got: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParam(
                "observed data must be finite and nonnegative".into(),
            ));
        }
        if op.background() == 0.0 && g.iter().any(|v| *v == 0.0) {
            return Err(Error::InvalidParam(
                "zero-count pixels require a positive background".into(),
            ));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParam(format!("beta must be >= 0, got {beta}")));
        }
        Ok(Self { op, g, beta, side })
    }

    pub fn op(&self) -> &BlurOperator {
        &self.op
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_pixels(&self) -> usize {
        self.side * self.side
    }

    /// Full objective f0 + beta*TV.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let hx = self.op.apply(x)?;
        let f0 = kl_value_given_hx(&hx, &self.g, self.op.background())?;
        Ok(f0 + self.beta * tv_value(x, self.side))
    }
}

/// Stepsize mode of the method.
#[derive(Debug, Clone)]
pub enum SpdhgMode {
    /// A-priori schedule for (alpha_k, tau_k, gamma_k); must pass the
    /// square-summability validation.
    Schedule(PolySchedule),
    /// Adaptive level stepsizes; the schedule provides only tau_k (which
    /// must diverge) and gamma_k (which must be summable).
    Level {
        schedule: PolySchedule,
        params: SslParams,
    },
}

#[derive(Debug, Clone)]
pub struct SpdhgParams {
    pub mode: SpdhgMode,
    pub max_iter: usize,
    /// Divergence guard on ||u_k||.
    pub rho_max: f64,
    /// Starting point; defaults to the observed data g.
    pub x0: Option<Vec<f64>>,
    /// Initial dual; the decomposition recursion requires zero, so any
    /// nonzero value is rejected.
    pub y0: Option<Vec<f64>>,
    /// Optional lower floor applied to the iterates after projection,
    /// useful to keep Hx + b positive when b = 0.
    pub eps_floor: f64,
}

impl SpdhgParams {
    pub fn new(mode: SpdhgMode, max_iter: usize) -> Self {
        Self {
            mode,
            max_iter,
            rho_max: 1e12,
            x0: None,
            y0: None,
            eps_floor: 0.0,
        }
    }
}

/// Everything produced by one iteration, for traces and instrumented runs.
#[derive(Debug, Clone)]
pub struct SpdhgStepInfo {
    pub k: usize,
    pub time_s: f64,
    /// f0 + beta*TV at the pre-step iterate.
    pub f: f64,
    pub f0: f64,
    pub tv: f64,
    /// Nominal stepsize (schedule value, or the level formula).
    pub alpha: f64,
    /// Stepsize actually multiplying D*u: alpha in schedule mode,
    /// alpha / max(1, ||u||_D) in level mode.
    pub alpha_effective: f64,
    /// Subgradient inaccuracy sigma_k carried by u_k.
    pub eps: f64,
    pub tau: f64,
    pub gamma: f64,
    pub u_norm: f64,
    pub u_norm_d: f64,
    pub delta: Option<f64>,
    pub f_lev: Option<f64>,
}

impl SpdhgStepInfo {
    pub fn to_record(&self) -> IterRecord {
        IterRecord {
            k: self.k,
            time_s: self.time_s,
            f: self.f,
            alpha: Some(self.alpha),
            eps: Some(self.eps),
            u_norm: Some(self.u_norm),
            delta: self.delta,
            f_lev: self.f_lev,
        }
    }
}

/// Stepwise driver for the method; [`spdhg_run`] wraps it into a trace.
pub struct SpdhgState {
    problem: SpdhgProblem,
    params: SpdhgParams,
    x: Vec<f64>,
    y: DualVar,
    aux: AuxDecomp,
    k: usize,
    level: Option<LevelState>,
    path_bound_pending: bool,
    last_metric: Option<DiagMetric>,
    last_shrink: Option<ShrinkFactors>,
    last_u: Vec<f64>,
    started: Instant,
}

impl SpdhgState {
    pub fn new(problem: SpdhgProblem, params: SpdhgParams) -> Result<Self> {
        match &params.mode {
            SpdhgMode::Schedule(s) => {
                let report = validate_square_summable(s);
                if !report.is_valid() {
                    return Err(Error::InvalidSchedule(join_violations(&report.violations)));
                }
            }
            SpdhgMode::Level { schedule, params: sp } => {
                let report = validate_level_mode(schedule);
                if !report.is_valid() {
                    return Err(Error::InvalidSchedule(join_violations(&report.violations)));
                }
                if !(0.0 < sp.nu1 && sp.nu1 < 1.0 && 0.0 < sp.nu2 && sp.nu2 < 1.0) {
                    return Err(Error::InvalidParam(
                        "nu1, nu2 must lie in (0,1)".into(),
                    ));
                }
            }
        }
        let n = problem.n_pixels();
        if let Some(y0) = &params.y0 {
            if y0.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    got: y0.len(),
                });
            }
            if y0.iter().any(|v| *v != 0.0) {
                return Err(Error::InvalidParam(
                    "the decomposition recursion requires the dual to start at zero".into(),
                ));
            }
        }
        let x0 = match &params.x0 {
            Some(x) => {
                if x.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: x.len(),
                    });
                }
                if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidParam(
                        "starting point must be finite and nonnegative".into(),
                    ));
                }
                x.clone()
            }
            None => problem.g.clone(),
        };
        Ok(Self {
            x: x0,
            y: DualVar::zeros(n),
            aux: AuxDecomp::zeros(n),
            k: 0,
            level: None,
            path_bound_pending: false,
            last_metric: None,
            last_shrink: None,
            last_u: vec![0.0; n],
            started: Instant::now(),
            problem,
            params,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn dual(&self) -> &DualVar {
        &self.y
    }

    pub fn aux(&self) -> &AuxDecomp {
        &self.aux
    }

    pub fn problem(&self) -> &SpdhgProblem {
        &self.problem
    }

    /// Metric used by the most recent step.
    pub fn last_metric(&self) -> Option<&DiagMetric> {
        self.last_metric.as_ref()
    }

    /// Shrink factors of the most recent dual update.
    pub fn last_shrink(&self) -> Option<&ShrinkFactors> {
        self.last_shrink.as_ref()
    }

    /// Subgradient applied by the most recent step.
    pub fn last_u(&self) -> &[f64] {
        &self.last_u
    }

    pub fn level(&self) -> Option<&LevelState> {
        self.level.as_ref()
    }

    pub fn elapsed_s(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub fn objective(&self) -> Result<f64> {
        self.problem.objective(&self.x)
    }

    fn schedule(&self) -> &PolySchedule {
        match &self.params.mode {
            SpdhgMode::Schedule(s) => s,
            SpdhgMode::Level { schedule, .. } => schedule,
        }
    }

    /// Performs one full iteration (dual step, decomposition update,
    /// scaling, primal step) and advances the counter.
    pub fn step(&mut self) -> Result<SpdhgStepInfo> {
        let side = self.problem.side;
        let beta = self.problem.beta;
        let k = self.k;
        let schedule = self.schedule().clone();
        let tau = schedule.tau_at(k);
        let gamma = schedule.gamma_at(k);
        let l_bound = (1.0 + gamma).sqrt();
        if !tau.is_finite() || tau <= 0.0 || !l_bound.is_finite() {
            return Err(Error::NonFinite {
                context: "schedule evaluation",
            });
        }

        // objective at the current iterate (Hx is reused by the gradient)
        let hx = self.problem.op.apply(&self.x)?;
        let f0 = kl_value_given_hx(&hx, &self.problem.g, self.problem.op.background())?;
        let ax = grad_op(&self.x, side);
        let tv = ax
            .chunks_exact(2)
            .map(|b| (b[0] * b[0] + b[1] * b[1]).sqrt())
            .sum::<f64>();
        let f = f0 + beta * tv;
        if !f.is_finite() {
            return Err(Error::NonFinite {
                context: "objective value",
            });
        }

        // level bookkeeping happens before the step, on f(x_k)
        if let SpdhgMode::Level { params: sp, .. } = &self.params.mode {
            if self.level.is_none() {
                let delta0 = sp.delta0.unwrap_or(0.9 * f);
                let provisional = sp.path_bound.unwrap_or(f64::INFINITY);
                self.path_bound_pending = sp.path_bound.is_none();
                self.level = Some(LevelState::new(
                    delta0,
                    sp.nu1,
                    sp.nu2,
                    provisional,
                )?);
            }
            self.level.as_mut().unwrap().update(f, k);
        }

        // dual resolvent step and its inaccuracy certificate
        let (y_next, shrink) = dual_update_given_ax(&self.y, &ax, tau, beta)?;
        let eps = epsilon_given_ax(&ax, tv, &y_next, beta)?;

        // recursive positive part and the induced scaling
        let aux_next = update_aux(&self.aux, &self.x, &shrink, tau, beta, side);
        let v = positive_part(&aux_next, self.problem.op.ht_e())?;
        let d = build_scaling(&self.x, &v, l_bound)?;

        // eps-subgradient of the full objective
        let (ht_e, ht_v) = kl_grad_parts_given_hx(&hx, &self.problem.g, &self.problem.op)?;
        let aty = div_op(y_next.as_slice(), side);
        let u: Vec<f64> = ht_e
            .iter()
            .zip(&ht_v)
            .zip(&aty)
            .map(|((e, w), a)| e - w + beta * a)
            .collect();
        let u_norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !u_norm.is_finite() {
            return Err(Error::NonFinite {
                context: "primal subgradient",
            });
        }
        if u_norm > self.params.rho_max {
            return Err(Error::Divergence {
                k,
                u_norm,
                cap: self.params.rho_max,
            });
        }
        let u_norm_d = energy_norm(&u, &d)?;

        // default path bound needs ||u_0|| and D_0, available only now
        if self.path_bound_pending {
            if let Some(level) = self.level.as_mut() {
                level.path_bound = 0.9 * u_norm * d.max_entry().sqrt();
                self.path_bound_pending = false;
            }
        }

        // stepsize and primal update
        let (alpha, alpha_eff, delta, f_lev) = match &self.params.mode {
            SpdhgMode::Schedule(s) => {
                let a = s.alpha_at(k)?;
                (a, a, None, None)
            }
            SpdhgMode::Level { .. } => {
                let level = self.level.as_ref().unwrap();
                // (f - f_rec) + delta rather than f - f_lev: keeps the
                // delta contribution when it is below the ulp of f
                let gap = (f - level.f_rec_at_update()) + level.delta;
                let a = gap / u_norm_d.max(1.0);
                if !a.is_finite() || a <= 0.0 {
                    return Err(Error::NonFinite {
                        context: "level stepsize",
                    });
                }
                (
                    a,
                    a / u_norm_d.max(1.0),
                    Some(level.delta),
                    Some(level.f_lev),
                )
            }
        };
        let mut x_next: Vec<f64> = self
            .x
            .iter()
            .zip(d.entries())
            .zip(&u)
            .map(|((xi, di), ui)| (xi - alpha_eff * di * ui).max(0.0))
            .collect();
        if self.params.eps_floor > 0.0 {
            for xi in &mut x_next {
                if *xi < self.params.eps_floor {
                    *xi = self.params.eps_floor;
                }
            }
        }
        if let Some(level) = self.level.as_mut() {
            level.sigma += alpha;
        }

        let info = SpdhgStepInfo {
            k,
            time_s: self.elapsed_s(),
            f,
            f0,
            tv,
            alpha,
            alpha_effective: alpha_eff,
            eps,
            tau,
            gamma,
            u_norm,
            u_norm_d,
            delta,
            f_lev,
        };
        self.x = x_next;
        self.y = y_next;
        self.aux = aux_next;
        self.last_metric = Some(d);
        self.last_shrink = Some(shrink);
        self.last_u = u;
        self.k += 1;
        Ok(info)
    }
}

fn join_violations(violations: &[crate::stepsize::ScheduleViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Outcome of a full run: per-iteration records plus a terminal record for
/// the final iterate, the final point, and the level state if applicable.
#[derive(Debug)]
pub struct SpdhgOutcome {
    pub trace: Vec<IterRecord>,
    pub x: Vec<f64>,
    pub level: Option<LevelState>,
}

/// Runs the method for a fixed budget.
pub fn spdhg_run(
    problem: SpdhgProblem,
    params: SpdhgParams,
) -> Result<SpdhgOutcome> {
    let max_iter = params.max_iter;
    let mut state = SpdhgState::new(problem, params)?;
    let mut trace = Vec::with_capacity(max_iter + 1);
    for _ in 0..max_iter {
        let info = state.step()?;
        trace.push(info.to_record());
    }
    let f_final = state.objective()?;
    trace.push(IterRecord {
        k: state.k,
        time_s: state.elapsed_s(),
        f: f_final,
        alpha: None,
        eps: None,
        u_norm: None,
        delta: state.level.as_ref().map(|l| l.delta),
        f_lev: state.level.as_ref().map(|l| l.f_lev),
    });
    Ok(SpdhgOutcome {
        trace,
        x: state.x.clone(),
        level: state.level.clone(),
    })
}
