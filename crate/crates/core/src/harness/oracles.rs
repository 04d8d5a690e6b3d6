//! Independent verification oracles.
//!
//! Everything in this module deliberately avoids the production solver
//! paths it is used to check: the decomposition oracle materializes the
//! accumulated shrink products instead of using the recursive vectors, and
//! the unscaled reference iteration re-implements the dual/primal/level
//! steps with plain loops and no scaling machinery. Shared pieces are
//! limited to the problem definition itself (blur operator, KL value).

use crate::error::Result;
use crate::imaging::blur::BlurOperator;
use crate::imaging::ops::kl_value_given_hx;
use crate::spdhg::{ShrinkFactors, SpdhgProblem};

/// Direct evaluation of the decomposition sums
///
/// ```text
/// V = beta^2 Σ_j tau_j V_{S~_j} x_j       U = beta^2 Σ_j tau_j U_{S~_j} x_j
/// ```
///
/// where S~_j is the entrywise product of the shrink factors of iterations
/// j..k. Records (x_j, s_j, tau_j) as the run progresses; evaluation costs
/// O(k·n), which is the point — it is the non-recursive route.
#[derive(Debug, Default)]
pub struct DecompositionOracle {
    xs: Vec<Vec<f64>>,
    shrinks: Vec<Vec<f64>>,
    taus: Vec<f64>,
}

impl DecompositionOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, x: &[f64], s: &ShrinkFactors, tau: f64) {
        self.xs.push(x.to_vec());
        self.shrinks.push(s.as_slice().to_vec());
        self.taus.push(tau);
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// (V, U) for the most recent recorded iteration.
    pub fn direct_parts(&self, beta: f64, side: usize) -> (Vec<f64>, Vec<f64>) {
        let n = side * side;
        let k = self.xs.len();
        assert!(k > 0, "nothing recorded");
        let mut v = vec![0.0; n];
        let mut u = vec![0.0; n];
        // accumulated shrink product from the back: after processing j,
        // prod holds s_j * s_{j+1} * ... * s_{k-1} entrywise
        let mut prod = vec![1.0; n];
        let mut terms: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(k);
        for j in (0..k).rev() {
            for (p, s) in prod.iter_mut().zip(&self.shrinks[j]) {
                *p *= s;
            }
            terms.push((self.taus[j], self.xs[j].clone(), prod.clone()));
        }
        for (tau, x, stilde) in &terms {
            let w = beta * beta * tau;
            for r in 0..side {
                let rn = r * side;
                let rup = if r == 0 { (side - 1) * side } else { rn - side };
                let rdown = if r + 1 == side { 0 } else { rn + side };
                for c in 0..side {
                    let l = rn + c;
                    let left = if c == 0 { rn + side - 1 } else { l - 1 };
                    let right = if c + 1 == side { rn } else { l + 1 };
                    let up = rup + c;
                    let down = rdown + c;
                    v[l] += w * (2.0 * stilde[l] + stilde[left] + stilde[up]) * x[l];
                    u[l] += w
                        * (stilde[l] * (x[right] + x[down])
                            + stilde[left] * x[left]
                            + stilde[up] * x[up]);
                }
            }
        }
        (v, u)
    }

    /// beta*A'y_{k+1} via the direct product formula (V - U).
    pub fn beta_aty_direct(&self, beta: f64, side: usize) -> Vec<f64> {
        let (v, u) = self.direct_parts(beta, side);
        v.iter().zip(&u).map(|(a, b)| a - b).collect()
    }
}

/// Stepsize selection of the independent reference iteration.
#[derive(Debug, Clone)]
pub enum RefStepsize {
    /// alpha_k = 1/(a + b*k).
    Schedule { a: f64, b: f64 },
    /// Adaptive level rule with the stated constants.
    Level {
        nu1: f64,
        nu2: f64,
        delta0: Option<f64>,
        path_bound: Option<f64>,
    },
}

/// Plain unscaled primal-dual iteration (D = I throughout), written
/// independently of the production stepper: own forward differences, own
/// adjoint, own shrink/projection and its own copy of the level rules.
/// Returns every iterate including the starting point.
pub fn unscaled_reference_run(
    problem: &SpdhgProblem,
    tau: impl Fn(usize) -> f64,
    stepsize: RefStepsize,
    max_iter: usize,
    x0: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let side = problem.side();
    let n = side * side;
    let beta = problem.beta();
    let op: &BlurOperator = problem.op();
    let g = problem.g();
    let b = op.background();

    let mut x = x0.to_vec();
    let mut y = vec![0.0; 2 * n];
    let mut iterates = vec![x.clone()];

    // level bookkeeping, re-implemented locally
    let mut f_rec = f64::INFINITY;
    let mut f_rec_at_update = f64::INFINITY;
    let mut delta = 0.0;
    let mut sigma = 0.0;
    let mut path_bound_value = f64::INFINITY;
    let mut level_started = false;

    for k in 0..max_iter {
        // objective pieces
        let hx = op.apply(&x)?;
        let f0 = kl_value_given_hx(&hx, g, b)?;
        // forward differences, interleaved blocks
        let mut ax = vec![0.0; 2 * n];
        for r in 0..side {
            let rn = r * side;
            let rdown = if r + 1 == side { 0 } else { rn + side };
            for c in 0..side {
                let l = rn + c;
                let right = if c + 1 == side { rn } else { l + 1 };
                ax[2 * l] = x[right] - x[l];
                ax[2 * l + 1] = x[rdown + c] - x[l];
            }
        }
        let tv: f64 = ax
            .chunks_exact(2)
            .map(|blk| (blk[0] * blk[0] + blk[1] * blk[1]).sqrt())
            .sum();
        let f = f0 + beta * tv;

        // level record/target updates before the step
        let (nu1, nu2) = match &stepsize {
            RefStepsize::Level { nu1, nu2, .. } => (*nu1, *nu2),
            _ => (0.5, 0.5),
        };
        if matches!(stepsize, RefStepsize::Level { .. }) {
            if !level_started {
                delta = match &stepsize {
                    RefStepsize::Level { delta0: Some(d), .. } => *d,
                    _ => 0.9 * f,
                };
                if let RefStepsize::Level {
                    path_bound: Some(pb),
                    ..
                } = &stepsize
                {
                    path_bound_value = *pb;
                }
                level_started = true;
            }
            if f < f_rec {
                f_rec = f;
            }
            if !f_rec_at_update.is_finite() {
                f_rec_at_update = f_rec;
            }
            if f < f_rec_at_update - nu1 * delta {
                sigma = 0.0;
                f_rec_at_update = f_rec;
            } else if sigma > path_bound_value {
                sigma = 0.0;
                delta *= nu2;
                f_rec_at_update = f_rec;
            }
        }

        // dual step with blockwise radial projection
        let tk = tau(k);
        for l in 0..n {
            let t0 = y[2 * l] + beta * tk * ax[2 * l];
            let t1 = y[2 * l + 1] + beta * tk * ax[2 * l + 1];
            let norm = (t0 * t0 + t1 * t1).sqrt();
            let s = 1.0 / norm.max(1.0);
            y[2 * l] = s * t0;
            y[2 * l + 1] = s * t1;
        }

        // subgradient u = H'e - H'v + beta*A'y
        let mut ratio = vec![0.0; n];
        for i in 0..n {
            if g[i] > 0.0 {
                ratio[i] = g[i] / (hx[i] + b);
            }
        }
        let ht_v = op.apply_adjoint(&ratio)?;
        let ht_e = op.ht_e();
        let mut u = vec![0.0; n];
        for r in 0..side {
            let rn = r * side;
            let rup = if r == 0 { (side - 1) * side } else { rn - side };
            for c in 0..side {
                let l = rn + c;
                let left = if c == 0 { rn + side - 1 } else { l - 1 };
                let aty = y[2 * left] - y[2 * l] + y[2 * (rup + c) + 1] - y[2 * l + 1];
                u[l] = ht_e[l] - ht_v[l] + beta * aty;
            }
        }

        // stepsize and primal update
        match &stepsize {
            RefStepsize::Schedule { a, b } => {
                let alpha = 1.0 / (a + b * k as f64);
                for (xi, ui) in x.iter_mut().zip(&u) {
                    *xi = (*xi - alpha * ui).max(0.0);
                }
            }
            RefStepsize::Level { path_bound, .. } => {
                let u_norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                if path_bound.is_none() && !path_bound_value.is_finite() {
                    path_bound_value = 0.9 * u_norm;
                }
                let alpha = ((f - f_rec_at_update) + delta) / u_norm.max(1.0);
                let scale = alpha / u_norm.max(1.0);
                for (xi, ui) in x.iter_mut().zip(&u) {
                    *xi = (*xi - scale * ui).max(0.0);
                }
                sigma += alpha;
            }
        }
        iterates.push(x.clone());
    }
    Ok(iterates)
}

/// Exhaustive grid search minimizer for two-dimensional test objectives.
pub fn grid_search_min_2d(
    f: impl Fn(&[f64]) -> f64,
    lo: f64,
    hi: f64,
    points_per_axis: usize,
) -> (Vec<f64>, f64) {
    let mut best_x = vec![lo, lo];
    let mut best_f = f64::INFINITY;
    let h = (hi - lo) / (points_per_axis - 1) as f64;
    for i in 0..points_per_axis {
        for j in 0..points_per_axis {
            let x = [lo + h * i as f64, lo + h * j as f64];
            let val = f(&x);
            if val < best_f {
                best_f = val;
                best_x = x.to_vec();
            }
        }
    }
    (best_x, best_f)
}

/// Central-difference gradient approximation.
pub fn central_diff_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let orig = x[i];
        xp[i] = orig + h;
        let fp = f(&xp);
        xp[i] = orig - h;
        let fm = f(&xp);
        xp[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::grid::{synth_phantom, PhantomKind};
    use crate::imaging::sim::simulate_data;
    use crate::spdhg::{SpdhgMode, SpdhgParams, SpdhgState};
    use crate::stepsize::PolySchedule;

    fn small_problem(side: usize, beta: f64) -> SpdhgProblem {
        let x_true = synth_phantom(PhantomKind::Disks, side, 0.0, 1.0).unwrap();
        let op = BlurOperator::gaussian(side, 3, 1.0, 4.0).unwrap();
        let sim = simulate_data(&x_true, &op, 1.0, 4.0, 5).unwrap();
        SpdhgProblem::new(op, sim.counts.into_data(), beta).unwrap()
    }

    #[test]
    fn decomposition_matches_recursion_on_small_run() {
        // two iterations on a 4x4-ish problem: V from the recursive
        // vectors equals the direct product formula
        let side = 8;
        let problem = small_problem(side, 0.7);
        let schedule = PolySchedule::new([0.5, 0.3, 1.0, 1e-2, 50.0, 1.0]).unwrap();
        let mut state = SpdhgState::new(
            problem.clone(),
            SpdhgParams::new(SpdhgMode::Schedule(schedule), 10),
        )
        .unwrap();
        let mut oracle = DecompositionOracle::new();
        for k in 0..10usize {
            let x_pre = state.x().to_vec();
            let info = state.step().unwrap();
            oracle.record(&x_pre, state.last_shrink().unwrap(), info.tau);
            let (v_direct, _) = oracle.direct_parts(problem.beta(), side);
            let aux = state.aux();
            for l in 0..side * side {
                let v_rec = 2.0 * aux.p[l] + aux.q[l] + aux.r[l];
                let scale = v_direct[l].abs().max(v_rec.abs()).max(1e-300);
                assert!(
                    (v_rec - v_direct[l]).abs() <= 1e-9 * scale,
                    "k={k} l={l}: recursive {v_rec} vs direct {}",
                    v_direct[l]
                );
            }
        }
    }

    #[test]
    fn grid_search_finds_the_box_minimum() {
        let f = |x: &[f64]| (x[0] - 0.25).abs() + 2.0 * (x[1] - 0.75).abs();
        let (x, val) = grid_search_min_2d(f, 0.0, 1.0, 401);
        assert!((x[0] - 0.25).abs() < 3e-3);
        assert!((x[1] - 0.75).abs() < 3e-3);
        assert!(val < 1e-2);
    }

    #[test]
    fn central_differences_match_a_quadratic() {
        let f = |x: &[f64]| 0.5 * x[0] * x[0] + 3.0 * x[1];
        let g = central_diff_grad(f, &[2.0, -1.0], 1e-6);
        assert!((g[0] - 2.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }
}
