//! Experiment runner: builds the four method variants (PDHG, SPDHG, SL,
//! SSL) on a common synthetic problem, computes a high-accuracy reference
//! solution, and reports the progress metrics
//!
//! ```text
//! e^k = ||x_k - x*|| / ||x*||         f^k = (f(x_k) - f(x*)) / f(x*)
//! ```
//!
//! per iteration against wall-clock time. Traces are exported as CSV and
//! optionally plotted as log-scale SVG curves. Reference solutions come
//! from a long unscaled-PDHG run and are cached on disk keyed by a hash of
//! the defining parameters.

pub mod oracles;
pub mod plot;
pub mod trace;

use crate::error::{Error, Result};
use crate::imaging::blur::BlurOperator;
use crate::imaging::grid::{synth_phantom, ImageGrid, PhantomKind};
use crate::imaging::io::{read_imgf64, write_imgf64};
use crate::imaging::sim::simulate_data;
use crate::solver::SslParams;
use crate::spdhg::{SpdhgMode, SpdhgParams, SpdhgProblem, SpdhgState};
use crate::stepsize::PolySchedule;
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};
use trace::TraceRow;

/// The four method variants of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Unscaled primal-dual hybrid gradient with an a-priori stepsize
    /// schedule (D_k = I).
    Pdhg,
    /// Scaled variant with the split-gradient metric.
    Spdhg,
    /// Unscaled method with adaptive level stepsizes.
    Sl,
    /// Scaled method with adaptive level stepsizes.
    Ssl,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pdhg, Method::Spdhg, Method::Sl, Method::Ssl];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PDHG" => Ok(Self::Pdhg),
            "SPDHG" => Ok(Self::Spdhg),
            "SL" => Ok(Self::Sl),
            "SSL" => Ok(Self::Ssl),
            other => Err(Error::InvalidParam(format!(
                "unknown method '{other}' (expected PDHG|SPDHG|SL|SSL)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pdhg => "PDHG",
            Self::Spdhg => "SPDHG",
            Self::Sl => "SL",
            Self::Ssl => "SSL",
        }
    }

    pub fn uses_level_stepsize(&self) -> bool {
        matches!(self, Self::Sl | Self::Ssl)
    }

    pub fn uses_scaling(&self) -> bool {
        matches!(self, Self::Spdhg | Self::Ssl)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Synthetic problem description; everything needed to regenerate the
/// data deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: PhantomKind,
    pub side: usize,
    pub i_max: f64,
    pub background: f64,
    pub beta: f64,
    pub seed: u64,
    pub intensity_lo: f64,
    pub intensity_hi: f64,
    pub psf_size: usize,
    pub psf_sigma: f64,
}

impl ProblemSpec {
    pub fn new(kind: PhantomKind, side: usize) -> Self {
        Self {
            kind,
            side,
            i_max: 1.0,
            background: 10.0,
            beta: 0.01,
            seed: 0,
            intensity_lo: 0.0,
            intensity_hi: 1.0,
            psf_size: 9,
            psf_sigma: 1.3,
        }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub method: Method,
    pub schedule: PolySchedule,
    pub level: SslParams,
    pub max_iter: usize,
    /// Iteration budget of the reference run.
    pub ref_budget: usize,
    pub rho_max: f64,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemSpec, method: Method, schedule: PolySchedule) -> Self {
        Self {
            problem,
            method,
            schedule,
            level: SslParams::default(),
            max_iter: 3000,
            ref_budget: 100_000,
            rho_max: 1e12,
        }
    }

    /// Method/parameter compatibility: level methods carry no alpha
    /// schedule, unscaled methods carry no gamma sequence.
    pub fn validate(&self) -> Result<()> {
        let t = self.schedule.coefficients();
        if self.method.uses_level_stepsize() && (t[2] != 0.0 || t[3] != 0.0) {
            return Err(Error::InvalidParam(format!(
                "{} computes its stepsizes adaptively; t3/t4 must be unset (got {}, {})",
                self.method, t[2], t[3]
            )));
        }
        if !self.method.uses_scaling() && t[4] != 0.0 {
            return Err(Error::InvalidParam(format!(
                "{} runs unscaled (D = I); t5 must be 0 (got {})",
                self.method, t[4]
            )));
        }
        if self.problem.psf_size % 2 == 0 || self.problem.psf_size > self.problem.side {
            return Err(Error::InvalidParam(format!(
                "psf size {} must be odd and at most the image side {}",
                self.problem.psf_size, self.problem.side
            )));
        }
        Ok(())
    }
}

/// A generated problem instance.
#[derive(Debug, Clone)]
pub struct BuiltProblem {
    pub x_true: ImageGrid,
    pub g: ImageGrid,
    /// Rescale factor applied during simulation (i_max / max(x_true)).
    pub scale: f64,
    /// Background consistent with g (count background / scale).
    pub background_effective: f64,
    pub op: BlurOperator,
}

impl BuiltProblem {
    pub fn to_spdhg(&self, beta: f64) -> Result<SpdhgProblem> {
        SpdhgProblem::new(self.op.clone(), self.g.data().to_vec(), beta)
    }
}

/// Deterministically regenerates the problem from its spec.
pub fn build_problem(p: &ProblemSpec) -> Result<BuiltProblem> {
    let x_true = synth_phantom(p.kind, p.side, p.intensity_lo, p.intensity_hi)?;
    let op_sim = BlurOperator::gaussian(p.side, p.psf_size, p.psf_sigma, p.background)?;
    let sim = simulate_data(&x_true, &op_sim, p.i_max, p.background, p.seed)?;
    let op = BlurOperator::gaussian(p.side, p.psf_size, p.psf_sigma, sim.background_effective)?;
    Ok(BuiltProblem {
        x_true,
        g: sim.g,
        scale: sim.scale,
        background_effective: sim.background_effective,
        op,
    })
}

/// Schedule used for reference runs: unscaled, with a nearly constant
/// alpha matched to the curvature of the data term and a slowly diverging
/// tau. A fast-growing tau makes the dual blocks of near-flat gradient
/// pixels jitter between shrink directions instead of settling on their
/// interior optimum, which caps the attainable accuracy; tau = 0.5 + 1e-3 k
/// keeps the late iterations quiet while still diverging.
pub fn reference_schedule(built: &BuiltProblem, beta: f64, ref_budget: usize) -> PolySchedule {
    let b = built.background_effective;
    let g_max = built.g.max().max(1e-12);
    // curvature bound for the data term: max g_i / (Hx+b)_i^2 <= g_max/b^2
    let l_kl = if b > 0.0 { g_max / (b * b) } else { 1.0 };
    let (t1, t2) = (0.5, 1e-3);
    // primal/dual coupling guard: alpha * (tau_end beta^2) * ||A||^2 <= 1
    let tau_end = t1 + t2 * ref_budget as f64;
    let l_coupling = 8.0 * tau_end * beta * beta;
    let t3 = l_kl.max(l_coupling).max(1e-3);
    PolySchedule {
        t1,
        t2,
        t3,
        t4: t3 * 1e-8,
        t5: 0.0,
        t6: 0.0,
    }
}

fn spec_cache_key(spec: &ExperimentSpec, ref_schedule: &PolySchedule) -> String {
    let p = &spec.problem;
    let canonical = format!(
        "v1|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{:?}",
        p.kind.name(),
        p.side,
        p.i_max,
        p.background,
        p.beta,
        p.seed,
        p.intensity_lo,
        p.intensity_hi,
        p.psf_size,
        p.psf_sigma,
        spec.ref_budget,
        ref_schedule.coefficients(),
    );
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(32);
    for byte in digest.iter().take(16) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Reference pair (x*, f*) for an experiment; cached on disk under
/// `cache_dir/<hash>/xstar.imgf64`. The reference is a long unscaled run
/// with the stability-oriented schedule from [`reference_schedule`]; a run
/// whose objective still moves by more than 1e-8 relative over its last
/// decade is reported as not converged.
pub fn reference_solution(
    spec: &ExperimentSpec,
    built: &BuiltProblem,
    cache_dir: &Path,
) -> Result<(ImageGrid, f64)> {
    let ref_schedule = reference_schedule(built, spec.problem.beta, spec.ref_budget);
    let key = spec_cache_key(spec, &ref_schedule);
    let dir = cache_dir.join(&key);
    let img_path = dir.join("xstar.imgf64");
    let meta_path = dir.join("meta");
    if img_path.exists() {
        let x_star = read_imgf64(&img_path)?;
        let problem = built.to_spdhg(spec.problem.beta)?;
        let f_star = problem.objective(x_star.data())?;
        return Ok((x_star, f_star));
    }

    let problem = built.to_spdhg(spec.problem.beta)?;
    let params = SpdhgParams::new(SpdhgMode::Schedule(ref_schedule), spec.ref_budget);
    let out = crate::spdhg::spdhg_run(problem.clone(), params)?;
    // stability check over the last decade of the run
    let trace = &out.trace;
    let k_last = trace.len() - 1;
    let k_cut = k_last - k_last / 10;
    let f_last = trace[k_last].f;
    let f_cut = trace[k_cut].f;
    let change = (f_last - f_cut).abs() / f_last.abs().max(1e-300);
    if change > 1e-8 {
        return Err(Error::ReferenceNotConverged { change, tol: 1e-8 });
    }
    let x_star = ImageGrid::new(spec.problem.side, out.x)?;
    let f_star = problem.objective(x_star.data())?;

    // atomic publish: write to a temp name, then rename into place
    std::fs::create_dir_all(&dir)?;
    let tmp_img = dir.join(format!(".tmp-{}-xstar", std::process::id()));
    write_imgf64(&tmp_img, &x_star)?;
    std::fs::rename(&tmp_img, &img_path)?;
    let tmp_meta = dir.join(format!(".tmp-{}-meta", std::process::id()));
    std::fs::write(
        &tmp_meta,
        format!(
            "key {key}\nphantom {}\nbeta {}\nref_budget {}\nf_star {:.17e}\nlast_decade_rel_change {:.3e}\n",
            spec.problem.kind.name(),
            spec.problem.beta,
            spec.ref_budget,
            f_star,
            change
        ),
    )?;
    std::fs::rename(&tmp_meta, &meta_path)?;
    Ok((x_star, f_star))
}

/// Progress metrics of an iterate against the reference pair. Falls back
/// to absolute differences (and flags it) when the reference norm or
/// value is too small for a relative measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub e: f64,
    pub f_rel: f64,
    /// True when absolute variants were used.
    pub absolute: bool,
}

pub fn metrics(x: &[f64], f_x: f64, x_star: &[f64], f_star: f64) -> Metrics {
    let xn: f64 = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff: f64 = x
        .iter()
        .zip(x_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let tiny = 1e-300;
    if xn > tiny && f_star.abs() > tiny {
        Metrics {
            e: diff / xn,
            f_rel: (f_x - f_star) / f_star,
            absolute: false,
        }
    } else {
        Metrics {
            e: diff,
            f_rel: f_x - f_star,
            absolute: true,
        }
    }
}

/// First crossing of a threshold by the e^k series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub k: usize,
    pub time_s: f64,
}

/// Run summary: iteration count, wall time, best objective, and the
/// time-to-threshold marks for e^k <= 1e-2 and 1e-3.
#[derive(Debug, Clone)]
pub struct Summary {
    pub method: Method,
    pub iterations: usize,
    pub total_time_s: f64,
    pub f_best: f64,
    pub e_final: f64,
    pub f_rel_best: f64,
    pub cross_1e2: Option<Crossing>,
    pub cross_1e3: Option<Crossing>,
    pub absolute_metrics: bool,
}

/// Computes the summary from a finished trace; thresholds are first
/// crossings, so truncating the trace can only delay or drop them.
pub fn summarize(method: Method, rows: &[TraceRow], absolute: bool) -> Summary {
    let mut cross_1e2 = None;
    let mut cross_1e3 = None;
    let mut f_best = f64::INFINITY;
    let mut f_rel_best = f64::INFINITY;
    for row in rows {
        f_best = f_best.min(row.f);
        f_rel_best = f_rel_best.min(row.f_rel);
        if cross_1e2.is_none() && row.e <= 1e-2 {
            cross_1e2 = Some(Crossing {
                k: row.k,
                time_s: row.time_s,
            });
        }
        if cross_1e3.is_none() && row.e <= 1e-3 {
            cross_1e3 = Some(Crossing {
                k: row.k,
                time_s: row.time_s,
            });
        }
    }
    let last = rows.last();
    Summary {
        method,
        iterations: last.map_or(0, |r| r.k),
        total_time_s: last.map_or(0.0, |r| r.time_s),
        f_best,
        e_final: last.map_or(f64::NAN, |r| r.e),
        f_rel_best,
        cross_1e2,
        cross_1e3,
        absolute_metrics: absolute,
    }
}

/// Everything produced by one experiment.
#[derive(Debug)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<TraceRow>,
    pub summary: Summary,
    pub x_final: Vec<f64>,
    pub x_star: ImageGrid,
    pub f_star: f64,
}

/// Maps a validated experiment spec onto solver parameters.
pub fn spdhg_params_for(spec: &ExperimentSpec) -> SpdhgParams {
    let mode = if spec.method.uses_level_stepsize() {
        SpdhgMode::Level {
            schedule: spec.schedule,
            params: spec.level,
        }
    } else {
        SpdhgMode::Schedule(spec.schedule)
    };
    let mut params = SpdhgParams::new(mode, spec.max_iter);
    params.rho_max = spec.rho_max;
    params
}

/// Runs one experiment end to end: regenerate the problem, obtain the
/// shared reference solution, run the method, and assemble the trace with
/// per-iteration metrics. A zero budget yields a single trace row for the
/// starting point.
pub fn run_experiment(spec: &ExperimentSpec, cache_dir: &Path) -> Result<ExperimentResult> {
    spec.validate()?;
    let built = build_problem(&spec.problem)?;
    let (x_star, f_star) = reference_solution(spec, &built, cache_dir)?;
    let problem = built.to_spdhg(spec.problem.beta)?;
    let params = spdhg_params_for(spec);
    let mut state = SpdhgState::new(problem, params)?;

    let mut rows = Vec::with_capacity(spec.max_iter + 1);
    let mut absolute = false;
    for _ in 0..spec.max_iter {
        let x_pre = state.x().to_vec();
        let info = state.step()?;
        let m = metrics(&x_pre, info.f, x_star.data(), f_star);
        absolute |= m.absolute;
        rows.push(TraceRow {
            k: info.k,
            time_s: info.time_s,
            f: info.f,
            e: m.e,
            f_rel: m.f_rel,
            alpha: Some(info.alpha),
            eps: Some(info.eps),
            delta: info.delta,
            u_norm: Some(info.u_norm),
        });
    }
    let f_final = state.objective()?;
    let m = metrics(state.x(), f_final, x_star.data(), f_star);
    absolute |= m.absolute;
    rows.push(TraceRow {
        k: state.k(),
        time_s: state.elapsed_s(),
        f: f_final,
        e: m.e,
        f_rel: m.f_rel,
        alpha: None,
        eps: None,
        delta: state.level().map(|l| l.delta),
        u_norm: None,
    });

    let summary = summarize(spec.method, &rows, absolute);
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        summary,
        x_final: state.x().to_vec(),
        x_star,
        f_star,
    })
}

/// Reconstruction quality sweep over a beta grid: for each value, run the
/// configured method at the given budget and report the relative distance
/// of the final iterate to the ground truth. No reference solution is
/// involved — the sweep compares against the known phantom.
pub fn sweep_beta(base: &ExperimentSpec, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    base.validate()?;
    let mut results = Vec::with_capacity(betas.len());
    for &beta in betas {
        let mut spec = base.clone();
        spec.problem.beta = beta;
        let built = build_problem(&spec.problem)?;
        let problem = built.to_spdhg(beta)?;
        let out = crate::spdhg::spdhg_run(problem, spdhg_params_for(&spec))?;
        let x_true = built.x_true.data();
        let tn: f64 = x_true.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff: f64 = out
            .x
            .iter()
            .zip(x_true)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        results.push((beta, diff / tn.max(1e-300)));
    }
    Ok(results)
}

/// Default cache directory: `$EPSUB_CACHE_DIR` or `./cache`.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os("EPSUB_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cache"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec(side: usize, max_iter: usize) -> ExperimentSpec {
        let mut problem = ProblemSpec::new(PhantomKind::Disks, side);
        problem.psf_size = 5;
        problem.beta = 0.02;
        problem.seed = 3;
        let schedule = PolySchedule::new([0.5, 0.05, 0.5, 1e-3, 1e13, 1.0]).unwrap();
        let mut spec = ExperimentSpec::new(problem, Method::Spdhg, schedule);
        spec.max_iter = max_iter;
        spec.ref_budget = 20_000;
        spec
    }

    fn temp_cache(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("epsub-cache-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn metrics_trivial_and_formula() {
        let x_star = vec![3.0, 4.0];
        let m = metrics(&x_star, 2.0, &x_star, 2.0);
        assert_eq!(m.e, 0.0);
        assert_eq!(m.f_rel, 0.0);
        assert!(!m.absolute);
        let m = metrics(&x_star, 4.0, &x_star, 2.0);
        assert_eq!(m.f_rel, 1.0);
        // hand formula on a random pair
        let x = vec![1.0, 1.0];
        let m = metrics(&x, 5.0, &x_star, 2.0);
        let expect_e = ((1.0f64 - 3.0).powi(2) + (1.0f64 - 4.0).powi(2)).sqrt() / 5.0;
        assert!((m.e - expect_e).abs() < 1e-15);
        assert!((m.f_rel - 1.5).abs() < 1e-15);
    }

    #[test]
    fn metrics_fall_back_to_absolute() {
        let zero = vec![0.0, 0.0];
        let m = metrics(&[1.0, 0.0], 3.0, &zero, 0.0);
        assert!(m.absolute);
        assert_eq!(m.e, 1.0);
        assert_eq!(m.f_rel, 3.0);
    }

    #[test]
    fn spec_validation_rules() {
        let spec = quick_spec(16, 10);
        assert!(spec.validate().is_ok());
        // PDHG with a nonzero gamma is inconsistent
        let mut bad = quick_spec(16, 10);
        bad.method = Method::Pdhg;
        assert!(bad.validate().is_err());
        // SL with an alpha schedule is inconsistent
        let mut sl = quick_spec(16, 10);
        sl.method = Method::Sl;
        assert!(sl.validate().is_err());
        sl.schedule = PolySchedule::new([0.5, 0.05, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(sl.validate().is_ok());
    }

    #[test]
    fn zero_budget_trace_has_single_row() {
        let cache = temp_cache("zero");
        let mut spec = quick_spec(8, 0);
        spec.problem.psf_size = 3;
        spec.ref_budget = 5_000;
        let result = run_experiment(&spec, &cache).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0].k, 0);
        assert!(result.rows[0].alpha.is_none());
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn reference_cache_hit_is_identical() {
        let cache = temp_cache("refhit");
        let mut spec = quick_spec(8, 5);
        spec.problem.psf_size = 3;
        spec.ref_budget = 5_000;
        let built = build_problem(&spec.problem).unwrap();
        let (x1, f1) = reference_solution(&spec, &built, &cache).unwrap();
        let (x2, f2) = reference_solution(&spec, &built, &cache).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(f1, f2);
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn identity_problem_reference_is_the_data() {
        // beta = 0, H = I, b = 0: the optimum is exactly the data and the
        // optimal value is 0, so absolute metrics kick in
        let cache = temp_cache("ident");
        let mut spec = quick_spec(8, 3);
        spec.problem.kind = PhantomKind::Ramp;
        // counts stay comfortably above zero so that b = 0 is admissible
        spec.problem.intensity_lo = 20.0;
        spec.problem.intensity_hi = 100.0;
        spec.problem.background = 0.0;
        spec.problem.i_max = 100.0; // scale 1
        spec.problem.psf_size = 1;
        spec.problem.beta = 0.0;
        spec.ref_budget = 4_000;
        let built = build_problem(&spec.problem).unwrap();
        let (x_star, f_star) = reference_solution(&spec, &built, &cache).unwrap();
        let g = built.g.data();
        let err: f64 = x_star
            .data()
            .iter()
            .zip(g)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let gn: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err / gn < 1e-5, "x* is {}-far from g", err / gn);
        assert!(f_star.abs() < 1e-6 * gn, "f* = {f_star}");
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn level_trace_has_nonincreasing_delta() {
        let cache = temp_cache("ssl");
        let mut spec = quick_spec(8, 300);
        spec.problem.psf_size = 3;
        spec.ref_budget = 5_000;
        spec.method = Method::Ssl;
        spec.schedule = PolySchedule::new([0.5, 0.05, 0.0, 0.0, 1e13, 1.0]).unwrap();
        let result = run_experiment(&spec, &cache).unwrap();
        let mut prev = f64::INFINITY;
        for row in &result.rows {
            let d = row.delta.expect("level trace must carry delta");
            assert!(d <= prev + 1e-15);
            prev = d;
        }
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn pdhg_and_spdhg_share_the_reference() {
        let cache = temp_cache("shared");
        let mut spdhg = quick_spec(8, 5);
        spdhg.problem.psf_size = 3;
        spdhg.ref_budget = 5_000;
        let mut pdhg = spdhg.clone();
        pdhg.method = Method::Pdhg;
        pdhg.schedule = PolySchedule::new([0.5, 0.05, 0.5, 1e-3, 0.0, 0.0]).unwrap();
        let a = run_experiment(&spdhg, &cache).unwrap();
        let b = run_experiment(&pdhg, &cache).unwrap();
        assert_eq!(a.x_star, b.x_star);
        assert_eq!(a.f_star, b.f_star);
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn summaries_are_monotone_under_truncation() {
        let rows: Vec<TraceRow> = (0..100)
            .map(|k| TraceRow {
                k,
                time_s: k as f64 * 0.1,
                f: 100.0 / (k + 1) as f64,
                e: 1.0 / (k + 1) as f64,
                f_rel: 1.0 / (k + 1) as f64,
                alpha: Some(0.1),
                eps: Some(0.0),
                delta: None,
                u_norm: Some(1.0),
            })
            .collect();
        let full = summarize(Method::Pdhg, &rows, false);
        // e = 1/(k+1) crosses 1e-2 at k = 99
        assert_eq!(full.cross_1e2.unwrap().k, 99);
        assert!(full.cross_1e3.is_none());
        // truncating before the crossing drops it, never moves it earlier
        let cut = summarize(Method::Pdhg, &rows[..50], false);
        assert!(cut.cross_1e2.is_none());
    }
}
