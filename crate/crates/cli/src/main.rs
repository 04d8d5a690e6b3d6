//! Command line front end: problem generation, solver runs, benchmark
//! batches and plot emission.
//!
//! Exit codes: 0 success, 2 configuration error, 3 divergence, 4 I/O.

mod config;

use clap::{Args, Parser, Subcommand};
use config::Config;
use epsub::harness::plot::{render_log_plot, Series};
use epsub::harness::trace::{summary_text, write_csv, TraceRow};
use epsub::harness::{
    build_problem, reference_solution, run_experiment, sweep_beta, ExperimentResult, Method,
};
use epsub::imaging::io::{write_imgf64, write_pgm, PgmDepth};
use epsub::Error as CoreError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "epsub",
    about = "Scaled epsilon-subgradient solvers for TV-regularized Poisson deblurring",
    version
)]
struct Cli {
    /// Configuration file (TOML); flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the merged configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    /// Reference-solution cache directory (default: $EPSUB_CACHE_DIR or ./cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic problem: ground truth, observed data, manifest.
    MakeProblem(MakeProblemArgs),
    /// Run one solver and write its trace, summary and plots.
    Solve(SolveArgs),
    /// Run all four method variants on one problem with a shared reference.
    Bench(BenchArgs),
    /// Sweep the regularization weight and report reconstruction errors.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ProblemOverrides {
    /// Phantom kind: disks | blocks | ramp.
    #[arg(long)]
    kind: Option<String>,
    /// Image side length N (the image is N x N).
    #[arg(long)]
    side: Option<usize>,
    /// Peak intensity of the rescaled ground truth (noise level knob).
    #[arg(long)]
    i_max: Option<f64>,
    /// Constant background added in the count domain.
    #[arg(long)]
    background: Option<f64>,
    /// Regularization weight.
    #[arg(long)]
    beta: Option<f64>,
    /// Seed of the noise generator.
    #[arg(long)]
    seed: Option<u64>,
}

impl ProblemOverrides {
    fn apply(&self, cfg: &mut Config) {
        if let Some(v) = &self.kind {
            cfg.problem.kind = v.clone();
        }
        if let Some(v) = self.side {
            cfg.problem.side = v;
        }
        if let Some(v) = self.i_max {
            cfg.problem.i_max = v;
        }
        if let Some(v) = self.background {
            cfg.problem.background = v;
        }
        if let Some(v) = self.beta {
            cfg.problem.beta = v;
        }
        if let Some(v) = self.seed {
            cfg.problem.seed = v;
        }
    }
}

#[derive(Args)]
struct MakeProblemArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    /// Directory receiving x_true.imgf64, g.imgf64 and manifest.toml.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    /// Method: PDHG | SPDHG | SL | SSL.
    #[arg(long)]
    method: Option<String>,
    /// Iteration budget.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Schedule coefficients 't1,t2,t3,t4,t5,t6'.
    #[arg(long, value_name = "LIST")]
    t: Option<String>,
    /// Directory with a problem manifest written by make-problem.
    #[arg(long, value_name = "DIR")]
    problem_dir: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    /// Iteration budget for every method.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Maximum number of concurrently running experiments.
    #[arg(long, default_value_t = 2)]
    jobs: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemOverrides,
    /// Comma-separated list of beta values.
    #[arg(long, value_name = "LIST")]
    betas: String,
    /// Budget per sweep point.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Problem manifest recording the full generation pipeline.
#[derive(Serialize, Deserialize)]
struct Manifest {
    problem: config::ProblemSection,
    derived: DerivedSection,
}

#[derive(Serialize, Deserialize)]
struct DerivedSection {
    /// Rescale factor s = i_max / max(x_true); the data g is counts / s.
    scale: f64,
    /// Background consistent with g: background / scale. Solvers posing
    /// the fit against g must use this value.
    background_effective: f64,
    g_min: f64,
    g_max: f64,
    generator: String,
}

enum CliFailure {
    Config(String),
    Divergence(String),
    Io(String),
    Other(String),
}

impl CliFailure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Divergence(_) => 3,
            Self::Io(_) => 4,
            Self::Other(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Divergence(m) | Self::Io(m) | Self::Other(m) => m,
        }
    }
}

impl From<CoreError> for CliFailure {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidParam(_)
            | CoreError::InvalidSchedule(_)
            | CoreError::DimensionMismatch { .. } => Self::Config(msg),
            CoreError::Divergence { .. } => Self::Divergence(msg),
            CoreError::Io(_) | CoreError::Format { .. } => Self::Io(msg),
            _ => Self::Other(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliFailure> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path).map_err(CliFailure::Config)?,
        None => Config::default(),
    };
    let cache_dir = cli
        .cache_dir
        .clone()
        .unwrap_or_else(epsub::harness::default_cache_dir);

    match &cli.command {
        Command::MakeProblem(args) => {
            args.problem.apply(&mut cfg);
            if let Some(out) = &args.out {
                cfg.problem.dir = Some(out.clone());
            }
            if cli.dump_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            cmd_make_problem(&cfg)
        }
        Command::Solve(args) => {
            if let Some(dir) = &args.problem_dir {
                load_manifest_into(&mut cfg, dir)?;
            }
            args.problem.apply(&mut cfg);
            if let Some(m) = &args.method {
                cfg.method.name = m.clone();
            }
            if let Some(n) = args.max_iter {
                cfg.method.max_iter = n;
            }
            if let Some(t) = &args.t {
                apply_schedule_list(&mut cfg, t)?;
            }
            if let Some(out) = &args.out {
                cfg.output.dir = out.clone();
            }
            if cli.dump_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            cmd_solve(&cfg, &cache_dir)
        }
        Command::Bench(args) => {
            args.problem.apply(&mut cfg);
            if let Some(n) = args.max_iter {
                cfg.method.max_iter = n;
            }
            if let Some(out) = &args.out {
                cfg.output.dir = out.clone();
            }
            if cli.dump_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            cmd_bench(&cfg, &cache_dir, args.jobs.max(1))
        }
        Command::Sweep(args) => {
            args.problem.apply(&mut cfg);
            if let Some(n) = args.max_iter {
                cfg.method.max_iter = n;
            }
            if let Some(out) = &args.out {
                cfg.output.dir = out.clone();
            }
            if cli.dump_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            let betas: Vec<f64> = args
                .betas
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliFailure::Config(format!("bad beta value '{s}'")))
                })
                .collect::<Result<_, _>>()?;
            cmd_sweep(&cfg, &betas)
        }
    }
}

fn apply_schedule_list(cfg: &mut Config, list: &str) -> Result<(), CliFailure> {
    let vals: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliFailure::Config(format!("bad schedule coefficient '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    if vals.len() != 6 {
        return Err(CliFailure::Config(format!(
            "--t expects six comma-separated values t1..t6, got {}",
            vals.len()
        )));
    }
    cfg.schedule.t1 = vals[0];
    cfg.schedule.t2 = vals[1];
    cfg.schedule.t3 = vals[2];
    cfg.schedule.t4 = vals[3];
    cfg.schedule.t5 = vals[4];
    cfg.schedule.t6 = vals[5];
    Ok(())
}

fn load_manifest_into(cfg: &mut Config, dir: &Path) -> Result<(), CliFailure> {
    let path = dir.join("manifest.toml");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliFailure::Io(format!("cannot read {}: {e}", path.display())))?;
    let manifest: Manifest = toml::from_str(&text)
        .map_err(|e| CliFailure::Config(format!("manifest {}: {e}", path.display())))?;
    cfg.problem = manifest.problem;
    cfg.problem.dir = Some(dir.to_path_buf());
    Ok(())
}

fn cmd_make_problem(cfg: &Config) -> Result<(), CliFailure> {
    let spec = cfg.problem_spec().map_err(CliFailure::Config)?;
    let built = build_problem(&spec)?;
    let dir = cfg
        .problem
        .dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("problems/{}{}", cfg.problem.kind, spec.side)));
    std::fs::create_dir_all(&dir).map_err(|e| CliFailure::Io(e.to_string()))?;
    write_imgf64(&dir.join("x_true.imgf64"), &built.x_true)?;
    write_imgf64(&dir.join("g.imgf64"), &built.g)?;
    if cfg.output.pgm_preview {
        write_pgm(&dir.join("x_true.pgm"), &built.x_true, PgmDepth::Sixteen, true)?;
        write_pgm(&dir.join("g.pgm"), &built.g, PgmDepth::Sixteen, true)?;
    }
    let manifest = Manifest {
        problem: config::ProblemSection {
            dir: None,
            ..cfg.problem.clone()
        },
        derived: DerivedSection {
            scale: built.scale,
            background_effective: built.background_effective,
            g_min: built.g.min(),
            g_max: built.g.max(),
            generator: "ChaCha8 stream seeded with `seed`, one Poisson draw per pixel".into(),
        },
    };
    std::fs::write(
        dir.join("manifest.toml"),
        toml::to_string_pretty(&manifest).expect("manifest serializes"),
    )
    .map_err(|e| CliFailure::Io(e.to_string()))?;
    println!(
        "problem written to {} (g in [{:.3}, {:.3}], effective background {:.3})",
        dir.display(),
        built.g.min(),
        built.g.max(),
        built.background_effective
    );
    Ok(())
}

fn write_result(
    out_dir: &Path,
    tag: &str,
    result: &ExperimentResult,
    plot: bool,
) -> Result<(), CliFailure> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliFailure::Io(e.to_string()))?;
    write_csv(&out_dir.join(format!("{tag}.csv")), &result.rows)?;
    std::fs::write(
        out_dir.join(format!("{tag}.summary.txt")),
        summary_text(&result.summary),
    )
    .map_err(|e| CliFailure::Io(e.to_string()))?;
    if plot {
        for (metric, label) in [("e", "e_k"), ("f", "f_k")] {
            let series = vec![series_of(tag, &result.rows, metric)];
            let svg = render_log_plot(
                &format!("{tag}: {label} vs time"),
                "time (s)",
                label,
                &series,
            );
            std::fs::write(out_dir.join(format!("{tag}_{metric}.svg")), svg)
                .map_err(|e| CliFailure::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn series_of(label: &str, rows: &[TraceRow], metric: &str) -> Series {
    Series {
        label: label.to_string(),
        points: rows
            .iter()
            .map(|r| (r.time_s, if metric == "e" { r.e } else { r.f_rel }))
            .collect(),
    }
}

fn cmd_solve(cfg: &Config, cache_dir: &Path) -> Result<(), CliFailure> {
    let spec = cfg.experiment().map_err(CliFailure::Config)?;
    let result = run_experiment(&spec, cache_dir)?;
    let tag = spec.method.name();
    write_result(&cfg.output.dir, tag, &result, cfg.output.plot)?;
    print!("{}", summary_text(&result.summary));
    println!("trace written to {}/{tag}.csv", cfg.output.dir.display());
    Ok(())
}

fn cmd_bench(cfg: &Config, cache_dir: &Path, jobs: usize) -> Result<(), CliFailure> {
    // the four variants share one problem and one reference solution
    let specs: Vec<_> = Method::ALL
        .iter()
        .map(|m| cfg.experiment_for(*m).map_err(CliFailure::Config))
        .collect::<Result<_, _>>()?;
    let built = build_problem(&specs[0].problem)?;
    reference_solution(&specs[0], &built, cache_dir)?; // warm the cache once

    let mut results: Vec<Option<Result<ExperimentResult, CoreError>>> =
        (0..specs.len()).map(|_| None).collect();
    let indices: Vec<usize> = (0..specs.len()).collect();
    for batch in indices.chunks(jobs) {
        let outcomes: Vec<(usize, Result<ExperimentResult, CoreError>)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch
                    .iter()
                    .map(|&i| {
                        let spec = &specs[i];
                        scope.spawn(move || (i, run_experiment(spec, cache_dir)))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("experiment thread panicked"))
                    .collect()
            });
        for (i, outcome) in outcomes {
            results[i] = Some(outcome);
        }
    }

    std::fs::create_dir_all(&cfg.output.dir).map_err(|e| CliFailure::Io(e.to_string()))?;
    let mut e_series = Vec::new();
    let mut f_series = Vec::new();
    let mut failures = Vec::new();
    for (spec, outcome) in specs.iter().zip(results.into_iter()) {
        match outcome.expect("all experiments scheduled") {
            Ok(result) => {
                let tag = format!("bench_{}", spec.method.name());
                write_result(&cfg.output.dir, &tag, &result, false)?;
                e_series.push(series_of(spec.method.name(), &result.rows, "e"));
                f_series.push(series_of(spec.method.name(), &result.rows, "f"));
                println!("{}", summary_text(&result.summary));
            }
            Err(e) => {
                eprintln!("{} failed: {e}", spec.method);
                failures.push((spec.method, CliFailure::from(e)));
            }
        }
    }
    if cfg.output.plot {
        std::fs::write(
            cfg.output.dir.join("bench_e.svg"),
            render_log_plot("relative error e_k vs time", "time (s)", "e_k", &e_series),
        )
        .map_err(|e| CliFailure::Io(e.to_string()))?;
        std::fs::write(
            cfg.output.dir.join("bench_f.svg"),
            render_log_plot(
                "relative objective gap f_k vs time",
                "time (s)",
                "f_k",
                &f_series,
            ),
        )
        .map_err(|e| CliFailure::Io(e.to_string()))?;
    }
    let n_failed = failures.len();
    if let Some((method, failure)) = failures.into_iter().next() {
        return Err(CliFailure::Other(format!(
            "{n_failed} of 4 methods failed; first: {method} — {}",
            failure.message()
        )));
    }
    Ok(())
}

fn cmd_sweep(cfg: &Config, betas: &[f64]) -> Result<(), CliFailure> {
    let method = cfg.method().map_err(CliFailure::Config)?;
    let base = cfg.experiment_for(method).map_err(CliFailure::Config)?;
    let results = sweep_beta(&base, betas)?;
    std::fs::create_dir_all(&cfg.output.dir).map_err(|e| CliFailure::Io(e.to_string()))?;
    let mut text = String::from("beta,recon_rel_err\n");
    for (beta, err) in &results {
        println!("beta {beta:<10} reconstruction relative error {err:.6}");
        text.push_str(&format!("{beta},{err:.10e}\n"));
    }
    std::fs::write(cfg.output.dir.join("sweep.csv"), text)
        .map_err(|e| CliFailure::Io(e.to_string()))?;
    let best = results
        .iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .ok_or_else(|| CliFailure::Config("empty beta list".into()))?;
    println!("best beta {} (error {:.6})", best.0, best.1);
    Ok(())
}
