//! TOML configuration with sections [problem], [method], [schedule],
//! [output]. Unknown keys are rejected; command-line flags override file
//! values. `--dump-config` prints the merged configuration, which parses
//! back to the identical experiment.

use epsub::harness::{ExperimentSpec, Method, ProblemSpec};
use epsub::imaging::PhantomKind;
use epsub::solver::SslParams;
use epsub::stepsize::PolySchedule;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub method: MethodSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub kind: String,
    pub side: usize,
    pub i_max: f64,
    pub background: f64,
    pub beta: f64,
    pub seed: u64,
    pub intensity_lo: f64,
    pub intensity_hi: f64,
    pub psf_size: usize,
    pub psf_sigma: f64,
    /// Directory holding (or receiving) the problem files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            kind: "disks".into(),
            side: 32,
            i_max: 1.0,
            background: 10.0,
            beta: 0.01,
            seed: 0,
            intensity_lo: 0.0,
            intensity_hi: 1.0,
            psf_size: 9,
            psf_sigma: 1.3,
            dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MethodSection {
    pub name: String,
    pub max_iter: usize,
    pub ref_budget: usize,
    pub rho_max: f64,
    pub nu1: f64,
    pub nu2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path_bound: Option<f64>,
}

impl Default for MethodSection {
    fn default() -> Self {
        Self {
            name: "SPDHG".into(),
            max_iter: 3000,
            ref_budget: 100_000,
            rho_max: 1e12,
            nu1: 0.5,
            nu2: 0.5,
            delta0: None,
            path_bound: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        // table-shaped defaults for the scaled schedule method
        Self {
            t1: 0.5,
            t2: 5e-3,
            t3: 0.5,
            t4: 5e-5,
            t5: 1e13,
            t6: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub plot: bool,
    pub pgm_preview: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            plot: true,
            pgm_preview: false,
        }
    }
}

impl Config {
    pub fn from_file(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, String> {
        let kind = PhantomKind::parse(&self.problem.kind).map_err(|e| e.to_string())?;
        Ok(ProblemSpec {
            kind,
            side: self.problem.side,
            i_max: self.problem.i_max,
            background: self.problem.background,
            beta: self.problem.beta,
            seed: self.problem.seed,
            intensity_lo: self.problem.intensity_lo,
            intensity_hi: self.problem.intensity_hi,
            psf_size: self.problem.psf_size,
            psf_sigma: self.problem.psf_sigma,
        })
    }

    pub fn method(&self) -> Result<Method, String> {
        Method::parse(&self.method.name).map_err(|e| e.to_string())
    }

    pub fn schedule(&self) -> Result<PolySchedule, String> {
        let s = &self.schedule;
        PolySchedule::new([s.t1, s.t2, s.t3, s.t4, s.t5, s.t6]).map_err(|e| e.to_string())
    }

    /// Builds the experiment for the configured method, zeroing the
    /// schedule fields that the method does not use (level methods carry
    /// no alpha schedule; unscaled methods carry no gamma sequence).
    pub fn experiment_for(&self, method: Method) -> Result<ExperimentSpec, String> {
        let mut schedule = self.schedule()?;
        if method.uses_level_stepsize() {
            schedule.t3 = 0.0;
            schedule.t4 = 0.0;
        }
        if !method.uses_scaling() {
            schedule.t5 = 0.0;
            schedule.t6 = 0.0;
        }
        let mut spec = ExperimentSpec::new(self.problem_spec()?, method, schedule);
        spec.level = SslParams {
            nu1: self.method.nu1,
            nu2: self.method.nu2,
            delta0: self.method.delta0,
            path_bound: self.method.path_bound,
        };
        spec.max_iter = self.method.max_iter;
        spec.ref_budget = self.method.ref_budget;
        spec.rho_max = self.method.rho_max;
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    /// The experiment for the method named in the config itself. Unlike
    /// [`Config::experiment_for`], the schedule is taken verbatim so that
    /// inconsistent settings are reported rather than silently fixed.
    pub fn experiment(&self) -> Result<ExperimentSpec, String> {
        let method = self.method()?;
        let mut spec = ExperimentSpec::new(self.problem_spec()?, method, self.schedule()?);
        spec.level = SslParams {
            nu1: self.method.nu1,
            nu2: self.method.nu2,
            delta0: self.method.delta0,
            path_bound: self.method.path_bound,
        };
        spec.max_iter = self.method.max_iter;
        spec.ref_budget = self.method.ref_budget;
        spec.rho_max = self.method.rho_max;
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}
