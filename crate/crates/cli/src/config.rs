//! Run configuration. TOML by default; a `.json` extension selects JSON.
//!
//! ```toml
//! [physics]            # q, m, b, c, hbar, optional k
//! [field]              # window = [t0, t1] plus [[field.components]]
//! [quadrature]         # nodes, panels_per_period, max_panel_width, t_final
//! [transitions]        # n, alpha = [re, im] or x, m_max, tail_tolerance
//! [oracle]             # levels, dimension, step, tolerance, energy_offset
//! [sweep]              # kind = "levels" | "intensity" | "spectrum" and its range
//! [output]             # path, format, trace, gnuplot, execution
//! ```
//!
//! Every section is optional and unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use landau_core::{Complex64, Error, Execution, FieldSpec, PhysicalParams, StepControl};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub physics: PhysicalParams,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub transitions: TransitionSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub nodes: usize,
    pub panels_per_period: f64,
    pub max_panel_width: Option<f64>,
    /// Upper time limit of the drive integral; the window end when absent.
    pub t_final: Option<f64>,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let c = StepControl::default();
        Self {
            nodes: c.nodes,
            panels_per_period: c.panels_per_period,
            max_panel_width: None,
            t_final: None,
        }
    }
}

impl QuadratureSection {
    pub fn control(&self) -> StepControl {
        StepControl {
            nodes: self.nodes,
            panels_per_period: self.panels_per_period,
            max_panel_width: self.max_panel_width,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionSection {
    pub n: usize,
    /// Displacement amplitude. Takes precedence over `x` and the field.
    pub alpha: Option<[f64; 2]>,
    /// Intensity; used as a real `alpha = sqrt(x)` when no `alpha` is given.
    pub x: Option<f64>,
    pub m_max: Option<usize>,
    pub tail_tolerance: f64,
}

impl Default for TransitionSection {
    fn default() -> Self {
        Self {
            n: 0,
            alpha: None,
            x: None,
            m_max: None,
            tail_tolerance: 1e-12,
        }
    }
}

impl TransitionSection {
    pub fn fixed_alpha(&self) -> Option<Complex64> {
        match (self.alpha, self.x) {
            (Some([re, im]), _) => Some(Complex64::new(re, im)),
            (None, Some(x)) => Some(Complex64::new(x.sqrt(), 0.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub levels: Vec<usize>,
    /// Fock dimension; sized from the analytic intensity when absent.
    pub dimension: Option<usize>,
    /// RK4 step; a fixed fraction of the shortest period when absent.
    pub step: Option<f64>,
    pub tolerance: f64,
    pub energy_offset: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            levels: vec![0, 3, 10],
            dimension: None,
            step: None,
            tolerance: 1e-6,
            energy_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    #[default]
    Levels,
    Intensity,
    Spectrum,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub kind: SweepKind,
    pub x: f64,
    pub n: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            kind: SweepKind::Levels,
            x: 8.0,
            n: 100,
            n_min: 0,
            n_max: 160,
            x_min: 0.0,
            x_max: 30.0,
            omega_min: 0.5,
            omega_max: 1.5,
            points: 600,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl From<ExecMode> for Execution {
    fn from(m: ExecMode) -> Self {
        match m {
            ExecMode::Sequential => Execution::Sequential,
            ExecMode::Parallel => Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// CSV of the `u(t)` and `R(t)` traces written by `u`.
    pub trace: Option<PathBuf>,
    /// Gnuplot script written next to figure and sweep output.
    pub gnuplot: Option<PathBuf>,
    pub execution: ExecMode,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg = if is_json {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base)?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("config: {}", e.message())))
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    /// Resolves relative paths (sampled-field files, outputs) against `base`.
    fn rebase(&mut self, base: &Path) -> Result<(), Error> {
        if let Some(field) = self.field.as_mut() {
            field.resolve_files(base)?;
        }
        for p in [
            &mut self.output.path,
            &mut self.output.trace,
            &mut self.output.gnuplot,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.physics.validate()?;
        if let Some(f) = &self.field {
            f.validate()?;
        }
        if self.quadrature.nodes == 0 || !(self.quadrature.panels_per_period > 0.0) {
            return Err(Error::Validation(
                "quadrature nodes and panels_per_period must be positive".into(),
            ));
        }
        if let Some(a) = self.transitions.fixed_alpha() {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Validation(
                    "transitions.alpha / x must be finite and x non-negative".into(),
                ));
            }
        }
        if !(self.transitions.tail_tolerance > 0.0) {
            return Err(Error::Validation(
                "transitions.tail_tolerance must be positive".into(),
            ));
        }
        let o = &self.oracle;
        if o.levels.is_empty() {
            return Err(Error::Validation("oracle.levels is empty".into()));
        }
        if o.step.is_some_and(|h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::Validation("oracle.step must be positive".into()));
        }
        if o.dimension.is_some_and(|d| d < 2) {
            return Err(Error::Validation(
                "oracle.dimension must be at least 2".into(),
            ));
        }
        if !(o.tolerance > 0.0) {
            return Err(Error::Validation(
                "oracle.tolerance must be positive".into(),
            ));
        }
        let s = &self.sweep;
        if s.points == 0 {
            return Err(Error::Validation("sweep.points must be positive".into()));
        }
        if s.n_min > s.n_max || !(s.x_min <= s.x_max) || !(s.omega_min <= s.omega_max) {
            return Err(Error::Validation(
                "sweep ranges must have min <= max".into(),
            ));
        }
        Ok(())
    }
}
