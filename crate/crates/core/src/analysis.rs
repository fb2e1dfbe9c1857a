//! End-to-end evaluation of one field: drive parameter, drift path, phases
//! and the probabilities that follow from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;
use crate::field::FieldSpec;
use crate::fourier::{compute_u, DriveParameter, StepControl};
use crate::path::{drift_path, phases, DriftPath, GeometricPhases};
use crate::physics::{derive_scales, DerivedScales, PhysicalParams};
use crate::transitions::{survival, transition_matrix, SurvivalResult, TransitionTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldAnalysis {
    pub scales: DerivedScales,
    pub drive: DriveParameter,
    pub alpha: Complex64,
    pub drift: DriftPath,
    pub phases: GeometricPhases,
}

/// Runs the field up to `t_final` (the window end when `None`). The drift
/// path is sampled on the same times as the `u` trace.
pub fn analyze_field(
    spec: &FieldSpec,
    params: &PhysicalParams,
    t_final: Option<f64>,
    control: &StepControl,
) -> Result<FieldAnalysis> {
    let scales = derive_scales(params)?;
    let t_final = t_final.unwrap_or_else(|| spec.end());
    let drive = compute_u(spec, &scales, params, t_final, control)?;
    let grid: Vec<f64> = drive.u_path.points().iter().map(|p| p.t).collect();
    let drift = drift_path(spec, params, &grid)?;
    let phases = phases(&drift.path, &drive.u_path, params);
    let alpha = drive.alpha(&scales);
    Ok(FieldAnalysis {
        scales,
        drive,
        alpha,
        drift,
        phases,
    })
}

/// Survival and the full row for one initial level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub survival: SurvivalResult,
    pub table: TransitionTable,
    pub phases: GeometricPhases,
}

impl LevelOutcome {
    /// Every probability in the outcome, survival first.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut out = vec![
            self.survival.survival_probability,
            self.survival.transition_probability,
        ];
        out.extend_from_slice(&self.table.probabilities);
        out.extend([
            self.table.up_mass,
            self.table.down_mass,
            self.table.tail_mass,
        ]);
        out
    }
}

pub fn level_outcome(
    n: usize,
    alpha: Complex64,
    phases: GeometricPhases,
    m_max: Option<usize>,
    tail_tolerance: f64,
    exec: Execution,
) -> Result<LevelOutcome> {
    let survival = survival(n, alpha.norm_sqr(), phases.gamma)?;
    let table = transition_matrix(n, alpha, m_max, tail_tolerance, exec)?;
    Ok(LevelOutcome {
        survival,
        table,
        phases,
    })
}
