//! The drive parameter `u(t) = -(c/2B) ∫ e^{-iωs} E*(s) ds`.
//!
//! Smooth primitives integrate on composite Gauss–Legendre panels split at
//! every field breakpoint; sampled tables integrate by the trapezoid rule on
//! their own grid. One panel-halving pass supplies a Richardson-style error
//! estimate.
//!
//! The integral starts at `min(0, t_start)`: evolution begins at `t = 0`
//! unless the field switches on earlier.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{FieldSpec, SampleRow};
use crate::path::{PathPoint, PlanarPath};
use crate::physics::{DerivedScales, PhysicalParams};
use crate::quadrature::{panel_edges, GaussLegendre};

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepControl {
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Panels per period of the faster of `ω` and the field.
    pub panels_per_period: f64,
    /// Forces a panel width; a width coarser than the resolution rule is
    /// honoured but flagged.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_panel_width: Option<f64>,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            nodes: 8,
            panels_per_period: MIN_PANELS_PER_PERIOD,
            max_panel_width: None,
        }
    }
}

pub const MIN_PANELS_PER_PERIOD: f64 = 20.0;

impl StepControl {
    fn validate(&self) -> Result<()> {
        if self.nodes == 0 || self.nodes > 64 {
            return Err(Error::Validation(format!(
                "quadrature nodes must be in 1..=64, got {}",
                self.nodes
            )));
        }
        if !(self.panels_per_period.is_finite() && self.panels_per_period > 0.0) {
            return Err(Error::Validation(
                "panels_per_period must be positive".into(),
            ));
        }
        if let Some(h) = self.max_panel_width {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Validation("max_panel_width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Quadrature diagnostics for one `u` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub nodes: usize,
    pub panels: usize,
    pub panel_width: f64,
    /// Width the resolution rule asks for.
    pub required_panel_width: f64,
    /// `|u_h - u_{h/2}|` plus a round-off floor. Bounds the error of `u`.
    pub error_estimate: f64,
    /// Widest step of any sampled table inside the integration range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_max_step: Option<f64>,
    pub warnings: Vec<String>,
}

/// `u`, its intensity and its running trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveParameter {
    pub u: Complex64,
    pub x: f64,
    /// `(s, Re u(s), Im u(s))` at panel boundaries; ends at `u`.
    pub u_path: PlanarPath,
    pub report: ResolutionReport,
}

impl DriveParameter {
    /// Displacement amplitude `α = -u* k`.
    pub fn alpha(&self, scales: &DerivedScales) -> Complex64 {
        scales.displacement_amplitude(self.u)
    }
}

/// Running trapezoid integral of `e^{-iωs} E*(s)` over one sampled table.
struct TableIntegral<'a> {
    rows: &'a [SampleRow],
    omega: f64,
    window: [f64; 2],
    /// cumulative integral up to each row
    cumulative: Vec<Complex64>,
}

impl<'a> TableIntegral<'a> {
    fn new(rows: &'a [SampleRow], omega: f64, window: [f64; 2]) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(rows.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let clip = |r: &SampleRow| {
            let f = integrand(omega, r.t, r.e1, r.e2);
            if window[0] <= r.t && r.t <= window[1] {
                f
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        cumulative.push(acc);
        for w in rows.windows(2) {
            let (fa, fb) = (clip(&w[0]), clip(&w[1]));
            acc += (fa + fb) * (0.5 * (w[1].t - w[0].t));
            cumulative.push(acc);
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::Evaluation("sampled field integral".into()));
        }
        Ok(Self {
            rows,
            omega,
            window,
            cumulative,
        })
    }

    fn value_at(&self, t: f64) -> Complex64 {
        let first = self.rows[0].t;
        if t <= first {
            return Complex64::new(0.0, 0.0);
        }
        let idx = self.rows.partition_point(|r| r.t <= t) - 1;
        let mut acc = self.cumulative[idx];
        if idx + 1 < self.rows.len() {
            let a = &self.rows[idx];
            let b = &self.rows[idx + 1];
            let w = (t - a.t) / (b.t - a.t);
            let e1 = a.e1 + w * (b.e1 - a.e1);
            let e2 = a.e2 + w * (b.e2 - a.e2);
            let on = |s: f64| self.window[0] <= s && s <= self.window[1];
            let fa = if on(a.t) {
                integrand(self.omega, a.t, a.e1, a.e2)
            } else {
                Complex64::new(0.0, 0.0)
            };
            let ft = if on(t) {
                integrand(self.omega, t, e1, e2)
            } else {
                Complex64::new(0.0, 0.0)
            };
            acc += (fa + ft) * (0.5 * (t - a.t));
        }
        acc
    }

    fn max_step(&self, lo: f64, hi: f64) -> Option<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[1].t > lo && w[0].t < hi)
            .map(|w| w[1].t - w[0].t)
            .reduce(f64::max)
    }
}

#[inline]
fn integrand(omega: f64, s: f64, e1: f64, e2: f64) -> Complex64 {
    let (sin, cos) = (omega * s).sin_cos();
    // e^{-iωs} (E1 - i E2)
    Complex64::new(cos * e1 - sin * e2, -sin * e1 - cos * e2)
}

/// Cumulative Gauss–Legendre integral of the smooth part at each edge, plus
/// the sum of absolute panel contributions (for the round-off floor).
fn panel_integrals(
    spec: &FieldSpec,
    omega: f64,
    edges: &[f64],
    rule: &GaussLegendre,
) -> Result<(Vec<Complex64>, f64)> {
    let mut running = Vec::with_capacity(edges.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    running.push(acc);
    let mut bad = false;
    for w in edges.windows(2) {
        let piece = rule.integrate_complex(w[0], w[1], |s| {
            let (e1, e2) = spec.eval(s);
            if !(e1.is_finite() && e2.is_finite()) {
                bad = true;
            }
            integrand(omega, s, e1, e2)
        });
        acc += piece;
        magnitude += piece.norm();
        running.push(acc);
    }
    if bad || !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(Error::Evaluation(format!(
            "field on [{}, {}]",
            edges[0],
            edges[edges.len() - 1]
        )));
    }
    Ok((running, magnitude))
}

/// Computes `u(t_final)` and its trace.
pub fn compute_u(
    spec: &FieldSpec,
    scales: &DerivedScales,
    params: &PhysicalParams,
    t_final: f64,
    control: &StepControl,
) -> Result<DriveParameter> {
    spec.validate()?;
    params.validate()?;
    control.validate()?;
    if !t_final.is_finite() || t_final < spec.start() {
        return Err(Error::Validation(format!(
            "t_final = {t_final} precedes the field window start {}",
            spec.start()
        )));
    }
    let omega = scales.omega;
    let t0 = spec.start().min(0.0);
    let (sampled, smooth) = spec.split_sampled();
    let mut warnings = Vec::new();

    // resolution rule
    let omega_period = if omega != 0.0 {
        2.0 * PI / omega.abs()
    } else {
        f64::INFINITY
    };
    let shortest = smooth
        .shortest_timescale()
        .map_or(omega_period, |ts| ts.min(omega_period));
    let required = shortest / control.panels_per_period.max(MIN_PANELS_PER_PERIOD);
    let mut width = shortest / control.panels_per_period;
    if control.panels_per_period < MIN_PANELS_PER_PERIOD {
        warnings.push(format!(
            "panels_per_period = {} is below the resolution rule of {MIN_PANELS_PER_PERIOD}",
            control.panels_per_period
        ));
    }
    if let Some(h) = control.max_panel_width {
        width = h;
        if h > required {
            warnings.push(format!(
                "panel width {h:.3e} exceeds the resolution rule {required:.3e}"
            ));
        }
    }

    let rule = GaussLegendre::new(control.nodes);
    let breaks = smooth.breakpoints();
    let coarse = panel_edges(t0, t_final, &breaks, width);
    let fine: Vec<f64> = coarse
        .windows(2)
        .flat_map(|w| [0.5 * (w[0] + w[1]), w[1]])
        .fold(vec![t0], |mut v, t| {
            v.push(t);
            v
        });
    let (coarse_sum, _) = panel_integrals(&smooth, omega, &coarse, &rule)?;
    let (fine_sum, magnitude) = panel_integrals(&smooth, omega, &fine, &rule)?;
    let smooth_total = fine_sum[fine_sum.len() - 1];
    let smooth_coarse = coarse_sum[coarse_sum.len() - 1];

    let tables: Vec<TableIntegral> = sampled
        .sampled_tables()
        .map(|rows| TableIntegral::new(rows, omega, spec.window))
        .collect::<Result<_>>()?;
    let mut sampled_max_step: Option<f64> = None;
    for table in &tables {
        if let Some(step) = table.max_step(t0, t_final) {
            sampled_max_step = Some(sampled_max_step.map_or(step, |s: f64| s.max(step)));
        }
    }
    if let Some(step) = sampled_max_step {
        let need = omega_period / MIN_PANELS_PER_PERIOD;
        if step > need {
            warnings.push(format!(
                "sampled table step {step:.3e} under-resolves the cyclotron period (needs <= {need:.3e})"
            ));
        }
    }
    let sampled_at = |t: f64| -> Complex64 { tables.iter().map(|tb| tb.value_at(t)).sum() };

    let prefactor = -params.drift_factor() / 2.0;
    let u = (smooth_total + sampled_at(t_final)) * prefactor;
    let floor = 8.0 * f64::EPSILON * magnitude.max(smooth_total.norm());
    let error_estimate = ((smooth_total - smooth_coarse).norm() + floor) * prefactor.abs();

    // trace at coarse panel boundaries (every other fine edge)
    let points: Vec<PathPoint> = coarse
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let v = (fine_sum[2 * i] + sampled_at(t)) * prefactor;
            PathPoint {
                t,
                p1: v.re,
                p2: v.im,
            }
        })
        .collect();
    let u_path = PlanarPath::new(dedup_times(points))?;

    Ok(DriveParameter {
        u,
        x: scales.intensity(u)?,
        u_path,
        report: ResolutionReport {
            nodes: control.nodes,
            panels: coarse.len() - 1,
            panel_width: width,
            required_panel_width: required,
            error_estimate,
            sampled_max_step,
            warnings,
        },
    })
}

fn dedup_times(mut points: Vec<PathPoint>) -> Vec<PathPoint> {
    points.dedup_by(|b, a| b.t <= a.t);
    points
}

/// One point of a `|u|` frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub abs_u: f64,
    /// True at the physical cyclotron frequency.
    pub is_cyclotron: bool,
}

/// `|u|` with the cyclotron frequency replaced by each sweep value, in input order.
pub fn u_spectrum_sweep(
    spec: &FieldSpec,
    scales: &DerivedScales,
    params: &PhysicalParams,
    t_final: f64,
    omegas: &[f64],
    control: &StepControl,
    exec: Execution,
) -> Result<Vec<SpectrumPoint>> {
    exec.try_map(omegas, |&omega| {
        let swept = DerivedScales { omega, ..*scales };
        let d = compute_u(spec, &swept, params, t_final, control)?;
        Ok(SpectrumPoint {
            omega,
            abs_u: d.u.norm(),
            is_cyclotron: omega == scales.omega,
        })
    })
}
