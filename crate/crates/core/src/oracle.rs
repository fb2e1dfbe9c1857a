//! Brute-force checks in a truncated Fock space.
//!
//! Two independent routes to the level-mixing probabilities:
//!
//! * [`displacement_matrix`] exponentiates the truncated generator
//!   `α a† - α* a` by scaling and squaring.
//! * [`integrate_tdse`] integrates the driven oscillator
//!   `iħ ψ' = [ħω(a†a + 1/2) + E₀ + λ(t) a + λ*(t) a†] ψ` with classic RK4,
//!   starting from a number state and using the raw field. The coupling is
//!   `λ(t) = -iħ k (c/2B) E*(t)`, which makes the final interaction-picture
//!   displacement equal `-u* k`.
//!
//! Only the cyclotron oscillator is simulated. The guiding-center motion
//! commutes with the level index and drops out of every level probability.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::FieldSpec;
use crate::fourier::{compute_u, StepControl};
use crate::physics::{DerivedScales, PhysicalParams};
use crate::transitions::{support_heuristic, transition_probability};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Ladder operators on levels `0..dim`.
#[derive(Debug, Clone)]
pub struct TruncatedLadder {
    pub dim: usize,
    pub lowering: Array2<Complex64>,
    pub raising: Array2<Complex64>,
    pub number: Array2<Complex64>,
}

impl TruncatedLadder {
    pub fn new(dim: usize) -> Self {
        let mut lowering = Array2::zeros((dim, dim));
        for n in 1..dim {
            lowering[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let raising = lowering.t().mapv(|v: Complex64| v.conj());
        let number = raising.dot(&lowering);
        Self {
            dim,
            lowering,
            raising,
            number,
        }
    }

    /// `[a, a†] - 1`. Zero except the last diagonal entry, which is `-dim`.
    pub fn commutator_defect(&self) -> Array2<Complex64> {
        let comm = self.lowering.dot(&self.raising) - self.raising.dot(&self.lowering);
        comm - Array2::<Complex64>::eye(self.dim)
    }

    /// `α a† - α* a`.
    pub fn displacement_generator(&self, alpha: Complex64) -> Array2<Complex64> {
        &self.raising * alpha - &self.lowering * alpha.conj()
    }
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring around a Taylor core.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, the series is
/// summed until a term drops below `1e-18` relative, and the result is
/// squared `s` times.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);

    let mut result = Array2::<Complex64>::eye(n);
    let mut term = Array2::<Complex64>::eye(n);
    for k in 1..=60 {
        term = term.dot(&scaled) * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Width of the band near the truncation edge excluded from unitarity checks:
/// `ceil(4 |α| sqrt(N))`, capped at `N/4`.
pub fn guard_band(alpha: Complex64, dim: usize) -> usize {
    ((4.0 * alpha.norm() * (dim as f64).sqrt()).ceil() as usize).min(dim / 4)
}

/// Truncated `exp(α a† - α* a)` on `dim` levels.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> Result<Array2<Complex64>> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::Domain(format!(
            "displacement amplitude {alpha} is not finite"
        )));
    }
    let need = support_heuristic(0, alpha.norm_sqr());
    if dim < need {
        return Err(Error::Dimension(format!(
            "dimension {dim} is below the support of a displacement with |α|² = {:.3} (needs >= {need})",
            alpha.norm_sqr()
        )));
    }
    let ladder = TruncatedLadder::new(dim);
    Ok(expm(&ladder.displacement_generator(alpha)))
}

/// Largest deviation of `U† U` from the identity on the first `dim - guard` columns.
pub fn interior_unitarity_defect(u: &Array2<Complex64>, guard: usize) -> f64 {
    let dim = u.nrows();
    let keep = dim.saturating_sub(guard);
    let mut worst: f64 = 0.0;
    for i in 0..keep {
        for j in 0..keep {
            let mut acc = ZERO;
            for r in 0..dim {
                acc += u[[r, i]].conj() * u[[r, j]];
            }
            let want = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}

/// Settings for one RK4 run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdseSettings {
    /// Fock-space dimension.
    pub dimension: usize,
    /// Largest RK4 step; each smooth field segment uses equal steps no wider.
    pub step: f64,
    /// Constant added to the Hamiltonian.
    #[serde(default)]
    pub energy_offset: f64,
    /// Largest allowed population in the top eighth of the basis.
    #[serde(default = "default_tail_threshold")]
    pub tail_threshold: f64,
    /// Largest allowed `| |ψ| - 1 |` at the end.
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
}

fn default_tail_threshold() -> f64 {
    1e-10
}

fn default_norm_tolerance() -> f64 {
    1e-8
}

impl TdseSettings {
    pub fn new(dimension: usize, step: f64) -> Self {
        Self {
            dimension,
            step,
            energy_offset: 0.0,
            tail_threshold: default_tail_threshold(),
            norm_tolerance: default_norm_tolerance(),
        }
    }
}

/// Minimum RK4 steps per shortest period.
pub const STEPS_PER_PERIOD: f64 = 40.0;

/// Final interaction-picture amplitudes of a TDSE run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolvedState {
    pub amplitudes: Vec<Complex64>,
    /// `|ψ|` after every step.
    pub norm_history: Vec<f64>,
    pub time: f64,
    pub steps: usize,
    /// Population in the top eighth of the basis.
    pub tail_mass: f64,
    pub norm_drift: f64,
}

impl EvolvedState {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

fn top_band(dim: usize) -> usize {
    (dim / 8).max(1)
}

/// Integrates the driven oscillator from `|initial_level>` across the field
/// window. Time starts at `min(0, t_start)`.
///
/// Amplitudes are propagated in the frame rotating with `ħω(n + 1/2)`, so
/// the free phases `e^{-iω(n+1/2)t}` are already divided out.
pub fn integrate_tdse(
    spec: &FieldSpec,
    params: &PhysicalParams,
    scales: &DerivedScales,
    settings: &TdseSettings,
    initial_level: usize,
) -> Result<EvolvedState> {
    spec.validate()?;
    params.validate()?;
    let dim = settings.dimension;
    if scales.omega <= 0.0 {
        return Err(Error::Parameter(
            "the oscillator oracle needs qB > 0".into(),
        ));
    }
    if initial_level >= dim {
        return Err(Error::Dimension(format!(
            "initial level {initial_level} is outside dimension {dim}"
        )));
    }
    if !(settings.step.is_finite() && settings.step > 0.0) {
        return Err(Error::StepSize(format!(
            "step must be positive, got {}",
            settings.step
        )));
    }
    let period = 2.0 * PI / scales.omega;
    let shortest = spec
        .shortest_timescale()
        .map_or(period, |ts| ts.min(period));
    if settings.step > shortest / STEPS_PER_PERIOD {
        return Err(Error::StepSize(format!(
            "step {:.3e} gives fewer than {STEPS_PER_PERIOD} steps per shortest period {shortest:.3e}",
            settings.step
        )));
    }

    // λ(t)/ħ = -i k (c/2B) E*(t)
    let coupling = scales.k * params.drift_factor() / 2.0;
    let omega = scales.omega;
    let offset = settings.energy_offset / params.hbar;
    let sqrt_n: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();

    // dc/dt = -i [offset c_n + g(t) sqrt(n+1) c_{n+1} + g*(t) sqrt(n) c_{n-1}],
    // g(t) = (λ(t)/ħ) e^{-iωt}
    let deriv = |t: f64, c: &[Complex64], out: &mut [Complex64]| {
        let e = spec.complex(t);
        let g = Complex64::new(0.0, -coupling) * e.conj() * Complex64::from_polar(1.0, -omega * t);
        let gc = g.conj();
        let minus_i = Complex64::new(0.0, -1.0);
        for n in 0..dim {
            let mut acc = c[n] * offset;
            if n + 1 < dim {
                acc += g * (c[n + 1] * sqrt_n[n + 1]);
            }
            if n > 0 {
                acc += gc * (c[n - 1] * sqrt_n[n]);
            }
            out[n] = minus_i * acc;
        }
    };

    let t0 = spec.start().min(0.0);
    let mut cuts = vec![t0];
    cuts.extend(spec.breakpoints().into_iter().filter(|&t| t > t0));
    cuts.dedup();

    let mut c = vec![ZERO; dim];
    c[initial_level] = ONE;
    let mut k1 = vec![ZERO; dim];
    let mut k2 = vec![ZERO; dim];
    let mut k3 = vec![ZERO; dim];
    let mut k4 = vec![ZERO; dim];
    let mut tmp = vec![ZERO; dim];
    let mut norm_history = Vec::new();
    let mut steps = 0usize;

    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let count = ((b - a) / settings.step).ceil().max(1.0) as usize;
        let h = (b - a) / count as f64;
        // Field values at segment ends come from the interior side; the nudge
        // must clear the spacing of f64 near t or it rounds back onto the jump.
        let nudge = (1e-9 * h).max(8.0 * f64::EPSILON * a.abs().max(b.abs()));
        let lo = a + nudge;
        let hi = b - nudge;
        for i in 0..count {
            let t = a + i as f64 * h;
            let ts = t.max(lo);
            let te = (t + h).min(hi);
            let tm = t + 0.5 * h;
            deriv(ts, &c, &mut k1);
            for n in 0..dim {
                tmp[n] = c[n] + k1[n] * (0.5 * h);
            }
            deriv(tm, &tmp, &mut k2);
            for n in 0..dim {
                tmp[n] = c[n] + k2[n] * (0.5 * h);
            }
            deriv(tm, &tmp, &mut k3);
            for n in 0..dim {
                tmp[n] = c[n] + k3[n] * h;
            }
            deriv(te, &tmp, &mut k4);
            for n in 0..dim {
                c[n] += (k1[n] + (k2[n] + k3[n]) * 2.0 + k4[n]) * (h / 6.0);
            }
            norm_history.push(c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
            steps += 1;
        }
    }

    let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::StepSize("state diverged".into()));
    }
    let norm_drift = (norm - 1.0).abs();
    let tail_mass: f64 = c[dim - top_band(dim)..].iter().map(|v| v.norm_sqr()).sum();
    if norm_drift > settings.norm_tolerance {
        return Err(Error::StepSize(format!(
            "norm drift {norm_drift:.3e} exceeds {:.1e}; reduce the step",
            settings.norm_tolerance
        )));
    }
    if tail_mass > settings.tail_threshold {
        return Err(Error::Dimension(format!(
            "population {tail_mass:.3e} in the top {} levels exceeds {:.1e}; raise the dimension",
            top_band(dim),
            settings.tail_threshold
        )));
    }
    Ok(EvolvedState {
        amplitudes: c,
        norm_history,
        time: cuts[cuts.len() - 1],
        steps,
        tail_mass,
        norm_drift,
    })
}

/// Dimension covering the displaced support of level `n` at intensity `x`,
/// with a margin for the guard band, capped at 512.
pub fn suggest_dimension(n: usize, x: f64) -> usize {
    let support = support_heuristic(n, x);
    (support + support / 2 + 16).min(512)
}

/// RK4 steps per shortest period in [`suggest_step`].
pub const SUGGESTED_STEPS_PER_PERIOD: f64 = 640.0;

/// Largest `h λ` allowed by [`suggest_step`], `λ` bounding the coupling's spectral radius.
pub const COUPLING_STEP_PRODUCT: f64 = 0.02;

/// Step resolving both the shortest period and the ladder coupling
/// `λ = 2 |g|_max sqrt(dimension)`, with `|g|_max = k (c/2|B|) max|E|`.
pub fn suggest_step(
    spec: &FieldSpec,
    params: &PhysicalParams,
    scales: &DerivedScales,
    dimension: usize,
) -> f64 {
    let period = 2.0 * PI / scales.omega.abs();
    let shortest = spec
        .shortest_timescale()
        .map_or(period, |ts| ts.min(period));
    let g_max = scales.k * (params.drift_factor() / 2.0).abs() * spec.magnitude_bound();
    let lambda = 2.0 * g_max * (dimension as f64).sqrt();
    let by_period = shortest / SUGGESTED_STEPS_PER_PERIOD;
    if lambda > 0.0 {
        by_period.min(COUPLING_STEP_PRODUCT / lambda)
    } else {
        by_period
    }
}

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub field_hash: String,
    pub n_initial: usize,
    #[serde(rename = "N")]
    pub dimension: usize,
    pub step: f64,
    pub max_abs_prob_error: f64,
    pub norm_drift: f64,
    pub tail_mass: f64,
}

/// Runs the TDSE from `initial_level` and compares every level probability
/// with `|<m| D(-u* k) |n>|²` built from the drive parameter.
pub fn compare_with_analytic(
    spec: &FieldSpec,
    params: &PhysicalParams,
    scales: &DerivedScales,
    settings: &TdseSettings,
    initial_level: usize,
) -> Result<OracleReport> {
    let state = integrate_tdse(spec, params, scales, settings, initial_level)?;
    let drive = compute_u(spec, scales, params, state.time, &StepControl::default())?;
    let alpha = drive.alpha(scales);
    let mut worst: f64 = 0.0;
    for (m, p) in state.probabilities().into_iter().enumerate() {
        let want = transition_probability(m, initial_level, alpha)?;
        worst = worst.max((p - want).abs());
    }
    Ok(OracleReport {
        field_hash: spec.digest(),
        n_initial: initial_level,
        dimension: settings.dimension,
        step: settings.step,
        max_abs_prob_error: worst,
        norm_drift: state.norm_drift,
        tail_mass: state.tail_mass,
    })
}

/// Runs [`compare_with_analytic`] for each initial level, in input order.
pub fn compare_levels(
    spec: &FieldSpec,
    params: &PhysicalParams,
    scales: &DerivedScales,
    settings: &TdseSettings,
    levels: &[usize],
    exec: Execution,
) -> Result<Vec<OracleReport>> {
    exec.try_map(levels, |&n| {
        compare_with_analytic(spec, params, scales, settings, n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Primitive, Target};
    use crate::laguerre::laguerre_scaled;
    use crate::physics::derive_scales;
    use crate::transitions::displacement_element;

    fn natural() -> (PhysicalParams, DerivedScales) {
        let p = PhysicalParams::default();
        (p, derive_scales(&p).unwrap())
    }

    #[test]
    fn ladder_commutator() {
        let l = TruncatedLadder::new(12);
        let defect = l.commutator_defect();
        for i in 0..12 {
            for j in 0..12 {
                let want = if i == 11 && j == 11 { -12.0 } else { 0.0 };
                assert!((defect[[i, j]].re - want).abs() < 1e-12, "({i},{j})");
            }
        }
        for n in 0..12 {
            assert!((l.number[[n, n]].re - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn expm_of_diagonal_and_rotation() {
        let mut a = Array2::<Complex64>::zeros((2, 2));
        a[[0, 1]] = Complex64::new(-3.0, 0.0);
        a[[1, 0]] = Complex64::new(3.0, 0.0);
        let e = expm(&a);
        assert!((e[[0, 0]].re - 3f64.cos()).abs() < 1e-14);
        assert!((e[[1, 0]].re - 3f64.sin()).abs() < 1e-14);
        let mut d = Array2::<Complex64>::zeros((3, 3));
        d[[2, 2]] = Complex64::new(0.0, 7.0);
        let e = expm(&d);
        assert!((e[[2, 2]] - Complex64::new(0.0, 7.0).exp()).norm() < 1e-13);
    }

    #[test]
    fn zero_alpha_is_identity() {
        let m = displacement_matrix(ZERO, 32).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let want = if i == j { ONE } else { ZERO };
                assert_eq!(m[[i, j]], want);
            }
        }
    }

    #[test]
    fn dimension_gate() {
        assert!(matches!(
            displacement_matrix(Complex64::new(3.0, 0.0), 20),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn vacuum_and_diagonal_match_laguerre() {
        let x: f64 = 3.0;
        let alpha = Complex64::from_polar(x.sqrt(), 0.4);
        let m = displacement_matrix(alpha, 128).unwrap();
        assert!((m[[0, 0]] - Complex64::new((-0.5 * x).exp(), 0.0)).norm() < 1e-12);
        for n in 0..=10 {
            let want = laguerre_scaled(n, x).unwrap();
            assert!(
                (m[[n, n]] - Complex64::new(want, 0.0)).norm() < 1e-10,
                "n = {n}"
            );
        }
        // off-diagonal against the closed form
        for (i, j) in [(1, 0), (0, 1), (7, 3), (3, 7), (12, 0)] {
            let want = displacement_element(i, j, alpha).unwrap();
            assert!((m[[i, j]] - want).norm() < 1e-11, "({i},{j})");
        }
        let small = displacement_matrix(Complex64::new(0.5, 0.0), 32).unwrap();
        assert!((small[[1, 0]].re - 0.5 * (-0.125f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn interior_unitarity() {
        let alpha = Complex64::new(1.2, -0.5);
        let dim = 96;
        let m = displacement_matrix(alpha, dim).unwrap();
        let guard = guard_band(alpha, dim);
        assert!(guard > 0 && guard <= dim / 4);
        assert!(interior_unitarity_defect(&m, guard) < 1e-10);
    }

    fn cosine_field(amplitude: f64, periods: f64) -> FieldSpec {
        let t = 2.0 * PI * periods;
        FieldSpec::new(
            [0.0, t],
            vec![Primitive::Sinusoid {
                target: Target::E1,
                amplitude,
                angular_frequency: 1.0,
                phase: 0.0,
                window: None,
            }],
        )
        .unwrap()
    }

    #[test]
    fn free_evolution_keeps_level() {
        let (p, s) = natural();
        let spec = FieldSpec::zero([0.0, 5.0]).unwrap();
        let st = integrate_tdse(&spec, &p, &s, &TdseSettings::new(16, 0.05), 4).unwrap();
        let probs = st.probabilities();
        assert_eq!(probs[4], 1.0);
        assert!(probs.iter().enumerate().all(|(m, &q)| m == 4 || q == 0.0));
    }

    #[test]
    fn resonant_vacuum_is_poisson() {
        let (p, s) = natural();
        let spec = cosine_field(0.2, 3.0);
        // closed form: u = -(c E0 / 4B) T, x = |u|² k²
        let u = -(0.2 / 4.0) * 6.0 * PI;
        let x = u * u * s.k * s.k;
        let st = integrate_tdse(&spec, &p, &s, &TdseSettings::new(48, 0.005), 0).unwrap();
        let mut poisson = (-x).exp();
        for (m, q) in st.probabilities().iter().enumerate() {
            if m > 0 {
                poisson *= x / m as f64;
            }
            assert!((q - poisson).abs() < 1e-7, "m={m}: {q} vs {poisson}");
        }
    }

    #[test]
    fn coarse_step_rejected() {
        let (p, s) = natural();
        let spec = cosine_field(0.2, 1.0);
        let err = integrate_tdse(&spec, &p, &s, &TdseSettings::new(32, 0.5), 0).unwrap_err();
        assert!(matches!(err, Error::StepSize(_)));
    }

    #[test]
    fn small_dimension_rejected() {
        let (p, s) = natural();
        let spec = cosine_field(0.5, 4.0);
        let err = integrate_tdse(&spec, &p, &s, &TdseSettings::new(8, 0.01), 2).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)), "{err}");
    }

    #[test]
    fn energy_offset_is_a_global_phase() {
        let (p, s) = natural();
        let spec = cosine_field(0.15, 2.0);
        let base = integrate_tdse(&spec, &p, &s, &TdseSettings::new(40, 0.005), 3).unwrap();
        let shifted = TdseSettings {
            energy_offset: 2.5,
            ..TdseSettings::new(40, 0.005)
        };
        let moved = integrate_tdse(&spec, &p, &s, &shifted, 3).unwrap();
        for (a, b) in base.probabilities().iter().zip(moved.probabilities()) {
            assert!((a - b).abs() < 1e-9);
        }
        // the states differ by one common phase
        let overlap: Complex64 = base
            .amplitudes
            .iter()
            .zip(&moved.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-8, "{overlap}");
        assert!(
            (overlap - Complex64::from_polar(1.0, -2.5 * base.time)).norm() < 1e-6,
            "{overlap}"
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        let (p, s) = natural();
        let spec = FieldSpec::new(
            [0.0, 8.0],
            vec![Primitive::GaussianPulse {
                target: Target::E2,
                amplitude: 0.4,
                center: 4.0,
                width: 1.2,
                carrier_angular_frequency: 0.8,
                carrier_phase: 0.0,
            }],
        )
        .unwrap();
        let run = |h: f64| {
            integrate_tdse(&spec, &p, &s, &TdseSettings::new(40, h), 2)
                .unwrap()
                .amplitudes
        };
        let reference = run(0.0025);
        let err = |h: f64| {
            run(h)
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.02) / err(0.01);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn suggested_step_handles_strong_noise() {
        let (p, s) = natural();
        let noise = |target, seed| Primitive::WhiteNoise {
            target,
            amplitude: 2.0,
            sample_step: 0.5,
            seed,
            window: None,
        };
        let spec = FieldSpec::new(
            [0.0, 20.0],
            vec![noise(Target::E1, 42), noise(Target::E2, 43)],
        )
        .unwrap();
        let dim = 112;
        let h = suggest_step(&spec, &p, &s, dim);
        assert!(h <= 0.5 / STEPS_PER_PERIOD);
        // the period rule alone is too coarse for this coupling
        let coarse = integrate_tdse(&spec, &p, &s, &TdseSettings::new(dim, 0.005), 10);
        assert!(matches!(coarse, Err(Error::StepSize(_))));
        let report = compare_with_analytic(&spec, &p, &s, &TdseSettings::new(dim, h), 10).unwrap();
        assert!(report.max_abs_prob_error < 1e-6, "{report:?}");
    }

    #[test]
    fn suggested_step_zero_field_uses_period() {
        let (p, s) = natural();
        let spec = FieldSpec::zero([0.0, 1.0]).unwrap();
        assert_eq!(
            suggest_step(&spec, &p, &s, 64),
            2.0 * PI / SUGGESTED_STEPS_PER_PERIOD
        );
    }

    #[test]
    fn jumps_far_from_origin_are_sampled_from_the_inside() {
        let (p, s) = natural();
        let noise = Primitive::WhiteNoise {
            target: Target::E1,
            amplitude: 1.0,
            sample_step: 0.5,
            seed: 5,
            window: None,
        };
        let spec = FieldSpec::new([200.0, 202.0], vec![noise]).unwrap();
        let a = integrate_tdse(&spec, &p, &s, &TdseSettings::new(48, 1e-3), 1).unwrap();
        let b = integrate_tdse(&spec, &p, &s, &TdseSettings::new(48, 5e-4), 1).unwrap();
        let diff = a
            .amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }
}
