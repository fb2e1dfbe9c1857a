//! Level-mixing probabilities of the displacement operator `D(α)`.
//!
//! `<m| D(α) |n>` for `m >= n` is
//! `sqrt(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)`, and the `m < n` branch
//! swaps the roles with `-α*`. The diagonal reduces to `e^{-x/2} L_n(x)` with
//! `x = |α|²`. Probabilities depend on `α` only through `|α|`, and every
//! probability here is computed from a real modulus so phases never touch
//! its bits.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::laguerre::{fejer_scaled, laguerre_scaled, normalized_value};

/// Probability of staying in level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalResult {
    pub n: usize,
    pub x: f64,
    /// `e^{-x/2} L_n(x)`, signed.
    pub amplitude: f64,
    /// `e^{-x} L_n(x)²`.
    pub survival_probability: f64,
    /// `1 - survival_probability`.
    pub transition_probability: f64,
    /// Carried along; it only multiplies the amplitude by `e^{iγ}`.
    pub gamma: f64,
}

impl SurvivalResult {
    /// Diagonal element `<n| J |n> = e^{iγ} e^{-x/2} L_n(x)`.
    pub fn complex_amplitude(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.gamma) * self.amplitude
    }
}

pub fn survival(n: usize, x: f64, gamma: f64) -> Result<SurvivalResult> {
    let amplitude = laguerre_scaled(n, x)?;
    let survival_probability = amplitude * amplitude;
    Ok(SurvivalResult {
        n,
        x,
        amplitude,
        survival_probability,
        transition_probability: 1.0 - survival_probability,
        gamma,
    })
}

/// Leading-order survival `cos²(2 sqrt((n+1)x) - π/4) / (π sqrt(x) sqrt(n+1))`.
pub fn survival_fejer(n: usize, x: f64) -> Result<f64> {
    let a = fejer_scaled(n, x)?;
    Ok(a * a)
}

/// Upper envelope `1 / (π sqrt(x (n+1)))` of [`survival_fejer`].
pub fn fejer_survival_envelope(n: usize, x: f64) -> f64 {
    1.0 / (PI * (x * (n as f64 + 1.0)).sqrt())
}

/// `|α|²`, rejecting amplitudes whose square overflows.
fn check_alpha(alpha: Complex64) -> Result<f64> {
    let x = alpha.norm_sqr();
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "displacement amplitude {alpha} is not finite"
        )));
    }
    Ok(x)
}

/// Real modulus-with-sign of `<m|D(α)|n>` after stripping the phase of `α`.
fn real_element(m: usize, n: usize, x: f64) -> f64 {
    let (low, d) = if m >= n { (n, m - n) } else { (m, n - m) };
    normalized_value(low, d, x)
}

/// Unit phase carried by `<m|D(α)|n>`: `e^{i d θ}` above the diagonal and
/// `(-1)^d e^{-i d θ}` below, with `d = |m - n|` and `θ = arg α`.
fn element_phase(m: usize, n: usize, alpha: Complex64) -> Complex64 {
    if m == n || alpha == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let theta = alpha.arg();
    if m > n {
        Complex64::from_polar(1.0, (m - n) as f64 * theta)
    } else {
        let d = n - m;
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        Complex64::from_polar(sign, -(d as f64) * theta)
    }
}

/// `<m| exp(α a† - α* a) |n>`.
pub fn displacement_element(m: usize, n: usize, alpha: Complex64) -> Result<Complex64> {
    let x = check_alpha(alpha)?;
    Ok(element_phase(m, n, alpha) * real_element(m, n, x))
}

/// `|<m|D(α)|n>|²`.
pub fn transition_probability(m: usize, n: usize, alpha: Complex64) -> Result<f64> {
    let v = real_element(m, n, check_alpha(alpha)?);
    Ok(v * v)
}

/// Row `n` of `|<m|D(α)|n>|²` over `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub n_source: usize,
    pub alpha: Complex64,
    pub m_max: usize,
    /// Indexed by target level `m`.
    pub probabilities: Vec<f64>,
    /// `1 - Σ probabilities`, clamped at zero.
    pub tail_mass: f64,
    pub up_mass: f64,
    pub down_mass: f64,
}

impl TransitionTable {
    pub fn stay(&self) -> f64 {
        self.probabilities[self.n_source]
    }

    pub fn row_sum(&self) -> f64 {
        neumaier_sum(self.probabilities.iter().copied())
    }
}

/// Support heuristic `n + |α|² + 10 sqrt(|α|² + n + 1) + 20`.
pub fn support_heuristic(n: usize, x: f64) -> usize {
    let nf = n as f64;
    (nf + x + 10.0 * (x + nf + 1.0).sqrt() + 20.0).ceil() as usize
}

/// Largest row length `transition_matrix` will grow to.
pub const MAX_LEVEL: usize = 200_000;

fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Builds row `n_source`. Starts from `m_max` (or the support heuristic) and
/// grows the row until the tail is below `tail_tolerance`, up to four times
/// the heuristic or [`MAX_LEVEL`].
pub fn transition_matrix(
    n_source: usize,
    alpha: Complex64,
    m_max: Option<usize>,
    tail_tolerance: f64,
    exec: Execution,
) -> Result<TransitionTable> {
    let x = check_alpha(alpha)?;
    if !(tail_tolerance.is_finite() && tail_tolerance > 0.0) {
        return Err(Error::Validation(format!(
            "tail tolerance must be positive, got {tail_tolerance}"
        )));
    }
    let heuristic = support_heuristic(n_source, x);
    let cap = heuristic.saturating_mul(4).min(MAX_LEVEL).max(n_source + 1);
    let mut m_max = m_max.unwrap_or(heuristic).max(n_source).min(cap);
    loop {
        let probabilities: Vec<f64> = exec.map_range(0..m_max + 1, |m| {
            let v = real_element(m, n_source, x);
            v * v
        });
        let total = neumaier_sum(probabilities.iter().copied());
        let tail = 1.0 - total;
        if tail <= tail_tolerance {
            let up_mass = neumaier_sum(probabilities[n_source + 1..].iter().copied());
            let down_mass = neumaier_sum(probabilities[..n_source].iter().copied());
            return Ok(TransitionTable {
                n_source,
                alpha,
                m_max,
                probabilities,
                tail_mass: tail.max(0.0),
                up_mass,
                down_mass,
            });
        }
        if m_max >= cap {
            return Err(Error::Truncation {
                m_max,
                tail,
                tolerance: tail_tolerance,
            });
        }
        m_max = (m_max + (m_max / 2).max(20)).min(cap);
    }
}

/// One row of a level or intensity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub x: f64,
    pub survival: f64,
    pub transition: f64,
    /// `1 - survival_fejer`; `None` at `x = 0`.
    pub fejer_transition: Option<f64>,
}

fn sweep_row(n: usize, x: f64) -> Result<SweepRow> {
    let s = survival(n, x, 0.0)?;
    let fejer_transition = if x > 0.0 {
        Some(1.0 - survival_fejer(n, x)?)
    } else {
        None
    };
    Ok(SweepRow {
        n,
        x,
        survival: s.survival_probability,
        transition: s.transition_probability,
        fejer_transition,
    })
}

/// Transition probability for each level at fixed intensity.
pub fn sweep_over_levels(
    x: f64,
    levels: RangeInclusive<usize>,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if levels.is_empty() {
        return Err(Error::Validation("level range is empty".into()));
    }
    let ns: Vec<usize> = levels.collect();
    exec.try_map(&ns, |&n| sweep_row(n, x))
}

/// Transition probability for each intensity at a fixed level.
pub fn sweep_over_intensity(n: usize, xs: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    if xs.is_empty() {
        return Err(Error::Validation("intensity list is empty".into()));
    }
    exec.try_map(xs, |&x| sweep_row(n, x))
}

/// `points` values evenly spaced on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
