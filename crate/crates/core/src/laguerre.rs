//! Laguerre and associated Laguerre polynomials by forward three-term
//! recurrence, with scaled variants that stay finite where `e^{x/2}`
//! overflows, and the Fejér large-degree asymptotic form.
//!
//! The recurrences carry a separate logarithmic scale so that neither tiny
//! seeds nor large intermediate values leave the f64 range.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rescale threshold for the running recurrence values.
const BIG: f64 = 1e150;
const LN_BIG: f64 = 345.387_763_949_107; // ln(1e150)

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "Laguerre argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(())
}

/// `ln(n!)`: the log of the exact product below 32, Stirling's series
/// above. Both are within a few ulps, unlike a running sum of logs whose
/// error grows like `sqrt(n)` ulps.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        return (2..=n).map(|k| k as f64).product::<f64>().ln();
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_series(x)
}

/// `ln(n!) - [(n + 1/2) ln n - n + ln(2π)/2]` for `n >= 32`.
fn stirling_series(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

/// `ln(x^d e^{-x} / d!)`, the log of a Poisson weight. For large `d` the
/// Stirling form `d (ln(1+t) - t) - ln(2π d)/2 - series` with `t = (x-d)/d`
/// keeps the error proportional to `|x - d|` instead of `x ln x`.
pub fn ln_poisson_weight(d: usize, x: f64) -> f64 {
    if d == 0 {
        return -x;
    }
    let df = d as f64;
    if d < 32 {
        return df * x.ln() - x - ln_factorial(d);
    }
    let t = (x - df) / df;
    df * (t.ln_1p() - t) - 0.5 * (2.0 * PI * df).ln() - stirling_series(df)
}

/// `L_n^{(k)}(x) = mantissa * e^{log_scale}`.
fn assoc_recurrence(n: usize, k: usize, x: f64) -> (f64, f64) {
    let kf = k as f64;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut log_scale = 0.0;
    for m in 0..n {
        let mf = m as f64;
        let next = ((2.0 * mf + kf + 1.0 - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += LN_BIG;
        }
    }
    (cur, log_scale)
}

/// Runs the normalized recurrence for
/// `f_j = sqrt(j! / (j+d)!) x^{d/2} e^{-x/2} L_j^{(d)}(x)`, calling `visit(j, f_j)`
/// for `j = 0..=n`.
///
/// `f_j` is the modulus of the number-state overlap `<j+d| D(α) |j>` with
/// `|α|² = x`, so every value lies in `[-1, 1]`. With `d = 0` the update is
/// the plain Laguerre recurrence applied to `e^{-x/2} L_j(x)`.
fn normalized_recurrence<F: FnMut(usize, f64)>(n: usize, d: usize, x: f64, mut visit: F) {
    if x == 0.0 {
        for j in 0..=n {
            visit(j, if d == 0 { 1.0 } else { 0.0 });
        }
        return;
    }
    let df = d as f64;
    let mut log_scale = 0.5 * ln_poisson_weight(d, x);
    let mut prev = 0.0;
    let mut cur = 1.0;
    visit(0, cur * log_scale.exp());
    for j in 0..n {
        let jf = j as f64;
        let back = if d == 0 { jf } else { (jf * (jf + df)).sqrt() };
        let norm = if d == 0 {
            jf + 1.0
        } else {
            ((jf + 1.0) * (jf + df + 1.0)).sqrt()
        };
        let next = ((2.0 * jf + df + 1.0 - x) * cur - back * prev) / norm;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += LN_BIG;
        }
        visit(j + 1, cur * log_scale.exp());
    }
}

/// `sqrt(n!/(n+d)!) x^{d/2} e^{-x/2} L_n^{(d)}(x)`.
pub fn normalized_assoc(n: usize, d: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(normalized_value(n, d, x))
}

/// [`normalized_assoc`] for an `x` the caller has already checked.
pub(crate) fn normalized_value(n: usize, d: usize, x: f64) -> f64 {
    let mut out = 0.0;
    normalized_recurrence(n, d, x, |j, v| {
        if j == n {
            out = v;
        }
    });
    out
}

/// `L_n(x)`.
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    assoc_laguerre(n, 0, x)
}

/// `e^{-x/2} L_n(x)`; bounded by 1 in magnitude for `x >= 0`.
pub fn laguerre_scaled(n: usize, x: f64) -> Result<f64> {
    normalized_assoc(n, 0, x)
}

/// `e^{-x/2} L_j(x)` for every `j` in `0..=n_max`, from one recurrence pass.
/// Entry `j` is bit-identical to `laguerre_scaled(j, x)`.
pub fn laguerre_scaled_sequence(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_x(x)?;
    let mut out = Vec::with_capacity(n_max + 1);
    normalized_recurrence(n_max, 0, x, |_, v| out.push(v));
    Ok(out)
}

/// `L_n^{(k)}(x)`.
pub fn assoc_laguerre(n: usize, k: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    let (m, s) = assoc_recurrence(n, k, x);
    let v = m * s.exp();
    if !v.is_finite() {
        return Err(Error::Overflow { n, x });
    }
    Ok(v)
}

/// `e^{-x/2} L_n^{(k)}(x)`.
pub fn assoc_laguerre_scaled(n: usize, k: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    let (m, s) = assoc_recurrence(n, k, x);
    let v = m * (s - 0.5 * x).exp();
    if !v.is_finite() {
        return Err(Error::Overflow { n, x });
    }
    Ok(v)
}

/// One evaluation with both the plain and scaled values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreEval {
    pub n: usize,
    pub alpha_order: usize,
    pub x: f64,
    /// `None` when `L_n^{(k)}(x)` itself overflows.
    pub value: Option<f64>,
    pub scaled_value: f64,
}

pub fn evaluate(n: usize, alpha_order: usize, x: f64) -> Result<LaguerreEval> {
    let scaled_value = if alpha_order == 0 {
        laguerre_scaled(n, x)?
    } else {
        assoc_laguerre_scaled(n, alpha_order, x)?
    };
    let value = match assoc_laguerre(n, alpha_order, x) {
        Ok(v) => Some(v),
        Err(Error::Overflow { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(LaguerreEval {
        n,
        alpha_order,
        x,
        value,
        scaled_value,
    })
}

fn check_fejer(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("Fejér formula needs x > 0, got {x}")));
    }
    Ok(())
}

/// Phase `2 sqrt((n+1) x) - π/4` of the Fejér cosine.
pub fn fejer_phase(n: usize, x: f64) -> f64 {
    2.0 * ((n as f64 + 1.0) * x).sqrt() - PI / 4.0
}

/// Leading Fejér term
/// `e^{x/2} / (sqrt(π) x^{1/4} (n+1)^{1/4}) * cos(2 sqrt((n+1) x) - π/4)`.
pub fn fejer_asymptotic(n: usize, x: f64) -> Result<f64> {
    Ok((0.5 * x).exp() * fejer_scaled(n, x)?)
}

/// `e^{-x/2}` times [`fejer_asymptotic`], finite for every `x > 0`.
pub fn fejer_scaled(n: usize, x: f64) -> Result<f64> {
    check_fejer(x)?;
    let np1 = n as f64 + 1.0;
    Ok(fejer_phase(n, x).cos() / (PI.sqrt() * x.powf(0.25) * np1.powf(0.25)))
}
