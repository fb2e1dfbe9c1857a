//! Physical parameters (Gaussian units) and the derived scales that turn a
//! field-level drive parameter into the dimensionless intensity `x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Charge, mass, field strength and constants, in Gaussian units.
///
/// Defaults are natural units: every field is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalParams {
    pub q: f64,
    pub m: f64,
    /// z-component of the magnetic field.
    pub b: f64,
    pub c: f64,
    pub hbar: f64,
    /// Pins the ladder coupling `k` instead of deriving it from `m ω / ħ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            q: 1.0,
            m: 1.0,
            b: 1.0,
            c: 1.0,
            hbar: 1.0,
            k: None,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("q", self.q),
            ("m", self.m),
            ("B", self.b),
            ("c", self.c),
            ("hbar", self.hbar),
        ];
        if let Some((name, _)) = named.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parameter(format!("{name} is not finite")));
        }
        if self.m <= 0.0 {
            return Err(Error::Parameter("mass must be positive".into()));
        }
        if self.b == 0.0 {
            return Err(Error::Parameter("magnetic field B must be non-zero".into()));
        }
        if self.c <= 0.0 {
            return Err(Error::Parameter("c must be positive".into()));
        }
        if self.hbar <= 0.0 {
            return Err(Error::Parameter("hbar must be positive".into()));
        }
        if self.q == 0.0 {
            return Err(Error::Parameter(
                "charge q must be non-zero (cyclotron frequency vanishes)".into(),
            ));
        }
        if let Some(k) = self.k {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::Parameter(format!(
                    "k override must be finite and positive, got {k}"
                )));
            }
        }
        Ok(())
    }

    /// `qB / (ħc)`, the prefactor turning signed areas into phases.
    pub fn area_phase_factor(&self) -> f64 {
        self.q * self.b / (self.hbar * self.c)
    }

    /// `c / B`, the drift-velocity scale.
    pub fn drift_factor(&self) -> f64 {
        self.c / self.b
    }
}

/// Scales derived from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// Cyclotron angular frequency `qB/(mc)`. Signed: negative when `qB < 0`.
    pub omega: f64,
    /// Ladder coupling: the kinetic momentum satisfies `π/ħ = k a`.
    pub k: f64,
    pub magnetic_length: f64,
}

/// Cyclotron frequency, ladder coupling and magnetic length.
///
/// `k = sqrt(2 m |ω| / ħ)` unless the parameters pin it explicitly.
pub fn derive_scales(params: &PhysicalParams) -> Result<DerivedScales> {
    params.validate()?;
    let omega = params.q * params.b / (params.m * params.c);
    let k = match params.k {
        Some(k) => k,
        None => (2.0 * params.m * omega.abs() / params.hbar).sqrt(),
    };
    let magnetic_length = (params.hbar * params.c / (params.q * params.b).abs()).sqrt();
    if !(omega.is_finite() && k.is_finite() && k > 0.0 && magnetic_length.is_finite()) {
        return Err(Error::Parameter(format!(
            "derived scales not representable (omega = {omega}, k = {k})"
        )));
    }
    Ok(DerivedScales {
        omega,
        k,
        magnetic_length,
    })
}

impl DerivedScales {
    /// Dimensionless intensity `x = |u|² k²`.
    pub fn intensity(&self, u: Complex64) -> Result<f64> {
        intensity_from_u(u, self)
    }

    /// Displacement amplitude `α = -u* k` of the level-mixing operator.
    pub fn displacement_amplitude(&self, u: Complex64) -> Complex64 {
        -u.conj() * self.k
    }
}

pub fn intensity_from_u(u: Complex64, scales: &DerivedScales) -> Result<f64> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::Domain(format!(
            "drive parameter u = {u} is not finite"
        )));
    }
    Ok(u.norm_sqr() * scales.k * scales.k)
}
