//! Declarative finite-duration electric fields `E(t) = (E1(t), E2(t))`.
//!
//! A [`FieldSpec`] is a window plus a list of primitives, each adding into
//! `E1`, `E2`, or (for sampled tables) both. Outside the window the field is
//! exactly zero. Discontinuous primitives report their jump times through
//! [`FieldSpec::breakpoints`] so integrators can split panels there.
//!
//! # White noise
//!
//! The `white_noise` primitive is piecewise constant on cells of width
//! `sample_step` starting at its sub-window start. Cell `j` holds
//! `amplitude * (2 r_j - 1)` with `r_j = (z_j >> 11) * 2^-53` and `z_j` the
//! `j`-th SplitMix64 output for the seed:
//!
//! ```text
//! s_j = seed + (j + 1) * 0x9E3779B97F4A7C15        (mod 2^64)
//! z   = (s_j ^ (s_j >> 30)) * 0xBF58476D1CE4E5B9
//! z   = (z   ^ (z   >> 27)) * 0x94D049BB133111EB
//! z_j =  z   ^ (z   >> 31)
//! ```
//!
//! Each cell is addressable on its own, so evaluation order never changes
//! the sample path.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field component a primitive drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[serde(alias = "E1")]
    E1,
    #[serde(alias = "E2")]
    E2,
}

/// One `(t, E1, E2)` row of a measured field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
}

/// A tabulated field with linear interpolation between rows and zero outside
/// the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    rows: Vec<SampleRow>,
}

impl SampledField {
    pub fn new(rows: Vec<SampleRow>) -> Result<Self> {
        validate_rows(&rows)?;
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SampleRow] {
        &self.rows
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        interpolate(&self.rows, t)
    }
}

fn validate_rows(rows: &[SampleRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Validation("sampled field has no rows".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        if !(r.t.is_finite() && r.e1.is_finite() && r.e2.is_finite()) {
            return Err(Error::Validation(format!("sample row {i} is not finite")));
        }
    }
    if let Some(i) = rows.windows(2).position(|w| w[1].t <= w[0].t) {
        return Err(Error::Validation(format!(
            "sample times not strictly increasing at row {} (t = {} after {})",
            i + 1,
            rows[i + 1].t,
            rows[i].t
        )));
    }
    Ok(())
}

fn interpolate(rows: &[SampleRow], t: f64) -> (f64, f64) {
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return (0.0, 0.0),
    };
    if t < first.t || t > last.t {
        return (0.0, 0.0);
    }
    if rows.len() == 1 {
        return (first.e1, first.e2);
    }
    // first index with row.t > t
    let hi = rows
        .partition_point(|r| r.t <= t)
        .min(rows.len() - 1)
        .max(1);
    let (a, b) = (&rows[hi - 1], &rows[hi]);
    let w = (t - a.t) / (b.t - a.t);
    (a.e1 + w * (b.e1 - a.e1), a.e2 + w * (b.e2 - a.e2))
}

/// Reads a `t,E1,E2` CSV table.
pub fn load_sampled_field(path: &Path) -> Result<SampledField> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names != ["t", "E1", "E2"] {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("expected header `t,E1,E2`, found `{}`", names.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("column {} is not a number: `{raw}`", i + 1),
            })
        };
        if record.len() != 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("expected 3 columns, found {}", record.len()),
            });
        }
        rows.push(SampleRow {
            t: parse(0)?,
            e1: parse(1)?,
            e2: parse(2)?,
        });
    }
    SampledField::new(rows)
}

/// A primitive signal. Optional `window`s restrict a primitive to a
/// sub-interval of the field window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    Constant {
        target: Target,
        amplitude: f64,
    },
    /// `amplitude * cos(angular_frequency * t + phase)`.
    Sinusoid {
        target: Target,
        amplitude: f64,
        angular_frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
    },
    /// `amplitude * exp(-(t - center)² / (2 width²)) * cos(carrier (t - center) + carrier_phase)`.
    GaussianPulse {
        target: Target,
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default)]
        carrier_angular_frequency: f64,
        #[serde(default)]
        carrier_phase: f64,
    },
    SquarePulse {
        target: Target,
        amplitude: f64,
        window: [f64; 2],
    },
    WhiteNoise {
        target: Target,
        amplitude: f64,
        sample_step: f64,
        seed: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
    },
    /// Tabulated `(t, E1, E2)` rows, given inline or by a CSV `file` that
    /// [`FieldSpec::resolve_files`] loads.
    Sampled {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        rows: Vec<SampleRow>,
    },
}

fn splitmix64(seed: u64, index: u64) -> u64 {
    let s = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut z = (s ^ (s >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform value in `[-1, 1)` for noise cell `index`.
pub fn noise_unit(seed: u64, index: u64) -> f64 {
    let r = (splitmix64(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    2.0 * r - 1.0
}

fn inside(window: Option<[f64; 2]>, t: f64) -> bool {
    window.is_none_or(|[a, b]| a <= t && t <= b)
}

impl Primitive {
    /// Contribution at `t`, ignoring the field window.
    fn eval(&self, t: f64, field_window: [f64; 2]) -> (f64, f64) {
        let on = |target: Target, v: f64| match target {
            Target::E1 => (v, 0.0),
            Target::E2 => (0.0, v),
        };
        match self {
            Primitive::Constant { target, amplitude } => on(*target, *amplitude),
            Primitive::Sinusoid {
                target,
                amplitude,
                angular_frequency,
                phase,
                window,
            } => {
                if !inside(*window, t) {
                    return (0.0, 0.0);
                }
                on(*target, amplitude * (angular_frequency * t + phase).cos())
            }
            Primitive::GaussianPulse {
                target,
                amplitude,
                center,
                width,
                carrier_angular_frequency,
                carrier_phase,
            } => {
                let d = t - center;
                let envelope = (-0.5 * (d / width) * (d / width)).exp();
                on(
                    *target,
                    amplitude * envelope * (carrier_angular_frequency * d + carrier_phase).cos(),
                )
            }
            Primitive::SquarePulse {
                target,
                amplitude,
                window,
            } => {
                if inside(Some(*window), t) {
                    on(*target, *amplitude)
                } else {
                    (0.0, 0.0)
                }
            }
            Primitive::WhiteNoise {
                target,
                amplitude,
                sample_step,
                seed,
                window,
            } => {
                let [a, b] = window.unwrap_or(field_window);
                if t < a || t > b {
                    return (0.0, 0.0);
                }
                let cell = ((t - a) / sample_step).floor().max(0.0) as u64;
                on(*target, amplitude * noise_unit(*seed, cell))
            }
            Primitive::Sampled { rows, .. } => interpolate(rows, t),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Field(format!("{name} must be finite")))
            }
        };
        let sub_window = |w: Option<[f64; 2]>| match w {
            Some([a, b]) if !(a.is_finite() && b.is_finite() && a < b) => Err(Error::Field(
                format!("sub-window [{a}, {b}] must be finite with start < end"),
            )),
            _ => Ok(()),
        };
        match self {
            Primitive::Constant { amplitude, .. } => finite("amplitude", *amplitude),
            Primitive::Sinusoid {
                amplitude,
                angular_frequency,
                phase,
                window,
                ..
            } => {
                finite("amplitude", *amplitude)?;
                finite("angular_frequency", *angular_frequency)?;
                finite("phase", *phase)?;
                sub_window(*window)
            }
            Primitive::GaussianPulse {
                amplitude,
                center,
                width,
                carrier_angular_frequency,
                carrier_phase,
                ..
            } => {
                finite("amplitude", *amplitude)?;
                finite("center", *center)?;
                finite("carrier_angular_frequency", *carrier_angular_frequency)?;
                finite("carrier_phase", *carrier_phase)?;
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::Field("gaussian width must be positive".into()));
                }
                Ok(())
            }
            Primitive::SquarePulse {
                amplitude, window, ..
            } => {
                finite("amplitude", *amplitude)?;
                sub_window(Some(*window))
            }
            Primitive::WhiteNoise {
                amplitude,
                sample_step,
                window,
                ..
            } => {
                finite("amplitude", *amplitude)?;
                if !(sample_step.is_finite() && *sample_step > 0.0) {
                    return Err(Error::Field("noise sample_step must be positive".into()));
                }
                sub_window(*window)
            }
            Primitive::Sampled { file, rows } => {
                if rows.is_empty() {
                    return Err(match file {
                        Some(f) => Error::Field(format!(
                            "sampled table {} has not been loaded",
                            f.display()
                        )),
                        None => Error::Validation("sampled field has no rows".into()),
                    });
                }
                validate_rows(rows)
            }
        }
    }

    /// Times where this primitive jumps or changes definition.
    fn breakpoints(&self, field_window: [f64; 2], out: &mut Vec<f64>) {
        match self {
            Primitive::Sinusoid {
                window: Some([a, b]),
                ..
            }
            | Primitive::SquarePulse { window: [a, b], .. } => out.extend([*a, *b]),
            Primitive::WhiteNoise {
                sample_step,
                window,
                ..
            } => {
                let [a, b] = window.unwrap_or(field_window);
                let lo = a.max(field_window[0]);
                let hi = b.min(field_window[1]);
                if lo >= hi {
                    return;
                }
                let first = ((lo - a) / sample_step).ceil() as u64;
                let last = ((hi - a) / sample_step).floor() as u64;
                out.extend([a, b]);
                out.extend((first..=last).map(|j| a + j as f64 * sample_step));
            }
            Primitive::Sampled { rows, .. } => out.extend(rows.iter().map(|r| r.t)),
            _ => {}
        }
    }

    /// Shortest time over which this primitive varies smoothly, if any.
    /// Piecewise-constant primitives have none: their jumps are breakpoints.
    fn timescale(&self) -> Option<f64> {
        match self {
            Primitive::Sinusoid {
                angular_frequency, ..
            } if *angular_frequency != 0.0 => Some(2.0 * PI / angular_frequency.abs()),
            Primitive::GaussianPulse {
                width,
                carrier_angular_frequency,
                ..
            } => {
                let carrier = if *carrier_angular_frequency != 0.0 {
                    2.0 * PI / carrier_angular_frequency.abs()
                } else {
                    f64::INFINITY
                };
                Some(width.min(carrier))
            }
            _ => None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Primitive::Sampled { .. })
    }

    /// Upper bound on `|E|` contributed by this primitive.
    fn magnitude_bound(&self) -> f64 {
        match self {
            Primitive::Constant { amplitude, .. }
            | Primitive::Sinusoid { amplitude, .. }
            | Primitive::GaussianPulse { amplitude, .. }
            | Primitive::SquarePulse { amplitude, .. }
            | Primitive::WhiteNoise { amplitude, .. } => amplitude.abs(),
            Primitive::Sampled { rows, .. } => {
                rows.iter().map(|r| r.e1.hypot(r.e2)).fold(0.0, f64::max)
            }
        }
    }

    fn seed_mut(&mut self) -> Option<&mut u64> {
        match self {
            Primitive::WhiteNoise { seed, .. } => Some(seed),
            _ => None,
        }
    }
}

/// A finite-duration planar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `[t_start, t_end]`; the field is zero outside.
    pub window: [f64; 2],
    #[serde(default)]
    pub components: Vec<Primitive>,
}

impl FieldSpec {
    pub fn new(window: [f64; 2], components: Vec<Primitive>) -> Result<Self> {
        let spec = Self { window, components };
        spec.validate()?;
        Ok(spec)
    }

    /// The zero field on `window`.
    pub fn zero(window: [f64; 2]) -> Result<Self> {
        Self::new(window, Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Field(format!(
                "window [{a}, {b}] must be finite with start < end"
            )));
        }
        self.components.iter().try_for_each(Primitive::validate)
    }

    pub fn start(&self) -> f64 {
        self.window[0]
    }

    pub fn end(&self) -> f64 {
        self.window[1]
    }

    pub fn contains(&self, t: f64) -> bool {
        self.window[0] <= t && t <= self.window[1]
    }

    /// `(E1(t), E2(t))`; exactly `(0, 0)` outside the window.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if !self.contains(t) {
            return (0.0, 0.0);
        }
        self.components.iter().fold((0.0, 0.0), |(e1, e2), p| {
            let (d1, d2) = p.eval(t, self.window);
            (e1 + d1, e2 + d2)
        })
    }

    /// `E(t) = E1(t) + i E2(t)`.
    pub fn complex(&self, t: f64) -> Complex64 {
        let (e1, e2) = self.eval(t);
        Complex64::new(e1, e2)
    }

    /// Sorted, deduplicated jump times inside the window, window ends included.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![self.window[0], self.window[1]];
        for p in &self.components {
            p.breakpoints(self.window, &mut pts);
        }
        pts.retain(|t| self.contains(*t));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Upper bound on `|E(t)|` over all `t`.
    pub fn magnitude_bound(&self) -> f64 {
        self.components.iter().map(Primitive::magnitude_bound).sum()
    }

    /// Shortest smooth-variation timescale across primitives.
    pub fn shortest_timescale(&self) -> Option<f64> {
        self.components
            .iter()
            .filter_map(Primitive::timescale)
            .reduce(f64::min)
    }

    /// Loads every `sampled` primitive that names a `file`, resolving
    /// relative paths against `base`.
    pub fn resolve_files(&mut self, base: &Path) -> Result<()> {
        for p in &mut self.components {
            if let Primitive::Sampled {
                file: Some(file),
                rows,
            } = p
            {
                if rows.is_empty() {
                    let path = if file.is_absolute() {
                        file.clone()
                    } else {
                        base.join(&*file)
                    };
                    *rows = load_sampled_field(&path)?.rows;
                }
            }
        }
        Ok(())
    }

    /// Replaces the white-noise seeds with `seed`, `seed + 1`, ... in
    /// component order, so two noise components stay independent.
    pub fn reseed(&mut self, seed: u64) {
        let mut next = seed;
        for p in &mut self.components {
            if let Some(s) = p.seed_mut() {
                *s = next;
                next = next.wrapping_add(1);
            }
        }
    }

    /// Splits into the sampled primitives and everything else.
    pub fn split_sampled(&self) -> (FieldSpec, FieldSpec) {
        let (sampled, smooth): (Vec<_>, Vec<_>) = self
            .components
            .iter()
            .cloned()
            .partition(Primitive::is_sampled);
        (
            FieldSpec {
                window: self.window,
                components: sampled,
            },
            FieldSpec {
                window: self.window,
                components: smooth,
            },
        )
    }

    /// Rows of every sampled primitive, for integrators that use the table grid.
    pub fn sampled_tables(&self) -> impl Iterator<Item = &[SampleRow]> {
        self.components.iter().filter_map(|p| match p {
            Primitive::Sampled { rows, .. } => Some(rows.as_slice()),
            _ => None,
        })
    }

    /// Stable hex digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("field spec serializes");
        let hash = Sha256::digest(&json);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
