//! Planar paths, their closed signed areas, the classical drift path `R(t)`,
//! and the geometric phases built from those areas.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::physics::PhysicalParams;
use crate::quadrature::{panel_edges, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Time-stamped samples of a path in a plane, piecewise linear between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    points: Vec<PathPoint>,
}

impl PlanarPath {
    pub fn new(points: Vec<PathPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("path needs at least one point".into()));
        }
        if points
            .iter()
            .any(|p| !(p.t.is_finite() && p.p1.is_finite() && p.p2.is_finite()))
        {
            return Err(Error::Validation("path contains non-finite samples".into()));
        }
        if points.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Validation(
                "path times must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Builds a path from coordinates with a synthetic time index `0, 1, 2, ...`.
    pub fn from_coords<I: IntoIterator<Item = (f64, f64)>>(coords: I) -> Result<Self> {
        let points = coords
            .into_iter()
            .enumerate()
            .map(|(i, (p1, p2))| PathPoint {
                t: i as f64,
                p1,
                p2,
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[PathPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> PathPoint {
        self.points[0]
    }

    pub fn last(&self) -> PathPoint {
        self.points[self.points.len() - 1]
    }

    /// Signed area of the polygon closed by the chord from the last sample
    /// back to the first. Counter-clockwise is positive.
    pub fn closed_area(&self) -> f64 {
        closed_area(self)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "p1", "p2"])?;
        for p in &self.points {
            w.write_record(&[fmt(p.t), fmt(p.p1), fmt(p.p2)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.15e}")
}

/// Shoelace sum over consecutive samples plus the closing chord.
pub fn closed_area(path: &PlanarPath) -> f64 {
    let pts = path.points();
    if pts.len() < 3 {
        return 0.0;
    }
    // Coordinates relative to the first point keep the cross products small.
    let (ox, oy) = (pts[0].p1, pts[0].p2);
    let mut twice = 0.0;
    for w in pts.windows(2) {
        let (x0, y0) = (w[0].p1 - ox, w[0].p2 - oy);
        let (x1, y1) = (w[1].p1 - ox, w[1].p2 - oy);
        twice += x0 * y1 - x1 * y0;
    }
    // The closing chord passes through the origin of the shifted frame.
    0.5 * twice
}

/// Drift path together with resolution diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftPath {
    pub path: PlanarPath,
    pub warnings: Vec<String>,
}

/// Minimum grid points per shortest field timescale before a warning.
pub const POINTS_PER_PERIOD: f64 = 20.0;

/// `R(t) = (c/B) ∫₀ᵗ (E2(s), -E1(s)) ds` on `grid`.
pub fn drift_path(spec: &FieldSpec, params: &PhysicalParams, grid: &[f64]) -> Result<DriftPath> {
    spec.validate()?;
    params.validate()?;
    if grid.is_empty() {
        return Err(Error::Validation("time grid is empty".into()));
    }
    let mut warnings = Vec::new();
    let timescale = spec.shortest_timescale();
    if let Some(ts) = timescale {
        let coarsest = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        if coarsest > ts / POINTS_PER_PERIOD * (1.0 + 1e-9) {
            warnings.push(format!(
                "grid step {coarsest:.3e} exceeds timescale/{POINTS_PER_PERIOD} = {:.3e}; R(t) samples may alias",
                ts / POINTS_PER_PERIOD
            ));
        }
    }
    let max_panel = timescale.map_or(f64::INFINITY, |ts| ts / POINTS_PER_PERIOD);
    let breaks = spec.breakpoints();
    let rule = GaussLegendre::new(8);
    let scale = params.drift_factor();

    let integrate = |a: f64, b: f64| -> (f64, f64) {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let edges = panel_edges(lo, hi, &breaks, max_panel);
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for w in edges.windows(2) {
            s1 += rule.integrate(w[0], w[1], |t| spec.eval(t).1);
            s2 += rule.integrate(w[0], w[1], |t| -spec.eval(t).0);
        }
        (sign * scale * s1, sign * scale * s2)
    };

    let mut points = Vec::with_capacity(grid.len());
    let (mut r1, mut r2) = integrate(0.0, grid[0]);
    points.push(PathPoint {
        t: grid[0],
        p1: r1,
        p2: r2,
    });
    for w in grid.windows(2) {
        let (d1, d2) = integrate(w[0], w[1]);
        r1 += d1;
        r2 += d2;
        points.push(PathPoint {
            t: w[1],
            p1: r1,
            p2: r2,
        });
    }
    Ok(DriftPath {
        path: PlanarPath::new(points)?,
        warnings,
    })
}

/// `β`, `γ` and the areas they come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricPhases {
    pub beta: f64,
    pub gamma: f64,
    pub area_r: f64,
    pub area_u: f64,
}

impl GeometricPhases {
    pub const ZERO: Self = Self {
        beta: 0.0,
        gamma: 0.0,
        area_r: 0.0,
        area_u: 0.0,
    };
}

/// `β = -(qB/ħc) S(C_R)` and `γ = -(qB/ħc) 4 S(C_u)`.
pub fn phases(
    path_r: &PlanarPath,
    path_u: &PlanarPath,
    params: &PhysicalParams,
) -> GeometricPhases {
    let factor = params.area_phase_factor();
    let area_r = closed_area(path_r);
    let area_u = closed_area(path_u);
    GeometricPhases {
        beta: -factor * area_r,
        gamma: -factor * 4.0 * area_u,
        area_r,
        area_u,
    }
}
