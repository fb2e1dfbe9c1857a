//! Inter-Landau-level transition probabilities for a charged particle in a
//! uniform magnetic field driven by a finite-duration planar electric field.
//!
//! The pipeline runs field → drive parameter `u` (a windowed Fourier
//! integral at the cyclotron frequency) → intensity `x = |u k|²` →
//! displacement-operator matrix elements, whose diagonal is
//! `e^{-x/2} L_n(x)`. The [`oracle`] module checks the whole chain against a
//! truncated Fock-space simulation of the driven oscillator.
//!
//! Only the cyclotron (level-index) sector is modelled. The guiding-center
//! motion commutes with the level index, so the drift path and its phase are
//! carried as classical data and never act on a state.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod field;
pub mod fourier;
pub mod laguerre;
pub mod oracle;
pub mod path;
pub mod physics;
pub mod quadrature;
pub mod transitions;

pub use analysis::{analyze_field, level_outcome, FieldAnalysis, LevelOutcome};
pub use error::{Error, Result};
pub use exec::Execution;
pub use field::{FieldSpec, Primitive, SampledField, Target};
pub use fourier::{compute_u, DriveParameter, ResolutionReport, StepControl};
pub use path::{GeometricPhases, PathPoint, PlanarPath};
pub use physics::{DerivedScales, PhysicalParams};
pub use transitions::{SurvivalResult, TransitionTable};

pub use num_complex::Complex64;
