pub mod error;
pub mod expansion;
mod fft;
pub mod forms2d;
pub mod geometry;
pub mod inner;
pub mod membrane;
pub mod oracle;
pub mod torus;

pub use error::{Error, Result};
pub use expansion::{ExpansionOptions, ExpansionSeries, Regime, WeightVariant};
pub use geometry::{BoundaryCurve, LayerGeometry};
pub use inner::{Backend, HarmonicField, InnerSolver};
pub use membrane::MembraneField;
pub use num_complex::Complex64;
pub use oracle::{DiskTransmissionSolution, OracleProblem};
pub use torus::{ProductPolicy, TorusFunction};
