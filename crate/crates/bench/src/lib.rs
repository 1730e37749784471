//! Shared fixtures for the benchmarks.

use std::f64::consts::TAU;
use std::sync::Arc;
use thinlayer_core::{BoundaryCurve, Complex64, TorusFunction};

pub const MODES: usize = 64;

pub fn circle() -> Arc<BoundaryCurve> {
    Arc::new(BoundaryCurve::circle(1.0, MODES).expect("unit circle"))
}

pub fn ellipse() -> Arc<BoundaryCurve> {
    Arc::new(BoundaryCurve::ellipse(1.5, 1.0, MODES).expect("ellipse"))
}

/// `cos θ + 0.3 cos 3θ` on a curve of the given length.
pub fn smooth_data(period: f64) -> TorusFunction {
    let one = Complex64::new(1.0, 0.0);
    TorusFunction::real_from_modes(period, MODES, &[(1, one), (3, one * 0.3)])
}

pub fn unit_circle_data() -> TorusFunction {
    smooth_data(TAU)
}
