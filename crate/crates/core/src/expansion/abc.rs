//! Boundary conditions on `∂O` that replace the layer at low order.

use crate::error::{Error, Result};
use crate::inner::{check_contrast, HarmonicField, InnerSolver};
use crate::torus::{ProductPolicy, TorusFunction};
use num_complex::Complex64;

fn check_width(solver: &InnerSolver, h: f64) -> Result<()> {
    let h0 = solver.curve().h0();
    if !(h >= 0.0 && h < h0) {
        return Err(Error::Parameter(format!("layer width h = {h} must lie in [0, {h0})")));
    }
    Ok(())
}

/// `∂_n V = α f`.
pub fn abc_order0(solver: &InnerSolver, f: &TorusFunction, alpha: Complex64) -> Result<HarmonicField> {
    check_contrast("α", alpha)?;
    solver.solve_neumann_gauged(&f.scale(alpha))
}

/// `∂_n V - αh ∂²_t V = α(1 + hκ) f`.
pub fn abc_order1(solver: &InnerSolver, f: &TorusFunction, alpha: Complex64, h: f64) -> Result<HarmonicField> {
    check_contrast("α", alpha)?;
    check_width(solver, h)?;
    if h == 0.0 {
        return abc_order0(solver, f, alpha);
    }
    let curve = solver.curve();
    let m = curve.modes();
    let g = (f + &f
        .multiply(curve.kappa(), ProductPolicy::TruncateTo(m))
        .scale(Complex64::new(h, 0.0)))
        .scale(alpha);
    let a = TorusFunction::constant(curve.period(), 0, alpha * h);
    solver.solve_tangential_robin(&a, Complex64::new(1.0, 0.0), &g)
}

/// `-(1 - hκ/2) ∂²_t u + (h κ'/2) ∂_t u + β ∂_n u = (1 + hκ) f / h`, which is the tangential
/// Robin problem with `a = 1 - hκ/2`.
pub fn abc_q1_order0(solver: &InnerSolver, f: &TorusFunction, beta: Complex64, h: f64) -> Result<HarmonicField> {
    check_contrast("β", beta)?;
    check_width(solver, h)?;
    if h == 0.0 {
        return Err(Error::Parameter("the order-0 Ventcel condition needs h > 0".into()));
    }
    let curve = solver.curve();
    let m = curve.modes();
    let kappa = curve.kappa();
    let a = &TorusFunction::constant(kappa.period(), kappa.modes(), Complex64::new(1.0, 0.0)) - &(kappa * (0.5 * h));
    let g = &(f + &f
        .multiply(kappa, ProductPolicy::TruncateTo(m))
        .scale(Complex64::new(h, 0.0)))
        * (1.0 / h);
    solver.solve_tangential_robin(&a, beta, &g)
}
