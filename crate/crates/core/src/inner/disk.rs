use super::InnerNorms;
use crate::error::{Error, Result};
use crate::geometry::CircleParams;
use crate::torus::TorusFunction;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub(super) fn neumann(c: &CircleParams, g: &TorusFunction) -> TorusFunction {
    let mut a = TorusFunction::zeros(g.period(), g.modes());
    for (k, v) in g.iter() {
        if k != 0 {
            a.set_coeff(k, v * c.radius / k.abs() as f64);
        }
    }
    a
}

pub(super) fn normal_trace(c: &CircleParams, a: &TorusFunction) -> TorusFunction {
    let mut out = TorusFunction::zeros(a.period(), a.modes());
    for (k, v) in a.iter() {
        out.set_coeff(k, v * (k.abs() as f64 / c.radius));
    }
    out
}

pub(super) fn evaluate(c: &CircleParams, a: &TorusFunction, p: [f64; 2]) -> Complex64 {
    let (dx, dy) = (p[0] - c.center[0], p[1] - c.center[1]);
    let r = dx.hypot(dy) / c.radius;
    let phi = dy.atan2(dx) - c.phase;
    a.iter()
        .map(|(k, v)| v * r.powi(k.abs() as i32) * Complex64::from_polar(1.0, k as f64 * phi))
        .sum()
}

/// Closed-form radial integrals of `r^{2|k|}`.
pub(super) fn norms(c: &CircleParams, a: &TorusFunction) -> InnerNorms {
    let r2 = c.radius * c.radius;
    let (mut l2, mut grad) = (0.0, 0.0);
    for (k, v) in a.iter() {
        let n = k.abs() as f64;
        l2 += 2.0 * PI * v.norm_sqr() * r2 / (2.0 * n + 2.0);
        grad += 2.0 * PI * n * v.norm_sqr();
    }
    InnerNorms {
        l2: l2.sqrt(),
        grad: grad.sqrt(),
    }
}

/// `-∂_t(a∂_t u) + b∂_n u = g` with a zero-mean trace. Constant `a` decouples the modes;
/// otherwise the Fourier–Galerkin system on `0 < |k| ≤ M` is solved densely.
pub(super) fn tangential_robin(
    c: &CircleParams,
    a: &TorusFunction,
    b: Complex64,
    g: &TorusFunction,
) -> Result<TorusFunction> {
    let m = g.modes() as i64;
    let w = |k: i64| k as f64 / c.radius;
    let constant = a.iter().all(|(k, v)| k == 0 || v == zero());
    let mut u = TorusFunction::zeros(g.period(), g.modes());
    if constant {
        let a0 = a.coeff(0);
        for (k, v) in g.iter() {
            if k == 0 {
                continue;
            }
            let d = a0 * w(k) * w(k) + b * w(k).abs();
            if d.norm() <= f64::EPSILON * (a0.norm() * w(k) * w(k) + b.norm() * w(k).abs()) {
                return Err(Error::Internal(format!("resonant mode {k} in tangential Robin solve")));
            }
            u.set_coeff(k, v / d);
        }
        return Ok(u);
    }
    let ks: Vec<i64> = (-m..=m).filter(|&k| k != 0).collect();
    let n = ks.len();
    let mat = DMatrix::from_fn(n, n, |i, j| {
        let (k, l) = (ks[i], ks[j]);
        let mut v = a.coeff(k - l) * w(k) * w(l);
        if i == j {
            v += b * w(k).abs();
        }
        v
    });
    let rhs = DVector::from_iterator(n, ks.iter().map(|&k| g.coeff(k)));
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("singular tangential Robin system".into()))?;
    for (i, &k) in ks.iter().enumerate() {
        u.set_coeff(k, sol[i]);
    }
    Ok(u)
}
