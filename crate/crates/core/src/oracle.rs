//! Exact per-mode solutions of the transmission problems on a disk of radius `R`
//! surrounded by an annular layer of width `h`.
//!
//! Mode `k ≠ 0` (with `n = |k|`, `ρ = r/R`) has inner part `A ρ^n` and membrane part
//! `B ρ^n + C ρ^{-n}`. Continuity at `ρ = 1` gives `A = B + C`, the flux condition fixes
//! `C = cB`, and the Neumann condition `∂_r u = φ` at `r = R + h` then determines `B`.

use crate::error::{Error, Result};
use crate::expansion::{ExpansionSeries, Regime};
use crate::geometry::{BoundaryCurve, LayerGeometry};
use crate::inner::{check_contrast, disk_harmonic_norms, InnerNorms};
use crate::membrane::{layer_norms, LayerNorms, LayerQuadrature, MembraneField};
use crate::torus::TorusFunction;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Per-mode identities must hold to this relative accuracy.
pub const IDENTITY_TOL: f64 = 1e-12;
const MEAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleProblem {
    /// Inner coefficient 1, membrane coefficient `α`.
    P1,
    /// Inner coefficient `α`, membrane coefficient 1.
    P2,
    /// Insulated membrane; the inner field is the harmonic extension of its trace.
    ULimit,
}

impl fmt::Display for OracleProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::P1 => "P1",
            Self::P2 => "P2",
            Self::ULimit => "U",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTriple {
    pub k: i64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

#[derive(Debug, Clone)]
pub struct DiskTransmissionSolution {
    problem: OracleProblem,
    h: f64,
    alpha: Option<Complex64>,
    radius: f64,
    data: TorusFunction,
    a: TorusFunction,
    b: TorusFunction,
    c: TorusFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderNorms {
    /// `H¹(O)` norm of the inner remainder.
    pub inner: f64,
    /// `H¹_g` norm of the membrane remainder.
    pub membrane: f64,
}

pub fn solve_disk_p1(h: f64, alpha: Complex64, phi: &TorusFunction) -> Result<DiskTransmissionSolution> {
    check_contrast("α", alpha)?;
    let one = Complex64::new(1.0, 0.0);
    solve(
        OracleProblem::P1,
        h,
        Some(alpha),
        phi,
        (alpha - one) / (alpha + one),
        2.0 / (one + alpha),
    )
}

pub fn solve_disk_p2(h: f64, alpha: Complex64, phi: &TorusFunction) -> Result<DiskTransmissionSolution> {
    check_contrast("α", alpha)?;
    let one = Complex64::new(1.0, 0.0);
    solve(
        OracleProblem::P2,
        h,
        Some(alpha),
        phi,
        (one - alpha) / (one + alpha),
        2.0 * alpha / (one + alpha),
    )
}

pub fn solve_disk_u(h: f64, phi: &TorusFunction) -> Result<DiskTransmissionSolution> {
    let one = Complex64::new(1.0, 0.0);
    solve(OracleProblem::ULimit, h, None, phi, one, Complex64::new(0.0, 0.0))
}

/// `c` and `1 - c` are passed separately so that `1 - c` keeps full relative accuracy
/// when the contrast is tiny.
fn solve(
    problem: OracleProblem,
    h: f64,
    alpha: Option<Complex64>,
    phi: &TorusFunction,
    c: Complex64,
    one_minus_c: Complex64,
) -> Result<DiskTransmissionSolution> {
    let radius = phi.period() / (2.0 * PI);
    if !(h > 0.0 && h < radius) {
        return Err(Error::Parameter(format!(
            "layer width h = {h} must lie in (0, {radius})"
        )));
    }
    let mean = phi.coeff(0).norm();
    let tol = MEAN_TOL * phi.coeff_norm().max(1.0);
    if mean > tol {
        return Err(Error::Compatibility {
            context: "disk oracle data".into(),
            mean,
            tolerance: tol,
        });
    }
    let m = phi.modes();
    let mut sol = DiskTransmissionSolution {
        problem,
        h,
        alpha,
        radius,
        data: phi.clone(),
        a: TorusFunction::zeros(phi.period(), m),
        b: TorusFunction::zeros(phi.period(), m),
        c: TorusFunction::zeros(phi.period(), m),
    };
    let lnr = (h / radius).ln_1p();
    for (k, f) in phi.iter() {
        if k == 0 || f == Complex64::new(0.0, 0.0) {
            continue;
        }
        let n = k.unsigned_abs() as f64;
        // (ρ^{2n} - c) ρ^{-n-1}, with ρ^{2n} - 1 from expm1
        let d = ((2.0 * n * lnr).exp_m1() + one_minus_c) * (-(n + 1.0) * lnr).exp();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Internal(format!("singular mode system at k = {k}")));
        }
        let b = f * radius / (n * d);
        let cc = c * b;
        sol.a.set_coeff(k, b + cc);
        sol.b.set_coeff(k, b);
        sol.c.set_coeff(k, cc);
    }
    let worst = sol.identity_residual();
    if worst > IDENTITY_TOL {
        return Err(Error::Internal(format!(
            "{problem} oracle identities violated (relative residual {worst:e})"
        )));
    }
    Ok(sol)
}

impl DiskTransmissionSolution {
    pub fn problem(&self) -> OracleProblem {
        self.problem
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `None` for the insulated limit.
    pub fn alpha(&self) -> Option<Complex64> {
        self.alpha
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn data(&self) -> &TorusFunction {
        &self.data
    }

    pub fn modes(&self) -> usize {
        self.data.modes()
    }

    /// Coefficients of every nonzero mode `0 < |k| ≤ M`, in increasing `k`.
    pub fn triples(&self) -> impl Iterator<Item = ModeTriple> + '_ {
        let m = self.modes() as i64;
        (-m..=m).filter(|&k| k != 0).map(|k| ModeTriple {
            k,
            a: self.a.coeff(k),
            b: self.b.coeff(k),
            c: self.c.coeff(k),
        })
    }

    /// Inner trace at `r = R`, which is also the inner field's coefficient set.
    pub fn inner_trace(&self) -> &TorusFunction {
        &self.a
    }

    pub fn inner_norms(&self) -> InnerNorms {
        disk_harmonic_norms(self.radius, &self.a)
    }

    /// Membrane field and its `η`-derivative at `r = R + hη`.
    pub fn membrane_at(&self, eta: f64) -> (TorusFunction, TorusFunction) {
        let lnr = (self.h * eta / self.radius).ln_1p();
        let mut f = TorusFunction::zeros(self.data.period(), self.modes());
        let mut df = f.clone();
        for (k, b) in self.b.iter() {
            if k == 0 {
                continue;
            }
            let n = k.unsigned_abs() as f64;
            let c = self.c.coeff(k);
            let up = (n * lnr).exp();
            let down = (-n * lnr).exp();
            f.set_coeff(k, b * up + c * down);
            df.set_coeff(k, (b * up - c * down) * (self.h * n / (self.radius + self.h * eta)));
        }
        (f, df)
    }

    /// The layer geometry the membrane lives on.
    pub fn layer(&self) -> Result<LayerGeometry> {
        let curve = BoundaryCurve::circle(self.radius, self.modes())?;
        LayerGeometry::new(Arc::new(curve), self.h)
    }

    pub fn membrane_norms(&self) -> Result<LayerNorms> {
        let geom = self.layer()?;
        let quad = LayerQuadrature::for_modes(self.modes());
        Ok(layer_norms(&geom, &quad, self.modes(), |eta| self.membrane_at(eta)))
    }

    /// `‖u_inner - v‖_{H¹(O)}` pieces, `v` the harmonic extension of `trace`.
    pub fn inner_error(&self, trace: &TorusFunction) -> InnerNorms {
        disk_harmonic_norms(self.radius, &(&self.a - &trace.resized(self.modes())))
    }

    /// Thin-layer norms of `u_membrane - field`.
    pub fn membrane_error(&self, field: &MembraneField) -> Result<LayerNorms> {
        let geom = self.layer()?;
        let modes = self.modes().max(field.modes());
        let quad = LayerQuadrature::for_modes(modes);
        let dfield = field.eta_diff();
        Ok(layer_norms(&geom, &quad, modes, |eta| {
            let (f, df) = self.membrane_at(eta);
            (
                &f.resized(modes) - &field.eval_eta(eta).resized(modes),
                &df.resized(modes) - &dfield.eval_eta(eta).resized(modes),
            )
        }))
    }

    /// Largest relative residual of the three per-mode identities.
    pub fn identity_residual(&self) -> f64 {
        let lnr = (self.h / self.radius).ln_1p();
        let mut worst: f64 = 0.0;
        let rel = |r: Complex64, s: f64| if s == 0.0 { r.norm() } else { r.norm() / s };
        for t in self.triples() {
            let n = t.k.unsigned_abs() as f64;
            let f = self.data.coeff(t.k);
            let cont = rel(t.a - t.b - t.c, t.a.norm() + t.b.norm() + t.c.norm());
            let flux = match (self.problem, self.alpha) {
                (OracleProblem::P1, Some(al)) => rel(
                    t.a - al * (t.b - t.c),
                    t.a.norm() + al.norm() * (t.b.norm() + t.c.norm()),
                ),
                (OracleProblem::P2, Some(al)) => {
                    rel(al * t.a - (t.b - t.c), al.norm() * t.a.norm() + t.b.norm() + t.c.norm())
                }
                _ => rel(t.b - t.c, t.b.norm() + t.c.norm()),
            };
            let up = t.b * ((n - 1.0) * lnr).exp() * (n / self.radius);
            let down = t.c * (-(n + 1.0) * lnr).exp() * (n / self.radius);
            let outer = rel(up - down - f, up.norm() + down.norm() + f.norm());
            worst = worst.max(cont).max(flux).max(outer);
        }
        worst
    }
}

/// Remainder of the partial sum `Σ_{k ≤ n_use} h^k term_k` against the oracle.
pub fn remainder_norms(
    oracle: &DiskTransmissionSolution,
    series: &ExpansionSeries,
    n_use: i64,
) -> Result<RemainderNorms> {
    let h = oracle.h();
    let circle = series
        .curve()
        .as_circle(1e-10)
        .ok_or_else(|| Error::Usage("the disk oracle needs a circular boundary".into()))?;
    if (circle.radius - oracle.radius()).abs() > 1e-12 * oracle.radius() {
        return Err(Error::Usage(format!(
            "series radius {} differs from oracle radius {}",
            circle.radius,
            oracle.radius()
        )));
    }
    let diff = (&series.data().resized(oracle.modes()) - oracle.data()).max_abs_coeff();
    if diff > 1e-12 * oracle.data().max_abs_coeff().max(1e-300) {
        return Err(Error::Usage("series and oracle use different data".into()));
    }
    let link_ok = match (series.regime(), oracle.problem(), oracle.alpha()) {
        (Regime::Thm1 { alpha }, OracleProblem::P1, Some(a)) => close(alpha, a),
        (Regime::Thm2 { beta, q }, OracleProblem::P2, Some(a)) => close(beta * h.powi(q as i32), a),
        (Regime::Beta0, OracleProblem::ULimit, None) => true,
        _ => false,
    };
    if !link_ok {
        return Err(Error::Usage(format!(
            "{} series does not match the {} oracle contrast at h = {h}",
            series.regime(),
            oracle.problem()
        )));
    }
    let sum = series.partial_sum(h, n_use)?;
    let inner = oracle.inner_error(&sum.inner.trace()).h1();
    let membrane = oracle.membrane_error(&sum.membrane)?.h1();
    Ok(RemainderNorms { inner, membrane })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * a.norm().max(b.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Vector3};

    const TAU: f64 = 2.0 * PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(k: i64, m: usize) -> TorusFunction {
        TorusFunction::from_modes(TAU, m, &[(k, c(1.0, 0.0))])
    }

    /// Direct 3×3 solve of continuity, flux and outer Neumann conditions.
    fn direct(problem: OracleProblem, h: f64, alpha: Complex64, k: i64, f: Complex64) -> Vector3<Complex64> {
        let n = k.unsigned_abs() as f64;
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let rho = 1.0 + h;
        let flux = match problem {
            OracleProblem::P1 => [c(n, 0.0), -alpha * n, alpha * n],
            OracleProblem::P2 => [alpha * n, -one * n, one * n],
            OracleProblem::ULimit => [zero, one * n, -one * n],
        };
        let m = Matrix3::new(
            one,
            -one,
            -one,
            flux[0],
            flux[1],
            flux[2],
            zero,
            c(n * rho.powf(n - 1.0), 0.0),
            c(-n * rho.powf(-n - 1.0), 0.0),
        );
        m.lu().solve(&Vector3::new(zero, zero, f)).unwrap()
    }

    fn assert_matches_direct(sol: &DiskTransmissionSolution, alpha: Complex64) {
        for t in sol.triples() {
            let f = sol.data().coeff(t.k);
            if f == c(0.0, 0.0) {
                continue;
            }
            let d = direct(sol.problem(), sol.h(), alpha, t.k, f);
            let scale = d.iter().map(|v| v.norm()).sum::<f64>();
            for (x, y) in [t.a, t.b, t.c].iter().zip(d.iter()) {
                assert!((x - y).norm() <= 1e-12 * scale, "k = {}: {x} vs {y}", t.k);
            }
        }
    }

    #[test]
    fn homogeneous_contrast_is_whole_disk() {
        let s = solve_disk_p1(0.1, c(1.0, 0.0), &mode(1, 4)).unwrap();
        let t = s.triples().find(|t| t.k == 1).unwrap();
        assert!(t.c.norm() < 1e-15);
        assert!((t.a - c(1.0, 0.0)).norm() < 1e-14 && (t.b - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn p1_matches_direct_solve() {
        let s = solve_disk_p1(0.1, c(0.5, 0.0), &mode(1, 4)).unwrap();
        assert!(s.identity_residual() <= 1e-14);
        assert_matches_direct(&s, c(0.5, 0.0));
        let f = TorusFunction::real_from_modes(TAU, 8, &[(1, c(1.0, 0.0)), (3, c(0.3, 0.0)), (7, c(0.0, 0.2))]);
        let s = solve_disk_p1(0.05, c(0.0, 1.0), &f).unwrap();
        assert_matches_direct(&s, c(0.0, 1.0));
    }

    #[test]
    fn p2_matches_direct_solve() {
        let h = 0.05;
        let alpha = c(0.0, h);
        let s = solve_disk_p2(h, alpha, &mode(2, 4)).unwrap();
        assert!(s.identity_residual() <= 1e-14);
        assert_matches_direct(&s, alpha);
    }

    #[test]
    fn p1_and_p2_coincide_at_unit_contrast() {
        let f = TorusFunction::real_from_modes(TAU, 6, &[(1, c(1.0, 0.0)), (4, c(0.2, -0.1))]);
        let a = solve_disk_p1(0.07, c(1.0, 0.0), &f).unwrap();
        let b = solve_disk_p2(0.07, c(1.0, 0.0), &f).unwrap();
        assert_eq!(a.triples().collect::<Vec<_>>(), b.triples().collect::<Vec<_>>());
    }

    #[test]
    fn u_limit_closed_form() {
        let h = 0.1;
        let s = solve_disk_u(h, &mode(1, 4)).unwrap();
        let t = s.triples().find(|t| t.k == 1).unwrap();
        let b = 1.0 / (1.0 - (1.0 + h).powi(-2));
        assert!((t.b - c(b, 0.0)).norm() <= 1e-14 * b);
        assert!((t.b - t.c).norm() <= 1e-14 * b);
        assert!(s.identity_residual() <= 1e-14);
        assert_matches_direct(&s, c(0.0, 0.0));
        let zero = solve_disk_u(h, &TorusFunction::zeros(TAU, 4)).unwrap();
        assert!(zero
            .triples()
            .all(|t| t.a == c(0.0, 0.0) && t.b == c(0.0, 0.0) && t.c == c(0.0, 0.0)));
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let one = TorusFunction::constant(TAU, 4, c(1.0, 0.0));
        assert!(matches!(
            solve_disk_p1(0.1, c(1.0, 0.0), &one),
            Err(Error::Compatibility { .. })
        ));
        assert!(matches!(solve_disk_u(0.1, &one), Err(Error::Compatibility { .. })));
        assert!(matches!(
            solve_disk_p1(0.1, c(-1.0, 0.0), &mode(1, 4)),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            solve_disk_p1(1.5, c(1.0, 0.0), &mode(1, 4)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn p2_leading_coefficient_grows_like_inverse_h() {
        let beta = c(0.0, 1.0);
        let hs = [0.1, 0.05, 0.025];
        let b: Vec<f64> = hs
            .iter()
            .map(|&h| {
                solve_disk_p2(h, beta * h, &mode(1, 2))
                    .unwrap()
                    .triples()
                    .find(|t| t.k == 1)
                    .unwrap()
                    .b
                    .norm()
            })
            .collect();
        let slope = (b[2] / b[0]).ln() / (hs[2] / hs[0]).ln();
        assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn tiny_contrast_approaches_u_limit() {
        let f = TorusFunction::real_from_modes(TAU, 8, &[(1, c(1.0, 0.0)), (3, c(0.3, 0.0))]);
        let h = 0.1;
        let p2 = solve_disk_p2(h, c(1e-20, 0.0), &f).unwrap();
        let u = solve_disk_u(h, &f).unwrap();
        let geom = u.layer().unwrap();
        let quad = LayerQuadrature::for_modes(8);
        let diff = layer_norms(&geom, &quad, 8, |eta| {
            let (a, da) = p2.membrane_at(eta);
            let (b, db) = u.membrane_at(eta);
            (&a - &b, &da - &db)
        });
        assert!(diff.h1() <= 1e-12 * u.membrane_norms().unwrap().h1());
    }

    #[test]
    fn p1_is_well_conditioned_in_alpha() {
        let f = TorusFunction::real_from_modes(TAU, 8, &[(1, c(1.0, 0.0)), (3, c(0.3, 0.0))]);
        for alpha in [c(0.0, 1.0), c(1.0, 0.0), c(0.0, 1e-2)] {
            let a = solve_disk_p1(0.05, alpha, &f).unwrap();
            let b = solve_disk_p1(0.05, alpha + c(1e-8, 0.0), &f).unwrap();
            for (x, y) in a.triples().zip(b.triples()) {
                let s = x.a.norm() + x.b.norm() + x.c.norm();
                let d = (x.a - y.a).norm() + (x.b - y.b).norm() + (x.c - y.c).norm();
                assert!(d <= 1e-6 * s.max(1e-300));
            }
        }
    }

    #[test]
    fn membrane_derivative_matches_finite_difference() {
        let f = TorusFunction::real_from_modes(TAU, 4, &[(2, c(1.0, 0.5))]);
        let s = solve_disk_p1(0.1, c(0.0, 1.0), &f).unwrap();
        let (eta, d) = (0.4, 1e-5);
        let (_, df) = s.membrane_at(eta);
        let fd = &(&s.membrane_at(eta + d).0 - &s.membrane_at(eta - d).0) * (0.5 / d);
        assert!((&fd - &df).max_abs_coeff() < 1e-8);
        // outer Neumann condition in local form: ∂_η u = h f at η = 1
        let (_, d1) = s.membrane_at(1.0);
        assert!((&d1 - &f.scale(c(0.1, 0.0))).max_abs_coeff() < 1e-13);
    }

    #[test]
    fn zero_partial_sum_error_is_oracle_norm() {
        let f = TorusFunction::real_from_modes(TAU, 4, &[(1, c(1.0, 0.0))]);
        let s = solve_disk_p1(0.1, c(0.0, 1.0), &f).unwrap();
        let e = s.inner_error(&TorusFunction::zeros(TAU, 4));
        assert_eq!(e, s.inner_norms());
        let m = s.membrane_error(&MembraneField::zeros(TAU, 4)).unwrap();
        let n = s.membrane_norms().unwrap();
        assert!((m.h1() - n.h1()).abs() <= 1e-14 * n.h1());
    }
}
