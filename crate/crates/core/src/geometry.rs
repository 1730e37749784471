//! Smooth closed boundary curves in arc-length parameterization and the thin-layer map
//! `Φ(η,θ) = Ψ(θ) + hη n(θ)`.

use crate::error::{Error, Result};
use crate::forms2d::Metric2;
use crate::torus::{ProductPolicy, TorusFunction};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

pub const ARC_LENGTH_TOL: f64 = 1e-10;
pub const MAX_REPARAM_ITERATIONS: usize = 100;

/// Closed counterclockwise curve `Ψ(θ) = (x(θ), y(θ))` with `|Ψ'| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    x: TorusFunction,
    y: TorusFunction,
    kappa: TorusFunction,
}

/// Center, radius and the polar angle of `Ψ(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleParams {
    pub center: [f64; 2],
    pub radius: f64,
    pub phase: f64,
}

/// Boundary quantities sampled at `θ_j = jL/n`.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub theta: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub tangents: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub kappa: Vec<f64>,
}

fn real_samples(f: &TorusFunction, n: usize) -> Vec<f64> {
    f.to_samples(n).into_iter().map(|v| v.re).collect()
}

/// Evaluates a real-valued series at many points using the power recurrence.
fn eval_re(f: &TorusFunction, t: f64) -> f64 {
    let base = Complex64::from_polar(1.0, f.wavenumber(1) * t);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = f.coeff(0).re;
    for k in 1..=f.modes() as i64 {
        z *= base;
        acc += (f.coeff(k) * z + f.coeff(-k) * z.conj()).re;
    }
    acc
}

impl BoundaryCurve {
    /// Reparameterizes a curve given by real Fourier series in some parameter of period
    /// `raw_x.period()` to counterclockwise arc length, keeping `modes` Fourier modes.
    pub fn from_fourier(raw_x: &TorusFunction, raw_y: &TorusFunction, modes: usize) -> Result<Self> {
        if !raw_x.is_real(1e-12) || !raw_y.is_real(1e-12) {
            return Err(Error::Geometry("curve coefficients must describe a real curve".into()));
        }
        let mut x = raw_x.clone();
        let mut y = raw_y.clone();
        if signed_area(&x, &y) < 0.0 {
            x = x.conj_reflect();
            y = y.conj_reflect();
        }
        let n = (16 * modes.max(x.modes()).max(y.modes())).next_power_of_two().max(64);
        check_simple_polygon(&x, &y, n / 4)?;
        let mut deviation = f64::INFINITY;
        for _ in 0..MAX_REPARAM_ITERATIONS {
            let (nx, ny) = arc_length_pass(&x, &y, n, modes)?;
            x = nx;
            y = ny;
            let previous = deviation;
            deviation = speed_deviation(&x, &y, 4 * modes);
            if deviation <= ARC_LENGTH_TOL {
                return Self::assemble(x, y);
            }
            // stalled: the truncation floor sits above the tolerance
            if deviation > 0.9 * previous {
                return Err(Error::Resolution(format!(
                    "{modes} Fourier modes cannot hold the arc-length parameterization \
                     (speed deviation {deviation:e} > {ARC_LENGTH_TOL:e})"
                )));
            }
        }
        Err(Error::Convergence {
            iterations: MAX_REPARAM_ITERATIONS,
            residual: deviation,
        })
    }

    pub fn circle(radius: f64, modes: usize) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::Geometry(format!("circle radius {radius} must be positive")));
        }
        let modes = modes.max(1);
        let period = 2.0 * PI * radius;
        let half = Complex64::new(radius / 2.0, 0.0);
        let x = TorusFunction::from_modes(period, modes, &[(1, half), (-1, half)]);
        let y = TorusFunction::from_modes(
            period,
            modes,
            &[
                (1, Complex64::new(0.0, -radius / 2.0)),
                (-1, Complex64::new(0.0, radius / 2.0)),
            ],
        );
        let kappa = TorusFunction::constant(period, modes, Complex64::new(1.0 / radius, 0.0));
        Ok(Self { x, y, kappa })
    }

    /// Ellipse with semi-axes `a` along x and `b` along y, starting at `(a, 0)`.
    pub fn ellipse(a: f64, b: f64, modes: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Geometry(format!(
                "ellipse semi-axes ({a}, {b}) must be positive"
            )));
        }
        let tau = 2.0 * PI;
        let x = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(a, 0.0))]);
        let y = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(0.0, -b))]);
        Self::from_fourier(&x, &y, modes)
    }

    /// Parses the curve file format: a line `L <period>` followed by lines
    /// `k re_x im_x re_y im_y`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, modes: usize) -> Result<Self> {
        let mut period = None;
        let mut terms: Vec<(i64, Complex64, Complex64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("{s:?}: {e}"),
                })
            };
            if period.is_none() {
                if tokens.len() != 2 || tokens[0] != "L" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected `L <period>`".into(),
                    });
                }
                let l = num(tokens[1])?;
                if !l.is_finite() || l <= 0.0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("period {l} must be positive"),
                    });
                }
                period = Some(l);
                continue;
            }
            if tokens.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected `k re_x im_x re_y im_y`".into(),
                });
            }
            let k = tokens[0].parse::<i64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("mode {:?}: {e}", tokens[0]),
            })?;
            terms.push((
                k,
                Complex64::new(num(tokens[1])?, num(tokens[2])?),
                Complex64::new(num(tokens[3])?, num(tokens[4])?),
            ));
        }
        let period = period.ok_or(Error::Parse {
            line: 0,
            message: "missing `L <period>` line".into(),
        })?;
        let raw_modes = terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let xs: Vec<_> = terms.iter().map(|t| (t.0, t.1)).collect();
        let ys: Vec<_> = terms.iter().map(|t| (t.0, t.2)).collect();
        let x = TorusFunction::from_modes(period, raw_modes, &xs);
        let y = TorusFunction::from_modes(period, raw_modes, &ys);
        Self::from_fourier(&x, &y, modes)
    }

    pub fn from_path(path: &Path, modes: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read curve file {}: {e}", path.display())))?;
        Self::parse(&text, modes)
    }

    fn assemble(x: TorusFunction, y: TorusFunction) -> Result<Self> {
        let modes = x.modes();
        let kappa = curvature(&x, &y).resized(modes);
        let curve = Self { x, y, kappa };
        curve.check_simple()?;
        Ok(curve)
    }

    fn check_simple(&self) -> Result<()> {
        check_simple_polygon(&self.x, &self.y, (4 * self.modes()).max(16))
    }

    /// Total length `L`, the period of the arc-length parameter.
    pub fn period(&self) -> f64 {
        self.x.period()
    }

    pub fn modes(&self) -> usize {
        self.x.modes()
    }

    pub fn x(&self) -> &TorusFunction {
        &self.x
    }

    pub fn y(&self) -> &TorusFunction {
        &self.y
    }

    /// Curvature `κ = det(Ψ', Ψ'')`, positive on a counterclockwise circle.
    pub fn kappa(&self) -> &TorusFunction {
        &self.kappa
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        [eval_re(&self.x, theta), eval_re(&self.y, theta)]
    }

    pub fn tangent(&self, theta: f64) -> [f64; 2] {
        [eval_re(&self.x.diff(1), theta), eval_re(&self.y.diff(1), theta)]
    }

    /// Outward unit normal `n = (Ψ₂', -Ψ₁')`.
    pub fn normal(&self, theta: f64) -> [f64; 2] {
        let t = self.tangent(theta);
        [t[1], -t[0]]
    }

    pub fn samples(&self, n: usize) -> CurveSamples {
        let xs = real_samples(&self.x, n);
        let ys = real_samples(&self.y, n);
        let dx = real_samples(&self.x.diff(1), n);
        let dy = real_samples(&self.y.diff(1), n);
        CurveSamples {
            theta: (0..n).map(|j| j as f64 * self.period() / n as f64).collect(),
            points: xs.iter().zip(&ys).map(|(&a, &b)| [a, b]).collect(),
            tangents: dx.iter().zip(&dy).map(|(&a, &b)| [a, b]).collect(),
            normals: dx.iter().zip(&dy).map(|(&a, &b)| [b, -a]).collect(),
            kappa: real_samples(&self.kappa, n),
        }
    }

    /// `1/max|κ|` over a `4M` grid.
    pub fn h0(&self) -> f64 {
        let n = (4 * self.modes()).max(16);
        let kmax = real_samples(&self.kappa, n)
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max);
        1.0 / kmax
    }

    /// `max ||Ψ'| - 1|` over a `4M` grid.
    pub fn arc_length_deviation(&self) -> f64 {
        speed_deviation(&self.x, &self.y, (4 * self.modes()).max(16))
    }

    /// Recomputes `∫|Ψ'|` by the trapezoid rule.
    pub fn measured_length(&self) -> f64 {
        let n = (8 * self.modes()).max(64);
        let dx = real_samples(&self.x.diff(1), n);
        let dy = real_samples(&self.y.diff(1), n);
        dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).sum::<f64>() * self.period() / n as f64
    }

    /// Recognizes a circle (constant curvature and constant distance to the centroid).
    pub fn as_circle(&self, tol: f64) -> Option<CircleParams> {
        let kbar = self.kappa.mean().re;
        if kbar <= 0.0 {
            return None;
        }
        let n = (4 * self.modes()).max(16);
        let ks = real_samples(&self.kappa, n);
        if ks.iter().any(|k| (k - kbar).abs() > tol * kbar) {
            return None;
        }
        let center = [self.x.mean().re, self.y.mean().re];
        let radius = 1.0 / kbar;
        let s = self.samples(n);
        if s.points
            .iter()
            .any(|p| ((p[0] - center[0]).hypot(p[1] - center[1]) - radius).abs() > tol * radius)
        {
            return None;
        }
        let p0 = s.points[0];
        Some(CircleParams {
            center,
            radius,
            phase: (p0[1] - center[1]).atan2(p0[0] - center[0]),
        })
    }
}

impl TorusFunction {
    /// `f(-t)`, used to flip a clockwise parameterization.
    fn conj_reflect(&self) -> Self {
        let mut out = TorusFunction::zeros(self.period(), self.modes());
        for (k, c) in self.iter() {
            out.set_coeff(-k, c);
        }
        out
    }
}

fn signed_area(x: &TorusFunction, y: &TorusFunction) -> f64 {
    // (1/2)∫(x y' - y x') dt, exact on coefficients.
    let p = ProductPolicy::ExactExpand;
    let integrand = &x.multiply(&y.diff(1), p) - &y.multiply(&x.diff(1), p);
    0.5 * integrand.integral().re
}

fn curvature(x: &TorusFunction, y: &TorusFunction) -> TorusFunction {
    let p = ProductPolicy::ExactExpand;
    let (dx, dy) = (x.diff(1), y.diff(1));
    &dx.multiply(&y.diff(2), p) - &dy.multiply(&x.diff(2), p)
}

fn speed_deviation(x: &TorusFunction, y: &TorusFunction, n: usize) -> f64 {
    let dx = real_samples(&x.diff(1), n);
    let dy = real_samples(&y.diff(1), n);
    dx.iter()
        .zip(&dy)
        .map(|(a, b)| (a.hypot(*b) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// One arc-length resampling: invert `s(t) = ∫₀ᵗ|z'|` by Newton's method at uniform
/// arc-length targets and refit the Fourier series in the new parameter.
fn arc_length_pass(
    x: &TorusFunction,
    y: &TorusFunction,
    n: usize,
    modes: usize,
) -> Result<(TorusFunction, TorusFunction)> {
    let period = x.period();
    let (dx, dy) = (x.diff(1), y.diff(1));
    let speed_samples: Vec<f64> = real_samples(&dx, n)
        .iter()
        .zip(real_samples(&dy, n))
        .map(|(a, b)| a.hypot(b))
        .collect();
    if speed_samples.iter().any(|&s| s < 1e-12) {
        return Err(Error::Geometry("curve parameterization has a stationary point".into()));
    }
    let speed = TorusFunction::from_real_samples(period, &speed_samples, n / 2 - 1);
    let mean_speed = speed.mean().re;
    let length = mean_speed * period;
    // periodic part of the arc-length function
    let mut wobble = TorusFunction::zeros(period, speed.modes());
    for (k, c) in speed.iter() {
        if k != 0 {
            wobble.set_coeff(k, c / Complex64::new(0.0, speed.wavenumber(k)));
        }
    }
    let w0 = eval_re(&wobble, 0.0);
    let arc = |t: f64| mean_speed * t + eval_re(&wobble, t) - w0;
    let speed_at = |t: f64| eval_re(&dx, t).hypot(eval_re(&dy, t));

    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut t = 0.0;
    for j in 0..n {
        let target = j as f64 * length / n as f64;
        if j > 0 {
            t += (length / n as f64) / speed_at(t);
        }
        for _ in 0..50 {
            let step = (arc(t) - target) / speed_at(t);
            t -= step;
            if step.abs() <= 1e-15 * period {
                break;
            }
        }
        xs.push(eval_re(x, t));
        ys.push(eval_re(y, t));
    }
    Ok((
        TorusFunction::from_real_samples(length, &xs, modes),
        TorusFunction::from_real_samples(length, &ys, modes),
    ))
}

fn check_simple_polygon(x: &TorusFunction, y: &TorusFunction, n: usize) -> Result<()> {
    let p: Vec<[f64; 2]> = real_samples(x, n)
        .into_iter()
        .zip(real_samples(y, n))
        .map(|(a, b)| [a, b])
        .collect();
    let seg = |i: usize| (p[i], p[(i + 1) % n]);
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_cross(a, b, c, d) {
                return Err(Error::Geometry(format!(
                    "curve self-intersects between samples {i} and {j}"
                )));
            }
        }
    }
    Ok(())
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// A curve together with an admissible relative thickness `0 < h < h₀`.
#[derive(Debug, Clone)]
pub struct LayerGeometry {
    curve: Arc<BoundaryCurve>,
    h: f64,
}

impl LayerGeometry {
    pub fn new(curve: Arc<BoundaryCurve>, h: f64) -> Result<Self> {
        let h0 = curve.h0();
        if !(h > 0.0 && h < h0) {
            return Err(Error::Domain(format!("thickness h = {h} outside (0, h0 = {h0})")));
        }
        Ok(Self { curve, h })
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        &self.curve
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    fn check_eta(eta: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!("η = {eta} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn layer_map(&self, eta: f64, theta: f64) -> Result<[f64; 2]> {
        Self::check_eta(eta)?;
        let p = self.curve.point(theta);
        let n = self.curve.normal(theta);
        Ok([p[0] + self.h * eta * n[0], p[1] + self.h * eta * n[1]])
    }

    /// `diag(h², (1+hηκ)²)`.
    pub fn metric_at(&self, eta: f64, theta: f64) -> Result<Metric2> {
        Self::check_eta(eta)?;
        let s = 1.0 + self.h * eta * self.curve.kappa.eval(theta).re;
        Metric2::diagonal(self.h * self.h, s * s)
    }

    /// `det DΦ = h(1+hηκ)`.
    pub fn jacobian(&self, eta: f64, theta: f64) -> Result<f64> {
        Self::check_eta(eta)?;
        Ok(self.h * (1.0 + self.h * eta * self.curve.kappa.eval(theta).re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_from_fourier() {
        let tau = 2.0 * PI;
        let x = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(1.0, 0.0))]);
        let y = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(0.0, -1.0))]);
        let c = BoundaryCurve::from_fourier(&x, &y, 16).unwrap();
        assert!((c.period() - tau).abs() < 1e-12);
        let ks = real_samples(c.kappa(), 64);
        assert!(ks.iter().all(|k| (k - 1.0).abs() < 1e-12));
        assert!((c.h0() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let tau = 2.0 * PI;
        let x = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(1.0, 0.0))]);
        let y = TorusFunction::real_from_modes(tau, 1, &[(1, Complex64::new(0.0, 1.0))]);
        let c = BoundaryCurve::from_fourier(&x, &y, 8).unwrap();
        assert!((c.kappa().mean().re - 1.0).abs() < 1e-12);
        // outward normal at (1, 0)
        let n = c.normal(0.0);
        assert!((n[0] - 1.0).abs() < 1e-12 && n[1].abs() < 1e-12);
    }

    #[test]
    fn radius_two() {
        let c = BoundaryCurve::circle(2.0, 8).unwrap();
        assert!((c.period() - 4.0 * PI).abs() < 1e-15);
        assert_eq!(c.kappa().mean().re, 0.5);
        assert!((c.h0() - 2.0).abs() < 1e-15);
        assert!(c.arc_length_deviation() < 1e-14);
    }

    /// Curvature of `(a cos t, b sin t)` from centered differences of the raw parameterization.
    fn fd_ellipse_curvature(a: f64, b: f64, t: f64) -> f64 {
        let d = 1e-3;
        let p = |t: f64| [a * t.cos(), b * t.sin()];
        let (m, z, q) = (p(t - d), p(t), p(t + d));
        let v = [(q[0] - m[0]) / (2.0 * d), (q[1] - m[1]) / (2.0 * d)];
        let acc = [
            (q[0] - 2.0 * z[0] + m[0]) / (d * d),
            (q[1] - 2.0 * z[1] + m[1]) / (d * d),
        ];
        (v[0] * acc[1] - v[1] * acc[0]) / (v[0].hypot(v[1])).powi(3)
    }

    #[test]
    fn ellipse_curvature_and_h0() {
        let c = BoundaryCurve::ellipse(1.5, 1.0, 64).unwrap();
        let oracle = fd_ellipse_curvature(1.5, 1.0, 0.0);
        assert!((oracle - 1.5).abs() < 1e-5);
        assert!((c.kappa().eval(0.0).re - 1.5).abs() < 1e-8);
        let p = c.point(0.0);
        assert!((p[0] - 1.5).abs() < 1e-12 && p[1].abs() < 1e-12);
        assert!((c.h0() - 1.0 / 1.5).abs() < 1e-8);
        assert!(c.arc_length_deviation() <= ARC_LENGTH_TOL);
        assert!((c.measured_length() - c.period()).abs() < 1e-10);
        // stored curvature matches det(Ψ', Ψ'') recomputed on samples
        let n = 256;
        let s = c.samples(n);
        let ddx = real_samples(&c.x().diff(2), n);
        let ddy = real_samples(&c.y().diff(2), n);
        for j in 0..n {
            let det = s.tangents[j][0] * ddy[j] - s.tangents[j][1] * ddx[j];
            assert!((det - s.kappa[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn ellipse_curvature_matches_oracle_along_curve() {
        let c = BoundaryCurve::ellipse(1.5, 1.0, 64).unwrap();
        for &theta in &[0.3, 1.1, 2.0, 3.7] {
            let p = c.point(theta);
            let t = p[1].atan2(p[0] / 1.5);
            assert!((c.kappa().eval(theta).re - fd_ellipse_curvature(1.5, 1.0, t)).abs() < 1e-5);
        }
    }

    #[test]
    fn underresolved_ellipse_is_a_resolution_error() {
        assert!(matches!(BoundaryCurve::ellipse(3.0, 1.0, 8), Err(Error::Resolution(_))));
    }

    #[test]
    fn figure_eight_rejected() {
        let tau = 2.0 * PI;
        let x = TorusFunction::real_from_modes(tau, 2, &[(1, Complex64::new(1.0, 0.0))]);
        let y = TorusFunction::real_from_modes(tau, 2, &[(2, Complex64::new(0.0, -0.5))]);
        assert!(matches!(
            BoundaryCurve::from_fourier(&x, &y, 32),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn parse_curve_file() {
        let text = "# unit circle\nL 6.283185307179586\n1 0.5 0 0 -0.5\n-1 0.5 0 0 0.5\n";
        let c = BoundaryCurve::parse(text, 8).unwrap();
        assert!((c.period() - 2.0 * PI).abs() < 1e-12);
        assert!(matches!(
            BoundaryCurve::parse("1 0 0 0 0\n", 8),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            BoundaryCurve::parse("L 1\n1 0 x 0 0\n", 8),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn layer_map_and_metric() {
        let circle = Arc::new(BoundaryCurve::circle(1.0, 8).unwrap());
        let g = LayerGeometry::new(circle.clone(), 0.1).unwrap();
        let p = g.layer_map(1.0, 0.0).unwrap();
        assert!((p[0] - 1.1).abs() < 1e-15 && p[1].abs() < 1e-15);
        let q = g.layer_map(0.0, 0.7).unwrap();
        assert_eq!(q, circle.point(0.7));
        let m = g.metric_at(0.0, 1.3).unwrap();
        assert!((m.g11() - 0.01).abs() < 1e-16 && (m.g22() - 1.0).abs() < 1e-15 && m.g12() == 0.0);
        assert!((g.metric_at(1.0, 0.0).unwrap().g22() - 1.21).abs() < 1e-14);
        assert!(matches!(g.layer_map(1.5, 0.0), Err(Error::Domain(_))));
        assert!(LayerGeometry::new(circle.clone(), 1.0).is_err());
        assert!(LayerGeometry::new(circle, 0.0).is_err());

        let ell = Arc::new(BoundaryCurve::ellipse(1.5, 1.0, 64).unwrap());
        let g = LayerGeometry::new(ell, 0.2).unwrap();
        let p = g.layer_map(1.0, 0.0).unwrap();
        assert!((p[0] - 1.7).abs() < 1e-12 && p[1].abs() < 1e-12);
        assert!((g.metric_at(1.0, 0.0).unwrap().g22() - 1.69).abs() < 1e-8);
    }

    #[test]
    fn layer_positivity_and_jacobian() {
        let ell = Arc::new(BoundaryCurve::ellipse(1.5, 1.0, 64).unwrap());
        let h = 0.6;
        let g = LayerGeometry::new(ell.clone(), h).unwrap();
        let n = 4 * ell.modes();
        let ks = real_samples(ell.kappa(), n);
        for k in &ks {
            for i in 0..17 {
                assert!(1.0 + h * (i as f64 / 16.0) * k > 0.0);
            }
        }
        // finite-difference Jacobian of Φ
        let d = 1e-5;
        for &(eta, theta) in &[(0.2, 0.4), (0.9, 2.5), (0.5, 4.0)] {
            let pe = g.layer_map(eta + d, theta).unwrap();
            let me = g.layer_map(eta - d, theta).unwrap();
            let pt = g.layer_map(eta, theta + d).unwrap();
            let mt = g.layer_map(eta, theta - d).unwrap();
            let a = [(pe[0] - me[0]) / (2.0 * d), (pe[1] - me[1]) / (2.0 * d)];
            let b = [(pt[0] - mt[0]) / (2.0 * d), (pt[1] - mt[1]) / (2.0 * d)];
            let det = (a[0] * b[1] - a[1] * b[0]).abs();
            assert!((det - g.jacobian(eta, theta).unwrap()).abs() < 1e-8);
        }
    }
}
