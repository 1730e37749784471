//! Exterior calculus for 2D metrics: Hodge stars, `d`, `δ = ⋆⁻¹d⋆` and the
//! Laplace–Beltrami operator `δ(q du)`.
//!
//! Sign convention: `δd = -Δ` on flat space, so `laplace_beltrami` returns `-∇·(q∇u)`
//! in the flat case. Every module that compares against this operator uses that sign.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// Field values the pointwise operators accept.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Mul<f64, Output = Self>
{
}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// A positive-definite symmetric metric `[[g11, g12], [g12, g22]]` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric2 {
    g11: f64,
    g12: f64,
    g22: f64,
}

impl Metric2 {
    pub fn new(g11: f64, g12: f64, g22: f64) -> Result<Self> {
        let det = g11 * g22 - g12 * g12;
        if !(det > 0.0 && g11 > 0.0) || !det.is_finite() {
            return Err(Error::Domain(format!(
                "metric ({g11}, {g12}, {g22}) is not positive definite (det {det})"
            )));
        }
        Ok(Self { g11, g12, g22 })
    }

    pub fn identity() -> Self {
        Self {
            g11: 1.0,
            g12: 0.0,
            g22: 1.0,
        }
    }

    pub fn diagonal(g11: f64, g22: f64) -> Result<Self> {
        Self::new(g11, 0.0, g22)
    }

    pub fn g11(&self) -> f64 {
        self.g11
    }
    pub fn g12(&self) -> f64 {
        self.g12
    }
    pub fn g22(&self) -> f64 {
        self.g22
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn sqrt_det(&self) -> f64 {
        self.det().sqrt()
    }

    /// `(g^11, g^12, g^22)`.
    pub fn inverse(&self) -> (f64, f64, f64) {
        let d = self.det();
        (self.g22 / d, -self.g12 / d, self.g11 / d)
    }

    /// Raises an index: `(g^{1j}μ_j, g^{2j}μ_j)`.
    fn raise<S: Scalar>(&self, m1: S, m2: S) -> (S, S) {
        let (a, b, c) = self.inverse();
        (m1 * a + m2 * b, m1 * b + m2 * c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Form0<S = f64>(pub S);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Form1<S = f64>(pub S, pub S);

/// Coefficient of `dy¹∧dy²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Form2<S = f64>(pub S);

pub fn hodge_star_0<S: Scalar>(g: &Metric2, t: Form0<S>) -> Form2<S> {
    Form2(t.0 * g.sqrt_det())
}

pub fn hodge_star_2<S: Scalar>(g: &Metric2, s: Form2<S>) -> Form0<S> {
    Form0(s.0 * (1.0 / g.sqrt_det()))
}

pub fn hodge_star_1<S: Scalar>(g: &Metric2, t: Form1<S>) -> Form1<S> {
    let (r1, r2) = g.raise(t.0, t.1);
    let s = g.sqrt_det();
    Form1(-(r2 * s), r1 * s)
}

/// `ext(N)f = f N₁ dy¹ + f N₂ dy²`.
pub fn exterior_product<S: Scalar>(n: Form1<f64>, f: Form0<S>) -> Form1<S> {
    Form1(f.0 * n.0, f.0 * n.1)
}

/// `int(N)μ = N_i g^{ij} μ_j`.
pub fn interior_product<S: Scalar>(g: &Metric2, n: Form1<f64>, mu: Form1<S>) -> Form0<S> {
    let (r1, r2) = g.raise(mu.0, mu.1);
    Form0(r1 * n.0 + r2 * n.1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// Nodes `y_j = j·period/n`, differentiated spectrally.
    Periodic { period: f64, n: usize },
    /// Nodes `y_j = start + j(end-start)/(n-1)`, differentiated by 4th-order differences.
    Bounded { start: f64, end: f64, n: usize },
}

impl Axis {
    pub fn len(&self) -> usize {
        match *self {
            Axis::Periodic { n, .. } | Axis::Bounded { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        match *self {
            Axis::Periodic { period, n } => i as f64 * period / n as f64,
            Axis::Bounded { start, end, n } => start + i as f64 * (end - start) / (n - 1) as f64,
        }
    }

    pub fn scheme(&self) -> DerivativeScheme {
        match self {
            Axis::Periodic { .. } => DerivativeScheme::Spectral,
            Axis::Bounded { .. } => DerivativeScheme::FiniteDifference4,
        }
    }

    fn derivative(&self, line: &[Complex64]) -> Vec<Complex64> {
        match *self {
            Axis::Periodic { period, n } => {
                let mut buf = line.to_vec();
                fft::forward(&mut buf);
                for (m, v) in buf.iter_mut().enumerate() {
                    let k = fft::signed_index(m, n);
                    if n % 2 == 0 && m == n / 2 {
                        *v = Complex64::new(0.0, 0.0);
                    } else {
                        *v *= Complex64::new(0.0, 2.0 * PI * k as f64 / period) / n as f64;
                    }
                }
                fft::inverse(&mut buf);
                buf
            }
            Axis::Bounded { start, end, n } => {
                let d = (end - start) / (n - 1) as f64;
                let f = line;
                let s = 1.0 / (12.0 * d);
                (0..n)
                    .map(|i| {
                        let v = match i {
                            0 => -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4],
                            1 => -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4],
                            i if i == n - 2 => {
                                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
                            }
                            i if i == n - 1 => {
                                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
                            }
                            i => -f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2],
                        };
                        v * s
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeScheme {
    Spectral,
    FiniteDifference4,
}

/// Tensor grid, values stored row-major with index `i1·n2 + i2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    axis1: Axis,
    axis2: Axis,
}

pub const MIN_GRID_NODES: usize = 8;

impl Grid2 {
    pub fn new(axis1: Axis, axis2: Axis) -> Result<Self> {
        for (name, a) in [("y1", &axis1), ("y2", &axis2)] {
            if a.len() < MIN_GRID_NODES {
                return Err(Error::Resolution(format!(
                    "axis {name} has {} nodes, need at least {MIN_GRID_NODES}",
                    a.len()
                )));
            }
        }
        Ok(Self { axis1, axis2 })
    }

    pub fn axis1(&self) -> Axis {
        self.axis1
    }
    pub fn axis2(&self) -> Axis {
        self.axis2
    }

    pub fn len(&self) -> usize {
        self.axis1.len() * self.axis2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, i1: usize, i2: usize) -> (f64, f64) {
        (self.axis1.coord(i1), self.axis2.coord(i2))
    }

    /// Samples `f(y1, y2)` on the grid.
    pub fn sample<S>(&self, f: impl Fn(f64, f64) -> S) -> Vec<S> {
        let mut out = Vec::with_capacity(self.len());
        for i1 in 0..self.axis1.len() {
            for i2 in 0..self.axis2.len() {
                let (y1, y2) = self.coords(i1, i2);
                out.push(f(y1, y2));
            }
        }
        out
    }

    pub fn schemes(&self) -> [DerivativeScheme; 2] {
        [self.axis1.scheme(), self.axis2.scheme()]
    }

    fn check_len(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::Resolution(format!(
                "field has {} samples, grid has {}",
                v.len(),
                self.len()
            )));
        }
        Ok(())
    }

    fn d1(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (n1, n2) = (self.axis1.len(), self.axis2.len());
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n1];
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                line[i1] = v[i1 * n2 + i2];
            }
            for (i1, d) in self.axis1.derivative(&line).into_iter().enumerate() {
                out[i1 * n2 + i2] = d;
            }
        }
        out
    }

    fn d2(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n2 = self.axis2.len();
        v.chunks(n2).flat_map(|row| self.axis2.derivative(row)).collect()
    }
}

/// A metric sampled on every grid node.
#[derive(Debug, Clone)]
pub struct MetricField {
    grid: Grid2,
    values: Vec<Metric2>,
}

impl MetricField {
    /// Samples `(g11, g12, g22)`; a non-positive determinant is reported with its node.
    pub fn from_fn(grid: Grid2, g: impl Fn(f64, f64) -> (f64, f64, f64)) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i1 in 0..grid.axis1.len() {
            for i2 in 0..grid.axis2.len() {
                let (y1, y2) = grid.coords(i1, i2);
                let (a, b, c) = g(y1, y2);
                let m = Metric2::new(a, b, c)
                    .map_err(|e| Error::Domain(format!("at node ({i1}, {i2}) = ({y1}, {y2}): {e}")))?;
                values.push(m);
            }
        }
        Ok(Self { grid, values })
    }

    pub fn flat(grid: Grid2) -> Self {
        Self {
            grid,
            values: vec![Metric2::identity(); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    pub fn at(&self, i1: usize, i2: usize) -> Metric2 {
        self.values[i1 * self.grid.axis2.len() + i2]
    }
}

/// Grid samples together with the differentiation scheme used along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub values: Vec<Complex64>,
    pub schemes: [DerivativeScheme; 2],
}

/// `du = ∂₁u dy¹ + ∂₂u dy²` on the grid.
pub fn exterior_derivative(grid: &Grid2, u: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    grid.check_len(u)?;
    Ok((grid.d1(u), grid.d2(u)))
}

/// `δμ = -|G|^{-1/2}[∂₁(√|G| g^{1j}μ_j) + ∂₂(√|G| g^{2j}μ_j)]`.
pub fn codifferential_1form(metric: &MetricField, mu1: &[Complex64], mu2: &[Complex64]) -> Result<Sampled> {
    let grid = metric.grid;
    grid.check_len(mu1)?;
    grid.check_len(mu2)?;
    let mut f1 = Vec::with_capacity(grid.len());
    let mut f2 = Vec::with_capacity(grid.len());
    for (g, (&a, &b)) in metric.values.iter().zip(mu1.iter().zip(mu2)) {
        let (r1, r2) = g.raise(a, b);
        f1.push(r1 * g.sqrt_det());
        f2.push(r2 * g.sqrt_det());
    }
    let (d1, d2) = (grid.d1(&f1), grid.d2(&f2));
    let values = metric
        .values
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(g, (&x, &y))| -(x + y) / g.sqrt_det())
        .collect();
    Ok(Sampled {
        values,
        schemes: grid.schemes(),
    })
}

/// `δ(q du)`; `q = None` means `q ≡ 1`.
pub fn laplace_beltrami(metric: &MetricField, q: Option<&[Complex64]>, u: &[Complex64]) -> Result<Sampled> {
    let (mut m1, mut m2) = exterior_derivative(&metric.grid, u)?;
    if let Some(q) = q {
        metric.grid.check_len(q)?;
        for ((a, b), &c) in m1.iter_mut().zip(m2.iter_mut()).zip(q) {
            *a *= c;
            *b *= c;
        }
    }
    codifferential_1form(metric, &m1, &m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn star_examples() {
        assert_eq!(hodge_star_0(&Metric2::identity(), Form0(3.0)), Form2(3.0));
        let layer = Metric2::diagonal(0.01, 1.05f64.powi(2)).unwrap();
        assert!((hodge_star_0(&layer, Form0(1.0)).0 - 0.105).abs() < 1e-15);
        assert_eq!(
            hodge_star_0(&Metric2::diagonal(4.0, 9.0).unwrap(), Form0(2.0)),
            Form2(12.0)
        );

        assert_eq!(hodge_star_1(&Metric2::identity(), Form1(1.0, 0.0)), Form1(-0.0, 1.0));
        let twice = hodge_star_1(
            &Metric2::identity(),
            hodge_star_1(&Metric2::identity(), Form1(2.0, -5.0)),
        );
        assert_eq!(twice, Form1(-2.0, 5.0));
        let s = hodge_star_1(&Metric2::diagonal(4.0, 1.0).unwrap(), Form1(1.0, 0.0));
        assert!(s.0.abs() < 1e-16 && (s.1 - 0.5).abs() < 1e-16);
    }

    #[test]
    fn non_positive_metric_rejected() {
        assert!(matches!(Metric2::new(1.0, 2.0, 1.0), Err(Error::Domain(_))));
        let grid = Grid2::new(
            Axis::Bounded {
                start: -1.0,
                end: 1.0,
                n: 9,
            },
            Axis::Periodic { period: 1.0, n: 8 },
        )
        .unwrap();
        let err = MetricField::from_fn(grid, |y1, _| (y1, 0.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("node (0, 0)"), "{err}");
    }

    #[test]
    fn product_formulas() {
        let g = Metric2::new(2.0, 0.5, 3.0).unwrap();
        assert_eq!(exterior_product(Form1(1.0, -2.0), Form0(3.0)), Form1(3.0, -6.0));
        let (a, b, d) = g.inverse();
        let expect = 1.0 * (4.0 * a + 5.0 * b) + 2.0 * (4.0 * b + 5.0 * d);
        assert!((interior_product(&g, Form1(1.0, 2.0), Form1(4.0, 5.0)).0 - expect).abs() < 1e-14);
    }

    #[test]
    fn coarse_grid_rejected() {
        let e = Grid2::new(
            Axis::Periodic { period: 1.0, n: 7 },
            Axis::Periodic { period: 1.0, n: 8 },
        );
        assert!(matches!(e, Err(Error::Resolution(_))));
    }

    #[test]
    fn flat_codifferential_of_dx2() {
        let grid = Grid2::new(
            Axis::Bounded {
                start: -1.0,
                end: 1.0,
                n: 17,
            },
            Axis::Bounded {
                start: -1.0,
                end: 1.0,
                n: 17,
            },
        )
        .unwrap();
        let m = MetricField::flat(grid);
        let mu1 = grid.sample(|x, _| c(2.0 * x));
        let zero = vec![c(0.0); grid.len()];
        let a = codifferential_1form(&m, &mu1, &zero).unwrap();
        assert!(a.values.iter().all(|v| (v - c(-2.0)).norm() < 1e-12));
        assert_eq!(a.schemes, [DerivativeScheme::FiniteDifference4; 2]);
        let z = codifferential_1form(&m, &zero, &zero).unwrap();
        assert!(z.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn flat_laplacian_sign() {
        let tau = 2.0 * PI;
        let grid = Grid2::new(
            Axis::Periodic { period: tau, n: 32 },
            Axis::Periodic { period: tau, n: 32 },
        )
        .unwrap();
        let m = MetricField::flat(grid);
        let u = grid.sample(|x, y| c(x.sin() * y.sin()));
        let r = laplace_beltrami(&m, None, &u).unwrap();
        for (v, w) in r.values.iter().zip(&u) {
            assert!((v - 2.0 * w).norm() < 1e-12);
        }
        let k = grid.sample(|_, _| c(4.0));
        let r = laplace_beltrami(&m, None, &k).unwrap();
        assert!(r.values.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn flat_laplacian_band_limited() {
        let tau = 2.0 * PI;
        let grid = Grid2::new(
            Axis::Periodic { period: tau, n: 24 },
            Axis::Periodic { period: tau, n: 16 },
        )
        .unwrap();
        let m = MetricField::flat(grid);
        let u = grid.sample(|x, y| c((3.0 * x).cos() * (2.0 * y).sin() + 0.5 * (x + 5.0 * y).cos()));
        let q = grid.sample(|_, _| c(2.0));
        let r = laplace_beltrami(&m, Some(&q), &u).unwrap();
        let lap = grid.sample(|x, y| c(-13.0 * (3.0 * x).cos() * (2.0 * y).sin() - 13.0 * (x + 5.0 * y).cos()));
        for (v, l) in r.values.iter().zip(&lap) {
            assert!((v + 2.0 * l).norm() < 1e-8);
        }
    }

    #[test]
    fn layer_codifferential_of_d_eta() {
        // u = η on the unit-circle layer: δdu = -(1/(h(1+hη))) ∂_η((1+hη)/h).
        let h = 0.1;
        let grid = Grid2::new(
            Axis::Bounded {
                start: 0.0,
                end: 1.0,
                n: 11,
            },
            Axis::Periodic {
                period: 2.0 * PI,
                n: 16,
            },
        )
        .unwrap();
        let m = MetricField::from_fn(grid, |eta, _| (h * h, 0.0, (1.0 + h * eta).powi(2))).unwrap();
        let u = grid.sample(|eta, _| c(eta));
        let r = laplace_beltrami(&m, None, &u).unwrap();
        let expect = grid.sample(|eta, _| c(-1.0 / (h * (1.0 + h * eta))));
        for (v, e) in r.values.iter().zip(&expect) {
            assert!((v - e).norm() < 1e-8);
        }
    }

    fn arb_metric() -> impl Strategy<Value = Metric2> {
        (0.1..5.0f64, -1.0..1.0f64, 0.1..5.0f64).prop_map(|(a, t, d)| {
            let b = t * (a * d).sqrt() * 0.95;
            Metric2::new(a, b, d).unwrap()
        })
    }

    proptest! {
        #[test]
        fn star_squared(g in arb_metric(), t in -10.0..10.0f64, t1 in -10.0..10.0f64, t2 in -10.0..10.0f64) {
            let back = hodge_star_2(&g, hodge_star_0(&g, Form0(t))).0;
            prop_assert!((back - t).abs() <= 1e-12 * t.abs().max(1.0));
            let s = hodge_star_1(&g, hodge_star_1(&g, Form1(t1, t2)));
            prop_assert!((s.0 + t1).abs() <= 1e-12 * t1.abs().max(1.0) * 10.0);
            prop_assert!((s.1 + t2).abs() <= 1e-12 * t2.abs().max(1.0) * 10.0);
        }
    }
}
