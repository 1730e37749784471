//! Periodic functions on the boundary torus `R/LZ`, stored as truncated Fourier series
//! `f(θ) = Σ_{|k|≤M} f̂_k e^{i 2πkθ/L}`.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Relative tolerance on the mean of data fed to `solve_neg_d2`.
pub const NEG_D2_MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductPolicy {
    /// Output bandwidth is the sum of the input bandwidths; nothing is lost.
    ExactExpand,
    TruncateTo(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction {
    period: f64,
    modes: usize,
    coeffs: Vec<Complex64>,
}

fn same_period(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

impl TorusFunction {
    pub fn zeros(period: f64, modes: usize) -> Self {
        assert!(period > 0.0, "period must be positive");
        Self {
            period,
            modes,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * modes + 1],
        }
    }

    pub fn constant(period: f64, modes: usize, c: Complex64) -> Self {
        let mut f = Self::zeros(period, modes);
        f.coeffs[modes] = c;
        f
    }

    /// Builds `Σ c e^{ikθ}` from explicit `(k, c)` pairs.
    ///
    /// Panics if some `|k|` exceeds `modes`.
    pub fn from_modes(period: f64, modes: usize, pairs: &[(i64, Complex64)]) -> Self {
        let mut f = Self::zeros(period, modes);
        for &(k, c) in pairs {
            assert!(k.unsigned_abs() as usize <= modes, "mode {k} exceeds M = {modes}");
            f.coeffs[(k + modes as i64) as usize] += c;
        }
        f
    }

    /// Real-valued completion: each pair `(k ≥ 0, c)` contributes `Re(c e^{ikθ})`.
    pub fn real_from_modes(period: f64, modes: usize, pairs: &[(u32, Complex64)]) -> Self {
        let mut f = Self::zeros(period, modes);
        for &(k, c) in pairs {
            let k = k as i64;
            assert!(k as usize <= modes, "mode {k} exceeds M = {modes}");
            if k == 0 {
                f.coeffs[modes] += Complex64::new(c.re, 0.0);
            } else {
                f.coeffs[(modes as i64 + k) as usize] += c * 0.5;
                f.coeffs[(modes as i64 - k) as usize] += c.conj() * 0.5;
            }
        }
        f
    }

    /// Fourier coefficients from samples at `θ_j = jL/n`. Requires `n > 2·modes`.
    pub fn from_samples(period: f64, samples: &[Complex64], modes: usize) -> Self {
        let n = samples.len();
        assert!(n > 2 * modes, "{n} samples cannot resolve {modes} modes");
        let mut buf = samples.to_vec();
        fft::forward(&mut buf);
        let mut f = Self::zeros(period, modes);
        let scale = 1.0 / n as f64;
        for k in -(modes as i64)..=modes as i64 {
            f.coeffs[(k + modes as i64) as usize] = buf[k.rem_euclid(n as i64) as usize] * scale;
        }
        f
    }

    pub fn from_real_samples(period: f64, samples: &[f64], modes: usize) -> Self {
        let s: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_samples(period, &s, modes)
    }

    /// Values at `θ_j = jL/n`. Modes above `n/2` alias onto the grid.
    pub fn to_samples(&self, n: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.iter() {
            buf[k.rem_euclid(n as i64) as usize] += c;
        }
        fft::inverse(&mut buf);
        buf
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Angular frequency `2πk/L` of mode `k`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.modes {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.modes as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, c: Complex64) {
        assert!(
            k.unsigned_abs() as usize <= self.modes,
            "mode {k} exceeds M = {}",
            self.modes
        );
        self.coeffs[(k + self.modes as i64) as usize] = c;
    }

    /// `(k, f̂_k)` for `k = -M..=M`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.modes as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - m, c))
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, self.wavenumber(k) * theta))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `∂_θ^n`, coefficient-wise multiplication by `(i 2πk/L)^n`.
    pub fn diff(&self, n: u32) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let w = Complex64::new(0.0, self.wavenumber(i as i64 - self.modes as i64));
            *c *= w.powu(n);
        }
        out
    }

    pub fn multiply(&self, other: &Self, policy: ProductPolicy) -> Self {
        assert!(same_period(self.period, other.period), "period mismatch");
        let out_modes = match policy {
            ProductPolicy::ExactExpand => self.modes + other.modes,
            ProductPolicy::TruncateTo(m) => m,
        };
        let mut out = Self::zeros(self.period, out_modes);
        let om = out_modes as i64;
        for (k, a) in self.iter() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            for (j, b) in other.iter() {
                let s = k + j;
                if s.abs() <= om {
                    out.coeffs[(s + om) as usize] += a * b;
                }
            }
        }
        out
    }

    /// Zero-pads or cuts to `modes`, returning the discarded energy `Σ_{|k|>modes} |f̂_k|²`.
    pub fn truncated(&self, modes: usize) -> (Self, f64) {
        let mut out = Self::zeros(self.period, modes);
        let mut tail = 0.0;
        for (k, c) in self.iter() {
            if k.unsigned_abs() as usize <= modes {
                out.coeffs[(k + modes as i64) as usize] = c;
            } else {
                tail += c.norm_sqr();
            }
        }
        (out, tail)
    }

    pub fn resized(&self, modes: usize) -> Self {
        self.truncated(modes).0
    }

    /// The zero-mean solution of `-∂²_θ u = f`.
    pub fn solve_neg_d2(&self) -> Result<Self> {
        let tol = NEG_D2_MEAN_TOL * self.coeff_norm();
        let mean = self.mean().norm();
        if mean > tol {
            return Err(Error::Compatibility {
                context: "inversion of -d2/dθ2".into(),
                mean,
                tolerance: tol,
            });
        }
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let k = i as i64 - self.modes as i64;
            if k == 0 {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c /= self.wavenumber(k).powi(2);
            }
        }
        Ok(out)
    }

    /// `(Σ (1+k²)^s |f̂_k|²)^{1/2}` with the integer mode index `k`, whatever the period.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.iter()
            .map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The average `f̂_0 = (1/L)∫ f`.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[self.modes]
    }

    pub fn integral(&self) -> Complex64 {
        self.mean() * self.period
    }

    /// `‖f‖_{L²(T)} = (L Σ|f̂_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.period * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ|f̂_k|`, an upper bound for the sup norm.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        (1..=self.modes as i64).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
            && self.mean().im.abs() <= tol
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zeros(self.period, self.modes);
        for (k, c) in self.iter() {
            out.set_coeff(-k, c.conj());
        }
        out
    }

    pub fn add_constant(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[self.modes] += c;
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            period: self.period,
            modes: self.modes,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(same_period(self.period, other.period), "period mismatch");
        let modes = self.modes.max(other.modes);
        let m = modes as i64;
        Self {
            period: self.period,
            modes,
            coeffs: (-m..=m).map(|k| f(self.coeff(k), other.coeff(k))).collect(),
        }
    }
}

impl Add for &TorusFunction {
    type Output = TorusFunction;
    fn add(self, rhs: Self) -> TorusFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TorusFunction {
    type Output = TorusFunction;
    fn sub(self, rhs: Self) -> TorusFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for TorusFunction {
    type Output = TorusFunction;
    fn add(self, rhs: Self) -> TorusFunction {
        &self + &rhs
    }
}

impl Sub for TorusFunction {
    type Output = TorusFunction;
    fn sub(self, rhs: Self) -> TorusFunction {
        &self - &rhs
    }
}

impl AddAssign<&TorusFunction> for TorusFunction {
    fn add_assign(&mut self, rhs: &TorusFunction) {
        if rhs.modes <= self.modes {
            assert!(same_period(self.period, rhs.period), "period mismatch");
            for (k, c) in rhs.iter() {
                self.coeffs[(k + self.modes as i64) as usize] += c;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&TorusFunction> for TorusFunction {
    fn sub_assign(&mut self, rhs: &TorusFunction) {
        *self += &(-rhs);
    }
}

impl Neg for &TorusFunction {
    type Output = TorusFunction;
    fn neg(self) -> TorusFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &TorusFunction {
    type Output = TorusFunction;
    fn mul(self, rhs: Complex64) -> TorusFunction {
        self.scale(rhs)
    }
}

impl Mul<f64> for &TorusFunction {
    type Output = TorusFunction;
    fn mul(self, rhs: f64) -> TorusFunction {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TAU: f64 = 2.0 * PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &TorusFunction, b: &TorusFunction, tol: f64) -> bool {
        (a - b).max_abs_coeff() <= tol
    }

    #[test]
    fn diff_examples() {
        let sin = TorusFunction::from_modes(TAU, 4, &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))]);
        let cos = TorusFunction::real_from_modes(TAU, 4, &[(1, c(1.0, 0.0))]);
        assert!(close(&sin.diff(1), &cos, 1e-15));
        let k = TorusFunction::constant(TAU, 4, c(3.0, 1.0));
        assert!(k.diff(1).is_zero() && k.diff(3).is_zero());
        let e3 = TorusFunction::from_modes(TAU, 4, &[(3, c(1.0, 0.0))]);
        assert!(close(&e3.diff(2), &e3.scale(c(-9.0, 0.0)), 1e-13));
    }

    #[test]
    fn diff_uses_period() {
        let f = TorusFunction::from_modes(4.0 * PI, 2, &[(1, c(1.0, 0.0))]);
        assert!((f.diff(1).coeff(1) - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn multiply_examples() {
        let one = TorusFunction::constant(TAU, 0, c(1.0, 0.0));
        let f = TorusFunction::real_from_modes(TAU, 1, &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]);
        assert!(close(&f.multiply(&one, ProductPolicy::ExactExpand), &f, 0.0));

        let cos = TorusFunction::real_from_modes(TAU, 1, &[(1, c(1.0, 0.0))]);
        let sq = cos.multiply(&cos, ProductPolicy::ExactExpand);
        let expect = TorusFunction::real_from_modes(TAU, 2, &[(0, c(0.5, 0.0)), (2, c(0.5, 0.0))]);
        assert!(close(&sq, &expect, 1e-16));

        let e1 = TorusFunction::from_modes(TAU, 1, &[(1, c(1.0, 0.0))]);
        let e2 = TorusFunction::from_modes(TAU, 2, &[(2, c(1.0, 0.0))]);
        assert!(e1.multiply(&e2, ProductPolicy::TruncateTo(2)).is_zero());
    }

    #[test]
    fn solve_neg_d2_examples() {
        let cos2 = TorusFunction::real_from_modes(TAU, 3, &[(2, c(1.0, 0.0))]);
        let u = cos2.solve_neg_d2().unwrap();
        assert!(close(&u, &cos2.scale(c(0.25, 0.0)), 1e-16));
        let cos1 = TorusFunction::real_from_modes(TAU, 3, &[(1, c(1.0, 0.0))]);
        assert!(close(&cos1.solve_neg_d2().unwrap(), &cos1, 1e-15));
        let one = TorusFunction::constant(TAU, 3, c(1.0, 0.0));
        match one.solve_neg_d2() {
            Err(Error::Compatibility { mean, .. }) => assert_eq!(mean, 1.0),
            other => panic!("expected compatibility error, got {other:?}"),
        }
    }

    #[test]
    fn sobolev_examples() {
        let one = TorusFunction::constant(TAU, 2, c(1.0, 0.0));
        assert_eq!(one.sobolev_norm(3.7), 1.0);
        let e1 = TorusFunction::from_modes(TAU, 2, &[(1, c(1.0, 0.0))]);
        assert!((e1.sobolev_norm(1.0) - 2f64.sqrt()).abs() < 1e-15);
        let e2 = TorusFunction::from_modes(TAU, 2, &[(2, c(1.0, 0.0))]);
        assert!((e2.sobolev_norm(0.5) - 5f64.powf(0.25)).abs() < 1e-15);
        // integer index even when the period is not 2π
        let e2l = TorusFunction::from_modes(3.0, 2, &[(2, c(1.0, 0.0))]);
        assert_eq!(e2l.sobolev_norm(0.5), e2.sobolev_norm(0.5));
    }

    #[test]
    fn samples_round_trip() {
        let f = TorusFunction::from_modes(5.0, 3, &[(-3, c(0.2, 0.1)), (1, c(1.0, -2.0)), (0, c(0.5, 0.0))]);
        let s = f.to_samples(16);
        for (j, v) in s.iter().enumerate() {
            assert!((v - f.eval(j as f64 * 5.0 / 16.0)).norm() < 1e-13);
        }
        assert!(close(&TorusFunction::from_samples(5.0, &s, 3), &f, 1e-15));
    }

    #[test]
    fn real_completion_is_real() {
        let f = TorusFunction::real_from_modes(TAU, 4, &[(1, c(1.0, 0.0)), (3, c(0.3, 0.2))]);
        assert!(f.is_real(1e-14));
        for v in f.to_samples(16) {
            assert!(v.im.abs() < 1e-15);
        }
    }

    fn arb_function(modes: usize) -> impl Strategy<Value = TorusFunction> {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * modes + 1).prop_map(move |v| {
            let pairs: Vec<(i64, Complex64)> = v
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| (i as i64 - modes as i64, c(a, b)))
                .collect();
            TorusFunction::from_modes(TAU, modes, &pairs)
        })
    }

    proptest! {
        #[test]
        fn neg_d2_round_trip(f in arb_function(8)) {
            let mut g = f.clone();
            g.set_coeff(0, c(0.0, 0.0));
            let u = g.solve_neg_d2().unwrap();
            let back = -&u.diff(2);
            prop_assert!(close(&back, &g, 1e-14));
        }

        #[test]
        fn parseval(f in arb_function(6)) {
            let n = 4 * f.modes();
            let quad: f64 = f.to_samples(n).iter().map(|v| v.norm_sqr()).sum::<f64>() * f.period() / n as f64;
            prop_assert!((quad.sqrt() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm().max(1.0));
        }

        #[test]
        fn product_associative(a in arb_function(3), b in arb_function(4), d in arb_function(2)) {
            let p = ProductPolicy::ExactExpand;
            let left = a.multiply(&b, p).multiply(&d, p);
            let right = a.multiply(&b.multiply(&d, p), p);
            prop_assert!(close(&left, &right, 1e-13));
        }

        #[test]
        fn product_commutative(a in arb_function(3), b in arb_function(5)) {
            let p = ProductPolicy::ExactExpand;
            prop_assert!(close(&a.multiply(&b, p), &b.multiply(&a, p), 1e-15));
        }
    }
}
