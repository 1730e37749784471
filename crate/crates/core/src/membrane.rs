//! Functions on the cylinder `[0,1] × T` that are polynomials in `η` with periodic
//! coefficients, the rescaled membrane Laplacian cascade, and the thin-layer norms.

use crate::error::{Error, Result};
use crate::geometry::LayerGeometry;
use crate::torus::{ProductPolicy, TorusFunction};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use std::num::NonZeroUsize;
use std::ops::{Add, Neg, Sub};

pub const DEFAULT_ETA_NODES: usize = 32;
pub const GAUGE_TOL: f64 = 1e-10;

/// `F(η,θ) = Σ_j F_j(θ) η^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembraneField {
    coeffs: Vec<TorusFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

impl MembraneField {
    pub fn zeros(period: f64, modes: usize) -> Self {
        Self {
            coeffs: vec![TorusFunction::zeros(period, modes)],
        }
    }

    /// Trailing coefficients that are exactly zero are dropped.
    pub fn from_coeffs(coeffs: Vec<TorusFunction>) -> Self {
        assert!(!coeffs.is_empty(), "a membrane field needs at least one coefficient");
        let mut f = Self { coeffs };
        f.trim();
        f
    }

    pub fn eta_constant(f: TorusFunction) -> Self {
        Self { coeffs: vec![f] }
    }

    /// `f(θ) η^j`.
    pub fn monomial(j: usize, f: TorusFunction) -> Self {
        let zero = TorusFunction::zeros(f.period(), f.modes());
        let mut coeffs = vec![zero; j];
        coeffs.push(f);
        Self::from_coeffs(coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(TorusFunction::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[TorusFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Option<&TorusFunction> {
        self.coeffs.get(j)
    }

    pub fn period(&self) -> f64 {
        self.coeffs[0].period()
    }

    pub fn modes(&self) -> usize {
        self.coeffs.iter().map(TorusFunction::modes).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TorusFunction::is_zero)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(TorusFunction::max_abs_coeff).fold(0.0, f64::max)
    }

    pub fn eta_diff(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(self.period(), self.modes());
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(j, c)| c * (j + 1) as f64)
                .collect(),
        )
    }

    pub fn theta_diff(&self, n: u32) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.diff(n)).collect())
    }

    /// `G(s) = ∫_a^s F dη`, so `G(a) = 0` and `∂_η G = F`.
    pub fn eta_antiderivative_from(&self, a: Endpoint) -> Self {
        let zero = TorusFunction::zeros(self.period(), self.modes());
        let mut coeffs = vec![zero];
        coeffs.extend(self.coeffs.iter().enumerate().map(|(j, c)| c * (1.0 / (j + 1) as f64)));
        let mut g = Self::from_coeffs(coeffs);
        if a == Endpoint::One {
            let at_one = g.eval_eta(1.0);
            g.coeffs[0] -= &at_one;
        }
        g
    }

    pub fn mul_eta_pow(&self, p: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let zero = TorusFunction::zeros(self.period(), self.modes());
        let mut coeffs = vec![zero; p];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }

    pub fn mul_torus(&self, f: &TorusFunction, policy: ProductPolicy) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.multiply(f, policy)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|f| f.scale(c)).collect())
    }

    pub fn add_eta_constant(&self, f: &TorusFunction) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += f;
        out
    }

    pub fn eval_eta(&self, eta: f64) -> TorusFunction {
        let mut acc = TorusFunction::zeros(self.period(), self.modes());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * eta) + c;
        }
        acc
    }

    pub fn eval(&self, eta: f64, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * eta + c.eval(theta))
    }

    /// `∫₀¹ F dη`.
    pub fn integral_01(&self) -> TorusFunction {
        let mut acc = TorusFunction::zeros(self.period(), self.modes());
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += &(c * (1.0 / (j + 1) as f64));
        }
        acc
    }

    /// Truncates every coefficient to `modes`, returning the discarded energy.
    pub fn truncated(&self, modes: usize) -> (Self, f64) {
        let mut tail = 0.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let (t, e) = c.truncated(modes);
                tail += e;
                t
            })
            .collect();
        (Self::from_coeffs(coeffs), tail)
    }

    pub fn norms(&self, geom: &LayerGeometry, quad: &LayerQuadrature) -> LayerNorms {
        let d = self.eta_diff();
        layer_norms(geom, quad, self.modes(), |eta| (self.eval_eta(eta), d.eval_eta(eta)))
    }

    pub fn l2g_norm(&self, geom: &LayerGeometry) -> f64 {
        self.norms(
            geom,
            &LayerQuadrature::for_modes(self.modes().max(geom.curve().modes())),
        )
        .l2
    }

    /// `‖F‖_{L²_g} + ‖dF‖_{L²_g}`.
    pub fn h1g_norm(&self, geom: &LayerGeometry) -> f64 {
        self.norms(
            geom,
            &LayerQuadrature::for_modes(self.modes().max(geom.curve().modes())),
        )
        .h1()
    }

    /// `‖F‖_{L²_g} / ‖dF‖_{L²_g}` for a field whose trace at `η = 0` has zero mean.
    pub fn poincare_check(&self, geom: &LayerGeometry) -> Result<f64> {
        let trace = self.eval_eta(0.0);
        let mean = trace.integral().norm();
        let tol = GAUGE_TOL * trace.coeff_norm().max(1.0);
        if mean > tol {
            return Err(Error::Compatibility {
                context: "trace at η = 0 in the Poincaré check".into(),
                mean,
                tolerance: tol,
            });
        }
        let n = self.norms(
            geom,
            &LayerQuadrature::for_modes(self.modes().max(geom.curve().modes())),
        );
        Ok(n.l2 / n.grad)
    }
}

impl Add for &MembraneField {
    type Output = MembraneField;
    fn add(self, rhs: Self) -> MembraneField {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = TorusFunction::zeros(self.period(), 0);
        MembraneField::from_coeffs(
            (0..n)
                .map(|j| self.coeffs.get(j).unwrap_or(&zero) + rhs.coeffs.get(j).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &MembraneField {
    type Output = MembraneField;
    fn sub(self, rhs: Self) -> MembraneField {
        self + &(-rhs)
    }
}

impl Neg for &MembraneField {
    type Output = MembraneField;
    fn neg(self) -> MembraneField {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// `κ`, its powers and `κ'`, precomputed for the cascade.
#[derive(Debug, Clone)]
pub struct CurvatureTerms {
    pub kappa: TorusFunction,
    pub kappa2: TorusFunction,
    pub kappa3: TorusFunction,
    pub dkappa: TorusFunction,
}

impl CurvatureTerms {
    pub fn new(kappa: &TorusFunction) -> Self {
        let p = ProductPolicy::ExactExpand;
        let kappa2 = kappa.multiply(kappa, p);
        let kappa3 = kappa2.multiply(kappa, p);
        Self {
            kappa: kappa.clone(),
            kappa2,
            kappa3,
            dkappa: kappa.diff(1),
        }
    }
}

/// A cascade coefficient and the sum of the sup-bounds of its individual contributions.
#[derive(Debug, Clone)]
pub struct CascadeParts {
    pub total: MembraneField,
    pub scale: f64,
}

impl CascadeParts {
    /// `‖total‖ / scale`, zero when every contribution vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.total.max_abs_coeff() / self.scale
        }
    }
}

/// `R_m`: the coefficient of `h^m` in `h²(1+hηκ)³Δ` except for `∂²_η T_m`, namely
/// `κ(3η∂²_η + ∂_η)T_{m-1} + (3η²κ²∂²_η + 2ηκ²∂_η + ∂²_θ)T_{m-2}
///  + (η³κ³∂²_η + η²κ³∂_η + ηκ∂²_θ - ηκ'∂_θ)T_{m-3}`.
///
/// `terms(k)` returning `None` means `T_k = 0`.
pub fn cascade_source<'a>(
    terms: impl Fn(i64) -> Option<&'a MembraneField>,
    curv: &CurvatureTerms,
    m: i64,
) -> CascadeParts {
    let p = ProductPolicy::ExactExpand;
    let mut parts: Vec<MembraneField> = Vec::new();
    if let Some(t) = terms(m - 1) {
        let (d1, d2) = (t.eta_diff(), t.eta_diff().eta_diff());
        parts.push(
            d2.mul_eta_pow(1)
                .mul_torus(&curv.kappa, p)
                .scale(Complex64::new(3.0, 0.0)),
        );
        parts.push(d1.mul_torus(&curv.kappa, p));
    }
    if let Some(t) = terms(m - 2) {
        let (d1, d2) = (t.eta_diff(), t.eta_diff().eta_diff());
        parts.push(
            d2.mul_eta_pow(2)
                .mul_torus(&curv.kappa2, p)
                .scale(Complex64::new(3.0, 0.0)),
        );
        parts.push(
            d1.mul_eta_pow(1)
                .mul_torus(&curv.kappa2, p)
                .scale(Complex64::new(2.0, 0.0)),
        );
        parts.push(t.theta_diff(2));
    }
    if let Some(t) = terms(m - 3) {
        let (d1, d2) = (t.eta_diff(), t.eta_diff().eta_diff());
        parts.push(d2.mul_eta_pow(3).mul_torus(&curv.kappa3, p));
        parts.push(d1.mul_eta_pow(2).mul_torus(&curv.kappa3, p));
        parts.push(t.theta_diff(2).mul_eta_pow(1).mul_torus(&curv.kappa, p));
        parts.push(-&t.theta_diff(1).mul_eta_pow(1).mul_torus(&curv.dkappa, p));
    }
    sum_parts(parts, curv.kappa.period())
}

/// `ρ_m = ∂²_η T_m + R_m`; a valid expansion has `ρ_m ≡ 0`.
pub fn cascade_coefficient<'a>(
    terms: impl Fn(i64) -> Option<&'a MembraneField> + Copy,
    curv: &CurvatureTerms,
    m: i64,
) -> CascadeParts {
    let source = cascade_source(terms, curv, m);
    match terms(m) {
        Some(t) => {
            let lead = t.eta_diff().eta_diff();
            let scale = source.scale + lead.max_abs_coeff();
            CascadeParts {
                total: &lead + &source.total,
                scale,
            }
        }
        None => source,
    }
}

fn sum_parts(parts: Vec<MembraneField>, period: f64) -> CascadeParts {
    let scale = parts.iter().map(MembraneField::max_abs_coeff).sum();
    let total = parts
        .into_iter()
        .reduce(|a, b| &a + &b)
        .unwrap_or_else(|| MembraneField::zeros(period, 0));
    CascadeParts { total, scale }
}

/// Tensor quadrature on the cylinder: Gauss–Legendre in `η`, trapezoid in `θ`.
#[derive(Debug, Clone)]
pub struct LayerQuadrature {
    eta: Vec<(f64, f64)>,
    n_theta: usize,
}

impl LayerQuadrature {
    pub fn new(eta_nodes: usize, n_theta: usize) -> Self {
        let degree = NonZeroUsize::new(eta_nodes.max(1)).expect("nonzero");
        let rule = GaussLegendre::new(degree);
        let eta = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Self {
            eta,
            n_theta: n_theta.max(16),
        }
    }

    /// 32 Gauss–Legendre nodes and a `4M` trapezoid grid.
    pub fn for_modes(modes: usize) -> Self {
        Self::new(DEFAULT_ETA_NODES, 4 * modes)
    }

    pub fn eta_nodes(&self) -> &[(f64, f64)] {
        &self.eta
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerNorms {
    /// `(∫∫ h(1+hηκ)|F|²)^{1/2}`.
    pub l2: f64,
    /// `(∫∫ (1+hηκ)/h |∂_ηF|² + h/(1+hηκ) |∂_θF|²)^{1/2}`.
    pub grad: f64,
}

impl LayerNorms {
    /// Sum of the two norms.
    pub fn h1(&self) -> f64 {
        self.l2 + self.grad
    }
}

/// Thin-layer norms of a field given through `η ↦ (F(η,·), ∂_ηF(η,·))`.
pub fn layer_norms(
    geom: &LayerGeometry,
    quad: &LayerQuadrature,
    modes: usize,
    field: impl Fn(f64) -> (TorusFunction, TorusFunction),
) -> LayerNorms {
    let n = quad.n_theta.max(4 * modes.max(geom.curve().modes()));
    let h = geom.h();
    let kappa: Vec<f64> = geom.curve().kappa().to_samples(n).iter().map(|v| v.re).collect();
    let dtheta = geom.curve().period() / n as f64;
    let (mut l2, mut grad) = (0.0, 0.0);
    for &(eta, w) in &quad.eta {
        let (f, df) = field(eta);
        let fs = f.to_samples(n);
        let ts = f.diff(1).to_samples(n);
        let es = df.to_samples(n);
        for j in 0..n {
            let s = 1.0 + h * eta * kappa[j];
            l2 += w * h * s * fs[j].norm_sqr();
            grad += w * (s / h * es[j].norm_sqr() + h / s * ts[j].norm_sqr());
        }
    }
    LayerNorms {
        l2: (l2 * dtheta).sqrt(),
        grad: (grad * dtheta).sqrt(),
    }
}
