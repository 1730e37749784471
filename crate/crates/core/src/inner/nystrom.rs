//! Interior Cauchy-integral discretization on `K` nodes uniform in arc length.
//!
//! A real density `μ` defines `F(z) = (1/2πi)∮ μ(ζ)/(ζ - z) dζ`, analytic inside, and
//! `u = Re F` is harmonic. With singularity subtraction the interior boundary limit is
//! `F⁻(ζ_i) = μ_i + (1/2πi)[Σ_{j≠i} (μ_j - μ_i) ζ'_j w/(ζ_j - ζ_i) + w μ'_i]`, `w = L/K`,
//! which is spectrally accurate on smooth curves. `Re F⁻ = Aμ` gives Dirichlet data,
//! `Im F⁻` is the conjugate harmonic trace and `∂_n u = ∂_t Im F⁻` by Cauchy–Riemann.

use super::{InnerNorms, Repr};
use crate::error::{Error, Result};
use crate::fft;
use crate::geometry::BoundaryCurve;
use crate::torus::TorusFunction;
use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::Arc;

const RADIAL_NODES: usize = 32;

#[derive(Debug)]
pub struct NystromOperator {
    nodes: usize,
    period: f64,
    points: Vec<Complex64>,
    tangents: Vec<Complex64>,
    centroid: Complex64,
    a_lu: LU<f64, Dyn, Dyn>,
    im_c: DMatrix<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    /// Dirichlet-to-Neumann map `Λ = D₁ Im C A⁻¹`.
    dtn: DMatrix<f64>,
}

/// Spectral derivative matrix on `n` periodic nodes. The Nyquist mode is dropped for odd
/// orders and kept for even ones.
fn spectral_matrix(n: usize, period: f64, order: u32) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        buf[j] = Complex64::new(1.0, 0.0);
        fft::forward(&mut buf);
        for (b, v) in buf.iter_mut().enumerate() {
            let k = fft::signed_index(b, n);
            let factor = if n.is_multiple_of(2) && b == n / 2 && order % 2 == 1 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * PI * k as f64 / period).powu(order)
            };
            *v *= factor / n as f64;
        }
        fft::inverse(&mut buf);
        for i in 0..n {
            m[(i, j)] = buf[i].re;
        }
    }
    m
}

fn split(v: &[Complex64]) -> (DVector<f64>, DVector<f64>) {
    (
        DVector::from_iterator(v.len(), v.iter().map(|c| c.re)),
        DVector::from_iterator(v.len(), v.iter().map(|c| c.im)),
    )
}

fn join(re: &DVector<f64>, im: &DVector<f64>) -> Vec<Complex64> {
    re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

/// Applies a real matrix to a complex vector.
fn real_apply(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let (re, im) = split(v);
    join(&(m * re), &(m * im))
}

impl NystromOperator {
    pub fn new(curve: &BoundaryCurve, nodes: usize) -> Result<Self> {
        if nodes < 16 || nodes % 2 == 1 {
            return Err(Error::Resolution(format!(
                "Nyström discretization needs an even node count ≥ 16, got {nodes}"
            )));
        }
        let k = nodes;
        let period = curve.period();
        let w = period / k as f64;
        let s = curve.samples(k);
        let points: Vec<Complex64> = s.points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let tangents: Vec<Complex64> = s.tangents.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let d1 = spectral_matrix(k, period, 1);
        let d2 = spectral_matrix(k, period, 2);

        let coef = Complex64::new(0.0, -w / (2.0 * PI));
        let mut c = DMatrix::<Complex64>::zeros(k, k);
        for i in 0..k {
            let mut diag = Complex64::new(1.0, 0.0);
            for j in 0..k {
                if j != i {
                    let v = coef * tangents[j] / (points[j] - points[i]);
                    c[(i, j)] = v;
                    diag -= v;
                }
            }
            c[(i, i)] = diag;
            for j in 0..k {
                c[(i, j)] += coef * d1[(i, j)];
            }
        }
        let a = c.map(|v| v.re);
        let im_c = c.map(|v| v.im);
        let a_lu = a.lu();
        let a_inv = a_lu
            .try_inverse()
            .ok_or_else(|| Error::Internal("singular Nyström Dirichlet matrix".into()))?;
        let dtn = &d1 * (&im_c * a_inv);
        Ok(Self {
            nodes,
            period,
            points,
            tangents,
            centroid: Complex64::new(curve.x().mean().re, curve.y().mean().re),
            a_lu,
            im_c,
            d1,
            d2,
            dtn,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dtn(&self) -> &DMatrix<f64> {
        &self.dtn
    }

    pub(super) fn sample(&self, g: &TorusFunction) -> Vec<Complex64> {
        g.to_samples(self.nodes)
    }

    pub(super) fn to_torus(&self, v: &[Complex64], modes: usize) -> TorusFunction {
        TorusFunction::from_samples(self.period, v, modes.min((self.nodes - 1) / 2)).resized(modes)
    }

    fn solve_a(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (re, im) = split(v);
        let sr = self.a_lu.solve(&re).expect("A is invertible");
        let si = self.a_lu.solve(&im).expect("A is invertible");
        join(&sr, &si)
    }

    pub(super) fn dirichlet(self: &Arc<Self>, g: &[Complex64]) -> Repr {
        Repr::Nystrom {
            op: self.clone(),
            trace: g.to_vec(),
            density: self.solve_a(g),
            normal: real_apply(&self.dtn, g),
        }
    }

    /// Solves through the conjugate: `∂_n u = ∂_t v` with `v = ∫g dt`, so `u` is minus the
    /// conjugate of the harmonic extension of `v`.
    pub(super) fn neumann(self: &Arc<Self>, g: &[Complex64]) -> Result<Repr> {
        let n = self.nodes;
        let mut buf = g.to_vec();
        fft::forward(&mut buf);
        for (b, v) in buf.iter_mut().enumerate() {
            let k = fft::signed_index(b, n);
            if k == 0 || (n.is_multiple_of(2) && b == n / 2) {
                *v = Complex64::new(0.0, 0.0);
            } else {
                *v /= Complex64::new(0.0, 2.0 * PI * k as f64 / self.period) * n as f64;
            }
        }
        fft::inverse(&mut buf);
        let mu = self.solve_a(&buf);
        let mut trace: Vec<Complex64> = real_apply(&self.im_c, &mu).into_iter().map(|v| -v).collect();
        let mean = trace.iter().sum::<Complex64>() / n as f64;
        trace.iter_mut().for_each(|v| *v -= mean);
        Ok(self.dirichlet(&trace))
    }

    /// `(-diag(a)D₂ - diag(a')D₁ + bΛ) u = g`, bordered by the zero-mean constraint.
    pub(super) fn tangential_robin(self: &Arc<Self>, a: &TorusFunction, b: Complex64, g: &[Complex64]) -> Result<Repr> {
        let n = self.nodes;
        let av = a.to_samples(n);
        let dav = a.diff(1).to_samples(n);
        let mut m = DMatrix::<Complex64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = -av[i] * self.d2[(i, j)] - dav[i] * self.d1[(i, j)] + b * self.dtn[(i, j)];
            }
            m[(i, n)] = Complex64::new(1.0, 0.0);
            m[(n, i)] = Complex64::new(1.0 / n as f64, 0.0);
        }
        let mut rhs = DVector::<Complex64>::zeros(n + 1);
        for i in 0..n {
            rhs[i] = g[i];
        }
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Internal("singular tangential Robin system".into()))?;
        let trace: Vec<Complex64> = sol.iter().take(n).copied().collect();
        Ok(self.dirichlet(&trace))
    }

    /// `Re F[ν](z)` for a real density, subtracting `ν` at node `anchor`.
    fn cauchy_re(&self, nu: &[f64], z: Complex64, anchor: usize) -> f64 {
        let w = self.period / self.nodes as f64;
        let coef = Complex64::new(0.0, -w / (2.0 * PI));
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.nodes {
            let d = self.points[j] - z;
            if j == anchor && d.norm() < 1e-14 {
                let dmu: f64 = (0..self.nodes).map(|l| self.d1[(anchor, l)] * nu[l]).sum();
                acc += dmu;
            } else {
                acc += (nu[j] - nu[anchor]) * self.tangents[j] / d;
            }
        }
        nu[anchor] + (coef * acc).re
    }

    fn evaluate_anchored(
        &self,
        density: &[Complex64],
        z: Complex64,
        anchor: usize,
        re: &[f64],
        im: &[f64],
    ) -> Complex64 {
        debug_assert_eq!(density.len(), self.nodes);
        Complex64::new(self.cauchy_re(re, z, anchor), self.cauchy_re(im, z, anchor))
    }

    pub(super) fn evaluate(&self, density: &[Complex64], p: [f64; 2]) -> Complex64 {
        let z = Complex64::new(p[0], p[1]);
        let anchor = (0..self.nodes)
            .min_by(|&a, &b| (self.points[a] - z).norm().total_cmp(&(self.points[b] - z).norm()))
            .unwrap_or(0);
        let re: Vec<f64> = density.iter().map(|c| c.re).collect();
        let im: Vec<f64> = density.iter().map(|c| c.im).collect();
        self.evaluate_anchored(density, z, anchor, &re, &im)
    }

    /// Gradient part by Green's identity `∫|∇u|² = Re∮ ū ∂_n u`. The `L²` part uses
    /// `z = c + ρ(ζ_j - c)` with 32 Gauss–Legendre nodes in `ρ` and the boundary nodes in
    /// angle; this needs the curve to be star-shaped about its centroid, else it is NaN.
    pub(super) fn norms(&self, trace: &[Complex64], density: &[Complex64], normal: &[Complex64]) -> InnerNorms {
        let w = self.period / self.nodes as f64;
        let grad2: f64 = trace.iter().zip(normal).map(|(u, d)| (u.conj() * d).re).sum::<f64>() * w;
        let rule = GaussLegendre::new(NonZeroUsize::new(RADIAL_NODES).expect("nonzero"));
        let re: Vec<f64> = density.iter().map(|c| c.re).collect();
        let im: Vec<f64> = density.iter().map(|c| c.im).collect();
        let mut l2 = 0.0;
        for j in 0..self.nodes {
            let r = self.points[j] - self.centroid;
            let det = (r.conj() * self.tangents[j]).im;
            if det <= 0.0 {
                l2 = f64::NAN;
                break;
            }
            for &(x, wq) in rule.as_node_weight_pairs() {
                let rho = 0.5 * (x + 1.0);
                let z = self.centroid + r * rho;
                let u = self.evaluate_anchored(density, z, j, &re, &im);
                l2 += 0.5 * wq * rho * det * w * u.norm_sqr();
            }
        }
        InnerNorms {
            l2: l2.sqrt(),
            grad: grad2.max(0.0).sqrt(),
        }
    }
}
