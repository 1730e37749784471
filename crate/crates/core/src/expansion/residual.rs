use super::{ExpansionSeries, Regime};
use crate::membrane::{cascade_coefficient, CurvatureTerms, MembraneField};
use crate::torus::TorusFunction;
use num_complex::Complex64;

/// Relative residuals of one order, in the coefficient sup-norm. The scale is the sum of
/// the sizes of the quantities compared; for values of `∂_η T` at an endpoint it is the
/// sum of the sizes of its `η`-coefficients. A residual is zero when its scale is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderResidual {
    pub order: i64,
    /// `∂²_η T_m + R_m`.
    pub cascade: f64,
    /// `∂_η T_m(1) - δ_{m,1} f`.
    pub boundary: f64,
    /// Inner trace against the membrane value at `η = 0`.
    pub continuity: f64,
    /// Inner normal derivative against the membrane flux at `η = 0`.
    pub flux: f64,
    /// Mean of the gauged trace.
    pub gauge: f64,
}

impl OrderResidual {
    pub fn max(&self) -> f64 {
        [self.cascade, self.boundary, self.continuity, self.flux, self.gauge]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    pub orders: Vec<OrderResidual>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.orders.iter().map(OrderResidual::max).fold(0.0, f64::max)
    }
}

fn rel(a: &TorusFunction, b: &TorusFunction) -> f64 {
    let scale = a.max_abs_coeff() + b.max_abs_coeff();
    if scale == 0.0 {
        0.0
    } else {
        (a - b).max_abs_coeff() / scale
    }
}

fn coeff_sum(d: &MembraneField) -> f64 {
    d.coeffs().iter().map(TorusFunction::max_abs_coeff).sum()
}

/// Evaluation at `η = 1` against the sum of coefficient sizes it was formed from.
fn boundary_rel(d: &MembraneField, target: &TorusFunction) -> f64 {
    let scale = coeff_sum(d) + target.max_abs_coeff();
    if scale == 0.0 {
        0.0
    } else {
        (&d.eval_eta(1.0) - target).max_abs_coeff() / scale
    }
}

impl ExpansionSeries {
    /// Cascade, boundary, transmission and gauge residuals for every constructed order.
    pub fn residuals(&self) -> Residuals {
        let curv = CurvatureTerms::new(self.curve().kappa());
        let start = self.start();
        let terms = |j: i64| self.term(j).map(|t| &t.membrane);
        let zero = TorusFunction::zeros(self.curve().period(), self.curve().modes());
        let mut orders = Vec::new();
        for k in start..=self.order {
            let term = self.term(k).expect("constructed order");
            let cascade = cascade_coefficient(terms, &curv, k).relative();
            let target = if k == 1 { &self.data } else { &zero };
            let boundary = boundary_rel(&term.membrane.eta_diff(), target);
            let trace = term.inner.trace();
            let continuity = rel(&trace, &term.membrane.eval_eta(0.0));
            let flux = match self.regime {
                Regime::Thm1 { alpha } => {
                    let d = self.eta_derivative(k + 1).expect("derivative past the last order");
                    rel(&term.inner.normal_trace(), &d.eval_eta(0.0).scale(alpha))
                }
                Regime::Thm2 { beta, q } => self.thm2_flux(k, beta, q),
                Regime::Beta0 => self.thm2_flux(k, Complex64::new(0.0, 0.0), 2),
            };
            let gauged = match self.regime {
                Regime::Thm1 { .. } => trace,
                _ => term.membrane.eval_eta(0.0),
            };
            let gauge = if gauged.coeff_norm() == 0.0 {
                0.0
            } else {
                gauged.mean().norm() / gauged.coeff_norm()
            };
            orders.push(OrderResidual {
                order: k,
                cascade,
                boundary,
                continuity,
                flux,
                gauge,
            });
        }
        // derivatives fixed past the last order must satisfy the same conditions
        if let Some(last) = orders.last_mut() {
            let extra_orders = match self.regime {
                Regime::Thm1 { .. } => 1,
                _ => 2,
            };
            for l in self.order + 1..=self.order + extra_orders {
                let d = self.eta_derivative(l).expect("derivative past the last order");
                let target = if l == 1 { &self.data } else { &zero };
                last.boundary = last.boundary.max(boundary_rel(d, target));
                let flux = match self.regime {
                    Regime::Thm1 { .. } => 0.0,
                    Regime::Thm2 { beta, q } => self.thm2_flux(l, beta, q),
                    Regime::Beta0 => self.thm2_flux(l, Complex64::new(0.0, 0.0), 2),
                };
                last.flux = last.flux.max(flux);
            }
        }
        Residuals { orders }
    }

    /// `β ∂_n u^c_{l-1-q}` against `∂_η u_l(0)`.
    fn thm2_flux(&self, l: i64, beta: Complex64, q: u32) -> f64 {
        let field = self.eta_derivative(l).expect("derivative within range");
        let d = field.eval_eta(0.0);
        let lag = l - 1 - q as i64;
        let lhs = match self.term(lag) {
            Some(t) if lag >= self.start() => t.inner.normal_trace().scale(beta),
            _ => TorusFunction::zeros(d.period(), d.modes()),
        };
        // d(0) carries the rounding of the integration from η = 1
        let scale = lhs.max_abs_coeff() + coeff_sum(field);
        if scale == 0.0 {
            0.0
        } else {
            (&lhs - &d).max_abs_coeff() / scale
        }
    }
}
