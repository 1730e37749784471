//! Order-by-order construction of the thin-layer expansions.
//!
//! Every term is a pair (inner harmonic field, membrane field on `[0,1] × T`) and does not
//! depend on `h`; the layer width enters only through [`ExpansionSeries::partial_sum`].
//! Membrane terms are obtained by integrating the cascade `∂²_η T_m = -R_m` exactly in `η`,
//! and each order is closed by one inner boundary-value problem.

mod abc;
mod residual;

pub use abc::{abc_order0, abc_order1, abc_q1_order0};
pub use residual::{OrderResidual, Residuals};

use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::inner::{check_contrast, Backend, HarmonicField, InnerSolver, COMPATIBILITY_TOL};
use crate::membrane::{cascade_source, CurvatureTerms, Endpoint, MembraneField};
use crate::torus::TorusFunction;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Inner coefficient 1, membrane coefficient `α`.
    Thm1 { alpha: Complex64 },
    /// Inner coefficient `βh^q`, membrane coefficient 1.
    Thm2 { beta: Complex64, q: u32 },
    /// Inner contrast smaller than any power of `h`.
    Beta0,
}

impl Regime {
    /// Index of the leading term.
    pub fn start(&self) -> i64 {
        match self {
            Regime::Thm1 { .. } => 0,
            Regime::Thm2 { .. } | Regime::Beta0 => -1,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Thm1 { .. } => f.write_str("thm1"),
            Regime::Thm2 { .. } => f.write_str("thm2"),
            Regime::Beta0 => f.write_str("beta0"),
        }
    }
}

/// Weight `w(η)` in the term `∫₀¹ w ∂²_θ ∂_η u_k dη` that fixes `u_k(1)` when `q ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightVariant {
    #[default]
    Eta,
    EtaMinusOne,
}

impl fmt::Display for WeightVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightVariant::Eta => "eta",
            WeightVariant::EtaMinusOne => "eta-1",
        })
    }
}

impl FromStr for WeightVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eta" => Ok(Self::Eta),
            "eta-1" | "eta_minus_one" => Ok(Self::EtaMinusOne),
            other => Err(Error::Usage(format!(
                "unknown weight variant {other:?} (expected eta or eta-1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionOptions {
    pub weight: WeightVariant,
    /// Reject `|α| > 1` in the first regime. Turned off to study `h`-dependent contrasts.
    pub enforce_alpha_bound: bool,
    /// Inner backend; `None` picks the disk solver on circles and Nyström otherwise.
    pub backend: Option<Backend>,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self {
            weight: WeightVariant::Eta,
            enforce_alpha_bound: true,
            backend: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub inner: HarmonicField,
    pub membrane: MembraneField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderDiagnostics {
    pub order: i64,
    /// Relative mean of the data handed to the gauged inner solve.
    pub compatibility: f64,
    /// Energy discarded when truncating the order's fields back to `M` modes.
    pub tail_energy: f64,
}

/// `Σ_k h^k term_k` at a fixed `h`.
#[derive(Debug, Clone)]
pub struct PartialSum {
    pub inner: HarmonicField,
    pub membrane: MembraneField,
}

#[derive(Debug, Clone)]
pub struct ExpansionSeries {
    regime: Regime,
    solver: InnerSolver,
    data: TorusFunction,
    order: i64,
    terms: Vec<Term>,
    /// `∂_η` of the membrane terms for every order in `start..`, including the orders past `N`
    /// fixed by the recursion.
    eta_derivatives: Vec<MembraneField>,
    weight: WeightVariant,
    diagnostics: Vec<OrderDiagnostics>,
}

fn zero_c() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn solver_for(curve: &Arc<BoundaryCurve>, options: &ExpansionOptions) -> Result<InnerSolver> {
    match options.backend {
        Some(b) => InnerSolver::new(curve.clone(), b),
        None => InnerSolver::auto(curve.clone()),
    }
}

fn band_limited(f: &TorusFunction, modes: usize) -> Result<TorusFunction> {
    let (g, tail) = f.truncated(modes);
    if tail > 0.0 {
        return Err(Error::Parameter(format!(
            "data has energy {tail:e} beyond the {modes} resolved modes"
        )));
    }
    Ok(g.resized(modes))
}

fn relative_mean(g: &TorusFunction) -> f64 {
    let n = g.coeff_norm();
    if n == 0.0 {
        0.0
    } else {
        g.mean().norm() / n
    }
}

fn check_data_mean(f: &TorusFunction) -> Result<()> {
    let tol = COMPATIBILITY_TOL * f.coeff_norm();
    let mean = f.mean().norm();
    if mean > tol {
        return Err(Error::Compatibility {
            context: "boundary data".into(),
            mean,
            tolerance: tol,
        });
    }
    Ok(())
}

/// `∂_η T_m = δ f - ∫_1^s R_m dη`, truncated to `M` modes.
fn next_derivative(source: &MembraneField, f: Option<&TorusFunction>, modes: usize) -> (MembraneField, f64) {
    let mut d = -&source.eta_antiderivative_from(Endpoint::One);
    if let Some(f) = f {
        d = d.add_eta_constant(f);
    }
    d.truncated(modes)
}

/// Construction of the first regime. For `k = 0..N`: `∂_η V^m_{k+1}` from the cascade (it
/// needs only `η`-derivatives of `V^m_k`), then `V^c_k` from the gauged Neumann problem
/// `∂_n V^c_k = α ∂_η V^m_{k+1}(0)`, then `V^m_k = ∫₀^s ∂_η V^m_k + V^c_k|_{∂O}`.
pub fn expand_thm1(
    curve: Arc<BoundaryCurve>,
    f: &TorusFunction,
    alpha: Complex64,
    n: i64,
    options: &ExpansionOptions,
) -> Result<ExpansionSeries> {
    check_contrast("α", alpha)?;
    if options.enforce_alpha_bound && alpha.norm() > 1.0 {
        return Err(Error::Parameter(format!("|α| = {} exceeds 1", alpha.norm())));
    }
    if n < 0 {
        return Err(Error::Parameter(format!("expansion order {n} must be ≥ 0")));
    }
    let solver = solver_for(&curve, options)?;
    let m = curve.modes();
    let period = curve.period();
    let f = band_limited(f, m)?;
    let curv = CurvatureTerms::new(curve.kappa());
    let order = n as usize;

    let mut dv = vec![MembraneField::zeros(period, m)];
    let mut full: Vec<MembraneField> = Vec::with_capacity(order + 1);
    let mut terms = Vec::with_capacity(order + 1);
    let mut diagnostics = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let p_k = dv[k].eta_antiderivative_from(Endpoint::Zero);
        let ki = k as i64;
        let source = cascade_source(
            |j| match j {
                j if j == ki => Some(&p_k),
                j if (0..ki).contains(&j) => Some(&full[j as usize]),
                _ => None,
            },
            &curv,
            ki + 1,
        );
        let (d, tail) = next_derivative(&source.total, (k == 0).then_some(&f), m);
        dv.push(d);
        let g = dv[k + 1].eval_eta(0.0).scale(alpha);
        let inner = solver.solve_neumann_gauged(&g).map_err(|e| e.at_order(ki))?;
        let membrane = p_k.add_eta_constant(&inner.trace());
        diagnostics.push(OrderDiagnostics {
            order: ki,
            compatibility: relative_mean(&g),
            tail_energy: tail,
        });
        full.push(membrane.clone());
        terms.push(Term { inner, membrane });
    }
    Ok(ExpansionSeries {
        regime: Regime::Thm1 { alpha },
        solver,
        data: f,
        order: n,
        terms,
        eta_derivatives: dv,
        weight: options.weight,
        diagnostics,
    })
}

/// Construction of the second regime, terms `k = -1..N`.
pub fn expand_thm2(
    curve: Arc<BoundaryCurve>,
    f: &TorusFunction,
    beta: Complex64,
    q: u32,
    n: i64,
    options: &ExpansionOptions,
) -> Result<ExpansionSeries> {
    check_contrast("β", beta)?;
    if q == 0 {
        return Err(Error::Parameter("q must be ≥ 1".into()));
    }
    build_thm2(curve, f, Regime::Thm2 { beta, q }, n, options)
}

/// The second regime's `q ≥ 2` recursion with `β = 0`.
pub fn expand_beta0(
    curve: Arc<BoundaryCurve>,
    f: &TorusFunction,
    n: i64,
    options: &ExpansionOptions,
) -> Result<ExpansionSeries> {
    build_thm2(curve, f, Regime::Beta0, n, options)
}

/// At order `k` the cascade for `h^{k+2}` integrated over `η` and the transmission
/// condition `∂_η u_{k+2}(0) = β ∂_n u^c_{k+1-q}` give one equation on the boundary:
/// a Ventcel problem for `u^c_k` when `q = 1`, and `-∂²_θ u_k(1) = …` when `q ≥ 2`.
/// `∂_η u_{k+2}` then follows from the cascade.
fn build_thm2(
    curve: Arc<BoundaryCurve>,
    f: &TorusFunction,
    regime: Regime,
    n: i64,
    options: &ExpansionOptions,
) -> Result<ExpansionSeries> {
    if n < -1 {
        return Err(Error::Parameter(format!("expansion order {n} must be ≥ -1")));
    }
    let solver = solver_for(&curve, options)?;
    let m = curve.modes();
    let period = curve.period();
    let f = band_limited(f, m)?;
    check_data_mean(&f)?;
    let (beta, q) = match regime {
        Regime::Thm2 { beta, q } => (beta, q),
        _ => (zero_c(), 2),
    };
    let curv = CurvatureTerms::new(curve.kappa());
    let idx = |k: i64| (k + 1) as usize;
    let zero_t = TorusFunction::zeros(period, m);

    let mut du = vec![MembraneField::zeros(period, m), MembraneField::zeros(period, m)];
    let mut full: Vec<MembraneField> = Vec::new();
    let mut inner: Vec<HarmonicField> = Vec::new();
    let mut diagnostics = Vec::new();
    for k in -1..=n {
        let du_k = du[idx(k)].clone();
        let p_k = du_k.eta_antiderivative_from(Endpoint::Zero);
        let p_next = du[idx(k + 1)].eta_antiderivative_from(Endpoint::Zero);
        let source = cascade_source(
            |j| match j {
                j if j == k + 1 => Some(&p_next),
                j if j == k => Some(&p_k),
                j if (-1..k).contains(&j) => Some(&full[idx(j)]),
                _ => None,
            },
            &curv,
            k + 2,
        );
        let rest = (&source.total - &p_k.theta_diff(2)).integral_01();
        let delta = if k == -1 { &f } else { &zero_t };
        let (u, uc, compatibility) = if q == 1 {
            let moment = (&du_k.mul_eta_pow(1) - &du_k).theta_diff(2).integral_01();
            let rhs = (&(delta + &rest) - &moment).resized(m);
            let uc = solver.solve_ventcel(beta, &rhs).map_err(|e| e.at_order(k))?;
            (p_k.add_eta_constant(&uc.trace()), uc, relative_mean(&rhs))
        } else {
            let weighted = match options.weight {
                WeightVariant::Eta => du_k.mul_eta_pow(1),
                WeightVariant::EtaMinusOne => &du_k.mul_eta_pow(1) - &du_k,
            };
            let moment = weighted.theta_diff(2).integral_01();
            let lag = k + 1 - q as i64;
            let flux = if lag >= -1 && beta != zero_c() {
                inner[idx(lag)].normal_trace().scale(beta)
            } else {
                zero_t.clone()
            };
            let rhs = (&(&(delta + &rest) - &moment) - &flux).resized(m);
            let top = rhs.solve_neg_d2().map_err(|e| e.at_order(k))?;
            let u = du_k.eta_antiderivative_from(Endpoint::One).add_eta_constant(&top);
            let shift = u.eval_eta(0.0).mean();
            let u = u.add_eta_constant(&TorusFunction::constant(period, m, -shift));
            let uc = solver.solve_dirichlet(&u.eval_eta(0.0));
            (u, uc, relative_mean(&rhs))
        };
        full.push(u);
        inner.push(uc);

        let source = cascade_source(
            |j| match j {
                j if j == k + 1 => Some(&p_next),
                j if (-1..=k).contains(&j) => Some(&full[idx(j)]),
                _ => None,
            },
            &curv,
            k + 2,
        );
        let (d, tail) = next_derivative(&source.total, (k == -1).then_some(&f), m);
        du.push(d);
        diagnostics.push(OrderDiagnostics {
            order: k,
            compatibility,
            tail_energy: tail,
        });
    }
    let terms = inner
        .into_iter()
        .zip(full)
        .map(|(inner, membrane)| Term { inner, membrane })
        .collect();
    Ok(ExpansionSeries {
        regime,
        solver,
        data: f,
        order: n,
        terms,
        eta_derivatives: du,
        weight: options.weight,
        diagnostics,
    })
}

impl ExpansionSeries {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn start(&self) -> i64 {
        self.regime.start()
    }

    /// Highest constructed order `N`.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        self.solver.curve()
    }

    pub fn solver(&self) -> &InnerSolver {
        &self.solver
    }

    pub fn data(&self) -> &TorusFunction {
        &self.data
    }

    pub fn weight(&self) -> WeightVariant {
        self.weight
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, k: i64) -> Option<&Term> {
        usize::try_from(k - self.start()).ok().and_then(|i| self.terms.get(i))
    }

    /// `∂_η` of the membrane term of order `k`, available up to `N + 1` (first regime) or
    /// `N + 2` (second regime).
    pub fn eta_derivative(&self, k: i64) -> Option<&MembraneField> {
        usize::try_from(k - self.start())
            .ok()
            .and_then(|i| self.eta_derivatives.get(i))
    }

    pub fn diagnostics(&self) -> &[OrderDiagnostics] {
        &self.diagnostics
    }

    /// Total energy discarded by truncation over all orders.
    pub fn tail_energy(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.tail_energy).sum()
    }

    /// `Σ_{k=start}^{n_use} h^k term_k`.
    pub fn partial_sum(&self, h: f64, n_use: i64) -> Result<PartialSum> {
        let h0 = self.curve().h0();
        if !(h > 0.0 && h < h0) {
            return Err(Error::Parameter(format!("layer width h = {h} must lie in (0, {h0})")));
        }
        if n_use < self.start() || n_use > self.order {
            return Err(Error::Usage(format!(
                "partial sum order {n_use} outside the constructed range {}..={}",
                self.start(),
                self.order
            )));
        }
        let mut inner = self.solver.zero_field();
        let mut membrane = MembraneField::zeros(self.curve().period(), self.curve().modes());
        for k in self.start()..=n_use {
            let t = self.term(k).expect("order within range");
            let w = Complex64::new(h.powi(k as i32), 0.0);
            inner = inner.plus(&t.inner.scale(w));
            membrane = &membrane + &t.membrane.scale(w);
        }
        Ok(PartialSum { inner, membrane })
    }
}
