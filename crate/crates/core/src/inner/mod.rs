//! Harmonic functions on the inner domain with Dirichlet, gauged Neumann and
//! tangential Robin (Ventcel) boundary conditions.
//!
//! Two backends share one interface: exact per-mode formulas on a disk, and a Nyström
//! discretization of the interior Cauchy integral for general smooth curves.

mod disk;
mod nystrom;

pub use nystrom::NystromOperator;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CircleParams};
use crate::torus::TorusFunction;
use num_complex::Complex64;
use std::sync::Arc;

/// Relative tolerance on the mean of Neumann and Ventcel data.
pub const COMPATIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    DiskSpectral,
    Nystrom { nodes: usize },
}

/// Admissible contrast: `Re c > 0`, or `Re c = 0` with `Im c ≠ 0`.
pub fn check_contrast(name: &str, c: Complex64) -> Result<()> {
    if c.re > 0.0 || (c.re == 0.0 && c.im != 0.0) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} = {c} must satisfy Re > 0, or Re = 0 and Im ≠ 0"
        )))
    }
}

fn check_mean(context: &str, g: &TorusFunction) -> Result<()> {
    let tol = COMPATIBILITY_TOL * g.coeff_norm();
    let mean = g.mean().norm();
    if mean > tol {
        return Err(Error::Compatibility {
            context: context.into(),
            mean,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Norms of `Σ a_k (r/R)^{|k|} e^{ikθ/R}` on the disk of radius `R`.
pub fn disk_harmonic_norms(radius: f64, coeffs: &TorusFunction) -> InnerNorms {
    let circle = CircleParams {
        center: [0.0, 0.0],
        radius,
        phase: 0.0,
    };
    disk::norms(&circle, coeffs)
}

#[derive(Debug, Clone)]
enum SolverKind {
    Disk(CircleParams),
    Nystrom(Arc<NystromOperator>),
}

/// Solver bound to one curve and backend; cheap to clone.
#[derive(Debug, Clone)]
pub struct InnerSolver {
    curve: Arc<BoundaryCurve>,
    kind: SolverKind,
}

impl InnerSolver {
    pub fn new(curve: Arc<BoundaryCurve>, backend: Backend) -> Result<Self> {
        let kind = match backend {
            Backend::DiskSpectral => {
                let c = curve
                    .as_circle(1e-10)
                    .ok_or_else(|| Error::Usage("the disk backend requires a circular boundary".into()))?;
                SolverKind::Disk(c)
            }
            Backend::Nystrom { nodes } => SolverKind::Nystrom(Arc::new(NystromOperator::new(&curve, nodes)?)),
        };
        Ok(Self { curve, kind })
    }

    /// Disk backend on circles, otherwise Nyström with `4M` nodes.
    pub fn auto(curve: Arc<BoundaryCurve>) -> Result<Self> {
        if curve.as_circle(1e-10).is_some() {
            Self::new(curve, Backend::DiskSpectral)
        } else {
            let nodes = 4 * curve.modes();
            Self::new(curve, Backend::Nystrom { nodes })
        }
    }

    pub fn backend(&self) -> Backend {
        match &self.kind {
            SolverKind::Disk(_) => Backend::DiskSpectral,
            SolverKind::Nystrom(op) => Backend::Nystrom { nodes: op.nodes() },
        }
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        &self.curve
    }

    pub fn zero_field(&self) -> HarmonicField {
        self.solve_dirichlet(&TorusFunction::zeros(self.curve.period(), self.curve.modes()))
    }

    /// `Δu = 0`, `u = g` on the boundary.
    pub fn solve_dirichlet(&self, g: &TorusFunction) -> HarmonicField {
        let repr = match &self.kind {
            SolverKind::Disk(c) => Repr::Disk {
                circle: *c,
                coeffs: g.resized(self.curve.modes()),
            },
            SolverKind::Nystrom(op) => op.dirichlet(&op.sample(g)),
        };
        HarmonicField {
            curve: self.curve.clone(),
            repr,
        }
    }

    /// `Δu = 0`, `∂_n u = g`, `∫u dσ = 0`.
    pub fn solve_neumann_gauged(&self, g: &TorusFunction) -> Result<HarmonicField> {
        check_mean("Neumann data", g)?;
        let repr = match &self.kind {
            SolverKind::Disk(c) => Repr::Disk {
                circle: *c,
                coeffs: disk::neumann(c, &g.resized(self.curve.modes())),
            },
            SolverKind::Nystrom(op) => op.neumann(&op.sample(g))?,
        };
        Ok(HarmonicField {
            curve: self.curve.clone(),
            repr,
        })
    }

    /// `Δu = 0`, `-∂²_t u + β∂_n u = g`, zero-mean trace.
    pub fn solve_ventcel(&self, beta: Complex64, g: &TorusFunction) -> Result<HarmonicField> {
        check_contrast("β", beta)?;
        let one = TorusFunction::constant(self.curve.period(), 0, Complex64::new(1.0, 0.0));
        self.solve_tangential_robin(&one, beta, g)
    }

    /// `Δu = 0`, `-∂_t(a ∂_t u) + b ∂_n u = g`, zero-mean trace. `a` may vary along the boundary.
    pub fn solve_tangential_robin(&self, a: &TorusFunction, b: Complex64, g: &TorusFunction) -> Result<HarmonicField> {
        check_mean("tangential Robin data", g)?;
        let repr = match &self.kind {
            SolverKind::Disk(c) => Repr::Disk {
                circle: *c,
                coeffs: disk::tangential_robin(c, a, b, &g.resized(self.curve.modes()))?,
            },
            SolverKind::Nystrom(op) => op.tangential_robin(a, b, &op.sample(g))?,
        };
        Ok(HarmonicField {
            curve: self.curve.clone(),
            repr,
        })
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// `u = Σ a_k (r/R)^{|k|} e^{ik(φ - φ₀)}`; `coeffs` is also the trace.
    Disk {
        circle: CircleParams,
        coeffs: TorusFunction,
    },
    /// `u = Re C[Re μ] + i Re C[Im μ]` with `C` the interior Cauchy integral.
    Nystrom {
        op: Arc<NystromOperator>,
        trace: Vec<Complex64>,
        density: Vec<Complex64>,
        normal: Vec<Complex64>,
    },
}

/// A harmonic function on the inner domain.
#[derive(Debug, Clone)]
pub struct HarmonicField {
    curve: Arc<BoundaryCurve>,
    repr: Repr,
}

/// `‖u‖_{L²(O)}` and `‖∇u‖_{L²(O)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerNorms {
    pub l2: f64,
    pub grad: f64,
}

impl InnerNorms {
    /// Sum of the two norms.
    pub fn h1(&self) -> f64 {
        self.l2 + self.grad
    }
}

impl HarmonicField {
    pub fn backend(&self) -> Backend {
        match &self.repr {
            Repr::Disk { .. } => Backend::DiskSpectral,
            Repr::Nystrom { op, .. } => Backend::Nystrom { nodes: op.nodes() },
        }
    }

    pub fn curve(&self) -> &Arc<BoundaryCurve> {
        &self.curve
    }

    pub fn trace(&self) -> TorusFunction {
        match &self.repr {
            Repr::Disk { coeffs, .. } => coeffs.clone(),
            Repr::Nystrom { op, trace, .. } => op.to_torus(trace, self.curve.modes()),
        }
    }

    pub fn normal_trace(&self) -> TorusFunction {
        match &self.repr {
            Repr::Disk { circle, coeffs } => disk::normal_trace(circle, coeffs),
            Repr::Nystrom { op, normal, .. } => op.to_torus(normal, self.curve.modes()),
        }
    }

    pub fn evaluate(&self, points: &[[f64; 2]]) -> Vec<Complex64> {
        match &self.repr {
            Repr::Disk { circle, coeffs } => points.iter().map(|p| disk::evaluate(circle, coeffs, *p)).collect(),
            Repr::Nystrom { op, density, .. } => points.iter().map(|p| op.evaluate(density, *p)).collect(),
        }
    }

    pub fn norms(&self) -> InnerNorms {
        match &self.repr {
            Repr::Disk { circle, coeffs } => disk::norms(circle, coeffs),
            Repr::Nystrom {
                op,
                trace,
                density,
                normal,
            } => op.norms(trace, density, normal),
        }
    }

    /// `‖u‖_{L²} + ‖∇u‖_{L²}`.
    pub fn h1_norm(&self) -> f64 {
        self.norms().h1()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let repr = match &self.repr {
            Repr::Disk { circle, coeffs } => Repr::Disk {
                circle: *circle,
                coeffs: coeffs.scale(c),
            },
            Repr::Nystrom {
                op,
                trace,
                density,
                normal,
            } => Repr::Nystrom {
                op: op.clone(),
                trace: trace.iter().map(|v| v * c).collect(),
                density: density.iter().map(|v| v * c).collect(),
                normal: normal.iter().map(|v| v * c).collect(),
            },
        };
        Self {
            curve: self.curve.clone(),
            repr,
        }
    }

    /// Sum of two fields built by the same solver.
    ///
    /// # Panics
    /// If the fields come from different backends or discretizations.
    pub fn plus(&self, other: &Self) -> Self {
        let zip = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        let repr = match (&self.repr, &other.repr) {
            (Repr::Disk { circle, coeffs: a }, Repr::Disk { coeffs: b, .. }) => Repr::Disk {
                circle: *circle,
                coeffs: a + b,
            },
            (
                Repr::Nystrom {
                    op,
                    trace: t1,
                    density: d1,
                    normal: n1,
                },
                Repr::Nystrom {
                    op: op2,
                    trace: t2,
                    density: d2,
                    normal: n2,
                },
            ) if Arc::ptr_eq(op, op2) => Repr::Nystrom {
                op: op.clone(),
                trace: zip(t1, t2),
                density: zip(d1, d2),
                normal: zip(n1, n2),
            },
            _ => panic!("cannot add harmonic fields from different discretizations"),
        };
        Self {
            curve: self.curve.clone(),
            repr,
        }
    }
}
