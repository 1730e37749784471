use crate::config::{Problem, StudyConfig};
use crate::report::{
    ConvergeReport, ExpandEntry, ExpandReport, OracleBlock, OracleReport, ResidualReport, SlopeFit, StudyRow,
};
use crate::{thread_pool, CliError};
use rayon::prelude::*;
use std::sync::Arc;
use thinlayer_core::expansion::{abc_order0, abc_order1, abc_q1_order0, expand_beta0, expand_thm1, expand_thm2};
use thinlayer_core::oracle::{remainder_norms, solve_disk_p1, solve_disk_p2, solve_disk_u};
use thinlayer_core::{
    BoundaryCurve, Complex64, DiskTransmissionSolution, ExpansionOptions, ExpansionSeries, InnerSolver, MembraneField,
    OracleProblem, TorusFunction,
};

/// `residual` runs fail above this relative residual.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

struct Setup {
    curve: Arc<BoundaryCurve>,
    data: TorusFunction,
    grid: Vec<f64>,
}

fn setup(cfg: &StudyConfig) -> Result<Setup, CliError> {
    cfg.validate()?;
    let curve = Arc::new(cfg.curve.build(cfg.modes)?);
    let data = cfg.data.build(curve.period(), curve.modes())?;
    let grid = cfg.h_grid()?;
    let h0 = curve.h0();
    if cfg.h_max >= h0 {
        return Err(CliError::Usage(format!(
            "h_max = {} must be below h0 = {h0} of the curve",
            cfg.h_max
        )));
    }
    Ok(Setup { curve, data, grid })
}

fn options(cfg: &StudyConfig) -> ExpansionOptions {
    ExpansionOptions {
        weight: cfg.weight,
        enforce_alpha_bound: !cfg.alpha.is_crossover(),
        backend: None,
    }
}

fn build_series(cfg: &StudyConfig, s: &Setup, alpha: Complex64, n: i64) -> Result<ExpansionSeries, CliError> {
    let curve = s.curve.clone();
    let o = options(cfg);
    let built = match cfg.problem {
        Problem::Thm1 => expand_thm1(curve, &s.data, alpha, n, &o),
        Problem::Thm2 => expand_thm2(curve, &s.data, cfg.beta, cfg.q, n, &o),
        Problem::Beta0 => expand_beta0(curve, &s.data, n, &o),
        other => return Err(CliError::Usage(format!("{other} has no expansion series"))),
    };
    built.map_err(|e| CliError::core(format!("building the {} series to order {n}", cfg.problem), e))
}

/// `q` as reported in the CSV: the exponent linking `α = βh^q`, zero where it has no role.
fn reported_q(cfg: &StudyConfig) -> u32 {
    match cfg.problem {
        Problem::Thm2 => cfg.q,
        Problem::AbcQ1Order0 => 1,
        _ => 0,
    }
}

fn oracle_contrast(cfg: &StudyConfig, kind: OracleProblem, h: f64) -> Complex64 {
    match (kind, cfg.problem) {
        (OracleProblem::P2, Problem::Thm2) => cfg.beta * h.powi(cfg.q as i32),
        (OracleProblem::P2, Problem::AbcQ1Order0) => cfg.beta * h,
        (OracleProblem::ULimit, _) => Complex64::new(0.0, 0.0),
        _ => cfg.alpha.at(h),
    }
}

fn solve_oracle(
    kind: OracleProblem,
    h: f64,
    alpha: Complex64,
    data: &TorusFunction,
) -> thinlayer_core::Result<DiskTransmissionSolution> {
    match kind {
        OracleProblem::P1 => solve_disk_p1(h, alpha, data),
        OracleProblem::P2 => solve_disk_p2(h, alpha, data),
        OracleProblem::ULimit => solve_disk_u(h, data),
    }
}

fn require_circle(curve: &BoundaryCurve) -> Result<(), CliError> {
    if curve.as_circle(1e-10).is_none() {
        return Err(CliError::Usage("exact solutions are only available on a circle".into()));
    }
    Ok(())
}

/// Remainder norms of every requested order over the `h` grid, and their log–log slopes.
/// Series are built once unless `α` depends on `h`; approximate boundary conditions are
/// solved per `h` and their membrane error uses the `η`-constant extension of the trace.
pub fn run_converge(cfg: &StudyConfig) -> Result<ConvergeReport, CliError> {
    let s = setup(cfg)?;
    require_circle(&s.curve)?;
    let kind = cfg.problem.oracle();
    let orders: Vec<i64> = match cfg.problem {
        Problem::Abc0 | Problem::AbcQ1Order0 => vec![0],
        Problem::Abc1 => vec![1],
        _ => cfg.orders.clone(),
    };
    let shared = if cfg.problem.is_abc() || cfg.alpha.is_crossover() {
        None
    } else {
        Some(build_series(cfg, &s, cfg.alpha.base, cfg.max_order())?)
    };
    let solver = InnerSolver::auto(s.curve.clone()).map_err(|e| CliError::core("inner solver", e))?;
    let jobs: Vec<(i64, f64)> = orders
        .iter()
        .flat_map(|&n| s.grid.iter().map(move |&h| (n, h)))
        .collect();

    let row = |&(n, h): &(i64, f64)| -> Result<StudyRow, CliError> {
        let ctx = |what: &str| format!("{what} at N={n}, h={h:?}");
        let alpha = oracle_contrast(cfg, kind, h);
        let oracle = solve_oracle(kind, h, alpha, &s.data).map_err(|e| CliError::core(ctx("exact solution"), e))?;
        let (inner, membrane, tail) = if cfg.problem.is_abc() {
            let field = match cfg.problem {
                Problem::Abc0 => abc_order0(&solver, &s.data, cfg.alpha.base),
                Problem::Abc1 => abc_order1(&solver, &s.data, cfg.alpha.base, h),
                _ => abc_q1_order0(&solver, &s.data, cfg.beta, h),
            }
            .map_err(|e| CliError::core(ctx("boundary condition"), e))?;
            let trace = field.trace();
            let inner = oracle.inner_error(&trace).h1();
            let membrane = oracle
                .membrane_error(&MembraneField::eta_constant(trace))
                .map_err(|e| CliError::core(ctx("membrane error"), e))?
                .h1();
            (inner, membrane, 0.0)
        } else {
            let owned;
            let series = match &shared {
                Some(series) => series,
                None => {
                    owned = build_series(cfg, &s, cfg.alpha.at(h), n)?;
                    &owned
                }
            };
            let r = remainder_norms(&oracle, series, n).map_err(|e| CliError::core(ctx("remainder"), e))?;
            (r.inner, r.membrane, series.tail_energy())
        };
        Ok(StudyRow {
            problem: cfg.problem,
            q: reported_q(cfg),
            alpha,
            n,
            h,
            err_inner_h1: inner,
            err_membrane_h1g: membrane,
            tail_energy: tail,
        })
    };
    let pool = thread_pool()?;
    let mut rows = pool.install(|| jobs.par_iter().map(row).collect::<Result<Vec<_>, _>>())?;
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.h.total_cmp(&b.h)));

    let slopes = orders
        .iter()
        .map(|&n| {
            let (hs, (ei, em)): (Vec<f64>, (Vec<f64>, Vec<f64>)) = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (r.h, (r.err_inner_h1, r.err_membrane_h1g)))
                .unzip();
            (n, SlopeFit::fit(&hs, &ei), SlopeFit::fit(&hs, &em))
        })
        .collect();
    Ok(ConvergeReport { rows, slopes })
}

/// Cascade, boundary, transmission and gauge residuals of the series built to the largest
/// requested order.
pub fn run_residual(cfg: &StudyConfig) -> Result<ResidualReport, CliError> {
    if cfg.problem.is_abc() {
        return Err(CliError::Usage(format!("{} has no expansion series", cfg.problem)));
    }
    if cfg.alpha.is_crossover() {
        return Err(CliError::Usage("residuals need an h-independent α".into()));
    }
    let s = setup(cfg)?;
    let series = build_series(cfg, &s, cfg.alpha.base, cfg.max_order())?;
    Ok(ResidualReport {
        problem: cfg.problem,
        orders: series.residuals().orders,
        limit: RESIDUAL_LIMIT,
    })
}

/// Per-mode coefficients and norms of the exact disk solution at every `h` of the grid.
pub fn run_oracle(cfg: &StudyConfig) -> Result<OracleReport, CliError> {
    let s = setup(cfg)?;
    require_circle(&s.curve)?;
    let kind = cfg.oracle.unwrap_or_else(|| cfg.problem.oracle());
    let blocks = s
        .grid
        .iter()
        .map(|&h| {
            let alpha = oracle_contrast(cfg, kind, h);
            let sol = solve_oracle(kind, h, alpha, &s.data)
                .map_err(|e| CliError::core(format!("exact solution at h={h:?}"), e))?;
            let membrane = sol.membrane_norms().map_err(|e| CliError::core("membrane norms", e))?;
            Ok(OracleBlock {
                h,
                modes: sol.triples().collect(),
                inner_h1: sol.inner_norms().h1(),
                membrane_h1g: membrane.h1(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(OracleReport { blocks })
}

/// The nonzero Fourier coefficients of every term of the series.
pub fn run_expand(cfg: &StudyConfig) -> Result<ExpandReport, CliError> {
    if cfg.alpha.is_crossover() {
        return Err(CliError::Usage("expansion terms need an h-independent α".into()));
    }
    let s = setup(cfg)?;
    let series = build_series(cfg, &s, cfg.alpha.base, cfg.max_order())?;
    let mut entries = Vec::new();
    let nonzero = |f: &TorusFunction| f.iter().filter(|(_, v)| v.norm() > 0.0).collect::<Vec<_>>();
    for k in series.start()..=series.order() {
        let term = series.term(k).expect("constructed order");
        for (m, v) in nonzero(&term.inner.trace()) {
            entries.push(ExpandEntry {
                order: k,
                eta_power: None,
                k: m,
                value: v,
            });
        }
        for (j, c) in term.membrane.coeffs().iter().enumerate() {
            for (m, v) in nonzero(c) {
                entries.push(ExpandEntry {
                    order: k,
                    eta_power: Some(j),
                    k: m,
                    value: v,
                });
            }
        }
    }
    Ok(ExpandReport {
        entries,
        diagnostics: series
            .diagnostics()
            .iter()
            .map(|d| (d.order, d.compatibility, d.tail_energy))
            .collect(),
        weight: series.weight().to_string(),
    })
}
