//! Study results and their text/CSV renderings. Floats use Rust's shortest round-trip
//! `Debug` form so that identical runs give byte-identical files.

use crate::config::Problem;
use std::io::{self, Write};
use thinlayer_core::expansion::OrderResidual;
use thinlayer_core::oracle::ModeTriple;
use thinlayer_core::Complex64;

pub const CSV_HEADER: &str = "problem,q,alpha_re,alpha_im,N,h,err_inner_h1,err_membrane_h1g,tail_energy";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub problem: Problem,
    pub q: u32,
    /// Contrast of the exact problem at this `h`.
    pub alpha: Complex64,
    pub n: i64,
    pub h: f64,
    pub err_inner_h1: f64,
    pub err_membrane_h1g: f64,
    pub tail_energy: f64,
}

/// Least-squares line through `(ln h, ln err)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    /// Root-mean-square deviation of the points from the fitted line.
    pub rms: f64,
}

impl SlopeFit {
    /// NaN when fewer than two points or any error that is not finite and positive.
    pub fn fit(hs: &[f64], errs: &[f64]) -> Self {
        let nan = Self {
            slope: f64::NAN,
            rms: f64::NAN,
        };
        if hs.len() < 2 || hs.len() != errs.len() || errs.iter().any(|&e| !e.is_finite() || e <= 0.0) {
            return nan;
        }
        let n = hs.len() as f64;
        let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx == 0.0 {
            return nan;
        }
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let ss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
            .sum();
        Self {
            slope,
            rms: (ss / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeReport {
    /// Sorted by `(N, h)`.
    pub rows: Vec<StudyRow>,
    /// `(N, inner fit, membrane fit)` for every order.
    pub slopes: Vec<(i64, SlopeFit, SlopeFit)>,
}

impl ConvergeReport {
    pub fn slope(&self, n: i64) -> Option<(SlopeFit, SlopeFit)> {
        self.slopes.iter().find(|s| s.0 == n).map(|s| (s.1, s.2))
    }

    pub fn rows_for(&self, n: i64) -> impl Iterator<Item = &StudyRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:?},{:?},{},{:?},{:?},{:?},{:?}",
                r.problem, r.q, r.alpha.re, r.alpha.im, r.n, r.h, r.err_inner_h1, r.err_membrane_h1g, r.tail_energy
            )?;
        }
        for (n, inner, membrane) in &self.slopes {
            writeln!(w, "# slope N={n} inner={:?} membrane={:?}", inner.slope, membrane.slope)?;
            writeln!(
                w,
                "# fit N={n} inner_rms={:?} membrane_rms={:?}",
                inner.rms, membrane.rms
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub problem: Problem,
    pub orders: Vec<OrderResidual>,
    pub limit: f64,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.orders.iter().map(OrderResidual::max).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max() <= self.limit
    }

    pub fn write_text(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "order,cascade,boundary,continuity,flux,gauge")?;
        for r in &self.orders {
            writeln!(
                w,
                "{},{:?},{:?},{:?},{:?},{:?}",
                r.order, r.cascade, r.boundary, r.continuity, r.flux, r.gauge
            )?;
        }
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        writeln!(
            w,
            "# {} max residual {:?} (limit {:?}): {verdict}",
            self.problem,
            self.max(),
            self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBlock {
    pub h: f64,
    pub modes: Vec<ModeTriple>,
    pub inner_h1: f64,
    pub membrane_h1g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub blocks: Vec<OracleBlock>,
}

impl OracleReport {
    /// Modes with all three coefficients zero are skipped.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "h,k,a_re,a_im,b_re,b_im,c_re,c_im")?;
        for b in &self.blocks {
            for t in &b.modes {
                if t.a.norm() + t.b.norm() + t.c.norm() == 0.0 {
                    continue;
                }
                writeln!(
                    w,
                    "{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                    b.h, t.k, t.a.re, t.a.im, t.b.re, t.b.im, t.c.re, t.c.im
                )?;
            }
        }
        for b in &self.blocks {
            writeln!(
                w,
                "# norms h={:?} inner_h1={:?} membrane_h1g={:?}",
                b.h, b.inner_h1, b.membrane_h1g
            )?;
        }
        Ok(())
    }
}

/// One nonzero Fourier coefficient of a series term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandEntry {
    pub order: i64,
    /// `None` for the inner trace, `Some(j)` for the `η^j` membrane coefficient.
    pub eta_power: Option<usize>,
    pub k: i64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandReport {
    pub entries: Vec<ExpandEntry>,
    /// `order, compatibility, tail energy`.
    pub diagnostics: Vec<(i64, f64, f64)>,
    pub weight: String,
}

impl ExpandReport {
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "order,part,eta_power,k,re,im")?;
        for e in &self.entries {
            let (part, power) = match e.eta_power {
                None => ("inner", String::new()),
                Some(j) => ("membrane", j.to_string()),
            };
            writeln!(
                w,
                "{},{part},{power},{},{:?},{:?}",
                e.order, e.k, e.value.re, e.value.im
            )?;
        }
        for (order, compat, tail) in &self.diagnostics {
            writeln!(
                w,
                "# order={order} compatibility={compat:?} tail_energy={tail:?} weight={}",
                self.weight
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs.iter().map(|h: &f64| 3.0 * h.powf(2.5)).collect();
        let f = SlopeFit::fit(&hs, &errs);
        assert!((f.slope - 2.5).abs() < 1e-12 && f.rms < 1e-12);
        assert!(SlopeFit::fit(&hs, &[1.0, 0.0, 1.0, 1.0]).slope.is_nan());
    }

    #[test]
    fn csv_uses_exact_header_and_round_trip_floats() {
        let report = ConvergeReport {
            rows: vec![StudyRow {
                problem: Problem::Thm1,
                q: 0,
                alpha: Complex64::new(0.0, 1.0),
                n: 0,
                h: 0.125,
                err_inner_h1: 1e-12,
                err_membrane_h1g: 0.1 + 0.2,
                tail_energy: 0.0,
            }],
            slopes: vec![(0, SlopeFit { slope: 1.0, rms: 0.0 }, SlopeFit { slope: 0.5, rms: 0.0 })],
        };
        let mut out = Vec::new();
        report.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "thm1,0,0.0,1.0,0,0.125,1e-12,0.30000000000000004,0.0");
        assert_eq!(lines[2], "# slope N=0 inner=1.0 membrane=0.5");
    }
}
