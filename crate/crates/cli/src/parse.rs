//! Small parsers for the textual study parameters.

use crate::CliError;
use std::str::FromStr;
use thinlayer_core::{BoundaryCurve, Complex64, TorusFunction};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn float(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("invalid number {s:?}")))
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`; a bare `i` or `-i` is `±1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(usage("empty complex number"));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(float(&t)?, 0.0));
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (float(&body[..j])?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => float(other)?,
    };
    Ok(Complex64::new(re, im))
}

/// A contrast, possibly tied to the layer width as `c/h^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    pub base: Complex64,
    /// `α(h) = base · h^{-power}`; zero for a fixed contrast.
    pub power: i32,
}

impl Contrast {
    pub fn fixed(base: Complex64) -> Self {
        Self { base, power: 0 }
    }

    pub fn at(&self, h: f64) -> Complex64 {
        self.base * h.powi(-self.power)
    }

    pub fn is_crossover(&self) -> bool {
        self.power != 0
    }
}

impl FromStr for Contrast {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        match s.split_once("/h") {
            None => Ok(Self::fixed(parse_complex(s)?)),
            Some((base, rest)) => {
                let power = match rest {
                    "" => 1,
                    p => p
                        .strip_prefix('^')
                        .and_then(|p| p.parse::<i32>().ok())
                        .filter(|&p| p > 0)
                        .ok_or_else(|| usage(format!("invalid contrast {s:?}; expected c, c/h or c/h^p")))?,
                };
                Ok(Self {
                    base: parse_complex(base)?,
                    power,
                })
            }
        }
    }
}

/// Boundary data as a list of `k:c` entries. Plain `k ≥ 1` adds `Re(c e^{ikθ})`-type real
/// modes (`1:1` is `cos θ`); `ek:c` adds the single exponential `c e^{ikθ}`, `k` of any sign.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    real: Vec<(u32, Complex64)>,
    exponential: Vec<(i64, Complex64)>,
}

impl DataSpec {
    pub fn build(&self, period: f64, modes: usize) -> Result<TorusFunction, CliError> {
        let top = self
            .real
            .iter()
            .map(|(k, _)| *k as u64)
            .chain(self.exponential.iter().map(|(k, _)| k.unsigned_abs()))
            .max()
            .unwrap_or(0);
        if top > modes as u64 {
            return Err(usage(format!("data mode {top} exceeds the {modes} resolved modes")));
        }
        let mut f = TorusFunction::real_from_modes(period, modes, &self.real);
        f += &TorusFunction::from_modes(period, modes, &self.exponential);
        Ok(f)
    }
}

impl FromStr for DataSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut spec = DataSpec {
            real: Vec::new(),
            exponential: Vec::new(),
        };
        let s = s.trim();
        if s.is_empty() || s == "0" || s == "zero" {
            return Ok(spec);
        }
        for entry in s.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (k, c) = entry
                .split_once(':')
                .ok_or_else(|| usage(format!("data entry {entry:?} is not of the form k:c")))?;
            let c = parse_complex(c)?;
            if let Some(k) = k.trim().strip_prefix('e') {
                let k = k.parse::<i64>().map_err(|_| usage(format!("invalid mode {k:?}")))?;
                spec.exponential.push((k, c));
            } else {
                let k = k
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| usage(format!("invalid mode {k:?}")))?;
                if k == 0 {
                    return Err(usage("data must have zero mean; mode 0 is not allowed"));
                }
                spec.real.push((k, c));
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    File(String),
}

impl CurveSpec {
    pub fn build(&self, modes: usize) -> Result<BoundaryCurve, CliError> {
        let curve = match self {
            CurveSpec::Circle { radius } => BoundaryCurve::circle(*radius, modes),
            CurveSpec::Ellipse { a, b } => BoundaryCurve::ellipse(*a, *b, modes),
            CurveSpec::File(path) => BoundaryCurve::from_path(std::path::Path::new(path), modes),
        };
        curve.map_err(|e| CliError::core("curve", e))
    }
}

impl FromStr for CurveSpec {
    type Err = CliError;

    /// `circle`, `circle:R`, `ellipse:a:b` or `file:<path>`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "circle" => Ok(CurveSpec::Circle {
                radius: if rest.is_empty() { 1.0 } else { float(rest)? },
            }),
            "ellipse" => {
                let (a, b) = rest
                    .split_once(':')
                    .ok_or_else(|| usage(format!("ellipse needs two semi-axes, got {s:?}")))?;
                Ok(CurveSpec::Ellipse {
                    a: float(a)?,
                    b: float(b)?,
                })
            }
            "file" if !rest.is_empty() => Ok(CurveSpec::File(rest.to_string())),
            _ => Err(usage(format!(
                "unknown curve {s:?}; expected circle[:R], ellipse:a:b or file:path"
            ))),
        }
    }
}

/// Comma-separated expansion orders, e.g. `-1,0,1`.
pub fn parse_orders(s: &str) -> Result<Vec<i64>, CliError> {
    let mut orders = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| usage(format!("invalid order {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if orders.is_empty() {
        return Err(usage("at least one order is required"));
    }
    orders.sort_unstable();
    orders.dedup();
    Ok(orders)
}

/// `points` widths spaced geometrically from `h_max` down to `h_min`, in increasing order.
pub fn geometric_grid(h_min: f64, h_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(h_min > 0.0 && h_min <= h_max) || points == 0 || (points == 1 && h_min != h_max) {
        return Err(usage(format!("invalid h grid [{h_min}, {h_max}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![h_min]);
    }
    let ratio = (h_min / h_max).ln();
    let mut grid: Vec<f64> = (0..points)
        .map(|j| h_max * (ratio * j as f64 / (points - 1) as f64).exp())
        .collect();
    grid[points - 1] = h_min;
    grid.reverse();
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("1e-12i").unwrap(), c(0.0, 1e-12));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1e-2-3e-4i").unwrap(), c(1e-2, -3e-4));
        assert_eq!(parse_complex("-2.5e+1+i").unwrap(), c(-25.0, 1.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn contrast_forms() {
        let a: Contrast = "i/h".parse().unwrap();
        assert!(a.is_crossover());
        assert_eq!(a.at(0.25), c(0.0, 4.0));
        let b: Contrast = "2/h^2".parse().unwrap();
        assert_eq!(b.at(0.5), c(8.0, 0.0));
        assert!(!"i".parse::<Contrast>().unwrap().is_crossover());
        assert!("i/h^0".parse::<Contrast>().is_err());
    }

    #[test]
    fn data_forms() {
        let tau = 2.0 * std::f64::consts::PI;
        let f = "1:1.0, 3:0.3".parse::<DataSpec>().unwrap().build(tau, 8).unwrap();
        assert!((f.eval(0.0).re - 1.3).abs() < 1e-15);
        let g = "e-2:i".parse::<DataSpec>().unwrap().build(tau, 8).unwrap();
        assert_eq!(g.coeff(-2), c(0.0, 1.0));
        assert!("0:1".parse::<DataSpec>().is_err());
        assert!("9:1".parse::<DataSpec>().unwrap().build(tau, 8).is_err());
        assert!("zero".parse::<DataSpec>().unwrap().build(tau, 4).unwrap().is_zero());
    }

    #[test]
    fn curve_forms() {
        assert_eq!(
            "circle".parse::<CurveSpec>().unwrap(),
            CurveSpec::Circle { radius: 1.0 }
        );
        assert_eq!(
            "ellipse:1.5:1".parse::<CurveSpec>().unwrap(),
            CurveSpec::Ellipse { a: 1.5, b: 1.0 }
        );
        assert!("square".parse::<CurveSpec>().is_err());
    }

    #[test]
    fn grid_is_geometric_and_sorted() {
        let g = geometric_grid(2f64.powi(-9), 2f64.powi(-3), 7).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 2f64.powi(-9));
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 2.0).abs() < 1e-12);
        }
        assert!(geometric_grid(0.1, 0.01, 3).is_err());
        assert_eq!(parse_orders("1, -1,0,1").unwrap(), vec![-1, 0, 1]);
    }
}
