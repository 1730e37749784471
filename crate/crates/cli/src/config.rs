use crate::parse::{geometric_grid, parse_complex, parse_orders, Contrast, CurveSpec, DataSpec};
use crate::CliError;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thinlayer_core::inner::check_contrast;
use thinlayer_core::{Complex64, OracleProblem, WeightVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Problem {
    Thm1,
    Thm2,
    Beta0,
    Abc0,
    Abc1,
    AbcQ1Order0,
}

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::Thm1 => "thm1",
            Problem::Thm2 => "thm2",
            Problem::Beta0 => "beta0",
            Problem::Abc0 => "abc0",
            Problem::Abc1 => "abc1",
            Problem::AbcQ1Order0 => "abc_q1_0",
        }
    }

    pub fn is_abc(&self) -> bool {
        matches!(self, Problem::Abc0 | Problem::Abc1 | Problem::AbcQ1Order0)
    }

    /// The exact problem the approximation is measured against.
    pub fn oracle(&self) -> OracleProblem {
        match self {
            Problem::Thm1 | Problem::Abc0 | Problem::Abc1 => OracleProblem::P1,
            Problem::Thm2 | Problem::AbcQ1Order0 => OracleProblem::P2,
            Problem::Beta0 => OracleProblem::ULimit,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s.trim() {
            "thm1" => Problem::Thm1,
            "thm2" => Problem::Thm2,
            "beta0" => Problem::Beta0,
            "abc0" => Problem::Abc0,
            "abc1" => Problem::Abc1,
            "abc_q1_0" => Problem::AbcQ1Order0,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown problem {other:?}; expected thm1, thm2, beta0, abc0, abc1 or abc_q1_0"
                )))
            }
        })
    }
}

fn parse_oracle(s: &str) -> Result<OracleProblem, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "p1" => Ok(OracleProblem::P1),
        "p2" => Ok(OracleProblem::P2),
        "u" => Ok(OracleProblem::ULimit),
        other => Err(CliError::Usage(format!(
            "unknown oracle {other:?}; expected p1, p2 or u"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: Problem,
    pub curve: CurveSpec,
    pub data: DataSpec,
    /// Membrane contrast of the first regime, possibly `h`-dependent.
    pub alpha: Contrast,
    pub beta: Complex64,
    pub q: u32,
    pub orders: Vec<i64>,
    pub h_min: f64,
    pub h_max: f64,
    pub points: usize,
    pub modes: usize,
    pub weight: WeightVariant,
    /// Overrides the oracle implied by the problem in `oracle` runs.
    pub oracle: Option<OracleProblem>,
    pub out: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            problem: Problem::Thm1,
            curve: CurveSpec::Circle { radius: 1.0 },
            data: "1:1".parse().expect("valid default data"),
            alpha: Contrast::fixed(Complex64::new(0.0, 1.0)),
            beta: Complex64::new(0.0, 1.0),
            q: 1,
            orders: vec![0],
            h_min: 2f64.powi(-9),
            h_max: 2f64.powi(-3),
            points: 7,
            modes: 64,
            weight: WeightVariant::Eta,
            oracle: None,
            out: None,
        }
    }
}

impl StudyConfig {
    /// Sets one `key = value` entry. Keys accept `-` or `_` as separator.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{key}: invalid integer {v:?}")))
        };
        let float = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{key}: invalid number {v:?}")))
        };
        match key.as_str() {
            "problem" => self.problem = value.parse()?,
            "curve" => self.curve = value.parse()?,
            "data" => self.data = value.parse()?,
            "alpha" => self.alpha = value.parse()?,
            "beta" => self.beta = parse_complex(value)?,
            "q" => self.q = int(value)? as u32,
            "orders" => self.orders = parse_orders(value)?,
            "h-min" => self.h_min = float(value)?,
            "h-max" => self.h_max = float(value)?,
            "points" => self.points = int(value)?,
            "modes" => self.modes = int(value)?,
            "weight-variant" | "weight" => {
                self.weight = value.parse().map_err(|e| CliError::core("weight variant", e))?
            }
            "oracle" => self.oracle = Some(parse_oracle(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Usage(format!("unknown configuration key {other:?}"))),
        }
        Ok(())
    }

    /// INI-style `key = value` lines; `#`/`;` comments and `[section]` headers are ignored.
    pub fn from_ini(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse {
                line: idx + 1,
                message: format!("expected key = value, got {line:?}"),
            })?;
            cfg.set(k, v).map_err(|e| CliError::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn h_grid(&self) -> Result<Vec<f64>, CliError> {
        geometric_grid(self.h_min, self.h_max, self.points)
    }

    /// Parameter hypotheses that do not need the curve.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.problem {
            Problem::Thm1 | Problem::Abc0 | Problem::Abc1 => {
                check_contrast("α", self.alpha.base).map_err(|e| CliError::core("alpha", e))?
            }
            Problem::Thm2 | Problem::AbcQ1Order0 => {
                check_contrast("β", self.beta).map_err(|e| CliError::core("beta", e))?
            }
            Problem::Beta0 => {}
        }
        if self.alpha.is_crossover() && self.problem != Problem::Thm1 {
            return Err(CliError::Usage("an h-dependent α is only supported for thm1".into()));
        }
        if self.q == 0 {
            return Err(CliError::Usage("q must be ≥ 1".into()));
        }
        if self.modes < 4 {
            return Err(CliError::Usage(format!(
                "at least 4 modes are needed, got {}",
                self.modes
            )));
        }
        let start = if matches!(self.problem, Problem::Thm2 | Problem::Beta0) {
            -1
        } else {
            0
        };
        if let Some(&lo) = self.orders.first() {
            if lo < start {
                return Err(CliError::Usage(format!(
                    "order {lo} is below the first order {start} of {}",
                    self.problem
                )));
            }
        }
        self.h_grid()?;
        Ok(())
    }

    /// Largest requested order.
    pub fn max_order(&self) -> i64 {
        self.orders.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_round_trip() {
        let text = "# study\n[run]\nproblem = thm2\nbeta = 1+0.5i\nq = 2\norders = -1, 0\nh_min = 0.01 ; finest\nweight-variant = eta-1\n";
        let cfg = StudyConfig::from_ini(text).unwrap();
        assert_eq!(cfg.problem, Problem::Thm2);
        assert_eq!(cfg.beta, Complex64::new(1.0, 0.5));
        assert_eq!(cfg.q, 2);
        assert_eq!(cfg.orders, vec![-1, 0]);
        assert_eq!(cfg.h_min, 0.01);
        assert_eq!(cfg.weight, WeightVariant::EtaMinusOne);
        cfg.validate().unwrap();
    }

    #[test]
    fn ini_errors_carry_line_numbers() {
        assert!(matches!(
            StudyConfig::from_ini("problem = thm1\nbogus\n"),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            StudyConfig::from_ini("colour = red\n"),
            Err(CliError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn hypotheses_checked_before_running() {
        let mut cfg = StudyConfig::default();
        cfg.set("alpha", "-1").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = StudyConfig::default();
        cfg.set("problem", "thm1").unwrap();
        cfg.set("orders", "-1").unwrap();
        assert!(cfg.validate().is_err());
        let mut cfg = StudyConfig::default();
        cfg.set("problem", "thm2").unwrap();
        cfg.set("alpha", "i/h").unwrap();
        assert!(cfg.validate().is_err());
    }
}
