//! Experiment drivers: envelope sweeps over theta, bound-validity reports, figure data and
//! oracle dumps. Output is deterministic for a fixed configuration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bigreal::to_decimal;
use crate::domain::{make_params, map_point, Params};
use crate::error::{Error, Result};
use crate::oracle::{oracle_ab, oracle_c, oracle_d, oracle_envelope};
use crate::uniform::{ab_cauchy, ab_series, IntervalEvaluator};

/// Relative errors below this are written as this value before taking logs.
pub const DELTA_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Chebyshev,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda: f64,
    pub n: u32,
    /// Number of retained A_s terms.
    #[serde(rename = "N")]
    pub n_terms: usize,
    pub theta_grid: GridSpec,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default = "default_precision")]
    pub precision: u32,
}

fn default_precision() -> u32 {
    60
}

impl SweepConfig {
    pub fn new(lambda: f64, n: u32, n_terms: usize, count: usize) -> Self {
        SweepConfig {
            lambda,
            n,
            n_terms,
            theta_grid: GridSpec {
                count,
                spacing: Spacing::Uniform,
            },
            output_path: None,
            precision: default_precision(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: SweepConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        make_params(self.lambda, self.n as i64)?;
        if self.n == 0 {
            return Err(Error::Config("the envelope needs n >= 1".into()));
        }
        if self.theta_grid.count < 2 {
            return Err(Error::Config(format!("grid count must be >= 2, got {}", self.theta_grid.count)));
        }
        if self.precision < 50 {
            return Err(Error::Config(format!("oracle precision must be >= 50 digits, got {}", self.precision)));
        }
        if self.n_terms > crate::coeff::N_MAX {
            return Err(Error::Config(format!("N = {} exceeds {}", self.n_terms, crate::coeff::N_MAX)));
        }
        Ok(())
    }
}

/// Grid on [0, pi/2] including both endpoints.
pub fn theta_grid(spec: &GridSpec) -> Vec<f64> {
    let m = (spec.count - 1) as f64;
    (0..spec.count)
        .map(|k| {
            let t = k as f64 / m;
            let x = match spec.spacing {
                Spacing::Uniform => FRAC_PI_2 * t,
                Spacing::Chebyshev => FRAC_PI_2 * 0.5 * (1.0 - (PI * t).cos()),
            };
            if k + 1 == spec.count {
                FRAC_PI_2
            } else {
                x
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub exact: f64,
    pub approx: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub max_delta: f64,
    pub argmax_theta: f64,
}

/// Asymptotic envelope from C_n^(lambda) and the scaled C_{n-1}^(lambda+1).
pub struct EnvelopeEvaluator {
    lambda: f64,
    n: u32,
    c: IntervalEvaluator,
    dc: IntervalEvaluator,
}

impl EnvelopeEvaluator {
    pub fn new(params: &Params, n_terms: usize) -> Result<Self> {
        if params.n == 0 {
            return Err(Error::Domain("the envelope needs n >= 1".into()));
        }
        let q = make_params(params.lambda + 1.0, params.n as i64 - 1)?;
        Ok(EnvelopeEvaluator {
            lambda: params.lambda,
            n: params.n,
            c: IntervalEvaluator::new(params, n_terms)?,
            dc: IntervalEvaluator::new(&q, n_terms)?,
        })
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        let a = self.c.eval(theta)?.value;
        let b = 2.0 * self.lambda / self.n as f64 * self.dc.eval(theta)?.value;
        Ok(a.hypot(b))
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let params = make_params(config.lambda, config.n as i64)?;
    let env = EnvelopeEvaluator::new(&params, config.n_terms)?;
    let grid = theta_grid(&config.theta_grid);
    let rows = grid
        .par_iter()
        .map(|&theta| -> Result<SweepRow> {
            let exact = oracle_envelope(&params, theta, config.precision).to_f64();
            let approx = env.eval(theta)?;
            Ok(SweepRow {
                theta,
                exact,
                approx,
                delta: (exact - approx).abs() / exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut max_delta, mut argmax_theta) = (0.0, 0.0);
    for r in &rows {
        if r.delta > max_delta {
            max_delta = r.delta;
            argmax_theta = r.theta;
        }
    }
    Ok(SweepReport {
        config: config.clone(),
        rows,
        max_delta,
        argmax_theta,
    })
}

fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut w: W) -> Result<()> {
    let c = &report.config;
    writeln!(w, "# lambda={} n={} N={}", c.lambda, c.n, c.n_terms)?;
    writeln!(
        w,
        "# grid={} {:?} precision={}",
        c.theta_grid.count, c.theta_grid.spacing, c.precision
    )?;
    writeln!(w, "# max_delta={} argmax_theta={}", g17(report.max_delta), g17(report.argmax_theta))?;
    writeln!(w, "# version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "theta,exact,approx,delta")?;
    for r in &report.rows {
        writeln!(w, "{},{},{},{}", g17(r.theta), g17(r.exact), g17(r.approx), g17(r.delta))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    A,
    B,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub n: u32,
    pub n_terms: usize,
    pub z: f64,
    pub quantity: Quantity,
    pub value: f64,
    pub actual: f64,
    pub bound: f64,
    pub ratio: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub violations: usize,
}

/// Slack for rounding in the f64 evaluation when comparing against a bound.
const ROUNDING_SLACK: f64 = 1e-13;

/// Actual A, B errors against the oracle next to the computed bounds, at real z > 1.
pub fn run_bound_report(lambda: f64, n_list: &[u32], n_terms: &[usize], z_list: &[f64]) -> Result<BoundReport> {
    let mut cases = Vec::new();
    for &n in n_list {
        for &nt in n_terms {
            for &z in z_list {
                if !(z > 1.0) {
                    return Err(Error::Domain(format!("bound report needs real z > 1, got {z}")));
                }
                cases.push((n, nt, z));
            }
        }
    }
    let rows: Vec<[BoundRow; 2]> = cases
        .par_iter()
        .map(|&(n, nt, z)| -> Result<[BoundRow; 2]> {
            let p = make_params(lambda, n as i64)?;
            let ab = if z - 1.0 >= crate::uniform::DELTA_EVAL {
                ab_series(&p, &map_point(num_complex::Complex64::new(z, 0.0))?, nt)?
            } else {
                ab_cauchy(&p, num_complex::Complex64::new(z, 0.0), nt)?
            };
            let (oa, ob) = oracle_ab(&p, z, 40)?;
            let row = |quantity, value: f64, exact: f64, bound: f64| {
                let actual = (value - exact).abs();
                let ratio = if bound > 0.0 {
                    actual / bound
                } else if actual == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                BoundRow {
                    lambda,
                    n,
                    n_terms: nt,
                    z,
                    quantity,
                    value,
                    actual,
                    bound,
                    ratio,
                    ok: actual <= bound + ROUNDING_SLACK * value.abs(),
                }
            };
            Ok([
                row(Quantity::A, ab.a.re, oa.to_f64(), ab.bound_a),
                row(Quantity::B, ab.b.re, ob.to_f64(), ab.bound_b),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<BoundRow> = rows.into_iter().flatten().collect();
    let violations = rows.iter().filter(|r| !r.ok).count();
    Ok(BoundReport { rows, violations })
}

pub fn write_bound_csv<W: Write>(report: &BoundReport, mut w: W) -> Result<()> {
    writeln!(w, "# violations={}", report.violations)?;
    writeln!(w, "lambda,n,N,z,quantity,value,actual,bound,ratio,ok")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{:?},{},{},{},{},{}",
            r.lambda,
            r.n,
            r.n_terms,
            r.z,
            r.quantity,
            g17(r.value),
            g17(r.actual),
            g17(r.bound),
            g17(r.ratio),
            r.ok
        )?;
    }
    Ok(())
}

/// Rows (theta, log10 value): id 1 is the n=10 envelope, 2 and 3 the relative error at n=10 and n=30.
pub fn figure_data(figure: u8) -> Result<Vec<(f64, f64)>> {
    let n = match figure {
        1 | 2 => 10,
        3 => 30,
        _ => return Err(Error::Domain(format!("figure must be 1, 2 or 3, got {figure}"))),
    };
    if figure == 1 {
        let p = make_params(1.7, 10)?;
        let grid = theta_grid(&GridSpec {
            count: 181,
            spacing: Spacing::Uniform,
        });
        return Ok(grid
            .par_iter()
            .map(|&t| (t, oracle_envelope(&p, t, 60).to_f64().log10()))
            .collect());
    }
    let report = run_sweep(&SweepConfig::new(1.7, n, 4, 181))?;
    Ok(report
        .rows
        .iter()
        .map(|r| (r.theta, r.delta.max(DELTA_FLOOR).log10()))
        .collect())
}

pub fn emit_figure_data<W: Write>(figure: u8, mut w: W) -> Result<()> {
    let rows = figure_data(figure)?;
    writeln!(w, "# figure={figure}")?;
    writeln!(w, "theta,log10_value")?;
    for (t, v) in rows {
        writeln!(w, "{},{}", g17(t), g17(v))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct OraclePoint {
    pub x: f64,
    pub c: String,
    pub d: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleDump {
    pub lambda: f64,
    pub n: u32,
    pub digits: u32,
    pub points: Vec<OraclePoint>,
}

/// Decimal-string oracle values; D, A and B only for x > 1.
pub fn oracle_dump(params: &Params, xs: &[f64], digits: u32) -> Result<OracleDump> {
    let points = xs
        .iter()
        .map(|&x| -> Result<OraclePoint> {
            let c = to_decimal(&oracle_c(params, x, digits), digits);
            if x > 1.0 {
                let d = oracle_d(params, x, digits)?;
                let (a, b) = oracle_ab(params, x, digits)?;
                Ok(OraclePoint {
                    x,
                    c,
                    d: Some(to_decimal(&d, digits)),
                    a: Some(to_decimal(&a, digits)),
                    b: Some(to_decimal(&b, digits)),
                })
            } else {
                Ok(OraclePoint { x, c, d: None, a: None, b: None })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleDump {
        lambda: params.lambda,
        n: params.n,
        digits,
        points,
    })
}

pub fn oracle_dump_json(params: &Params, xs: &[f64], digits: u32) -> Result<String> {
    let dump = oracle_dump(params, xs, digits)?;
    serde_json::to_string_pretty(&dump).map_err(|e| Error::Config(e.to_string()))
}
