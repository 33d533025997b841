use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gegenbauer::harness::{
    emit_figure_data, oracle_dump_json, run_bound_report, run_sweep, write_bound_csv, write_sweep_csv, Spacing,
    SweepConfig,
};
use gegenbauer::make_params;

#[derive(Parser)]
#[command(name = "gegenbauer", version, about = "Large-degree Gegenbauer experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Uniform,
    Chebyshev,
}

#[derive(Subcommand)]
enum Cmd {
    /// Envelope error sweep over theta in [0, pi/2].
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "N")]
        n_terms: Option<usize>,
        /// Number of grid points.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum)]
        spacing: Option<GridKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Compare A, B against the oracle and their bounds. Exits 2 on a violation.
    Bounds {
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        n_terms: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot data: 1 envelope (n=10), 2 relative error n=10, 3 relative error n=30.
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Oracle values as decimal-string JSON.
    OracleDump {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 60)]
        digits: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> gegenbauer::Result<u8> {
    match cli.cmd {
        Cmd::Sweep {
            config,
            lambda,
            n,
            n_terms,
            grid,
            spacing,
            out,
            precision,
        } => {
            let mut cfg = match config {
                Some(p) => SweepConfig::load(&p)?,
                None => SweepConfig::new(1.7, 10, 4, 181),
            };
            if let Some(v) = lambda {
                cfg.lambda = v;
            }
            if let Some(v) = n {
                cfg.n = v;
            }
            if let Some(v) = n_terms {
                cfg.n_terms = v;
            }
            if let Some(v) = grid {
                cfg.theta_grid.count = v;
            }
            if let Some(v) = spacing {
                cfg.theta_grid.spacing = match v {
                    GridKind::Uniform => Spacing::Uniform,
                    GridKind::Chebyshev => Spacing::Chebyshev,
                };
            }
            if let Some(v) = precision {
                cfg.precision = v;
            }
            if out.is_some() {
                cfg.output_path = out;
            }
            let report = run_sweep(&cfg)?;
            let mut w = sink(&cfg.output_path)?;
            write_sweep_csv(&report, &mut w)?;
            w.flush()?;
            eprintln!("max_delta {:e} at theta {}", report.max_delta, report.argmax_theta);
            Ok(0)
        }
        Cmd::Bounds {
            lambda,
            n,
            n_terms,
            z,
            out,
        } => {
            let report = run_bound_report(lambda, &n, &n_terms, &z)?;
            let mut w = sink(&out)?;
            write_bound_csv(&report, &mut w)?;
            w.flush()?;
            if report.violations > 0 {
                eprintln!("{} bound violation(s)", report.violations);
                return Ok(2);
            }
            Ok(0)
        }
        Cmd::Figure { id, out } => {
            let mut w = sink(&out)?;
            emit_figure_data(id, &mut w)?;
            w.flush()?;
            Ok(0)
        }
        Cmd::OracleDump {
            lambda,
            n,
            x,
            digits,
            out,
        } => {
            let p = make_params(lambda, n as i64)?;
            let json = oracle_dump_json(&p, &x, digits)?;
            let mut w = sink(&out)?;
            writeln!(w, "{json}")?;
            w.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
