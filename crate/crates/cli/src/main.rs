use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use thinlayer_cli::{run_converge, run_expand, run_oracle, run_residual, CliError, StudyConfig};

#[derive(Parser)]
#[command(
    name = "thinlayer",
    version,
    about = "Convergence studies for thin-layer asymptotic expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remainder norms over the h grid and fitted log-log slopes, as CSV.
    Converge(StudyArgs),
    /// Construction residuals of a series; exits with status 1 above 1e-9.
    Residual(StudyArgs),
    /// Per-mode coefficients of the exact disk solution, as CSV.
    Oracle(StudyArgs),
    /// Fourier coefficients of every series term, as CSV.
    Expand(StudyArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// INI-style `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// thm1, thm2, beta0, abc0, abc1 or abc_q1_0.
    #[arg(long)]
    problem: Option<String>,
    /// circle[:R], ellipse:a:b or file:<path>.
    #[arg(long)]
    curve: Option<String>,
    /// Comma-separated `k:c` modes, e.g. `1:1.0,3:0.3`; `ek:c` for a single exponential.
    #[arg(long, allow_hyphen_values = true)]
    data: Option<String>,
    /// Membrane contrast, e.g. `i`, `0.5+0.1i` or `i/h` for an h-dependent contrast.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated expansion orders, e.g. `-1,0,1`.
    #[arg(long, allow_hyphen_values = true)]
    orders: Option<String>,
    #[arg(long)]
    h_min: Option<String>,
    #[arg(long)]
    h_max: Option<String>,
    #[arg(long)]
    points: Option<String>,
    /// Fourier modes per function.
    #[arg(long)]
    modes: Option<String>,
    /// eta or eta-1.
    #[arg(long)]
    weight_variant: Option<String>,
    /// Exact problem for `oracle` runs: p1, p2 or u.
    #[arg(long)]
    oracle: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
}

impl StudyArgs {
    fn config(&self) -> Result<StudyConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => StudyConfig::from_ini(&std::fs::read_to_string(path)?)?,
            None => StudyConfig::default(),
        };
        let flags = [
            ("problem", &self.problem),
            ("curve", &self.curve),
            ("data", &self.data),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("q", &self.q),
            ("orders", &self.orders),
            ("h-min", &self.h_min),
            ("h-max", &self.h_max),
            ("points", &self.points),
            ("modes", &self.modes),
            ("weight-variant", &self.weight_variant),
            ("oracle", &self.oracle),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn output(cfg: &StudyConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(command: Command) -> Result<bool, CliError> {
    let (args, kind) = match &command {
        Command::Converge(a) => (a, 0),
        Command::Residual(a) => (a, 1),
        Command::Oracle(a) => (a, 2),
        Command::Expand(a) => (a, 3),
    };
    let cfg = args.config()?;
    let mut ok = true;
    match kind {
        0 => {
            let report = run_converge(&cfg)?;
            let mut w = output(&cfg)?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
        1 => {
            let report = run_residual(&cfg)?;
            let mut w = output(&cfg)?;
            report.write_text(&mut w)?;
            w.flush()?;
            ok = report.passed();
        }
        2 => {
            let report = run_oracle(&cfg)?;
            let mut w = output(&cfg)?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
        _ => {
            let report = run_expand(&cfg)?;
            let mut w = output(&cfg)?;
            report.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("thinlayer: {e}");
            ExitCode::from(2)
        }
    }
}
