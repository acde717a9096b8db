use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semiclassical::cli::{cmd_compare, cmd_levels, cmd_scan, OutputFormat, RunConfig, ScanSection};
use semiclassical::error::{Error, ErrorKind, Result};

#[derive(Parser)]
#[command(
    name = "semiclassical",
    version,
    about = "Semiclassical bound-state energies of 1-D wells"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the quantisation condition for each requested scheme.
    Levels(Common),
    /// Solve and compare against a finite-difference reference spectrum.
    Compare(Common),
    /// Ground-state diagnostics over a grid of one well parameter.
    Scan(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run file; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in well (harmonic, tanh2, gauss, quartic) or shape-class.
    #[arg(long)]
    well: Option<String>,
    /// Well parameter, e.g. `U=12`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    beta: Option<f64>,
    /// plain, first-order, pade, improved, improved-simplified.
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "csv|obj")]
    format: Option<String>,
    #[arg(long = "oracle-N")]
    oracle_n: Option<usize>,
    #[arg(long = "oracle-L")]
    oracle_l: Option<f64>,
    #[arg(long, value_name = "product|quotient")]
    q_form: Option<String>,
    #[arg(long, value_name = "per-well|per-level")]
    q_mode: Option<String>,
    /// Parameter grid for `scan`, e.g. `U=0.5,0.1,0.02`.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    sweep: Option<String>,
}

fn parse_number(key: &str, text: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: `{text}` is not a number")))
}

fn split_pair(text: &str) -> Result<(&str, &str)> {
    text.split_once('=')
        .map(|(k, v)| (k.trim(), v))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{text}`")))
}

impl Common {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(well) = self.well {
            cfg.well = well;
        }
        if cfg.well.is_empty() {
            return Err(Error::Config(
                "no well given (--well or `well` in the config)".into(),
            ));
        }
        for p in &self.params {
            let (key, value) = split_pair(p)?;
            cfg.set_param(key, parse_number(key, value)?)?;
        }
        if let Some(beta) = self.beta {
            cfg.beta = beta;
        }
        if !self.schemes.is_empty() {
            cfg.schemes = self.schemes;
        }
        if let Some(n) = self.n_max {
            cfg.n_max = n;
        }
        if let Some(out) = self.output {
            cfg.output = Some(out);
        }
        if let Some(f) = self.format {
            cfg.format = f.parse::<OutputFormat>()?;
        }
        if let Some(n) = self.oracle_n {
            cfg.oracle.points = Some(n);
        }
        if let Some(l) = self.oracle_l {
            cfg.oracle.half_width = Some(l);
        }
        if self.q_form.is_some() {
            cfg.q_form = self.q_form;
        }
        if self.q_mode.is_some() {
            cfg.q_mode = self.q_mode;
        }
        if let Some(sweep) = self.sweep {
            let (key, list) = split_pair(&sweep)?;
            let values = list
                .split(',')
                .map(|v| parse_number(key, v))
                .collect::<Result<Vec<_>>>()?;
            cfg.scan = Some(ScanSection {
                param: key.to_string(),
                values,
            });
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (common, command): (Common, fn(&RunConfig) -> Result<_>) = match cli.command {
        Command::Levels(c) => (c, cmd_levels),
        Command::Compare(c) => (c, cmd_compare),
        Command::Scan(c) => (c, cmd_scan),
    };
    let cfg = common.into_config()?;
    let text = command(&cfg)?.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.kind().to_string();
            let detail = e
                .get(clap::error::ContextKind::InvalidArg)
                .map(|a| format!(" ({a})"))
                .unwrap_or_default();
            eprintln!("error[config]: {text}{detail}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (tag, code) = match e.kind() {
                ErrorKind::Config => ("config", 2),
                ErrorKind::Numeric => ("numeric", 3),
                ErrorKind::Inapplicable => ("inapplicable", 4),
            };
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error[{tag}]: {message}");
            ExitCode::from(code)
        }
    }
}
