use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use otoc::config::{Evolution, ExperimentConfig};
use otoc::output::{oracle_rows, table_json, write_csv, write_oracle_csv, write_outputs, Format, GibbsParams, GibbsReport};
use otoc::sweep::{prepare_vqa, run_sweep, vqa_seed};
use otoc::validate::{validate, ValidateOptions};
use otoc_core::protocols::{AlphaNormalization, ProtocolKind};

#[derive(Parser)]
#[command(name = "otoc", version, about = "OTOC protocol sweeps, exact curves and checks for XXZ chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact OTOC and four-point correlator over the configured grid.
    Oracle(Common),
    /// One protocol over the configured grid.
    Run(Common),
    /// Every configured protocol over the grid (built-in defaults unless a
    /// config file says otherwise).
    Sweep(Common),
    /// Variational Gibbs preparation with fidelity report.
    Gibbs(Common),
    /// Acceptance checks; exits nonzero when any fails.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Flat TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RTM, WMM or ISM.
    #[arg(long)]
    protocol: Option<String>,
    /// Restrict the grid to a single anisotropy.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// ISM coupling in radians.
    #[arg(long)]
    theta: Option<f64>,
    /// Exact propagator gates instead of the product formula.
    #[arg(long)]
    exact_gates: bool,
    /// Output path; the extension is set per format. Standard output when
    /// omitted (single format only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json, or both comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    format: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Also run the full-scale sweep criteria.
    #[arg(long)]
    full: bool,
    /// Negative control: use the sin(φ/2) normalization in the POVM checks.
    #[arg(long)]
    corrupt_alpha: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(name) = &self.protocol {
            let p = ProtocolKind::from_name(name).with_context(|| format!("unknown protocol {name:?}"))?;
            cfg.protocols = vec![p];
        }
        if let Some(d) = self.delta {
            cfg.deltas = vec![d];
        }
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.theta {
            cfg.theta = t;
        }
        if self.exact_gates {
            cfg.evolution = Evolution::ExactGate;
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn formats(&self) -> Result<Vec<Format>> {
        self.format.iter().map(|f| Format::parse(f)).collect()
    }
}

fn emit_table(common: &Common, cfg: &ExperimentConfig) -> Result<()> {
    let table = run_sweep(cfg)?;
    let formats = common.formats()?;
    match &common.out {
        Some(out) => {
            for p in write_outputs(&table, out, &formats)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            let stdout = std::io::stdout().lock();
            match formats.as_slice() {
                [Format::Csv] => write_csv(&table.rows, stdout)?,
                [Format::Json] => serde_json::to_writer_pretty(stdout, &table_json(&table))?,
                _ => bail!("--out is required when writing more than one format"),
            }
        }
    }
    let errors = table.rows.iter().filter(|r| r.is_error()).count();
    if errors > 0 {
        eprintln!("{errors} cell(s) failed; see the error rows");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Oracle(c) => {
            let cfg = c.resolve()?;
            let rows = oracle_rows(&cfg)?;
            match &c.out {
                Some(out) => {
                    let path = out.with_extension("csv");
                    write_oracle_csv(&rows, std::fs::File::create(&path)?)?;
                    eprintln!("wrote {}", path.display());
                }
                None => write_oracle_csv(&rows, std::io::stdout().lock())?,
            }
        }
        Command::Run(c) => {
            let cfg = c.resolve()?;
            if c.protocol.is_none() {
                bail!("run needs --protocol (use sweep for all protocols)");
            }
            emit_table(&c, &cfg)?;
        }
        Command::Sweep(c) => {
            let cfg = c.resolve()?;
            emit_table(&c, &cfg)?;
        }
        Command::Gibbs(c) => {
            let cfg = c.resolve()?;
            let reports: Vec<GibbsReport> = cfg
                .deltas
                .iter()
                .enumerate()
                .map(|(i, &delta)| {
                    let (_, r) = prepare_vqa(&cfg, delta, vqa_seed(cfg.seed, i))?;
                    Ok(GibbsReport {
                        beta: cfg.beta,
                        delta,
                        params: GibbsParams { theta: r.theta, phi: r.phi },
                        free_energy: r.free_energy,
                        exact_free_energy: r.exact_free_energy,
                        fidelity: r.fidelity_to_exact,
                        iterations: r.iterations,
                        converged: r.converged,
                    })
                })
                .collect::<Result<_>>()?;
            let text = serde_json::to_string_pretty(&reports)?;
            match &c.out {
                Some(out) => std::fs::write(out.with_extension("json"), text)?,
                None => writeln!(std::io::stdout().lock(), "{text}")?,
            }
        }
        Command::Validate(v) => {
            let mut opts = ValidateOptions {
                full: v.full,
                ..ValidateOptions::default()
            };
            if v.corrupt_alpha {
                opts.alpha = AlphaNormalization::SinHalfPhi;
            }
            if let Some(p) = &v.config {
                opts.sweep_config = ExperimentConfig::load(p)?;
            }
            let report = validate(&opts);
            for c in &report.criteria {
                eprintln!("{}", c.summary());
            }
            let text = serde_json::to_string_pretty(&report)?;
            match &v.out {
                Some(out) => std::fs::write(out, text)?,
                None => writeln!(std::io::stdout().lock(), "{text}")?,
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
