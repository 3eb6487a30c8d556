//! Experiment harness around `otoc-core`: configuration files, the Δ × τ
//! sweep over the three OTOC protocols, CSV/JSON output, variational Gibbs
//! reports and the acceptance checks behind `otoc validate`.

pub mod config;
pub mod output;
pub mod sweep;
pub mod validate;

pub use config::{paper_default_config, Estimator, Evolution, ExperimentConfig, GibbsMode};
pub use output::{fmt_num, parse_csv, write_csv, write_outputs, Format, OracleRow};
pub use sweep::{cell_seed, run_sweep, ResultTable, Row};
pub use validate::{validate, Criterion, Report, ValidateOptions};
