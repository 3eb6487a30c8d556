//! The Δ × τ grid over each protocol, run cell by cell in parallel with
//! per-cell seeds.

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;
use otoc_core::oracle::{evaluate, OtocSpec};
use otoc_core::protocols::{
    ism_estimate, rtm_estimate, wmm_estimate, EstimateRecord, IsmConfig, ProtocolKind, RtmConfig, SystemInput, WmmConfig,
};
use otoc_core::stats::derive_seed;
use otoc_core::thermal::{tfd_state, vqa_optimize, EntropyMode, GibbsSpec, NelderMead, TfdAnsatz, VqaOptions, VqaResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, GibbsMode};

/// One output row: a protocol's estimate at one `(Δ, τ)` joined with the
/// exact value, or an error row naming the failed precondition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub protocol: String,
    pub delta: f64,
    pub beta: f64,
    pub tau: f64,
    pub mean_c: f64,
    pub std_c: f64,
    pub oracle_c: f64,
    pub shots: u64,
    pub reps: usize,
    pub seed: u64,
    pub gibbs_mode: String,
    pub evolution_mode: String,
    pub extra: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_rep: Vec<f64>,
}

impl Row {
    pub fn extra_value(&self, key: &str) -> Option<&str> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_error(&self) -> bool {
        self.extra_value("error").is_some()
    }

    pub fn standard_error(&self) -> f64 {
        self.std_c / (self.reps as f64).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Wallclock {
    pub started_unix_s: f64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub versions: BTreeMap<String, String>,
    pub wallclock: Wallclock,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("otoc".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("otoc-core".to_string(), otoc_core::VERSION.to_string()),
    ])
}

/// Seed of grid cell `(protocol, Δ index, τ index)`; repetitions derive
/// their own streams from it.
pub fn cell_seed(master: u64, protocol: ProtocolKind, delta_index: usize, tau_index: usize) -> u64 {
    derive_seed(master, &[protocol.index(), delta_index as u64, tau_index as u64])
}

/// Seed of the variational preparation at one anisotropy.
pub fn vqa_seed(master: u64, delta_index: usize) -> u64 {
    derive_seed(master, &[u64::MAX, delta_index as u64])
}

/// Variational Gibbs preparation at one anisotropy.
pub fn prepare_vqa(cfg: &ExperimentConfig, delta: f64, seed: u64) -> Result<(TfdAnsatz, VqaResult)> {
    let spec = GibbsSpec::new(cfg.hamiltonian(delta)?, cfg.beta)?;
    let ansatz = TfdAnsatz::zeros(cfg.n, cfg.vqa_layers_a, cfg.vqa_layers_s)?;
    let options = VqaOptions {
        restarts: cfg.vqa_restarts,
        max_evals: cfg.vqa_max_evals,
        seed,
        entropy: EntropyMode::Exact,
        simplex: NelderMead::default(),
    };
    let result = vqa_optimize(&spec, &ansatz, &options)?;
    let best = ansatz.with_params(result.theta.clone(), result.phi.clone())?;
    Ok((best, result))
}

fn thermal_input(cfg: &ExperimentConfig, delta_index: usize) -> Result<(SystemInput, Vec<(String, String)>)> {
    let delta = cfg.deltas[delta_index];
    match cfg.gibbs_mode {
        GibbsMode::Exact => {
            let spec = OtocSpec::sigma_x_pair(cfg.hamiltonian(delta)?, cfg.beta, 0.0)?;
            Ok((SystemInput::exact_mixed(&spec)?, Vec::new()))
        }
        GibbsMode::Vqa => {
            let (ansatz, result) = prepare_vqa(cfg, delta, vqa_seed(cfg.seed, delta_index))?;
            let notes = vec![("vqa_fidelity".to_string(), result.fidelity_to_exact.to_string())];
            Ok((SystemInput::from_tfd(&tfd_state(&ansatz)?)?, notes))
        }
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    protocol: ProtocolKind,
    delta_index: usize,
    tau: f64,
    seed: u64,
    input: &SystemInput,
) -> Result<EstimateRecord> {
    let spec = OtocSpec::sigma_x_pair(cfg.hamiltonian(cfg.deltas[delta_index])?, cfg.beta, tau)?;
    let run = cfg.run_settings(seed)?;
    let rec = match protocol {
        ProtocolKind::Rtm => {
            let mut c = RtmConfig::new(spec, run)?;
            c.input = input.clone();
            rtm_estimate(&c)?
        }
        ProtocolKind::Wmm => {
            let mut c = WmmConfig::new(spec, run)?;
            c.input = input.clone();
            c.phis = cfg.phis;
            wmm_estimate(&c)?
        }
        ProtocolKind::Ism => {
            let mut c = IsmConfig::new(spec, run)?;
            c.input = input.clone();
            c.theta = cfg.theta;
            c.theta_sweep = cfg.theta_sweep.clone();
            c.estimator = cfg.ism_estimator.into();
            ism_estimate(&c)?
        }
    };
    Ok(rec)
}

fn record_row(cfg: &ExperimentConfig, rec: EstimateRecord, delta: f64, notes: &[(String, String)]) -> Row {
    let mut extra: Vec<(String, String)> = rec.metadata.iter().filter(|(k, _)| k != "evolution").cloned().collect();
    extra.extend(notes.iter().cloned());
    if !rec.flags.is_empty() {
        extra.push(("flags".into(), rec.flags.join("|")));
    }
    Row {
        protocol: rec.protocol.name().into(),
        delta,
        beta: rec.beta,
        tau: rec.tau,
        mean_c: rec.mean_c,
        std_c: rec.std_c,
        oracle_c: rec.oracle_c,
        shots: rec.shots,
        reps: rec.reps,
        seed: rec.seed,
        gibbs_mode: cfg.gibbs_mode.name().into(),
        evolution_mode: rec.metadata_value("evolution").unwrap_or_default().into(),
        extra,
        per_rep: rec.per_rep,
    }
}

fn error_row(cfg: &ExperimentConfig, protocol: ProtocolKind, delta: f64, tau: f64, seed: u64, err: &anyhow::Error) -> Row {
    let name = err
        .downcast_ref::<otoc_core::Error>()
        .map(|e| e.kind().to_string())
        .unwrap_or_else(|| err.to_string());
    let oracle_c = cfg
        .hamiltonian(delta)
        .ok()
        .and_then(|h| OtocSpec::sigma_x_pair(h, cfg.beta, tau).ok())
        .and_then(|s| evaluate(&s).ok())
        .map_or(f64::NAN, |v| v.c);
    Row {
        protocol: protocol.name().into(),
        delta,
        beta: cfg.beta,
        tau,
        mean_c: f64::NAN,
        std_c: f64::NAN,
        oracle_c,
        shots: cfg.shots,
        reps: cfg.reps,
        seed,
        gibbs_mode: cfg.gibbs_mode.name().into(),
        evolution_mode: cfg.evolution_mode().map(|m| m.describe()).unwrap_or_default(),
        extra: vec![("error".into(), name)],
        per_rep: Vec::new(),
    }
}

/// Every `(protocol, Δ, τ)` cell of the configured grid, in that nesting
/// order. Results do not depend on thread count or scheduling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();
    let taus = cfg.taus();
    let inputs: Vec<Result<(SystemInput, Vec<(String, String)>), String>> = (0..cfg.deltas.len())
        .into_par_iter()
        .map(|di| thermal_input(cfg, di).map_err(|e| e.to_string()))
        .collect();

    let cells: Vec<(ProtocolKind, usize, usize)> = cfg
        .protocols
        .iter()
        .flat_map(|&p| (0..cfg.deltas.len()).flat_map(move |di| (0..cfg.n_points).map(move |ti| (p, di, ti))))
        .collect();
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(p, di, ti)| {
            let (delta, tau) = (cfg.deltas[di], taus[ti]);
            let seed = cell_seed(cfg.seed, p, di, ti);
            let outcome = inputs[di]
                .as_ref()
                .map_err(|e| anyhow::anyhow!("gibbs_preparation: {e}"))
                .and_then(|(input, notes)| run_cell(cfg, p, di, tau, seed, input).map(|r| (r, notes)));
            match outcome {
                Ok((rec, notes)) => record_row(cfg, rec, delta, notes),
                Err(e) => error_row(cfg, p, delta, tau, seed, &e),
            }
        })
        .collect();

    Ok(ResultTable {
        config: cfg.clone(),
        rows,
        versions: versions(),
        wallclock: Wallclock {
            started_unix_s: started,
            elapsed_s: clock.elapsed().as_secs_f64(),
        },
    })
}
