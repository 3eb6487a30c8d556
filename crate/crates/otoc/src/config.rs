//! Experiment configuration: a flat TOML document, full-scale defaults, and
//! command-line overrides applied on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use otoc_core::dynamics::{build_xxz, HamiltonianTerms, TrotterConfig, TrotterOrder, XxzParams};
use otoc_core::protocols::{EvolutionMode, IsmEstimator, ProtocolKind, RunSettings};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GibbsMode {
    /// Exact `e^{-βH}/Z` fed to the density-matrix backend.
    Exact,
    /// Variational thermofield double fed to the statevector backend.
    Vqa,
}

impl GibbsMode {
    pub fn name(self) -> &'static str {
        match self {
            GibbsMode::Exact => "exact",
            GibbsMode::Vqa => "vqa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evolution {
    ExactGate,
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    FiniteAngle,
    SmallAngle,
}

impl From<Estimator> for IsmEstimator {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::FiniteAngle => IsmEstimator::FiniteAngle,
            Estimator::SmallAngle => IsmEstimator::SmallAngle,
        }
    }
}

fn ser_protocols<S: Serializer>(ps: &[ProtocolKind], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| p.name()))
}

fn de_protocols<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ProtocolKind>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    names
        .iter()
        .map(|n| ProtocolKind::from_name(n).ok_or_else(|| serde::de::Error::custom(format!("unknown protocol {n:?}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub deltas: Vec<f64>,
    pub beta: f64,
    pub t_max: f64,
    pub n_points: usize,
    pub shots: u64,
    pub reps: usize,
    #[serde(serialize_with = "ser_protocols", deserialize_with = "de_protocols")]
    pub protocols: Vec<ProtocolKind>,
    pub theta: f64,
    /// Extra ISM couplings for `θ → 0` extrapolation; off when empty.
    pub theta_sweep: Vec<f64>,
    pub ism_estimator: Estimator,
    pub phis: [f64; 4],
    pub gibbs_mode: GibbsMode,
    pub evolution: Evolution,
    pub trotter_order: u8,
    pub trotter_steps_per_unit: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub vqa_layers_a: usize,
    pub vqa_layers_s: usize,
    pub vqa_restarts: usize,
    pub vqa_max_evals: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        paper_default_config()
    }
}

/// Four sites, five anisotropies with the linked field `h = (1-Δ)/2`,
/// fifteen times from 0 to 2.1, 1000 shots × 10 repetitions, `θ = 0.4`.
pub fn paper_default_config() -> ExperimentConfig {
    ExperimentConfig {
        n: 4,
        deltas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        beta: 1.0,
        t_max: 2.1,
        n_points: 15,
        shots: 1000,
        reps: 10,
        protocols: ProtocolKind::ALL.to_vec(),
        theta: 0.4,
        theta_sweep: Vec::new(),
        ism_estimator: Estimator::FiniteAngle,
        phis: [std::f64::consts::FRAC_PI_2; 4],
        gibbs_mode: GibbsMode::Exact,
        evolution: Evolution::Trotter,
        trotter_order: 2,
        trotter_steps_per_unit: 4,
        seed: 20240601,
        output: PathBuf::from("otoc_results"),
        vqa_layers_a: 2,
        vqa_layers_s: 3,
        vqa_restarts: 6,
        vqa_max_evals: 6000,
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("n must be at least 2");
        }
        if self.deltas.is_empty() {
            bail!("deltas must be nonempty");
        }
        if self.deltas.iter().any(|d| !d.is_finite()) {
            bail!("deltas must be finite");
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            bail!("beta must be finite and non-negative");
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            bail!("t_max must be positive");
        }
        if self.n_points < 2 {
            bail!("n_points must be at least 2");
        }
        if self.shots == 0 || self.reps == 0 {
            bail!("shots and reps must be at least 1");
        }
        if self.protocols.is_empty() {
            bail!("protocols must be nonempty");
        }
        if !(self.theta.is_finite() && self.theta > 0.0) || self.theta_sweep.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            bail!("ISM couplings must be positive");
        }
        if self.theta_sweep.len() == 1 {
            bail!("theta_sweep needs at least two values");
        }
        if self.phis.iter().any(|&p| !(p > 0.0 && p <= std::f64::consts::FRAC_PI_2 + 1e-15)) {
            bail!("phis must lie in (0, pi/2]");
        }
        if !matches!(self.trotter_order, 1 | 2) {
            bail!("trotter_order must be 1 or 2");
        }
        if self.trotter_steps_per_unit == 0 {
            bail!("trotter_steps_per_unit must be at least 1");
        }
        if self.gibbs_mode == GibbsMode::Vqa && (self.vqa_layers_a == 0 || self.vqa_layers_s == 0 || self.vqa_max_evals == 0) {
            bail!("VQA layers and budget must be at least 1");
        }
        Ok(())
    }

    /// Evenly spaced times including both endpoints.
    pub fn taus(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| self.t_max * i as f64 / last).collect()
    }

    /// XXZ chain at anisotropy `delta` with the linked field.
    pub fn hamiltonian(&self, delta: f64) -> Result<HamiltonianTerms> {
        Ok(build_xxz(XxzParams::with_linked_field(self.n, delta)?)?)
    }

    pub fn evolution_mode(&self) -> Result<EvolutionMode> {
        Ok(match self.evolution {
            Evolution::ExactGate => EvolutionMode::ExactGate,
            Evolution::Trotter => {
                let order = if self.trotter_order == 1 {
                    TrotterOrder::First
                } else {
                    TrotterOrder::Second
                };
                EvolutionMode::Trotter(TrotterConfig::new(order, self.trotter_steps_per_unit)?)
            }
        })
    }

    pub fn run_settings(&self, seed: u64) -> Result<RunSettings> {
        Ok(RunSettings {
            shots: self.shots,
            reps: self.reps,
            seed,
            evolution: self.evolution_mode()?,
        })
    }
}
