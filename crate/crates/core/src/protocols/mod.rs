//! The three shot-based OTOC measurement protocols.
//!
//! Every protocol circuit uses the register layout
//! `[ancillas | system (n) | purifier (n, purified inputs only)]`. Ancillas
//! start in `|0⟩` and each circuit opens with Hadamards on them.

mod irreversibility;
mod ism;
pub mod povm;
mod rtm;
mod wmm;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use irreversibility::{
    dephase_pm, irreversibility_delta, plus_minus_ensemble, Channel, FnChannel, IsmProcess, IsmRecovery,
};
pub use ism::{
    ism_build, ism_estimate, ism_exact_x, ism_finite_angle_exact, ism_raw_exact, ism_sweep_exact, IsmConfig,
    IsmEstimator,
};
pub use povm::{
    completeness, label_for_bit, measurement_operator, weighted_decomposition, weighted_heisenberg_update,
    weighted_state_update, AlphaNormalization,
};
pub use rtm::{rtm_build, rtm_estimate, rtm_exact, RtmConfig};
pub use wmm::{wmm_build, wmm_estimate, wmm_exact, wmm_exact_average, WmmConfig};

use crate::circuit::{Circuit, Gate};
use crate::dynamics::{exact_propagator, trotter_circuit, TrotterConfig};
use crate::oracle::OtocSpec;
use crate::qcore::{DensityMatrix, PureState, QuantumState};
use crate::stats::{mean, sample_std};
use crate::thermal::{exact_gibbs, exact_purification};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProtocolKind {
    Rtm,
    Wmm,
    Ism,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Rtm, ProtocolKind::Wmm, ProtocolKind::Ism];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Rtm => "RTM",
            ProtocolKind::Wmm => "WMM",
            ProtocolKind::Ism => "ISM",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(s))
    }

    /// Small integer used when deriving per-cell seeds.
    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How `U(τ)` is realized inside protocol circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvolutionMode {
    /// One dense gate equal to the exact propagator.
    ExactGate,
    Trotter(TrotterConfig),
}

impl EvolutionMode {
    pub fn describe(&self) -> String {
        match self {
            EvolutionMode::ExactGate => "exact-gate".to_string(),
            EvolutionMode::Trotter(c) => alloc::format!("trotter(order={},steps_per_unit={})", c.order.as_int(), c.steps_per_unit),
        }
    }
}

/// Thermal input of the system register.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemInput {
    /// `ρ` on the `n` system qubits (density-matrix backend).
    Mixed(DensityMatrix),
    /// A `2n`-qubit purification with the system first and the purifying
    /// register after it (statevector backend).
    Purified(PureState),
}

impl SystemInput {
    /// Exact Gibbs state of the spec as a density matrix.
    pub fn exact_mixed(spec: &OtocSpec) -> Result<Self> {
        Ok(SystemInput::Mixed(exact_gibbs(&spec.gibbs()?)))
    }

    /// Exact Gibbs state of the spec as a purification.
    pub fn exact_purified(spec: &OtocSpec) -> Result<Self> {
        Self::from_tfd(&exact_purification(&spec.gibbs()?))
    }

    /// Wraps a thermofield-double style state whose purifying register
    /// comes first (sites `0..n`) and system second.
    pub fn from_tfd(state: &PureState) -> Result<Self> {
        let total = state.n_qubits();
        if total % 2 != 0 {
            return Err(Error::state("purification needs an even register size"));
        }
        let n = total / 2;
        let order: Vec<usize> = (n..total).chain(0..n).collect();
        Ok(SystemInput::Purified(state.permute_qubits(&order)?))
    }

    pub fn system_qubits(&self) -> usize {
        match self {
            SystemInput::Mixed(r) => r.n_qubits(),
            SystemInput::Purified(p) => p.n_qubits() / 2,
        }
    }

    fn extra_qubits(&self) -> usize {
        match self {
            SystemInput::Mixed(_) => 0,
            SystemInput::Purified(p) => p.n_qubits() / 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemInput::Mixed(_) => "density",
            SystemInput::Purified(_) => "purified",
        }
    }

    /// Full-register input with `ancillas` qubits in `|0⟩` in front.
    pub fn with_ancillas(&self, ancillas: usize) -> QuantumState {
        match self {
            SystemInput::Mixed(r) => {
                let zero = PureState::zero(ancillas).to_density();
                QuantumState::Mixed(zero.tensor(r))
            }
            SystemInput::Purified(p) => QuantumState::Pure(PureState::zero(ancillas).tensor(p)),
        }
    }
}

/// Shot budget, seeding and evolution mode shared by all protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub shots: u64,
    pub reps: usize,
    pub seed: u64,
    pub evolution: EvolutionMode,
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::param("shots must be at least 1"));
        }
        if self.reps == 0 {
            return Err(Error::param("reps must be at least 1"));
        }
        Ok(())
    }
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            shots: 1000,
            reps: 10,
            seed: 0,
            evolution: EvolutionMode::Trotter(TrotterConfig::default()),
        }
    }
}

/// One protocol's OTOC estimate at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub protocol: ProtocolKind,
    pub delta: Option<f64>,
    pub beta: f64,
    pub tau: f64,
    pub mean_c: f64,
    pub std_c: f64,
    pub shots: u64,
    pub reps: usize,
    pub seed: u64,
    pub oracle_c: f64,
    /// Ordered `key=value` annotations (θ, φ, Trotter settings, ...).
    pub metadata: Vec<(String, String)>,
    pub per_rep: Vec<f64>,
    pub flags: Vec<String>,
}

impl EstimateRecord {
    pub(crate) fn from_reps(
        protocol: ProtocolKind,
        spec: &OtocSpec,
        run: &RunSettings,
        per_rep: Vec<f64>,
        oracle_c: f64,
    ) -> Self {
        Self {
            protocol,
            delta: spec.h.xxz_params().map(|p| p.delta),
            beta: spec.beta,
            tau: spec.tau,
            mean_c: mean(&per_rep),
            std_c: sample_std(&per_rep),
            shots: run.shots,
            reps: run.reps,
            seed: run.seed,
            oracle_c,
            metadata: alloc::vec![("evolution".into(), run.evolution.describe())],
            per_rep,
            flags: Vec::new(),
        }
    }

    pub(crate) fn meta(&mut self, key: &str, value: impl fmt::Display) {
        self.metadata.push((key.into(), alloc::format!("{value}")));
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Standard error of `mean_c` over repetitions.
    pub fn standard_error(&self) -> f64 {
        self.std_c / libm::sqrt(self.reps as f64)
    }
}

/// `U(τ)` on an `n`-qubit register.
pub(crate) fn evolution_circuit(spec: &OtocSpec, mode: &EvolutionMode) -> Result<Circuit> {
    let n = spec.n_qubits();
    match mode {
        EvolutionMode::ExactGate => {
            let mut c = Circuit::new(n);
            if spec.tau != 0.0 {
                let u = exact_propagator(&spec.h, spec.tau)?;
                c.push(Gate::local(u, (0..n).collect(), "U")?)?;
            }
            Ok(c)
        }
        EvolutionMode::Trotter(cfg) => trotter_circuit(&spec.h, spec.tau, cfg),
    }
}

/// Builder over the ancilla/system/purifier layout.
pub(crate) struct Layout {
    pub ancillas: usize,
    pub n: usize,
    pub total: usize,
}

impl Layout {
    pub fn new(ancillas: usize, input: &SystemInput) -> Self {
        let n = input.system_qubits();
        Self {
            ancillas,
            n,
            total: ancillas + n + input.extra_qubits(),
        }
    }

    pub fn system_map(&self) -> Vec<usize> {
        (self.ancillas..self.ancillas + self.n).collect()
    }

    pub fn system_sites(&self, local: &[usize]) -> Vec<usize> {
        local.iter().map(|s| s + self.ancillas).collect()
    }
}

pub(crate) fn check_input(spec: &OtocSpec, input: &SystemInput) -> Result<()> {
    if input.system_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits(),
            found: input.system_qubits(),
        });
    }
    Ok(())
}

/// Expectation `(n₀ - n₁) / shots` of a single ±1 read-out.
pub(crate) fn pm_mean(counts: &[u64], shots: u64) -> f64 {
    (counts[0] as f64 - counts[1] as f64) / shots as f64
}
