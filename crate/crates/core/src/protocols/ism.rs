//! Irreversibility-susceptibility method: weak coupling `exp(-iθ Z⊗V)`,
//! conjugation by `W(τ)`, inverse coupling, then `σˣ` on the ancilla.
//!
//! For dichotomic `V` and `W` the ancilla ends with
//! `⟨σˣ⟩ = 1 - ½ sin²(2θ) C` exactly, so the small-angle estimator
//! `(1 - ⟨σˣ⟩)/(2θ²)` is biased by the factor `sin²(2θ)/(4θ²)`.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use super::{check_input, evolution_circuit, pm_mean, EstimateRecord, Layout, ProtocolKind, RunSettings, SystemInput};
use crate::circuit::{outcome_distribution, sample_distribution, Basis, Circuit, Gate};
use crate::oracle::{evaluate, OtocSpec};
use crate::qcore::matrix::dichotomic_deviation;
use crate::qcore::Pauli;
use crate::stats::{derive_seed, extrapolate_to_zero, mean, rng, sample_std};
use crate::{Error, Result};

/// Map from the ancilla's `⟨σˣ⟩` at coupling `θ` to an OTOC estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsmEstimator {
    /// `(1 - ⟨σˣ⟩) / (2θ²)`, exact only as `θ → 0`.
    SmallAngle,
    /// `2(1 - ⟨σˣ⟩) / sin²(2θ)`, exact at any `θ` for dichotomic `V`, `W`.
    FiniteAngle,
}

impl IsmEstimator {
    pub fn name(self) -> &'static str {
        match self {
            IsmEstimator::SmallAngle => "small_angle",
            IsmEstimator::FiniteAngle => "finite_angle",
        }
    }

    pub fn apply(self, x: f64, theta: f64) -> f64 {
        match self {
            IsmEstimator::SmallAngle => (1.0 - x) / (2.0 * theta * theta),
            IsmEstimator::FiniteAngle => {
                let s = (2.0 * theta).sin();
                2.0 * (1.0 - x) / (s * s)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsmConfig {
    pub spec: OtocSpec,
    pub input: SystemInput,
    pub theta: f64,
    /// Extra couplings for extrapolation to `θ → 0`; used when it holds at
    /// least two values.
    pub theta_sweep: Vec<f64>,
    pub estimator: IsmEstimator,
    /// Flag the cell when the per-repetition shot noise of the estimate,
    /// `1/(2θ²√shots)`, exceeds this.
    pub noise_ceiling: f64,
    pub run: RunSettings,
}

impl IsmConfig {
    /// Exact Gibbs input, `θ = 0.4`, finite-angle estimator whenever `V`
    /// is dichotomic.
    pub fn new(spec: OtocSpec, run: RunSettings) -> Result<Self> {
        let input = SystemInput::exact_mixed(&spec)?;
        let estimator = if dichotomic_deviation(spec.v.matrix()) <= 1e-10 {
            IsmEstimator::FiniteAngle
        } else {
            IsmEstimator::SmallAngle
        };
        Ok(Self {
            spec,
            input,
            theta: 0.4,
            theta_sweep: Vec::new(),
            estimator,
            noise_ceiling: 1.0,
            run,
        })
    }

    fn validate(&self) -> Result<()> {
        for &t in core::iter::once(&self.theta).chain(&self.theta_sweep) {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::param("coupling theta must be positive"));
            }
        }
        if self.estimator == IsmEstimator::FiniteAngle {
            let d = dichotomic_deviation(self.spec.v.matrix());
            if d > 1e-10 {
                return Err(Error::NotDichotomic(d));
            }
            let s = (2.0 * self.theta).sin();
            if s.abs() < 1e-6 {
                return Err(Error::param("finite-angle estimator undefined where sin(2 theta) = 0"));
            }
        }
        Ok(())
    }
}

/// Ancilla on site 0, read out in `X`.
pub fn ism_build(cfg: &IsmConfig, theta: f64) -> Result<Circuit> {
    check_input(&cfg.spec, &cfg.input)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let lay = Layout::new(1, &cfg.input);
    let map = lay.system_map();
    let u = evolution_circuit(&cfg.spec, &cfg.run.evolution)?;
    let (v, w) = (&cfg.spec.v, &cfg.spec.w);
    let vs = lay.system_sites(v.sites());
    let mut c = Circuit::new(lay.total);
    c.push(Gate::hadamard(0))?;
    c.push(Gate::coupling(v.matrix().clone(), Pauli::Z, theta, 0, vs.clone(), "U_V")?)?;
    c.extend_mapped(&u, &map)?;
    c.push(Gate::local(w.matrix().clone(), lay.system_sites(w.sites()), "W")?)?;
    c.extend_mapped(&u.inverse(), &map)?;
    c.push(Gate::coupling(v.matrix().clone(), Pauli::Z, -theta, 0, vs, "U_V^dag")?)?;
    c.measure(0, Basis::X)?;
    Ok(c)
}

fn x_distribution(cfg: &IsmConfig, theta: f64) -> Result<Vec<f64>> {
    outcome_distribution(&ism_build(cfg, theta)?, &cfg.input.with_ancillas(1))
}

/// Exact ancilla `⟨σˣ⟩` after the circuit at coupling `theta`.
pub fn ism_exact_x(cfg: &IsmConfig, theta: f64) -> Result<f64> {
    let p = x_distribution(cfg, theta)?;
    Ok(p[0] - p[1])
}

pub fn ism_raw_exact(cfg: &IsmConfig, theta: f64) -> Result<f64> {
    Ok(IsmEstimator::SmallAngle.apply(ism_exact_x(cfg, theta)?, theta))
}

pub fn ism_finite_angle_exact(cfg: &IsmConfig, theta: f64) -> Result<f64> {
    Ok(IsmEstimator::FiniteAngle.apply(ism_exact_x(cfg, theta)?, theta))
}

/// Small-angle values at each coupling and their polynomial extrapolation
/// in `θ²` to zero.
pub fn ism_sweep_exact(cfg: &IsmConfig, thetas: &[f64]) -> Result<(Vec<f64>, f64)> {
    if thetas.len() < 2 {
        return Err(Error::param("extrapolation needs at least two couplings"));
    }
    let raw: Vec<f64> = thetas.iter().map(|&t| ism_raw_exact(cfg, t)).collect::<Result<_>>()?;
    let us: Vec<f64> = thetas.iter().map(|t| t * t).collect();
    let extrapolated = extrapolate_to_zero(&us, &raw);
    Ok((raw, extrapolated))
}

pub fn ism_estimate(cfg: &IsmConfig) -> Result<EstimateRecord> {
    cfg.run.validate()?;
    cfg.validate()?;
    let shots = cfg.run.shots;
    let probs = x_distribution(cfg, cfg.theta)?;
    let mut per_rep = Vec::with_capacity(cfg.run.reps);
    let mut raw = Vec::with_capacity(cfg.run.reps);
    for rep in 0..cfg.run.reps {
        let mut r = rng(derive_seed(cfg.run.seed, &[rep as u64, 0]));
        let x = pm_mean(&sample_distribution(&probs, shots, &mut r), shots);
        per_rep.push(cfg.estimator.apply(x, cfg.theta));
        raw.push(IsmEstimator::SmallAngle.apply(x, cfg.theta));
    }
    let oracle = evaluate(&cfg.spec)?;
    let mut rec = EstimateRecord::from_reps(ProtocolKind::Ism, &cfg.spec, &cfg.run, per_rep, oracle.c);
    rec.meta("input", cfg.input.kind());
    rec.meta("theta", cfg.theta);
    rec.meta("estimator", cfg.estimator.name());
    rec.meta("raw_mean", mean(&raw));
    rec.meta("raw_std", sample_std(&raw));

    let predicted_noise = |t: f64| 1.0 / (2.0 * t * t * (shots as f64).sqrt());
    if predicted_noise(cfg.theta) > cfg.noise_ceiling {
        rec.flags.push("theta_too_small".into());
    }
    if cfg.theta_sweep.len() >= 2 {
        let sweep_probs: Vec<Vec<f64>> = cfg
            .theta_sweep
            .iter()
            .map(|&t| x_distribution(cfg, t))
            .collect::<Result<_>>()?;
        let us: Vec<f64> = cfg.theta_sweep.iter().map(|t| t * t).collect();
        let extrapolated: Vec<f64> = (0..cfg.run.reps)
            .map(|rep| {
                let ys: Vec<f64> = cfg
                    .theta_sweep
                    .iter()
                    .zip(&sweep_probs)
                    .enumerate()
                    .map(|(k, (&t, p))| {
                        let mut r = rng(derive_seed(cfg.run.seed, &[rep as u64, 1 + k as u64]));
                        IsmEstimator::SmallAngle.apply(pm_mean(&sample_distribution(p, shots, &mut r), shots), t)
                    })
                    .collect();
                extrapolate_to_zero(&us, &ys)
            })
            .collect();
        let sweep: Vec<alloc::string::String> = cfg.theta_sweep.iter().map(|t| alloc::format!("{t}")).collect();
        rec.meta("theta_sweep", sweep.join("/"));
        rec.meta("extrapolated_mean", mean(&extrapolated));
        rec.meta("extrapolated_std", sample_std(&extrapolated));
        if cfg.theta_sweep.iter().any(|&t| predicted_noise(t) > cfg.noise_ceiling) {
            rec.flags.push("sweep_theta_too_small".into());
        }
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_xxz, XxzParams};
    use crate::oracle::LocalOperator;
    use crate::protocols::EvolutionMode;

    fn cfg(tau: f64) -> IsmConfig {
        let h = build_xxz(XxzParams::new(2, 0.5, 0.25).unwrap()).unwrap();
        let spec = OtocSpec::sigma_x_pair(h, 1.0, tau).unwrap();
        let run = RunSettings {
            shots: 1000,
            reps: 3,
            seed: 5,
            evolution: EvolutionMode::ExactGate,
        };
        IsmConfig::new(spec, run).unwrap()
    }

    #[test]
    fn zero_time_cancels() {
        let c = cfg(0.0);
        assert!((ism_exact_x(&c, 0.4).unwrap() - 1.0).abs() < 1e-12);
        let rec = ism_estimate(&c).unwrap();
        assert_eq!(rec.mean_c, 0.0);
    }

    #[test]
    fn null_coupling_is_identity_on_ancilla() {
        let mut c = cfg(0.9);
        let zero = crate::ComplexMatrix::zeros(2, 2);
        c.spec.v = LocalOperator::new(zero, alloc::vec![1]).unwrap();
        c.estimator = IsmEstimator::SmallAngle;
        assert!((ism_exact_x(&c, 0.4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_angle_is_exact_and_raw_is_biased() {
        let c = cfg(0.7);
        let oracle = evaluate(&c.spec).unwrap().c;
        for theta in [0.4, 0.2, 0.7] {
            assert!((ism_finite_angle_exact(&c, theta).unwrap() - oracle).abs() < 1e-10);
            let ratio = ism_raw_exact(&c, theta).unwrap() / oracle;
            let expected = (2.0 * theta).sin().powi(2) / (4.0 * theta * theta);
            assert!((ratio - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn extrapolation_converges() {
        let c = cfg(0.7);
        let oracle = evaluate(&c.spec).unwrap().c;
        let (_, ex) = ism_sweep_exact(&c, &[0.2, 0.1, 0.05]).unwrap();
        assert!((ex - oracle).abs() < 1e-6);
    }

    #[test]
    fn sweep_metadata_and_flags() {
        let mut c = cfg(0.7);
        c.theta_sweep = alloc::vec![0.2, 0.1, 0.05];
        let rec = ism_estimate(&c).unwrap();
        assert!(rec.metadata_value("extrapolated_mean").is_some());
        assert!(rec.flags.iter().any(|f| f == "sweep_theta_too_small"));
        assert!(rec.flags.iter().all(|f| f != "theta_too_small"));
    }

    #[test]
    fn invalid_theta_rejected() {
        let mut c = cfg(0.7);
        c.theta = 0.0;
        assert!(ism_estimate(&c).is_err());
    }
}
