//! Weak-measurement method: four probe couplings of tunable strength whose
//! α-weighted outcome products average to `1 - C/4`.

use alloc::vec::Vec;

use super::povm::{label_for_bit, AlphaNormalization};
use super::{check_input, evolution_circuit, EstimateRecord, Layout, ProtocolKind, RunSettings, SystemInput};
use crate::circuit::{outcome_distribution, sample_distribution, Basis, Circuit, Gate};
use crate::oracle::{evaluate, LocalOperator, OtocSpec};
use crate::qcore::matrix::dichotomic_deviation;
use crate::qcore::Pauli;
use crate::stats::{derive_seed, rng};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct WmmConfig {
    pub spec: OtocSpec,
    pub input: SystemInput,
    /// Strengths `(φ_v, φ_w, φ_v′, φ_w′)`, each in `(0, π/2]`.
    pub phis: [f64; 4],
    pub run: RunSettings,
    pub alpha: AlphaNormalization,
}

impl WmmConfig {
    /// Exact Gibbs input, projective strength `φ = π/2` for all probes.
    pub fn new(spec: OtocSpec, run: RunSettings) -> Result<Self> {
        let input = SystemInput::exact_mixed(&spec)?;
        Ok(Self {
            spec,
            input,
            phis: [core::f64::consts::FRAC_PI_2; 4],
            run,
            alpha: AlphaNormalization::SinPhi,
        })
    }

    fn validate(&self) -> Result<()> {
        for &phi in &self.phis {
            if !(phi > 0.0 && phi <= core::f64::consts::FRAC_PI_2 + 1e-15) {
                return Err(Error::param("measurement strengths must lie in (0, pi/2]"));
            }
        }
        Ok(())
    }
}

fn require_dichotomic(op: &LocalOperator) -> Result<()> {
    let d = dichotomic_deviation(op.matrix());
    if d > 1e-10 {
        return Err(Error::NotDichotomic(d));
    }
    Ok(())
}

/// Probes are sites `0..4` in the order `v, w, v′, w′`; all read out in `Z`.
pub fn wmm_build(cfg: &WmmConfig) -> Result<Circuit> {
    cfg.validate()?;
    check_input(&cfg.spec, &cfg.input)?;
    require_dichotomic(&cfg.spec.w)?;
    require_dichotomic(&cfg.spec.v)?;
    let lay = Layout::new(4, &cfg.input);
    let map = lay.system_map();
    let u = evolution_circuit(&cfg.spec, &cfg.run.evolution)?;
    let (v, w) = (&cfg.spec.v, &cfg.spec.w);
    let couple = |op: &LocalOperator, phi: f64, probe: usize, label: &str| {
        Gate::coupling(op.matrix().clone(), Pauli::Y, phi / 2.0, probe, lay.system_sites(op.sites()), label)
    };
    let mut c = Circuit::new(lay.total);
    for p in 0..4 {
        c.push(Gate::hadamard(p))?;
    }
    c.push(couple(v, cfg.phis[0], 0, "S_V")?)?;
    c.extend_mapped(&u, &map)?;
    c.push(couple(w, cfg.phis[1], 1, "S_W")?)?;
    c.extend_mapped(&u.inverse(), &map)?;
    c.push(couple(v, cfg.phis[2], 2, "S_V'")?)?;
    c.extend_mapped(&u, &map)?;
    c.push(couple(w, cfg.phis[3], 3, "S_W'")?)?;
    for p in 0..4 {
        c.measure(p, Basis::Z)?;
    }
    Ok(c)
}

/// `Π_j α_{a_j}(φ_j)` for each of the 16 joint outcomes.
fn outcome_weights(cfg: &WmmConfig) -> [f64; 16] {
    let mut w = [0.0; 16];
    for (k, slot) in w.iter_mut().enumerate() {
        *slot = (0..4)
            .map(|j| {
                let bit = ((k >> (3 - j)) & 1) as u8;
                cfg.alpha.alpha(label_for_bit(bit), cfg.phis[j])
            })
            .product();
    }
    w
}

/// Exact weighted average, the estimate of `1 - C/4`.
pub fn wmm_exact_average(cfg: &WmmConfig) -> Result<f64> {
    let c = wmm_build(cfg)?;
    let probs = outcome_distribution(&c, &cfg.input.with_ancillas(4))?;
    let w = outcome_weights(cfg);
    Ok(probs.iter().zip(w).map(|(p, x)| p * x).sum())
}

/// `C = 4(1 - average)` from exact probabilities.
pub fn wmm_exact(cfg: &WmmConfig) -> Result<f64> {
    Ok(4.0 * (1.0 - wmm_exact_average(cfg)?))
}

pub fn wmm_estimate(cfg: &WmmConfig) -> Result<EstimateRecord> {
    cfg.run.validate()?;
    let c = wmm_build(cfg)?;
    let probs = outcome_distribution(&c, &cfg.input.with_ancillas(4))?;
    let w = outcome_weights(cfg);
    let shots = cfg.run.shots;
    let per_rep: Vec<f64> = (0..cfg.run.reps)
        .map(|rep| {
            let mut r = rng(derive_seed(cfg.run.seed, &[rep as u64]));
            let counts = sample_distribution(&probs, shots, &mut r);
            let avg: f64 = counts.iter().zip(w).map(|(&n, x)| n as f64 * x).sum::<f64>() / shots as f64;
            4.0 * (1.0 - avg)
        })
        .collect();
    let oracle = evaluate(&cfg.spec)?;
    let mut rec = EstimateRecord::from_reps(ProtocolKind::Wmm, &cfg.spec, &cfg.run, per_rep, oracle.c);
    rec.meta("input", cfg.input.kind());
    rec.meta(
        "phis",
        alloc::format!("{}/{}/{}/{}", cfg.phis[0], cfg.phis[1], cfg.phis[2], cfg.phis[3]),
    );
    if cfg.alpha != AlphaNormalization::SinPhi {
        rec.meta("alpha", "sin_half_phi");
    }
    Ok(rec)
}
