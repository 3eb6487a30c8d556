//! Rewinding-time method: a control qubit interferes the branches
//! `V W(τ) |ψ⟩` and `W(τ) V |ψ⟩`, so `⟨σˣ⟩ + i⟨σʸ⟩ = F`.

use alloc::vec::Vec;

use super::{check_input, evolution_circuit, pm_mean, EstimateRecord, Layout, ProtocolKind, RunSettings, SystemInput};
use crate::circuit::{outcome_distribution, sample_distribution, Basis, Circuit, Gate};
use crate::oracle::{evaluate, OtocSpec};
use crate::qcore::matrix::{unitary_deviation, UNITARY_TOL};
use crate::stats::{derive_seed, rng};
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct RtmConfig {
    pub spec: OtocSpec,
    pub input: SystemInput,
    pub run: RunSettings,
}

impl RtmConfig {
    /// Exact Gibbs input on the density-matrix backend.
    pub fn new(spec: OtocSpec, run: RunSettings) -> Result<Self> {
        let input = SystemInput::exact_mixed(&spec)?;
        Ok(Self { spec, input, run })
    }
}

/// Circuits reading out `Re F` (control in X) and `Im F` (control in Y).
pub fn rtm_build(cfg: &RtmConfig) -> Result<(Circuit, Circuit)> {
    check_input(&cfg.spec, &cfg.input)?;
    let v = &cfg.spec.v;
    let dev = unitary_deviation(v.matrix());
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let lay = Layout::new(1, &cfg.input);
    let map = lay.system_map();
    let u = evolution_circuit(&cfg.spec, &cfg.run.evolution)?;
    let mut c = Circuit::new(lay.total);
    c.push(Gate::hadamard(0))?;
    c.push(Gate::controlled(0, true, v.matrix().clone(), lay.system_sites(v.sites()), "C1-V")?)?;
    c.extend_mapped(&u, &map)?;
    c.push(Gate::local(cfg.spec.w.matrix().clone(), lay.system_sites(cfg.spec.w.sites()), "W")?)?;
    c.extend_mapped(&u.inverse(), &map)?;
    c.push(Gate::controlled(0, false, v.matrix().clone(), lay.system_sites(v.sites()), "C0-V")?)?;
    let mut cy = c.clone();
    c.measure(0, Basis::X)?;
    cy.measure(0, Basis::Y)?;
    Ok((c, cy))
}

/// `⟨σˣ⟩ + i⟨σʸ⟩` of the control from exact outcome probabilities.
pub fn rtm_exact(cfg: &RtmConfig) -> Result<C64> {
    let (cx, cy) = rtm_build(cfg)?;
    let input = cfg.input.with_ancillas(1);
    let px = outcome_distribution(&cx, &input)?;
    let py = outcome_distribution(&cy, &input)?;
    Ok(C64::new(px[0] - px[1], py[0] - py[1]))
}

/// Per repetition: `shots` X-basis and `shots` Y-basis samples;
/// `C_rep = 2(1 - ⟨σˣ⟩)`.
pub fn rtm_estimate(cfg: &RtmConfig) -> Result<EstimateRecord> {
    cfg.run.validate()?;
    let (cx, cy) = rtm_build(cfg)?;
    let input = cfg.input.with_ancillas(1);
    let px = outcome_distribution(&cx, &input)?;
    let py = outcome_distribution(&cy, &input)?;
    let shots = cfg.run.shots;
    let mut per_rep = Vec::with_capacity(cfg.run.reps);
    let mut re_f = Vec::with_capacity(cfg.run.reps);
    let mut im_f = Vec::with_capacity(cfg.run.reps);
    for rep in 0..cfg.run.reps {
        let mut rx = rng(derive_seed(cfg.run.seed, &[rep as u64, 0]));
        let mut ry = rng(derive_seed(cfg.run.seed, &[rep as u64, 1]));
        let x = pm_mean(&sample_distribution(&px, shots, &mut rx), shots);
        let y = pm_mean(&sample_distribution(&py, shots, &mut ry), shots);
        re_f.push(x);
        im_f.push(y);
        per_rep.push(2.0 * (1.0 - x));
    }
    let oracle = evaluate(&cfg.spec)?;
    let mut rec = EstimateRecord::from_reps(ProtocolKind::Rtm, &cfg.spec, &cfg.run, per_rep, oracle.c);
    rec.meta("input", cfg.input.kind());
    rec.meta("mean_ReF", crate::stats::mean(&re_f));
    rec.meta("mean_ImF", crate::stats::mean(&im_f));
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::simulate_pure;
    use crate::dynamics::{build_xxz, heisenberg_op, XxzParams};
    use crate::oracle::LocalOperator;
    use crate::protocols::EvolutionMode;
    use crate::qcore::{Pauli, PureState};
    use crate::ComplexVector;

    fn cfg(tau: f64) -> RtmConfig {
        let h = build_xxz(XxzParams::new(2, 0.5, 0.25).unwrap()).unwrap();
        let spec = OtocSpec::sigma_x_pair(h, 1.0, tau).unwrap();
        let run = RunSettings {
            shots: 500,
            reps: 4,
            seed: 9,
            evolution: EvolutionMode::ExactGate,
        };
        RtmConfig::new(spec, run).unwrap()
    }

    #[test]
    fn zero_time_is_deterministic() {
        let c = cfg(0.0);
        let f = rtm_exact(&c).unwrap();
        assert!((f - C64::new(1.0, 0.0)).norm() < 1e-12);
        let rec = rtm_estimate(&c).unwrap();
        assert_eq!(rec.mean_c, 0.0);
        assert_eq!(rec.std_c, 0.0);
    }

    #[test]
    fn exact_readout_matches_correlator() {
        let c = cfg(0.7);
        let f = rtm_exact(&c).unwrap();
        let oracle = evaluate(&c.spec).unwrap().f;
        assert!((f - oracle).norm() < 1e-9);
        let c2 = RtmConfig {
            input: SystemInput::exact_purified(&c.spec).unwrap(),
            ..c.clone()
        };
        assert!((rtm_exact(&c2).unwrap() - oracle).norm() < 1e-9);
    }

    #[test]
    fn two_branch_output_state() {
        let c = cfg(0.7);
        let psi = PureState::normalized(ComplexVector::from_vec(alloc::vec![
            C64::new(0.3, 0.1),
            C64::new(-0.5, 0.2),
            C64::new(0.1, 0.0),
            C64::new(0.6, -0.4),
        ]))
        .unwrap();
        let c = RtmConfig {
            input: SystemInput::Mixed(psi.to_density()),
            ..c
        };
        let (cx, _) = rtm_build(&c).unwrap();
        let out = simulate_pure(&cx, &PureState::zero(1).tensor(&psi)).unwrap();
        let w = LocalOperator::pauli(Pauli::X, 0).full(2).unwrap();
        let wt = heisenberg_op(&w, &c.spec.h, 0.7).unwrap();
        let v = c.spec.v.full(2).unwrap();
        let b0 = &v * &wt * psi.amplitudes();
        let b1 = &wt * &v * psi.amplitudes();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for i in 0..4 {
            assert!((out.amplitudes()[i] - b0[i] * s).norm() < 1e-12);
            assert!((out.amplitudes()[4 + i] - b1[i] * s).norm() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_record() {
        let c = cfg(1.1);
        assert_eq!(rtm_estimate(&c).unwrap(), rtm_estimate(&c).unwrap());
    }
}
