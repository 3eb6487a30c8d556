use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use super::gibbs::{exact_free_energy, exact_gibbs, GibbsSpec};
use super::optimize::{Minimizer, NelderMead};
use crate::circuit::{sample_distribution, simulate_pure, Circuit, Gate};
use crate::qcore::{partial_trace, shannon_entropy, uhlmann_fidelity, DensityMatrix, PureState};
use crate::stats::{rng, uniform01, SimRng};
use crate::{Error, Result};

/// Parameterized purification circuit.
///
/// Register A occupies sites `0..n` and register S sites `n..2n`.
/// `U_A` has `layers_a` layers of `RY` on every A qubit, with a CNOT ladder
/// between consecutive layers; `U_S` has `layers_s` layers of `RY` then
/// `RZ` on every S qubit, again with ladders in between.
#[derive(Debug, Clone, PartialEq)]
pub struct TfdAnsatz {
    n: usize,
    layers_a: usize,
    layers_s: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl TfdAnsatz {
    pub fn new(n: usize, layers_a: usize, layers_s: usize, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("ansatz needs at least one qubit"));
        }
        if theta.len() != Self::theta_len(n, layers_a) {
            return Err(Error::DimensionMismatch {
                expected: Self::theta_len(n, layers_a),
                found: theta.len(),
            });
        }
        if phi.len() != Self::phi_len(n, layers_s) {
            return Err(Error::DimensionMismatch {
                expected: Self::phi_len(n, layers_s),
                found: phi.len(),
            });
        }
        if theta.iter().chain(&phi).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            n,
            layers_a,
            layers_s,
            theta,
            phi,
        })
    }

    pub fn zeros(n: usize, layers_a: usize, layers_s: usize) -> Result<Self> {
        Self::new(
            n,
            layers_a,
            layers_s,
            alloc::vec![0.0; Self::theta_len(n, layers_a)],
            alloc::vec![0.0; Self::phi_len(n, layers_s)],
        )
    }

    pub fn theta_len(n: usize, layers_a: usize) -> usize {
        n * layers_a
    }

    pub fn phi_len(n: usize, layers_s: usize) -> usize {
        2 * n * layers_s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> (usize, usize) {
        (self.layers_a, self.layers_s)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn with_params(&self, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.layers_a, self.layers_s, theta, phi)
    }

    fn a_sites(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    fn s_sites(&self) -> Vec<usize> {
        (self.n..2 * self.n).collect()
    }
}

fn ladder(c: &mut Circuit, sites: &[usize]) -> Result<()> {
    for w in sites.windows(2) {
        c.push(Gate::cnot(w[0], w[1]))?;
    }
    Ok(())
}

fn push_u_a(c: &mut Circuit, a: &TfdAnsatz) -> Result<()> {
    let sites = a.a_sites();
    for layer in 0..a.layers_a {
        if layer > 0 {
            ladder(c, &sites)?;
        }
        for (q, &s) in sites.iter().enumerate() {
            c.push(Gate::ry(a.theta[layer * a.n + q], s))?;
        }
    }
    Ok(())
}

/// `U_A(θ)`, CNOTs `A_i → S_i`, then `U_S(φ)`; acts on `|0⟩^{⊗2n}`.
pub fn tfd_circuit(a: &TfdAnsatz) -> Result<Circuit> {
    let n = a.n;
    let mut c = Circuit::new(2 * n);
    push_u_a(&mut c, a)?;
    for i in 0..n {
        c.push(Gate::cnot(i, n + i))?;
    }
    let sites = a.s_sites();
    for layer in 0..a.layers_s {
        if layer > 0 {
            ladder(&mut c, &sites)?;
        }
        let base = layer * 2 * n;
        for (q, &s) in sites.iter().enumerate() {
            c.push(Gate::ry(a.phi[base + q], s))?;
        }
        for (q, &s) in sites.iter().enumerate() {
            c.push(Gate::rz(a.phi[base + n + q], s))?;
        }
    }
    Ok(c)
}

/// Output of [`tfd_circuit`] on the all-zero input.
pub fn tfd_state(a: &TfdAnsatz) -> Result<PureState> {
    simulate_pure(&tfd_circuit(a)?, &PureState::zero(2 * a.n))
}

/// Computational-basis populations `p_i(θ)` of register A. They depend on
/// `θ` only, since the CNOTs copy A's basis label into S.
pub fn register_a_populations(a: &TfdAnsatz) -> Result<Vec<f64>> {
    let mut c = Circuit::new(a.n);
    push_u_a(&mut c, a)?;
    let psi = simulate_pure(&c, &PureState::zero(a.n))?;
    Ok(psi.amplitudes().iter().map(|z| z.norm_sqr()).collect())
}

/// Reduced state on register S.
pub fn register_s_state(a: &TfdAnsatz) -> Result<DensityMatrix> {
    let psi = tfd_state(a)?;
    partial_trace(&psi.to_density(), &a.s_sites())
}

/// How the entropy term obtains `p_i(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMode {
    Exact,
    /// Empirical frequencies from this many computational-basis shots.
    Sampled { shots: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqaOptions {
    pub restarts: usize,
    /// Cost evaluations per restart.
    pub max_evals: usize,
    pub seed: u64,
    pub entropy: EntropyMode,
    pub simplex: NelderMead,
}

impl Default for VqaOptions {
    fn default() -> Self {
        Self {
            restarts: 6,
            max_evals: 6000,
            seed: 0x5eed,
            entropy: EntropyMode::Exact,
            simplex: NelderMead::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqaResult {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub free_energy: f64,
    pub exact_free_energy: f64,
    pub fidelity_to_exact: f64,
    pub iterations: usize,
    /// Best cost so far after each evaluation, across all restarts.
    pub cost_history: Vec<f64>,
    pub converged: bool,
}

/// Cost `Tr[H ρ_S(θ, φ)] - β⁻¹ S(p(θ))`.
pub fn vqa_cost(spec: &GibbsSpec, a: &TfdAnsatz, entropy: EntropyMode, rng: &mut SimRng) -> Result<f64> {
    if spec.beta <= 0.0 {
        return Err(Error::param("variational preparation needs beta > 0"));
    }
    let rho_s = register_s_state(a)?;
    let energy = rho_s.expectation(spec.h.dense())?.re;
    let p = register_a_populations(a)?;
    let p = match entropy {
        EntropyMode::Exact => p,
        EntropyMode::Sampled { shots } => {
            let counts = sample_distribution(&p, shots, rng);
            counts.iter().map(|&c| c as f64 / shots as f64).collect()
        }
    };
    Ok(energy - shannon_entropy(&p) / spec.beta)
}

/// Minimizes the free-energy cost from `options.restarts` random starts
/// (the first start is the ansatz's own parameters) and keeps the best.
pub fn vqa_optimize(spec: &GibbsSpec, ansatz: &TfdAnsatz, options: &VqaOptions) -> Result<VqaResult> {
    if spec.beta <= 0.0 {
        return Err(Error::param("variational preparation needs beta > 0"));
    }
    if ansatz.n != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_qubits(),
            found: ansatz.n,
        });
    }
    if options.restarts == 0 || options.max_evals == 0 {
        return Err(Error::param("optimizer needs at least one restart and one evaluation"));
    }
    let nt = ansatz.theta.len();
    let mut start_rng = rng(options.seed);
    let mut noise_rng = rng(options.seed ^ 0xA5A5_A5A5);
    let mut history: Vec<f64> = Vec::new();
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut iterations = 0;
    for r in 0..options.restarts {
        let x0: Vec<f64> = if r == 0 {
            ansatz.theta.iter().chain(&ansatz.phi).copied().collect()
        } else {
            (0..nt + ansatz.phi.len())
                .map(|_| (2.0 * uniform01(&mut start_rng) - 1.0) * core::f64::consts::PI)
                .collect()
        };
        let mut failure = None;
        let mut cost = |x: &[f64]| -> f64 {
            let trial = match ansatz.with_params(x[..nt].to_vec(), x[nt..].to_vec()) {
                Ok(t) => t,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::INFINITY;
                }
            };
            match vqa_cost(spec, &trial, options.entropy, &mut noise_rng) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let m = options.simplex.minimize(&mut cost, &x0, options.max_evals);
        if let Some(e) = failure {
            return Err(e);
        }
        iterations += m.evals;
        let floor = history.last().copied().unwrap_or(f64::INFINITY);
        history.extend(m.history.iter().map(|v| v.min(floor)));
        if best.as_ref().map_or(true, |b| m.fx < b.1) {
            best = Some((m.x, m.fx, m.converged));
        }
    }
    let (x, _, converged) = best.expect("at least one restart");
    let tuned = ansatz.with_params(x[..nt].to_vec(), x[nt..].to_vec())?;
    // Report the noiseless cost even when the search used sampled entropy.
    let free_energy = vqa_cost(spec, &tuned, EntropyMode::Exact, &mut noise_rng)?;
    let rho_s = register_s_state(&tuned)?;
    Ok(VqaResult {
        theta: tuned.theta,
        phi: tuned.phi,
        free_energy,
        exact_free_energy: exact_free_energy(spec)?,
        fidelity_to_exact: uhlmann_fidelity(&rho_s, &exact_gibbs(spec))?,
        iterations,
        cost_history: history,
        converged,
    })
}
