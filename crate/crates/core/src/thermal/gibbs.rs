use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::dynamics::HamiltonianTerms;
use crate::qcore::{von_neumann_entropy, DensityMatrix, PureState};
use crate::{ComplexVector, C64, Error, Result};

/// Thermal target `e^{-βH} / Z`.
#[derive(Debug, Clone)]
pub struct GibbsSpec {
    pub h: HamiltonianTerms,
    pub beta: f64,
}

impl GibbsSpec {
    pub fn new(h: HamiltonianTerms, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::NonFinite);
        }
        if beta < 0.0 {
            return Err(Error::param("beta must be non-negative"));
        }
        Ok(Self { h, beta })
    }

    pub fn n_qubits(&self) -> usize {
        self.h.n_qubits()
    }

    /// Boltzmann weights in the eigenbasis of `H`, ascending energy.
    pub fn populations(&self) -> Vec<f64> {
        let ev = &self.h.spectrum().values;
        let e0 = ev[0];
        let w: Vec<f64> = ev.iter().map(|e| (-self.beta * (e - e0)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }
}

pub fn exact_gibbs(spec: &GibbsSpec) -> DensityMatrix {
    let p = spec.populations();
    let eig = spec.h.spectrum();
    let mut k = 0;
    let mat = eig.map(|_| {
        let v = C64::new(p[k], 0.0);
        k += 1;
        v
    });
    DensityMatrix::from_raw(spec.n_qubits(), mat)
}

/// `ln Z`, evaluated with the ground energy factored out.
pub fn log_partition(spec: &GibbsSpec) -> f64 {
    let ev = &spec.h.spectrum().values;
    let e0 = ev[0];
    let s: f64 = ev.iter().map(|e| (-spec.beta * (e - e0)).exp()).sum();
    -spec.beta * e0 + s.ln()
}

/// `-β⁻¹ ln Z`.
pub fn exact_free_energy(spec: &GibbsSpec) -> Result<f64> {
    if spec.beta <= 0.0 {
        return Err(Error::param("free energy needs beta > 0"));
    }
    Ok(-log_partition(spec) / spec.beta)
}

/// `Tr(Hρ) - β⁻¹ S(ρ)`.
pub fn free_energy(rho: &DensityMatrix, h: &HamiltonianTerms, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::param("free energy needs finite beta > 0"));
    }
    let energy = rho.expectation(h.dense())?.re;
    Ok(energy - von_neumann_entropy(rho) / beta)
}

/// Purification `Σ_i √p_i |i⟩_A ⊗ |E_i⟩_S` on `2n` qubits, register A
/// (sites `0..n`) first. Tracing out A leaves the Gibbs state on S.
pub fn exact_purification(spec: &GibbsSpec) -> PureState {
    let n = spec.n_qubits();
    let dim = 1usize << n;
    let p = spec.populations();
    let vecs = &spec.h.spectrum().vectors;
    let mut amps = ComplexVector::zeros(dim * dim);
    for (i, pi) in p.iter().enumerate() {
        let w = pi.sqrt();
        for s in 0..dim {
            amps[i * dim + s] = vecs[(s, i)] * w;
        }
    }
    PureState::from_raw(2 * n, amps)
}
