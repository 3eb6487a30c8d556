//! XXZ chain Hamiltonian, exact propagators and Trotter circuits.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::circuit::{Circuit, Gate};
use crate::qcore::matrix::{eigh, expm_i, require_square, Eigh};
use crate::qcore::{Pauli, PauliString};
use crate::{ComplexMatrix, C64, Error, Result};

/// Open-chain XXZ parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzParams {
    pub n: usize,
    pub delta: f64,
    pub h: f64,
}

impl XxzParams {
    pub fn new(n: usize, delta: f64, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("XXZ chain needs at least 2 sites"));
        }
        if !delta.is_finite() || !h.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, delta, h })
    }

    /// Field tied to the anisotropy by `h = (1 - Δ) / 2`.
    pub fn with_linked_field(n: usize, delta: f64) -> Result<Self> {
        Self::new(n, delta, (1.0 - delta) / 2.0)
    }
}

/// A Hamiltonian as a weighted Pauli sum with its dense matrix and spectrum.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    n: usize,
    terms: Vec<(PauliString, f64)>,
    dense: ComplexMatrix,
    spectrum: Eigh,
    params: Option<XxzParams>,
}

impl HamiltonianTerms {
    /// Builds from real-weighted unit Pauli strings on `n` qubits.
    pub fn from_terms(n: usize, terms: Vec<(PauliString, f64)>) -> Result<Self> {
        let dim = 1usize << n;
        let mut dense = ComplexMatrix::zeros(dim, dim);
        for (p, c) in &terms {
            if p.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n_qubits(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite);
            }
            let unit = p.clone().with_coefficient(C64::new(*c, 0.0) * p.coefficient);
            for col in 0..dim {
                let (row, v) = unit.column_entry(col);
                dense[(row, col)] += v;
            }
        }
        let spectrum = eigh(&dense)?;
        Ok(Self {
            n,
            terms,
            dense,
            spectrum,
            params: None,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    pub fn dense(&self) -> &ComplexMatrix {
        &self.dense
    }

    pub fn spectrum(&self) -> &Eigh {
        &self.spectrum
    }

    pub fn xxz_params(&self) -> Option<XxzParams> {
        self.params
    }
}

/// `H = -¼ Σ_{i<n-1} (XᵢXᵢ₊₁ + YᵢYᵢ₊₁ + Δ ZᵢZᵢ₊₁) - h Σ_i Zᵢ`, open chain.
pub fn build_xxz(params: XxzParams) -> Result<HamiltonianTerms> {
    let XxzParams { n, delta, h } = XxzParams::new(params.n, params.delta, params.h)?;
    let mut terms = Vec::with_capacity(4 * n - 3);
    for i in 0..n - 1 {
        for (p, c) in [(Pauli::X, -0.25), (Pauli::Y, -0.25), (Pauli::Z, -0.25 * delta)] {
            let mut word = alloc::vec![Pauli::I; n];
            word[i] = p;
            word[i + 1] = p;
            terms.push((PauliString::new(word, C64::new(1.0, 0.0)), c));
        }
    }
    for i in 0..n {
        terms.push((PauliString::single(Pauli::Z, i, n), -h));
    }
    let mut ham = HamiltonianTerms::from_terms(n, terms)?;
    ham.params = Some(params);
    Ok(ham)
}

/// `U(τ) = exp(-i H τ)`.
pub fn exact_propagator(h: &HamiltonianTerms, tau: f64) -> Result<ComplexMatrix> {
    if !tau.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(h.spectrum.map(|e| C64::from_polar(1.0, -e * tau)))
}

/// Heisenberg-picture operator `W(τ) = U†(τ) W₀ U(τ)`.
pub fn heisenberg_op(w0: &ComplexMatrix, h: &HamiltonianTerms, tau: f64) -> Result<ComplexMatrix> {
    require_square(w0, 1 << h.n)?;
    let u = exact_propagator(h, tau)?;
    Ok(u.adjoint() * w0 * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrotterOrder {
    First,
    Second,
}

impl TrotterOrder {
    pub fn as_int(self) -> u8 {
        match self {
            TrotterOrder::First => 1,
            TrotterOrder::Second => 2,
        }
    }
}

/// Product-formula settings. `steps_per_unit` Trotter steps are used per
/// unit of evolution time (at least one step for any `τ ≠ 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterConfig {
    pub order: TrotterOrder,
    pub steps_per_unit: usize,
}

impl TrotterConfig {
    pub fn new(order: TrotterOrder, steps_per_unit: usize) -> Result<Self> {
        if steps_per_unit == 0 {
            return Err(Error::param("Trotter steps must be at least 1"));
        }
        Ok(Self {
            order,
            steps_per_unit,
        })
    }

    /// Number of steps used for an evolution of duration `tau`.
    pub fn steps_for(&self, tau: f64) -> usize {
        if tau == 0.0 {
            return 0;
        }
        let raw = tau.abs() * self.steps_per_unit as f64;
        ((raw - 1e-9).ceil() as usize).max(1)
    }
}

impl Default for TrotterConfig {
    fn default() -> Self {
        Self {
            order: TrotterOrder::Second,
            steps_per_unit: 4,
        }
    }
}

/// Terms of `H` grouped into commuting layers: even bonds, odd bonds and
/// single-site fields.
struct Layers {
    even: Vec<(usize, ComplexMatrix)>,
    odd: Vec<(usize, ComplexMatrix)>,
    field: Vec<(usize, ComplexMatrix)>,
}

fn group_terms(h: &HamiltonianTerms) -> Result<Layers> {
    let n = h.n;
    let mut bonds: Vec<Option<ComplexMatrix>> = alloc::vec![None; n.saturating_sub(1)];
    let mut fields: Vec<Option<ComplexMatrix>> = alloc::vec![None; n];
    for (p, c) in &h.terms {
        let support = p.support();
        let weight = p.coefficient * *c;
        match support.as_slice() {
            [] => {} // global phase
            [s] => {
                let m = p.word[*s].matrix() * weight;
                let slot = &mut fields[*s];
                *slot = Some(slot.take().map_or(m.clone(), |acc| acc + m));
            }
            [a, b] if *b == a + 1 => {
                let m = p.word[*a].matrix().kronecker(&p.word[*b].matrix()) * weight;
                let slot = &mut bonds[*a];
                *slot = Some(slot.take().map_or(m.clone(), |acc| acc + m));
            }
            _ => {
                return Err(Error::param(
                    "Trotter splitting supports only on-site and nearest-neighbour terms",
                ))
            }
        }
    }
    let mut layers = Layers {
        even: Vec::new(),
        odd: Vec::new(),
        field: Vec::new(),
    };
    for (i, b) in bonds.into_iter().enumerate() {
        if let Some(m) = b {
            if i % 2 == 0 {
                layers.even.push((i, m));
            } else {
                layers.odd.push((i, m));
            }
        }
    }
    layers.field = fields
        .into_iter()
        .enumerate()
        .filter_map(|(i, f)| f.map(|m| (i, m)))
        .collect();
    Ok(layers)
}

fn push_layer(c: &mut Circuit, layer: &[(usize, ComplexMatrix)], two_site: bool, dt: f64) -> Result<()> {
    for (site, generator) in layer {
        let u = expm_i(generator, dt)?;
        let (sites, label) = if two_site {
            (alloc::vec![*site, site + 1], "bond")
        } else {
            (alloc::vec![*site], "field")
        };
        c.push(Gate::local(u, sites, label)?)?;
    }
    Ok(())
}

/// Product-formula circuit for `exp(-i H τ)` with an explicit step count.
///
/// First order applies `even · odd · field` per step (in time order);
/// second order uses the symmetric sequence
/// `field(dt/2) odd(dt/2) even(dt) odd(dt/2) field(dt/2)`.
pub fn trotter_circuit_steps(
    h: &HamiltonianTerms,
    tau: f64,
    order: TrotterOrder,
    steps: usize,
) -> Result<Circuit> {
    if !tau.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut c = Circuit::new(h.n);
    if tau == 0.0 {
        return Ok(c);
    }
    if steps == 0 {
        return Err(Error::param("Trotter steps must be at least 1"));
    }
    let layers = group_terms(h)?;
    let dt = tau / steps as f64;
    for _ in 0..steps {
        match order {
            TrotterOrder::First => {
                push_layer(&mut c, &layers.even, true, dt)?;
                push_layer(&mut c, &layers.odd, true, dt)?;
                push_layer(&mut c, &layers.field, false, dt)?;
            }
            TrotterOrder::Second => {
                push_layer(&mut c, &layers.field, false, dt / 2.0)?;
                push_layer(&mut c, &layers.odd, true, dt / 2.0)?;
                push_layer(&mut c, &layers.even, true, dt)?;
                push_layer(&mut c, &layers.odd, true, dt / 2.0)?;
                push_layer(&mut c, &layers.field, false, dt / 2.0)?;
            }
        }
    }
    Ok(c)
}

/// Product-formula circuit with the step count taken from `cfg`.
pub fn trotter_circuit(h: &HamiltonianTerms, tau: f64, cfg: &TrotterConfig) -> Result<Circuit> {
    if cfg.steps_per_unit == 0 {
        return Err(Error::param("Trotter steps must be at least 1"));
    }
    trotter_circuit_steps(h, tau, cfg.order, cfg.steps_for(tau))
}
