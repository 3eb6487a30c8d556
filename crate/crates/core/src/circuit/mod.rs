//! Circuit representation and the two simulation backends.
//!
//! Mid-circuit measurements are deferred: a [`Circuit`] carries a list of
//! terminal read-outs, and every ancilla is measured after the last gate.
//! The protocols in this crate never condition a gate on an earlier
//! outcome, so deferral does not change any joint distribution.

mod gate;
pub(crate) mod kernel;
mod sim;

use alloc::vec::Vec;

pub use gate::{coupling_unitary, hadamard_matrix, s_dagger_matrix, Basis, Gate, GateKind};
pub use sim::{
    counts_from_samples, expectation_exact, final_state, outcome_distribution, sample,
    sample_distribution, simulate_density, simulate_pure, ShotResult,
};

use crate::qcore::matrix::validate_sites;
use crate::{Error, Result};

/// Ordered gate list on `n_qubits` with terminal measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    measurements: Vec<(usize, Basis)>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            measurements: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measurements(&self) -> &[(usize, Basis)] {
        &self.measurements
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        validate_sites(&gate.sites(), self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Declares a terminal read-out of `site` in `basis`.
    pub fn measure(&mut self, site: usize, basis: Basis) -> Result<&mut Self> {
        if site >= self.n_qubits {
            return Err(Error::SiteOutOfRange {
                site,
                n: self.n_qubits,
            });
        }
        if self.measurements.iter().any(|(s, _)| *s == site) {
            return Err(Error::DuplicateSite(site));
        }
        self.measurements.push((site, basis));
        Ok(self)
    }

    /// Appends the gates of `other` (same register size), ignoring its
    /// measurements.
    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(self)
    }

    /// Appends the gates of `other` with its site `s` placed on `map[s]`.
    pub fn extend_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<&mut Self> {
        if map.len() != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: other.n_qubits,
                found: map.len(),
            });
        }
        validate_sites(map, self.n_qubits)?;
        self.gates.extend(other.gates.iter().map(|g| g.remapped(map)));
        Ok(self)
    }

    /// Reversed gate sequence with every gate inverted. Measurements are
    /// dropped.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::dagger).collect(),
            measurements: Vec::new(),
        }
    }

    /// Dense unitary of the whole gate list (test and diagnostic use; the
    /// cost is `4^n`).
    pub fn unitary(&self) -> crate::ComplexMatrix {
        let dim = 1usize << self.n_qubits;
        let mut u = crate::qcore::identity(dim);
        for col in 0..dim {
            let mut column: Vec<crate::C64> = u.column(col).iter().copied().collect();
            for g in &self.gates {
                kernel::apply(&mut column, self.n_qubits, &g.sites(), &g.unitary());
            }
            for (r, v) in column.into_iter().enumerate() {
                u[(r, col)] = v;
            }
        }
        u
    }
}
