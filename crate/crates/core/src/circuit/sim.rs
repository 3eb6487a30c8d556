use alloc::string::String;
use alloc::vec::Vec;

use super::kernel;
use super::{Basis, Circuit};
use crate::qcore::{DensityMatrix, PauliString, PureState, QuantumState};
use crate::stats::{self, SimRng};
use crate::{ComplexMatrix, ComplexVector, C64, Error, Result};

fn check_register(circuit: &Circuit, n: usize) -> Result<()> {
    if circuit.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            found: n,
        });
    }
    Ok(())
}

fn run_pure(circuit: &Circuit, amps: &mut [C64]) {
    let n = circuit.n_qubits();
    for g in circuit.gates() {
        kernel::apply(amps, n, &g.sites(), &g.unitary());
    }
}

/// Row-major `vec(ρ)`; row bits are the high half of a `2n`-bit index.
fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let dim = m.nrows();
    let mut v = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            v.push(m[(r, c)]);
        }
    }
    v
}

fn unvectorize(v: &[C64], dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| v[r * dim + c])
}

/// `ρ ← U ρ U†` on the vectorized form: `U` on the row sites, `conj(U)` on
/// the column sites.
fn conjugate_by(vec_rho: &mut [C64], n: usize, sites: &[usize], u: &ComplexMatrix) {
    kernel::apply(vec_rho, 2 * n, sites, u);
    let col_sites: Vec<usize> = sites.iter().map(|s| s + n).collect();
    kernel::apply_conj(vec_rho, 2 * n, &col_sites, u);
}

fn run_density(circuit: &Circuit, vec_rho: &mut [C64]) {
    let n = circuit.n_qubits();
    for g in circuit.gates() {
        conjugate_by(vec_rho, n, &g.sites(), &g.unitary());
    }
}

/// Applies every gate to a pure input. Measurements are ignored.
pub fn simulate_pure(circuit: &Circuit, input: &PureState) -> Result<PureState> {
    check_register(circuit, input.n_qubits())?;
    let mut amps: Vec<C64> = input.amplitudes().iter().copied().collect();
    run_pure(circuit, &mut amps);
    Ok(PureState::from_raw(
        circuit.n_qubits(),
        ComplexVector::from_vec(amps),
    ))
}

/// Applies every gate to a mixed input, `ρ ↦ U ρ U†`.
pub fn simulate_density(circuit: &Circuit, input: &DensityMatrix) -> Result<DensityMatrix> {
    check_register(circuit, input.n_qubits())?;
    let dim = input.matrix().nrows();
    let mut v = vectorize(input.matrix());
    run_density(circuit, &mut v);
    Ok(DensityMatrix::from_raw(
        circuit.n_qubits(),
        unvectorize(&v, dim),
    ))
}

/// Dispatches to the backend matching the input representation.
pub fn final_state(circuit: &Circuit, input: &QuantumState) -> Result<QuantumState> {
    Ok(match input {
        QuantumState::Pure(p) => QuantumState::Pure(simulate_pure(circuit, p)?),
        QuantumState::Mixed(m) => QuantumState::Mixed(simulate_density(circuit, m)?),
    })
}

/// Exact Born distribution of the circuit's declared read-outs.
///
/// Entry `k` is the probability of the bitstring whose `j`-th character
/// (most significant first) is the outcome of `measurements()[j]`. Outcome
/// `0` is the `+1` eigenvalue of the measured Pauli.
pub fn outcome_distribution(circuit: &Circuit, input: &QuantumState) -> Result<Vec<f64>> {
    let meas = circuit.measurements();
    if meas.is_empty() {
        return Err(Error::NoMeasurements);
    }
    check_register(circuit, input.n_qubits())?;
    let n = circuit.n_qubits();
    let m = meas.len();
    let bucket = |idx: usize| -> usize {
        meas.iter()
            .fold(0, |acc, (s, _)| (acc << 1) | ((idx >> (n - 1 - s)) & 1))
    };
    let mut probs = alloc::vec![0.0; 1 << m];
    match input {
        QuantumState::Pure(p) => {
            let mut amps: Vec<C64> = p.amplitudes().iter().copied().collect();
            run_pure(circuit, &mut amps);
            for (s, b) in meas {
                if let Some(rot) = b.rotation() {
                    kernel::apply(&mut amps, n, &[*s], &rot);
                }
            }
            for (idx, a) in amps.iter().enumerate() {
                probs[bucket(idx)] += a.norm_sqr();
            }
        }
        QuantumState::Mixed(rho) => {
            let dim = rho.matrix().nrows();
            let mut v = vectorize(rho.matrix());
            run_density(circuit, &mut v);
            for (s, b) in meas {
                if let Some(rot) = b.rotation() {
                    conjugate_by(&mut v, n, &[*s], &rot);
                }
            }
            for idx in 0..dim {
                probs[bucket(idx)] += v[idx * dim + idx].re.max(0.0);
            }
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Shot counts over the outcomes of a circuit's read-outs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    /// `counts[k]` for outcome index `k` (see [`outcome_distribution`]).
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
    pub measurements: Vec<(usize, Basis)>,
}

impl ShotResult {
    pub fn width(&self) -> usize {
        self.measurements.len()
    }

    pub fn bitstring(&self, outcome: usize) -> String {
        let w = self.width();
        (0..w)
            .map(|j| if (outcome >> (w - 1 - j)) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Non-zero `(bitstring, count)` pairs in outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (String, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(k, c)| (self.bitstring(k), *c))
    }

    /// Sample mean of `Π_j (-1)^{b_j}` over the read-outs selected by
    /// `mask` (bit `w-1-j` selects read-out `j`).
    pub fn parity_mean(&self, mask: usize) -> f64 {
        let signed: i64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if (k & mask).count_ones() % 2 == 0 {
                    c as i64
                } else {
                    -(c as i64)
                }
            })
            .sum();
        signed as f64 / self.shots as f64
    }

    /// `⟨σ⟩` estimate of read-out `j` from ±1 outcomes.
    pub fn expectation(&self, j: usize) -> f64 {
        self.parity_mean(1 << (self.width() - 1 - j))
    }
}

/// Draws `shots` outcomes from `probs` and returns per-outcome counts.
pub fn sample_distribution(probs: &[f64], shots: u64, rng: &mut SimRng) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = alloc::vec![0u64; probs.len()];
    for _ in 0..shots {
        let u = stats::uniform01(rng) * total;
        let k = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        counts[k] += 1;
    }
    counts
}

/// Per-outcome counts from a list of sampled outcome indices.
pub fn counts_from_samples(samples: &[usize], width: usize) -> Vec<u64> {
    let mut counts = alloc::vec![0u64; 1 << width];
    for &s in samples {
        counts[s] += 1;
    }
    counts
}

/// Runs the circuit on `input` and samples its declared read-outs.
/// Identical arguments give identical counts.
pub fn sample(circuit: &Circuit, input: &QuantumState, shots: u64, seed: u64) -> Result<ShotResult> {
    if shots == 0 {
        return Err(Error::param("shots must be at least 1"));
    }
    let probs = outcome_distribution(circuit, input)?;
    let mut rng = stats::rng(seed);
    Ok(ShotResult {
        counts: sample_distribution(&probs, shots, &mut rng),
        shots,
        seed,
        measurements: circuit.measurements().to_vec(),
    })
}

/// `Tr(O · final state)` for `O = Σ` of Pauli strings on the full register.
pub fn expectation_exact(
    circuit: &Circuit,
    input: &QuantumState,
    observable: &[PauliString],
) -> Result<C64> {
    let n = circuit.n_qubits();
    for p in observable {
        if p.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.n_qubits(),
            });
        }
    }
    let out = final_state(circuit, input)?;
    let mut total = C64::new(0.0, 0.0);
    match &out {
        QuantumState::Pure(psi) => {
            let amps = psi.amplitudes().as_slice();
            for p in observable {
                let applied = p.apply(amps);
                total += amps
                    .iter()
                    .zip(&applied)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>();
            }
        }
        QuantumState::Mixed(rho) => {
            let m = rho.matrix();
            for p in observable {
                for col in 0..m.nrows() {
                    let (row, v) = p.column_entry(col);
                    total += v * m[(col, row)];
                }
            }
        }
    }
    Ok(total)
}
