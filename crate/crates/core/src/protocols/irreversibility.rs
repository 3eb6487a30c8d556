//! Recovery-error measure of a process with a fixed recovery map.

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::circuit::{coupling_unitary, hadamard_matrix};
use crate::dynamics::heisenberg_op;
use crate::oracle::OtocSpec;
use crate::qcore::matrix::kron;
use crate::qcore::{partial_trace, purified_distance, DensityMatrix, Pauli};
use crate::thermal::exact_gibbs;
use crate::{ComplexMatrix, C64, Error, Result};

/// A map between density matrices.
pub trait Channel {
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix>;
}

/// Adapts a closure into a [`Channel`].
pub struct FnChannel<F>(pub F);

impl<F> Channel for FnChannel<F>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix>,
{
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        (self.0)(rho)
    }
}

/// `L = (D_W ⊗ 1_Q) ∘ U_{V,θ} ∘ A_ρ`: append the system in `ρ`, couple by
/// `exp(-iθ Z⊗V)`, conjugate the system by `W(τ)`. Maps the one-qubit
/// ancilla Q to Q ⊗ S (Q first).
#[derive(Debug, Clone)]
pub struct IsmProcess {
    rho: DensityMatrix,
    coupling: ComplexMatrix,
    scramble: ComplexMatrix,
}

impl IsmProcess {
    pub fn new(spec: &OtocSpec, theta: f64) -> Result<Self> {
        let n = spec.n_qubits();
        let rho = exact_gibbs(&spec.gibbs()?);
        Self::with_state(spec, theta, rho, n)
    }

    /// Same process with an arbitrary system state.
    pub fn with_state(spec: &OtocSpec, theta: f64, rho: DensityMatrix, n: usize) -> Result<Self> {
        if rho.n_qubits() != n || n != spec.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_qubits(),
                found: rho.n_qubits(),
            });
        }
        let v = spec.v.full(n)?;
        let wt = heisenberg_op(&spec.w.full(n)?, &spec.h, spec.tau)?;
        Ok(Self {
            rho,
            coupling: coupling_unitary(&v, Pauli::Z, theta),
            scramble: kron(&crate::qcore::identity(2), &wt),
        })
    }
}

impl Channel for IsmProcess {
    fn apply(&self, q: &DensityMatrix) -> Result<DensityMatrix> {
        if q.n_qubits() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: q.n_qubits(),
            });
        }
        let joint = q.tensor(&self.rho);
        let u = &self.scramble * &self.coupling;
        let out = &u * joint.matrix() * u.adjoint();
        DensityMatrix::new((&out + out.adjoint()).scale(0.5))
    }
}

/// `R = J_S ∘ U†_{V,θ}`: undo the coupling, trace out S, dephase Q in the
/// `±` basis.
#[derive(Debug, Clone)]
pub struct IsmRecovery {
    inverse_coupling: ComplexMatrix,
    n: usize,
}

impl IsmRecovery {
    pub fn new(spec: &OtocSpec, theta: f64) -> Result<Self> {
        let n = spec.n_qubits();
        Ok(Self {
            inverse_coupling: coupling_unitary(&spec.v.full(n)?, Pauli::Z, -theta),
            n,
        })
    }
}

/// `Σ_{j=±} ⟨j|ρ|j⟩ |j⟩⟨j|` on one qubit.
pub fn dephase_pm(q: &DensityMatrix) -> Result<DensityMatrix> {
    let h = hadamard_matrix();
    let in_pm = &h * q.matrix() * &h;
    let mut diag = ComplexMatrix::zeros(2, 2);
    diag[(0, 0)] = C64::new(in_pm[(0, 0)].re, 0.0);
    diag[(1, 1)] = C64::new(in_pm[(1, 1)].re, 0.0);
    DensityMatrix::new(&h * diag * &h)
}

impl Channel for IsmRecovery {
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n_qubits() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: rho.n_qubits(),
            });
        }
        let u = &self.inverse_coupling;
        let out = u * rho.matrix() * u.adjoint();
        let out = DensityMatrix::new((&out + out.adjoint()).scale(0.5))?;
        dephase_pm(&partial_trace(&out, &[0])?)
    }
}

/// `δ = sqrt(Σ_k p_k D_F(ρ_k, R∘L(ρ_k))²)` with the recovery fixed.
pub fn irreversibility_delta(
    process: &dyn Channel,
    recovery: &dyn Channel,
    ensemble: &[(f64, DensityMatrix)],
) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::param("ensemble is empty"));
    }
    if ensemble.iter().any(|(p, _)| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::param("ensemble weights must be non-negative"));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::param("ensemble weights must sum to 1"));
    }
    let mut acc = 0.0;
    for (p, rho) in ensemble {
        let recovered = recovery.apply(&process.apply(rho)?)?;
        let d = purified_distance(rho, &recovered)?;
        acc += p * d * d;
    }
    Ok(acc.sqrt())
}

/// `{(½, |+⟩⟨+|), (½, |−⟩⟨−|)}`.
pub fn plus_minus_ensemble() -> alloc::vec::Vec<(f64, DensityMatrix)> {
    let h = hadamard_matrix();
    [0usize, 1]
        .iter()
        .map(|&k| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(k, k)] = C64::new(1.0, 0.0);
            (0.5, DensityMatrix::new(&h * m * &h).expect("pure projector"))
        })
        .collect()
}
