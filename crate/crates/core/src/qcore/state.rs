use alloc::vec::Vec;
#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::qcore::matrix::{
    eigh, hermitian_deviation, is_finite, psd_sqrt, qubits_for_dim, require_square,
    validate_sites,
};
use crate::{ComplexMatrix, ComplexVector, C64, Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Unit-norm amplitude vector on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amps: ComplexVector,
}

impl PureState {
    pub fn new(amps: ComplexVector) -> Result<Self> {
        let n = qubits_for_dim(amps.len())?;
        let norm = amps.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::state(alloc::format!("norm {norm} is not 1")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes `amps` before wrapping it.
    pub fn normalized(amps: ComplexVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::state("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amps.unscale(norm))
    }

    pub(crate) fn from_raw(n: usize, amps: ComplexVector) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= 1 << n {
            return Err(Error::param("basis index out of range"));
        }
        let mut amps = ComplexVector::zeros(1 << n);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0).expect("index 0 always valid")
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n,
            amps: ComplexVector::from_element(dim, a),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amps
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        Self {
            n: self.n + other.n,
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Reorders qubits: site `s` of the result holds site `order[s]` of
    /// `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<PureState> {
        if order.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: order.len(),
            });
        }
        validate_sites(order, self.n)?;
        let n = self.n;
        let mut amps = ComplexVector::zeros(self.amps.len());
        for (old, a) in self.amps.iter().enumerate() {
            let mut new = 0usize;
            for (s, &src) in order.iter().enumerate() {
                if (old >> (n - 1 - src)) & 1 == 1 {
                    new |= 1 << (n - 1 - s);
                }
            }
            amps[new] = *a;
        }
        Ok(Self { n, amps })
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (`1e-12`), unit trace (`1e-12`) and PSD
    /// (eigenvalues `≥ -1e-10`).
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let n = qubits_for_dim(mat.nrows())?;
        require_square(&mat, 1 << n)?;
        if !is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        let herm = hermitian_deviation(&mat);
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::state(alloc::format!("trace {tr} is not 1")));
        }
        let min_eig = eigh(&mat)?.values[0];
        if min_eig < -PSD_TOL {
            return Err(Error::state(alloc::format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { n, mat })
    }

    /// Wraps a matrix produced by a trace-preserving operation, dropping
    /// the anti-Hermitian rounding residue.
    pub(crate) fn from_raw(n: usize, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), 1 << n);
        let mat = (&mat + mat.adjoint()).scale(0.5);
        Self { n, mat }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            n,
            mat: ComplexMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// `Σ_k p_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::state("empty mixture"))?;
        let n = first.1.n;
        let dim = 1usize << n;
        let mut mat = ComplexMatrix::zeros(dim, dim);
        for (p, psi) in components {
            if psi.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: psi.n,
                });
            }
            mat += (&psi.amps * psi.amps.adjoint()).scale(*p);
        }
        Self::new(mat)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            n: self.n + other.n,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// `Tr(O ρ)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        require_square(op, self.mat.nrows())?;
        Ok(crate::qcore::matrix::trace_product(op, &self.mat))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.mat)
            .expect("density matrices are Hermitian")
            .values
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        crate::qcore::matrix::trace_product(&self.mat, &self.mat).re
    }
}

/// Either representation of a register state.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure(p) => p.n_qubits(),
            QuantumState::Mixed(m) => m.n_qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            QuantumState::Pure(p) => p.to_density(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        QuantumState::Pure(p)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(m: DensityMatrix) -> Self {
        QuantumState::Mixed(m)
    }
}

/// Reduced state on `keep`; the result's site `j` is `keep[j]`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptySites);
    }
    let n = rho.n;
    validate_sites(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let k = keep.len();
    let kdim = 1usize << k;
    let tdim = 1usize << traced.len();
    let place = |sites: &[usize], value: usize| -> usize {
        let m = sites.len();
        sites.iter().enumerate().fold(0usize, |acc, (j, &s)| {
            acc | (((value >> (m - 1 - j)) & 1) << (n - 1 - s))
        })
    };
    let keep_idx: Vec<usize> = (0..kdim).map(|v| place(keep, v)).collect();
    let trace_idx: Vec<usize> = (0..tdim).map(|v| place(&traced, v)).collect();
    let mut out = ComplexMatrix::zeros(kdim, kdim);
    for a in 0..kdim {
        for b in 0..kdim {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &trace_idx {
                acc += rho.mat[(keep_idx[a] | t, keep_idx[b] | t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_raw(k, out))
}

fn require_same_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.n != sigma.n {
        return Err(Error::DimensionMismatch {
            expected: rho.mat.nrows(),
            found: sigma.mat.nrows(),
        });
    }
    Ok(())
}

/// Uhlmann fidelity `Tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    require_same_dims(rho, sigma)?;
    let sr = psd_sqrt(&rho.mat)?;
    let inner = &sr * &sigma.mat * &sr;
    let f: f64 = eigh(&inner)?
        .values
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Purified distance `√(1 - F²)`.
pub fn purified_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = uhlmann_fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// `-Σ p ln p` over a probability vector (zeros contribute nothing).
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Von Neumann entropy `-Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let ev: Vec<f64> = rho.eigenvalues().into_iter().map(|x| x.max(0.0)).collect();
    shannon_entropy(&ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{identity, max_abs_diff};
    use core::f64::consts::FRAC_1_SQRT_2;

    fn ket(amps: &[f64]) -> PureState {
        PureState::normalized(ComplexVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| C64::new(a, 0.0)),
        ))
        .unwrap()
    }

    #[test]
    fn bell_pair_reduces_to_maximally_mixed() {
        let phi = ket(&[1.0, 0.0, 0.0, 1.0]).to_density();
        let red = partial_trace(&phi, &[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = DensityMatrix::mixture(&[(0.3, ket(&[1.0, 0.0])), (0.7, ket(&[1.0, 1.0]))]).unwrap();
        let b = ket(&[0.6, 0.8]).to_density();
        let ab = a.tensor(&b);
        let red = partial_trace(&ab, &[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), a.matrix()) < 1e-15);
        let red_b = partial_trace(&ab, &[1]).unwrap();
        assert!(max_abs_diff(red_b.matrix(), b.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let r = DensityMatrix::maximally_mixed(2);
        assert_eq!(partial_trace(&r, &[]), Err(Error::EmptySites));
        assert_eq!(
            partial_trace(&r, &[2]),
            Err(Error::SiteOutOfRange { site: 2, n: 2 })
        );
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::zero(1).to_density();
        let one = PureState::basis(1, 1).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((uhlmann_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(uhlmann_fidelity(&zero, &one).unwrap().abs() < 1e-12);
        // √⟨0|I/2|0⟩
        assert!((uhlmann_fidelity(&mixed, &zero).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((uhlmann_fidelity(&zero, &mixed).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn purified_distance_examples() {
        let zero = PureState::zero(1).to_density();
        let one = PureState::basis(1, 1).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!(purified_distance(&zero, &zero).unwrap() < 1e-6);
        assert!((purified_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        assert!((purified_distance(&mixed, &zero).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_pure_states_is_overlap() {
        let a = ket(&[0.6, 0.8]);
        let b = ket(&[1.0, 1.0]);
        let f = uhlmann_fidelity(&a.to_density(), &b.to_density()).unwrap();
        assert!((f - a.inner(&b).norm()).abs() < 1e-7);
    }

    #[test]
    fn density_validation() {
        let mut m = identity(2);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m = m.scale(0.5);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(0, 0)] = C64::new(1.2, 0.0);
        m[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(PureState::new(ComplexVector::from_element(2, C64::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn permute_qubits_moves_bits() {
        // |01⟩ -> swap -> |10⟩
        let s = PureState::basis(2, 0b01).unwrap();
        let p = s.permute_qubits(&[1, 0]).unwrap();
        assert_eq!(p, PureState::basis(2, 0b10).unwrap());
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        let r = DensityMatrix::maximally_mixed(3);
        assert!((von_neumann_entropy(&r) - 3.0 * core::f64::consts::LN_2).abs() < 1e-12);
        assert!(von_neumann_entropy(&PureState::plus(2).to_density()).abs() < 1e-12);
    }
}
