//! Exact dense-matrix OTOC values.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dynamics::{heisenberg_op, HamiltonianTerms};
use crate::qcore::matrix::{
    commutator, dichotomic_deviation, hermitian_deviation, psd_power, psd_sqrt, require_square,
    unitary_deviation, validate_sites, HERMITIAN_TOL, UNITARY_TOL,
};
use crate::qcore::{embed_local, pauli_decompose, Pauli};
use crate::thermal::{exact_gibbs, GibbsSpec};
use crate::{ComplexMatrix, C64, Error, Result};

/// An operator given by its local matrix and the sites it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    matrix: ComplexMatrix,
    sites: Vec<usize>,
}

impl LocalOperator {
    pub fn new(matrix: ComplexMatrix, sites: Vec<usize>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptySites);
        }
        require_square(&matrix, 1 << sites.len())?;
        validate_sites(&sites, usize::MAX)?;
        Ok(Self { matrix, sites })
    }

    pub fn pauli(p: Pauli, site: usize) -> Self {
        Self {
            matrix: p.matrix(),
            sites: alloc::vec![site],
        }
    }

    /// Operator on the whole `n`-qubit register.
    pub fn full_register(matrix: ComplexMatrix) -> Result<Self> {
        let n = crate::qcore::matrix::qubits_for_dim(matrix.nrows())?;
        Self::new(matrix, (0..n).collect())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn full(&self, n: usize) -> Result<ComplexMatrix> {
        embed_local(&self.matrix, &self.sites, n)
    }

    pub fn is_dichotomic(&self) -> bool {
        dichotomic_deviation(&self.matrix) <= HERMITIAN_TOL
    }
}

/// `W`, `V`, the Hamiltonian, `β` and `τ` of one OTOC evaluation.
///
/// `W` must be Hermitian and unitary; `V` Hermitian.
#[derive(Debug, Clone)]
pub struct OtocSpec {
    pub h: HamiltonianTerms,
    pub beta: f64,
    pub w: LocalOperator,
    pub v: LocalOperator,
    pub tau: f64,
}

impl OtocSpec {
    pub fn new(h: HamiltonianTerms, beta: f64, w: LocalOperator, v: LocalOperator, tau: f64) -> Result<Self> {
        if !beta.is_finite() || !tau.is_finite() {
            return Err(Error::NonFinite);
        }
        if beta < 0.0 {
            return Err(Error::param("beta must be non-negative"));
        }
        let n = h.n_qubits();
        validate_sites(w.sites(), n)?;
        validate_sites(v.sites(), n)?;
        let dh = hermitian_deviation(w.matrix());
        if dh > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dh));
        }
        let du = unitary_deviation(w.matrix());
        if du > UNITARY_TOL {
            return Err(Error::NotUnitary(du));
        }
        let dv = hermitian_deviation(v.matrix());
        if dv > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dv));
        }
        Ok(Self { h, beta, w, v, tau })
    }

    /// `W = V = σˣ` on site 0.
    pub fn sigma_x_pair(h: HamiltonianTerms, beta: f64, tau: f64) -> Result<Self> {
        let x = LocalOperator::pauli(Pauli::X, 0);
        Self::new(h, beta, x.clone(), x, tau)
    }

    pub fn n_qubits(&self) -> usize {
        self.h.n_qubits()
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.beta, self.w.clone(), self.v.clone(), tau)
    }

    pub fn gibbs(&self) -> Result<GibbsSpec> {
        GibbsSpec::new(self.h.clone(), self.beta)
    }
}

struct Dense {
    rho: ComplexMatrix,
    wt: ComplexMatrix,
    v: ComplexMatrix,
}

fn dense(spec: &OtocSpec) -> Result<Dense> {
    let n = spec.n_qubits();
    let rho = exact_gibbs(&spec.gibbs()?).into_matrix();
    let wt = heisenberg_op(&spec.w.full(n)?, &spec.h, spec.tau)?;
    Ok(Dense {
        rho,
        wt,
        v: spec.v.full(n)?,
    })
}

fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// All oracle quantities of one spec from a single dense evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValues {
    pub c: f64,
    pub f: C64,
    pub frobenius: f64,
}

pub fn evaluate(spec: &OtocSpec) -> Result<OracleValues> {
    let d = dense(spec)?;
    let k = commutator(&d.wt, &d.v);
    let c = -trace(&(&d.rho * &k * &k)).re;
    let f = trace(&(&d.rho * d.wt.adjoint() * d.v.adjoint() * &d.wt * &d.v));
    let sk = psd_sqrt(&d.rho)? * &k;
    let frobenius = sk.iter().map(|z| z.norm_sqr()).sum();
    Ok(OracleValues { c, f, frobenius })
}

/// `C = -Tr(ρ_β [W(τ), V]²)`.
pub fn otoc_c(spec: &OtocSpec) -> Result<f64> {
    Ok(evaluate(spec)?.c)
}

/// `F = Tr(ρ_β W†(τ) V† W(τ) V)`.
pub fn correlator_f(spec: &OtocSpec) -> Result<C64> {
    Ok(evaluate(spec)?.f)
}

/// `‖√ρ_β [W(τ), V]‖₂²`.
pub fn frobenius_form(spec: &OtocSpec) -> Result<f64> {
    Ok(evaluate(spec)?.frobenius)
}

/// `Tr[ρ^κ₁ W(τ) ρ^κ₂ V ρ^κ₃ W(τ) ρ^κ₄ V]` with `Σκ = 1`, `κ ≥ 0`.
pub fn regularized_f(spec: &OtocSpec, kappas: [f64; 4]) -> Result<C64> {
    if kappas.iter().any(|k| !k.is_finite() || *k < 0.0) {
        return Err(Error::param("regularization exponents must be finite and non-negative"));
    }
    if (kappas.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::param("regularization exponents must sum to 1"));
    }
    let d = dense(spec)?;
    let p: Vec<ComplexMatrix> = kappas
        .iter()
        .map(|&k| psd_power(&d.rho, k))
        .collect::<Result<_>>()?;
    Ok(trace(&(&p[0] * &d.wt * &p[1] * &d.v * &p[2] * &d.wt * &p[3] * &d.v)))
}

fn require_unitary_w0(w0: &ComplexMatrix, h: &HamiltonianTerms) -> Result<()> {
    require_square(w0, 1 << h.n_qubits())?;
    let du = unitary_deviation(w0);
    if du > UNITARY_TOL {
        return Err(Error::NotUnitary(du));
    }
    Ok(())
}

/// Weights `|γ_i|²` of `W(τ) = Σ γ_i Γ_i`, keyed by Pauli label. Words with
/// weight below `1e-30` are omitted.
pub fn operator_size_spectrum(w0: &ComplexMatrix, h: &HamiltonianTerms, tau: f64) -> Result<BTreeMap<String, f64>> {
    require_unitary_w0(w0, h)?;
    let wt = heisenberg_op(w0, h, tau)?;
    Ok(pauli_decompose(&wt, h.n_qubits())?
        .into_iter()
        .filter_map(|p| {
            let w = p.coefficient.norm_sqr();
            (w > 1e-30).then(|| (p.label(), w))
        })
        .collect())
}

/// Both sides of the infinite-temperature size identity at site `r`
/// (`d = 2`):
///
/// * lhs: `(1/3) Σ_{P ∈ {X,Y,Z}} ‖[W(τ), P_r]‖₂² / 2ⁿ`, which is
///   `-Tr([W(τ), P_r]²) / 2ⁿ` for Hermitian `W`;
/// * rhs: `(8/3) Σ_{words non-trivial at r} |γ|²`.
pub fn size_identity_check(w0: &ComplexMatrix, h: &HamiltonianTerms, tau: f64, r: usize) -> Result<(f64, f64)> {
    require_unitary_w0(w0, h)?;
    let n = h.n_qubits();
    validate_sites(&[r], n)?;
    let d2 = 4.0;
    let wt = heisenberg_op(w0, h, tau)?;
    let dim = (1usize << n) as f64;
    let mut lhs = 0.0;
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let k = commutator(&wt, &embed_local(&p.matrix(), &[r], n)?);
        lhs += k.iter().map(|z| z.norm_sqr()).sum::<f64>() / dim;
    }
    lhs /= d2 - 1.0;
    let weight: f64 = pauli_decompose(&wt, n)?
        .iter()
        .filter(|p| p.word[r] != Pauli::I)
        .map(|p| p.coefficient.norm_sqr())
        .sum();
    Ok((lhs, 2.0 * d2 / (d2 - 1.0) * weight))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_xxz, XxzParams};

    fn ham(n: usize, delta: f64, h: f64) -> HamiltonianTerms {
        build_xxz(XxzParams::new(n, delta, h).unwrap()).unwrap()
    }

    #[test]
    fn same_operator_at_zero_time() {
        let spec = OtocSpec::sigma_x_pair(ham(3, 0.5, 0.25), 1.0, 0.0).unwrap();
        let v = evaluate(&spec).unwrap();
        assert!(v.c.abs() < 1e-12);
        assert!((v.f - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(v.frobenius.abs() < 1e-12);
    }

    #[test]
    fn disjoint_supports_commute_at_zero_time() {
        let h = ham(3, 0.5, 0.25);
        let spec = OtocSpec::new(
            h,
            1.0,
            LocalOperator::pauli(Pauli::X, 0),
            LocalOperator::pauli(Pauli::Z, 2),
            0.0,
        )
        .unwrap();
        assert!(otoc_c(&spec).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_operators() {
        let h = ham(2, 0.5, 0.25);
        let x = LocalOperator::pauli(Pauli::X, 0);
        let scaled = LocalOperator::new(Pauli::X.matrix() * C64::new(2.0, 0.0), alloc::vec![0]).unwrap();
        assert!(matches!(
            OtocSpec::new(h.clone(), 1.0, scaled, x.clone(), 0.1),
            Err(Error::NotUnitary(_))
        ));
        let s = LocalOperator::new(crate::circuit::s_dagger_matrix(), alloc::vec![1]).unwrap();
        assert!(matches!(
            OtocSpec::new(h.clone(), 1.0, x.clone(), s, 0.1),
            Err(Error::NotHermitian(_))
        ));
        assert!(OtocSpec::new(h, 1.0, x, LocalOperator::pauli(Pauli::Z, 2), 0.1).is_err());
    }

    #[test]
    fn identities_and_infinite_temperature_frobenius() {
        let spec = OtocSpec::new(
            ham(3, 0.7, 0.15),
            0.0,
            LocalOperator::pauli(Pauli::Y, 1),
            LocalOperator::pauli(Pauli::X, 2),
            0.9,
        )
        .unwrap();
        let v = evaluate(&spec).unwrap();
        assert!((v.c - 2.0 * (1.0 - v.f.re)).abs() < 1e-10);
        assert!((v.c - v.frobenius).abs() < 1e-10);
        let wt = heisenberg_op(&spec.w.full(3).unwrap(), &spec.h, 0.9).unwrap();
        let k = commutator(&wt, &spec.v.full(3).unwrap());
        let direct = (k.adjoint() * &k).trace().re / 8.0;
        assert!((v.frobenius - direct).abs() < 1e-12);
        assert!(v.f.im.abs() < 1e-12);
    }

    #[test]
    fn regularized_limits() {
        let spec = OtocSpec::sigma_x_pair(ham(2, 0.5, 0.25), 1.0, 0.7).unwrap();
        let f = correlator_f(&spec).unwrap();
        let r = regularized_f(&spec, [1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((f - r).norm() < 1e-10);
        let inf = OtocSpec::sigma_x_pair(ham(2, 0.5, 0.25), 0.0, 0.0).unwrap();
        let r = regularized_f(&inf, [0.25; 4]).unwrap();
        assert!((r - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(regularized_f(&spec, [0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(regularized_f(&spec, [0.3, 0.3, 0.3, 0.3]).is_err());
    }

    #[test]
    fn size_spectrum_at_zero_time() {
        let h = ham(3, 0.5, 0.25);
        let w = embed_local(&Pauli::X.matrix(), &[0], 3).unwrap();
        let s = operator_size_spectrum(&w, &h, 0.0).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s["XII"] - 1.0).abs() < 1e-12);
        let s = operator_size_spectrum(&w, &h, 1.0).unwrap();
        assert!((s.values().sum::<f64>() - 1.0).abs() < 1e-10);
        let spread: f64 = s.iter().filter(|(k, _)| k.as_bytes()[1] != b'I').map(|(_, v)| v).sum();
        assert!(spread > 1e-3);
        assert!(operator_size_spectrum(&(w * C64::new(2.0, 0.0)), &h, 0.0).is_err());
    }

    #[test]
    fn size_identity_single_site() {
        let h = ham(3, 0.5, 0.25);
        let w = embed_local(&Pauli::X.matrix(), &[0], 3).unwrap();
        let (l, r) = size_identity_check(&w, &h, 0.0, 0).unwrap();
        assert!((l - 8.0 / 3.0).abs() < 1e-12 && (r - 8.0 / 3.0).abs() < 1e-12);
        let (l, r) = size_identity_check(&w, &h, 0.0, 2).unwrap();
        assert!(l.abs() < 1e-14 && r.abs() < 1e-14);
        for site in 0..3 {
            let (l, r) = size_identity_check(&w, &h, 0.8, site).unwrap();
            assert!((l - r).abs() < 1e-10);
        }
        assert!(size_identity_check(&w, &h, 0.8, 3).is_err());
    }
}
