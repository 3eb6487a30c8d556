use alloc::vec::Vec;
#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::{ComplexMatrix, C64, Error, Result};

/// Hermiticity tolerance accepted by [`herm_fn`] and friends.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Unitarity tolerance for gate payloads and OTOC operators.
pub const UNITARY_TOL: f64 = 1e-10;

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, leftmost factor most significant.
pub fn kron_all<'a, I>(factors: I) -> ComplexMatrix
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |A - B|` entrywise; `f64::INFINITY` on a shape mismatch.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn unitary_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(m.adjoint() * m), &identity(m.nrows()))
}

/// `max |A² - I|`, zero for dichotomic operators such as Pauli strings.
pub fn dichotomic_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(&(m * m), &identity(m.nrows()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn require_square(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows(),
        });
    }
    if m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Number of qubits `n` with `dim == 2^n`.
pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::param("matrix dimension is not a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Checks that every site is `< n` and appears once.
pub(crate) fn validate_sites(sites: &[usize], n: usize) -> Result<()> {
    for (i, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
        if sites[..i].contains(&s) {
            return Err(Error::DuplicateSite(s));
        }
    }
    Ok(())
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// `Σ_k g(λ_k) |v_k⟩⟨v_k|`.
    pub fn map<F>(&self, mut g: F) -> ComplexMatrix
    where
        F: FnMut(f64) -> C64,
    {
        let dim = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = g(lambda);
            for r in 0..dim {
                scaled[(r, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eigh(op: &ComplexMatrix) -> Result<Eigh> {
    if !op.is_square() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            found: op.ncols(),
        });
    }
    require_hermitian(op)?;
    if !is_finite(op) {
        return Err(Error::NonFinite);
    }
    // Symmetrize away the sub-tolerance anti-Hermitian residue first.
    let sym = (op + op.adjoint()).scale(0.5);
    let dec = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let dim = op.nrows();
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(dim, dim, |r, c| dec.eigenvectors[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

/// Applies a real scalar function to a Hermitian matrix through its
/// eigendecomposition. The result is Hermitian.
pub fn herm_fn<F>(op: &ComplexMatrix, mut f: F) -> Result<ComplexMatrix>
where
    F: FnMut(f64) -> f64,
{
    let eig = eigh(op)?;
    let out = eig.map(|x| C64::new(f(x), 0.0));
    Ok((&out + out.adjoint()).scale(0.5))
}

/// Like [`herm_fn`] but with a complex-valued scalar function, e.g.
/// `x ↦ e^{-i t x}`. The result is normal but not Hermitian in general.
pub fn herm_fn_complex<F>(op: &ComplexMatrix, f: F) -> Result<ComplexMatrix>
where
    F: FnMut(f64) -> C64,
{
    Ok(eigh(op)?.map(f))
}

/// `exp(-i t G)` for Hermitian `G`.
pub fn expm_i(generator: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    herm_fn_complex(generator, |x| C64::from_polar(1.0, -t * x))
}

/// Square root of a PSD matrix; eigenvalues below zero are clamped.
pub fn psd_sqrt(op: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_fn(op, |x| x.max(0.0).sqrt())
}

/// `op^κ` for PSD `op`; eigenvalues below `1e-14` are treated as zero and
/// `0^0 = 1` so that `κ = 0` yields the identity.
pub fn psd_power(op: &ComplexMatrix, kappa: f64) -> Result<ComplexMatrix> {
    if kappa == 0.0 {
        return Ok(identity(op.nrows()));
    }
    herm_fn(op, |x| if x < 1e-14 { 0.0 } else { x.powf(kappa) })
}

/// Places a `2^k × 2^k` operator on `sites` of an `n`-qubit register with
/// identity elsewhere. `sites[0]` maps to the most significant bit of the
/// operator's local index.
pub fn embed_local(op: &ComplexMatrix, sites: &[usize], n: usize) -> Result<ComplexMatrix> {
    if sites.is_empty() {
        return Err(Error::EmptySites);
    }
    validate_sites(sites, n)?;
    let k = sites.len();
    require_square(op, 1 << k)?;
    let dim = 1usize << n;
    let positions: Vec<usize> = sites.iter().map(|&s| n - 1 - s).collect();
    let mask: usize = positions.iter().fold(0, |m, &p| m | (1 << p));
    let local = |idx: usize| -> usize {
        positions
            .iter()
            .fold(0, |acc, &p| (acc << 1) | ((idx >> p) & 1))
    };
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let lc = local(col);
        let rest = col & !mask;
        for lr in 0..(1usize << k) {
            let v = op[(lr, lc)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let mut row = rest;
            for (j, &p) in positions.iter().enumerate() {
                if (lr >> (k - 1 - j)) & 1 == 1 {
                    row |= 1 << p;
                }
            }
            out[(row, col)] = v;
        }
    }
    Ok(out)
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}
