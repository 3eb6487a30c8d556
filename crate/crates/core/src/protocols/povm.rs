//! Weak-measurement operators and their modified eigenvalues.
//!
//! A probe in `|+⟩` coupled by `S_A(φ) = exp(-i(φ/2) A⊗Y)` and read out in
//! `Z` applies `M_a(φ) = (cos(φ/2) I + (-1)^a sin(φ/2) A) / √2` to the
//! system, where the label `a` is `1 - b` for the raw probe bit `b`
//! (`⟨0|S_A(φ)|+⟩ = (cos(φ/2) I − sin(φ/2) A)/√2`).

#[allow(unused_imports)] // float math is std-only without this
use num_traits::Float;

use crate::qcore::matrix::identity;
use crate::{ComplexMatrix, C64};

/// Normalization of the modified eigenvalues `α_a(φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaNormalization {
    /// `α_a(φ) = (-1)^a / sin φ`; makes `Σ_a α_a M_a†M_a = A` hold.
    #[default]
    SinPhi,
    /// `(-1)^a / sin(φ/2)`. Wrong except as a deliberately corrupted
    /// variant for negative-control checks.
    SinHalfPhi,
}

impl AlphaNormalization {
    pub fn alpha(self, a: u8, phi: f64) -> f64 {
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        match self {
            AlphaNormalization::SinPhi => sign / phi.sin(),
            AlphaNormalization::SinHalfPhi => sign / (phi / 2.0).sin(),
        }
    }
}

/// Outcome label `a` of a probe whose `Z` read-out gave bit `b`.
pub fn label_for_bit(b: u8) -> u8 {
    1 - (b & 1)
}

/// `M_a(φ)` for dichotomic `A`.
pub fn measurement_operator(a: u8, phi: f64, op: &ComplexMatrix) -> ComplexMatrix {
    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
    let (s, c) = (phi / 2.0).sin_cos();
    (identity(op.nrows()).scale(c) + op.scale(sign * s)).scale(core::f64::consts::FRAC_1_SQRT_2)
}

/// `Σ_a M_a† M_a`.
pub fn completeness(phi: f64, op: &ComplexMatrix) -> ComplexMatrix {
    (0..2u8)
        .map(|a| {
            let m = measurement_operator(a, phi, op);
            m.adjoint() * m
        })
        .fold(ComplexMatrix::zeros(op.nrows(), op.ncols()), |acc, x| acc + x)
}

/// `Σ_a α_a M_a† M_a`, which reconstructs `A` under the correct
/// normalization.
pub fn weighted_decomposition(phi: f64, op: &ComplexMatrix, norm: AlphaNormalization) -> ComplexMatrix {
    (0..2u8)
        .map(|a| {
            let m = measurement_operator(a, phi, op);
            (m.adjoint() * m) * C64::new(norm.alpha(a, phi), 0.0)
        })
        .fold(ComplexMatrix::zeros(op.nrows(), op.ncols()), |acc, x| acc + x)
}

/// `Σ_a α_a M_a ρ M_a†` (equals `{A, ρ}/2`).
pub fn weighted_state_update(phi: f64, op: &ComplexMatrix, rho: &ComplexMatrix, norm: AlphaNormalization) -> ComplexMatrix {
    (0..2u8)
        .map(|a| {
            let m = measurement_operator(a, phi, op);
            (&m * rho * m.adjoint()) * C64::new(norm.alpha(a, phi), 0.0)
        })
        .fold(ComplexMatrix::zeros(op.nrows(), op.ncols()), |acc, x| acc + x)
}

/// `Σ_a α_a M_a† B M_a` (equals `{B, A}/2`).
pub fn weighted_heisenberg_update(phi: f64, op: &ComplexMatrix, b: &ComplexMatrix, norm: AlphaNormalization) -> ComplexMatrix {
    (0..2u8)
        .map(|a| {
            let m = measurement_operator(a, phi, op);
            (m.adjoint() * b * &m) * C64::new(norm.alpha(a, phi), 0.0)
        })
        .fold(ComplexMatrix::zeros(op.nrows(), op.ncols()), |acc, x| acc + x)
}
