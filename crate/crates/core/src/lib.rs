//! Numerical core for measuring out-of-time-order correlators (OTOCs) of
//! spin chains.
//!
//! Everything in this crate is `no_std` + `alloc`: dense complex linear
//! algebra, the XXZ Hamiltonian and its propagators, a small circuit
//! simulator (statevector and density matrix), thermal-state preparation,
//! an exact OTOC oracle, and the three shot-based measurement protocols
//! (rewinding time, weak measurement, irreversibility susceptibility).
//!
//! Qubit sites are 0-based. Site 0 is the leftmost (most significant)
//! tensor factor, so `σˣ` on site 0 of a 4-qubit register is `X⊗I⊗I⊗I`.

#![no_std]

extern crate alloc;

pub mod circuit;
pub mod dynamics;
mod error;
pub mod oracle;
pub mod protocols;
pub mod qcore;
pub mod stats;
pub mod thermal;

pub use error::{Error, Result};

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix (row/column semantic indexing).
pub type ComplexMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type ComplexVector = nalgebra::DVector<C64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
