//! Complex linear algebra and quantum-state primitives.

pub mod matrix;
pub mod pauli;
pub mod state;

pub use matrix::{
    anticommutator, commutator, eigh, embed_local, expm_i, herm_fn, herm_fn_complex, identity,
    kron, kron_all, max_abs, max_abs_diff, psd_power, psd_sqrt, Eigh,
};
pub use pauli::{pauli_decompose, resum, Pauli, PauliString};
pub use state::{
    partial_trace, purified_distance, shannon_entropy, uhlmann_fidelity, von_neumann_entropy,
    DensityMatrix, PureState, QuantumState,
};
