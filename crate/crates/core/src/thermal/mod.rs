//! Exact Gibbs states and variational thermofield-double preparation.

mod gibbs;
mod optimize;
mod tfd;

pub use gibbs::{exact_free_energy, exact_gibbs, exact_purification, free_energy, log_partition, GibbsSpec};
pub use optimize::{Minimizer, Minimum, NelderMead};
pub use tfd::{
    register_a_populations, register_s_state, tfd_circuit, tfd_state, vqa_cost, vqa_optimize, EntropyMode,
    TfdAnsatz, VqaOptions, VqaResult,
};
