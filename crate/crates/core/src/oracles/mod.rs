//! Independent executable checks of the auxiliary identities and bounds,
//! used as oracles for the rest of the crate.

mod brute;
mod calculus;
mod combinatorics;
mod suite;

pub use brute::{brute_force_hits, random_lattice_first_order};
pub use calculus::{fd_derivative, fd_weights, min_modulus, reciprocal_derivative, rk_ode_oracle, RK_STEPS};
pub use combinatorics::{
    check_delta_identity, check_delta_identity_exact, check_exp_bound, check_factorial_bound, enumerate_delta,
    exp_bound_logs, faa_di_bruno_exp, partition_count, rational, DeltaIdentity, PartitionMultiIndex,
};
pub use suite::{ode_vs_rk, random_fiber, run_suite, LemmaCheck, LemmaSuite, ODE_GRID};
