//! Driver-node counts for structural and state controllability.

mod drivers;
mod matching;
mod rank;

pub use drivers::{
    adjacency_matrix, driver_count, state_driver_count, state_driver_placement, structural_driver_count,
    structural_driver_nodes, ControlKind, DriverCount, Input, StateMode, StatePlacement,
};
pub use matching::{maximum_matching, Matching};
pub use rank::{exact_rank, rank_bareiss, rank_mod_p, rational_rank, IntMatrix, PRIMES};
