//! Brute-force oracles, grid enumeration, seeded sampling and the invariant
//! suites built from them.

pub mod grid;
pub mod sample;
pub mod search;
pub mod suites;

pub use grid::{enumerate_simplex, SimplexGrid};
pub use sample::{sample_simplex, seeded_rng};
pub use search::{
    brute_force_extremal, brute_force_optimal, check_extremal_candidate, hull_supremum,
    search_modularity_violation, Bound, ExtremalVerdict, ModularityViolation,
};
pub use suites::{run_suite, PropertyOutcome, Suite, SuiteReport, VerifyConfig};
