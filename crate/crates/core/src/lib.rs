//! Majorization lattice on sorted probability vectors, with the entropic
//! lattice metric and optimal LOCC conversion of bipartite pure states.
//!
//! All algorithms are generic over [`Scalar`], implemented for exact
//! [`Rational`] arithmetic and for `f64` with an explicit tolerance.
//!
//! ```
//! use maj_lattice::{supremum, optimal_state, parse_rational, ProbVector};
//!
//! let v = |ws: &[&str]| {
//!     ProbVector::new(ws.iter().map(|w| parse_rational(w).unwrap()).collect()).unwrap()
//! };
//! let psi = v(&["0.70", "0.15", "0.15"]);
//! let phi = v(&["0.50", "0.40", "0.10"]);
//! assert_eq!(supremum(&psi, &phi).unwrap(), v(&["0.70", "0.20", "0.10"]));
//! assert_eq!(optimal_state(&psi, &phi).unwrap().0, v(&["0.70", "0.24", "0.06"]));
//! ```

pub mod error;
pub mod lattice;
pub mod locc;
pub mod metric;
pub mod oracle;
pub mod order;
pub mod provec;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{
    flatten_step, infimum, modularity_check, supremum, supremum_seed, supremum_traced, FlattenStep,
    FlattenTrace, ModularityReport,
};
pub use locc::{
    analyze, classical_trace_bound, delta3_closed_form, fidelity, nielsen_feasible, optimal_state,
    pad_to_common, success_probability, supremum_state, trace_distance_pure, AnalysisReport,
    CaseLabel, Delta3ClosedForm, RatioLadder, Rung,
};
pub use metric::{distance, Distance};
pub use order::{
    bistochastic_witness, compare, convex_probe, default_probes, majorized_by, BistochasticWitness,
    ConvexProbe, MajRelation,
};
pub use provec::{
    canonicalize, CanonOptions, Monotones, PartialSums, ProbVector, DEFAULT_EPSILON, SUM_TOLERANCE,
};
pub use scalar::{parse_rational, rational_from_f64, Mode, Rational, Scalar};
