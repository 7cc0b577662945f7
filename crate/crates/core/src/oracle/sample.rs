use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::provec::{canonicalize, CanonOptions, ProbVector};

/// Deterministic generator for all sampling in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the sorted simplex: Dirichlet(1, ..., 1) via normalized
/// exponentials, then sorted.
pub fn sample_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProbVector<f64> {
    assert!(n >= 1);
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    canonicalize(
        raw,
        CanonOptions {
            renormalize: true,
            ..CanonOptions::default()
        },
    )
    .expect("exponential draws are positive and finite")
}
