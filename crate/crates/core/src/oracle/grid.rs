use crate::provec::ProbVector;
use crate::scalar::{Rational, Scalar};

/// All sorted probability vectors of dimension `N` whose weights are
/// multiples of `1/d`, i.e. the partitions of `d` into at most `N` parts.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    dimension: usize,
    denominator: u64,
    parts: Vec<Vec<u64>>,
    vectors: Vec<ProbVector<Rational>>,
}

impl SimplexGrid {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn vectors(&self) -> &[ProbVector<Rational>] {
        &self.vectors
    }

    /// Integer numerators of each member, same order as [`Self::vectors`].
    pub fn parts(&self) -> &[Vec<u64>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ProbVector<Rational>> {
        self.vectors.iter()
    }

    /// Index of `v` in the grid, if it is a member.
    pub fn position(&self, v: &ProbVector<Rational>) -> Option<usize> {
        self.vectors.iter().position(|g| g == v)
    }

    /// `f64` copies of the members.
    pub fn float_vectors(&self) -> Vec<ProbVector<f64>> {
        self.vectors.iter().map(ProbVector::to_float).collect()
    }
}

/// Enumerates the grid in decreasing lexicographic order, starting at
/// `[1, 0, ..., 0]`. Parts are generated non-increasing, so no sorting or
/// de-duplication is needed.
pub fn enumerate_simplex(dimension: usize, denominator: u64) -> SimplexGrid {
    assert!(
        dimension >= 1 && denominator >= 1,
        "N and d must be positive"
    );
    let mut parts = Vec::new();
    let mut current = Vec::with_capacity(dimension);
    descend(
        denominator,
        denominator,
        dimension,
        &mut current,
        &mut parts,
    );

    let vectors = parts
        .iter()
        .map(|p: &Vec<u64>| {
            let weights = p
                .iter()
                .map(|&k| Rational::from_ratio(k, denominator))
                .collect();
            ProbVector::new(weights).expect("grid points lie on the simplex")
        })
        .collect();

    SimplexGrid {
        dimension,
        denominator,
        parts,
        vectors,
    }
}

fn descend(
    remaining: u64,
    cap: u64,
    slots: usize,
    current: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    // Largest part first; the remaining slots must be able to absorb the rest.
    let hi = remaining.min(cap);
    let lo = remaining.div_ceil(slots as u64);
    for part in (lo..=hi).rev() {
        current.push(part);
        descend(remaining - part, part, slots - 1, current, out);
        current.pop();
    }
}
