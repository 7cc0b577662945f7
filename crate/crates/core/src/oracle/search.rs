use rayon::prelude::*;
use serde::Serialize;

use super::grid::SimplexGrid;
use crate::error::{Error, Result};
use crate::lattice::{infimum, supremum};
use crate::locc::fidelity;
use crate::order::{compare, MajRelation};
use crate::provec::ProbVector;
use crate::scalar::{Rational, Scalar};

/// The grid vector of maximal `F(φ, χ)` among those with `ψ ≺ χ`. Ties keep
/// the first vector in grid order.
pub fn brute_force_optimal(
    psi: &ProbVector<Rational>,
    phi: &ProbVector<Rational>,
    grid: &SimplexGrid,
) -> Result<ProbVector<Rational>> {
    if grid.dimension() != psi.dim() || grid.dimension() != phi.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: grid.dimension(),
        });
    }
    let mut best: Option<(f64, &ProbVector<Rational>)> = None;
    for chi in grid.iter() {
        if !compare(psi, chi)?.is_majorized_by() {
            continue;
        }
        let f = fidelity(phi, chi)?;
        if best.is_none_or(|(b, _)| f > b) {
            best = Some((f, chi));
        }
    }
    best.map(|(_, chi)| chi.clone())
        .ok_or(Error::EmptyFeasibleSet)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Inf,
    Sup,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtremalVerdict {
    Pass {
        candidate: ProbVector<Rational>,
    },
    /// The candidate is not a lower (resp. upper) bound of the pair.
    NotABound {
        candidate: ProbVector<Rational>,
    },
    /// A grid bound of the pair that the candidate fails to dominate
    /// (resp. be dominated by).
    NotExtremal {
        candidate: ProbVector<Rational>,
        counterexample: ProbVector<Rational>,
    },
}

impl ExtremalVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ExtremalVerdict::Pass { .. })
    }
}

/// Checks `infimum(p, q)` or `supremum(p, q)` against every grid vector.
pub fn brute_force_extremal(
    p: &ProbVector<Rational>,
    q: &ProbVector<Rational>,
    grid: &SimplexGrid,
    which: Bound,
) -> Result<ExtremalVerdict> {
    let candidate = match which {
        Bound::Inf => infimum(p, q)?,
        Bound::Sup => supremum(p, q)?,
    };
    check_extremal_candidate(p, q, &candidate, grid, which)
}

/// Verifies that `candidate` is the greatest lower bound (`Inf`) or least
/// upper bound (`Sup`) of `p` and `q` relative to the grid.
pub fn check_extremal_candidate(
    p: &ProbVector<Rational>,
    q: &ProbVector<Rational>,
    candidate: &ProbVector<Rational>,
    grid: &SimplexGrid,
    which: Bound,
) -> Result<ExtremalVerdict> {
    let below = |a: &ProbVector<Rational>, b: &ProbVector<Rational>| -> Result<bool> {
        Ok(compare(a, b)?.is_majorized_by())
    };
    let is_bound = match which {
        Bound::Inf => below(candidate, p)? && below(candidate, q)?,
        Bound::Sup => below(p, candidate)? && below(q, candidate)?,
    };
    if !is_bound {
        return Ok(ExtremalVerdict::NotABound {
            candidate: candidate.clone(),
        });
    }
    for r in grid.iter() {
        let violates = match which {
            Bound::Inf => below(r, p)? && below(r, q)? && !below(r, candidate)?,
            Bound::Sup => below(p, r)? && below(q, r)? && !below(candidate, r)?,
        };
        if violates {
            return Ok(ExtremalVerdict::NotExtremal {
                candidate: candidate.clone(),
                counterexample: r.clone(),
            });
        }
    }
    Ok(ExtremalVerdict::Pass {
        candidate: candidate.clone(),
    })
}

/// A triple violating the modular law.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityViolation {
    pub x: ProbVector<Rational>,
    pub y: ProbVector<Rational>,
    pub z: ProbVector<Rational>,
    /// `x ∨ (y ∧ z)`.
    pub lhs: ProbVector<Rational>,
    /// `(x ∨ y) ∧ z`.
    pub rhs: ProbVector<Rational>,
}

/// First triple `(x, y, z)` in grid order with `x ≺ z` and
/// `x ∨ (y ∧ z) != (x ∨ y) ∧ z`.
///
/// Cost is cubic in the grid size; intended for `N <= 4`, `d <= 24`.
pub fn search_modularity_violation(grid: &SimplexGrid) -> Option<ModularityViolation> {
    let vs = grid.vectors();
    let n = vs.len();
    (0..n).into_par_iter().find_map_first(|xi| {
        let x = &vs[xi];
        let above: Vec<usize> = (0..n)
            .filter(|&zi| {
                zi != xi
                    && compare(x, &vs[zi])
                        .ok()
                        .is_some_and(|r| r.is_majorized_by())
            })
            .collect();
        if above.is_empty() {
            return None;
        }
        for y in vs {
            let x_join_y = supremum(x, y).ok()?;
            for &zi in &above {
                let z = &vs[zi];
                let lhs = supremum(x, &infimum(y, z).ok()?).ok()?;
                let rhs = infimum(&x_join_y, z).ok()?;
                if compare(&lhs, &rhs).ok()? != MajRelation::Equal {
                    return Some(ModularityViolation {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
        None
    })
}

/// Supremum computed as the least concave majorant of the pointwise maximum
/// of the two prefix-sum curves. Shares no code with the flattening
/// procedure and serves as its oracle.
pub fn hull_supremum(
    p: &ProbVector<Rational>,
    q: &ProbVector<Rational>,
) -> Result<ProbVector<Rational>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let n = p.dim();
    let (sp, sq) = (p.partial_sums(), q.partial_sums());
    let points: Vec<(usize, Rational)> = (0..=n)
        .map(|i| {
            let (a, b) = (sp.prefix(i), sq.prefix(i));
            (i, if a > b { a } else { b })
        })
        .collect();

    let mut hull: Vec<(usize, Rational)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // Drop b when it lies on or below the chord from a to pt.
            let lhs = (b.1.clone() - a.1.clone()) * Rational::from_count(pt.0 - a.0);
            let rhs = (pt.1.clone() - a.1.clone()) * Rational::from_count(b.0 - a.0);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut curve = vec![Rational::from_count(0); n + 1];
    for seg in hull.windows(2) {
        let ((x0, y0), (x1, y1)) = (&seg[0], &seg[1]);
        let slope = (y1.clone() - y0.clone()) / Rational::from_count(x1 - x0);
        for (x, c) in curve.iter_mut().enumerate().take(*x1 + 1).skip(*x0) {
            *c = y0.clone() + slope.clone() * Rational::from_count(x - x0);
        }
    }
    let weights = curve
        .windows(2)
        .map(|w| w[1].clone() - w[0].clone())
        .collect();
    ProbVector::new(weights)
}
