//! Meet and join of the majorization lattice.
//!
//! The infimum comes straight from the pointwise minimum of the two
//! prefix-sum curves, which is concave and therefore already sorted. The
//! supremum starts from the pointwise maximum, whose increments may ascend;
//! those ascents are removed by repeatedly averaging a block ending at the
//! first ascent ([`flatten_step`]) until the vector is sorted again.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::order::{compare, MajRelation};
use crate::provec::{ensure_same_dim, pair_epsilon, ProbVector, WeightRepr};
use crate::scalar::Scalar;

/// One averaging step. Positions are 0-based; `block_start..=ascent` was
/// replaced by `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenStep<W> {
    pub ascent: usize,
    pub block_start: usize,
    pub value: W,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlattenTrace<W> {
    pub steps: Vec<FlattenStep<W>>,
}

impl<W> FlattenTrace<W> {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

impl<W> Default for FlattenTrace<W> {
    fn default() -> Self {
        Self { steps: Vec::new() }
    }
}

impl<W: Scalar> Serialize for FlattenStep<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FlattenStep", 3)?;
        st.serialize_field("ascent", &self.ascent)?;
        st.serialize_field("block_start", &self.block_start)?;
        st.serialize_field("value", &WeightRepr(&self.value))?;
        st.end()
    }
}

impl<W: Scalar> Serialize for FlattenTrace<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FlattenTrace", 2)?;
        st.serialize_field("steps", &self.steps)?;
        st.serialize_field("iterations", &self.iterations())?;
        st.end()
    }
}

fn prefix_sums<W: Scalar>(w: &[W]) -> Vec<W> {
    let mut acc = W::zero();
    w.iter()
        .map(|x| {
            acc = acc.clone() + x.clone();
            acc.clone()
        })
        .collect()
}

fn increments<W: Scalar>(curve: Vec<W>) -> Vec<W> {
    let mut prev = W::zero();
    curve
        .into_iter()
        .map(|c| {
            let d = c.clone() - prev.clone();
            prev = c;
            d
        })
        .collect()
}

/// Greatest lower bound `p ∧ q`.
pub fn infimum<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<ProbVector<W>> {
    let rel = compare(p, q)?;
    if rel.is_majorized_by() {
        return Ok(p.clone());
    }
    if rel.majorizes() {
        return Ok(q.clone());
    }
    let curve = prefix_sums(p.weights())
        .into_iter()
        .zip(prefix_sums(q.weights()))
        .map(|(a, b)| a.min_of(b))
        .collect();
    Ok(ProbVector::from_computed(
        increments(curve),
        pair_epsilon(p, q),
    ))
}

/// Increments of the pointwise maximum of the two prefix-sum curves. Sums to
/// one but may contain ascents when the pair is incomparable.
pub fn supremum_seed<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<Vec<W>> {
    ensure_same_dim(p, q)?;
    let curve = prefix_sums(p.weights())
        .into_iter()
        .zip(prefix_sums(q.weights()))
        .map(|(a, b)| a.max_of(b))
        .collect();
    Ok(increments(curve))
}

/// Removes the first ascent of `u` by averaging the block that ends there.
///
/// With `j` the first position where `u[j] > u[j-1]` (beyond `eps`), the
/// block start `k` is the largest index below `j` whose left neighbour is at
/// least the block average; position 0 is always admissible.
pub fn flatten_step<W: Scalar>(u: &[W], eps: f64) -> Result<(Vec<W>, FlattenStep<W>)> {
    let j = (1..u.len())
        .find(|&i| u[i].gt_tol(&u[i - 1], eps))
        .ok_or(Error::NoAscent)?;

    let mut block_sum = u[j].clone();
    let mut chosen = None;
    for k in (0..j).rev() {
        block_sum = block_sum + u[k].clone();
        let avg = block_sum.clone() / W::from_count(j - k + 1);
        if k == 0 || !u[k - 1].lt_tol(&avg, eps) {
            chosen = Some((k, avg));
            break;
        }
    }
    let (k, value) = chosen.expect("k = 0 is always admissible");

    let mut t = u.to_vec();
    for x in &mut t[k..=j] {
        *x = value.clone();
    }
    Ok((
        t,
        FlattenStep {
            ascent: j,
            block_start: k,
            value,
        },
    ))
}

fn has_ascent<W: Scalar>(u: &[W], eps: f64) -> bool {
    u.windows(2).any(|w| w[1].gt_tol(&w[0], eps))
}

/// Least upper bound `p ∨ q` together with the flattening steps applied.
pub fn supremum_traced<W: Scalar>(
    p: &ProbVector<W>,
    q: &ProbVector<W>,
) -> Result<(ProbVector<W>, FlattenTrace<W>)> {
    let rel = compare(p, q)?;
    if rel.is_majorized_by() {
        return Ok((q.clone(), FlattenTrace::default()));
    }
    if rel.majorizes() {
        return Ok((p.clone(), FlattenTrace::default()));
    }

    let eps = pair_epsilon(p, q);
    let limit = p.dim().saturating_sub(1);
    let mut u = supremum_seed(p, q)?;
    let mut trace = FlattenTrace::default();
    while has_ascent(&u, eps) {
        if trace.iterations() == limit {
            return Err(Error::IterationOverflow { limit });
        }
        let (next, step) = flatten_step(&u, eps)?;
        trace.steps.push(step);
        u = next;
    }
    Ok((ProbVector::from_computed(u, eps), trace))
}

/// Least upper bound `p ∨ q`.
pub fn supremum<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<ProbVector<W>> {
    supremum_traced(p, q).map(|(s, _)| s)
}

/// Evaluation of the modular law `x ≺ z ⇒ x ∨ (y ∧ z) = (x ∨ y) ∧ z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityReport<W> {
    pub premise_holds: bool,
    pub lhs: ProbVector<W>,
    pub rhs: ProbVector<W>,
    pub modular: bool,
}

impl<W: Scalar> Serialize for ModularityReport<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ModularityReport", 4)?;
        st.serialize_field("premise_holds", &self.premise_holds)?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.serialize_field("modular", &self.modular)?;
        st.end()
    }
}

pub fn modularity_check<W: Scalar>(
    x: &ProbVector<W>,
    y: &ProbVector<W>,
    z: &ProbVector<W>,
) -> Result<ModularityReport<W>> {
    ensure_same_dim(x, y)?;
    ensure_same_dim(x, z)?;
    let premise_holds = compare(x, z)?.is_majorized_by();
    let lhs = supremum(x, &infimum(y, z)?)?;
    let rhs = infimum(&supremum(x, y)?, z)?;
    let modular = !premise_holds || compare(&lhs, &rhs)? == MajRelation::Equal;
    Ok(ModularityReport {
        premise_holds,
        lhs,
        rhs,
        modular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Percent-valued exact vector.
    fn pc(ws: &[i64]) -> ProbVector<Rational> {
        ProbVector::new(ws.iter().map(|&w| q(w, 100)).collect()).unwrap()
    }

    fn pcs(ws: &[i64]) -> Vec<Rational> {
        ws.iter().map(|&w| q(w, 100)).collect()
    }

    #[test]
    fn infimum_examples() {
        let p = pc(&[70, 15, 15]);
        let r = pc(&[50, 40, 10]);
        assert_eq!(infimum(&p, &r).unwrap(), pc(&[50, 35, 15]));
        let u = ProbVector::<Rational>::uniform(3).unwrap();
        assert_eq!(infimum(&u, &p).unwrap(), u);
        assert_eq!(infimum(&p, &p).unwrap(), p);
    }

    #[test]
    fn flatten_step_examples() {
        let (t, step) = flatten_step(&pcs(&[60, 15, 17, 8]), 0.0).unwrap();
        assert_eq!(t, pcs(&[60, 16, 16, 8]));
        assert_eq!((step.ascent, step.block_start), (2, 1));
        assert_eq!(step.value, q(16, 100));

        let (t, _) = flatten_step(&pcs(&[60, 15, 20, 5]), 0.0).unwrap();
        assert_eq!(t, vec![q(60, 100), q(175, 1000), q(175, 1000), q(5, 100)]);

        assert_eq!(
            flatten_step(&pcs(&[50, 50]), 0.0).unwrap_err(),
            Error::NoAscent
        );
    }

    #[test]
    fn flatten_step_reaches_front_block() {
        // The ascent swallows everything before it: k = 0.
        let (t, step) = flatten_step(&pcs(&[20, 10, 70]), 0.0).unwrap();
        assert_eq!(step.block_start, 0);
        assert!(t.iter().all(|x| *x == q(1, 3)));
    }

    #[test]
    fn supremum_examples() {
        let (s, trace) = supremum_traced(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap();
        assert_eq!(s, pc(&[70, 20, 10]));
        assert_eq!(trace.iterations(), 0);

        let p = pc(&[60, 15, 15, 10]);
        let r = pc(&[50, 25, 20, 5]);
        assert_eq!(supremum_seed(&p, &r).unwrap(), pcs(&[60, 15, 20, 5]));
        let (s, trace) = supremum_traced(&p, &r).unwrap();
        assert_eq!(
            s.weights(),
            &[q(60, 100), q(175, 1000), q(175, 1000), q(5, 100)]
        );
        assert_eq!(trace.iterations(), 1);

        let u = ProbVector::<Rational>::uniform(3).unwrap();
        assert!(supremum(&u, &p).is_err());
        let a = pc(&[50, 30, 20]);
        assert_eq!(supremum(&u, &a).unwrap(), a);
    }

    #[test]
    fn dimension_checks() {
        let a = pc(&[50, 50]);
        let b = pc(&[50, 30, 20]);
        assert!(matches!(
            infimum(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            supremum(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(modularity_check(&a, &a, &b).is_err());
    }

    #[test]
    fn modularity_on_chains_and_constants() {
        let x = pc(&[40, 30, 30]);
        let y = pc(&[50, 30, 20]);
        let z = pc(&[70, 20, 10]);
        let rep = modularity_check(&x, &y, &z).unwrap();
        assert!(rep.premise_holds && rep.modular);
        assert_eq!(rep.lhs, y);
        assert_eq!(rep.rhs, y);

        let rep = modularity_check(&x, &x, &x).unwrap();
        assert!(rep.modular);
    }

    #[test]
    fn float_supremum_matches_exact() {
        let p = ProbVector::new(vec![0.6, 0.15, 0.15, 0.1]).unwrap();
        let r = ProbVector::new(vec![0.5, 0.25, 0.2, 0.05]).unwrap();
        let s = supremum(&p, &r).unwrap();
        let expected = [0.6, 0.175, 0.175, 0.05];
        for (a, b) in s.weights().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_json() {
        let (_, trace) = supremum_traced(&pc(&[60, 15, 15, 10]), &pc(&[50, 25, 20, 5])).unwrap();
        assert_eq!(
            serde_json::to_string(&trace).unwrap(),
            r#"{"steps":[{"ascent":2,"block_start":1,"value":"7/40"}],"iterations":1}"#
        );
    }
}
