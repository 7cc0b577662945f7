//! The majorization preorder on sorted probability vectors.
//!
//! `p ≺ q` ("p is majorized by q") holds when every prefix sum of `p` is at
//! most the corresponding prefix sum of `q`. Two further characterizations
//! are provided: a doubly stochastic matrix `D` with `p = D q` built from
//! T-transforms, and a necessary test through sums of convex functions.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::provec::{ensure_same_dim, pair_epsilon, ProbVector, WeightsRepr};
use crate::scalar::Scalar;

/// Outcome of comparing `p` against `q`.
///
/// Witness indices are prefix lengths `l` (1-based), i.e. positions of `S_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajRelation {
    Equal,
    /// `q ≺ p` and `p != q`; `first_strict` is the first `l` with `S_l(p) > S_l(q)`.
    StrictlyMajorizes {
        first_strict: usize,
    },
    /// `p ≺ q` and `p != q`; `first_strict` is the first `l` with `S_l(p) < S_l(q)`.
    StrictlyMajorizedBy {
        first_strict: usize,
    },
    /// The prefix-sum curves cross: `S_{p_ahead}(p) > S_{p_ahead}(q)` and
    /// `S_{q_ahead}(p) < S_{q_ahead}(q)`.
    Incomparable {
        p_ahead: usize,
        q_ahead: usize,
    },
}

impl MajRelation {
    /// `p ≺ q`, equality included.
    pub fn is_majorized_by(&self) -> bool {
        matches!(
            self,
            MajRelation::Equal | MajRelation::StrictlyMajorizedBy { .. }
        )
    }

    /// `q ≺ p`, equality included.
    pub fn majorizes(&self) -> bool {
        matches!(
            self,
            MajRelation::Equal | MajRelation::StrictlyMajorizes { .. }
        )
    }

    pub fn is_comparable(&self) -> bool {
        !matches!(self, MajRelation::Incomparable { .. })
    }

    /// The relation of `q` against `p`.
    pub fn reversed(self) -> Self {
        match self {
            MajRelation::Equal => MajRelation::Equal,
            MajRelation::StrictlyMajorizes { first_strict } => {
                MajRelation::StrictlyMajorizedBy { first_strict }
            }
            MajRelation::StrictlyMajorizedBy { first_strict } => {
                MajRelation::StrictlyMajorizes { first_strict }
            }
            MajRelation::Incomparable { p_ahead, q_ahead } => MajRelation::Incomparable {
                p_ahead: q_ahead,
                q_ahead: p_ahead,
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MajRelation::Equal => "equal",
            MajRelation::StrictlyMajorizes { .. } => "strictly_majorizes",
            MajRelation::StrictlyMajorizedBy { .. } => "strictly_majorized_by",
            MajRelation::Incomparable { .. } => "incomparable",
        }
    }
}

impl Serialize for MajRelation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Witness {
            Strict { first_strict: usize },
            Crossing { p_ahead: usize, q_ahead: usize },
        }
        let witness = match *self {
            MajRelation::Equal => None,
            MajRelation::StrictlyMajorizes { first_strict }
            | MajRelation::StrictlyMajorizedBy { first_strict } => {
                Some(Witness::Strict { first_strict })
            }
            MajRelation::Incomparable { p_ahead, q_ahead } => {
                Some(Witness::Crossing { p_ahead, q_ahead })
            }
        };
        let mut st = serializer.serialize_struct("MajRelation", 2)?;
        st.serialize_field("relation", self.name())?;
        st.serialize_field("witness", &witness)?;
        st.end()
    }
}

/// Classifies the pair by scanning prefix sums `S_1 .. S_{N-1}`.
pub fn compare<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<MajRelation> {
    ensure_same_dim(p, q)?;
    let eps = pair_epsilon(p, q);
    let mut p_ahead = None;
    let mut q_ahead = None;
    let (mut sp, mut sq) = (W::zero(), W::zero());
    let n = p.dim();
    for l in 1..n {
        sp = sp + p.weights()[l - 1].clone();
        sq = sq + q.weights()[l - 1].clone();
        match sp.cmp_tol(&sq, eps) {
            std::cmp::Ordering::Greater => {
                p_ahead.get_or_insert(l);
            }
            std::cmp::Ordering::Less => {
                q_ahead.get_or_insert(l);
            }
            std::cmp::Ordering::Equal => {}
        }
        if p_ahead.is_some() && q_ahead.is_some() {
            break;
        }
    }
    Ok(match (p_ahead, q_ahead) {
        (None, None) => MajRelation::Equal,
        (Some(first_strict), None) => MajRelation::StrictlyMajorizes { first_strict },
        (None, Some(first_strict)) => MajRelation::StrictlyMajorizedBy { first_strict },
        (Some(p_ahead), Some(q_ahead)) => MajRelation::Incomparable { p_ahead, q_ahead },
    })
}

/// `p ≺ q`.
pub fn majorized_by<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<bool> {
    Ok(compare(p, q)?.is_majorized_by())
}

/// Doubly stochastic matrix `D` with `D q = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BistochasticWitness<W> {
    entries: Vec<Vec<W>>,
    transforms: usize,
}

impl<W: Scalar> BistochasticWitness<W> {
    fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { W::one() } else { W::zero() })
                    .collect()
            })
            .collect();
        Self {
            entries,
            transforms: 0,
        }
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Vec<W>] {
        &self.entries
    }

    /// Number of T-transform factors in the product.
    pub fn transforms(&self) -> usize {
        self.transforms
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn apply(&self, v: &[W]) -> Vec<W> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(W::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<W> {
        self.entries
            .iter()
            .map(|row| row.iter().cloned().fold(W::zero(), |a, b| a + b))
            .collect()
    }

    pub fn column_sums(&self) -> Vec<W> {
        (0..self.dim())
            .map(|j| {
                self.entries
                    .iter()
                    .fold(W::zero(), |a, row| a + row[j].clone())
            })
            .collect()
    }

    /// Left-multiplies by the T-transform mixing coordinates `j` and `k`
    /// with weight `t` on the swap.
    fn push_transform(&mut self, j: usize, k: usize, t: &W) {
        let keep = W::one() - t.clone();
        let (row_j, row_k) = (self.entries[j].clone(), self.entries[k].clone());
        for c in 0..row_j.len() {
            self.entries[j][c] = keep.clone() * row_j[c].clone() + t.clone() * row_k[c].clone();
            self.entries[k][c] = t.clone() * row_j[c].clone() + keep.clone() * row_k[c].clone();
        }
        self.transforms += 1;
    }
}

impl<W: Scalar> Serialize for BistochasticWitness<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<WeightsRepr<'_, W>> = self.entries.iter().map(|r| WeightsRepr(r)).collect();
        let mut st = serializer.serialize_struct("BistochasticWitness", 2)?;
        st.serialize_field("entries", &rows)?;
        st.serialize_field("transforms", &self.transforms)?;
        st.end()
    }
}

/// Builds `D` with `p = D q` as a product of at most `N - 1` T-transforms.
///
/// Each step takes the last coordinate `j` where the current vector exceeds
/// `p` and the first later coordinate `k` where it falls short, then moves
/// `min(y_j - p_j, p_k - y_k)` of mass from `j` to `k`. At least one more
/// coordinate matches `p` after every step.
pub fn bistochastic_witness<W: Scalar>(
    p: &ProbVector<W>,
    q: &ProbVector<W>,
) -> Result<BistochasticWitness<W>> {
    if !compare(p, q)?.is_majorized_by() {
        return Err(Error::NotMajorized);
    }
    let eps = pair_epsilon(p, q);
    let n = p.dim();
    let x = p.weights();
    let mut y = q.weights().to_vec();
    let mut witness = BistochasticWitness::identity(n);

    for _ in 0..n.saturating_sub(1) {
        let Some(j) = (0..n).rev().find(|&i| y[i].gt_tol(&x[i], eps)) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&i| x[i].gt_tol(&y[i], eps)) else {
            break;
        };
        let give = y[j].clone() - x[j].clone();
        let take = x[k].clone() - y[k].clone();
        let delta = give.clone().min_of(take.clone());
        let t = delta.clone() / (y[j].clone() - y[k].clone());
        witness.push_transform(j, k, &t);
        if give <= take {
            y[j] = x[j].clone();
            y[k] = y[k].clone() + delta;
        } else {
            y[k] = x[k].clone();
            y[j] = y[j].clone() - delta;
        }
    }
    Ok(witness)
}

/// A convex function used by [`convex_probe`]. The second argument is the
/// dimension `N`.
#[derive(Clone, Copy)]
pub struct ConvexProbe {
    pub name: &'static str,
    f: fn(f64, usize) -> f64,
}

impl std::fmt::Debug for ConvexProbe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexProbe")
            .field("name", &self.name)
            .finish()
    }
}

impl ConvexProbe {
    pub fn new(name: &'static str, f: fn(f64, usize) -> f64) -> Self {
        Self { name, f }
    }

    pub fn eval(&self, x: f64, n: usize) -> f64 {
        (self.f)(x, n)
    }

    fn total<W: Scalar>(&self, v: &ProbVector<W>) -> f64 {
        v.weights()
            .iter()
            .map(|w| self.eval(w.to_f64(), v.dim()))
            .sum()
    }
}

/// `x²`, `x³`, `x ln x` (0 at 0) and `|x - 1/N|`.
pub fn default_probes() -> Vec<ConvexProbe> {
    vec![
        ConvexProbe::new("square", |x, _| x * x),
        ConvexProbe::new("cube", |x, _| x * x * x),
        ConvexProbe::new("x_ln_x", |x, _| if x > 0.0 { x * x.ln() } else { 0.0 }),
        ConvexProbe::new("abs_dev_uniform", |x, n| (x - 1.0 / n as f64).abs()),
    ]
}

const PROBE_SLACK: f64 = 1e-12;

/// True when `Σ f(p_i) <= Σ f(q_i)` for every probe. Necessary for `p ≺ q`.
pub fn convex_probe<W: Scalar>(
    p: &ProbVector<W>,
    q: &ProbVector<W>,
    probes: &[ConvexProbe],
) -> Result<bool> {
    ensure_same_dim(p, q)?;
    Ok(probes
        .iter()
        .all(|f| f.total(p) <= f.total(q) + PROBE_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fv(ws: &[f64]) -> ProbVector<f64> {
        ProbVector::new(ws.to_vec()).unwrap()
    }

    fn ev(ws: &[(i64, i64)]) -> ProbVector<Rational> {
        ProbVector::new(ws.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    #[test]
    fn compare_examples() {
        let rel = compare(&fv(&[0.70, 0.15, 0.15]), &fv(&[0.50, 0.40, 0.10])).unwrap();
        assert_eq!(
            rel,
            MajRelation::Incomparable {
                p_ahead: 1,
                q_ahead: 2
            }
        );

        let u = ProbVector::<Rational>::uniform(3).unwrap();
        let top = ProbVector::<Rational>::point_mass(3).unwrap();
        assert_eq!(
            compare(&u, &top).unwrap(),
            MajRelation::StrictlyMajorizedBy { first_strict: 1 }
        );

        let psi = ev(&[(60, 100), (15, 100), (15, 100), (10, 100)]);
        let phi = ev(&[(50, 100), (25, 100), (20, 100), (5, 100)]);
        assert!(!compare(&psi, &phi).unwrap().is_comparable());
        assert_eq!(compare(&psi, &psi).unwrap(), MajRelation::Equal);
    }

    #[test]
    fn compare_rejects_mismatched_dimensions() {
        assert_eq!(
            compare(&fv(&[1.0]), &fv(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn float_near_ties_are_equal() {
        let a = fv(&[0.5, 0.3, 0.2]);
        let b = fv(&[0.5 + 1e-14, 0.3 - 1e-14, 0.2]);
        assert_eq!(compare(&a, &b).unwrap(), MajRelation::Equal);
    }

    #[test]
    fn relation_json() {
        let rel = MajRelation::Incomparable {
            p_ahead: 1,
            q_ahead: 2,
        };
        assert_eq!(
            serde_json::to_string(&rel).unwrap(),
            r#"{"relation":"incomparable","witness":{"p_ahead":1,"q_ahead":2}}"#
        );
        assert_eq!(
            serde_json::to_string(&MajRelation::Equal).unwrap(),
            r#"{"relation":"equal","witness":null}"#
        );
    }

    #[test]
    fn witness_examples() {
        let p = ev(&[(7, 10), (3, 10)]);
        let d = bistochastic_witness(&p, &p).unwrap();
        assert_eq!(
            d.entries(),
            BistochasticWitness::<Rational>::identity(2).entries()
        );

        let d = bistochastic_witness(&ev(&[(1, 2), (1, 2)]), &ev(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(
            d.entries(),
            &[vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 2)]]
        );

        let p = ev(&[(6, 10), (4, 10)]);
        let top = ev(&[(8, 10), (2, 10)]);
        let d = bistochastic_witness(&p, &top).unwrap();
        assert_eq!(
            d.entries(),
            &[vec![q(2, 3), q(1, 3)], vec![q(1, 3), q(2, 3)]]
        );
        assert_eq!(d.apply(top.weights()), p.weights());
    }

    #[test]
    fn witness_requires_majorization() {
        let a = ev(&[(7, 10), (15, 100), (15, 100)]);
        let b = ev(&[(5, 10), (4, 10), (1, 10)]);
        assert_eq!(bistochastic_witness(&a, &b), Err(Error::NotMajorized));
    }

    #[test]
    fn witness_is_doubly_stochastic_exactly() {
        let p = ev(&[(3, 10), (3, 10), (2, 10), (2, 10)]);
        let top = ev(&[(6, 10), (2, 10), (2, 10), (0, 1)]);
        let d = bistochastic_witness(&p, &top).unwrap();
        assert!(d.transforms() <= 3);
        assert!(d.row_sums().iter().all(|s| *s == q(1, 1)));
        assert!(d.column_sums().iter().all(|s| *s == q(1, 1)));
        assert!(d.entries().iter().flatten().all(|e| *e >= q(0, 1)));
        assert_eq!(d.apply(top.weights()), p.weights());
    }

    #[test]
    fn convex_probe_examples() {
        let square = [ConvexProbe::new("square", |x, _| x * x)];
        assert!(convex_probe(&fv(&[0.5, 0.5]), &fv(&[1.0, 0.0]), &square).unwrap());

        let a = fv(&[0.70, 0.15, 0.15]);
        let b = fv(&[0.50, 0.40, 0.10]);
        let probes = default_probes();
        assert!(!convex_probe(&a, &b, &probes).unwrap());
        // Necessary only: every default probe passes in the reverse direction
        // even though the pair is incomparable.
        assert!(convex_probe(&b, &a, &probes).unwrap());
        assert!(!compare(&b, &a).unwrap().is_comparable());
        assert!(convex_probe(&a, &a, &probes).unwrap());
    }
}
