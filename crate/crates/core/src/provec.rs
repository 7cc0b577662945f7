//! Ordered probability vectors (elements of the sorted simplex) and the
//! scalar functionals built on them: partial sums, tail monotones and
//! Shannon entropy.

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};

/// Default comparison tolerance for float vectors.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Allowed deviation of a float vector's sum from 1 at construction.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonOptions {
    /// Float-mode comparison tolerance. Ignored for exact vectors.
    pub epsilon: f64,
    /// Divide by the sum instead of rejecting vectors that do not sum to 1.
    pub renormalize: bool,
}

impl Default for CanonOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            renormalize: false,
        }
    }
}

/// A probability vector with weights sorted non-increasingly.
///
/// Trailing zeros are kept, so the dimension is the declared one rather than
/// the support size.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector<W> {
    weights: Vec<W>,
    epsilon: f64,
}

/// Validates `raw` as a point of the simplex and sorts it non-increasingly.
pub fn canonicalize<W: Scalar>(raw: Vec<W>, options: CanonOptions) -> Result<ProbVector<W>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let epsilon = match W::MODE {
        Mode::Exact => 0.0,
        Mode::Float => options.epsilon.max(0.0),
    };
    let mut weights = Vec::with_capacity(raw.len());
    for (index, w) in raw.into_iter().enumerate() {
        if !w.is_finite_weight() {
            return Err(Error::NonFinite { index });
        }
        if w.lt_tol(&W::zero(), epsilon) {
            return Err(Error::NegativeWeight {
                index,
                value: w.to_f64(),
            });
        }
        weights.push(if w < W::zero() { W::zero() } else { w });
    }

    let sum = weights.iter().cloned().fold(W::zero(), |acc, w| acc + w);
    if options.renormalize {
        if sum.is_zero() {
            return Err(Error::SumNotOne { sum: 0.0 });
        }
        weights = weights.into_iter().map(|w| w / sum.clone()).collect();
    } else {
        let off = match W::MODE {
            Mode::Exact => !sum.is_one(),
            Mode::Float => (sum.to_f64() - 1.0).abs() > SUM_TOLERANCE,
        };
        if off {
            return Err(Error::SumNotOne { sum: sum.to_f64() });
        }
    }

    sort_descending(&mut weights);
    Ok(ProbVector { weights, epsilon })
}

fn sort_descending<W: Scalar>(weights: &mut [W]) {
    weights.sort_by(|a, b| b.partial_cmp(a).expect("weights are finite"));
}

impl<W: Scalar> ProbVector<W> {
    /// Canonicalizes with default options.
    pub fn new(raw: Vec<W>) -> Result<Self> {
        canonicalize(raw, CanonOptions::default())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let w = W::from_ratio(1, n as u64);
        Self::new(vec![w; n])
    }

    /// `[1, 0, ..., 0]`, the top of the lattice.
    pub fn point_mass(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut w = vec![W::zero(); n];
        w[0] = W::one();
        Self::new(w)
    }

    /// Builds a vector from weights produced by an internal algorithm that
    /// already guarantees membership in the simplex (up to rounding in float
    /// mode, which is repaired here).
    pub(crate) fn from_computed(mut weights: Vec<W>, epsilon: f64) -> Self {
        match W::MODE {
            Mode::Exact => {
                assert!(
                    weights.windows(2).all(|w| w[0] >= w[1]),
                    "exact lattice output must be sorted"
                );
                assert!(weights.iter().all(|w| *w >= W::zero()));
                Self {
                    weights,
                    epsilon: 0.0,
                }
            }
            Mode::Float => {
                for w in weights.iter_mut() {
                    if *w < W::zero() {
                        *w = W::zero();
                    }
                }
                sort_descending(&mut weights);
                Self { weights, epsilon }
            }
        }
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<W> {
        self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode(&self) -> Mode {
        W::MODE
    }

    /// Same vector with a different float tolerance.
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        if W::MODE == Mode::Float {
            self.epsilon = epsilon.max(0.0);
        }
        self
    }

    /// Number of strictly positive weights.
    pub fn rank(&self) -> usize {
        self.weights.iter().filter(|w| !w.is_zero()).count()
    }

    /// Embeds the vector in a larger dimension by appending zeros.
    pub fn zero_padded(&self, n: usize) -> Result<Self> {
        if n < self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: n,
            });
        }
        let mut weights = self.weights.clone();
        weights.resize(n, W::zero());
        Ok(Self {
            weights,
            epsilon: self.epsilon,
        })
    }

    pub fn to_float(&self) -> ProbVector<f64> {
        ProbVector {
            weights: self.weights.iter().map(Scalar::to_f64).collect(),
            epsilon: if W::MODE == Mode::Float {
                self.epsilon
            } else {
                DEFAULT_EPSILON
            },
        }
    }

    /// Exact equality for rationals; component-wise within `tol` for floats.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && match W::MODE {
                Mode::Exact => self.weights == other.weights,
                Mode::Float => self
                    .weights
                    .iter()
                    .zip(&other.weights)
                    .all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= tol),
            }
    }

    pub fn partial_sums(&self) -> PartialSums<W> {
        let mut acc = W::zero();
        let sums = self
            .weights
            .iter()
            .map(|w| {
                acc = acc.clone() + w.clone();
                acc.clone()
            })
            .collect();
        PartialSums { sums }
    }

    /// Tail sums `E_l = 1 - S_{l-1}`, accumulated from the back so float tails
    /// do not suffer cancellation.
    pub fn monotones(&self) -> Monotones<W> {
        let mut values = vec![W::zero(); self.dim()];
        let mut acc = W::zero();
        for (i, w) in self.weights.iter().enumerate().rev() {
            acc = acc + w.clone();
            values[i] = acc.clone();
        }
        values[0] = W::one();
        Monotones { values }
    }

    /// Shannon entropy in nats, with `0 ln 0 = 0`. Always evaluated in `f64`.
    pub fn shannon_entropy(&self) -> f64 {
        self.weights
            .iter()
            .map(Scalar::to_f64)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Display form used in reports and counterexamples.
    pub fn render(&self) -> Vec<String> {
        self.weights.iter().map(Scalar::render).collect()
    }
}

/// Cumulative sums `S_1, ..., S_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSums<W> {
    sums: Vec<W>,
}

impl<W: Scalar> PartialSums<W> {
    pub fn as_slice(&self) -> &[W] {
        &self.sums
    }

    /// `S_l` for `l` in `0..=N`, with `S_0 = 0`.
    pub fn prefix(&self, l: usize) -> W {
        if l == 0 {
            W::zero()
        } else {
            self.sums[l - 1].clone()
        }
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }
}

/// Entanglement monotones `E_1, ..., E_N` (tail sums).
#[derive(Debug, Clone, PartialEq)]
pub struct Monotones<W> {
    values: Vec<W>,
}

impl<W: Scalar> Monotones<W> {
    pub fn as_slice(&self) -> &[W] {
        &self.values
    }

    /// `E_l` for `l` in `1..=N+1`, with `E_{N+1} = 0`.
    pub fn tail(&self, l: usize) -> W {
        assert!(l >= 1, "monotones are indexed from 1");
        self.values.get(l - 1).cloned().unwrap_or_else(W::zero)
    }
}

pub(crate) fn ensure_same_dim<W>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<()> {
    if p.weights.len() != q.weights.len() {
        return Err(Error::DimensionMismatch {
            left: p.weights.len(),
            right: q.weights.len(),
        });
    }
    Ok(())
}

pub(crate) fn pair_epsilon<W>(p: &ProbVector<W>, q: &ProbVector<W>) -> f64 {
    p.epsilon.max(q.epsilon)
}

/// Serializes a weight slice with the backend's JSON representation.
pub(crate) struct WeightsRepr<'a, W>(pub &'a [W]);

impl<W: Scalar> Serialize for WeightsRepr<'_, W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for w in self.0 {
            seq.serialize_element(&WeightRepr(w))?;
        }
        seq.end()
    }
}

pub(crate) struct WeightRepr<'a, W>(pub &'a W);

impl<W: Scalar> Serialize for WeightRepr<'_, W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize_weight(serializer)
    }
}

impl<W: Scalar> Serialize for ProbVector<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ProbVector", 2)?;
        st.serialize_field("weights", &WeightsRepr(&self.weights))?;
        st.serialize_field("mode", &W::MODE)?;
        st.end()
    }
}
