//! Entropic distance compatible with the majorization lattice:
//! `d(p, q) = H(p) + H(q) - 2 H(p ∨ q)`.

use serde::Serialize;

use crate::error::Result;
use crate::lattice::supremum;
use crate::provec::ProbVector;
use crate::scalar::Scalar;

/// Rounding slack below zero that is clamped away.
const NEGATIVE_CLAMP: f64 = 1e-12;

/// Non-negative distance in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Distance(f64);

impl Distance {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn distance<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<Distance> {
    let join = supremum(p, q)?;
    let raw = p.shannon_entropy() + q.shannon_entropy() - 2.0 * join.shannon_entropy();
    let value = if raw < 0.0 && raw > -NEGATIVE_CLAMP {
        0.0
    } else {
        raw
    };
    Ok(Distance(value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(ws: &[f64]) -> ProbVector<f64> {
        ProbVector::new(ws.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let p = fv(&[0.5, 0.4, 0.1]);
        assert_eq!(distance(&p, &p).unwrap().value(), 0.0);

        let q = fv(&[0.7, 0.2, 0.1]);
        let d = distance(&p, &q).unwrap().value();
        assert!((d - (p.shannon_entropy() - q.shannon_entropy())).abs() < 1e-12);
        assert!((d - 0.14153).abs() < 1e-5);
    }

    #[test]
    fn distance_is_symmetric() {
        let p = fv(&[0.7, 0.15, 0.15]);
        let q = fv(&[0.5, 0.4, 0.1]);
        assert_eq!(distance(&p, &q).unwrap(), distance(&q, &p).unwrap());
        assert!(distance(&p, &q).unwrap().value() > 0.0);
    }

    #[test]
    fn distance_rejects_mismatch() {
        assert!(distance(&fv(&[1.0]), &fv(&[0.5, 0.5])).is_err());
    }
}
