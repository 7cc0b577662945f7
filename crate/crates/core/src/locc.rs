//! Deterministic LOCC conversion of bipartite pure states, expressed on the
//! squared Schmidt coefficients.
//!
//! * feasibility: `ψ → φ` is possible iff `ψ ≺ φ`;
//! * the fidelity-optimal reachable target `χ_opt`, built from a ladder of
//!   tail-sum ratios;
//! * the lattice target `χ_sup = ψ ∨ φ`, the reachable state closest to `φ`
//!   in the entropic metric;
//! * fidelity, pure-state trace distance and the optimal probabilistic
//!   success rate.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{supremum_traced, FlattenTrace};
use crate::metric::distance;
use crate::order::{compare, MajRelation};
use crate::provec::{ensure_same_dim, pair_epsilon, ProbVector, WeightRepr};
use crate::scalar::{Mode, Scalar};

/// Per-component tolerance for the float-mode coincidence flag.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-9;

/// `ψ ≺ φ`: the conversion `ψ → φ` can be done deterministically.
pub fn nielsen_feasible<W: Scalar>(psi: &ProbVector<W>, phi: &ProbVector<W>) -> Result<bool> {
    Ok(compare(psi, phi)?.is_majorized_by())
}

/// Block `start..end` (0-based, end exclusive) of `χ_opt`, equal to `ratio · φ`
/// on that block.
#[derive(Debug, Clone, PartialEq)]
pub struct Rung<W> {
    pub start: usize,
    pub end: usize,
    pub ratio: W,
}

/// Ratio ladder generating `χ_opt`. Rungs are stored in construction order:
/// the first covers the tail of the vector and carries the smallest ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioLadder<W> {
    rungs: Vec<Rung<W>>,
}

impl<W: Scalar> RatioLadder<W> {
    pub fn rungs(&self) -> &[Rung<W>] {
        &self.rungs
    }

    pub fn ratios(&self) -> Vec<W> {
        self.rungs.iter().map(|r| r.ratio.clone()).collect()
    }

    /// Block starts, 0-based, decreasing down to 0.
    pub fn block_starts(&self) -> Vec<usize> {
        self.rungs.iter().map(|r| r.start).collect()
    }
}

impl<W: Scalar> Serialize for Rung<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Rung", 3)?;
        st.serialize_field("start", &self.start)?;
        st.serialize_field("end", &self.end)?;
        st.serialize_field("ratio", &WeightRepr(&self.ratio))?;
        st.end()
    }
}

impl<W: Scalar> Serialize for RatioLadder<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RatioLadder", 1)?;
        st.serialize_field("rungs", &self.rungs)?;
        st.end()
    }
}

fn block_sum<W: Scalar>(w: &[W]) -> W {
    w.iter().cloned().fold(W::zero(), |a, b| a + b)
}

/// The reachable state of maximal fidelity with `φ`, and the ladder that
/// produced it.
///
/// Starting from the end `N`, each rung picks the smallest start index
/// minimizing `Σψ[start..end] / Σφ[start..end]` over blocks with positive
/// `φ` mass, and the next rung continues from that start. On each block the
/// result is `φ` rescaled to carry exactly `ψ`'s mass.
///
/// When `ψ` has smaller support than `φ` the first ratio is 0 and the
/// corresponding tail of `χ_opt` is zero, which is the only reachable choice.
pub fn optimal_state<W: Scalar>(
    psi: &ProbVector<W>,
    phi: &ProbVector<W>,
) -> Result<(ProbVector<W>, RatioLadder<W>)> {
    ensure_same_dim(psi, phi)?;
    let eps = pair_epsilon(psi, phi);
    let (ps, ph) = (psi.weights(), phi.weights());
    let n = psi.dim();

    let mut rungs = Vec::new();
    let mut sums = Vec::new();
    let mut end = n;
    loop {
        let mut best: Option<(usize, W, W, W)> = None;
        for start in 0..end {
            let mass_phi = block_sum(&ph[start..end]);
            if mass_phi.is_zero() {
                continue;
            }
            let mass_psi = block_sum(&ps[start..end]);
            let ratio = mass_psi.clone() / mass_phi.clone();
            let better = match &best {
                None => true,
                Some((_, r, _, _)) => ratio.lt_tol(r, eps),
            };
            if better {
                best = Some((start, ratio, mass_psi, mass_phi));
            }
        }
        let (start, ratio, mass_psi, mass_phi) =
            best.expect("the block starting at 0 always carries phi mass");
        rungs.push(Rung { start, end, ratio });
        sums.push((mass_psi, mass_phi));
        if start == 0 {
            break;
        }
        end = start;
    }

    let ladder = RatioLadder { rungs };
    if ladder.rungs.len() == 1 {
        return Ok((phi.clone(), ladder));
    }

    let mut chi = vec![W::zero(); n];
    for (rung, (mass_psi, mass_phi)) in ladder.rungs.iter().zip(&sums) {
        for i in rung.start..rung.end {
            // mass_psi * (φ_i / mass_phi): exact for single-element blocks in f64.
            chi[i] = mass_psi.clone() * (ph[i].clone() / mass_phi.clone());
        }
    }
    Ok((ProbVector::from_computed(chi, eps), ladder))
}

/// `χ_sup = ψ ∨ φ`.
pub fn supremum_state<W: Scalar>(
    psi: &ProbVector<W>,
    phi: &ProbVector<W>,
) -> Result<ProbVector<W>> {
    supremum_traced(psi, phi).map(|(s, _)| s)
}

/// Fidelity `(Σ √(p_i q_i))²` between probability vectors, in `f64`.
pub fn fidelity<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<f64> {
    ensure_same_dim(p, q)?;
    let root: f64 = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(a, b)| (a.to_f64() * b.to_f64()).sqrt())
        .sum();
    Ok((root * root).min(1.0))
}

/// `½ Σ |p_i − q_i|`, a lower bound on the pure-state trace distance.
pub fn classical_trace_bound<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<f64> {
    ensure_same_dim(p, q)?;
    Ok(0.5
        * p.weights()
            .iter()
            .zip(q.weights())
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .sum::<f64>())
}

/// Trace distance `√(1 − F)` between pure states sharing a Schmidt basis.
pub fn trace_distance_pure<W: Scalar>(p: &ProbVector<W>, q: &ProbVector<W>) -> Result<f64> {
    let d = (1.0 - fidelity(p, q)?).max(0.0).sqrt();
    debug_assert!(d >= classical_trace_bound(p, q)? - 1e-9);
    Ok(d)
}

/// Maximal probability of converting `ψ` into `φ`:
/// `min_l E_l(ψ) / E_l(φ)` over `l` with `E_l(φ) > 0`, capped at 1.
pub fn success_probability<W: Scalar>(psi: &ProbVector<W>, phi: &ProbVector<W>) -> Result<W> {
    ensure_same_dim(psi, phi)?;
    let (e_psi, e_phi) = (psi.monotones(), phi.monotones());
    let mut best = W::one();
    for (a, b) in e_psi.as_slice().iter().zip(e_phi.as_slice()) {
        if b.is_zero() {
            continue;
        }
        best = best.min_of(a.clone() / b.clone());
    }
    Ok(best)
}

/// Closed forms of `χ_opt` and `χ_sup` for incomparable pairs in dimension 3.
#[derive(Debug, Clone, PartialEq)]
pub enum Delta3ClosedForm<W> {
    /// `ψ₁ > φ₁` and `ψ₁ + ψ₂ < φ₁ + φ₂`.
    CaseA {
        chi_opt: ProbVector<W>,
        chi_sup: ProbVector<W>,
    },
    /// `ψ₁ < φ₁` and `ψ₁ + ψ₂ > φ₁ + φ₂`.
    CaseB {
        chi_opt: ProbVector<W>,
        chi_sup: ProbVector<W>,
    },
    NotApplicable,
}

pub fn delta3_closed_form<W: Scalar>(
    psi: &ProbVector<W>,
    phi: &ProbVector<W>,
) -> Result<Delta3ClosedForm<W>> {
    ensure_same_dim(psi, phi)?;
    if psi.dim() != 3 {
        return Err(Error::WrongDimension {
            expected: 3,
            found: psi.dim(),
        });
    }
    if compare(psi, phi)?.is_comparable() {
        return Err(Error::ComparablePair);
    }
    let eps = pair_epsilon(psi, phi);
    let [a1, a2, a3] = <[W; 3]>::try_from(psi.weights().to_vec()).expect("dimension 3");
    let [b1, b2, b3] = <[W; 3]>::try_from(phi.weights().to_vec()).expect("dimension 3");
    let one = W::one();
    let head_psi = a1.clone() + a2.clone();
    let head_phi = b1.clone() + b2.clone();

    if a1.gt_tol(&b1, eps) && head_psi.lt_tol(&head_phi, eps) {
        let r1 = a1.clone() / b1.clone();
        let r2 = (one.clone() - a1.clone()) / (one - b1.clone());
        let chi_opt = vec![r1 * b1.clone(), r2.clone() * b2.clone(), r2 * b3.clone()];
        let chi_sup = vec![a1.clone(), head_phi - a1, b3];
        Ok(Delta3ClosedForm::CaseA {
            chi_opt: ProbVector::from_computed(chi_opt, eps),
            chi_sup: ProbVector::from_computed(chi_sup, eps),
        })
    } else if a1.lt_tol(&b1, eps) && head_psi.gt_tol(&head_phi, eps) {
        let r1 = head_psi.clone() / head_phi.clone();
        let r2 = (one.clone() - head_psi.clone()) / (one - head_phi);
        let chi_opt = vec![r1.clone() * b1.clone(), r1 * b2, r2 * b3];
        let chi_sup = vec![b1.clone(), head_psi - b1, a3];
        Ok(Delta3ClosedForm::CaseB {
            chi_opt: ProbVector::from_computed(chi_opt, eps),
            chi_sup: ProbVector::from_computed(chi_sup, eps),
        })
    } else {
        Ok(Delta3ClosedForm::NotApplicable)
    }
}

/// Position of the pair in the three-way case split of the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// `ψ ≺ φ`.
    Feasible,
    /// `φ ≺ ψ` strictly.
    ReverseFeasible,
    Incomparable,
}

/// Full analysis of converting `ψ` towards `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport<W> {
    pub psi: ProbVector<W>,
    pub phi: ProbVector<W>,
    pub relation: MajRelation,
    pub feasible: bool,
    pub case_label: CaseLabel,
    pub chi_sup: ProbVector<W>,
    pub chi_opt: ProbVector<W>,
    pub ladder: RatioLadder<W>,
    /// `F(φ, χ_opt)`.
    pub fidelity_opt: f64,
    /// `F(φ, χ_sup)`.
    pub fidelity_sup: f64,
    /// `d(φ, χ_sup)`.
    pub distance_sup: f64,
    /// `d(φ, χ_opt)`.
    pub distance_opt: f64,
    pub success_probability: W,
    /// `φ ≺ χ_sup ≺ χ_opt` was confirmed on the computed vectors.
    pub theorem2_verified: bool,
    pub opt_equals_sup: bool,
    /// Flattening steps of the supremum; not part of the serialized report.
    pub trace: FlattenTrace<W>,
}

impl<W: Scalar> Serialize for AnalysisReport<W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("AnalysisReport", 15)?;
        st.serialize_field("psi", &self.psi)?;
        st.serialize_field("phi", &self.phi)?;
        st.serialize_field("relation", &self.relation)?;
        st.serialize_field("feasible", &self.feasible)?;
        st.serialize_field("case_label", &self.case_label)?;
        st.serialize_field("chi_sup", &self.chi_sup)?;
        st.serialize_field("chi_opt", &self.chi_opt)?;
        st.serialize_field("ladder", &self.ladder)?;
        st.serialize_field("fidelity_opt", &self.fidelity_opt)?;
        st.serialize_field("fidelity_sup", &self.fidelity_sup)?;
        st.serialize_field("distance_sup", &self.distance_sup)?;
        st.serialize_field("distance_opt", &self.distance_opt)?;
        st.serialize_field(
            "success_probability",
            &WeightRepr(&self.success_probability),
        )?;
        st.serialize_field("theorem2_verified", &self.theorem2_verified)?;
        st.serialize_field("opt_equals_sup", &self.opt_equals_sup)?;
        st.end()
    }
}

/// Zero-pads the shorter spectrum so both live in the same dimension.
pub fn pad_to_common<W: Scalar>(
    psi: &ProbVector<W>,
    phi: &ProbVector<W>,
) -> Result<(ProbVector<W>, ProbVector<W>)> {
    let n = psi.dim().max(phi.dim());
    Ok((psi.zero_padded(n)?, phi.zero_padded(n)?))
}

pub fn analyze<W: Scalar>(psi: &ProbVector<W>, phi: &ProbVector<W>) -> Result<AnalysisReport<W>> {
    let relation = compare(psi, phi)?;
    let feasible = relation.is_majorized_by();
    let case_label = if feasible {
        CaseLabel::Feasible
    } else if relation.majorizes() {
        CaseLabel::ReverseFeasible
    } else {
        CaseLabel::Incomparable
    };

    let (chi_sup, trace) = supremum_traced(psi, phi)?;
    let (chi_opt, ladder) = optimal_state(psi, phi)?;

    let theorem2_verified =
        compare(phi, &chi_sup)?.is_majorized_by() && compare(&chi_sup, &chi_opt)?.is_majorized_by();
    debug_assert!(theorem2_verified, "φ ≺ χ_sup ≺ χ_opt failed");

    let opt_equals_sup = match W::MODE {
        Mode::Exact => chi_opt == chi_sup,
        Mode::Float => chi_opt.approx_eq(&chi_sup, COINCIDENCE_TOLERANCE),
    };

    Ok(AnalysisReport {
        fidelity_opt: fidelity(phi, &chi_opt)?,
        fidelity_sup: fidelity(phi, &chi_sup)?,
        distance_sup: distance(phi, &chi_sup)?.value(),
        distance_opt: distance(phi, &chi_opt)?.value(),
        success_probability: success_probability(psi, phi)?,
        psi: psi.clone(),
        phi: phi.clone(),
        relation,
        feasible,
        case_label,
        chi_sup,
        chi_opt,
        ladder,
        theorem2_verified,
        opt_equals_sup,
        trace,
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

    fn pc(ws: &[i64]) -> ProbVector<Rational> {
        ProbVector::new(ws.iter().map(|&w| q(w, 100)).collect()).unwrap()
    }

    fn fv(ws: &[f64]) -> ProbVector<f64> {
        ProbVector::new(ws.to_vec()).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let u = ProbVector::<Rational>::uniform(2).unwrap();
        let top = ProbVector::<Rational>::point_mass(2).unwrap();
        assert!(nielsen_feasible(&u, &top).unwrap());
        assert!(!nielsen_feasible(&pc(&[60, 15, 15, 10]), &pc(&[50, 25, 20, 5])).unwrap());
        assert!(nielsen_feasible(&top, &top).unwrap());
    }

    #[test]
    fn optimal_state_worked_example() {
        let (chi, ladder) = optimal_state(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap();
        assert_eq!(chi, pc(&[70, 24, 6]));
        assert_eq!(ladder.block_starts(), vec![1, 0]);
        assert_eq!(ladder.ratios(), vec![q(3, 5), q(7, 5)]);
    }

    #[test]
    fn optimal_state_reverse_example() {
        let (chi, ladder) = optimal_state(&pc(&[50, 40, 10]), &pc(&[70, 15, 15])).unwrap();
        assert_eq!(ladder.block_starts(), vec![2, 0]);
        assert_eq!(ladder.ratios(), vec![q(2, 3), q(90, 85)]);
        let expected = vec![q(90, 85) * q(7, 10), q(90, 85) * q(15, 100), q(1, 10)];
        assert_eq!(chi.weights(), expected.as_slice());
        let approx: Vec<f64> = chi.to_float().into_weights();
        for (a, b) in approx.iter().zip([0.74118, 0.15882, 0.10]) {
            assert!((a - b).abs() < 5e-6);
        }
    }

    #[test]
    fn optimal_state_feasible_returns_target() {
        let phi = pc(&[70, 20, 10]);
        let (chi, ladder) = optimal_state(&pc(&[50, 40, 10]), &phi).unwrap();
        assert_eq!(chi, phi);
        assert_eq!(ladder.ratios(), vec![q(1, 1)]);
    }

    #[test]
    fn optimal_state_with_smaller_support() {
        // ψ has rank 1: the only reachable state is ψ itself.
        let psi = ProbVector::<Rational>::point_mass(3).unwrap();
        let phi = ProbVector::new(vec![q(1, 2), q(1, 2), q(0, 1)]).unwrap();
        let (chi, ladder) = optimal_state(&psi, &phi).unwrap();
        assert_eq!(chi, psi);
        assert_eq!(ladder.ratios()[0], q(0, 1));
        assert_eq!(success_probability(&psi, &phi).unwrap(), q(0, 1));
    }

    #[test]
    fn two_qubit_coincidence() {
        let report = analyze(&pc(&[80, 20]), &pc(&[60, 40])).unwrap();
        assert_eq!(report.case_label, CaseLabel::ReverseFeasible);
        assert_eq!(report.chi_opt, pc(&[80, 20]));
        assert_eq!(report.chi_sup, pc(&[80, 20]));
        assert_eq!(report.ladder.ratios(), vec![q(1, 2), q(4, 3)]);
        assert!(report.opt_equals_sup);
    }

    #[test]
    fn supremum_state_examples() {
        assert_eq!(
            supremum_state(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap(),
            pc(&[70, 20, 10])
        );
        let (lo, hi) = (pc(&[40, 30, 30]), pc(&[60, 30, 10]));
        assert_eq!(supremum_state(&lo, &hi).unwrap(), hi);
        assert_eq!(supremum_state(&hi, &lo).unwrap(), hi);
    }

    #[test]
    fn fidelity_examples() {
        let phi = fv(&[0.5, 0.4, 0.1]);
        assert!((fidelity(&phi, &phi).unwrap() - 1.0).abs() < 1e-15);
        let f_opt = fidelity(&phi, &fv(&[0.7, 0.24, 0.06])).unwrap();
        let f_sup = fidelity(&phi, &fv(&[0.7, 0.2, 0.1])).unwrap();
        assert!((f_opt - 0.96).abs() < 0.005);
        assert!((f_sup - 0.95).abs() < 0.005);
        assert!(f_sup < f_opt);
    }

    #[test]
    fn trace_distance_examples() {
        let phi = fv(&[0.5, 0.4, 0.1]);
        assert_eq!(trace_distance_pure(&phi, &phi).unwrap(), 0.0);
        let chi = fv(&[0.7, 0.2, 0.1]);
        let d = trace_distance_pure(&phi, &chi).unwrap();
        let f = (0.35f64.sqrt() + 0.08f64.sqrt() + 0.01f64.sqrt()).powi(2);
        assert!((d - (1.0 - f).sqrt()).abs() < 1e-12);
        assert!((d - 0.2246).abs() < 5e-5);
        let bound = classical_trace_bound(&phi, &chi).unwrap();
        assert!((bound - 0.20).abs() < 1e-12);
        assert!(bound <= d);
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(
            success_probability(&pc(&[50, 40, 10]), &pc(&[70, 20, 10])).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            success_probability(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap(),
            q(3, 5)
        );
        let u = ProbVector::<Rational>::uniform(3).unwrap();
        assert_eq!(
            success_probability(&pc(&[70, 15, 15]), &u).unwrap(),
            q(45, 100)
        );
    }

    #[test]
    fn delta3_examples() {
        match delta3_closed_form(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap() {
            Delta3ClosedForm::CaseA { chi_opt, chi_sup } => {
                assert_eq!(chi_opt, pc(&[70, 24, 6]));
                assert_eq!(chi_sup, pc(&[70, 20, 10]));
            }
            other => panic!("expected case A, got {other:?}"),
        }
        match delta3_closed_form(&pc(&[50, 40, 10]), &pc(&[70, 15, 15])).unwrap() {
            Delta3ClosedForm::CaseB { chi_sup, .. } => assert_eq!(chi_sup, pc(&[70, 20, 10])),
            other => panic!("expected case B, got {other:?}"),
        }
        assert_eq!(
            delta3_closed_form(&pc(&[50, 40, 10]), &pc(&[70, 20, 10])),
            Err(Error::ComparablePair)
        );
        assert_eq!(
            delta3_closed_form(&pc(&[50, 50]), &pc(&[60, 40])),
            Err(Error::WrongDimension {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn analyze_worked_example() {
        let report = analyze(&pc(&[70, 15, 15]), &pc(&[50, 40, 10])).unwrap();
        assert_eq!(report.case_label, CaseLabel::Incomparable);
        assert!(!report.feasible);
        assert_eq!(report.chi_opt, pc(&[70, 24, 6]));
        assert_eq!(report.chi_sup, pc(&[70, 20, 10]));
        assert!(report.theorem2_verified);
        assert!(!report.opt_equals_sup);
        assert_eq!(report.success_probability, q(3, 5));
        assert!(report.distance_sup <= report.distance_opt);
    }

    #[test]
    fn concentration_to_uniform_target() {
        let psi = fv(&[0.55, 0.25, 0.15, 0.05]);
        let report = analyze(&psi, &ProbVector::uniform(4).unwrap()).unwrap();
        assert!(report.chi_opt.approx_eq(&psi, 1e-12));
        assert!(report.chi_sup.approx_eq(&psi, 1e-12));
        assert!(report.opt_equals_sup);
    }

    #[test]
    fn padding_embeds_shorter_spectrum() {
        let (a, b) = pad_to_common(&pc(&[50, 50]), &pc(&[50, 30, 20])).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(b.dim(), 3);
        assert_eq!(a.weights()[2], q(0, 1));
    }
}
