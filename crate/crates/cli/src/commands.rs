use std::io::Write;

use maj_lattice::oracle::{run_suite, sample_simplex, seeded_rng, Suite, VerifyConfig};
use maj_lattice::{
    analyze, compare, distance, infimum, supremum_traced, AnalysisReport, FlattenTrace, ProbVector,
    Scalar,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, EXIT_FAILURE};
use crate::input::VectorPair;

/// Upper bound on `scan --samples`.
pub const MAX_SCAN_SAMPLES: usize = 1_000_000;

#[derive(Serialize)]
#[serde(bound = "")]
struct TracedReport<'a, W: Scalar> {
    #[serde(flatten)]
    report: &'a AnalysisReport<W>,
    trace: &'a FlattenTrace<W>,
}

fn report_value<W: Scalar>(
    psi: &ProbVector<W>,
    phi: &ProbVector<W>,
    trace: bool,
) -> Result<Value, CliError> {
    let report = analyze(psi, phi)?;
    let value = if trace {
        serde_json::to_value(TracedReport {
            report: &report,
            trace: &report.trace,
        })
    } else {
        serde_json::to_value(&report)
    };
    value.map_err(|e| CliError::new("Serialize", e.to_string()))
}

/// JSON analysis report of a pair, optionally with the flattening trace.
pub fn analysis(pair: &VectorPair, trace: bool) -> Result<Value, CliError> {
    match pair {
        VectorPair::Exact(p, q) => report_value(p, q, trace),
        VectorPair::Float(p, q) => report_value(p, q, trace),
    }
}

fn val<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("in-memory serialization cannot fail")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LatticeOp {
    Inf,
    Sup,
    Dist,
    Compare,
}

fn lattice_value<W: Scalar>(
    op: LatticeOp,
    p: &ProbVector<W>,
    q: &ProbVector<W>,
    trace: bool,
) -> Result<Value, CliError> {
    Ok(match op {
        LatticeOp::Inf => json!({"operation": "inf", "result": val(&infimum(p, q)?)}),
        LatticeOp::Sup => {
            let (s, steps) = supremum_traced(p, q)?;
            if trace {
                json!({"operation": "sup", "result": val(&s), "trace": val(&steps)})
            } else {
                json!({"operation": "sup", "result": val(&s)})
            }
        }
        LatticeOp::Dist => json!({"operation": "dist", "distance": distance(p, q)?.value()}),
        LatticeOp::Compare => {
            let rel = val(&compare(p, q)?);
            json!({"operation": "compare", "relation": rel["relation"], "witness": rel["witness"]})
        }
    })
}

pub fn lattice(op: LatticeOp, pair: &VectorPair, trace: bool) -> Result<Value, CliError> {
    match pair {
        VectorPair::Exact(p, q) => lattice_value(op, p, q, trace),
        VectorPair::Float(p, q) => lattice_value(op, p, q, trace),
    }
}

/// Runs a suite and returns the report plus the exit code it implies.
pub fn verify(suite: Suite, config: &VerifyConfig) -> Result<(Value, u8), CliError> {
    let report = run_suite(suite, config)?;
    let code = if report.passed { 0 } else { EXIT_FAILURE };
    let value =
        serde_json::to_value(&report).map_err(|e| CliError::new("Serialize", e.to_string()))?;
    Ok((value, code))
}

/// Writes `index,fidelity_gap,distance_gap,case` rows for sampled pairs.
pub fn scan(dim: usize, samples: usize, seed: u64, out: &mut dyn Write) -> Result<(), CliError> {
    if dim < 2 {
        return Err(CliError::usage(format!(
            "--dim must be at least 2, got {dim}"
        )));
    }
    if samples > MAX_SCAN_SAMPLES {
        return Err(CliError::usage(format!(
            "--samples above {MAX_SCAN_SAMPLES}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let pairs: Vec<_> = (0..samples)
        .map(|_| (sample_simplex(dim, &mut rng), sample_simplex(dim, &mut rng)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|(psi, phi)| {
            let r = analyze(psi, phi)?;
            let case = serde_json::to_value(r.case_label)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            Ok((
                r.fidelity_opt - r.fidelity_sup,
                r.distance_opt - r.distance_sup,
                case,
            ))
        })
        .collect::<Result<Vec<_>, maj_lattice::Error>>()?;

    let io = |e: csv::Error| CliError::io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "fidelity_gap", "distance_gap", "case"])
        .map_err(io)?;
    for (i, (f, d, case)) in rows.iter().enumerate() {
        w.write_record([i.to_string(), f.to_string(), d.to_string(), case.clone()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))?;
    Ok(())
}
