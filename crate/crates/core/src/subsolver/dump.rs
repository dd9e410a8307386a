//! JSON debug dump of a subproblem and its solution.

use serde_json::{json, Value};

use super::{ConstraintKind, Dual, SubproblemPoint, SubproblemSolution, SubproblemSpec};
use crate::linalg::CMat;

pub const SCHEMA_VERSION: u32 = 1;

fn mat(m: &CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn point(p: &SubproblemPoint) -> Value {
    json!({ "s": mat(&p.s), "v": mat(&p.v), "slacks": p.slacks })
}

/// Serializes the spec, the solution and per-constraint margins.
pub fn to_json(spec: &SubproblemSpec, sol: &SubproblemSolution) -> Value {
    let constraints: Vec<Value> = spec
        .constraints
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let kind = match &c.kind {
                ConstraintKind::Exp { slack, .. } => format!("exp({})", slack.name()),
                ConstraintKind::Affine(_) => "affine".into(),
                ConstraintKind::TraceBudget { .. } => "trace".into(),
                ConstraintKind::Psd(_) => "psd".into(),
            };
            let dual = match sol.duals.get(k) {
                Some(Dual::Scalar(x)) => json!(x),
                Some(Dual::Matrix(m)) => mat(m),
                None => Value::Null,
            };
            json!({
                "tag": format!("{:?}", c.tag),
                "kind": kind,
                "margin": c.margin(&sol.point),
                "dual": dual,
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "n_tx": spec.n_tx,
        "n_rx": spec.n_rx,
        "noise_power": spec.noise_power,
        "objective_coefficients": spec.objective,
        "status": format!("{:?}", sol.status),
        "objective": sol.objective,
        "iterations": sol.iterations,
        "duality_gap": sol.duality_gap,
        "stationarity": sol.stationarity,
        "message": sol.message,
        "point": point(&sol.point),
        "constraints": constraints,
    })
}
