//! Barrier interior-point solver for the per-round convex subproblem.
//!
//! The program has a linear objective over scalar slacks, affine and
//! exponential-type scalar inequalities, a trace budget, and two Hermitian
//! PSD cones. It is solved in real coordinates (`n²` per covariance) with
//! `−log det` barriers for the cones (factored through the real
//! embedding), `−log(affine − e^s)` for exponential rows and `−log(gap)`
//! for affine rows. Centering uses damped Newton steps with Armijo
//! backtracking; the barrier weight grows tenfold per stage until `m/t`
//! drops below the requested tolerance. A phase-1 program (every
//! constraint relaxed by a shared shift that is then minimized) finds a
//! strictly feasible start or certifies infeasibility.

mod barrier;
pub mod dump;
pub mod spec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use spec::{
    AffineExpr, Cone, Constraint, ConstraintKind, ConstraintTag, Slack, SubproblemPoint, SubproblemSpec,
};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use barrier::{center, CenterFailure, NewtonSettings, Program};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target duality gap `m/t` (objective units).
    pub tol: f64,
    pub t0: f64,
    pub mu: f64,
    pub armijo_alpha: f64,
    pub backtrack_beta: f64,
    pub max_newton_steps: usize,
    /// Fraction of the way a warm start is pulled toward the default
    /// interior point.
    pub warm_pull: f64,
    /// Phase 1 stops early once every constraint holds with this
    /// (scaled) margin.
    pub phase1_margin: f64,
    /// Largest gap `m/t` at which a stalled centering step is accepted.
    pub stall_gap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            t0: 1.0,
            mu: 10.0,
            armijo_alpha: 0.01,
            backtrack_beta: 0.5,
            max_newton_steps: 4000,
            warm_pull: 1e-3,
            phase1_margin: 1e-3,
            stall_gap: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    MaxIter,
    NumericalFailure,
}

/// Lagrange multiplier of one constraint, in the constraint's own units.
#[derive(Debug, Clone, PartialEq)]
pub enum Dual {
    Scalar(f64),
    Matrix(CMat),
}

impl Dual {
    pub fn scalar(&self) -> Option<f64> {
        match self {
            Dual::Scalar(x) => Some(*x),
            Dual::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&CMat> {
        match self {
            Dual::Matrix(m) => Some(m),
            Dual::Scalar(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubproblemSolution {
    pub point: SubproblemPoint,
    /// Aligned with `spec.constraints`; empty unless a barrier stage
    /// completed.
    pub duals: Vec<Dual>,
    pub objective: f64,
    pub status: SolveStatus,
    /// Newton steps taken, phase 1 included.
    pub iterations: usize,
    pub duality_gap: f64,
    /// Relative stationarity residual of the subproblem Lagrangian.
    pub stationarity: f64,
    /// For infeasible specs: the optimal phase-1 shift (> 0).
    pub infeasibility: Option<f64>,
    /// Objective after each completed barrier stage.
    pub stage_objectives: Vec<f64>,
    pub message: String,
}

/// Outcome of the phase-1 search.
#[derive(Debug, Clone)]
pub enum Phase1Outcome {
    /// Every scalar constraint holds with margin ≥ `margin` (in scaled
    /// units) and both covariances are ⪰ `margin·I`.
    Feasible { point: SubproblemPoint, margin: f64 },
    /// No strictly feasible point: the smallest uniform relaxation that
    /// makes the spec feasible is `infeasibility`.
    Infeasible { infeasibility: f64 },
}

impl Phase1Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Phase1Outcome::Feasible { .. })
    }
}

/// `[[Re M, −Im M], [Im M, Re M]]`.
pub(crate) fn embed(m: &CMat) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Real symmetric embedding of a Hermitian matrix. `M ⪰ 0` iff the
/// embedding is PSD, and every eigenvalue of `M` appears twice.
pub fn real_embedding(m: &CMat) -> Result<DMatrix<f64>> {
    let herm = linalg::enforce_hermitian(m, "matrix to embed")?;
    Ok(embed(&herm))
}

/// Inverse of [`real_embedding`].
pub fn from_real_embedding(r: &DMatrix<f64>) -> Result<CMat> {
    if r.nrows() != r.ncols() || r.nrows() % 2 != 0 {
        return Err(Error::contract("real embedding must be square with even order"));
    }
    let n = r.nrows() / 2;
    Ok(CMat::from_fn(n, n, |i, j| C64::new(r[(i, j)], r[(n + i, j)])))
}

/// Interior starting guess: `S = V = budget/(4n)·I`, slacks placed just
/// inside their exponential bounds and then inside single-slack affine
/// rows.
pub fn default_start(spec: &SubproblemSpec) -> SubproblemPoint {
    let n = spec.n_tx;
    let budget = spec.power_budget().unwrap_or(1.0);
    let m = linalg::identity(n).scale(budget / (4.0 * n as f64));
    let mut point = SubproblemPoint {
        s: m.clone(),
        v: m,
        slacks: [0.0; 6],
    };
    let mut set = [false; 6];
    for con in &spec.constraints {
        if let ConstraintKind::Exp { slack, bound } = &con.kind {
            if set[slack.index()] {
                continue;
            }
            let b = bound.eval(&point);
            point.slacks[slack.index()] = if b > 0.0 { b.ln() - 0.5 } else { -30.0 };
            set[slack.index()] = true;
        }
    }
    for con in &spec.constraints {
        if let ConstraintKind::Affine(e) = &con.kind {
            let unset: Vec<Slack> = Slack::ALL
                .into_iter()
                .filter(|s| e.uses_slack(*s) && !set[s.index()])
                .collect();
            if let [only] = unset[..] {
                let coef = e.slacks[only.index()];
                let rest = e.eval(&point) - coef * point.slacks[only.index()];
                point.slacks[only.index()] = (1.0 - rest) / coef;
                set[only.index()] = true;
            }
        }
    }
    point
}

fn settings(opts: &SolverOptions) -> NewtonSettings {
    NewtonSettings {
        alpha: opts.armijo_alpha,
        beta: opts.backtrack_beta,
        decrement_tol: 1e-7,
        max_steps_per_center: 200,
    }
}

/// Smallest phase-1 margin accepted as a strict interior point.
pub const INTERIOR_FLOOR: f64 = 1e-7;

/// Smallest barrier growth factor tried after a stalled stage.
const MIN_RETRY_MU: f64 = 1.2;

/// Phase-1 search from `start`. Returns the outcome and Newton steps used.
fn phase1_from(
    prog: &Program,
    start: &SubproblemPoint,
    opts: &SolverOptions,
    steps_left: &mut usize,
) -> std::result::Result<(Phase1Outcome, Vec<f64>), CenterFailure> {
    let p1 = prog.phase_one();
    let z0 = prog.encode(start, None);
    let mut worst: f64 = 0.0;
    for row in &prog.rows {
        let g = prog.row_gap(row, &z0);
        worst = worst.max(if g.is_finite() { -g } else { 1e6 });
    }
    let pt = prog.decode(&z0);
    for block in &prog.blocks {
        let m = if block.offset == 0 { &pt.s } else { &pt.v };
        worst = worst.max(-linalg::min_eigenvalue(m));
    }
    let mut z = p1.encode(start, Some(worst + 1.0));
    let sv = p1.shift.expect("phase-1 program has a shift");
    let target = -opts.phase1_margin;
    let early = move |z: &[f64]| z[sv] < target;
    let ns = settings(opts);
    let m = p1.degree();
    let mut t = opts.t0;
    let mut stages = 0;
    loop {
        match center(&p1, &mut z, t, &ns, steps_left, &early) {
            Ok(_) => {}
            Err(CenterFailure::Stagnation) if stages > 0 => break,
            Err(f) => return Err(f),
        }
        stages += 1;
        let shift = z[sv];
        if shift < target {
            break;
        }
        if m / t < opts.tol * 1e-2 {
            break;
        }
        t *= opts.mu;
    }
    let shift = z[sv];
    let zr: Vec<f64> = z[..prog.nvar].to_vec();
    if shift < -INTERIOR_FLOOR && prog.is_strictly_feasible(&zr) {
        Ok((
            Phase1Outcome::Feasible {
                point: prog.decode(&zr),
                margin: -shift,
            },
            zr,
        ))
    } else {
        Ok((Phase1Outcome::Infeasible { infeasibility: shift.max(0.0) }, zr))
    }
}

/// Finds a strictly feasible point of `spec` or certifies that none exists.
pub fn phase1(spec: &SubproblemSpec) -> Phase1Outcome {
    phase1_with(spec, &default_start(spec), &SolverOptions::default())
}

pub fn phase1_with(spec: &SubproblemSpec, start: &SubproblemPoint, opts: &SolverOptions) -> Phase1Outcome {
    let prog = Program::compile(spec);
    let mut budget = opts.max_newton_steps;
    match phase1_from(&prog, start, opts, &mut budget) {
        Ok((outcome, _)) => outcome,
        Err(_) => Phase1Outcome::Infeasible {
            infeasibility: f64::NAN,
        },
    }
}

fn failed(point: SubproblemPoint, status: SolveStatus, iterations: usize, message: String) -> SubproblemSolution {
    SubproblemSolution {
        point,
        duals: Vec::new(),
        objective: f64::NAN,
        status,
        iterations,
        duality_gap: f64::NAN,
        stationarity: f64::NAN,
        infeasibility: None,
        stage_objectives: Vec::new(),
        message,
    }
}

/// Solves `spec` to duality gap `opts.tol`.
///
/// A warm start, when given, is pulled `opts.warm_pull` of the way toward
/// [`default_start`] and used directly if strictly feasible; otherwise
/// phase 1 runs from it, then from [`default_start`] if that fails.
pub fn solve(spec: &SubproblemSpec, warm: Option<&SubproblemPoint>, opts: &SolverOptions) -> SubproblemSolution {
    let prog = Program::compile(spec);
    let mut steps_left = opts.max_newton_steps;
    let center_pt = default_start(spec);

    let mut start = None;
    if let Some(w) = warm {
        let zw = prog.encode(w, None);
        let zc = prog.encode(&center_pt, None);
        let rho = opts.warm_pull;
        let pulled: Vec<f64> = zw.iter().zip(&zc).map(|(a, b)| (1.0 - rho) * a + rho * b).collect();
        if prog.is_strictly_feasible(&pulled) {
            start = Some(pulled);
        } else if prog.is_strictly_feasible(&zw) {
            start = Some(zw);
        }
    }
    let mut z = match start {
        Some(z) => z,
        None => {
            let mut res = match warm {
                Some(w) => phase1_from(&prog, w, opts, &mut steps_left),
                None => phase1_from(&prog, &center_pt, opts, &mut steps_left),
            };
            if warm.is_some() && !matches!(res, Ok((Phase1Outcome::Feasible { .. }, _))) {
                res = phase1_from(&prog, &center_pt, opts, &mut steps_left);
            }
            match res {
                Ok((Phase1Outcome::Feasible { .. }, z)) => z,
                Ok((Phase1Outcome::Infeasible { infeasibility }, z)) => {
                    let mut sol = failed(
                        prog.decode(&z),
                        SolveStatus::Infeasible,
                        opts.max_newton_steps - steps_left,
                        format!("phase 1 found no strictly feasible point (shift {infeasibility:.3e})"),
                    );
                    sol.infeasibility = Some(infeasibility);
                    return sol;
                }
                Err(f) => {
                    let status = if f == CenterFailure::Budget {
                        SolveStatus::MaxIter
                    } else {
                        SolveStatus::NumericalFailure
                    };
                    return failed(
                        center_pt,
                        status,
                        opts.max_newton_steps - steps_left,
                        format!("phase 1 failed: {f:?}"),
                    );
                }
            }
        }
    };

    let ns = settings(opts);
    let m = prog.degree();
    let mut t = opts.t0;
    let mut stage_objectives = Vec::new();
    let never = |_: &[f64]| false;
    let mut last: Option<(Vec<f64>, f64)> = None;
    let mut message = String::new();
    let mut mu = opts.mu;
    loop {
        if let Err(f) = center(&prog, &mut z, t, &ns, &mut steps_left, &never) {
            if f != CenterFailure::Budget {
                if let Some((zp, tp)) = last.clone() {
                    if m / tp <= opts.stall_gap {
                        message = format!("centering stalled at t = {t:.3e}; kept the point centred at t = {tp:.3e}");
                        z = zp;
                        t = tp;
                        break;
                    }
                    // Retry the stage with a shorter increase of t.
                    if mu > MIN_RETRY_MU {
                        mu = mu.sqrt();
                        z = zp;
                        t = tp * mu;
                        continue;
                    }
                }
            }
            let status = if f == CenterFailure::Budget {
                SolveStatus::MaxIter
            } else {
                SolveStatus::NumericalFailure
            };
            let mut sol = failed(
                prog.decode(&z),
                status,
                opts.max_newton_steps - steps_left,
                format!("centering failed at t = {t:.3e}: {f:?}"),
            );
            sol.stage_objectives = stage_objectives;
            return sol;
        }
        stage_objectives.push(-prog.linear_cost(&z));
        if m / t < opts.tol {
            break;
        }
        last = Some((z.clone(), t));
        t *= mu;
    }

    // Polish the last centring step for accurate multipliers.
    let polish = NewtonSettings {
        decrement_tol: 1e-12,
        max_steps_per_center: 20,
        ..ns
    };
    let mut spare = steps_left.min(polish.max_steps_per_center);
    let _ = center(&prog, &mut z, t, &polish, &mut spare, &never);

    let point = prog.decode(&z);
    let Some(cert) = prog.certificate(&z) else {
        return failed(
            point,
            SolveStatus::NumericalFailure,
            opts.max_newton_steps - steps_left,
            "final point lost strict feasibility".into(),
        );
    };

    let mut duals: Vec<Dual> = spec
        .constraints
        .iter()
        .map(|c| match c.kind {
            ConstraintKind::Psd(_) => Dual::Matrix(linalg::zeros(spec.n_tx)),
            _ => Dual::Scalar(0.0),
        })
        .collect();
    let nv = prog.nvar;
    let mut stat = prog.cost.iter().map(|c| -c).collect::<Vec<f64>>();
    let mut stat_scale = stat.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut gap = 0.0;
    for (row, g) in prog.rows.iter().zip(&cert.row_gaps) {
        let lam = 1.0 / (t * g);
        gap += lam * g;
        duals[row.constraint] = Dual::Scalar(lam / row.scale);
        let mut dg = row.a.clone();
        if let Some((var, kappa)) = row.exp {
            dg[var] -= kappa * z[var].exp();
        }
        for k in 0..nv {
            stat[k] += lam * dg[k];
            stat_scale = stat_scale.max((lam * dg[k]).abs());
        }
    }
    let nn = spec.n_tx * spec.n_tx;
    for (block, w) in prog.blocks.iter().zip(&cert.block_inverses) {
        let zmat = w.unscale(t);
        let mmat = if block.offset == 0 { &point.s } else { &point.v };
        gap += (&zmat * mmat).trace().re;
        for (k, x) in linalg::trace_functional_coords(&zmat).into_iter().enumerate() {
            stat[block.offset + k] += x;
            stat_scale = stat_scale.max(x.abs());
        }
        duals[block.constraint] = Dual::Matrix(zmat);
        debug_assert!(block.offset + nn <= nv);
    }
    let stationarity = stat.iter().fold(0.0f64, |a, x| a.max(x.abs())) / stat_scale.max(1.0);

    SubproblemSolution {
        objective: spec.objective_value(&point),
        point,
        duals,
        status: SolveStatus::Optimal,
        iterations: opts.max_newton_steps - steps_left,
        duality_gap: gap,
        stationarity,
        infeasibility: None,
        stage_objectives,
        message,
    }
}
