//! Dense log-barrier machinery.
//!
//! A [`Program`] is the subproblem flattened to real coordinates
//! `z = [coords(S), coords(V), slacks…, (shift)]` with
//! `minimize cost·z` subject to scalar rows `a·z + b − κ e^{z_e} > 0` and
//! Hermitian blocks `M(z) ≻ 0`. The optional shift variable adds `+s` to
//! every row and `+s·I` to every block, which is exactly the phase-1
//! problem.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::spec::{Cone, ConstraintKind, Slack, SubproblemPoint, SubproblemSpec};
use crate::linalg::{self, C64};

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub a: Vec<f64>,
    pub b: f64,
    /// `(variable, κ)` for a `−κ e^{z_var}` term.
    pub exp: Option<(usize, f64)>,
    /// Positive factor the original constraint was divided by.
    pub scale: f64,
    /// Index of the originating constraint in the spec.
    pub constraint: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Block {
    pub offset: usize,
    pub constraint: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub dim: usize,
    pub nvar: usize,
    pub cost: Vec<f64>,
    pub rows: Vec<Row>,
    pub blocks: Vec<Block>,
    pub slack_var: [Option<usize>; 6],
    pub shift: Option<usize>,
}

pub(crate) struct RayRow {
    g0: f64,
    slope: f64,
    /// `(κ e^{z_var}, dir_var)` of the exponential term.
    exp: Option<(f64, f64)>,
}

pub(crate) struct LineModel {
    rows: Vec<RayRow>,
    /// Eigenvalues of `L⁻¹ Δ L⁻ᵀ` in the real embedding, per block.
    spectra: Vec<Vec<f64>>,
}

impl LineModel {
    /// `barrier(z + s·dir) − barrier(z)`, or `None` outside the domain.
    pub fn delta(&self, s: f64) -> Option<f64> {
        let mut out = 0.0;
        for r in &self.rows {
            let mut dg = s * r.slope;
            if let Some((k, d)) = r.exp {
                dg -= k * (s * d).exp_m1();
            }
            let ratio = dg / r.g0;
            if !(ratio > -1.0) || !ratio.is_finite() {
                return None;
            }
            out -= ratio.ln_1p();
        }
        for mu in &self.spectra {
            for &m in mu {
                let x = s * m;
                if !(x > -1.0) {
                    return None;
                }
                out -= 0.5 * x.ln_1p();
            }
        }
        Some(out)
    }
}

/// Block Cholesky factors used to scale the Newton system.
pub(crate) struct Scaling {
    nn: usize,
    factors: Vec<(usize, linalg::CMat)>,
}

impl Scaling {
    /// Linear functional on `z` expressed in scaled coordinates.
    fn pull_back(&self, a: &[f64]) -> Vec<f64> {
        let mut out = a.to_vec();
        for (off, l) in &self.factors {
            let part = &a[*off..off + self.nn];
            if part.iter().all(|x| *x == 0.0) {
                continue;
            }
            let am = linalg::functional_from_coords(part);
            let scaled = l.adjoint() * am * l;
            out[*off..off + self.nn].copy_from_slice(&linalg::trace_functional_coords(&scaled));
        }
        out
    }

    /// Step in scaled coordinates to a step in `z`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let mut out = y.to_vec();
        let n = (self.nn as f64).sqrt().round() as usize;
        for (off, l) in &self.factors {
            let dx = linalg::coords_to_herm(&y[*off..off + self.nn], n);
            let ds = l * dx * l.adjoint();
            out[*off..off + self.nn].copy_from_slice(&linalg::herm_to_coords(&ds));
        }
        out
    }
}

pub(crate) struct Evaluation {
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

/// Per-constraint quantities at a barrier point, used for duals.
pub(crate) struct Certificate {
    pub row_gaps: Vec<f64>,
    /// `M(z)⁻¹` for each block.
    pub block_inverses: Vec<linalg::CMat>,
}

impl Program {
    pub fn compile(spec: &SubproblemSpec) -> Self {
        let n = spec.n_tx;
        let nn = n * n;
        let used = spec.used_slacks();
        let mut slack_var = [None; 6];
        for (k, s) in used.iter().enumerate() {
            slack_var[s.index()] = Some(2 * nn + k);
        }
        let nvar = 2 * nn + used.len();

        let mut cost = vec![0.0; nvar];
        for s in &used {
            cost[slack_var[s.index()].unwrap()] = -spec.objective[s.index()];
        }

        let mut rows = Vec::new();
        let mut blocks = Vec::new();
        for (idx, con) in spec.constraints.iter().enumerate() {
            let affine_row = |e: &super::spec::AffineExpr| {
                let mut a = vec![0.0; nvar];
                if let Some(m) = &e.s {
                    for (k, v) in linalg::trace_functional_coords(m).into_iter().enumerate() {
                        a[k] += v;
                    }
                }
                if let Some(m) = &e.v {
                    for (k, v) in linalg::trace_functional_coords(m).into_iter().enumerate() {
                        a[nn + k] += v;
                    }
                }
                for s in Slack::ALL {
                    let coef = e.slacks[s.index()];
                    if coef != 0.0 {
                        a[slack_var[s.index()].expect("used slack has a variable")] += coef;
                    }
                }
                (a, e.constant)
            };
            match &con.kind {
                ConstraintKind::Exp { slack, bound } => {
                    let (a, b) = affine_row(bound);
                    let var = slack_var[slack.index()].expect("exp slack has a variable");
                    rows.push(Row { a, b, exp: Some((var, 1.0)), scale: 1.0, constraint: idx });
                }
                ConstraintKind::Affine(e) => {
                    let (a, b) = affine_row(e);
                    rows.push(Row { a, b, exp: None, scale: 1.0, constraint: idx });
                }
                ConstraintKind::TraceBudget { budget } => {
                    let mut a = vec![0.0; nvar];
                    for d in 0..n {
                        a[d] = -1.0;
                        a[nn + d] = -1.0;
                    }
                    rows.push(Row { a, b: *budget, exp: None, scale: 1.0, constraint: idx });
                }
                ConstraintKind::Psd(cone) => {
                    let offset = match cone {
                        Cone::Information => 0,
                        Cone::ArtificialNoise => nn,
                    };
                    blocks.push(Block { offset, constraint: idx });
                }
            }
        }
        for row in &mut rows {
            let mag = row
                .a
                .iter()
                .fold(row.b.abs(), |acc, x| acc.max(x.abs()))
                .max(1e-300);
            let scale = if mag > 0.0 { mag } else { 1.0 };
            row.a.iter_mut().for_each(|x| *x /= scale);
            row.b /= scale;
            if let Some((_, kappa)) = &mut row.exp {
                *kappa /= scale;
            }
            row.scale = scale;
        }

        Self {
            dim: n,
            nvar,
            cost,
            rows,
            blocks,
            slack_var,
            shift: None,
        }
    }

    /// Phase-1 version: one extra variable `s`, minimize `s`, every row and
    /// block relaxed by `s`.
    pub fn phase_one(&self) -> Self {
        let mut p = self.clone();
        let sv = p.nvar;
        p.nvar += 1;
        p.cost = vec![0.0; p.nvar];
        p.cost[sv] = 1.0;
        for row in &mut p.rows {
            row.a.push(1.0);
        }
        p.shift = Some(sv);
        p
    }

    /// Barrier degree `m` (so the duality gap on the central path is `m/t`).
    pub fn degree(&self) -> f64 {
        (self.rows.len() + self.blocks.len() * self.dim) as f64
    }

    pub fn encode(&self, point: &SubproblemPoint, shift: Option<f64>) -> Vec<f64> {
        let nn = self.dim * self.dim;
        let mut z = vec![0.0; self.nvar];
        z[..nn].copy_from_slice(&linalg::herm_to_coords(&point.s));
        z[nn..2 * nn].copy_from_slice(&linalg::herm_to_coords(&point.v));
        for s in Slack::ALL {
            if let Some(k) = self.slack_var[s.index()] {
                z[k] = point.slacks[s.index()];
            }
        }
        if let (Some(k), Some(val)) = (self.shift, shift) {
            z[k] = val;
        }
        z
    }

    pub fn decode(&self, z: &[f64]) -> SubproblemPoint {
        let nn = self.dim * self.dim;
        let mut slacks = [0.0; 6];
        for s in Slack::ALL {
            if let Some(k) = self.slack_var[s.index()] {
                slacks[s.index()] = z[k];
            }
        }
        SubproblemPoint {
            s: linalg::coords_to_herm(&z[..nn], self.dim),
            v: linalg::coords_to_herm(&z[nn..2 * nn], self.dim),
            slacks,
        }
    }

    fn shift_of(&self, z: &[f64]) -> f64 {
        self.shift.map_or(0.0, |k| z[k])
    }

    pub fn row_gap(&self, row: &Row, z: &[f64]) -> f64 {
        let mut g = row.b;
        for (a, x) in row.a.iter().zip(z) {
            g += a * x;
        }
        if let Some((var, kappa)) = row.exp {
            let e = z[var];
            if e > 700.0 {
                return f64::NEG_INFINITY;
            }
            g -= kappa * e.exp();
        }
        g
    }

    fn block_matrix(&self, block: &Block, z: &[f64]) -> linalg::CMat {
        let nn = self.dim * self.dim;
        let mut m = linalg::coords_to_herm(&z[block.offset..block.offset + nn], self.dim);
        let s = self.shift_of(z);
        if s != 0.0 {
            for d in 0..self.dim {
                m[(d, d)] += C64::new(s, 0.0);
            }
        }
        m
    }

    /// `(log det M, M⁻¹)` through a Cholesky factorization of the real
    /// embedding, or `None` when `M` is not positive definite.
    fn block_factor(&self, m: &linalg::CMat) -> Option<(f64, linalg::CMat)> {
        let n = self.dim;
        let emb = super::embed(m);
        let chol = Cholesky::new(emb)?;
        let l = chol.l_dirty();
        let mut logdet = 0.0;
        for d in 0..2 * n {
            let x = l[(d, d)];
            if !(x > 0.0) || !x.is_finite() {
                return None;
            }
            logdet += x.ln();
        }
        let inv = chol.inverse();
        let w = linalg::CMat::from_fn(n, n, |i, j| C64::new(inv[(i, j)], inv[(n + i, j)]));
        Some((logdet, linalg::hermitian_part(&w).0))
    }

    pub fn is_strictly_feasible(&self, z: &[f64]) -> bool {
        self.barrier_value(z).is_some()
    }

    /// Barrier part only: `−Σ log gap − Σ log det`.
    pub fn barrier_value(&self, z: &[f64]) -> Option<f64> {
        if z.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let mut phi = 0.0;
        for row in &self.rows {
            let g = self.row_gap(row, z);
            if !(g > 0.0) || !g.is_finite() {
                return None;
            }
            phi -= g.ln();
        }
        for block in &self.blocks {
            let m = self.block_matrix(block, z);
            let (logdet, _) = self.block_factor(&m)?;
            phi -= logdet;
        }
        Some(phi)
    }

    /// Barrier restricted to the ray `z + s·dir`, for exact differences.
    pub fn line_model(&self, z: &[f64], dir: &[f64]) -> Option<LineModel> {
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let g0 = self.row_gap(row, z);
            if !(g0 > 0.0) || !g0.is_finite() {
                return None;
            }
            let slope: f64 = row.a.iter().zip(dir).map(|(a, d)| a * d).sum();
            let exp = row.exp.map(|(var, kappa)| (kappa * z[var].exp(), dir[var]));
            rows.push(RayRow { g0, slope, exp });
        }
        let nn = self.dim * self.dim;
        let n2 = 2 * self.dim;
        let mut spectra = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let m = self.block_matrix(block, z);
            let chol = Cholesky::new(super::embed(&m))?;
            let mut d = linalg::coords_to_herm(&dir[block.offset..block.offset + nn], self.dim);
            if let Some(k) = self.shift {
                for i in 0..self.dim {
                    d[(i, i)] += C64::new(dir[k], 0.0);
                }
            }
            let l = chol.l();
            let x = l.solve_lower_triangular(&super::embed(&d))?;
            let y = l.solve_lower_triangular(&x.transpose())?;
            let sym = (&y + y.transpose()) * 0.5;
            debug_assert_eq!(sym.nrows(), n2);
            spectra.push(sym.symmetric_eigenvalues().iter().copied().collect());
        }
        Some(LineModel { rows, spectra })
    }

    pub fn linear_cost(&self, z: &[f64]) -> f64 {
        self.cost.iter().zip(z).map(|(c, x)| c * x).sum()
    }

    /// Gradient and Hessian of `t·cost·z + barrier(z)` in coordinates
    /// scaled by the block factors: each block moves as `M + L ΔX Lᴴ` with
    /// `M = L Lᴴ`, so the log-det part of the Hessian is the basis Gram
    /// matrix. [`Scaling::lift`] maps a step back to `z`.
    pub fn evaluate(&self, z: &[f64], t: f64) -> Option<(Evaluation, Scaling)> {
        let nv = self.nvar;
        let nn = self.dim * self.dim;
        let mut factors = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let m = self.block_matrix(block, z);
            let chol = Cholesky::new(m)?;
            let l = chol.l();
            if !linalg::is_finite_mat(&l) {
                return None;
            }
            factors.push((block.offset, l));
        }
        let scaling = Scaling { nn, factors };

        let mut grad = DVector::from_iterator(nv, self.cost.iter().map(|c| t * c));
        let mut hess = DMatrix::<f64>::zeros(nv, nv);

        for row in &self.rows {
            let g = self.row_gap(row, z);
            if !(g > 0.0) || !g.is_finite() {
                return None;
            }
            let mut dg = scaling.pull_back(&row.a);
            let mut curvature = None;
            if let Some((var, kappa)) = row.exp {
                let e = kappa * z[var].exp();
                dg[var] -= e;
                curvature = Some((var, e));
            }
            let inv = 1.0 / g;
            for i in 0..nv {
                if dg[i] == 0.0 {
                    continue;
                }
                grad[i] -= dg[i] * inv;
                let di = dg[i] * inv;
                for j in 0..nv {
                    if dg[j] != 0.0 {
                        hess[(i, j)] += di * dg[j] * inv;
                    }
                }
            }
            if let Some((var, e)) = curvature {
                hess[(var, var)] += e * inv;
            }
        }

        for (off, l) in &scaling.factors {
            for d in 0..self.dim {
                grad[off + d] -= 1.0;
                hess[(off + d, off + d)] += 1.0;
            }
            for k in self.dim..nn {
                hess[(off + k, off + k)] += 2.0;
            }
            if let Some(sv) = self.shift {
                let linv = l.clone().solve_lower_triangular(&linalg::identity(self.dim))?;
                let k = &linv * linv.adjoint();
                grad[sv] -= linalg::trace_re(&k);
                for (c, x) in linalg::trace_functional_coords(&k).into_iter().enumerate() {
                    hess[(off + c, sv)] += x;
                    hess[(sv, off + c)] += x;
                }
                hess[(sv, sv)] += k.iter().map(|x| x.norm_sqr()).sum::<f64>();
            }
        }
        Some((Evaluation { grad, hess }, scaling))
    }

    pub fn certificate(&self, z: &[f64]) -> Option<Certificate> {
        let row_gaps = self.rows.iter().map(|r| self.row_gap(r, z)).collect();
        let mut block_inverses = Vec::new();
        for block in &self.blocks {
            let (_, w) = self.block_factor(&self.block_matrix(block, z))?;
            block_inverses.push(w);
        }
        Some(Certificate { row_gaps, block_inverses })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CenterFailure {
    Stagnation,
    Budget,
    Singular,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSettings {
    pub alpha: f64,
    pub beta: f64,
    pub decrement_tol: f64,
    pub max_steps_per_center: usize,
}

/// Solves the Newton system, adding a small ridge when the Hessian is
/// numerically indefinite.
fn newton_direction(ev: &Evaluation) -> Option<DVector<f64>> {
    let rhs = -&ev.grad;
    if let Some(ch) = Cholesky::new(ev.hess.clone()) {
        let d = ch.solve(&rhs);
        if d.iter().all(|x| x.is_finite()) {
            return Some(d);
        }
    }
    let diag_max = ev.hess.diagonal().iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let mut ridge = 1e-12 * diag_max;
    for _ in 0..8 {
        let mut h = ev.hess.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += ridge;
        }
        if let Some(ch) = Cholesky::new(h) {
            let d = ch.solve(&rhs);
            if d.iter().all(|x| x.is_finite()) {
                return Some(d);
            }
        }
        ridge *= 100.0;
    }
    None
}

/// Minimizes `t·cost·z + barrier(z)` from a strictly feasible `z` with
/// damped Newton steps. `early_exit` is polled after every step.
pub(crate) fn center(
    prog: &Program,
    z: &mut Vec<f64>,
    t: f64,
    settings: &NewtonSettings,
    steps_left: &mut usize,
    early_exit: &dyn Fn(&[f64]) -> bool,
) -> Result<usize, CenterFailure> {
    let mut taken = 0;
    for _ in 0..settings.max_steps_per_center {
        if *steps_left == 0 {
            return Err(CenterFailure::Budget);
        }
        let (ev, scaling) = prog.evaluate(z, t).ok_or(CenterFailure::Stagnation)?;
        let y = newton_direction(&ev).ok_or(CenterFailure::Singular)?;
        let slope = ev.grad.dot(&y);
        let dir = scaling.lift(y.as_slice());
        let decrement2 = -slope;
        if decrement2 / 2.0 <= settings.decrement_tol || !(decrement2 > 0.0) {
            return Ok(taken);
        }
        let model = prog.line_model(z, &dir).ok_or(CenterFailure::Stagnation)?;
        let lin_step: f64 = prog.cost.iter().zip(dir.iter()).map(|(c, d)| c * d).sum();
        let mut step = 1.0;
        let mut trial = z.clone();
        let accepted = loop {
            for (k, x) in trial.iter_mut().enumerate() {
                *x = z[k] + step * dir[k];
            }
            if let Some(dphi) = model.delta(step) {
                let delta = t * step * lin_step + dphi;
                if delta <= settings.alpha * step * slope && prog.is_strictly_feasible(&trial) {
                    break true;
                }
            }
            step *= settings.beta;
            if step < 1e-20 {
                break false;
            }
        };
        *steps_left -= 1;
        taken += 1;
        if !accepted {
            // Round-off floor: a tiny decrement means we are centred already.
            if decrement2 < 1e-6 {
                return Ok(taken);
            }
            return Err(CenterFailure::Stagnation);
        }
        std::mem::swap(z, &mut trial);
        if early_exit(z) {
            return Ok(taken);
        }
    }
    Ok(taken)
}
