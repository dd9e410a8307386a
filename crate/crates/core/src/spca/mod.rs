//! Sequential parametric convex approximation of the sum-secrecy problem.
//!
//! Each round linearizes the three non-convex slack constraints at the
//! current iterate (tangent lower bounds of `e^y` and of the uplink SINR),
//! solves the resulting convex program and moves to its solution. Because
//! every surrogate is a conservative tangent, the previous iterate stays
//! feasible and the objective `u[n]` never decreases.
//!
//! Secrecy branches whose rate cannot be made strictly positive are left
//! out of the objective: keeping them would pin a nonnegativity constraint
//! at equality and leave the convex subproblems without an interior.

mod instance;
mod kkt;

use std::f64::consts::LOG2_E;

use serde::Serialize;

pub use instance::{Branches, Faults};
pub(crate) use instance::Instance;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::{self, ChannelSet, RatesReport, SystemConfig, TransmitDesign};
use crate::receiver::{self, ReceiveVector};
use crate::subsolver::{self, ConstraintTag, Dual, SolveStatus, SolverOptions, SubproblemPoint, SubproblemSpec};

/// Slack values in natural-log units: `ln` of powers in watts, except
/// `t_u = ln(1 + γ_U)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackVector {
    pub x_d: f64,
    pub y_d: f64,
    pub x_i: f64,
    pub y_i: f64,
    pub t_u: f64,
    pub y_u: f64,
}

impl SlackVector {
    fn from_normalized(sl: &[f64; 6], noise: f64) -> Self {
        let off = noise.ln();
        Self {
            x_d: sl[0] + off,
            y_d: sl[1] + off,
            x_i: sl[2] + off,
            y_i: sl[3] + off,
            t_u: sl[4],
            y_u: sl[5] + off,
        }
    }

    fn to_normalized(self, noise: f64) -> [f64; 6] {
        let off = noise.ln();
        [
            self.x_d - off,
            self.y_d - off,
            self.x_i - off,
            self.y_i - off,
            self.t_u,
            self.y_u - off,
        ]
    }

    /// `x_d − y_d − x_i + y_i` (nats).
    pub fn downlink_secrecy(&self) -> f64 {
        self.x_d - self.y_d - self.x_i + self.y_i
    }

    /// `t_u − x_i + y_u` (nats).
    pub fn uplink_secrecy(&self) -> f64 {
        self.t_u - self.x_i + self.y_u
    }

    /// Sum of both secrecy terms in bits/s/Hz.
    pub fn objective_bits(&self) -> f64 {
        (self.downlink_secrecy() + self.uplink_secrecy()) * LOG2_E
    }
}

/// Expansion point of one round, in absolute units.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationPoint {
    pub s_star: CMat,
    pub v_star: CMat,
    /// `ln(h_Dᴴ V* h_D + P_U|g_D|² + σ²)`
    pub y_d_star: f64,
    /// `ln(h_Iᴴ (S*+V*) h_I + P_U|g_I|² + σ²)`
    pub x_i_star: f64,
    /// `σ² I + H_SI (S*+V*) H_SIᴴ`
    pub x_u_star: CMat,
}

impl LinearizationPoint {
    pub fn new(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<Self> {
        ch.validate(cfg)?;
        let total = d.total();
        let y = linalg::quad_form(&ch.h_d, d.v())? + cfg.p_u * ch.g_d.norm_sqr() + cfg.sigma_z2;
        let x = linalg::quad_form(&ch.h_i, &total)? + cfg.p_u * ch.g_i.norm_sqr() + cfg.sigma_z2;
        Ok(Self {
            s_star: d.s().clone(),
            v_star: d.v().clone(),
            y_d_star: y.ln(),
            x_i_star: x.ln(),
            x_u_star: receiver::interference_covariance(ch, d, cfg),
        })
    }

    fn normalized(&self, inst: &Instance) -> Result<instance::Linearization> {
        let ln_noise = inst.noise.ln();
        let x_n = self.x_u_star.unscale(inst.noise);
        let chol = linalg::cholesky(&x_n)?;
        let z = chol.solve(&inst.g_u);
        let q = inst.h_si.adjoint() * &z;
        let m = &self.s_star + &self.v_star;
        Ok(instance::Linearization {
            y_star: self.y_d_star - ln_noise,
            x_star: self.x_i_star - ln_noise,
            g0: inst.p_u * inst.g_u.dotc(&z).re,
            qmq: instance::quad(&q, &m),
            q,
        })
    }
}

/// `e^{y*}(y − y* + 1)`, the tangent of `e^y` at `y*`.
pub fn exp_tangent(y: f64, y_star: f64) -> f64 {
    y_star.exp() * (y - y_star + 1.0)
}

/// `P_U gᴴ X_U⁻¹ g` for an arbitrary interference covariance.
pub fn uplink_sinr_of_covariance(x_u: &CMat, ch: &ChannelSet, cfg: &SystemConfig) -> Result<f64> {
    let chol = linalg::cholesky(x_u)?;
    Ok(cfg.p_u * ch.g_u.dotc(&chol.solve(&ch.g_u)).re)
}

/// Tangent lower bound of `P_U gᴴ X⁻¹ g` at `lp.x_u_star`, evaluated at `x_u`.
pub fn g_linearization(x_u: &CMat, lp: &LinearizationPoint, ch: &ChannelSet, cfg: &SystemConfig) -> Result<f64> {
    g_linearization_with(x_u, lp, ch, cfg, Faults::default())
}

#[doc(hidden)]
pub fn g_linearization_with(
    x_u: &CMat,
    lp: &LinearizationPoint,
    ch: &ChannelSet,
    cfg: &SystemConfig,
    faults: Faults,
) -> Result<f64> {
    let x_u = linalg::enforce_hermitian(x_u, "X_U")?;
    linalg::cholesky(&x_u)?;
    let chol = linalg::cholesky(&lp.x_u_star)?;
    let z = chol.solve(&ch.g_u);
    let g0 = cfg.p_u * ch.g_u.dotc(&z).re;
    let delta = &x_u - &lp.x_u_star;
    let trace = cfg.p_u * z.dotc(&(&delta * &z)).re;
    Ok(if faults.flip_g_trace_sign { g0 + trace } else { g0 - trace })
}

/// The convex subproblem around `lp` with both secrecy terms active.
pub fn build_subproblem(lp: &LinearizationPoint, ch: &ChannelSet, cfg: &SystemConfig) -> Result<SubproblemSpec> {
    ch.validate(cfg)?;
    let inst = Instance::from_channels(ch, cfg);
    let lin = lp.normalized(&inst)?;
    Ok(inst.build(&lin, Branches::BOTH, Faults::default()))
}

/// Power budget, energy requirement and PSD cones only; strictly feasible
/// iff the energy requirement is below its upper bound.
pub fn feasibility_subproblem(ch: &ChannelSet, cfg: &SystemConfig) -> Result<SubproblemSpec> {
    ch.validate(cfg)?;
    let inst = Instance::from_channels(ch, cfg);
    let lin = inst.linearize(&linalg::zeros(cfg.n_tx), &linalg::zeros(cfg.n_tx))?;
    Ok(inst.build(&lin, Branches::NONE, Faults::default()))
}

fn infeasible_error(ch: &ChannelSet, cfg: &SystemConfig) -> Error {
    Error::Infeasible(format!(
        "energy requirement E_min = {:.6e} W exceeds the harvestable bound {:.6e} W",
        cfg.e_min,
        model::energy_upper_bound(ch, cfg)
    ))
}

/// Energy-feasible starting designs `S = 0`, `V = κ P_BS ĥ_I ĥ_Iᴴ` with
/// `κ` strictly between the smallest energy-feasible value and 1.
struct Candidates {
    dir: CVec,
    kappas: Vec<f64>,
    uplink_rate: Vec<f64>,
    downlink_gain: Vec<f64>,
}

impl Candidates {
    const COUNT: usize = 32;
    const MARGIN: f64 = 1e-9;

    fn new(inst: &Instance) -> Result<Self> {
        let hmax = inst.max_energy();
        if inst.energy_req > hmax {
            return Err(Error::Infeasible(format!(
                "required idle-user gain {:.6e} exceeds the achievable {:.6e}",
                inst.energy_req, hmax
            )));
        }
        let kmin = if hmax > 0.0 { (inst.energy_req / hmax).clamp(0.0, 1.0) } else { 0.0 };
        let kappas: Vec<f64> = if 1.0 - kmin < 1e-12 {
            vec![1.0]
        } else {
            (1..=Self::COUNT)
                .map(|j| kmin + (1.0 - kmin) * j as f64 / (Self::COUNT + 1) as f64)
                .collect()
        };
        let dir = inst.idle_direction();
        let base = linalg::outer(&dir).scale(inst.p_bs);
        let mut uplink_rate = Vec::with_capacity(kappas.len());
        let mut downlink_gain = Vec::with_capacity(kappas.len());
        for &k in &kappas {
            let v = base.scale(k);
            let gu = inst.gamma_u(&v)?;
            let giu = inst.gamma_iu(&v);
            uplink_rate.push(gu.ln_1p() * LOG2_E - giu.ln_1p() * LOG2_E);
            downlink_gain.push(inst.downlink_gain(&v));
        }
        Ok(Self {
            dir,
            kappas,
            uplink_rate,
            downlink_gain,
        })
    }

    fn attainable(&self) -> Branches {
        Branches {
            downlink: self.downlink_gain.iter().any(|&g| g > Self::MARGIN),
            uplink: self.uplink_rate.iter().any(|&r| r > Self::MARGIN),
        }
    }

    /// Index of the best starting `κ` for the branch set, if any works.
    fn pick(&self, br: Branches) -> Option<usize> {
        let ok = |j: usize| {
            (!br.uplink || self.uplink_rate[j] > Self::MARGIN)
                && (!br.downlink || self.downlink_gain[j] > Self::MARGIN)
        };
        let score = |j: usize| if br.uplink { self.uplink_rate[j] } else { self.downlink_gain[j] };
        (0..self.kappas.len())
            .filter(|&j| ok(j))
            .max_by(|&a, &b| score(a).total_cmp(&score(b)))
    }

    fn design(&self, inst: &Instance, j: usize) -> (CMat, CMat) {
        (
            linalg::zeros(inst.n),
            linalg::outer(&self.dir).scale(self.kappas[j] * inst.p_bs),
        )
    }

    /// Fallback design when no secrecy term can be made positive.
    fn neutral(&self) -> usize {
        let best = |v: &[f64]| {
            (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0)
        };
        best(&self.uplink_rate)
    }
}

/// A feasible starting design and its linearization point.
///
/// `S = 0` and the artificial noise is beamed at the idle user with the
/// power fraction that maximizes the uplink secrecy rate among
/// energy-feasible choices.
pub fn init_feasible(ch: &ChannelSet, cfg: &SystemConfig) -> Result<(TransmitDesign, LinearizationPoint)> {
    cfg.validate()?;
    ch.validate(cfg)?;
    if !model::is_feasible(ch, cfg) {
        return Err(infeasible_error(ch, cfg));
    }
    let inst = Instance::from_channels(ch, cfg);
    let cand = Candidates::new(&inst)?;
    let reach = cand.attainable();
    let j = [Branches::BOTH, Branches::UPLINK, Branches::DOWNLINK]
        .into_iter()
        .filter_map(|br| cand.pick(br.and(reach)).filter(|_| br.and(reach).any()))
        .next()
        .unwrap_or_else(|| cand.neutral());
    let (s, v) = cand.design(&inst, j);
    let d = TransmitDesign::new(s, v)?;
    let lp = LinearizationPoint::new(ch, &d, cfg)?;
    Ok((d, lp))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpcaOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub solver: SolverOptions,
}

impl Default for SpcaOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-3,
            max_iter: 50,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminationReason {
    Converged,
    MaxIterations,
    SubsolverFailure,
    /// Neither secrecy rate can be made positive; the starting design is
    /// returned unchanged.
    NoSecrecyAttainable,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// `u[n]` in bits/s/Hz with tight slacks.
    pub objective: f64,
    /// Relative improvement over `u[n−1]` (absolute when `u[n−1] < 1e-9`).
    pub improvement: f64,
    pub slacks: SlackVector,
    pub status: SolveStatus,
    pub kkt_residual: f64,
    pub newton_steps: usize,
    pub duality_gap: f64,
    pub subproblem_objective: f64,
    /// Largest scaled violation of the subproblem constraints at its
    /// solution, checked with direct formulas.
    pub feasibility_violation: f64,
    /// Largest scaled violation of the true non-convex constraints at the
    /// subproblem solution.
    pub conservative_violation: f64,
    /// Largest scaled violation of this round's subproblem at the previous
    /// iterate.
    pub chain_violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpcaTrace {
    /// `u[0]`, evaluated at the starting design.
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
    pub termination: TerminationReason,
    pub branches: Branches,
    /// Dimension of the transmit subspace actually optimized.
    pub working_dim: usize,
}

impl SpcaTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// `u[0], u[1], …`
    pub fn objectives(&self) -> Vec<f64> {
        std::iter::once(self.initial_objective)
            .chain(self.records.iter().map(|r| r.objective))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SpcaOutput {
    pub design: TransmitDesign,
    pub receiver: ReceiveVector,
    pub report: RatesReport,
    pub trace: SpcaTrace,
    /// Tight slacks at the final design.
    pub slacks: SlackVector,
    /// Multipliers of the last subproblem, lifted to the full transmit space.
    pub duals: Vec<(ConstraintTag, Dual)>,
    pub kkt_residual: f64,
}

/// Result of the SPCA loop on a normalized instance.
pub(crate) struct Run {
    pub s: CMat,
    pub v: CMat,
    pub trace: SpcaTrace,
    pub duals: Vec<(ConstraintTag, Dual)>,
}

enum IterFailure {
    FirstRoundInfeasible,
    Fatal(Error),
}

impl From<Error> for IterFailure {
    fn from(e: Error) -> Self {
        IterFailure::Fatal(e)
    }
}

struct Loop {
    s: CMat,
    v: CMat,
    records: Vec<IterationRecord>,
    duals: Vec<(ConstraintTag, Dual)>,
    termination: TerminationReason,
    u0: f64,
}

/// Scaled violations of the subproblem constraints and of the true
/// non-convex constraints at a subproblem solution.
fn validate(inst: &Instance, spec: &SubproblemSpec, pt: &SubproblemPoint, br: Branches) -> (f64, f64) {
    let (s, v) = (&pt.s, &pt.v);
    let m = s + v;
    let sl = &pt.slacks;
    let rel = |lhs: f64, rhs: f64| ((lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0)).max(0.0);
    let mut feas = spec.max_violation(pt);
    feas = feas.max(rel(linalg::trace_re(&m), inst.p_bs));
    feas = feas.max(rel(inst.energy_req, inst.a_i(&m)));
    for cov in [s, v] {
        let tr = linalg::trace_re(cov).abs().max(1e-300);
        feas = feas.max((-linalg::min_eigenvalue(cov)).max(0.0) / tr);
    }
    let mut cons: f64 = 0.0;
    if br.downlink {
        feas = feas.max(rel(sl[0].exp(), inst.a_d(&m) + inst.c_d));
        feas = feas.max(rel(sl[3].exp(), inst.a_i(v) + inst.c_i));
        feas = feas.max(rel(sl[1] + sl[2], sl[0] + sl[3]));
        cons = cons.max(rel(inst.a_d(v) + inst.c_d, sl[1].exp()));
    }
    if br.any() {
        cons = cons.max(rel(inst.a_i(&m) + inst.c_i, sl[2].exp()));
    }
    if br.uplink {
        feas = feas.max(rel(sl[5].exp(), inst.a_i(&m) + 1.0));
        feas = feas.max(rel(sl[2], sl[4] + sl[5]));
        match inst.gamma_u(&m) {
            Ok(g) => cons = cons.max(rel(sl[4].exp(), 1.0 + g)),
            Err(_) => cons = f64::INFINITY,
        }
    }
    (feas, cons)
}

fn iterate(
    inst: &Instance,
    br: Branches,
    start: (CMat, CMat),
    opts: &SpcaOptions,
    faults: Faults,
    lift: &dyn Fn(&CMat) -> CMat,
) -> std::result::Result<Loop, IterFailure> {
    let (mut s, mut v) = start;
    let mut tight = inst.tight(&s, &v)?;
    let u0 = Instance::objective(&tight, br);
    let mut u_prev = u0;
    let mut warm = SubproblemPoint {
        s: s.clone(),
        v: v.clone(),
        slacks: tight,
    };
    let mut records = Vec::new();
    let mut duals = Vec::new();
    let mut termination = TerminationReason::MaxIterations;
    for it in 1..=opts.max_iter {
        let lin = inst.linearize(&s, &v)?;
        let spec = inst.build(&lin, br, faults);
        let prev = SubproblemPoint {
            s: s.clone(),
            v: v.clone(),
            slacks: tight,
        };
        let chain = spec.max_violation(&prev);
        let sol = subsolver::solve(&spec, Some(&warm), &opts.solver);
        match sol.status {
            SolveStatus::Optimal => {}
            SolveStatus::Infeasible if it == 1 => return Err(IterFailure::FirstRoundInfeasible),
            status => {
                let last_good = TransmitDesign::new(lift(&s), lift(&v)).ok().map(Box::new);
                return Err(IterFailure::Fatal(Error::Subsolver {
                    iteration: it,
                    reason: format!("{status:?}: {}", sol.message),
                    last_good,
                }));
            }
        }
        let (feas, cons) = validate(inst, &spec, &sol.point, br);
        let (s1, v1) = (sol.point.s.clone(), sol.point.v.clone());
        let t1 = inst.tight(&s1, &v1)?;
        let u = Instance::objective(&t1, br);
        let tagged: Vec<(ConstraintTag, Dual)> = spec
            .constraints
            .iter()
            .map(|c| c.tag)
            .zip(sol.duals.iter().cloned())
            .collect();
        let kkt = kkt::residual(inst, &s1, &v1, &t1, &tagged).unwrap_or(f64::NAN);
        let (improvement, done) = if u_prev >= 1e-9 {
            let r = (u - u_prev) / u_prev;
            (r, r < opts.rel_tol)
        } else {
            (u - u_prev, u - u_prev < 1e-6)
        };
        records.push(IterationRecord {
            iteration: it,
            objective: u,
            improvement,
            slacks: SlackVector::from_normalized(&t1, inst.noise),
            status: sol.status,
            kkt_residual: kkt,
            newton_steps: sol.iterations,
            duality_gap: sol.duality_gap,
            subproblem_objective: sol.objective,
            feasibility_violation: feas,
            conservative_violation: cons,
            chain_violation: chain,
        });
        s = s1;
        v = v1;
        tight = t1;
        warm = sol.point;
        duals = tagged;
        u_prev = u;
        if done {
            termination = TerminationReason::Converged;
            break;
        }
    }
    Ok(Loop {
        s,
        v,
        records,
        duals,
        termination,
        u0,
    })
}

/// Runs SPCA on `inst` with the secrecy terms in `allowed`, returning
/// covariances in the coordinates of `inst`.
pub(crate) fn run(inst: &Instance, allowed: Branches, opts: &SpcaOptions, faults: Faults) -> Result<Run> {
    inst.check()?;
    let basis = inst.subspace();
    let work = basis.as_ref().map_or_else(|| inst.clone(), |q| inst.restrict(q));
    let lift = |m: &CMat| match &basis {
        Some(q) => linalg::hermitian_part(&(q * m * q.adjoint())).0,
        None => m.clone(),
    };
    let cand = Candidates::new(&work)?;
    let reach = cand.attainable().and(allowed);

    let mut outcome = None;
    for br in [Branches::BOTH, Branches::UPLINK, Branches::DOWNLINK] {
        let br = br.and(reach);
        if !br.any() || outcome.is_some() {
            continue;
        }
        let Some(j) = cand.pick(br) else { continue };
        match iterate(&work, br, cand.design(&work, j), opts, faults, &lift) {
            Ok(l) => outcome = Some((br, l)),
            Err(IterFailure::FirstRoundInfeasible) => continue,
            Err(IterFailure::Fatal(e)) => return Err(e),
        }
    }

    let (br, l) = match outcome {
        Some(x) => x,
        None => {
            let (s, v) = cand.design(&work, cand.neutral());
            let u0 = Instance::objective(&work.tight(&s, &v)?, Branches::NONE);
            (
                Branches::NONE,
                Loop {
                    s,
                    v,
                    records: Vec::new(),
                    duals: Vec::new(),
                    termination: TerminationReason::NoSecrecyAttainable,
                    u0,
                },
            )
        }
    };

    let (mut s, mut v) = (l.s, l.v);
    if !br.downlink {
        v = &v + &s;
        s = linalg::zeros(work.n);
    }
    let budget_dual = l
        .duals
        .iter()
        .find(|(t, _)| *t == ConstraintTag::PowerBudget)
        .and_then(|(_, d)| d.scalar())
        .unwrap_or(0.0);
    let duals = l
        .duals
        .into_iter()
        .map(|(tag, d)| match (&basis, d) {
            (Some(q), Dual::Matrix(z)) => {
                let proj = q * q.adjoint();
                let comp = (CMat::identity(inst.n, inst.n) - &proj).scale(budget_dual);
                (tag, Dual::Matrix(linalg::hermitian_part(&(q * z * q.adjoint() + comp)).0))
            }
            (_, d) => (tag, d),
        })
        .collect();
    Ok(Run {
        s: lift(&s),
        v: lift(&v),
        trace: SpcaTrace {
            initial_objective: l.u0,
            records: l.records,
            termination: l.termination,
            branches: br,
            working_dim: work.n,
        },
        duals,
    })
}

/// Full SPCA pipeline on one channel realization.
pub fn spca_solve(ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions) -> Result<SpcaOutput> {
    spca_solve_with(ch, cfg, opts, Faults::default())
}

#[doc(hidden)]
pub fn spca_solve_with(ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions, faults: Faults) -> Result<SpcaOutput> {
    cfg.validate()?;
    ch.validate(cfg)?;
    if !model::is_feasible(ch, cfg) {
        return Err(infeasible_error(ch, cfg));
    }
    let inst = Instance::from_channels(ch, cfg);
    let out = run(&inst, Branches::BOTH, opts, faults)?;
    let design = TransmitDesign::new(out.s, out.v)?;
    let receiver = receiver::optimal_receiver(ch, &design, cfg)?;
    let report = model::full_report(ch, &design, &receiver.w, cfg)?;
    let tight = inst.tight(design.s(), design.v())?;
    let slacks = SlackVector::from_normalized(&tight, inst.noise);
    let kkt_residual = if out.duals.is_empty() {
        f64::NAN
    } else {
        kkt::residual(&inst, design.s(), design.v(), &tight, &out.duals)?
    };
    Ok(SpcaOutput {
        design,
        receiver,
        report,
        trace: out.trace,
        slacks,
        duals: out.duals,
        kkt_residual,
    })
}

/// Relative KKT residual of the slack-form problem at `(d, slacks)` with the
/// given multipliers: the maximum of stationarity, complementarity and
/// primal-feasibility residuals. Secrecy terms are included when their
/// nonnegativity constraint has a multiplier.
pub fn kkt_residual(
    d: &TransmitDesign,
    slacks: &SlackVector,
    duals: &[(ConstraintTag, Dual)],
    ch: &ChannelSet,
    cfg: &SystemConfig,
) -> Result<f64> {
    ch.validate(cfg)?;
    d.check_dims(cfg)?;
    let inst = Instance::from_channels(ch, cfg);
    kkt::residual(&inst, d.s(), d.v(), &slacks.to_normalized(inst.noise), duals)
}
