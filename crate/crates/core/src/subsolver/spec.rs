//! The convex program solved at each SPCA round.
//!
//! Decision variables are two Hermitian `n × n` covariances `S`, `V` and up
//! to six scalar slacks. The objective is linear in the slacks; every
//! scalar constraint is either affine or of the form `e^{slack} ≤ affine`,
//! and both covariances are constrained to the PSD cone.
//!
//! Power-like quantities inside a spec are normalized by the noise power,
//! so slack variables are natural logs of power ratios `P/σ²`.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMat};

/// Slack variables of the log-exponential reformulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slack {
    /// log of total received power at the downlink user
    XD,
    /// log of interference-plus-noise at the downlink user
    YD,
    /// log of total received power at the idle user
    XI,
    /// log of interference-plus-noise at the idle user, downlink stream
    YI,
    /// log(1 + uplink SINR)
    TU,
    /// log of interference-plus-noise at the idle user, uplink stream
    YU,
}

impl Slack {
    pub const ALL: [Slack; 6] = [Slack::XD, Slack::YD, Slack::XI, Slack::YI, Slack::TU, Slack::YU];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Slack::XD => "x_d",
            Slack::YD => "y_d",
            Slack::XI => "x_i",
            Slack::YI => "y_i",
            Slack::TU => "t_u",
            Slack::YU => "y_u",
        }
    }
}

/// Which covariance a PSD constraint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    Information,
    ArtificialNoise,
}

/// Diagnostic label carried by every constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintTag {
    /// `e^{x_D} ≤ h_Dᴴ(S+V)h_D + c_D`
    DownlinkReceivedPower,
    /// `h_DᴴVh_D + c_D ≤ e^{y_D*}(y_D − y_D* + 1)` (linearized)
    DownlinkInterferenceLinearized,
    /// `h_Iᴴ(S+V)h_I + c_I ≤ e^{x_I*}(x_I − x_I* + 1)` (linearized)
    EveReceivedPowerLinearized,
    /// `e^{y_I} ≤ h_IᴴVh_I + c_I`
    EveDownlinkInterference,
    /// `x_D − y_D − x_I + y_I ≥ 0`
    DownlinkSecrecyNonnegative,
    /// `e^{t_U} − 1 ≤ G(X_U, X_U*)` (first-order bound on the uplink SINR)
    UplinkSinrLinearized,
    /// `e^{y_U} ≤ h_Iᴴ(S+V)h_I + σ²`
    EveUplinkInterference,
    /// `t_U − x_I + y_U ≥ 0`
    UplinkSecrecyNonnegative,
    PowerBudget,
    EnergyHarvesting,
    InformationPsd,
    ArtificialNoisePsd,
}

/// `Tr(A_S S) + Tr(A_V V) + Σ c_k slack_k + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineExpr {
    pub s: Option<CMat>,
    pub v: Option<CMat>,
    pub slacks: [f64; 6],
    pub constant: f64,
}

impl AffineExpr {
    pub fn constant(value: f64) -> Self {
        Self {
            s: None,
            v: None,
            slacks: [0.0; 6],
            constant: value,
        }
    }

    pub fn with_s(mut self, a: CMat) -> Self {
        self.s = Some(a);
        self
    }

    pub fn with_v(mut self, a: CMat) -> Self {
        self.v = Some(a);
        self
    }

    pub fn with_slack(mut self, slack: Slack, coef: f64) -> Self {
        self.slacks[slack.index()] += coef;
        self
    }

    pub fn eval(&self, point: &SubproblemPoint) -> f64 {
        let tr = |a: &Option<CMat>, m: &CMat| a.as_ref().map_or(0.0, |a| (a * m).trace().re);
        let slack_part: f64 = self.slacks.iter().zip(&point.slacks).map(|(c, x)| c * x).sum();
        tr(&self.s, &point.s) + tr(&self.v, &point.v) + slack_part + self.constant
    }

    pub(crate) fn uses_slack(&self, slack: Slack) -> bool {
        self.slacks[slack.index()] != 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    /// `e^{slack} ≤ bound`
    Exp { slack: Slack, bound: AffineExpr },
    /// `expr ≥ 0`
    Affine(AffineExpr),
    /// `Tr S + Tr V ≤ budget`
    TraceBudget { budget: f64 },
    Psd(Cone),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub tag: ConstraintTag,
    pub kind: ConstraintKind,
}

impl Constraint {
    /// Signed margin, nonnegative when satisfied. PSD constraints report
    /// the minimum eigenvalue.
    pub fn margin(&self, point: &SubproblemPoint) -> f64 {
        match &self.kind {
            ConstraintKind::Exp { slack, bound } => bound.eval(point) - point.slacks[slack.index()].exp(),
            ConstraintKind::Affine(expr) => expr.eval(point),
            ConstraintKind::TraceBudget { budget } => {
                budget - linalg::trace_re(&point.s) - linalg::trace_re(&point.v)
            }
            ConstraintKind::Psd(Cone::Information) => linalg::min_eigenvalue(&point.s),
            ConstraintKind::Psd(Cone::ArtificialNoise) => linalg::min_eigenvalue(&point.v),
        }
    }

    /// Magnitude used to turn a margin into a relative violation.
    pub fn scale(&self, point: &SubproblemPoint) -> f64 {
        let expr_scale = |e: &AffineExpr| {
            let mut acc = e.constant.abs();
            let tr_abs = |a: &Option<CMat>, m: &CMat| a.as_ref().map_or(0.0, |a| (a * m).trace().re.abs());
            acc += tr_abs(&e.s, &point.s) + tr_abs(&e.v, &point.v);
            acc += e
                .slacks
                .iter()
                .zip(&point.slacks)
                .map(|(c, x)| (c * x).abs())
                .sum::<f64>();
            acc.max(1.0)
        };
        match &self.kind {
            ConstraintKind::Exp { bound, .. } => expr_scale(bound),
            ConstraintKind::Affine(e) => expr_scale(e),
            ConstraintKind::TraceBudget { budget } => budget.abs().max(f64::MIN_POSITIVE),
            ConstraintKind::Psd(Cone::Information) => linalg::trace_re(&point.s).abs().max(1e-300),
            ConstraintKind::Psd(Cone::ArtificialNoise) => linalg::trace_re(&point.v).abs().max(1e-300),
        }
    }

    pub fn is_scalar(&self) -> bool {
        !matches!(self.kind, ConstraintKind::Psd(_))
    }
}

/// One candidate solution of a subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemPoint {
    pub s: CMat,
    pub v: CMat,
    pub slacks: [f64; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSpec {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Noise power σ² (W) used to normalize every power term.
    pub noise_power: f64,
    /// Maximize `Σ objective[k] · slack_k` (bits/s/Hz).
    pub objective: [f64; 6],
    pub constraints: Vec<Constraint>,
}

impl SubproblemSpec {
    pub fn objective_value(&self, point: &SubproblemPoint) -> f64 {
        self.objective.iter().zip(&point.slacks).map(|(c, x)| c * x).sum()
    }

    pub fn power_budget(&self) -> Option<f64> {
        self.constraints.iter().find_map(|c| match c.kind {
            ConstraintKind::TraceBudget { budget } => Some(budget),
            _ => None,
        })
    }

    /// Slacks the program actually depends on.
    pub fn used_slacks(&self) -> Vec<Slack> {
        Slack::ALL
            .into_iter()
            .filter(|&k| {
                self.objective[k.index()] != 0.0
                    || self.constraints.iter().any(|c| match &c.kind {
                        ConstraintKind::Exp { slack, bound } => *slack == k || bound.uses_slack(k),
                        ConstraintKind::Affine(e) => e.uses_slack(k),
                        _ => false,
                    })
            })
            .collect()
    }

    /// Largest relative violation over all constraints (0 when feasible).
    pub fn max_violation(&self, point: &SubproblemPoint) -> f64 {
        self.constraints
            .iter()
            .map(|c| (-c.margin(point) / c.scale(point)).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn find(&self, tag: ConstraintTag) -> Option<usize> {
        self.constraints.iter().position(|c| c.tag == tag)
    }
}
