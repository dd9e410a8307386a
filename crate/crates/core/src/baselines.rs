//! Comparison schemes: full duplex with ideal self-interference
//! cancellation, and a two-phase half-duplex scheme.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::{self, ChannelSet, SystemConfig};
use crate::spca::{self, Branches, Faults, Instance, SpcaOptions, TerminationReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "full-duplex")]
    FullDuplex,
    #[serde(rename = "perfect-fd")]
    PerfectFd,
    #[serde(rename = "half-duplex")]
    HalfDuplex,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::FullDuplex, Scheme::PerfectFd, Scheme::HalfDuplex];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::FullDuplex => "full-duplex",
            Scheme::PerfectFd => "perfect-fd",
            Scheme::HalfDuplex => "half-duplex",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}; expected full-duplex, perfect-fd or half-duplex")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    pub scheme: Scheme,
    /// Sum secrecy rate, bits/s/Hz.
    pub sum_rate: f64,
    pub downlink_rate: f64,
    pub uplink_rate: f64,
    /// Average harvested power over the slot, W.
    pub energy: f64,
    pub iterations: usize,
    pub termination: TerminationReason,
}

/// The proposed scheme.
pub fn full_duplex(ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions) -> Result<BaselineResult> {
    let out = spca::spca_solve(ch, cfg, opts)?;
    Ok(BaselineResult {
        scheme: Scheme::FullDuplex,
        sum_rate: out.report.r_sum,
        downlink_rate: out.report.r_d_sec,
        uplink_rate: out.report.r_u_sec,
        energy: out.report.energy,
        iterations: out.trace.iterations(),
        termination: out.trace.termination,
    })
}

/// Full duplex with the self-interference channel removed.
pub fn perfect_fd_solve(ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions) -> Result<BaselineResult> {
    let r = full_duplex(&ch.without_self_interference(), cfg, opts)?;
    Ok(BaselineResult {
        scheme: Scheme::PerfectFd,
        ..r
    })
}

fn stack(a: &CVec, b: &CVec) -> CVec {
    CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Two equal phases over all `N_T + N_R` antennas.
///
/// Phase 1: the base station sends a secured downlink stream with
/// artificial noise while the uplink user is silent. Phase 2: the base
/// station listens with a matched filter while the idle user overhears the
/// uplink user without interference. Rates are halved and the harvested
/// power is the phase average, which must meet `E_min`.
pub fn half_duplex_solve(ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions) -> Result<BaselineResult> {
    cfg.validate()?;
    ch.validate(cfg)?;
    let ext = ch
        .hd_extension
        .as_ref()
        .ok_or_else(|| Error::contract("half-duplex scheme needs the extended channel set"))?;
    let h_d = stack(&ch.h_d, &ext.h_d_extra);
    let h_i = stack(&ch.h_i, &ext.h_i_extra);
    let g_u = stack(&ch.g_u, &ext.g_u_extra);
    let n = h_d.len();
    if h_i.len() != n || g_u.len() != n {
        return Err(Error::contract("half-duplex channels must all have N_T + N_R entries"));
    }

    let sigma2 = cfg.sigma_z2;
    let e2 = cfg.zeta * cfg.p_u * ch.g_i.norm_sqr();
    let e1_req = 2.0 * cfg.e_min - e2;
    let e1_max = cfg.zeta * cfg.p_bs * h_i.norm_squared();
    if e1_req > e1_max {
        return Err(Error::Infeasible(format!(
            "half-duplex phase 1 must harvest {e1_req:.6e} W but at most {e1_max:.6e} W is available"
        )));
    }
    let inv = 1.0 / sigma2.sqrt();
    let inst = Instance {
        n,
        noise: sigma2,
        h_d: h_d.scale(inv),
        h_i: h_i.scale(inv),
        c_d: 1.0,
        c_i: 1.0,
        g_u: CVec::zeros(1),
        h_si: CMat::zeros(1, n),
        p_u: 0.0,
        p_bs: cfg.p_bs,
        energy_req: e1_req / (cfg.zeta * sigma2),
    };
    let run = spca::run(&inst, Branches::DOWNLINK, opts, Faults::default())?;
    let total = &run.s + &run.v;
    let gamma_d = inst.a_d(&run.s) / (inst.a_d(&run.v) + 1.0);
    let gamma_id = inst.a_i(&run.s) / (inst.a_i(&run.v) + 1.0);
    let e1 = cfg.zeta * sigma2 * inst.a_i(&total);

    let gamma_u = cfg.p_u * g_u.norm_squared() / sigma2;
    let gamma_iu = cfg.p_u * ch.g_i.norm_sqr() / sigma2;
    let (r_d, r_u) = model::secrecy_rates(gamma_d.max(0.0), gamma_id.max(0.0), gamma_u, gamma_iu)?;
    let (r_d, r_u) = (0.5 * r_d, 0.5 * r_u);
    debug_assert!(linalg::trace_re(&total) <= cfg.p_bs * (1.0 + 1e-9));
    Ok(BaselineResult {
        scheme: Scheme::HalfDuplex,
        sum_rate: r_d + r_u,
        downlink_rate: r_d,
        uplink_rate: r_u,
        energy: 0.5 * (e1 + e2),
        iterations: run.trace.iterations(),
        termination: run.trace.termination,
    })
}

pub fn solve_scheme(scheme: Scheme, ch: &ChannelSet, cfg: &SystemConfig, opts: &SpcaOptions) -> Result<BaselineResult> {
    match scheme {
        Scheme::FullDuplex => full_duplex(ch, cfg, opts),
        Scheme::PerfectFd => perfect_fd_solve(ch, cfg, opts),
        Scheme::HalfDuplex => half_duplex_solve(ch, cfg, opts),
    }
}
