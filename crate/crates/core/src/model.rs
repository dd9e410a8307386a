//! Physical-layer model of the full-duplex SWIPT cell.
//!
//! One full-duplex base station with `n_tx` transmit and `n_rx` receive
//! antennas serves a single-antenna downlink user and a single-antenna
//! uplink user on the same band, while a single-antenna idle user harvests
//! RF energy and is treated as a potential eavesdropper on both links.
//!
//! All powers are in watts. Decibel quantities use a single rule: `X dB`
//! of attenuation is an average channel power gain of `10^(−X/10)`, and a
//! noise level of `−80 dB` means `1e-8` W.
//!
//! Everything is computed from covariances and closed-form rate
//! expressions; no symbols are ever sampled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Scalar physical parameters of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Maximum base-station transmit power (W).
    pub p_bs: f64,
    /// Uplink user transmit power (W).
    pub p_u: f64,
    /// RF-to-DC conversion efficiency of the idle user.
    pub zeta: f64,
    /// Noise power at every receiver (W).
    pub sigma_z2: f64,
    /// Variance of each residual self-interference channel entry.
    pub sigma_si2: f64,
    /// Minimum energy the idle user must harvest (W).
    pub e_min: f64,
    pub attn_bs_idle_db: f64,
    pub attn_other_db: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_tx: 4,
            n_rx: 4,
            p_bs: 1.0,
            p_u: 0.1,
            zeta: 0.5,
            sigma_z2: 1e-8,
            sigma_si2: 1e-6,
            e_min: 1e-3,
            attn_bs_idle_db: 30.0,
            attn_other_db: 70.0,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n_tx < 1 || self.n_rx < 1 {
            return bad("n_tx and n_rx must be at least 1");
        }
        let finite = [
            self.p_bs,
            self.p_u,
            self.zeta,
            self.sigma_z2,
            self.sigma_si2,
            self.e_min,
            self.attn_bs_idle_db,
            self.attn_other_db,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("all parameters must be finite");
        }
        if self.p_bs <= 0.0 {
            return bad("p_bs must be positive");
        }
        if self.p_u < 0.0 {
            return bad("p_u must be nonnegative");
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return bad("zeta must lie in (0, 1]");
        }
        if self.sigma_z2 <= 0.0 {
            return bad("sigma_z2 must be positive");
        }
        if self.sigma_si2 < 0.0 {
            return bad("sigma_si2 must be nonnegative");
        }
        if self.e_min < 0.0 {
            return bad("e_min must be nonnegative");
        }
        if self.attn_bs_idle_db < 0.0 || self.attn_other_db < 0.0 {
            return bad("attenuations must be nonnegative");
        }
        Ok(())
    }

    /// Average power gain of the base-station → idle-user link.
    pub fn idle_gain(&self) -> f64 {
        db_to_linear(-self.attn_bs_idle_db)
    }

    /// Average power gain of every other link except self-interference.
    pub fn other_gain(&self) -> f64 {
        db_to_linear(-self.attn_other_db)
    }
}

/// Extra antenna entries used only by the half-duplex baseline, where all
/// `n_tx + n_rx` antennas transmit (phase 1) and then receive (phase 2).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfDuplexExtension {
    /// Appended to `h_d` (length `n_rx`).
    pub h_d_extra: CVec,
    /// Appended to `h_i` (length `n_rx`).
    pub h_i_extra: CVec,
    /// Appended to `g_u` (length `n_tx`).
    pub g_u_extra: CVec,
}

/// One block-static realization of every channel in the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Base station → downlink user.
    pub h_d: CVec,
    /// Base station → idle user.
    pub h_i: CVec,
    /// Uplink user → downlink user.
    pub g_d: C64,
    /// Uplink user → idle user.
    pub g_i: C64,
    /// Uplink user → base station receive array.
    pub g_u: CVec,
    /// Residual self-interference, `n_rx × n_tx`.
    pub h_si: CMat,
    pub hd_extension: Option<HalfDuplexExtension>,
}

impl ChannelSet {
    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::Contract(msg)) };
        check(
            self.h_d.len() == cfg.n_tx,
            format!("h_d has length {}, expected n_tx = {}", self.h_d.len(), cfg.n_tx),
        )?;
        check(
            self.h_i.len() == cfg.n_tx,
            format!("h_i has length {}, expected n_tx = {}", self.h_i.len(), cfg.n_tx),
        )?;
        check(
            self.g_u.len() == cfg.n_rx,
            format!("g_u has length {}, expected n_rx = {}", self.g_u.len(), cfg.n_rx),
        )?;
        check(
            self.h_si.nrows() == cfg.n_rx && self.h_si.ncols() == cfg.n_tx,
            format!(
                "h_si is {}x{}, expected {}x{}",
                self.h_si.nrows(),
                self.h_si.ncols(),
                cfg.n_rx,
                cfg.n_tx
            ),
        )?;
        let finite = linalg::is_finite_vec(&self.h_d)
            && linalg::is_finite_vec(&self.h_i)
            && linalg::is_finite_vec(&self.g_u)
            && linalg::is_finite_mat(&self.h_si)
            && self.g_d.re.is_finite()
            && self.g_d.im.is_finite()
            && self.g_i.re.is_finite()
            && self.g_i.im.is_finite();
        check(finite, "channel entries must be finite".into())?;
        if let Some(ext) = &self.hd_extension {
            check(
                ext.h_d_extra.len() == cfg.n_rx && ext.h_i_extra.len() == cfg.n_rx,
                "half-duplex downlink extension must have n_rx entries".into(),
            )?;
            check(
                ext.g_u_extra.len() == cfg.n_tx,
                "half-duplex uplink extension must have n_tx entries".into(),
            )?;
        }
        Ok(())
    }

    /// Same channels with the self-interference channel removed.
    pub fn without_self_interference(&self) -> Self {
        let mut out = self.clone();
        out.h_si.fill(C64::new(0.0, 0.0));
        out
    }

    /// Stable 64-bit digest of every channel coefficient (FNV-1a over the
    /// IEEE bit patterns), used to check that schemes were paired.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: f64| {
            for b in x.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        let mut eat_c = |z: &C64| {
            eat(z.re);
            eat(z.im);
        };
        self.h_d.iter().for_each(&mut eat_c);
        self.h_i.iter().for_each(&mut eat_c);
        eat_c(&self.g_d);
        eat_c(&self.g_i);
        self.g_u.iter().for_each(&mut eat_c);
        self.h_si.iter().for_each(&mut eat_c);
        if let Some(ext) = &self.hd_extension {
            ext.h_d_extra.iter().for_each(&mut eat_c);
            ext.h_i_extra.iter().for_each(&mut eat_c);
            ext.g_u_extra.iter().for_each(&mut eat_c);
        }
        h
    }
}

/// Information covariance `S` and artificial-noise covariance `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitDesign {
    s_cov: CMat,
    v_cov: CMat,
}

impl TransmitDesign {
    /// Symmetrizes both matrices and checks they are PSD up to
    /// `−1e-9 · trace`.
    pub fn new(s_cov: CMat, v_cov: CMat) -> Result<Self> {
        if s_cov.shape() != v_cov.shape() {
            return Err(Error::contract("S and V must have the same shape"));
        }
        let s_cov = linalg::enforce_hermitian(&s_cov, "S")?;
        let v_cov = linalg::enforce_hermitian(&v_cov, "V")?;
        for (m, name) in [(&s_cov, "S"), (&v_cov, "V")] {
            let tr = linalg::trace_re(m);
            let lam = linalg::min_eigenvalue(m);
            if lam < -1e-9 * tr.abs().max(f64::MIN_POSITIVE) && lam < -1e-300 {
                return Err(Error::contract(format!(
                    "{name} is not positive semidefinite (min eigenvalue {lam:.3e})"
                )));
            }
        }
        Ok(Self { s_cov, v_cov })
    }

    pub fn zero(n_tx: usize) -> Self {
        Self {
            s_cov: linalg::zeros(n_tx),
            v_cov: linalg::zeros(n_tx),
        }
    }

    pub fn s(&self) -> &CMat {
        &self.s_cov
    }

    pub fn v(&self) -> &CMat {
        &self.v_cov
    }

    pub fn dim(&self) -> usize {
        self.s_cov.nrows()
    }

    /// `S + V`, the total transmit covariance.
    pub fn total(&self) -> CMat {
        &self.s_cov + &self.v_cov
    }

    pub fn total_power(&self) -> f64 {
        linalg::trace_re(&self.s_cov) + linalg::trace_re(&self.v_cov)
    }

    pub fn within_budget(&self, p_bs: f64) -> bool {
        self.total_power() <= p_bs * (1.0 + 1e-9)
    }

    pub(crate) fn check_dims(&self, cfg: &SystemConfig) -> Result<()> {
        if self.dim() != cfg.n_tx {
            return Err(Error::contract(format!(
                "design is {}x{}, expected n_tx = {}",
                self.dim(),
                self.dim(),
                cfg.n_tx
            )));
        }
        Ok(())
    }
}

/// Every per-link metric of one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub gamma_d: f64,
    pub gamma_u: f64,
    pub gamma_i_d: f64,
    pub gamma_i_u: f64,
    /// Downlink secrecy rate, bits/s/Hz.
    pub r_d_sec: f64,
    /// Uplink secrecy rate, bits/s/Hz.
    pub r_u_sec: f64,
    pub r_sum: f64,
    /// Harvested power at the idle user (W).
    pub energy: f64,
}

fn checked(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<()> {
    ch.validate(cfg)?;
    d.check_dims(cfg)
}

/// Downlink SINR at the intended user.
pub fn downlink_sinr(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<f64> {
    checked(ch, d, cfg)?;
    let signal = linalg::quad_form(&ch.h_d, d.s())?;
    let an = linalg::quad_form(&ch.h_d, d.v())?;
    Ok(signal / (an + cfg.p_u * ch.g_d.norm_sqr() + cfg.sigma_z2))
}

/// Uplink SINR at the base station for an arbitrary unit receive vector.
pub fn uplink_sinr_with_receiver(
    ch: &ChannelSet,
    d: &TransmitDesign,
    w: &CVec,
    cfg: &SystemConfig,
) -> Result<f64> {
    checked(ch, d, cfg)?;
    if w.len() != cfg.n_rx {
        return Err(Error::contract(format!(
            "receive vector has length {}, expected n_rx = {}",
            w.len(),
            cfg.n_rx
        )));
    }
    let norm = w.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::contract(format!(
            "receive vector must have unit norm, got {norm:.12}"
        )));
    }
    let signal = cfg.p_u * w.dotc(&ch.g_u).norm_sqr();
    // wᴴ H (S+V) Hᴴ w = (Hᴴ w)ᴴ (S+V) (Hᴴ w)
    let leak = ch.h_si.adjoint() * w;
    let si = linalg::quad_form(&leak, &d.total())?;
    Ok(signal / (si + cfg.sigma_z2 * norm * norm))
}

/// Idle user's SINR when decoding the downlink stream.
pub fn eve_downlink_sinr(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<f64> {
    checked(ch, d, cfg)?;
    let signal = linalg::quad_form(&ch.h_i, d.s())?;
    let an = linalg::quad_form(&ch.h_i, d.v())?;
    Ok(signal / (an + cfg.p_u * ch.g_i.norm_sqr() + cfg.sigma_z2))
}

/// Idle user's SINR when decoding the uplink stream; the whole downlink
/// transmission acts as interference.
pub fn eve_uplink_sinr(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<f64> {
    checked(ch, d, cfg)?;
    let an = linalg::quad_form(&ch.h_i, d.v())?;
    let info = linalg::quad_form(&ch.h_i, d.s())?;
    Ok(cfg.p_u * ch.g_i.norm_sqr() / (an + info + cfg.sigma_z2))
}

/// `[log2(1+γ_main) − log2(1+γ_eve)]⁺` for the downlink and uplink pairs.
pub fn secrecy_rates(
    gamma_main_dl: f64,
    gamma_eve_dl: f64,
    gamma_main_ul: f64,
    gamma_eve_ul: f64,
) -> Result<(f64, f64)> {
    let all = [gamma_main_dl, gamma_eve_dl, gamma_main_ul, gamma_eve_ul];
    if all.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
        return Err(Error::contract(format!(
            "SINRs must be finite and nonnegative, got {all:?}"
        )));
    }
    let rate = |main: f64, eve: f64| ((1.0 + main).log2() - (1.0 + eve).log2()).max(0.0);
    Ok((
        rate(gamma_main_dl, gamma_eve_dl),
        rate(gamma_main_ul, gamma_eve_ul),
    ))
}

/// Power harvested by the idle user from the downlink transmission and the
/// uplink user's signal.
pub fn harvested_energy(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<f64> {
    checked(ch, d, cfg)?;
    let info = linalg::quad_form(&ch.h_i, d.s())?;
    let an = linalg::quad_form(&ch.h_i, d.v())?;
    Ok(cfg.zeta * (info + an + cfg.p_u * ch.g_i.norm_sqr()))
}

/// Largest harvestable power: full budget beamed at the idle user.
pub fn energy_upper_bound(ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    cfg.zeta * (cfg.p_bs * ch.h_i.norm_squared() + cfg.p_u * ch.g_i.norm_sqr())
}

/// Whether the energy requirement can be met within the power budget.
pub fn is_feasible(ch: &ChannelSet, cfg: &SystemConfig) -> bool {
    cfg.e_min <= energy_upper_bound(ch, cfg)
}

/// Assembles every metric for a design and a given receive vector.
pub fn full_report(
    ch: &ChannelSet,
    d: &TransmitDesign,
    w: &CVec,
    cfg: &SystemConfig,
) -> Result<RatesReport> {
    let gamma_d = downlink_sinr(ch, d, cfg)?;
    let gamma_u = uplink_sinr_with_receiver(ch, d, w, cfg)?;
    let gamma_i_d = eve_downlink_sinr(ch, d, cfg)?;
    let gamma_i_u = eve_uplink_sinr(ch, d, cfg)?;
    let (r_d_sec, r_u_sec) = secrecy_rates(gamma_d, gamma_i_d, gamma_u, gamma_i_u)?;
    let energy = harvested_energy(ch, d, cfg)?;
    Ok(RatesReport {
        gamma_d,
        gamma_u,
        gamma_i_d,
        gamma_i_u,
        r_d_sec,
        r_u_sec,
        r_sum: r_d_sec + r_u_sec,
        energy,
    })
}
