//! Noise-normalized problem data shared by the SPCA loop and the baselines.

use std::f64::consts::LOG2_E;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::model::{ChannelSet, SystemConfig};
use crate::subsolver::{AffineExpr, Cone, Constraint, ConstraintKind, ConstraintTag, Slack, SubproblemSpec};

/// Which secrecy terms take part in the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Branches {
    pub downlink: bool,
    pub uplink: bool,
}

impl Branches {
    pub const BOTH: Branches = Branches { downlink: true, uplink: true };
    pub const DOWNLINK: Branches = Branches { downlink: true, uplink: false };
    pub const UPLINK: Branches = Branches { downlink: false, uplink: true };
    pub const NONE: Branches = Branches { downlink: false, uplink: false };

    pub fn any(self) -> bool {
        self.downlink || self.uplink
    }

    pub(crate) fn and(self, other: Branches) -> Branches {
        Branches {
            downlink: self.downlink && other.downlink,
            uplink: self.uplink && other.uplink,
        }
    }
}

/// Test-only fault switches.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Flips the sign of the trace term in the uplink SINR linearization.
    pub flip_g_trace_sign: bool,
}

/// Problem data with every channel divided by `σ`, so quadratic forms are
/// SNR-like and covariances stay in watts.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub n: usize,
    pub noise: f64,
    pub h_d: CVec,
    pub h_i: CVec,
    /// `1 + P_U|g_D|²/σ²`
    pub c_d: f64,
    /// `1 + P_U|g_I|²/σ²`
    pub c_i: f64,
    /// Raw uplink channel.
    pub g_u: CVec,
    pub h_si: CMat,
    /// `P_U/σ²`
    pub p_u: f64,
    pub p_bs: f64,
    /// Lower bound on `h_Iᴴ(S+V)h_I` imposed by the energy requirement.
    pub energy_req: f64,
}

/// First-order data at the current iterate.
#[derive(Debug, Clone)]
pub(crate) struct Linearization {
    pub y_star: f64,
    pub x_star: f64,
    /// Uplink SINR at the iterate.
    pub g0: f64,
    /// `H_SIᴴ X*⁻¹ g_U`
    pub q: CVec,
    /// `qᴴ (S*+V*) q`
    pub qmq: f64,
}

pub(crate) fn quad(h: &CVec, m: &CMat) -> f64 {
    h.dotc(&(m * h)).re
}

impl Instance {
    pub fn from_channels(ch: &ChannelSet, cfg: &SystemConfig) -> Self {
        let sigma = cfg.sigma_z2.sqrt();
        let inv = 1.0 / sigma;
        Self {
            n: cfg.n_tx,
            noise: cfg.sigma_z2,
            h_d: ch.h_d.scale(inv),
            h_i: ch.h_i.scale(inv),
            c_d: 1.0 + cfg.p_u * ch.g_d.norm_sqr() / cfg.sigma_z2,
            c_i: 1.0 + cfg.p_u * ch.g_i.norm_sqr() / cfg.sigma_z2,
            g_u: ch.g_u.clone(),
            h_si: ch.h_si.scale(inv),
            p_u: cfg.p_u / cfg.sigma_z2,
            p_bs: cfg.p_bs,
            energy_req: (cfg.e_min / cfg.zeta - cfg.p_u * ch.g_i.norm_sqr()) / cfg.sigma_z2,
        }
    }

    pub fn max_energy(&self) -> f64 {
        self.p_bs * self.h_i.norm_squared()
    }

    pub fn a_d(&self, m: &CMat) -> f64 {
        quad(&self.h_d, m)
    }

    pub fn a_i(&self, m: &CMat) -> f64 {
        quad(&self.h_i, m)
    }

    /// `I + H (S+V) Hᴴ`.
    pub fn x_u(&self, total: &CMat) -> CMat {
        let n_rx = self.h_si.nrows();
        let x = CMat::identity(n_rx, n_rx) + &self.h_si * total * self.h_si.adjoint();
        linalg::hermitian_part(&x).0
    }

    /// `(γ_U, X⁻¹ g_U)` under optimal combining.
    pub fn uplink(&self, total: &CMat) -> Result<(f64, CVec)> {
        let chol = linalg::cholesky(&self.x_u(total))?;
        let z = chol.solve(&self.g_u);
        Ok((self.p_u * self.g_u.dotc(&z).re, z))
    }

    pub fn gamma_u(&self, total: &CMat) -> Result<f64> {
        Ok(self.uplink(total)?.0)
    }

    pub fn gamma_iu(&self, total: &CMat) -> f64 {
        (self.c_i - 1.0) / (self.a_i(total) + 1.0)
    }

    /// Slacks at equality, in `ln(P/σ²)` units.
    pub fn tight(&self, s: &CMat, v: &CMat) -> Result<[f64; 6]> {
        let m = s + v;
        let gu = self.gamma_u(&m)?;
        Ok([
            (self.a_d(&m) + self.c_d).ln(),
            (self.a_d(v) + self.c_d).ln(),
            (self.a_i(&m) + self.c_i).ln(),
            (self.a_i(v) + self.c_i).ln(),
            gu.ln_1p(),
            (self.a_i(&m) + 1.0).ln(),
        ])
    }

    pub fn objective(sl: &[f64; 6], br: Branches) -> f64 {
        let mut u = 0.0;
        if br.downlink {
            u += sl[0] - sl[1] - sl[2] + sl[3];
        }
        if br.uplink {
            u += sl[4] - sl[2] + sl[5];
        }
        u * LOG2_E
    }

    pub fn objective_coefficients(br: Branches) -> [f64; 6] {
        let mut c = [0.0; 6];
        if br.downlink {
            c[Slack::XD.index()] += LOG2_E;
            c[Slack::YD.index()] -= LOG2_E;
            c[Slack::XI.index()] -= LOG2_E;
            c[Slack::YI.index()] += LOG2_E;
        }
        if br.uplink {
            c[Slack::TU.index()] += LOG2_E;
            c[Slack::XI.index()] -= LOG2_E;
            c[Slack::YU.index()] += LOG2_E;
        }
        c
    }

    pub fn linearize(&self, s: &CMat, v: &CMat) -> Result<Linearization> {
        let m = s + v;
        let (g0, z) = self.uplink(&m)?;
        let q = self.h_si.adjoint() * z;
        Ok(Linearization {
            y_star: (self.a_d(v) + self.c_d).ln(),
            x_star: (self.a_i(&m) + self.c_i).ln(),
            g0,
            qmq: quad(&q, &m),
            q,
        })
    }

    /// Assembles the convex subproblem around `lin` for the active branches.
    pub fn build(&self, lin: &Linearization, br: Branches, faults: Faults) -> SubproblemSpec {
        let a_d = linalg::outer(&self.h_d);
        let a_i = linalg::outer(&self.h_i);
        let mut cons = Vec::new();
        let mut push = |tag, kind| cons.push(Constraint { tag, kind });
        let need_x_i = br.any();
        if br.downlink {
            push(
                ConstraintTag::DownlinkReceivedPower,
                ConstraintKind::Exp {
                    slack: Slack::XD,
                    bound: AffineExpr::constant(self.c_d).with_s(a_d.clone()).with_v(a_d.clone()),
                },
            );
            let ey = lin.y_star.exp();
            push(
                ConstraintTag::DownlinkInterferenceLinearized,
                ConstraintKind::Affine(
                    AffineExpr::constant(ey * (1.0 - lin.y_star) - self.c_d)
                        .with_v(-a_d.clone())
                        .with_slack(Slack::YD, ey),
                ),
            );
        }
        if need_x_i {
            let ex = lin.x_star.exp();
            push(
                ConstraintTag::EveReceivedPowerLinearized,
                ConstraintKind::Affine(
                    AffineExpr::constant(ex * (1.0 - lin.x_star) - self.c_i)
                        .with_s(-a_i.clone())
                        .with_v(-a_i.clone())
                        .with_slack(Slack::XI, ex),
                ),
            );
        }
        if br.downlink {
            push(
                ConstraintTag::EveDownlinkInterference,
                ConstraintKind::Exp {
                    slack: Slack::YI,
                    bound: AffineExpr::constant(self.c_i).with_v(a_i.clone()),
                },
            );
            push(
                ConstraintTag::DownlinkSecrecyNonnegative,
                ConstraintKind::Affine(
                    AffineExpr::constant(0.0)
                        .with_slack(Slack::XD, 1.0)
                        .with_slack(Slack::YD, -1.0)
                        .with_slack(Slack::XI, -1.0)
                        .with_slack(Slack::YI, 1.0),
                ),
            );
        }
        if br.uplink {
            // 1 + G(X) with G(X) = G0 − P̃ qᴴ(M − M*)q.
            let sign = if faults.flip_g_trace_sign { -1.0 } else { 1.0 };
            let qq = linalg::outer(&lin.q).scale(self.p_u);
            push(
                ConstraintTag::UplinkSinrLinearized,
                ConstraintKind::Exp {
                    slack: Slack::TU,
                    bound: AffineExpr::constant(1.0 + lin.g0 + sign * self.p_u * lin.qmq)
                        .with_s(qq.scale(-sign))
                        .with_v(qq.scale(-sign)),
                },
            );
            push(
                ConstraintTag::EveUplinkInterference,
                ConstraintKind::Exp {
                    slack: Slack::YU,
                    bound: AffineExpr::constant(1.0).with_s(a_i.clone()).with_v(a_i.clone()),
                },
            );
            push(
                ConstraintTag::UplinkSecrecyNonnegative,
                ConstraintKind::Affine(
                    AffineExpr::constant(0.0)
                        .with_slack(Slack::TU, 1.0)
                        .with_slack(Slack::XI, -1.0)
                        .with_slack(Slack::YU, 1.0),
                ),
            );
        }
        push(ConstraintTag::PowerBudget, ConstraintKind::TraceBudget { budget: self.p_bs });
        push(
            ConstraintTag::EnergyHarvesting,
            ConstraintKind::Affine(
                AffineExpr::constant(-self.energy_req).with_s(a_i.clone()).with_v(a_i),
            ),
        );
        push(ConstraintTag::InformationPsd, ConstraintKind::Psd(Cone::Information));
        push(ConstraintTag::ArtificialNoisePsd, ConstraintKind::Psd(Cone::ArtificialNoise));
        SubproblemSpec {
            n_tx: self.n,
            n_rx: self.h_si.nrows(),
            noise_power: self.noise,
            objective: Self::objective_coefficients(br),
            constraints: cons,
        }
    }

    /// Orthonormal basis of the span of `h_D`, `h_I` and the rows of `H_SI`
    /// when that span is a proper subspace. Optimal covariances live there.
    pub fn subspace(&self) -> Option<CMat> {
        let n_rx = self.h_si.nrows();
        let mut k = CMat::zeros(self.n, 2 + n_rx);
        k.set_column(0, &self.h_d);
        k.set_column(1, &self.h_i);
        let ha = self.h_si.adjoint();
        for j in 0..n_rx {
            k.set_column(2 + j, &ha.column(j));
        }
        let svd = k.svd(true, false);
        let u = svd.u?;
        let sv = &svd.singular_values;
        let top = sv.iter().fold(0.0f64, |a, x| a.max(*x));
        if top == 0.0 {
            return None;
        }
        let keep: Vec<usize> = (0..sv.len()).filter(|&j| sv[j] > 1e-10 * top).collect();
        if keep.len() >= self.n {
            return None;
        }
        let mut q = CMat::zeros(self.n, keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            q.set_column(dst, &u.column(src));
        }
        Some(q)
    }

    /// The same problem restricted to `range(q)`.
    pub fn restrict(&self, q: &CMat) -> Instance {
        let qa = q.adjoint();
        Instance {
            n: q.ncols(),
            h_d: &qa * &self.h_d,
            h_i: &qa * &self.h_i,
            h_si: &self.h_si * q,
            ..self.clone()
        }
    }

    /// Largest eigenvalue of `h_D h_Dᴴ/B_D − h_I h_Iᴴ/B_I` relative to
    /// `‖h_D‖²/B_D`; positive iff a small information beam gains downlink
    /// secrecy at noise covariance `v`.
    pub fn downlink_gain(&self, v: &CMat) -> f64 {
        let bd = self.a_d(v) + self.c_d;
        let bi = self.a_i(v) + self.c_i;
        let m = linalg::outer(&self.h_d).unscale(bd) - linalg::outer(&self.h_i).unscale(bi);
        let lam = *linalg::hermitian_eigenvalues(&m).last().unwrap_or(&0.0);
        let norm = self.h_d.norm_squared() / bd;
        if norm > 0.0 {
            lam / norm
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Unit vector along `h_I` (first axis if `h_I = 0`).
    pub fn idle_direction(&self) -> CVec {
        let nrm = self.h_i.norm();
        if nrm > 0.0 {
            self.h_i.unscale(nrm)
        } else {
            let mut e = CVec::zeros(self.n);
            e[0] = c(1.0, 0.0);
            e
        }
    }

    pub fn check(&self) -> Result<()> {
        let finite = linalg::is_finite_vec(&self.h_d)
            && linalg::is_finite_vec(&self.h_i)
            && linalg::is_finite_vec(&self.g_u)
            && linalg::is_finite_mat(&self.h_si)
            && self.c_d.is_finite()
            && self.c_i.is_finite()
            && self.energy_req.is_finite();
        if finite {
            Ok(())
        } else {
            Err(Error::contract("non-finite channel data"))
        }
    }
}
