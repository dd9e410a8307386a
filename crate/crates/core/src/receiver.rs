//! Optimal uplink combining at the base station.
//!
//! For fixed transmit covariances the uplink is a SIMO channel with
//! coloured interference `X_U = σ² I + H_SI (S+V) H_SIᴴ`, so the
//! SINR-maximizing unit combiner is the whitened matched filter
//! `X_U⁻¹ g_U / ‖X_U⁻¹ g_U‖` and the resulting SINR is `P_U g_Uᴴ X_U⁻¹ g_U`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::{ChannelSet, SystemConfig, TransmitDesign};

/// Above this condition number `X_U` gets a tiny ridge before solving.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveVector {
    pub w: CVec,
    /// Set when `X_U` was ill-conditioned and a `1e-12·σ²` ridge was added.
    pub ridge_applied: bool,
}

/// `X_U = σ² I + H_SI (S+V) H_SIᴴ`.
pub fn interference_covariance(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> CMat {
    let h = &ch.h_si;
    let x = CMat::identity(cfg.n_rx, cfg.n_rx).scale(cfg.sigma_z2) + h * d.total() * h.adjoint();
    linalg::hermitian_part(&x).0
}

/// Solves `X_U z = g_U`, guarding against ill-conditioning.
fn whitened(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<(CVec, bool)> {
    ch.validate(cfg)?;
    d.check_dims(cfg)?;
    let mut x = interference_covariance(ch, d, cfg);
    let eig = linalg::hermitian_eigenvalues(&x);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    let ridge = lo <= 0.0 || hi / lo > CONDITION_LIMIT;
    if ridge {
        for i in 0..cfg.n_rx {
            x[(i, i)] += linalg::c(1e-12 * cfg.sigma_z2, 0.0);
        }
    }
    let chol = linalg::cholesky(&x)?;
    let z = chol.solve(&ch.g_u);
    if !linalg::is_finite_vec(&z) {
        return Err(Error::numerical("non-finite solution of X_U z = g_U"));
    }
    Ok((z, ridge))
}

/// The unit-norm receive vector maximizing the uplink SINR.
pub fn optimal_receiver(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<ReceiveVector> {
    if ch.g_u.norm() == 0.0 {
        return Err(Error::DegenerateChannel("uplink channel g_U is zero".into()));
    }
    let (z, ridge_applied) = whitened(ch, d, cfg)?;
    let norm = z.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::numerical("X_U⁻¹ g_U has zero or non-finite norm"));
    }
    Ok(ReceiveVector {
        w: linalg::canonical_phase(&z.unscale(norm)),
        ridge_applied,
    })
}

/// `P_U g_Uᴴ X_U⁻¹ g_U`, the uplink SINR under optimal combining.
pub fn uplink_sinr_closed_form(ch: &ChannelSet, d: &TransmitDesign, cfg: &SystemConfig) -> Result<f64> {
    if ch.g_u.norm() == 0.0 {
        return Err(Error::DegenerateChannel("uplink channel g_U is zero".into()));
    }
    let (z, _) = whitened(ch, d, cfg)?;
    Ok(cfg.p_u * ch.g_u.dotc(&z).re)
}
