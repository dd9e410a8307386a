//! Fast invariant checks run by `fdsec selftest`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Result;
use crate::harness::{derive_seed, gen_channels};
use crate::linalg::{self, c, CMat};
use crate::model::{self, SystemConfig, TransmitDesign};
use crate::receiver;
use crate::spca::{self, Faults, LinearizationPoint, SpcaOptions};
use crate::subsolver;

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Test-only fault switches threaded into the checks.
    #[doc(hidden)]
    pub faults: Faults,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub detail: String,
    pub seconds: f64,
}

pub const GROUPS: [&str; 4] = ["tangent-bounds", "receiver-consistency", "real-embedding", "scalar-oracle"];

pub fn run(opts: &SelftestOptions) -> Vec<GroupReport> {
    let groups: [(&'static str, GroupFn); 4] = [
        (GROUPS[0], tangent_bounds),
        (GROUPS[1], receiver_consistency),
        (GROUPS[2], real_embedding),
        (GROUPS[3], scalar_oracle),
    ];
    groups
        .into_iter()
        .map(|(name, f)| {
            let t0 = Instant::now();
            let (passed, checks, detail) = match f(opts) {
                Ok(Check { failures, checks, worst }) => (failures == 0, checks, worst),
                Err(e) => (false, 0, format!("error: {e}")),
            };
            GroupReport {
                name,
                passed,
                checks,
                detail,
                seconds: t0.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

type GroupFn = fn(&SelftestOptions) -> Result<Check>;

#[derive(Default)]
struct Check {
    failures: usize,
    checks: usize,
    worst: String,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            if self.failures == 0 {
                self.worst = what();
            }
            self.failures += 1;
        }
    }
}

fn rng(opts: &SelftestOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, salt))
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, trace: f64) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let m = &a * a.adjoint();
    let t = linalg::trace_re(&m);
    linalg::hermitian_part(&m.scale(trace / t)).0
}

fn random_design(rng: &mut ChaCha8Rng, cfg: &SystemConfig) -> Result<TransmitDesign> {
    let split: f64 = rng.gen_range(0.05..0.95);
    let total: f64 = rng.gen_range(0.1..1.0) * cfg.p_bs;
    TransmitDesign::new(
        random_psd(rng, cfg.n_tx, split * total),
        random_psd(rng, cfg.n_tx, (1.0 - split) * total),
    )
}

fn tangent_bounds(opts: &SelftestOptions) -> Result<Check> {
    let mut out = Check::default();
    let mut r = rng(opts, 1);
    for _ in 0..10_000 {
        let y: f64 = r.gen_range(-30.0..30.0);
        let ys: f64 = r.gen_range(-30.0..30.0);
        let bound = spca::exp_tangent(y, ys);
        out.expect(bound <= y.exp() * (1.0 + 1e-12), || format!("exp tangent {bound:e} > e^{y}"));
        let at = spca::exp_tangent(ys, ys);
        out.expect((at - ys.exp()).abs() <= 1e-12 * ys.exp(), || format!("exp tangent not tight at {ys}"));
    }
    let cfg = SystemConfig::default();
    for k in 0..100 {
        let ch = gen_channels(&cfg, derive_seed(opts.seed, 1000 + k));
        let d0 = random_design(&mut r, &cfg)?;
        let d1 = random_design(&mut r, &cfg)?;
        let lp = LinearizationPoint::new(&ch, &d0, &cfg)?;
        let x1 = receiver::interference_covariance(&ch, &d1, &cfg);
        let truth = spca::uplink_sinr_of_covariance(&x1, &ch, &cfg)?;
        let bound = spca::g_linearization_with(&x1, &lp, &ch, &cfg, opts.faults)?;
        out.expect(bound <= truth * (1.0 + 1e-12), || {
            format!("uplink SINR bound {bound:e} exceeds true value {truth:e}")
        });
        let at = spca::g_linearization_with(&lp.x_u_star, &lp, &ch, &cfg, opts.faults)?;
        let t0 = spca::uplink_sinr_of_covariance(&lp.x_u_star, &ch, &cfg)?;
        out.expect((at - t0).abs() <= 1e-10 * t0.abs().max(1e-300), || {
            format!("uplink SINR bound not tight: {at:e} vs {t0:e}")
        });
    }
    Ok(out)
}

fn receiver_consistency(opts: &SelftestOptions) -> Result<Check> {
    let mut out = Check::default();
    let mut r = rng(opts, 2);
    let cfg = SystemConfig::default();
    for k in 0..200 {
        let ch = gen_channels(&cfg, derive_seed(opts.seed, 2000 + k));
        let d = random_design(&mut r, &cfg)?;
        let w = receiver::optimal_receiver(&ch, &d, &cfg)?;
        let direct = model::uplink_sinr_with_receiver(&ch, &d, &w.w, &cfg)?;
        let closed = receiver::uplink_sinr_closed_form(&ch, &d, &cfg)?;
        let rel = (direct - closed).abs() / closed.abs().max(1e-300);
        out.expect(rel < 1e-8, || format!("receiver SINR mismatch, relative error {rel:e}"));
    }
    Ok(out)
}

fn real_embedding(opts: &SelftestOptions) -> Result<Check> {
    let mut out = Check::default();
    let mut r = rng(opts, 3);
    for n in 1..=6 {
        for _ in 0..20 {
            let a = random_psd(&mut r, n, 1.0) - random_psd(&mut r, n, 1.0);
            let emb = subsolver::real_embedding(&a)?;
            let back = subsolver::from_real_embedding(&emb)?;
            let err = linalg::frobenius(&(&back - &a));
            out.expect(err <= 1e-14, || format!("embedding round trip error {err:e}"));
            let mut ev: Vec<f64> = emb.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            let herm = linalg::hermitian_eigenvalues(&a);
            let worst = herm
                .iter()
                .enumerate()
                .map(|(k, x)| (ev[2 * k] - x).abs().max((ev[2 * k + 1] - x).abs()))
                .fold(0.0, f64::max);
            out.expect(worst <= 1e-12, || format!("embedding spectrum mismatch {worst:e}"));
        }
    }
    Ok(out)
}

/// Grid search over `(S, V)` for single-antenna instances.
pub fn scalar_grid_optimum(ch: &model::ChannelSet, cfg: &SystemConfig, steps: usize) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            let s = cfg.p_bs * i as f64 / steps as f64;
            let v = cfg.p_bs * j as f64 / steps as f64;
            let d = TransmitDesign::new(CMat::from_element(1, 1, c(s, 0.0)), CMat::from_element(1, 1, c(v, 0.0)))?;
            if model::harvested_energy(ch, &d, cfg)? < cfg.e_min {
                continue;
            }
            let g_d = model::downlink_sinr(ch, &d, cfg)?;
            let g_id = model::eve_downlink_sinr(ch, &d, cfg)?;
            let g_u = receiver::uplink_sinr_closed_form(ch, &d, cfg)?;
            let g_iu = model::eve_uplink_sinr(ch, &d, cfg)?;
            let (rd, ru) = model::secrecy_rates(g_d, g_id, g_u, g_iu)?;
            best = best.max(rd + ru);
        }
    }
    Ok(best)
}

fn scalar_oracle(opts: &SelftestOptions) -> Result<Check> {
    let mut out = Check::default();
    let cfg = SystemConfig {
        n_tx: 1,
        n_rx: 1,
        sigma_si2: 1e-8,
        ..SystemConfig::default()
    };
    let mut k = 0;
    let mut tried = 0;
    while k < 3 && tried < 50 {
        let ch = gen_channels(&cfg, derive_seed(opts.seed, 3000 + tried));
        tried += 1;
        if !model::is_feasible(&ch, &cfg) {
            continue;
        }
        k += 1;
        let oracle = scalar_grid_optimum(&ch, &cfg, 200)?;
        let got = spca::spca_solve_with(&ch, &cfg, &SpcaOptions::default(), opts.faults)?.report.r_sum;
        out.expect(got <= oracle + 0.02 && got >= oracle - 0.05, || {
            format!("scalar instance: SPCA {got:.4} vs grid {oracle:.4}")
        });
    }
    out.expect(k == 3, || "too few feasible scalar instances".into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_groups_pass() {
        for g in run(&SelftestOptions::default()) {
            assert!(g.passed, "{} failed: {}", g.name, g.detail);
            assert!(g.checks > 0);
        }
    }

    #[test]
    fn flipped_trace_sign_is_caught() {
        let opts = SelftestOptions {
            faults: Faults { flip_g_trace_sign: true },
            ..SelftestOptions::default()
        };
        let rep = run(&opts);
        let tb = rep.iter().find(|g| g.name == "tangent-bounds").unwrap();
        assert!(!tb.passed);
    }
}
