//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed.
//! Criteria listed in `KNOWN_FAILURES` are reported but do not fail the
//! run; every other criterion must pass.

use std::process::Command;
use std::time::Instant;

use fd_secrecy::baselines::Scheme;
use fd_secrecy::harness::{self, derive_seed, gen_channels, SweepParam, SweepSpec};
use fd_secrecy::linalg::{c, CMat, CVec};
use fd_secrecy::model::{self, ChannelSet, SystemConfig, TransmitDesign};
use fd_secrecy::receiver;
use fd_secrecy::spca::{self, LinearizationPoint, SpcaOptions, TerminationReason};
use fd_secrecy::subsolver::{self, SolveStatus, SolverOptions, SubproblemPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const KNOWN_FAILURES: &[usize] = &[4, 7];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn main() {
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let criteria: [(usize, &str, fn() -> Verdict); 10] = [
        (1, "receiver consistency", c1_receiver_consistency),
        (2, "conservative bounds", c2_conservative_bounds),
        (3, "gradient check", c3_gradient_check),
        (4, "monotone SPCA", c4_monotone_spca),
        (5, "scalar oracle", c5_scalar_oracle),
        (6, "SI sweep trend", c6_si_sweep),
        (7, "energy sweep trend and gain", c7_energy_sweep),
        (8, "subsolver self-validation", c8_subsolver_validation),
        (9, "feasibility gate", c9_feasibility_gate),
        (10, "sweep determinism", c10_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        if filter.is_some_and(|k| k != id) {
            continue;
        }
        let t0 = Instant::now();
        let v = f();
        let secs = t0.elapsed().as_secs_f64();
        let tag = match (v.pass, KNOWN_FAILURES.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag:<12} {name} [{secs:.1}s]: {}", v.detail);
        if !v.pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- helpers

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cn(r: &mut ChaCha8Rng) -> fd_secrecy::linalg::C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    c(re, im)
}

fn random_psd(r: &mut ChaCha8Rng, n: usize, trace: f64) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| cn(r));
    let m = &a * a.adjoint();
    let m = (&m + m.adjoint()).scale(0.5);
    let t = m.trace().re;
    m.scale(trace / t)
}

fn random_pd(r: &mut ChaCha8Rng, n: usize) -> CMat {
    random_psd(r, n, n as f64) + CMat::identity(n, n).scale(r.gen_range(0.01..1.0))
}

fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| cn(r));
    (&a + a.adjoint()).scale(0.5)
}

fn random_design(r: &mut ChaCha8Rng, cfg: &SystemConfig) -> TransmitDesign {
    let split: f64 = r.gen_range(0.0..1.0);
    let total = r.gen_range(0.05..1.0) * cfg.p_bs;
    TransmitDesign::new(random_psd(r, cfg.n_tx, split * total), random_psd(r, cfg.n_tx, (1.0 - split) * total))
        .expect("valid design")
}

fn quad(h: &CVec, m: &CMat) -> f64 {
    h.dotc(&(m * h)).re
}

/// `P gᴴ X⁻¹ g` through an explicit inverse.
fn inv_quad(p: f64, g: &CVec, x: &CMat) -> f64 {
    let inv = x.clone().try_inverse().expect("invertible");
    p * g.dotc(&(inv * g)).re
}

fn min_eig(m: &CMat) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn x_u(ch: &ChannelSet, s: &CMat, v: &CMat, cfg: &SystemConfig) -> CMat {
    CMat::identity(cfg.n_rx, cfg.n_rx).scale(cfg.sigma_z2) + &ch.h_si * (s + v) * ch.h_si.adjoint()
}

fn feasible_instances(cfg: &SystemConfig, master: u64, count: usize) -> Vec<ChannelSet> {
    (0..)
        .map(|k| gen_channels(cfg, derive_seed(master, k)))
        .filter(|ch| model::is_feasible(ch, cfg))
        .take(count)
        .collect()
}

// ---------------------------------------------------------------- 1

fn c1_receiver_consistency() -> Verdict {
    let cfg = SystemConfig::default();
    let mut r = rng(101);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let ch = gen_channels(&cfg, derive_seed(1, k));
        let d = random_design(&mut r, &cfg);
        let w = receiver::optimal_receiver(&ch, &d, &cfg).expect("receiver");
        let direct = model::uplink_sinr_with_receiver(&ch, &d, &w.w, &cfg).expect("sinr");
        let closed = receiver::uplink_sinr_closed_form(&ch, &d, &cfg).expect("closed form");
        worst = worst.max((direct - closed).abs() / closed.abs());
    }
    verdict(worst < 1e-8, format!("1000 instances, worst relative error {worst:.2e} (< 1e-8)"))
}

// ---------------------------------------------------------------- 2

fn c2_conservative_bounds() -> Verdict {
    let mut r = rng(202);
    let mut exp_viol = 0usize;
    let mut exp_tan = 0.0f64;
    for _ in 0..100_000 {
        let y: f64 = r.gen_range(-40.0..40.0);
        let ys: f64 = r.gen_range(-40.0..40.0);
        if spca::exp_tangent(y, ys) > y.exp() * (1.0 + 1e-12) {
            exp_viol += 1;
        }
        exp_tan = exp_tan.max((spca::exp_tangent(ys, ys) - ys.exp()).abs() / ys.exp());
    }
    let cfg = SystemConfig::default();
    let mut g_viol = 0usize;
    let mut g_tan = 0.0f64;
    for k in 0..1000 {
        let ch = gen_channels(&cfg, derive_seed(2, k));
        let x = random_pd(&mut r, cfg.n_rx).scale(cfg.sigma_z2);
        let xs = random_pd(&mut r, cfg.n_rx).scale(cfg.sigma_z2);
        let lp = LinearizationPoint {
            s_star: CMat::zeros(cfg.n_tx, cfg.n_tx),
            v_star: CMat::zeros(cfg.n_tx, cfg.n_tx),
            y_d_star: 0.0,
            x_i_star: 0.0,
            x_u_star: xs.clone(),
        };
        let truth = inv_quad(cfg.p_u, &ch.g_u, &x);
        let bound = spca::g_linearization(&x, &lp, &ch, &cfg).expect("bound");
        if bound > truth * (1.0 + 1e-12) {
            g_viol += 1;
        }
        let at = spca::g_linearization(&xs, &lp, &ch, &cfg).expect("bound");
        let t0 = inv_quad(cfg.p_u, &ch.g_u, &xs);
        g_tan = g_tan.max((at - t0).abs() / t0);
    }
    verdict(
        exp_viol == 0 && g_viol == 0 && exp_tan <= 1e-10 && g_tan <= 1e-10,
        format!(
            "exp: {exp_viol}/100000 violations, tangency {exp_tan:.1e}; uplink SINR: {g_viol}/1000 violations, tangency {g_tan:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- 3

fn c3_gradient_check() -> Verdict {
    let cfg = SystemConfig::default();
    let mut r = rng(303);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let ch = gen_channels(&cfg, derive_seed(3, k));
        let d = random_design(&mut r, &cfg);
        let lp = LinearizationPoint::new(&ch, &d, &cfg).expect("point");
        let xs = lp.x_u_star.clone();
        let lam = min_eig(&xs);
        let dir = random_hermitian(&mut r, cfg.n_rx);
        let dir = dir.scale(0.1 * lam / dir.norm());
        let g0 = spca::g_linearization(&xs, &lp, &ch, &cfg).expect("bound");
        let trace_term = g0 - spca::g_linearization(&(&xs + &dir), &lp, &ch, &cfg).expect("bound");
        let h = 1e-3;
        let fd = (inv_quad(cfg.p_u, &ch.g_u, &(&xs + dir.scale(h))) - inv_quad(cfg.p_u, &ch.g_u, &(&xs - dir.scale(h))))
            / (2.0 * h);
        worst = worst.max((trace_term + fd).abs() / fd.abs());
    }
    verdict(worst < 1e-5, format!("20 directions, worst relative error {worst:.2e} (< 1e-5)"))
}

// ---------------------------------------------------------------- 4

fn c4_monotone_spca() -> Verdict {
    let cfg = SystemConfig::default();
    let opts = SpcaOptions::default();
    let mut drops = 0usize;
    let mut worst_drop = 0.0f64;
    let mut unconverged = 0usize;
    let mut constraint_worst = 0.0f64;
    let mut kkt = Vec::new();
    let mut errors = 0usize;
    for ch in feasible_instances(&cfg, 4, 100) {
        let out = match spca::spca_solve(&ch, &cfg, &opts) {
            Ok(o) => o,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        for w in out.trace.objectives().windows(2) {
            if w[1] < w[0] - 1e-7 {
                drops += 1;
                worst_drop = worst_drop.max(w[0] - w[1]);
            }
        }
        let finished = out.trace.iterations() <= 50
            && matches!(
                out.trace.termination,
                TerminationReason::Converged | TerminationReason::NoSecrecyAttainable
            );
        if !finished {
            unconverged += 1;
        }
        let power = (out.design.total_power() - cfg.p_bs) / cfg.p_bs;
        let energy = (cfg.e_min - out.report.energy) / cfg.e_min;
        constraint_worst = constraint_worst.max(power).max(energy);
        kkt.push(out.kkt_residual);
    }
    kkt.sort_by(f64::total_cmp);
    let kkt_ok = kkt.iter().filter(|&&x| x < 1e-4).count();
    let kkt_max = kkt.last().copied().unwrap_or(f64::NAN);
    let kkt_med = kkt.get(kkt.len() / 2).copied().unwrap_or(f64::NAN);
    let pass = errors == 0 && drops == 0 && unconverged <= 1 && constraint_worst <= 1e-8 && kkt_ok == kkt.len();
    verdict(
        pass,
        format!(
            "{errors} errors; {drops} drops (worst {worst_drop:.1e}); {unconverged}/100 not terminated within 50 iterations (<= 1); \
             power/energy worst {constraint_worst:.1e} (<= 1e-8); KKT < 1e-4 on {kkt_ok}/{} (median {kkt_med:.1e}, max {kkt_max:.1e})",
            kkt.len()
        ),
    )
}

// ---------------------------------------------------------------- 5

/// Sum secrecy rate of a single-antenna design, written out by hand.
fn scalar_rate(ch: &ChannelSet, cfg: &SystemConfig, s: f64, v: f64) -> f64 {
    let n = cfg.sigma_z2;
    let hd = ch.h_d[0].norm_sqr();
    let hi = ch.h_i[0].norm_sqr();
    let cd = cfg.p_u * ch.g_d.norm_sqr() + n;
    let ci = cfg.p_u * ch.g_i.norm_sqr() + n;
    let x_d = (hd * (s + v) + cd).ln();
    let y_d = (hd * v + cd).ln();
    let x_i = (hi * (s + v) + ci).ln();
    let y_i = (hi * v + ci).ln();
    let t_u = (1.0 + cfg.p_u * ch.g_u[0].norm_sqr() / (n + ch.h_si[(0, 0)].norm_sqr() * (s + v))).ln();
    let y_u = (hi * (s + v) + n).ln();
    let down = (x_d - y_d - x_i + y_i).max(0.0);
    let up = (t_u - x_i + y_u).max(0.0);
    (down + up) * std::f64::consts::LOG2_E
}

fn scalar_oracle(ch: &ChannelSet, cfg: &SystemConfig) -> f64 {
    let k = 400;
    let step = cfg.p_bs / (k - 1) as f64;
    let hi = ch.h_i[0].norm_sqr();
    let mut best = f64::NEG_INFINITY;
    for i in 0..k {
        for j in 0..k {
            let (s, v) = (i as f64 * step, j as f64 * step);
            if s + v > cfg.p_bs * (1.0 + 1e-12) {
                continue;
            }
            if cfg.zeta * (hi * (s + v) + cfg.p_u * ch.g_i.norm_sqr()) < cfg.e_min {
                continue;
            }
            best = best.max(scalar_rate(ch, cfg, s, v));
        }
    }
    best
}

fn c5_scalar_oracle() -> Verdict {
    let cfg = SystemConfig {
        n_tx: 1,
        n_rx: 1,
        sigma_si2: 1e-8,
        ..SystemConfig::default()
    };
    let mut within = 0usize;
    let mut overshoot = 0usize;
    let mut worst_short = 0.0f64;
    let mut worst_over = f64::NEG_INFINITY;
    let mut errors = 0usize;
    let instances = feasible_instances(&cfg, 5, 50);
    for ch in &instances {
        let oracle = scalar_oracle(ch, &cfg);
        let got = match spca::spca_solve(ch, &cfg, &SpcaOptions::default()) {
            Ok(o) => o.report.r_sum,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        let diff = got - oracle;
        worst_over = worst_over.max(diff);
        worst_short = worst_short.max(-diff);
        if diff > 0.01 {
            overshoot += 1;
        } else if diff >= -0.02 {
            within += 1;
        }
    }
    let n = instances.len();
    verdict(
        errors == 0 && overshoot == 0 && within * 10 >= n * 9,
        format!(
            "{within}/{n} within [-0.02, +0.01] bits (>= 90%), {overshoot} overshoots, {errors} errors; \
             largest shortfall {worst_short:.4}, largest excess {worst_over:.4}"
        ),
    )
}

// ---------------------------------------------------------------- 6, 7

fn sweep(param: SweepParam, base: SystemConfig, seed: u64) -> harness::SweepResult {
    let spec = SweepSpec {
        param,
        grid: param.default_grid(),
        trials: 200,
        schemes: Scheme::ALL.to_vec(),
        base,
        seed,
        threads: None,
        spca: SpcaOptions::default(),
    };
    harness::sweep(&spec).expect("sweep runs")
}

fn c6_si_sweep() -> Verdict {
    let res = sweep(SweepParam::SigmaSi2Db, SystemConfig::default(), 6);
    let fd = res.series(Scheme::FullDuplex);
    let mut bumps = Vec::new();
    for w in fd.windows(2) {
        let tol = w[0].stderr.max(w[1].stderr);
        if !(w[1].mean_rate <= w[0].mean_rate + tol) {
            bumps.push(format!("{} -> {} dB", w[0].value, w[1].value));
        }
    }
    let constant = |k: Scheme| {
        let s = res.series(k);
        s.windows(2).all(|w| w[0].mean_rate.to_bits() == w[1].mean_rate.to_bits())
    };
    let hd_const = constant(Scheme::HalfDuplex);
    let pfd_const = constant(Scheme::PerfectFd);
    let failed: usize = res.points.iter().map(|p| p.n_failed).sum();
    let means: Vec<String> = fd.iter().map(|p| format!("{:.3}", p.mean_rate)).collect();
    verdict(
        bumps.is_empty() && hd_const && pfd_const && failed == 0,
        format!(
            "FD means [{}], increases beyond 1 s.e.: {bumps:?}; HD constant {hd_const}, perfect-FD constant {pfd_const}; {failed} failed solves",
            means.join(", ")
        ),
    )
}

fn c7_energy_sweep() -> Verdict {
    let base = SystemConfig {
        sigma_si2: 1e-6,
        ..SystemConfig::default()
    };
    let res = sweep(SweepParam::EMinW, base, 7);
    let mut bumps = Vec::new();
    for k in Scheme::ALL {
        for w in res.series(k).windows(2) {
            if !(w[1].mean_rate <= w[0].mean_rate) {
                bumps.push(format!("{k} {:.1e}->{:.1e}", w[0].value, w[1].value));
            }
        }
    }
    let fd = res.series(Scheme::FullDuplex);
    let hd = res.series(Scheme::HalfDuplex);
    let ratios: Vec<f64> = fd.iter().zip(&hd).map(|(a, b)| a.mean_rate / b.mean_rate).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let failed: usize = res.points.iter().map(|p| p.n_failed).sum();
    let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.2}")).collect();
    verdict(
        bumps.is_empty() && min_ratio >= 1.3 && failed == 0,
        format!(
            "increases: {bumps:?}; FD/HD ratios [{}] (min {min_ratio:.3} >= 1.3); {failed} failed solves",
            shown.join(", ")
        ),
    )
}

// ---------------------------------------------------------------- 8

/// Independent re-check of one subproblem solution in absolute units.
/// Returns (largest scaled violation of the convex program, largest scaled
/// violation of the true non-convex constraints).
fn recheck(ch: &ChannelSet, cfg: &SystemConfig, lp: &LinearizationPoint, pt: &SubproblemPoint) -> (f64, f64) {
    let n = cfg.sigma_z2;
    let off = n.ln();
    let [x_d, y_d, x_i, y_i, t_u, y_u] = pt.slacks;
    let (x_d, y_d, x_i, y_i, y_u) = (x_d + off, y_d + off, x_i + off, y_i + off, y_u + off);
    let tot = &pt.s + &pt.v;
    let cd = cfg.p_u * ch.g_d.norm_sqr() + n;
    let ci = cfg.p_u * ch.g_i.norm_sqr() + n;
    let d_all = quad(&ch.h_d, &tot) + cd;
    let d_int = quad(&ch.h_d, &pt.v) + cd;
    let i_all = quad(&ch.h_i, &tot) + ci;
    let i_int = quad(&ch.h_i, &pt.v) + ci;
    let xu = x_u(ch, &pt.s, &pt.v, cfg);
    let z = lp.x_u_star.clone().try_inverse().expect("invertible") * &ch.g_u;
    let g0 = cfg.p_u * ch.g_u.dotc(&z).re;
    let big_g = g0 - cfg.p_u * z.dotc(&((&xu - &lp.x_u_star) * &z)).re;
    // (lhs, rhs) pairs of lhs <= rhs
    let le = |lhs: f64, rhs: f64| ((lhs - rhs) / lhs.abs().max(rhs.abs()).max(1.0)).max(0.0);
    let le_pow = |lhs: f64, rhs: f64| ((lhs - rhs) / lhs.abs().max(rhs.abs())).max(0.0);
    let convex = [
        le_pow(x_d.exp(), d_all),
        le_pow(d_int, spca::exp_tangent(y_d, lp.y_d_star)),
        le_pow(i_all, spca::exp_tangent(x_i, lp.x_i_star)),
        le_pow(y_i.exp(), i_int),
        le(0.0, x_d - y_d - x_i + y_i),
        le(t_u.exp() - 1.0, big_g),
        le_pow(y_u.exp(), quad(&ch.h_i, &tot) + n),
        le(0.0, t_u - x_i + y_u),
        le_pow(tot.trace().re, cfg.p_bs),
        le_pow(cfg.e_min, cfg.zeta * (quad(&ch.h_i, &tot) + cfg.p_u * ch.g_i.norm_sqr())),
        (-min_eig(&pt.s) / pt.s.trace().re.abs().max(1e-300)).max(0.0),
        (-min_eig(&pt.v) / pt.v.trace().re.abs().max(1e-300)).max(0.0),
    ];
    let truth = [
        le_pow(d_int, y_d.exp()),
        le_pow(i_all, x_i.exp()),
        le(t_u.exp() - 1.0, inv_quad(cfg.p_u, &ch.g_u, &xu)),
    ];
    (convex.into_iter().fold(0.0, f64::max), truth.into_iter().fold(0.0, f64::max))
}

fn c8_subsolver_validation() -> Verdict {
    let cfg = SystemConfig::default();
    let opts = SolverOptions::default();
    let mut optimal = 0usize;
    let mut other = 0usize;
    let mut worst_feas = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut worst_true = 0.0f64;
    let mut exceptions = 0usize;
    for ch in feasible_instances(&cfg, 8, 50) {
        let (mut d, mut lp) = match spca::init_feasible(&ch, &cfg) {
            Ok(x) => x,
            Err(_) => {
                exceptions += 1;
                continue;
            }
        };
        let mut warm: Option<SubproblemPoint> = None;
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..50 {
            let spec = spca::build_subproblem(&lp, &ch, &cfg).expect("spec");
            let sol = subsolver::solve(&spec, warm.as_ref(), &opts);
            if sol.status != SolveStatus::Optimal {
                other += 1;
                break;
            }
            optimal += 1;
            let (feas, truth) = recheck(&ch, &cfg, &lp, &sol.point);
            worst_feas = worst_feas.max(feas);
            worst_true = worst_true.max(truth);
            worst_gap = worst_gap.max(sol.duality_gap / sol.objective.abs().max(1.0));
            d = TransmitDesign::new(sol.point.s.clone(), sol.point.v.clone()).expect("design");
            lp = LinearizationPoint::new(&ch, &d, &cfg).expect("point");
            let done = (sol.objective - prev) <= 1e-3 * prev.abs().max(1e-9);
            prev = sol.objective;
            warm = Some(sol.point);
            if done {
                break;
            }
        }
        // the same checks on the records of the production pipeline
        match spca::spca_solve(&ch, &cfg, &SpcaOptions::default()) {
            Ok(out) => {
                for rec in out.trace.records.iter().filter(|r| r.status == SolveStatus::Optimal) {
                    worst_feas = worst_feas.max(rec.feasibility_violation);
                    worst_true = worst_true.max(rec.conservative_violation);
                    worst_gap = worst_gap.max(rec.duality_gap / rec.subproblem_objective.abs().max(1.0));
                    optimal += 1;
                }
            }
            Err(_) => exceptions += 1,
        }
        let _ = d;
    }
    verdict(
        exceptions == 0 && worst_feas < 1e-8 && worst_gap < 1e-7 && worst_true < 1e-8,
        format!(
            "{optimal} optimal solves ({other} non-optimal stops): worst re-check violation {worst_feas:.1e} (< 1e-8), \
             worst scaled gap {worst_gap:.1e} (< 1e-7), worst true-constraint violation {worst_true:.1e}; {exceptions} exceptions"
        ),
    )
}

// ---------------------------------------------------------------- 9

fn c9_feasibility_gate() -> Verdict {
    let base = SystemConfig::default();
    let mut agree = 0usize;
    let mut total = 0usize;
    let mut mismatches = Vec::new();
    for k in 0..125u64 {
        let ch = gen_channels(&base, derive_seed(9, k));
        let bound = model::energy_upper_bound(&ch, &base);
        for factor in [0.9, 0.999, 1.001, 1.1] {
            let cfg = SystemConfig {
                e_min: factor * bound,
                ..base.clone()
            };
            let spec = spca::feasibility_subproblem(&ch, &cfg).expect("spec");
            let p1 = subsolver::phase1(&spec).is_feasible();
            total += 1;
            if p1 == model::is_feasible(&ch, &cfg) {
                agree += 1;
            } else if mismatches.len() < 5 {
                mismatches.push(format!("trial {k} x{factor}"));
            }
        }
    }
    verdict(agree == total, format!("{agree}/{total} agree; mismatches {mismatches:?}"))
}

// ---------------------------------------------------------------- 10

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_fdsec"))
            .args(["sweep", "--param", "e_min_w", "--trials", "4", "--seed", "10", "--out"])
            .arg(&path)
            .output()
            .expect("run fdsec");
        (status.status.success(), std::fs::read(&path).unwrap_or_default())
    };
    let (ok_a, a) = run("a.csv");
    let (ok_b, b) = run("b.csv");
    verdict(
        ok_a && ok_b && !a.is_empty() && a == b,
        format!("two runs exit ok {ok_a}/{ok_b}, {} bytes each, identical {}", a.len(), a == b),
    )
}
