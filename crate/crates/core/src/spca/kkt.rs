//! KKT residual of the slack-form problem at a candidate point.

use super::instance::Instance;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::subsolver::{ConstraintTag, Dual, Slack};

/// Value, gradient over `[coords(S), coords(V), slacks]` and a magnitude
/// for relative violations.
struct Term {
    value: f64,
    grad: Vec<f64>,
    scale: f64,
}

struct Layout {
    nn: usize,
}

impl Layout {
    fn len(&self) -> usize {
        2 * self.nn + 6
    }

    fn slack(&self, k: Slack) -> usize {
        2 * self.nn + k.index()
    }

    fn add_s(&self, g: &mut [f64], a: &CMat, w: f64) {
        for (k, x) in linalg::trace_functional_coords(a).into_iter().enumerate() {
            g[k] += w * x;
        }
    }

    fn add_v(&self, g: &mut [f64], a: &CMat, w: f64) {
        for (k, x) in linalg::trace_functional_coords(a).into_iter().enumerate() {
            g[self.nn + k] += w * x;
        }
    }
}

/// True (un-linearized) constraint `tag` as `value ≥ 0`.
fn term(inst: &Instance, lay: &Layout, tag: ConstraintTag, s: &CMat, v: &CMat, sl: &[f64; 6]) -> Result<Term> {
    let m = s + v;
    let a_d = linalg::outer(&inst.h_d);
    let a_i = linalg::outer(&inst.h_i);
    let mut grad = vec![0.0; lay.len()];
    let e = |k: Slack| sl[k.index()].exp();
    let (value, scale) = match tag {
        ConstraintTag::DownlinkReceivedPower => {
            let b = inst.a_d(&m) + inst.c_d;
            lay.add_s(&mut grad, &a_d, 1.0);
            lay.add_v(&mut grad, &a_d, 1.0);
            grad[lay.slack(Slack::XD)] = -e(Slack::XD);
            (b - e(Slack::XD), b)
        }
        ConstraintTag::DownlinkInterferenceLinearized => {
            let b = inst.a_d(v) + inst.c_d;
            lay.add_v(&mut grad, &a_d, -1.0);
            grad[lay.slack(Slack::YD)] = e(Slack::YD);
            (e(Slack::YD) - b, b)
        }
        ConstraintTag::EveReceivedPowerLinearized => {
            let b = inst.a_i(&m) + inst.c_i;
            lay.add_s(&mut grad, &a_i, -1.0);
            lay.add_v(&mut grad, &a_i, -1.0);
            grad[lay.slack(Slack::XI)] = e(Slack::XI);
            (e(Slack::XI) - b, b)
        }
        ConstraintTag::EveDownlinkInterference => {
            let b = inst.a_i(v) + inst.c_i;
            lay.add_v(&mut grad, &a_i, 1.0);
            grad[lay.slack(Slack::YI)] = -e(Slack::YI);
            (b - e(Slack::YI), b)
        }
        ConstraintTag::DownlinkSecrecyNonnegative => {
            for (k, w) in [(Slack::XD, 1.0), (Slack::YD, -1.0), (Slack::XI, -1.0), (Slack::YI, 1.0)] {
                grad[lay.slack(k)] = w;
            }
            let val = sl[0] - sl[1] - sl[2] + sl[3];
            (val, sl[..4].iter().fold(1.0f64, |a, x| a.max(x.abs())))
        }
        ConstraintTag::UplinkSinrLinearized => {
            let (g, z) = inst.uplink(&m)?;
            let q = inst.h_si.adjoint() * z;
            let qq = linalg::outer(&q);
            lay.add_s(&mut grad, &qq, -inst.p_u);
            lay.add_v(&mut grad, &qq, -inst.p_u);
            grad[lay.slack(Slack::TU)] = -e(Slack::TU);
            (1.0 + g - e(Slack::TU), 1.0 + g)
        }
        ConstraintTag::EveUplinkInterference => {
            let b = inst.a_i(&m) + 1.0;
            lay.add_s(&mut grad, &a_i, 1.0);
            lay.add_v(&mut grad, &a_i, 1.0);
            grad[lay.slack(Slack::YU)] = -e(Slack::YU);
            (b - e(Slack::YU), b)
        }
        ConstraintTag::UplinkSecrecyNonnegative => {
            for (k, w) in [(Slack::TU, 1.0), (Slack::XI, -1.0), (Slack::YU, 1.0)] {
                grad[lay.slack(k)] = w;
            }
            let val = sl[4] - sl[2] + sl[5];
            (val, [sl[2], sl[4], sl[5]].iter().fold(1.0f64, |a, x| a.max(x.abs())))
        }
        ConstraintTag::PowerBudget => {
            let n = inst.n;
            for d in 0..n {
                grad[d] = -1.0;
                grad[lay.nn + d] = -1.0;
            }
            (inst.p_bs - linalg::trace_re(&m), inst.p_bs)
        }
        ConstraintTag::EnergyHarvesting => {
            lay.add_s(&mut grad, &a_i, 1.0);
            lay.add_v(&mut grad, &a_i, 1.0);
            let a = inst.a_i(&m);
            (a - inst.energy_req, a.abs().max(inst.energy_req.abs()).max(1.0))
        }
        ConstraintTag::InformationPsd | ConstraintTag::ArtificialNoisePsd => {
            return Err(Error::contract("cone constraints carry matrix duals"));
        }
    };
    Ok(Term { value, grad, scale })
}

/// `max(stationarity, complementarity, primal violation)`, each relative.
///
/// `sl` are normalized slacks; the objective covers the secrecy branches
/// whose nonnegativity constraints appear in `duals`.
pub(crate) fn residual(inst: &Instance, s: &CMat, v: &CMat, sl: &[f64; 6], duals: &[(ConstraintTag, Dual)]) -> Result<f64> {
    if duals.is_empty() {
        return Err(Error::UnavailableDuals("no multipliers supplied".into()));
    }
    let has = |t: ConstraintTag| duals.iter().any(|(k, _)| *k == t);
    let br = super::Branches {
        downlink: has(ConstraintTag::DownlinkSecrecyNonnegative),
        uplink: has(ConstraintTag::UplinkSecrecyNonnegative),
    };
    let nn = inst.n * inst.n;
    let lay = Layout { nn };
    let coef = Instance::objective_coefficients(br);
    let mut r = vec![0.0; lay.len()];
    for k in Slack::ALL {
        r[lay.slack(k)] = coef[k.index()];
    }
    let mut scale = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let obj = Instance::objective(sl, br);
    let mut comp: f64 = 0.0;
    let mut feas: f64 = 0.0;
    for (tag, dual) in duals {
        match dual {
            Dual::Scalar(lam) => {
                let t = term(inst, &lay, *tag, s, v, sl)?;
                if *lam < 0.0 {
                    feas = feas.max(-lam);
                }
                for (ri, gi) in r.iter_mut().zip(&t.grad) {
                    *ri += lam * gi;
                    scale = scale.max((lam * gi).abs());
                }
                comp = comp.max((lam * t.value).abs());
                feas = feas.max((-t.value).max(0.0) / t.scale);
            }
            Dual::Matrix(z) => {
                if z.nrows() != inst.n {
                    return Err(Error::contract(format!(
                        "cone multiplier has order {}, expected {}",
                        z.nrows(),
                        inst.n
                    )));
                }
                let (target, off) = match tag {
                    ConstraintTag::InformationPsd => (s, 0),
                    ConstraintTag::ArtificialNoisePsd => (v, nn),
                    _ => return Err(Error::contract("matrix multiplier on a scalar constraint")),
                };
                for (k, x) in linalg::trace_functional_coords(z).into_iter().enumerate() {
                    r[off + k] += x;
                    scale = scale.max(x.abs());
                }
                comp = comp.max((z * target).trace().re.abs());
                let zmin = linalg::min_eigenvalue(z);
                let znorm = linalg::frobenius(z).max(1e-300);
                feas = feas.max((-zmin).max(0.0) / znorm);
                let tr = linalg::trace_re(target).abs().max(1e-300);
                feas = feas.max((-linalg::min_eigenvalue(target)).max(0.0) / tr);
            }
        }
    }
    let stat = r.iter().fold(0.0f64, |a, x| a.max(x.abs())) / scale.max(1e-300);
    let comp = comp / obj.abs().max(1.0);
    Ok(stat.max(comp).max(feas))
}

