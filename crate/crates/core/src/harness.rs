//! Channel generation, Monte Carlo sweeps and CSV output.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, BaselineResult, Scheme};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, C64};
use crate::model::{self, db_to_linear, ChannelSet, HalfDuplexExtension, SystemConfig};
use crate::spca::SpcaOptions;

pub const CSV_HEADER: [&str; 8] = [
    "param",
    "value",
    "scheme",
    "mean_rate_bits",
    "stderr_bits",
    "n_ok",
    "n_infeasible",
    "n_failed",
];

fn cn(rng: &mut ChaCha8Rng, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(s * re, s * im)
}

fn cn_vec(rng: &mut ChaCha8Rng, n: usize, var: f64) -> CVec {
    CVec::from_iterator(n, (0..n).map(|_| cn(rng, var)))
}

/// Rayleigh channels for one trial. Draw order is fixed (`h_D`, `h_I`,
/// `g_D`, `g_I`, `g_U`, `H_SI` row-major, then the half-duplex extras), so
/// changing a variance never shifts the other draws.
pub fn gen_channels(cfg: &SystemConfig, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nt, nr) = (cfg.n_tx, cfg.n_rx);
    let idle = cfg.idle_gain();
    let other = cfg.other_gain();
    let h_d = cn_vec(&mut rng, nt, other);
    let h_i = cn_vec(&mut rng, nt, idle);
    let g_d = cn(&mut rng, other);
    let g_i = cn(&mut rng, other);
    let g_u = cn_vec(&mut rng, nr, other);
    let mut si = Vec::with_capacity(nr * nt);
    for _ in 0..nr * nt {
        si.push(cn(&mut rng, cfg.sigma_si2));
    }
    let h_si = CMat::from_row_slice(nr, nt, &si);
    let hd_extension = Some(HalfDuplexExtension {
        h_d_extra: cn_vec(&mut rng, nr, other),
        h_i_extra: cn_vec(&mut rng, nr, idle),
        g_u_extra: cn_vec(&mut rng, nt, other),
    });
    ChannelSet {
        h_d,
        h_i,
        g_d,
        g_i,
        g_u,
        h_si,
        hd_extension,
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial`. Every grid point reuses the same per-trial
/// seeds, so schemes and grid points are compared on common channels.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(master) ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok(BaselineResult),
    Infeasible,
    Failed(String),
}

/// Runs each scheme on the same channels. Infeasible instances are
/// reported as such for every scheme.
pub fn run_instance(ch: &ChannelSet, cfg: &SystemConfig, schemes: &[Scheme], opts: &SpcaOptions) -> Vec<(Scheme, Outcome)> {
    let feasible = ch.validate(cfg).is_ok() && model::is_feasible(ch, cfg);
    schemes
        .iter()
        .map(|&k| {
            if !feasible {
                return (k, Outcome::Infeasible);
            }
            let o = match baselines::solve_scheme(k, ch, cfg, opts) {
                Ok(r) => Outcome::Ok(r),
                Err(Error::Infeasible(_)) => Outcome::Infeasible,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (k, o)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    /// Self-interference variance in dB.
    #[serde(rename = "sigma_si2_db")]
    SigmaSi2Db,
    /// Energy requirement in W.
    #[serde(rename = "e_min_w")]
    EMinW,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::SigmaSi2Db => "sigma_si2_db",
            SweepParam::EMinW => "e_min_w",
        }
    }

    pub fn apply(self, base: &SystemConfig, value: f64) -> SystemConfig {
        let mut cfg = base.clone();
        match self {
            SweepParam::SigmaSi2Db => cfg.sigma_si2 = db_to_linear(value),
            SweepParam::EMinW => cfg.e_min = value,
        }
        cfg
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            SweepParam::SigmaSi2Db => (0..=6).map(|k| -100.0 + 10.0 * k as f64).collect(),
            SweepParam::EMinW => (1..=10).map(|k| 2e-4 * k as f64).collect(),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_si2_db" => Ok(SweepParam::SigmaSi2Db),
            "e_min_w" => Ok(SweepParam::EMinW),
            _ => Err(Error::Config(format!("unknown sweep parameter {s:?}; expected sigma_si2_db or e_min_w"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub base: SystemConfig,
    pub seed: u64,
    /// Worker thread cap; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub spca: SpcaOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("sweep grid has non-finite values".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("sweep grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        for &v in &self.grid {
            self.param.apply(&self.base, v).validate()?;
        }
        Ok(())
    }
}

/// Aggregate for one (grid value, scheme) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub value: f64,
    pub scheme: Scheme,
    /// Mean over feasible, successful trials; NaN when there are none.
    pub mean_rate: f64,
    pub stderr: f64,
    pub n_ok: usize,
    pub n_infeasible: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub param: SweepParam,
    /// Sorted by value, then scheme name.
    pub points: Vec<PointResult>,
}

impl SweepResult {
    pub fn get(&self, value: f64, scheme: Scheme) -> Option<&PointResult> {
        self.points.iter().find(|p| p.value == value && p.scheme == scheme)
    }

    /// Means for one scheme in grid order.
    pub fn series(&self, scheme: Scheme) -> Vec<&PointResult> {
        self.points.iter().filter(|p| p.scheme == scheme).collect()
    }
}

fn aggregate(value: f64, scheme: Scheme, outcomes: &[&Outcome]) -> PointResult {
    let rates: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match o {
            Outcome::Ok(r) => Some(r.sum_rate),
            _ => None,
        })
        .collect();
    let n = rates.len();
    let mean = if n > 0 { rates.iter().sum::<f64>() / n as f64 } else { f64::NAN };
    let stderr = if n > 1 {
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    PointResult {
        value,
        scheme,
        mean_rate: mean,
        stderr,
        n_ok: n,
        n_infeasible: outcomes.iter().filter(|o| matches!(o, Outcome::Infeasible)).count(),
        n_failed: outcomes.iter().filter(|o| matches!(o, Outcome::Failed(_))).count(),
    }
}

fn sort_points(points: &mut [PointResult]) {
    points.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.scheme.name().cmp(b.scheme.name())));
}

/// Runs every (grid value, trial) pair and aggregates per scheme.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.trials).map(move |t| (g, t)))
        .collect();
    let work = || -> Vec<Vec<(Scheme, Outcome)>> {
        jobs.par_iter()
            .map(|&(g, t)| {
                let cfg = spec.param.apply(&spec.base, spec.grid[g]);
                let ch = gen_channels(&cfg, derive_seed(spec.seed, t as u64));
                run_instance(&ch, &cfg, &spec.schemes, &spec.spca)
            })
            .collect()
    };
    let results = match spec.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut points = Vec::new();
    for (g, &value) in spec.grid.iter().enumerate() {
        let rows = &results[g * spec.trials..(g + 1) * spec.trials];
        for (si, &scheme) in spec.schemes.iter().enumerate() {
            let outs: Vec<&Outcome> = rows.iter().map(|r| &r[si].1).collect();
            points.push(aggregate(value, scheme, &outs));
        }
    }
    sort_points(&mut points);
    Ok(SweepResult {
        param: spec.param,
        points,
    })
}

fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

/// Writes the sweep as CSV, one row per (grid value, scheme).
pub fn write_csv(res: &SweepResult, path: &Path) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    let mut points = res.points.clone();
    sort_points(&mut points);
    for p in &points {
        w.write_record([
            res.param.name().to_string(),
            fmt_float(p.value),
            p.scheme.name().to_string(),
            fmt_float(p.mean_rate),
            fmt_float(p.stderr),
            p.n_ok.to_string(),
            p.n_infeasible.to_string(),
            p.n_failed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a file produced by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut param = None;
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |k: usize| rec.get(k).ok_or_else(|| bad(format!("row {}: missing column {k}", line + 2)));
        let float = |k: usize| -> Result<f64> {
            field(k)?.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", line + 2)))
        };
        let count = |k: usize| -> Result<usize> {
            field(k)?.parse::<usize>().map_err(|e| bad(format!("row {}: {e}", line + 2)))
        };
        let p: SweepParam = field(0)?.parse().map_err(|e: Error| bad(e.to_string()))?;
        if param.is_some_and(|q| q != p) {
            return Err(bad("mixed sweep parameters".into()));
        }
        param = Some(p);
        points.push(PointResult {
            value: float(1)?,
            scheme: field(2)?.parse().map_err(|e: Error| bad(e.to_string()))?,
            mean_rate: float(3)?,
            stderr: float(4)?,
            n_ok: count(5)?,
            n_infeasible: count(6)?,
            n_failed: count(7)?,
        });
    }
    Ok(SweepResult {
        param: param.unwrap_or(SweepParam::SigmaSi2Db),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn derived_seeds_distinct_over_trials() {
        let mut seen = std::collections::HashSet::new();
        for t in 0..10_000 {
            assert!(seen.insert(derive_seed(7, t)));
        }
    }

    #[test]
    fn same_seed_same_channels() {
        let cfg = SystemConfig::default();
        let a = gen_channels(&cfg, 11);
        let b = gen_channels(&cfg, 11);
        assert_eq!(a, b);
        assert_ne!(a, gen_channels(&cfg, 12));
    }

    #[test]
    fn zero_si_variance_gives_zero_matrix_and_same_other_draws() {
        let cfg = SystemConfig::default();
        let zero = SystemConfig { sigma_si2: 0.0, ..cfg.clone() };
        let a = gen_channels(&cfg, 5);
        let b = gen_channels(&zero, 5);
        assert!(b.h_si.iter().all(|z| *z == c(0.0, 0.0)));
        assert_eq!(a.h_d, b.h_d);
        assert_eq!(a.g_u, b.g_u);
        assert_eq!(a.hd_extension, b.hd_extension);
    }

    #[test]
    fn idle_channel_power_matches_attenuation() {
        let cfg = SystemConfig::default();
        let mut acc = 0.0;
        let trials = 25_000;
        for s in 0..trials {
            let ch = gen_channels(&cfg, derive_seed(3, s));
            acc += ch.h_i.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let mean = acc / (trials as f64 * cfg.n_tx as f64);
        assert!((mean / 1e-3 - 1.0).abs() < 0.03, "mean |h_I|² = {mean}");
    }
}
