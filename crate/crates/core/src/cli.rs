//! The `fdsec` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | runtime error (numerical failure, I/O) |
//! | 2 | the instance is infeasible |
//! | 64 | usage error or bad configuration |

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::Error;
use crate::harness::{self, derive_seed, gen_channels, SweepResult};
use crate::selftest::{self, SelftestOptions};
use crate::spca::{self, Faults, SpcaOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "fdsec", version, about = "Secrecy-rate transceiver design for a full-duplex SWIPT base station")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML config file with flat `key = value` entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one config key; repeatable, applied after the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Master seed; same as `--set seed=N`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps; same as `--set threads=N`.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (sweep CSV or trace CSV).
    #[arg(long, short, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// More detail on stderr; repeatable.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[arg(long, global = true, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one channel realization with the full-duplex design.
    Solve {
        /// Trial index used to derive the channel seed.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Monte Carlo sweep over one parameter for all schemes.
    Sweep {
        /// Swept parameter: sigma_si2_db or e_min_w.
        #[arg(long)]
        param: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Per-iteration convergence trace of one solve.
    Trace {
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Fast invariant checks.
    Selftest,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
            } else {
                let _ = write!(stdout, "{}", e.render());
            }
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Error> {
    let mut ov = cli.global.overrides.clone();
    if let Some(s) = cli.global.seed {
        ov.push(format!("seed={s}"));
    }
    if let Some(t) = cli.global.threads {
        ov.push(format!("threads={t}"));
    }
    if let Command::Sweep { param, trials } = &cli.command {
        if let Some(p) = param {
            ov.push(format!("param=\"{p}\""));
        }
        if let Some(t) = trials {
            ov.push(format!("trials={t}"));
        }
    }
    RunConfig::load(cli.global.config.as_deref(), &ov)
}

fn banner(cfg: &RunConfig, cmd: &str, stderr: &mut dyn Write) {
    let _ = writeln!(stderr, "# fdsec {} {cmd}, seed {}", env!("CARGO_PKG_VERSION"), cfg.seed);
    for line in cfg.to_toml().lines() {
        let _ = writeln!(stderr, "#   {line}");
    }
}

fn faults(cli: &Cli) -> Faults {
    Faults {
        flip_g_trace_sign: cli.global.inject_fault,
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Solve { trial } => {
            banner(&cfg, "solve", stderr);
            let out = solve_one(&cfg, *trial, faults(cli))?;
            stdout.write_all(format_solution(&out).as_bytes()).map_err(stdout_err)?;
            if cli.global.verbose > 0 {
                let _ = writeln!(
                    stderr,
                    "# {} iterations, termination {:?}",
                    out.trace.iterations(),
                    out.trace.termination
                );
            }
            Ok(EXIT_OK)
        }
        Command::Trace { trial } => {
            banner(&cfg, "trace", stderr);
            let out = solve_one(&cfg, *trial, faults(cli))?;
            stdout.write_all(format_trace(&out).as_bytes()).map_err(stdout_err)?;
            if let Some(p) = &cli.global.out {
                write_trace_csv(&out, p)?;
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { .. } => {
            banner(&cfg, "sweep", stderr);
            let spec = cfg.sweep_spec();
            let res = harness::sweep(&spec)?;
            if let Some(p) = &cli.global.out {
                harness::write_csv(&res, p)?;
                let _ = writeln!(stderr, "# wrote {}", p.display());
            }
            stdout.write_all(format_summary(&res).as_bytes()).map_err(stdout_err)?;
            Ok(EXIT_OK)
        }
        Command::Selftest => {
            banner(&cfg, "selftest", stderr);
            let rep = selftest::run(&SelftestOptions {
                seed: cfg.seed,
                faults: faults(cli),
            });
            let mut all = true;
            for g in &rep {
                all &= g.passed;
                let _ = writeln!(
                    stdout,
                    "{:<5} {:<22} {:>6} checks {:>7.2}s {}",
                    if g.passed { "PASS" } else { "FAIL" },
                    g.name,
                    g.checks,
                    g.seconds,
                    g.detail
                );
            }
            Ok(if all { EXIT_OK } else { EXIT_ERROR })
        }
    }
}

fn stdout_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn solve_one(cfg: &RunConfig, trial: u64, faults: Faults) -> Result<SpcaOutput, Error> {
    let sys = cfg.system();
    let ch = gen_channels(&sys, derive_seed(cfg.seed, trial));
    spca::spca_solve_with(&ch, &sys, &cfg.spca(), faults)
}

pub fn format_solution(out: &SpcaOutput) -> String {
    let r = &out.report;
    let sl = &out.slacks;
    let mut s = String::new();
    let _ = writeln!(s, "sum_secrecy_rate   {:.6}", r.r_sum);
    let _ = writeln!(s, "downlink_secrecy   {:.6}", r.r_d_sec);
    let _ = writeln!(s, "uplink_secrecy     {:.6}", r.r_u_sec);
    let _ = writeln!(s, "gamma_d            {:.6e}", r.gamma_d);
    let _ = writeln!(s, "gamma_u            {:.6e}", r.gamma_u);
    let _ = writeln!(s, "gamma_i_d          {:.6e}", r.gamma_i_d);
    let _ = writeln!(s, "gamma_i_u          {:.6e}", r.gamma_i_u);
    let _ = writeln!(s, "harvested_w        {:.6e}", r.energy);
    let _ = writeln!(s, "slack x_d          {:.6}", sl.x_d);
    let _ = writeln!(s, "slack y_d          {:.6}", sl.y_d);
    let _ = writeln!(s, "slack x_i          {:.6}", sl.x_i);
    let _ = writeln!(s, "slack y_i          {:.6}", sl.y_i);
    let _ = writeln!(s, "slack t_u          {:.6}", sl.t_u);
    let _ = writeln!(s, "slack y_u          {:.6}", sl.y_u);
    let _ = writeln!(s, "iterations         {}", out.trace.iterations());
    let _ = writeln!(s, "termination        {:?}", out.trace.termination);
    let _ = writeln!(s, "kkt_residual       {:.3e}", out.kkt_residual);
    s
}

pub fn format_trace(out: &SpcaOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>4} {:>14} {:>12} {:>12}", "iter", "u", "improvement", "kkt");
    let _ = writeln!(s, "{:>4} {:>14.8} {:>12} {:>12}", 0, out.trace.initial_objective, "-", "-");
    for r in &out.trace.records {
        let _ = writeln!(
            s,
            "{:>4} {:>14.8} {:>12.3e} {:>12.3e}",
            r.iteration, r.objective, r.improvement, r.kkt_residual
        );
    }
    let _ = writeln!(s, "# termination {:?}", out.trace.termination);
    s
}

pub const TRACE_CSV_HEADER: [&str; 4] = ["iteration", "objective", "improvement", "kkt_residual"];

pub fn write_trace_csv(out: &SpcaOutput, path: &Path) -> Result<(), Error> {
    let io = |e: csv::Error| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(TRACE_CSV_HEADER).map_err(io)?;
    for r in &out.trace.records {
        w.write_record([
            r.iteration.to_string(),
            format!("{:.9e}", r.objective),
            format!("{:.9e}", r.improvement),
            format!("{:.9e}", r.kkt_residual),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn format_summary(res: &SweepResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>14} {:<12} {:>10} {:>10} {:>5} {:>5} {:>5}",
        res.param.name(),
        "scheme",
        "mean",
        "stderr",
        "ok",
        "inf",
        "fail"
    );
    for p in &res.points {
        let _ = writeln!(
            s,
            "{:>14.4e} {:<12} {:>10.4} {:>10.4} {:>5} {:>5} {:>5}",
            p.value,
            p.scheme.name(),
            p.mean_rate,
            p.stderr,
            p.n_ok,
            p.n_infeasible,
            p.n_failed
        );
    }
    s
}
