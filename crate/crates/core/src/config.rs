//! Flat key-value run configuration.
//!
//! A config file is TOML with top-level keys only. Keys are the
//! [`SystemConfig`] field names plus the sweep and solver settings below.
//! Command-line overrides (`key=value`) are applied on top of the file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::Scheme;
use crate::error::{Error, Result};
use crate::harness::{SweepParam, SweepSpec};
use crate::model::SystemConfig;
use crate::spca::SpcaOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    pub p_bs: f64,
    pub p_u: f64,
    pub zeta: f64,
    pub sigma_z2: f64,
    pub sigma_si2: f64,
    pub e_min: f64,
    pub attn_bs_idle_db: f64,
    pub attn_other_db: f64,
    /// Swept parameter; `sigma_si2_db` or `e_min_w`.
    pub param: SweepParam,
    /// Grid values; empty means the parameter's default grid.
    pub grid: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub seed: u64,
    /// Worker threads for sweeps; 0 means all cores.
    pub threads: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_parts(&SystemConfig::default(), &SpcaOptions::default())
    }
}

impl RunConfig {
    fn from_parts(sys: &SystemConfig, spca: &SpcaOptions) -> Self {
        Self {
            n_tx: sys.n_tx,
            n_rx: sys.n_rx,
            p_bs: sys.p_bs,
            p_u: sys.p_u,
            zeta: sys.zeta,
            sigma_z2: sys.sigma_z2,
            sigma_si2: sys.sigma_si2,
            e_min: sys.e_min,
            attn_bs_idle_db: sys.attn_bs_idle_db,
            attn_other_db: sys.attn_other_db,
            param: SweepParam::SigmaSi2Db,
            grid: Vec::new(),
            trials: 200,
            schemes: Scheme::ALL.to_vec(),
            seed: 1,
            threads: 0,
            rel_tol: spca.rel_tol,
            max_iter: spca.max_iter,
        }
    }

    /// Parses `text`, applies `overrides` and validates the result.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        for ov in overrides {
            let (key, value) = split_override(ov)?;
            table.insert(key.to_string(), parse_value(value));
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?,
            None => String::new(),
        };
        Self::parse(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        self.system().validate()?;
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        self.sweep_spec().validate()
    }

    pub fn system(&self) -> SystemConfig {
        SystemConfig {
            n_tx: self.n_tx,
            n_rx: self.n_rx,
            p_bs: self.p_bs,
            p_u: self.p_u,
            zeta: self.zeta,
            sigma_z2: self.sigma_z2,
            sigma_si2: self.sigma_si2,
            e_min: self.e_min,
            attn_bs_idle_db: self.attn_bs_idle_db,
            attn_other_db: self.attn_other_db,
        }
    }

    pub fn spca(&self) -> SpcaOptions {
        SpcaOptions {
            rel_tol: self.rel_tol,
            max_iter: self.max_iter,
            ..SpcaOptions::default()
        }
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            param: self.param,
            grid: if self.grid.is_empty() {
                self.param.default_grid()
            } else {
                self.grid.clone()
            },
            trials: self.trials,
            schemes: self.schemes.clone(),
            base: self.system(),
            seed: self.seed,
            threads: (self.threads > 0).then_some(self.threads),
            spca: self.spca(),
        }
    }

    /// The resolved configuration as TOML, suitable as a config file.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn split_override(ov: &str) -> Result<(&str, &str)> {
    let (k, v) = ov
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {ov:?} is not of the form key=value")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(Error::Config(format!("override {ov:?} has an empty key")));
    }
    Ok((k, v.trim()))
}

/// A TOML literal when `raw` is one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}
