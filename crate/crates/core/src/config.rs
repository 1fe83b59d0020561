//! Run parameters as `key=value` pairs.
//!
//! Every key has a default. A config file holds one `key=value` per line
//! (`#` starts a comment); later assignments win, so flags applied after the
//! file override it.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scrank::{Init, IterationConfig};
use crate::synthgen::{GeneratorParams, HModel};
use crate::transfer::TransferFunction;

/// Every recognized key, in manifest order.
pub const KEYS: &[&str] = &[
    "mu_c",
    "sigma_c",
    "mu_s",
    "sigma_s",
    "epsilon",
    "max_iters",
    "init",
    "seed",
    "threads",
    "threshold",
    "bins",
    "burn_in",
    "preset",
    "n",
    "n_c",
    "n_s",
    "p",
    "p_c",
    "p_s",
    "h_model",
    "exponent",
    "avg_degree",
    "er_prob",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mu_c: f64,
    pub sigma_c: f64,
    pub mu_s: f64,
    pub sigma_s: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// `0`, `1`, a constant in `[0, 1]`, or `rand`.
    pub init: String,
    pub seed: u64,
    /// Worker threads; 1 runs sequentially.
    pub threads: usize,
    pub threshold: f64,
    pub bins: usize,
    pub burn_in: usize,
    pub preset: String,
    /// Generator overrides applied on top of the preset.
    pub generator: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mu_c: 100.0,
            sigma_c: 25.0,
            mu_s: 100.0,
            sigma_s: 25.0,
            epsilon: 1e-6,
            max_iters: 50,
            init: "0".into(),
            seed: 1,
            threads: 1,
            threshold: 0.5,
            bins: 20,
            burn_in: crate::eval::DEFAULT_BURN_IN,
            preset: "desk".into(),
            generator: BTreeMap::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad value for {key}: '{value}'")))
}

pub fn parse_init(text: &str, seed: u64) -> Result<Init> {
    match text {
        "0" => Ok(Init::Zero),
        "1" => Ok(Init::One),
        "rand" | "random" => Ok(Init::Random { seed }),
        other => {
            let x: f64 = parse("init", other)?;
            if (0.0..=1.0).contains(&x) {
                Ok(Init::Constant(x))
            } else {
                Err(Error::InvalidParam(format!(
                    "init must lie in [0, 1], got {x}"
                )))
            }
        }
    }
}

impl RunConfig {
    /// Assigns one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "mu_c" => self.mu_c = parse(key, value)?,
            "sigma_c" => self.sigma_c = parse(key, value)?,
            "mu_s" => self.mu_s = parse(key, value)?,
            "sigma_s" => self.sigma_s = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "init" => {
                parse_init(value, 0)?;
                self.init = value.to_string();
            }
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "burn_in" => self.burn_in = parse(key, value)?,
            "preset" => {
                if GeneratorParams::preset(value).is_none() {
                    return Err(Error::InvalidParam(format!("unknown preset '{value}'")));
                }
                self.preset = value.to_string();
            }
            "n" | "n_c" | "n_s" => {
                parse::<usize>(key, value)?;
                self.generator.insert(key.into(), value.into());
            }
            "p" | "p_c" | "p_s" | "exponent" | "avg_degree" | "er_prob" => {
                parse::<f64>(key, value)?;
                self.generator.insert(key.into(), value.into());
            }
            "h_model" => {
                if !matches!(value, "chung-lu" | "erdos-renyi") {
                    return Err(Error::InvalidParam(format!(
                        "h_model must be chung-lu or erdos-renyi, got '{value}'"
                    )));
                }
                self.generator.insert(key.into(), value.into());
            }
            other => return Err(Error::InvalidParam(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of the current values.
    pub fn read<R: BufRead>(&mut self, reader: R) -> Result<()> {
        for (k, line) in reader.lines().enumerate() {
            let line_no = k + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected key=value, got '{text}'"),
            })?;
            self.set(key.trim(), value).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn load(&mut self, path: &std::path::Path) -> Result<()> {
        self.read(crate::io::open(path)?)
    }

    pub fn init(&self) -> Result<Init> {
        parse_init(&self.init, self.seed)
    }

    pub fn iteration(&self) -> Result<IterationConfig> {
        let cfg = IterationConfig {
            epsilon: self.epsilon,
            max_iterations: self.max_iters,
            init: self.init()?,
            track_potential: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn celebrity_transfer(&self) -> Result<TransferFunction> {
        TransferFunction::celebrity(self.mu_c, self.sigma_c)
    }

    pub fn spammer_transfer(&self) -> Result<TransferFunction> {
        TransferFunction::spammer(self.mu_s, self.sigma_s)
    }

    /// The preset with overrides and this config's seed.
    pub fn generator_params(&self) -> Result<GeneratorParams> {
        let mut g = GeneratorParams::preset(&self.preset)
            .ok_or_else(|| Error::InvalidParam(format!("unknown preset '{}'", self.preset)))?
            .with_seed(self.seed);
        let get = |k: &str| self.generator.get(k).map(String::as_str);
        if let Some(v) = get("n") {
            g.n = parse("n", v)?;
        }
        if let Some(v) = get("n_c") {
            g.n_c = parse("n_c", v)?;
        }
        if let Some(v) = get("n_s") {
            g.n_s = parse("n_s", v)?;
        }
        if let Some(v) = get("p") {
            g.p = parse("p", v)?;
        }
        if let Some(v) = get("p_c") {
            g.p_c = parse("p_c", v)?;
        }
        if let Some(v) = get("p_s") {
            g.p_s = parse("p_s", v)?;
        }
        let (mut exponent, mut avg_degree, mut prob) = match g.h_model {
            HModel::ChungLu {
                exponent,
                avg_degree,
            } => (exponent, avg_degree, 0.01),
            HModel::ErdosRenyi { prob } => (0.5, 100.0, prob),
        };
        if let Some(v) = get("exponent") {
            exponent = parse("exponent", v)?;
        }
        if let Some(v) = get("avg_degree") {
            avg_degree = parse("avg_degree", v)?;
        }
        if let Some(v) = get("er_prob") {
            prob = parse("er_prob", v)?;
        }
        let model = get("h_model").unwrap_or(match g.h_model {
            HModel::ChungLu { .. } => "chung-lu",
            HModel::ErdosRenyi { .. } => "erdos-renyi",
        });
        g.h_model = if model == "erdos-renyi" {
            HModel::ErdosRenyi { prob }
        } else {
            HModel::ChungLu {
                exponent,
                avg_degree,
            }
        };
        g.validate()?;
        Ok(g)
    }

    /// `key=value` lines for every scoring key and any generator override.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = vec![
            format!("mu_c={}", self.mu_c),
            format!("sigma_c={}", self.sigma_c),
            format!("mu_s={}", self.mu_s),
            format!("sigma_s={}", self.sigma_s),
            format!("epsilon={}", self.epsilon),
            format!("max_iters={}", self.max_iters),
            format!("init={}", self.init),
            format!("seed={}", self.seed),
            format!("threads={}", self.threads),
            format!("threshold={}", self.threshold),
            format!("bins={}", self.bins),
            format!("burn_in={}", self.burn_in),
            format!("preset={}", self.preset),
        ];
        lines.extend(self.generator.iter().map(|(k, v)| format!("{k}={v}")));
        lines
    }
}
