use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use seedlab_core::instances::InstanceSpec;
use seedlab_core::lloyd::LloydConfig;
use seedlab_core::seeding::{FirstStep, PerturbationModel, Strategy, Variant};
use seedlab_core::{Error, Result};

/// Seeding procedure plus its parameters, in a serialisable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum Algorithm {
    Plain,
    Greedy {
        ell: usize,
        #[serde(default)]
        first_step: FirstStep,
    },
    Noisy {
        eps1: f64,
        eps2: f64,
        strategy: String,
    },
    Moderate {
        ell: usize,
        p_mix: f64,
    },
}

impl Algorithm {
    pub fn to_variant(&self) -> Result<Variant> {
        Ok(match self {
            Algorithm::Plain => Variant::Plain,
            Algorithm::Greedy { ell, first_step } => Variant::Greedy {
                ell: *ell,
                first_step: *first_step,
            },
            Algorithm::Noisy {
                eps1,
                eps2,
                strategy,
            } => Variant::Noisy(PerturbationModel::new(
                *eps1,
                *eps2,
                Strategy::from_str(strategy)?,
            )?),
            Algorithm::Moderate { ell, p_mix } => Variant::Moderate {
                ell: *ell,
                p_mix: *p_mix,
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Plain => "plain",
            Algorithm::Greedy { .. } => "greedy",
            Algorithm::Noisy { .. } => "noisy",
            Algorithm::Moderate { .. } => "moderate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    /// Defaults to the instance's own cluster count.
    pub k: Option<usize>,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub base_seed: u64,
    pub lloyd: Option<LloydConfig>,
    /// Record coverage, `Ψ` and simplex events per trial.
    pub track_events: bool,
    /// Directory for `trials.jsonl` and `summary.json`.
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec, algorithm: Algorithm) -> Self {
        ExperimentConfig {
            instance,
            k: None,
            algorithm,
            trials: 1000,
            base_seed: 0,
            lloyd: None,
            track_events: false,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Input("trials must be >= 1".into()));
        }
        if self.k == Some(0) {
            return Err(Error::Input("k must be >= 1".into()));
        }
        self.algorithm.to_variant().map(|_| ())
    }
}

/// Flat parameter set shared by the CLI flags and `key=value` config files.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub instance: Option<String>,
    pub k: Option<usize>,
    pub algo: String,
    pub ell: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub strategy: String,
    pub pmix: f64,
    pub first_step: FirstStep,
    pub trials: usize,
    pub seed: u64,
    pub lloyd: bool,
    pub events: Option<bool>,
    pub out: Option<PathBuf>,
    pub axis: Option<String>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            instance: None,
            k: None,
            algo: "plain".into(),
            ell: 2,
            eps1: 0.0,
            eps2: 0.0,
            strategy: "identity".into(),
            pmix: 0.5,
            first_step: FirstStep::Single,
            trials: 1000,
            seed: 0,
            lloyd: false,
            events: None,
            out: None,
            axis: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Input(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Input(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl Params {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "instance" => self.instance = Some(value.into()),
            "k" => self.k = Some(parse(key, value)?),
            "algo" => self.algo = value.into(),
            "ell" => self.ell = parse(key, value)?,
            "eps1" => self.eps1 = parse(key, value)?,
            "eps2" => self.eps2 = parse(key, value)?,
            "strategy" => self.strategy = value.into(),
            "pmix" | "p_mix" => self.pmix = parse(key, value)?,
            "first_step" => self.first_step = value.parse()?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "lloyd" => self.lloyd = parse_bool(key, value)?,
            "events" => self.events = Some(parse_bool(key, value)?),
            "out" => self.out = Some(value.into()),
            "axis" => self.axis = Some(value.into()),
            _ => return Err(Error::Input(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    line: no + 1,
                    msg: e.to_string(),
                })?;
        }
        Ok(())
    }

    pub fn algorithm(&self) -> Result<Algorithm> {
        Ok(match self.algo.as_str() {
            "plain" => Algorithm::Plain,
            "greedy" => Algorithm::Greedy {
                ell: self.ell,
                first_step: self.first_step,
            },
            "noisy" => Algorithm::Noisy {
                eps1: self.eps1,
                eps2: self.eps2,
                strategy: self.strategy.clone(),
            },
            "moderate" => Algorithm::Moderate {
                ell: self.ell,
                p_mix: self.pmix,
            },
            other => return Err(Error::Input(format!("unknown algorithm {other:?}"))),
        })
    }

    pub fn instance_spec(&self) -> Result<InstanceSpec> {
        self.instance
            .as_deref()
            .ok_or_else(|| Error::Input("an instance is required".into()))?
            .parse()
    }

    /// Builds the experiment. Event tracking defaults to on for labelled
    /// instances.
    pub fn experiment(&self, labelled: bool) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            instance: self.instance_spec()?,
            k: self.k,
            algorithm: self.algorithm()?,
            trials: self.trials,
            base_seed: self.seed,
            lloyd: self.lloyd.then(LloydConfig::default),
            track_events: self.events.unwrap_or(labelled),
            out: self.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
