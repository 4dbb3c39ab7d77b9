//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [experiment]
//! steps = 200
//! batch_size = 32        # omit for full batch
//! seed = 0
//! checkpoints = [0, 199]
//! output_dir = "out"     # relative to the config file
//!
//! [problem]
//! kind = "matrix_regression"   # or "logistic", "mlp2"
//! noise = 1e-3
//!
//! [[optimizer]]
//! kind = "htmuon"
//! lr = 0.02
//! interval = 5
//!
//! [[optimizer]]
//! kind = "muon_svd"
//! name = "muon"
//! ```
//!
//! Range checks run while deserializing, so a bad value is reported with
//! its line and column.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::de::{Deserializer, Error as _};
use serde::{Deserialize, Serialize};

use crate::bench::{LogisticSpec, MlpSpec, Problem, RegressionSpec, TrainOptions};
use crate::bench::{Logistic, MatrixRegression, Mlp2};
use crate::error::{Error, Result};
use crate::optim::{AdaptiveLr, OptimizerConfig, OptimizerKind};
use crate::specfun::NsConfig;

fn checked<'de, D, T>(d: D, ok: impl Fn(&T) -> bool, what: &str) -> std::result::Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de> + std::fmt::Display,
{
    let v = T::deserialize(d)?;
    if ok(&v) {
        Ok(Some(v))
    } else {
        Err(D::Error::custom(format!("{v} is out of range: expected {what}")))
    }
}

fn positive<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    checked(d, |v: &f64| *v > 0.0 && v.is_finite(), "a positive number")
}

fn non_negative<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    checked(d, |v: &f64| *v >= 0.0 && v.is_finite(), "a number >= 0")
}

fn unit_open<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    checked(d, |v: &f64| (0.0..1.0).contains(v), "a number in [0, 1)")
}

fn unit_closed<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    checked(d, |v: &f64| (0.0..=1.0).contains(v), "a number in [0, 1]")
}

fn positive_int<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<u64>, D::Error> {
    checked(d, |v: &u64| *v >= 1, "an integer >= 1")
}

fn positive_usize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<usize, D::Error> {
    checked(d, |v: &usize| *v >= 1, "an integer >= 1").map(|v| v.expect("checked returns a value"))
}

fn positive_batch<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<usize>, D::Error> {
    checked(d, |v: &usize| *v >= 1, "an integer >= 1")
}

/// `lipschitz = 2.5`, or `"auto"` for problems that know their constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Lipschitz {
    Value(f64),
    Auto,
}

impl<'de> Deserialize<'de> for Lipschitz {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v > 0.0 && v.is_finite() => Ok(Lipschitz::Value(v)),
            Raw::Num(v) => Err(D::Error::custom(format!("lipschitz must be positive, got {v}"))),
            Raw::Text(s) if s == "auto" => Ok(Lipschitz::Auto),
            Raw::Text(s) => Err(D::Error::custom(format!("lipschitz must be a number or \"auto\", got `{s}`"))),
        }
    }
}

/// One `[[optimizer]]` table. Omitted fields take the kind's defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerEntry {
    pub kind: OptimizerKind,
    /// Label for output files; defaults to the kind name.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default, deserialize_with = "positive")]
    pub lr: Option<f64>,
    #[serde(default, deserialize_with = "unit_open")]
    pub momentum: Option<f64>,
    #[serde(default, deserialize_with = "non_negative")]
    pub weight_decay: Option<f64>,
    #[serde(default, deserialize_with = "unit_closed")]
    pub power: Option<f64>,
    #[serde(default, deserialize_with = "positive")]
    pub ht_alpha: Option<f64>,
    #[serde(default, deserialize_with = "unit_open")]
    pub beta2: Option<f64>,
    #[serde(default, deserialize_with = "positive")]
    pub eps: Option<f64>,
    #[serde(default, deserialize_with = "positive_int")]
    pub interval: Option<u64>,
    #[serde(default)]
    pub ns: Option<NsConfig>,
    /// Enables the smoothness-based adaptive learning rate.
    #[serde(default)]
    pub lipschitz: Option<Lipschitz>,
}

impl OptimizerEntry {
    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    /// Full config, resolving `lipschitz = "auto"` against `problem`.
    pub fn resolve(&self, problem: &dyn Problem) -> Result<OptimizerConfig> {
        let mut c = OptimizerConfig::new(self.kind);
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.lr, self.lr);
        set(&mut c.momentum, self.momentum);
        set(&mut c.weight_decay, self.weight_decay);
        set(&mut c.power, self.power);
        set(&mut c.ht_alpha, self.ht_alpha);
        set(&mut c.beta2, self.beta2);
        set(&mut c.eps, self.eps);
        if let Some(k) = self.interval {
            c.interval = k;
        }
        if let Some(ns) = &self.ns {
            c.ns = *ns;
        }
        c.adaptive_lr = match &self.lipschitz {
            None => None,
            Some(Lipschitz::Value(l)) => Some(AdaptiveLr { lipschitz: *l }),
            Some(Lipschitz::Auto) => {
                let l = problem.lipschitz().ok_or_else(|| {
                    Error::Config(format!("optimizer `{}`: problem {} has no known lipschitz constant", self.label(), problem.name()))
                })?;
                Some(AdaptiveLr { lipschitz: l })
            }
        };
        c.validate().map_err(|e| Error::Config(format!("optimizer `{}`: {e}", self.label())))?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    MatrixRegression(RegressionSpec),
    Logistic(LogisticSpec),
    Mlp2(MlpSpec),
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Box<dyn Problem>> {
        Ok(match self {
            ProblemSpec::MatrixRegression(s) => Box::new(MatrixRegression::new(s)?),
            ProblemSpec::Logistic(s) => Box::new(Logistic::new(s)?),
            ProblemSpec::Mlp2(s) => Box::new(Mlp2::new(s)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    #[serde(deserialize_with = "positive_usize")]
    pub steps: usize,
    /// Samples per step; omitted means full batch.
    #[serde(deserialize_with = "positive_batch")]
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    pub output_dir: PathBuf,
    pub nuclear_diagnostics: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let t = TrainOptions::default();
        Self {
            steps: t.steps,
            batch_size: None,
            seed: t.seed,
            checkpoints: t.checkpoints,
            output_dir: PathBuf::from("out"),
            nuclear_diagnostics: t.nuclear_diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub problem: ProblemSpec,
    pub optimizer: Vec<OptimizerEntry>,
}

impl ExperimentConfig {
    /// Parses and checks everything that does not need the problem built.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    fn check(&self) -> Result<()> {
        if self.optimizer.is_empty() {
            return Err(Error::Config("at least one [[optimizer]] table is required".into()));
        }
        let mut seen = HashSet::new();
        for o in &self.optimizer {
            let label = o.label();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')) {
                return Err(Error::Config(format!("optimizer name `{label}` must use only [A-Za-z0-9_.-]")));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::Config(format!("duplicate optimizer name `{label}`; set `name` to tell them apart")));
            }
        }
        let steps = self.experiment.steps;
        if let Some(&c) = self.experiment.checkpoints.iter().find(|&&c| c >= steps) {
            return Err(Error::Config(format!("checkpoint {c} is not below steps = {steps}")));
        }
        Ok(())
    }

    pub fn train_options(&self) -> TrainOptions {
        let e = &self.experiment;
        TrainOptions {
            steps: e.steps,
            batch_size: e.batch_size.unwrap_or(usize::MAX),
            seed: e.seed,
            checkpoints: e.checkpoints.clone(),
            nuclear_diagnostics: e.nuclear_diagnostics,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[experiment]
steps = 20
seed = 3

[problem]
kind = "matrix_regression"
rows = 8
cols = 6
inner = 4

[[optimizer]]
kind = "htmuon"
interval = 5

[[optimizer]]
kind = "sgdm"
lr = 0.1
"#;

    #[test]
    fn parses_and_fills_defaults() {
        let cfg = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(cfg.experiment.steps, 20);
        assert_eq!(cfg.experiment.batch_size, None);
        assert_eq!(cfg.optimizer.len(), 2);
        let problem = cfg.problem.build().unwrap();
        let ht = cfg.optimizer[0].resolve(problem.as_ref()).unwrap();
        assert_eq!(ht, OptimizerConfig::new(OptimizerKind::HtMuon).with_interval(5));
        assert_eq!(cfg.optimizer[1].resolve(problem.as_ref()).unwrap().lr, 0.1);
    }

    #[test]
    fn out_of_range_values_carry_line_numbers() {
        let text = BASIC.replace("lr = 0.1", "lr = -0.1");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 18"), "{err}");
        assert!(err.contains("positive"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASIC.replace("seed = 3", "seed = 3\nsteep = 4");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("steep") && err.contains("line 5"), "{err}");
        let text = BASIC.replace("interval = 5", "intervl = 5");
        assert!(ExperimentConfig::parse(&text).is_err());
        let text = BASIC.replace("inner = 4", "inner = 4\nwidth = 2");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn cross_field_checks() {
        let dup = BASIC.replace("kind = \"sgdm\"", "kind = \"htmuon\"");
        assert!(ExperimentConfig::parse(&dup).unwrap_err().to_string().contains("duplicate"));
        let ck = BASIC.replace("seed = 3", "seed = 3\ncheckpoints = [20]");
        assert!(ExperimentConfig::parse(&ck).is_err());
        let bad_interval = BASIC.replace("lr = 0.1", "lr = 0.1\ninterval = 2");
        let cfg = ExperimentConfig::parse(&bad_interval).unwrap();
        let p = cfg.problem.build().unwrap();
        assert!(matches!(cfg.optimizer[1].resolve(p.as_ref()), Err(Error::Config(_))));
    }

    #[test]
    fn auto_lipschitz() {
        let text = BASIC.replace("interval = 5", "lipschitz = \"auto\"");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        let p = cfg.problem.build().unwrap();
        let c = cfg.optimizer[0].resolve(p.as_ref()).unwrap();
        assert_eq!(c.adaptive_lr.unwrap().lipschitz, p.lipschitz().unwrap());
        let text = BASIC.replace("interval = 5", "lipschitz = \"big\"");
        assert!(ExperimentConfig::parse(&text).is_err());
    }
}
