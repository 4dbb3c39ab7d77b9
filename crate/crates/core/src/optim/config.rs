use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::NsConfig;

/// Which update rule a stepper applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgdm,
    Adam,
    #[serde(rename = "adamw")]
    AdamW,
    MuonSvd,
    MuonNs,
    #[serde(rename = "htmuon")]
    HtMuon,
    #[serde(rename = "htmuon_ns")]
    HtMuonNs,
    #[serde(rename = "htmuon_ht")]
    HtMuonHt,
    #[serde(rename = "normuon")]
    NorMuon,
    #[serde(rename = "htmuon_normuon")]
    HtMuonNorMuon,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 10] = [
        Self::Sgdm,
        Self::Adam,
        Self::AdamW,
        Self::MuonSvd,
        Self::MuonNs,
        Self::HtMuon,
        Self::HtMuonNs,
        Self::HtMuonHt,
        Self::NorMuon,
        Self::HtMuonNorMuon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sgdm => "sgdm",
            Self::Adam => "adam",
            Self::AdamW => "adamw",
            Self::MuonSvd => "muon_svd",
            Self::MuonNs => "muon_ns",
            Self::HtMuon => "htmuon",
            Self::HtMuonNs => "htmuon_ns",
            Self::HtMuonHt => "htmuon_ht",
            Self::NorMuon => "normuon",
            Self::HtMuonNorMuon => "htmuon_normuon",
        }
    }

    /// Spectral steppers that apply the `√max(1, m/n)` shape scale.
    pub fn is_matrix_family(self) -> bool {
        matches!(self, Self::MuonSvd | Self::MuonNs | Self::HtMuon | Self::HtMuonNs | Self::HtMuonHt)
    }

    /// Steppers with row-wise second-moment normalization.
    pub fn is_normuon_family(self) -> bool {
        matches!(self, Self::NorMuon | Self::HtMuonNorMuon)
    }

    /// Heavy-tailed variants eligible for interval scheduling.
    pub fn is_heavy(self) -> bool {
        matches!(self, Self::HtMuon | Self::HtMuonNs | Self::HtMuonHt | Self::HtMuonNorMuon)
    }

    /// The cheap stepper used between heavy steps.
    pub fn light_counterpart(self) -> Option<OptimizerKind> {
        match self {
            Self::HtMuon | Self::HtMuonNs | Self::HtMuonHt => Some(Self::MuonNs),
            Self::HtMuonNorMuon => Some(Self::NorMuon),
            _ => None,
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown optimizer kind `{s}`")))
    }
}

/// Step size from the smoothness bound `⟨M, O⟩ / (L ‖O‖²_F)` in place of a
/// fixed learning rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveLr {
    pub lipschitz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub lr: f64,
    /// `β` (first-moment decay, `β₁` for the Adam family).
    pub momentum: f64,
    pub weight_decay: f64,
    /// Spectral power `p` for the HTMuon variants.
    pub power: f64,
    /// Tail exponent for `htmuon_ht`.
    pub ht_alpha: f64,
    /// Second-moment decay for Adam/AdamW/NorMuon.
    pub beta2: f64,
    pub eps: f64,
    /// Heavy step every `interval` steps; `1` means every step.
    pub interval: u64,
    pub ns: NsConfig,
    pub adaptive_lr: Option<AdaptiveLr>,
}

impl OptimizerConfig {
    /// Defaults for `kind`.
    pub fn new(kind: OptimizerKind) -> Self {
        let adam = matches!(kind, OptimizerKind::Adam | OptimizerKind::AdamW);
        Self {
            kind,
            lr: if adam { 1e-3 } else { 0.02 },
            momentum: if adam { 0.9 } else { 0.95 },
            weight_decay: 0.0,
            power: 0.125,
            ht_alpha: 0.25,
            beta2: if kind.is_normuon_family() { 0.95 } else { 0.999 },
            eps: 1e-8,
            interval: 1,
            ns: NsConfig::default(),
            adaptive_lr: None,
        }
    }

    pub fn with_lr(mut self, lr: f64) -> Self {
        self.lr = lr;
        self
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = momentum;
        self
    }

    pub fn with_weight_decay(mut self, weight_decay: f64) -> Self {
        self.weight_decay = weight_decay;
        self
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    pub fn with_interval(mut self, interval: u64) -> Self {
        self.interval = interval;
        self
    }

    pub fn with_adaptive_lr(mut self, lipschitz: f64) -> Self {
        self.adaptive_lr = Some(AdaptiveLr { lipschitz });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad(format!("weight_decay must be >= 0, got {}", self.weight_decay));
        }
        if !(0.0..=1.0).contains(&self.power) {
            return bad(format!("power must lie in [0, 1], got {}", self.power));
        }
        if self.kind == OptimizerKind::HtMuonNs && self.power == 0.0 {
            return bad("htmuon_ns needs power > 0".into());
        }
        if !(self.ht_alpha > 0.0 && self.ht_alpha.is_finite()) {
            return bad(format!("ht_alpha must be positive, got {}", self.ht_alpha));
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return bad(format!("beta2 must lie in [0, 1), got {}", self.beta2));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.interval == 0 {
            return bad("interval must be >= 1".into());
        }
        if self.interval > 1 && !self.kind.is_heavy() {
            return bad(format!("interval scheduling needs an HTMuon variant, got {}", self.kind));
        }
        if let Some(a) = self.adaptive_lr {
            if !(a.lipschitz > 0.0 && a.lipschitz.is_finite()) {
                return bad(format!("lipschitz must be positive, got {}", a.lipschitz));
            }
            if !self.kind.is_matrix_family() {
                return bad(format!("adaptive_lr needs a spectral stepper, got {}", self.kind));
            }
        }
        self.ns.validate()
    }
}
