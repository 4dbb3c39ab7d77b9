use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::root_rounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlopsKind {
    Muon,
    #[serde(rename = "htmuon_ns")]
    HtMuonNs,
}

impl std::str::FromStr for FlopsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "muon" => Ok(Self::Muon),
            "htmuon_ns" => Ok(Self::HtMuonNs),
            _ => Err(Error::Config(format!("unknown flops kind `{s}` (expected muon or htmuon_ns)"))),
        }
    }
}

/// Leading-order FLOPs of one update on an `m × n` matrix, as an exact
/// integer. Lower-order `O(mn)` / `O(n²)` terms are dropped.
///
/// Muon: `20mnr`, `r = min(m, n)`. HTMuon_NS adds `4mn² + 6LTn³` with
/// `L = ⌈log₂(2/p)⌉` root rounds of `T` steps each.
pub fn flops_count(kind: FlopsKind, m: u64, n: u64, p: f64, ns_steps: u64) -> Result<u128> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("dimensions must be positive".into()));
    }
    let (m, n) = (u128::from(m), u128::from(n));
    let muon = 20 * m * n * m.min(n);
    Ok(match kind {
        FlopsKind::Muon => muon,
        FlopsKind::HtMuonNs => {
            if ns_steps == 0 {
                return Err(Error::Domain("ns_steps must be positive".into()));
            }
            let rounds = u128::from(root_rounds(p)?);
            muon + 4 * m * n * n + 6 * rounds * u128::from(ns_steps) * n * n * n
        }
    })
}

/// [`flops_count`] as a float (exact below 2⁵³).
pub fn flops_estimate(kind: FlopsKind, m: u64, n: u64, p: f64, ns_steps: u64) -> Result<f64> {
    Ok(flops_count(kind, m, n, p, ns_steps)? as f64)
}
