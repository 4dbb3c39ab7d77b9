use crate::error::{Error, Result};
use crate::matcore::{svd, Matrix};
use crate::specfun::{power_from_svd, quintic, root_rounds, root_unchecked, spectral_power};

use super::adaptive::adaptive_lr_from;
use super::config::{OptimizerConfig, OptimizerKind};
use super::state::{OptimizerState, SecondMoment};

/// What one step did.
#[derive(Debug, Clone)]
pub struct UpdateTrace {
    /// Stepper that actually ran (differs from the configured kind on light
    /// steps of an interval schedule).
    pub kind: OptimizerKind,
    pub heavy: bool,
    /// `O_t` (for NorMuon variants the normalized `Ô_t`).
    pub direction: Matrix,
    pub scale: f64,
    pub effective_lr: f64,
    /// Singular values of `O_t` when the stepper knows them exactly.
    pub singular_values: Option<Vec<f64>>,
}

/// `√max(1, m/n)`.
pub fn shape_scale(rows: usize, cols: usize) -> f64 {
    (rows as f64 / cols as f64).max(1.0).sqrt()
}

fn check_inputs(state: &OptimizerState, kind: OptimizerKind, w: &Matrix, g: &Matrix) -> Result<()> {
    w.ensure_same_shape(g)?;
    if !w.is_finite() {
        return Err(Error::NonFinite("weights".into()));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("gradient".into()));
    }
    state.check(kind, w.shape())
}

/// One optimizer step. Advances `state` and returns the new weights.
pub fn step(
    cfg: &OptimizerConfig,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> Result<(Matrix, UpdateTrace)> {
    cfg.validate()?;
    check_inputs(state, cfg.kind, w, g)?;
    apply(cfg, cfg.kind, state, w, g)
}

/// Like [`step`], but on an interval schedule: the configured heavy stepper
/// runs when `t mod k == 0` and its light counterpart (Muon_NS, or NorMuon
/// for HTMuon+NorMuon) runs otherwise. Both share the momentum buffer.
pub fn scheduled_step(
    cfg: &OptimizerConfig,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> Result<(Matrix, UpdateTrace)> {
    cfg.validate()?;
    if cfg.interval == 1 {
        check_inputs(state, cfg.kind, w, g)?;
        return apply(cfg, cfg.kind, state, w, g);
    }
    let light = cfg
        .kind
        .light_counterpart()
        .ok_or_else(|| Error::Config(format!("{} has no interval schedule", cfg.kind)))?;
    let kind = if state.t.is_multiple_of(cfg.interval) { cfg.kind } else { light };
    check_inputs(state, kind, w, g)?;
    apply(cfg, kind, state, w, g)
}

fn apply(
    cfg: &OptimizerConfig,
    kind: OptimizerKind,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> Result<(Matrix, UpdateTrace)> {
    let out = match kind {
        OptimizerKind::Sgdm => sgdm(cfg, state, w, g),
        OptimizerKind::Adam | OptimizerKind::AdamW => adam(cfg, kind, state, w, g),
        k if k.is_normuon_family() => normuon(cfg, k, state, w, g)?,
        k => spectral(cfg, k, state, w, g)?,
    };
    state.t += 1;
    Ok(out)
}

fn update_momentum(state: &mut OptimizerState, beta: f64, g: &Matrix) {
    let m = state.momentum.data_mut();
    for (mi, &gi) in m.iter_mut().zip(g.data()) {
        *mi = beta * *mi + (1.0 - beta) * gi;
    }
}

/// `W − ηλW − c·O`.
fn descend(w: &Matrix, decay: f64, c: f64, o: &Matrix) -> Matrix {
    let keep = 1.0 - decay;
    w.zip_map(o, |wi, oi| keep * wi - c * oi)
}

fn trace(kind: OptimizerKind, direction: Matrix, scale: f64, lr: f64, sv: Option<Vec<f64>>) -> UpdateTrace {
    UpdateTrace { kind, heavy: kind.is_heavy(), direction, scale, effective_lr: lr, singular_values: sv }
}

fn sgdm(cfg: &OptimizerConfig, state: &mut OptimizerState, w: &Matrix, g: &Matrix) -> (Matrix, UpdateTrace) {
    update_momentum(state, cfg.momentum, g);
    let o = state.momentum.clone();
    let w_next = descend(w, cfg.lr * cfg.weight_decay, cfg.lr, &o);
    (w_next, trace(OptimizerKind::Sgdm, o, 1.0, cfg.lr, None))
}

fn adam(
    cfg: &OptimizerConfig,
    kind: OptimizerKind,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> (Matrix, UpdateTrace) {
    // Adam folds decay into the gradient; AdamW decouples it.
    let (g_eff, decay) = if kind == OptimizerKind::Adam && cfg.weight_decay > 0.0 {
        (g.zip_map(w, |gi, wi| gi + cfg.weight_decay * wi), 0.0)
    } else if kind == OptimizerKind::Adam {
        (g.clone(), 0.0)
    } else {
        (g.clone(), cfg.lr * cfg.weight_decay)
    };
    update_momentum(state, cfg.momentum, &g_eff);
    let Some(SecondMoment::Elementwise(v)) = state.second_moment.as_mut() else {
        unreachable!("state checked before the step")
    };
    let b2 = cfg.beta2;
    for (vi, &gi) in v.data_mut().iter_mut().zip(g_eff.data()) {
        *vi = b2 * *vi + (1.0 - b2) * gi * gi;
    }
    let t = (state.t + 1) as i32;
    let c1 = 1.0 - cfg.momentum.powi(t);
    let c2 = 1.0 - b2.powi(t);
    let o = state.momentum.zip_map(v, |m, v| (m / c1) / ((v / c2).sqrt() + cfg.eps));
    let w_next = descend(w, decay, cfg.lr, &o);
    (w_next, trace(kind, o, 1.0, cfg.lr, None))
}

/// Direction of a spectral stepper from the momentum, with its exact
/// singular values when an SVD was taken.
fn spectral_direction(cfg: &OptimizerConfig, kind: OptimizerKind, m: &Matrix) -> Result<(Matrix, Option<Vec<f64>>)> {
    Ok(match kind {
        OptimizerKind::MuonNs | OptimizerKind::NorMuon => (quintic(m, &cfg.ns), None),
        OptimizerKind::HtMuonNs => {
            let rounds = root_rounds(cfg.power)?;
            let root = root_unchecked(&m.gram(), rounds, &cfg.ns);
            (quintic(m, &cfg.ns).matmul(&root), None)
        }
        OptimizerKind::HtMuonHt => {
            let f = svd(m)?;
            let alpha = cfg.ht_alpha;
            let sv: Vec<f64> = f
                .sigma
                .iter()
                .enumerate()
                .map(|(i, &s)| if s > 0.0 { ((i + 1) as f64).powf(-alpha) } else { 0.0 })
                .collect();
            (f.recompose_with(|i, _| sv[i]), Some(sv))
        }
        _ => {
            let p = if kind == OptimizerKind::MuonSvd { 0.0 } else { cfg.power };
            let f = svd(m)?;
            let sv = f.sigma.iter().map(|&s| spectral_power(s, p)).collect();
            (power_from_svd(&f, p), Some(sv))
        }
    })
}

fn spectral(
    cfg: &OptimizerConfig,
    kind: OptimizerKind,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> Result<(Matrix, UpdateTrace)> {
    update_momentum(state, cfg.momentum, g);
    let (rows, cols) = w.shape();
    let m = &state.momentum;
    let (o, sv) = if m.is_zero() {
        (Matrix::zeros(rows, cols), Some(vec![0.0; rows.min(cols)]))
    } else {
        spectral_direction(cfg, kind, m)?
    };
    // The adaptive rate replaces both η and the shape scale.
    let (lr, s) = match cfg.adaptive_lr {
        Some(a) => (adaptive_lr_from(m, &o, a.lipschitz), 1.0),
        None => (cfg.lr, shape_scale(rows, cols)),
    };
    let w_next = descend(w, lr * cfg.weight_decay, lr * s, &o);
    Ok((w_next, trace(kind, o, s, lr, sv)))
}

fn normuon(
    cfg: &OptimizerConfig,
    kind: OptimizerKind,
    state: &mut OptimizerState,
    w: &Matrix,
    g: &Matrix,
) -> Result<(Matrix, UpdateTrace)> {
    update_momentum(state, cfg.momentum, g);
    let (rows, cols) = w.shape();
    let inner = if kind == OptimizerKind::NorMuon { OptimizerKind::NorMuon } else { OptimizerKind::HtMuon };
    let o = if state.momentum.is_zero() {
        Matrix::zeros(rows, cols)
    } else {
        spectral_direction(cfg, inner, &state.momentum)?.0
    };
    let Some(SecondMoment::Rows(v)) = state.second_moment.as_mut() else {
        unreachable!("state checked before the step")
    };
    let b2 = cfg.beta2;
    let mut o_hat = o;
    for (i, vi) in v.iter_mut().enumerate() {
        let row = o_hat.row_mut(i);
        let mean_sq = row.iter().map(|x| x * x).sum::<f64>() / cols as f64;
        *vi = b2 * *vi + (1.0 - b2) * mean_sq;
        let denom = vi.sqrt() + cfg.eps;
        row.iter_mut().for_each(|x| *x /= denom);
    }
    let norm = o_hat.frobenius_norm();
    let lr = if norm > 0.0 { 0.2 * cfg.lr * ((rows * cols) as f64).sqrt() / norm } else { 0.0 };
    let w_next = descend(w, cfg.lr * cfg.weight_decay, lr, &o_hat);
    Ok((w_next, trace(kind, o_hat, 1.0, lr, None)))
}
