//! Steepest ascent of `trace(G̃ᵀΔW)` over the Schatten-`q` ball of radius
//! `δ`, in closed form, plus a sampling verifier for the closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::power::spectral_power;
use crate::error::{Error, Result};
use crate::matcore::{lq_norm, random, schatten_norm, svd, Matrix};

/// Slack allowed between the closed-form objective and sampled objectives.
pub const VERIFY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SteepestSolution {
    pub delta_w: Matrix,
    pub q: f64,
    pub delta: f64,
    /// `trace(G̃ᵀ ΔW*)`.
    pub objective: f64,
}

/// Hölder conjugate `p'` of `q` (`1/p' + 1/q = 1`); `q = ∞` maps to 1.
pub fn conjugate_exponent(q: f64) -> Result<f64> {
    if q.is_nan() || q <= 1.0 {
        return Err(Error::Domain(format!("trust-region exponent q must exceed 1, got {q}")));
    }
    Ok(if q.is_infinite() { 1.0 } else { q / (q - 1.0) })
}

fn check_inputs(g: &Matrix, q: f64, delta: f64) -> Result<f64> {
    let pc = conjugate_exponent(q)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("trust radius must be positive, got {delta}")));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("gradient".into()));
    }
    if g.is_zero() {
        return Err(Error::ZeroMatrix("gradient"));
    }
    Ok(pc)
}

/// `ΔW* = δ · ‖G̃‖_{p'}^{-p'/q} · U Σ^{p'-1} Vᵀ`.
pub fn schatten_steepest(g_tilde: &Matrix, q: f64, delta: f64) -> Result<SteepestSolution> {
    let pc = check_inputs(g_tilde, q, delta)?;
    let f = svd(g_tilde)?;
    let norm_pc = lq_norm(&f.sigma, pc);
    let exponent = if q.is_infinite() { 0.0 } else { pc / q };
    let c = delta / norm_pc.powf(exponent);
    let delta_w = f.recompose_with(|_, s| c * spectral_power(s, pc - 1.0));
    let objective = g_tilde.inner(&delta_w);
    Ok(SteepestSolution { delta_w, q, delta, objective })
}

/// Rescales `candidate` onto the sphere `‖·‖_q = δ` and returns
/// `trace(G̃ᵀ ·)` there. Zero candidates score `-∞`.
pub fn sampled_objective(g_tilde: &Matrix, candidate: &Matrix, q: f64, delta: f64) -> Result<f64> {
    g_tilde.ensure_same_shape(candidate)?;
    let norm = schatten_norm(candidate, q)?;
    if norm == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(g_tilde.inner(candidate) * (delta / norm))
}

#[derive(Debug, Clone, Serialize)]
pub struct SteepestCheck {
    pub q: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub closed_form: f64,
    pub max_sampled: f64,
    pub pass: bool,
}

/// Draws `n_samples` Gaussian matrices, projects each onto the `q`-sphere of
/// radius `δ`, and checks that none beats the closed-form objective.
pub fn verify_steepest(
    g_tilde: &Matrix,
    q: f64,
    delta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SteepestCheck> {
    check_inputs(g_tilde, q, delta)?;
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be positive".into()));
    }
    let closed_form = schatten_steepest(g_tilde, q, delta)?.objective;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_sampled = f64::NEG_INFINITY;
    for _ in 0..n_samples {
        let z = random::gaussian(g_tilde.rows(), g_tilde.cols(), &mut rng);
        max_sampled = max_sampled.max(sampled_objective(g_tilde, &z, q, delta)?);
    }
    Ok(SteepestCheck {
        q,
        delta,
        n_samples,
        closed_form,
        max_sampled,
        pass: closed_form >= max_sampled - VERIFY_SLACK,
    })
}
