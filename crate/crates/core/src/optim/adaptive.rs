use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::specfun::power_transform;

/// `⟨M, ρ(M)⟩ / (L ‖ρ(M)‖²_F)` with `ρ(M) = U Σ^p Vᵀ`.
pub fn adaptive_lr(m: &Matrix, p: f64, lipschitz: f64) -> Result<f64> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::Domain(format!("lipschitz must be positive, got {lipschitz}")));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("momentum".into()));
    }
    if m.is_zero() {
        return Err(Error::ZeroMatrix("momentum"));
    }
    let rho = power_transform(m, p)?;
    Ok(adaptive_lr_from(m, &rho, lipschitz))
}

/// Same ratio for an already computed direction; zero for a zero direction.
pub(crate) fn adaptive_lr_from(m: &Matrix, o: &Matrix, lipschitz: f64) -> f64 {
    let denom = o.inner(o);
    if denom == 0.0 {
        0.0
    } else {
        m.inner(o) / (lipschitz * denom)
    }
}

/// Inputs to the momentum tracking-error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumBound {
    pub beta: f64,
    /// Gradient noise standard deviation.
    pub sigma: f64,
    pub batch: f64,
    /// Step count `t`.
    pub t: u32,
    pub rank: f64,
    /// Bound on the singular values of the momentum.
    pub sv_bound: f64,
    pub power: f64,
    pub lipschitz: f64,
    /// Largest step size used.
    pub eta: f64,
}

/// `√((1−β)/(1+β))·σ/√B + β^t·σ/√B + √r·l^p·β·L·η/(1−β)`, an upper bound on
/// `E‖∇f(W_t) − M_t‖_F`.
pub fn momentum_error_bound(b: &MomentumBound) -> Result<f64> {
    if !(0.0..1.0).contains(&b.beta) || b.batch <= 0.0 || b.sigma < 0.0 || b.rank < 0.0 {
        return Err(Error::Domain("invalid momentum bound inputs".into()));
    }
    let noise = b.sigma / b.batch.sqrt();
    let drift = b.rank.sqrt() * b.sv_bound.powf(b.power) * b.beta * b.lipschitz * b.eta / (1.0 - b.beta);
    Ok(((1.0 - b.beta) / (1.0 + b.beta)).sqrt() * noise + b.beta.powi(b.t as i32) * noise + drift)
}
