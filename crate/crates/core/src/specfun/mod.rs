//! Spectral matrix functions: Newton–Schulz orthogonalization, the
//! Newton–Schulz fractional root, the exact SVD power transform and the
//! Schatten-`q` steepest-descent direction.

mod newton_schulz;
mod power;
mod root;
mod steepest;

pub use newton_schulz::{newton_schulz5, NsConfig, QUINTIC_STEPS};
pub use power::{polar, power_transform, spectral_power};
pub use root::{ns_root, root_rounds, PSD_TOL};
pub use steepest::{
    conjugate_exponent, sampled_objective, schatten_steepest, verify_steepest, SteepestCheck,
    SteepestSolution, VERIFY_SLACK,
};

pub(crate) use newton_schulz::quintic;
pub(crate) use power::power_from_svd;
pub(crate) use root::root_unchecked;
