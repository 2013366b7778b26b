//! Function-space machinery: ball-sampled BMO-type norms, admissible
//! weights, Osgood functionals and Whitney coverings.

mod estimators;
mod osgood;
mod sampler;
mod weight;
mod whitney;

pub use estimators::{
    bmo_f_from_profile, bmo_f_gap, bmo_f_norm, bmo_norm, interpolation_check, lmo_f_from_profile, lmo_f_norm,
    log_lipschitz_global, log_lipschitz_norm, LogLipschitz,
};
pub use osgood::{osgood_bound, osgood_m, osgood_m_inverse, osgood_solve, OsgoodQuery, M_INVERSE_LIMIT};
pub use sampler::{ball_average, ball_oscillation, BallSampler, OscillationProfile};
pub use weight::{verify_class_f, ClassF, ClassFReport, VerifyBudget, WeightKind};
pub use whitney::{WhitneyBall, WhitneyCover, RATIO_BOUNDS};
