//! Rescaled isentropic compressible Euler system
//! `∂_t v + v·∇v + ε⁻¹∇c + γ̄c∇c = 0`, `∂_t c + v·∇c + ε⁻¹div v + γ̄c div v = 0`.

mod acoustic;
mod dispersion;
mod solver;
mod state;
mod trajectory;

pub use acoustic::{acoustic_propagator, gamma_upsilon, AcousticVariables};
pub use dispersion::{bessel_j0, radial_free_wave_decay, strichartz_scaling, DecayReport, HalfWave, RadialProfile};
pub use solver::{cfl_dt, nonlinear_rhs, step, step_with, StepOptions, BLOWUP_THRESHOLD};
pub use state::CompressibleState;
pub use trajectory::{eta, simulate, SimulationOptions, TrajectoryRecord, TrajectorySample};
