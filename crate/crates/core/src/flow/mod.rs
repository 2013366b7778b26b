//! Lagrangian flow maps of stored velocity histories: trajectories,
//! Jacobians, Hölder regularity, transport reconstruction and the
//! calibrated evaluation of the weighted BMO propagation bound.

mod bounds;
mod checks;
mod history;
mod map;
mod transport;

pub use bounds::{bmo_f_lp, bound_shape, calibrate, calibrated_ratios, theorem_bound_eval, BoundOptions, BoundTerms};
pub use checks::{g_psi, regularity_check, Probes, RegularityReport};
pub use history::{interpolate, VelocityHistory, CHANNELS};
pub use map::{
    backward_map, integrate_flow, integrate_lattice, inverse_flow, map_points, FlowMap, FlowOptions, Lattice, PointMap,
};
pub use transport::{grid_points, transport_reconstruct, Transported};
