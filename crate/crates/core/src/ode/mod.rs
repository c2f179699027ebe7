//! Integration of `−v'' = v^{−γ}` through the boundary singularity,
//! extension of solutions to their zero, and the solution with a prescribed
//! slope at infinity.

mod expansion;
mod extend;
mod integrate;
mod slope;

pub use expansion::{default_t_start, indicial_exponent, local_expansion, Expansion, OdeState};
pub(crate) use expansion::Series;
pub use extend::{extend_to_zero, Extension};
pub use integrate::{integrate, limit_slope, ShootSpec, StopReason, Trajectory};
pub use slope::{
    classify, route_a, route_b, seed_solution, solve_batch, solve_prescribed_slope, Classification,
    ProfileClass, RouteA, RouteB, SeedSpec, ShootReport,
};
