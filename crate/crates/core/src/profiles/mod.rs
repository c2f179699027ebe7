//! Closed-form objects: the power solution, the constant `C_γ`, the
//! supersolution `w`, the barrier family, the scaling group and the first
//! integral.

mod closed;
mod params;
mod profile;

pub use closed::{
    barrier_state, eval_barrier_w_beta, eval_power, eval_supersolution_w, first_integral,
    rescale, supersolution_w_state, ScalingMap,
};
pub(crate) use closed::energy;
pub use params::{c_gamma, BarrierSpec, GammaParam, StripSpec};
pub use profile::{Profile1D, ProfileKind};
