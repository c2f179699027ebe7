//! Numerical laboratory for positive solutions of `−Δu = u^{−γ}` in the
//! half-space with zero boundary data.
//!
//! * [`profiles`]: closed forms, the scaling group and sampled 1-D profiles.
//! * [`ode`]: the singular ODE, extension to the zero and the solution with
//!   prescribed slope.
//! * [`bounds`]: empirical certificates for the power and linear bounds.
//! * [`halfplane`]: finite differences on truncated half-plane rectangles.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod halfplane;
pub mod io;
pub mod ode;
pub mod par;
pub mod profiles;

pub use error::{Error, Result};
pub use par::Parallelism;
pub use profiles::{GammaParam, Profile1D, ProfileKind};
