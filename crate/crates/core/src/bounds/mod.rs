//! Empirical certificates for the power bounds, linear growth and gradient
//! bounds, and the eigenfunction subsolution on an interval.

mod certificate;
mod interval;

pub use certificate::{
    check_gradient, check_linear_growth, check_lower_power, check_upper_power, BoundCertificate,
    CertificateKind, SampleSource, REFINEMENT_TOL,
};
pub use interval::{build_interval_subsolution, IntervalSubsolution};
