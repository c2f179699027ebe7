use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::GammaParam;

/// `w = C φ₁^{2/(γ+1)}` on `(center − radius, center + radius)` with
/// `φ₁(x) = cos(π (x − center) / (2 radius))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalSubsolution {
    pub center: f64,
    pub radius: f64,
    pub amplitude: f64,
    /// `π² / (4 radius²)`.
    pub lambda1: f64,
    pub gamma: GammaParam,
}

/// Points sampled when maximizing `α(x)`; odd so that the center is one.
const SAMPLES: usize = 10_001;
const TARGET: f64 = 1.0 - 1e-6;

impl IntervalSubsolution {
    fn k(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.radius)
    }

    /// `α(x) = 2C^{γ+1}(γ−1)/(γ+1)² |φ₁'|² + 2λ₁C^{γ+1}/(γ+1) φ₁²`, equal to
    /// `−w''/w^{−γ}`.
    pub fn alpha(&self, x: f64) -> f64 {
        alpha_at(self.gamma, self.amplitude, self.radius, self.k() * (x - self.center))
    }

    /// `max α` over the sample points of the closed interval.
    pub fn max_alpha(&self) -> f64 {
        max_alpha(self.gamma, self.amplitude, self.radius)
    }

    /// Value and derivative of `w`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let a = self.gamma.alpha_pow();
        let th = self.k() * (x - self.center);
        let phi = th.cos().max(0.0);
        let dphi = -self.k() * th.sin();
        let w = self.amplitude * phi.powf(a);
        (w, self.amplitude * a * phi.powf(a - 1.0) * dphi)
    }
}

fn alpha_at(g: GammaParam, amp: f64, radius: f64, theta: f64) -> f64 {
    let gam = g.gamma();
    let gp1 = gam + 1.0;
    let k = std::f64::consts::PI / (2.0 * radius);
    let cg = amp.powf(gp1);
    let dphi2 = (k * theta.sin()).powi(2);
    let phi2 = theta.cos().powi(2);
    2.0 * cg * (gam - 1.0) / (gp1 * gp1) * dphi2 + 2.0 * k * k * cg / gp1 * phi2
}

fn max_alpha(g: GammaParam, amp: f64, radius: f64) -> f64 {
    let half = std::f64::consts::FRAC_PI_2;
    (0..SAMPLES)
        .map(|k| {
            let th = -half + std::f64::consts::PI * k as f64 / (SAMPLES - 1) as f64;
            alpha_at(g, amp, radius, th)
        })
        .fold(0.0, f64::max)
}

/// Largest amplitude, found by bisection, with `max α < 1 − 10^{−6}`.
pub fn build_interval_subsolution(g: GammaParam, center: f64, radius: f64) -> Result<IntervalSubsolution> {
    if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite center and radius > 0, got {center}, {radius}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while max_alpha(g, hi, radius) < TARGET {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if max_alpha(g, mid, radius) < TARGET {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(IntervalSubsolution {
        center,
        radius,
        amplitude: lo,
        lambda1: (std::f64::consts::PI / (2.0 * radius)).powi(2),
        gamma: g,
    })
}
