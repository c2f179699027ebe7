use serde::{Deserialize, Serialize};

use super::params::{BarrierSpec, GammaParam};
use super::profile::Profile1D;
use crate::error::{Error, Result};

/// Power solution `C_γ t^α` and its derivative. At `t = 0` the derivative
/// is reported as `+∞`.
pub fn eval_power(g: GammaParam, t: f64) -> (f64, f64) {
    debug_assert!(t >= 0.0);
    if t == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let a = g.alpha_pow();
    let tp = t.powf(a);
    let c = g.c_gamma();
    (c * tp, c * a * tp / t)
}

/// Supersolution `w(t) = C_γ (t + t^α)`.
pub fn eval_supersolution_w(g: GammaParam, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    g.c_gamma() * (t + t.powf(g.alpha_pow()))
}

/// `(w, w')` for the supersolution.
pub fn supersolution_w_state(g: GammaParam, t: f64) -> (f64, f64) {
    let (p, dp) = eval_power(g, t);
    (p + g.c_gamma() * t, dp + g.c_gamma())
}

/// Translated barrier `β P(x + ε)` built on the power solution `P`.
pub fn eval_barrier_w_beta(g: GammaParam, b: BarrierSpec, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    b.beta * eval_power(g, x + b.eps).0
}

/// `(value, derivative)` of the translated barrier.
pub fn barrier_state(g: GammaParam, b: BarrierSpec, x: f64) -> (f64, f64) {
    let (p, dp) = eval_power(g, x + b.eps);
    (b.beta * p, b.beta * dp)
}

/// `E = v'^2/2 − v^{1−γ}/(γ−1)`, conserved along solutions of `−v'' = v^{−γ}`.
pub fn first_integral(g: GammaParam, v: f64, dv: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "first integral needs v > 0, got {v}"
        )));
    }
    Ok(energy(g, v, dv))
}

#[inline]
pub(crate) fn energy(g: GammaParam, v: f64, dv: f64) -> f64 {
    let gm1 = g.gamma() - 1.0;
    0.5 * dv * dv - (-gm1 * v.ln()).exp() / gm1
}

/// Element of the scaling group `v ↦ λ^{−2/(γ+1)} v(λ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    pub lambda: f64,
    /// Exponent `−2/(γ+1)` applied to values.
    pub alpha: f64,
}

impl ScalingMap {
    pub fn new(g: GammaParam, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scaling factor must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            alpha: -g.alpha_pow(),
        })
    }

    /// Applying `self` and then `other` is the map with `λ = λ₁λ₂`.
    pub fn then(self, other: ScalingMap) -> ScalingMap {
        ScalingMap {
            lambda: self.lambda * other.lambda,
            alpha: self.alpha,
        }
    }

    pub fn value_factor(&self) -> f64 {
        self.lambda.powf(self.alpha)
    }

    pub fn deriv_factor(&self) -> f64 {
        self.lambda.powf(1.0 + self.alpha)
    }

    /// Factor applied to the slope at infinity, `λ^{(γ−1)/(γ+1)}`.
    pub fn slope_factor(&self) -> f64 {
        self.deriv_factor()
    }

    /// The `λ` that maps limit slope `from` to `to`.
    pub fn for_slopes(g: GammaParam, from: f64, to: f64) -> Result<Self> {
        if !(from > 0.0 && to > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "slopes must be positive, got {from} and {to}"
            )));
        }
        let e = (g.gamma() + 1.0) / (g.gamma() - 1.0);
        Self::new(g, (to / from).powf(e))
    }

    pub fn apply(&self, p: &Profile1D) -> Profile1D {
        let lam = self.lambda;
        let vf = self.value_factor();
        let df = self.deriv_factor();
        let grid = p.grid().iter().map(|&t| t / lam).collect();
        let values = p.values().iter().map(|&v| v * vf).collect();
        let derivs = p.derivs().iter().map(|&d| d * df).collect();
        Profile1D::from_parts_unchecked(
            grid,
            values,
            derivs,
            p.gamma(),
            p.kind(),
            p.limit_slope().map(|m| m * df),
        )
    }
}

/// `t ↦ λ^{−2/(γ+1)} p(λt)`, sampled on the transformed grid `t_i/λ`.
pub fn rescale(p: &Profile1D, lambda: f64) -> Result<Profile1D> {
    Ok(ScalingMap::new(p.gamma(), lambda)?.apply(p))
}
