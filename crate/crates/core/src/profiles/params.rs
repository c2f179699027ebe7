use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Singularity exponent `γ > 1` together with the exponents and the constant
/// of the explicit power solution `C_γ t^{2/(γ+1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GammaParam {
    gamma: f64,
    alpha_pow: f64,
    grad_exp: f64,
    c_gamma: f64,
}

impl GammaParam {
    pub fn new(gamma: f64) -> Result<Self> {
        let c_gamma = c_gamma(gamma)?;
        let alpha_pow = 2.0 / (gamma + 1.0);
        Ok(Self {
            gamma,
            alpha_pow,
            grad_exp: (1.0 - gamma) / (gamma + 1.0),
            c_gamma,
        })
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Exponent `2/(γ+1)` of the power solution.
    #[inline]
    pub fn alpha_pow(&self) -> f64 {
        self.alpha_pow
    }

    /// Exponent `(1−γ)/(γ+1)` of its derivative.
    #[inline]
    pub fn grad_exp(&self) -> f64 {
        self.grad_exp
    }

    #[inline]
    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }

    /// Exponent `(γ−1)/(γ+1)` by which the far-field slope scales under the
    /// scaling group.
    #[inline]
    pub fn slope_exp(&self) -> f64 {
        1.0 - self.alpha_pow
    }

    /// `u^{-γ}`.
    #[inline]
    pub fn source(&self, u: f64) -> f64 {
        u.powf(-self.gamma)
    }
}

impl TryFrom<f64> for GammaParam {
    type Error = Error;

    fn try_from(gamma: f64) -> Result<Self> {
        GammaParam::new(gamma)
    }
}

impl From<GammaParam> for f64 {
    fn from(g: GammaParam) -> f64 {
        g.gamma
    }
}

/// `C_γ = ((γ+1)² / (2γ−2))^{1/(γ+1)}`.
///
/// Evaluated through logarithms and polished with one Newton step on
/// `C^{γ+1}(2γ−2) = (γ+1)²`, which keeps the defining identity at round-off
/// level even for `γ` close to 1.
pub fn c_gamma(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma <= 1.0 {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let gp1 = gamma + 1.0;
    let two_gm2 = 2.0 * gamma - 2.0;
    let c0 = ((2.0 * gp1.ln() - two_gm2.ln()) / gp1).exp();
    let cg = c0.powf(gamma);
    let f = cg * c0 * two_gm2 - gp1 * gp1;
    let df = gp1 * cg * two_gm2;
    Ok(c0 - f / df)
}

/// Parameters `(β, ε)` of the translated supersolution `β w(x_N + ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub beta: f64,
    pub eps: f64,
}

impl BarrierSpec {
    pub fn new(beta: f64, eps: f64) -> Result<Self> {
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "barrier beta must be >= 1, got {beta}"
            )));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "barrier translation must be >= 0, got {eps}"
            )));
        }
        Ok(Self { beta, eps })
    }
}

impl Default for BarrierSpec {
    fn default() -> Self {
        Self { beta: 1.0, eps: 0.0 }
    }
}

/// Strip `{0 < x_N ≤ height}` next to the boundary, optionally with the
/// supremum `theta` of the solution on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub height: f64,
    pub theta: Option<f64>,
}

impl StripSpec {
    pub fn new(height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "strip height must be positive, got {height}"
            )));
        }
        Ok(Self {
            height,
            theta: None,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "strip bound theta must be positive, got {theta}"
            )));
        }
        self.theta = Some(theta);
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_gamma_at_or_below_one() {
        assert!(matches!(c_gamma(1.0), Err(Error::GammaOutOfRange(_))));
        assert!(matches!(c_gamma(0.5), Err(Error::GammaOutOfRange(_))));
        assert!(GammaParam::new(f64::NAN).is_err());
        assert!(GammaParam::new(1.0 + 1e-9).is_ok());
    }

    #[test]
    fn closed_form_values() {
        assert!((c_gamma(3.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((c_gamma(2.0).unwrap() - 4.5f64.cbrt()).abs() < 1e-15);
        assert!((c_gamma(2.0).unwrap() - 1.650_963_6).abs() < 1e-7);
    }

    #[test]
    fn exponents() {
        let g = GammaParam::new(2.0).unwrap();
        assert!((g.alpha_pow() - 2.0 / 3.0).abs() < 1e-16);
        assert!((g.grad_exp() - (g.alpha_pow() - 1.0)).abs() < 1e-16);
        assert!(g.alpha_pow() > 0.0 && g.alpha_pow() < 1.0);
    }

    #[test]
    fn serde_as_number() {
        let g = GammaParam::new(3.0).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "3.0");
        let back: GammaParam = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GammaParam>("0.5").is_err());
    }

    #[test]
    fn barrier_and_strip_validation() {
        assert!(BarrierSpec::new(0.9, 0.0).is_err());
        assert!(BarrierSpec::new(1.0, -0.1).is_err());
        assert!(BarrierSpec::new(2.0, 0.5).is_ok());
        assert!(StripSpec::new(0.0).is_err());
        assert!(StripSpec::new(1.0).unwrap().with_theta(-1.0).is_err());
    }
}
