use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::GammaParam;

/// State `(t, v, v')` of the regular ODE, valid while `v > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub t: f64,
    pub v: f64,
    pub dv: f64,
}

impl OdeState {
    pub fn new(t: f64, v: f64, dv: f64) -> Result<Self> {
        if !(v > 0.0) || !t.is_finite() || !dv.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ODE state needs finite t, dv and v > 0, got ({t}, {v}, {dv})"
            )));
        }
        Ok(Self { t, v, dv })
    }
}

/// Two-term start-up state together with its size and accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub state: OdeState,
    /// `b t^{s−α} / C_γ`, the correction relative to the leading term.
    pub correction: f64,
    /// `(−v'' − v^{−γ}) / v^{−γ}` of the truncated series.
    pub residual: f64,
}

/// Growing root `s` of `s(s−1) = 2γ(γ−1)/(γ+1)^2`.
pub fn indicial_exponent(g: GammaParam) -> f64 {
    let gam = g.gamma();
    let gp1 = gam + 1.0;
    0.5 * (1.0 + (1.0 + 8.0 * gam * (gam - 1.0) / (gp1 * gp1)).sqrt())
}

/// Coefficients of `v = C t^α + b t^s + c₂ b² t^q + …` at the origin.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Series {
    pub c: f64,
    pub a: f64,
    pub s: f64,
    pub q: f64,
    pub c2: f64,
    /// `E = kappa · b` for the solution with coefficient `b`.
    pub kappa: f64,
}

impl Series {
    pub fn new(g: GammaParam) -> Self {
        let c = g.c_gamma();
        let a = g.alpha_pow();
        let gam = g.gamma();
        let s = indicial_exponent(g);
        let q = 2.0 * s - a;
        let k = s * (s - 1.0);
        let cmg = c.powf(-gam);
        let c2 = gam * (gam + 1.0) * cmg / (c * c) / (2.0 * (k - q * (q - 1.0)));
        Self {
            c,
            a,
            s,
            q,
            c2,
            kappa: c * a * s + cmg,
        }
    }

    /// Value and derivative of the three-term series at distance `d > 0`.
    pub fn eval(&self, b: f64, d: f64) -> (f64, f64) {
        let ta = d.powf(self.a);
        let ts = d.powf(self.s);
        let tq = d.powf(self.q);
        let cb = self.c2 * b * b;
        (
            self.c * ta + b * ts + cb * tq,
            (self.c * self.a * ta + b * self.s * ts + cb * self.q * tq) / d,
        )
    }

    /// Distance `d` at which the series reaches `v`.
    pub fn invert(&self, b: f64, v: f64) -> f64 {
        let mut d = (v / self.c).powf(1.0 / self.a);
        for _ in 0..60 {
            let (f, df) = self.eval(b, d);
            let step = (f - v) / df;
            let next = (d - step).max(0.1 * d);
            if (next - d).abs() <= 1e-15 * d {
                d = next;
                break;
            }
            d = next;
        }
        d
    }
}

/// Start-up abscissa keeping the correction at `1e−3` of the leading term,
/// clamped to `[1e−12, 0.1]`.
pub fn default_t_start(g: GammaParam, b: f64) -> f64 {
    let s = indicial_exponent(g);
    let t = (1e-3 * g.c_gamma() / b.max(1e-300)).powf(1.0 / (s - g.alpha_pow()));
    t.clamp(1e-12, 0.1)
}

/// `v = C_γ t^α + b t^s` and its derivative, with the relative residual of
/// the truncated series.
pub fn local_expansion(g: GammaParam, b: f64, t: f64) -> Result<Expansion> {
    if !(t > 0.0) || !t.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "expansion needs t > 0 and finite b, got t = {t}, b = {b}"
        )));
    }
    let c = g.c_gamma();
    let a = g.alpha_pow();
    let s = indicial_exponent(g);
    let eps = b / c * t.powf(s - a);
    if eps.abs() > 0.1 {
        return Err(Error::ExpansionWindow { t, ratio: eps.abs() });
    }
    let ta = t.powf(a);
    let ts = t.powf(s);
    let v = c * ta + b * ts;
    let dv = (c * a * ta + b * s * ts) / t;
    // (1 − γε − (1+ε)^{−γ}) / (1+ε)^{−γ}, without cancellation
    let gam = g.gamma();
    let pw = -gam * eps.ln_1p();
    let residual = -(pw.exp_m1() + gam * eps) / pw.exp();
    Ok(Expansion {
        state: OdeState { t, v, dv },
        correction: eps,
        residual,
    })
}

/// Start-up state from the three-term series.
pub(crate) fn series_state(g: GammaParam, b: f64, t: f64) -> Result<OdeState> {
    local_expansion(g, b, t)?;
    let (v, dv) = Series::new(g).eval(b, t);
    OdeState::new(t, v, dv)
}
