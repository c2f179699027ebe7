use serde::{Deserialize, Serialize};

use super::expansion::OdeState;
use crate::error::{Error, Result};
use crate::profiles::{energy, GammaParam, Profile1D, ProfileKind};

/// Numerical parameters of the start-up, the integration and the slope
/// matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShootSpec {
    /// Start-up abscissa; `None` picks it from `b`.
    pub t_start: Option<f64>,
    /// Coefficient of the growing mode `t^s` at the origin.
    pub b: f64,
    /// Far-field truncation.
    pub horizon: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Largest accepted sup-relative disagreement between the two slope
    /// routes.
    pub route_tol: f64,
}

impl Default for ShootSpec {
    fn default() -> Self {
        Self {
            t_start: None,
            b: 0.0,
            horizon: 1e4,
            rel_tol: 1e-12,
            abs_tol: 1e-16,
            max_steps: 200_000,
            route_tol: 1e-4,
        }
    }
}

impl ShootSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if let Some(t) = self.t_start {
            if !(t > 0.0) || !(t < self.horizon) {
                return bad(format!("need 0 < t_start < horizon, got {t}"));
            }
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || !(self.route_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive".into());
        }
        if !self.b.is_finite() {
            return bad(format!("b must be finite, got {}", self.b));
        }
        Ok(())
    }

    /// Floor at which backward integration stops.
    pub fn v_floor(&self) -> f64 {
        self.abs_tol.sqrt().max(1e-8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ReachedEnd,
    Floor,
}

/// Result of one integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Accepted points in increasing `t`.
    pub profile: Profile1D,
    pub stop: StopReason,
    /// Final state, in the direction of integration.
    pub end: OdeState,
    /// `max |E(t) − E(t₀)| / (1 + |E(t₀)|)` over accepted points.
    pub energy_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

/// Raw accepted points in the order they were produced.
#[derive(Debug, Clone)]
pub(crate) struct RawPath {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub stop: StopReason,
    pub energy_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl RawPath {
    pub fn last(&self) -> OdeState {
        let n = self.t.len() - 1;
        OdeState {
            t: self.t[n],
            v: self.v[n],
            dv: self.dv[n],
        }
    }
}

// Dormand–Prince 5(4); the system is autonomous so the nodes c_i are unused
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Y = [f64; 2];

#[inline]
fn axpy(y: Y, h: f64, terms: &[(f64, Y)]) -> Y {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Adaptive Dormand–Prince integration of `v'' = −v^{−γ}` from `s0` towards
/// `t_end`. Backward runs stop once `v` drops to `floor`.
pub(crate) fn integrate_raw(
    g: GammaParam,
    s0: OdeState,
    t_end: f64,
    floor: Option<f64>,
    spec: &ShootSpec,
) -> Result<RawPath> {
    let gam = g.gamma();
    let rhs = |y: Y| -> Option<Y> {
        if y[0] > 0.0 {
            Some([y[1], -(-gam * y[0].ln()).exp()])
        } else {
            None
        }
    };
    let dir = if t_end >= s0.t { 1.0 } else { -1.0 };
    let e0 = energy(g, s0.v, s0.dv);
    let escale = 1.0 + e0.abs();

    let mut t = s0.t;
    let mut y: Y = [s0.v, s0.dv];
    let mut k1 = rhs(y).ok_or_else(|| Error::InvalidArgument("start value must be positive".into()))?;
    let mut path = RawPath {
        t: vec![t],
        v: vec![y[0]],
        dv: vec![y[1]],
        stop: StopReason::ReachedEnd,
        energy_drift: 0.0,
        steps: 0,
        rejected: 0,
    };
    let clamp = |t: f64, y: Y| -> f64 {
        let mut hmax = f64::INFINITY;
        if dir > 0.0 && t > 0.0 {
            hmax = 0.25 * t;
        }
        if y[1] != 0.0 {
            hmax = hmax.min(0.25 * y[0] / y[1].abs());
        }
        hmax
    };
    let mut h = 0.01 * clamp(t, y).min((t_end - t).abs());
    if dir > 0.0 && t <= 0.0 && !h.is_finite() {
        h = 1e-3 * (t_end - t).abs();
    }

    while dir * (t_end - t) > 0.0 {
        if path.steps + path.rejected >= spec.max_steps {
            return Err(Error::StepLimit {
                max_steps: spec.max_steps,
                t,
            });
        }
        let remaining = (t_end - t).abs();
        let hc = h.min(clamp(t, y));
        let last = hc >= remaining;
        let hs = if last { remaining } else { hc };
        if !(hs > 4.0 * f64::EPSILON * t.abs()) || hs < 1e-300 {
            return Err(Error::StepUnderflow { t, h: hs });
        }
        let hd = dir * hs;

        let stages = (|| {
            let k2 = rhs(axpy(y, hd, &[(A21, k1)]))?;
            let k3 = rhs(axpy(y, hd, &[(A31, k1), (A32, k2)]))?;
            let k4 = rhs(axpy(y, hd, &[(A41, k1), (A42, k2), (A43, k3)]))?;
            let k5 = rhs(axpy(y, hd, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]))?;
            let k6 = rhs(axpy(
                y,
                hd,
                &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            ))?;
            let yn = axpy(y, hd, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
            let k7 = rhs(yn)?;
            Some((k3, k4, k5, k6, k7, yn))
        })();
        let Some((k3, k4, k5, k6, k7, yn)) = stages else {
            h = 0.5 * hs;
            path.rejected += 1;
            continue;
        };
        let mut err: f64 = 0.0;
        for c in 0..2 {
            let e = hd * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c]);
            let sc = spec.abs_tol + spec.rel_tol * y[c].abs().max(yn[c].abs());
            err = err.max(e.abs() / sc);
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + hd };
            y = yn;
            k1 = k7;
            path.steps += 1;
            path.t.push(t);
            path.v.push(y[0]);
            path.dv.push(y[1]);
            let de = (energy(g, y[0], y[1]) - e0).abs() / escale;
            path.energy_drift = path.energy_drift.max(de);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs * fac;
            if dir < 0.0 {
                if let Some(fl) = floor {
                    if y[0] <= fl {
                        path.stop = StopReason::Floor;
                        return Ok(path);
                    }
                }
            }
        } else {
            path.rejected += 1;
            h = hs * (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(path)
}

/// Integrates from `s0` to `t_end` (either direction). Backward runs stop
/// early when `v` reaches `spec.v_floor()`.
pub fn integrate(g: GammaParam, s0: OdeState, t_end: f64, spec: &ShootSpec) -> Result<Trajectory> {
    spec.validate()?;
    if !t_end.is_finite() || t_end == s0.t {
        return Err(Error::InvalidArgument(format!(
            "t_end must be finite and differ from the start, got {t_end}"
        )));
    }
    let s0 = OdeState::new(s0.t, s0.v, s0.dv)?;
    let path = integrate_raw(g, s0, t_end, Some(spec.v_floor()), spec)?;
    let end = path.last();
    let (mut t, mut v, mut dv) = (path.t, path.v, path.dv);
    if t_end < s0.t {
        t.reverse();
        v.reverse();
        dv.reverse();
    }
    let profile = Profile1D::new(t, v, dv, g, ProfileKind::Raw, None)?;
    Ok(Trajectory {
        profile,
        stop: path.stop,
        end,
        energy_drift: path.energy_drift,
        steps: path.steps,
        rejected: path.rejected,
    })
}

/// `√(max(0, 2E))` with `E` the first integral at the last sample.
pub fn limit_slope(p: &Profile1D) -> f64 {
    (2.0 * p.last_energy()).max(0.0).sqrt()
}
