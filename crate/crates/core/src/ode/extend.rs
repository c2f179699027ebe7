use super::expansion::{indicial_exponent, OdeState, Series};
use super::integrate::{integrate_raw, limit_slope, RawPath, ShootSpec, StopReason};
use crate::error::{Error, Result};
use crate::profiles::{energy, Profile1D, ProfileKind};

/// Profile continued down to its zero and translated so that `ṽ(0) = 0`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub profile: Profile1D,
    /// Position of the zero in the original coordinate.
    pub tau0: f64,
    /// Fitted coefficient of `t^s` at the new origin.
    pub b_fit: f64,
    /// Largest relative misfit of the series over the fitted points.
    pub fit_residual: f64,
}

/// Continues `p` backwards from its leftmost state to the zero `τ₀` and
/// returns `t ↦ p(t + τ₀)`.
///
/// The backward run is done twice. The first pass in the original
/// coordinate stops at `10^{−3} v(t₀)` and gives an estimate `τ̂` of the
/// zero. The second pass restarts in `σ = t − τ̂` so that distances to the
/// zero keep full relative precision, and its last decade is fitted by the
/// series `C_γ d^α + b d^s + c₂ b² d^q` in `(z, b)`.
pub fn extend_to_zero(p: &Profile1D, spec: &ShootSpec) -> Result<Extension> {
    spec.validate()?;
    let g = p.gamma();
    if p.grid()[0] == 0.0 {
        return Ok(identity_extension(p));
    }
    let s0 = OdeState::new(p.grid()[0], p.values()[0], p.derivs()[0])?;
    let ratio = s0.dv * s0.t / s0.v;
    if !(ratio > 1.0) {
        return Err(Error::TangentTest { ratio });
    }
    let sr = Series::new(g);
    let e = energy(g, s0.v, s0.dv);
    let b_est = e.max(0.0) / sr.kappa;

    let p1 = integrate_raw(g, s0, 0.0, Some(1e-3 * s0.v), spec)?;
    if p1.stop != StopReason::Floor {
        return Err(Error::Resolution(
            "backward integration reached t = 0 with v still positive".into(),
        ));
    }
    let sc = p1.last();
    let sigma_c = sr.invert(b_est, sc.v);
    let tau_hat = sc.t - sigma_c;

    let mut floor2 = spec.v_floor();
    if b_est > 0.0 {
        let d_eps = (1e-3 * sr.c / b_est).powf(1.0 / (sr.s - sr.a));
        floor2 = floor2.max(sr.eval(b_est, d_eps).0);
    }
    floor2 = floor2.min(0.1 * sc.v);
    let start = OdeState {
        t: sigma_c,
        v: sc.v,
        dv: sc.dv,
    };
    let p2 = integrate_raw(g, start, -sigma_c, Some(floor2), spec)?;
    if p2.stop != StopReason::Floor {
        return Err(Error::Resolution(format!(
            "second backward pass did not reach the floor {floor2:e}"
        )));
    }

    let fit = fit_tail(&sr, &p2, b_est)?;
    let tau0 = tau_hat + fit.z;
    if !(tau0 > 0.0 && tau0 < s0.t) {
        return Err(Error::Resolution(format!(
            "zero located at {tau0}, outside (0, {}]",
            s0.t
        )));
    }

    let mut grid = vec![0.0];
    let mut vals = vec![0.0];
    let mut ders = vec![f64::INFINITY];
    let mut push = |d: f64, v: f64, dv: f64, floor: f64| {
        let last = *grid.last().unwrap();
        if d > floor && d > last * (1.0 + 1e-12) {
            grid.push(d);
            vals.push(v);
            ders.push(dv);
        }
    };
    for i in (0..p2.t.len()).rev() {
        push(p2.t[i] - fit.z, p2.v[i], p2.dv[i], 1e-9 * p2.t[i].abs());
    }
    for i in (1..p1.t.len() - 1).rev() {
        push(p1.t[i] - tau0, p1.v[i], p1.dv[i], 1e-7 * p1.t[i]);
    }
    for i in 0..p.len() {
        push(p.grid()[i] - tau0, p.values()[i], p.derivs()[i], 1e-7 * p.grid()[i]);
    }
    let slope = p.limit_slope().unwrap_or_else(|| limit_slope(p));
    let kind = if slope > 0.0 {
        ProfileKind::LinearGrowth
    } else {
        p.kind()
    };
    let profile = Profile1D::new(grid, vals, ders, g, kind, Some(slope))?;
    Ok(Extension {
        profile,
        tau0,
        b_fit: fit.b,
        fit_residual: fit.residual,
    })
}

fn identity_extension(p: &Profile1D) -> Extension {
    let g = p.gamma();
    let b_fit = if p.len() > 1 {
        let (t1, v1) = (p.grid()[1], p.values()[1]);
        let b = (v1 - g.c_gamma() * t1.powf(g.alpha_pow())) / t1.powf(indicial_exponent(g));
        b.max(0.0)
    } else {
        0.0
    };
    Extension {
        profile: p.clone(),
        tau0: 0.0,
        b_fit,
        fit_residual: 0.0,
    }
}

struct TailFit {
    z: f64,
    b: f64,
    residual: f64,
}

/// Levenberg–Marquardt fit of the zero `z` and coefficient `b` to the last
/// decade of a backward run. Negative `b` is clamped to 0 and `z` refitted.
fn fit_tail(sr: &Series, path: &RawPath, b0: f64) -> Result<TailFit> {
    let n = path.t.len();
    let v_last = path.v[n - 1];
    let mut first = (0..n).find(|&i| path.v[i] <= 10.0 * v_last).unwrap_or(n - 1);
    first = first.min(n.saturating_sub(6));
    let pts: Vec<(f64, f64)> = (first..n).map(|i| (path.t[i], path.v[i])).collect();
    if pts.len() < 3 {
        return Err(Error::Resolution("too few points in the last decade".into()));
    }
    let z0 = path.t[n - 1] - sr.invert(b0, v_last);
    let mut fit = levenberg_marquardt(sr, &pts, z0, b0, false);
    if fit.b < 0.0 {
        fit = levenberg_marquardt(sr, &pts, fit.z, 0.0, true);
    }
    if !fit.residual.is_finite() {
        return Err(Error::Resolution("series fit diverged".into()));
    }
    Ok(fit)
}

fn residuals(sr: &Series, pts: &[(f64, f64)], z: f64, b: f64) -> Option<(Vec<f64>, Vec<[f64; 2]>)> {
    let mut r = Vec::with_capacity(pts.len());
    let mut jac = Vec::with_capacity(pts.len());
    for &(sig, v) in pts {
        let d = sig - z;
        if !(d > 0.0) {
            return None;
        }
        let (f, df) = sr.eval(b, d);
        r.push((f - v) / v);
        let dfb = d.powf(sr.s) + 2.0 * sr.c2 * b * d.powf(sr.q);
        jac.push([-df / v, dfb / v]);
    }
    Some((r, jac))
}

fn levenberg_marquardt(sr: &Series, pts: &[(f64, f64)], z0: f64, b0: f64, fix_b: bool) -> TailFit {
    let cost = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>();
    let (mut z, mut b) = (z0, b0);
    let Some((mut r, mut jac)) = residuals(sr, pts, z, b) else {
        return TailFit {
            z,
            b,
            residual: f64::INFINITY,
        };
    };
    let mut c = cost(&r);
    let mut mu = 1e-3;
    for _ in 0..200 {
        let (mut a00, mut a01, mut a11, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (ri, ji) in r.iter().zip(&jac) {
            a00 += ji[0] * ji[0];
            a01 += ji[0] * ji[1];
            a11 += ji[1] * ji[1];
            g0 += ji[0] * ri;
            g1 += ji[1] * ri;
        }
        let (dz, db) = if fix_b {
            (-g0 / (a00 * (1.0 + mu)), 0.0)
        } else {
            let m00 = a00 * (1.0 + mu);
            let m11 = a11 * (1.0 + mu);
            let det = m00 * m11 - a01 * a01;
            ((-g0 * m11 + g1 * a01) / det, (-g1 * m00 + g0 * a01) / det)
        };
        if !dz.is_finite() || !db.is_finite() {
            break;
        }
        match residuals(sr, pts, z + dz, b + db) {
            Some((rn, jn)) if cost(&rn) <= c => {
                let dc = c - cost(&rn);
                z += dz;
                b += db;
                r = rn;
                jac = jn;
                c = cost(&r);
                mu = (mu / 3.0).max(1e-12);
                if dc <= 1e-30 + 1e-14 * c {
                    break;
                }
            }
            _ => {
                mu *= 4.0;
                if mu > 1e14 {
                    break;
                }
            }
        }
    }
    let residual = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    TailFit { z, b, residual }
}
