use serde::{Deserialize, Serialize};

use super::expansion::{default_t_start, series_state, OdeState, Series};
use super::extend::extend_to_zero;
use super::integrate::{integrate_raw, limit_slope, ShootSpec};
use crate::error::{Error, Result};
use crate::par::Parallelism;
use crate::profiles::{energy, rescale, supersolution_w_state, GammaParam, Profile1D, ProfileKind, ScalingMap};

/// Seed of the scaling route: `v(t₀) = κ w(t₀)` and
/// `v'(t₀) = r · v(t₀)/t₀` with tangent ratio `r > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub t0: f64,
    pub kappa: f64,
    pub tangent_ratio: f64,
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self {
            t0: 1.0,
            kappa: 2.0,
            tangent_ratio: 2.0,
        }
    }
}

impl SeedSpec {
    pub fn with_kappa(kappa: f64) -> Self {
        Self {
            kappa,
            ..Self::default()
        }
    }

    /// Seed state, checked to lie strictly above the supersolution `w`.
    pub fn state(&self, g: GammaParam) -> Result<OdeState> {
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::InvalidArgument(format!("seed t0 must be positive, got {}", self.t0)));
        }
        let (w, dw) = supersolution_w_state(g, self.t0);
        let v = self.kappa * w;
        let dv = self.tangent_ratio * v / self.t0;
        if !(v > w && dv > dw) {
            return Err(Error::InvalidArgument(format!(
                "seed ({v}, {dv}) must lie above w = ({w}, {dw}) at t0 = {}",
                self.t0
            )));
        }
        OdeState::new(self.t0, v, dv)
    }
}

/// Cross-check of the two constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootReport {
    pub route_a_slope: f64,
    pub route_b_slope: f64,
    pub discrepancy_sup_rel: f64,
    pub tau0: f64,
    pub b_fit: f64,
    pub energy_drift: f64,
}

/// Scaling route: seed above `w`, extension to the zero, rescaling.
#[derive(Debug, Clone)]
pub struct RouteA {
    pub profile: Profile1D,
    /// Limit slope `L` of the seed solution.
    pub seed_slope: f64,
    pub lambda: f64,
    pub tau0: f64,
    pub b_fit: f64,
    pub fit_residual: f64,
    pub energy_drift: f64,
}

/// Shooting route on the coefficient `b` of the growing mode.
#[derive(Debug, Clone)]
pub struct RouteB {
    pub profile: Profile1D,
    pub b: f64,
    pub iterations: usize,
    pub energy_drift: f64,
}

fn check_slope(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "prescribed slope must be positive and finite, got {m}"
        )));
    }
    Ok(())
}

/// Builds the solution with slope `m` from a seed above `w`.
pub fn route_a(g: GammaParam, m: f64, seed: SeedSpec, spec: &ShootSpec) -> Result<RouteA> {
    check_slope(m)?;
    spec.validate()?;
    let s0 = seed.state(g)?;
    let e = energy(g, s0.v, s0.dv);
    if !(e > 0.0) {
        return Err(Error::Invariant(format!("seed above w has first integral {e} <= 0")));
    }
    let l = (2.0 * e).sqrt();
    let map = ScalingMap::for_slopes(g, l, m)?;
    let t_end = s0.t + map.lambda * spec.horizon;
    let fwd = integrate_raw(g, s0, t_end, None, spec)?;
    let seed_profile = Profile1D::new(fwd.t, fwd.v, fwd.dv, g, ProfileKind::Raw, Some(l))?;
    let ext = extend_to_zero(&seed_profile, spec)?;
    let scaled = map.apply(&ext.profile);
    let slope = limit_slope(&scaled);
    Ok(RouteA {
        profile: scaled
            .with_kind(ProfileKind::LinearGrowth)
            .with_limit_slope(Some(slope)),
        seed_slope: l,
        lambda: map.lambda,
        tau0: ext.tau0,
        b_fit: ext.b_fit,
        fit_residual: ext.fit_residual,
        energy_drift: fwd.energy_drift,
    })
}

/// Solution of the seed problem on `[t₀, t_end]`, in the original
/// coordinate.
pub fn seed_solution(g: GammaParam, seed: SeedSpec, t_end: f64, spec: &ShootSpec) -> Result<Profile1D> {
    spec.validate()?;
    let s0 = seed.state(g)?;
    if !(t_end > s0.t) {
        return Err(Error::InvalidArgument(format!("t_end must exceed t0, got {t_end}")));
    }
    let p = integrate_raw(g, s0, t_end, None, spec)?;
    let l = (2.0 * energy(g, s0.v, s0.dv)).max(0.0).sqrt();
    Profile1D::new(p.t, p.v, p.dv, g, ProfileKind::Raw, Some(l))
}

struct Shot {
    slope: f64,
    t: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
    drift: f64,
}

fn shoot(g: GammaParam, b: f64, spec: &ShootSpec) -> Result<Shot> {
    let ts = spec.t_start.unwrap_or_else(|| default_t_start(g, b));
    let s0 = series_state(g, b, ts)?;
    let p = integrate_raw(g, s0, spec.horizon, None, spec)?;
    let n = p.t.len() - 1;
    let slope = (2.0 * energy(g, p.v[n], p.dv[n])).max(0.0).sqrt();
    Ok(Shot {
        slope,
        t: p.t,
        v: p.v,
        dv: p.dv,
        drift: p.energy_drift,
    })
}

/// Secant iteration in `(ln b, ln L)` for the start-up coefficient giving
/// slope `m`. Slopes outside `[1e−3, 1e3]` are obtained by rescaling the
/// `m = 1` solution.
pub fn route_b(g: GammaParam, m: f64, spec: &ShootSpec) -> Result<RouteB> {
    check_slope(m)?;
    spec.validate()?;
    if !(1e-3..=1e3).contains(&m) {
        let base = route_b(g, 1.0, spec)?;
        let map = ScalingMap::for_slopes(g, 1.0, m)?;
        let profile = map.apply(&base.profile);
        let slope = limit_slope(&profile);
        let s = super::expansion::indicial_exponent(g);
        return Ok(RouteB {
            profile: profile.with_limit_slope(Some(slope)),
            b: base.b * map.lambda.powf(s - g.alpha_pow()),
            ..base
        });
    }
    let sr = Series::new(g);
    let target = m.ln();
    let mut x0 = (m * m / (2.0 * sr.kappa)).ln();
    let mut shot = shoot(g, x0.exp(), spec)?;
    let mut f0 = shot.slope.ln() - target;
    let mut x1 = x0 - 2.0 * f0;
    let mut iterations = 1;
    if f0.abs() > 1e-13 {
        loop {
            let s1 = shoot(g, x1.exp(), spec)?;
            iterations += 1;
            let f1 = s1.slope.ln() - target;
            shot = s1;
            if f1.abs() <= 1e-13 {
                break;
            }
            if iterations > 60 || !f1.is_finite() {
                return Err(Error::Shooting(format!(
                    "no convergence on b after {iterations} shots (slope {}, target {m}); horizon {} may be too short",
                    shot.slope, spec.horizon
                )));
            }
            let mut step = if f1 != f0 { -f1 * (x1 - x0) / (f1 - f0) } else { -2.0 * f1 };
            if !step.is_finite() {
                step = -2.0 * f1;
            }
            let step = step.clamp(-3.0, 3.0);
            x0 = x1;
            f0 = f1;
            x1 += step;
        }
    }
    let b = x1.exp();
    let mut grid = vec![0.0];
    let mut vals = vec![0.0];
    let mut ders = vec![f64::INFINITY];
    grid.extend_from_slice(&shot.t);
    vals.extend_from_slice(&shot.v);
    ders.extend_from_slice(&shot.dv);
    let profile = Profile1D::new(grid, vals, ders, g, ProfileKind::LinearGrowth, Some(shot.slope))?;
    Ok(RouteB {
        profile,
        b: if f0.abs() <= 1e-13 && iterations == 1 { x0.exp() } else { b },
        iterations,
        energy_drift: shot.drift,
    })
}

/// Unique solution with `v(0) = 0` and limit slope `m`.
///
/// Returns the scaling-route profile; the report carries the sup-relative
/// disagreement with the shooting route on `[0, 10]`, which must stay
/// below `spec.route_tol`.
pub fn solve_prescribed_slope(g: GammaParam, m: f64, spec: &ShootSpec) -> Result<(Profile1D, ShootReport)> {
    let a = route_a(g, m, SeedSpec::default(), spec)?;
    let b = route_b(g, m, spec)?;
    let discrepancy = a.profile.sup_rel_diff(&b.profile, 10.0);
    let report = ShootReport {
        route_a_slope: a.profile.limit_slope().unwrap_or(0.0),
        route_b_slope: b.profile.limit_slope().unwrap_or(0.0),
        discrepancy_sup_rel: discrepancy,
        tau0: a.tau0,
        b_fit: a.b_fit * a.lambda.powf(super::expansion::indicial_exponent(g) - g.alpha_pow()),
        energy_drift: a.energy_drift.max(b.energy_drift),
    };
    if !(discrepancy <= spec.route_tol) {
        return Err(Error::RouteDiscrepancy {
            discrepancy,
            threshold: spec.route_tol,
        });
    }
    Ok((a.profile, report))
}

/// Solves several `(γ, M)` cases, in parallel under `Parallelism::Rayon`.
pub fn solve_batch(
    cases: &[(GammaParam, f64)],
    spec: &ShootSpec,
    par: Parallelism,
) -> Vec<Result<(Profile1D, ShootReport)>> {
    par.map(cases, |&(g, m)| solve_prescribed_slope(g, m, spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum ProfileClass {
    Power,
    LinearGrowth { slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: ProfileClass,
    /// Sup-relative distance to the matched family member.
    pub sup_rel: f64,
}

/// Matches `p` against the power solution (slope 0) or the rescaled
/// canonical `M = 1` solution `canonical`, on `(0, min(t_max, p.t_max())]`.
///
/// The rescaled canonical profile must cover that range: a steep `p` maps
/// it far out on the canonical axis, and linear extrapolation there would
/// be compared instead of the solution. Use a long horizon for the
/// canonical profile when classifying steep profiles.
pub fn classify(p: &Profile1D, canonical: &Profile1D, t_max: f64) -> Result<Classification> {
    let g = p.gamma();
    if canonical.gamma() != g {
        return Err(Error::InvalidArgument("canonical profile has a different gamma".into()));
    }
    let t_max = t_max.min(p.t_max());
    let slope = limit_slope(p);
    if slope <= 1e-6 {
        let grid: Vec<f64> = p.grid().iter().copied().filter(|&t| t <= t_max).collect();
        let power = Profile1D::power(g, grid)?;
        return Ok(Classification {
            class: ProfileClass::Power,
            sup_rel: p.sup_rel_diff(&power, t_max),
        });
    }
    let c1 = canonical.limit_slope().unwrap_or_else(|| limit_slope(canonical));
    let map = ScalingMap::for_slopes(g, c1, slope)?;
    let member = rescale(canonical, map.lambda)?;
    if member.t_max() < t_max {
        return Err(Error::InsufficientData(format!(
            "rescaled canonical profile ends at {:e} < {t_max:e}",
            member.t_max()
        )));
    }
    Ok(Classification {
        class: ProfileClass::LinearGrowth { slope },
        sup_rel: p.sup_rel_diff(&member, t_max),
    })
}
