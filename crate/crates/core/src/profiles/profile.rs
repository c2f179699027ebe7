use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::closed::{energy, eval_power};
use super::params::GammaParam;
use crate::error::{Error, Result};
use crate::io::{finite_or_none, fmt_g15, parse_f64, split_fields};
use crate::ode::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Power,
    LinearGrowth,
    Raw,
}

/// Sampled one-dimensional profile `t ↦ v(t)` with stored derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile1D {
    grid: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    gamma: GammaParam,
    kind: ProfileKind,
    limit_slope: Option<f64>,
}

impl Profile1D {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
        gamma: GammaParam,
        kind: ProfileKind,
        limit_slope: Option<f64>,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("profile has no samples".into()));
        }
        if grid.len() != values.len() || grid.len() != derivs.len() {
            return Err(Error::InvalidArgument(format!(
                "profile arrays differ in length: {} / {} / {}",
                grid.len(),
                values.len(),
                derivs.len()
            )));
        }
        for i in 0..grid.len() {
            check_row(&grid, &values, &derivs, i).map_err(Error::InvalidArgument)?;
        }
        if let Some(m) = limit_slope {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "limit slope must be finite and >= 0, got {m}"
                )));
            }
        }
        Ok(Self::from_parts_unchecked(
            grid,
            values,
            derivs,
            gamma,
            kind,
            limit_slope,
        ))
    }

    pub(crate) fn from_parts_unchecked(
        grid: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
        gamma: GammaParam,
        kind: ProfileKind,
        limit_slope: Option<f64>,
    ) -> Self {
        Self {
            grid,
            values,
            derivs,
            gamma,
            kind,
            limit_slope,
        }
    }

    /// Power solution sampled on `grid`.
    pub fn power(g: GammaParam, grid: Vec<f64>) -> Result<Self> {
        let (values, derivs) = grid.iter().map(|&t| eval_power(g, t.max(0.0))).unzip();
        Self::new(grid, values, derivs, g, ProfileKind::Power, Some(0.0))
    }

    /// Power solution on `n + 1` uniform points of `[0, t_max]`.
    pub fn power_uniform(g: GammaParam, t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0) || n == 0 {
            return Err(Error::InvalidArgument(format!(
                "need t_max > 0 and n >= 1, got {t_max} and {n}"
            )));
        }
        let grid = (0..=n).map(|k| t_max * k as f64 / n as f64).collect();
        Self::power(g, grid)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    pub fn gamma(&self) -> GammaParam {
        self.gamma
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn limit_slope(&self) -> Option<f64> {
        self.limit_slope
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_limit_slope(mut self, m: Option<f64>) -> Self {
        self.limit_slope = m;
        self
    }

    /// Value and derivative at `t`.
    ///
    /// Cubic Hermite interpolation between samples. Between a sample at the
    /// origin and the first positive sample the series
    /// `C_γ t^α + b t^s + c₂ b² t^q` through the first positive sample is
    /// used, since
    /// the derivative is infinite at the origin. Outside the grid the profile
    /// is continued linearly.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.grid.len();
        if n == 1 || t <= self.grid[0] {
            if t == self.grid[0] || n == 1 {
                return (self.values[0], self.derivs[0]);
            }
            return (
                self.values[0] + self.derivs[0] * (t - self.grid[0]),
                self.derivs[0],
            );
        }
        if t >= self.grid[n - 1] {
            return (
                self.values[n - 1] + self.derivs[n - 1] * (t - self.grid[n - 1]),
                self.derivs[n - 1],
            );
        }
        let k = self.grid.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.grid[k], self.grid[k + 1]);
        if t == t0 {
            return (self.values[k], self.derivs[k]);
        }
        if !self.derivs[k].is_finite() {
            return self.eval_origin_model(t, t1, self.values[k + 1]);
        }
        hermite(
            t,
            t0,
            t1,
            self.values[k],
            self.values[k + 1],
            self.derivs[k],
            self.derivs[k + 1],
        )
    }

    fn eval_origin_model(&self, t: f64, t1: f64, v1: f64) -> (f64, f64) {
        let sr = Series::new(self.gamma);
        // b from C t1^α + b t1^s + c₂ b² t1^q = v1, root continuous in c₂
        let qa = sr.c2 * t1.powf(sr.q);
        let qb = t1.powf(sr.s);
        let qc = sr.c * t1.powf(sr.a) - v1;
        let disc = qb * qb - 4.0 * qa * qc;
        let b = if disc >= 0.0 {
            -2.0 * qc / (qb + disc.sqrt())
        } else {
            -qc / qb
        };
        sr.eval(b, t)
    }

    /// `sup |self − other| / |other|` over the union of both grids inside
    /// `(0, t_max]`.
    pub fn sup_rel_diff(&self, other: &Profile1D, t_max: f64) -> f64 {
        let mut worst = 0.0f64;
        let mut scan = |ts: &[f64]| {
            for &t in ts.iter().filter(|&&t| t > 0.0 && t <= t_max) {
                let a = self.eval(t).0;
                let b = other.eval(t).0;
                let d = (a - b).abs() / b.abs();
                if d.is_nan() {
                    worst = f64::INFINITY;
                } else {
                    worst = worst.max(d);
                }
            }
        };
        scan(&self.grid);
        scan(&other.grid);
        worst
    }

    /// Relative residual `|−v'' − v^{−γ}| / v^{−γ}` at interior samples,
    /// with `v''` taken from centered differences of the stored derivatives.
    pub fn ode_residual(&self) -> Vec<(f64, f64)> {
        let n = self.grid.len();
        let mut out = Vec::with_capacity(n.saturating_sub(2));
        for i in 1..n.saturating_sub(1) {
            let (dl, dr) = (self.derivs[i - 1], self.derivs[i + 1]);
            if !dl.is_finite() || !dr.is_finite() {
                continue;
            }
            let (tl, t, tr) = (self.grid[i - 1], self.grid[i], self.grid[i + 1]);
            // second-order accurate on nonuniform grids
            let hl = t - tl;
            let hr = tr - t;
            let d0 = self.derivs[i];
            let vpp = (hl * hl * (dr - d0) + hr * hr * (d0 - dl)) / (hl * hr * (hl + hr));
            let src = self.gamma.source(self.values[i]);
            out.push((t, (-vpp - src).abs() / src));
        }
        out
    }

    /// True if the stored derivatives strictly decrease.
    pub fn derivs_strictly_decreasing(&self) -> bool {
        self.derivs.windows(2).all(|w| w[1] < w[0])
    }

    /// First integral at the last sample.
    pub fn last_energy(&self) -> f64 {
        let n = self.grid.len() - 1;
        energy(self.gamma, self.values[n], self.derivs[n])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,v,dv")?;
        for i in 0..self.grid.len() {
            writeln!(
                w,
                "{},{},{}",
                fmt_g15(self.grid[i]),
                fmt_g15(self.values[i]),
                fmt_g15(self.derivs[i])
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the `t,v,dv` format. Errors carry the 1-based line number.
    pub fn read_csv<R: BufRead>(r: R, gamma: GammaParam, kind: ProfileKind) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        let mut derivs = Vec::new();
        let mut saw_header = false;
        for (k, line) in r.lines().enumerate() {
            let lineno = k + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line.replace(' ', "") != "t,v,dv" {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header 't,v,dv', found '{line}'"),
                    });
                }
                saw_header = true;
                continue;
            }
            let f = split_fields(line, lineno, 3)?;
            grid.push(parse_f64(f[0], lineno)?);
            values.push(parse_f64(f[1], lineno)?);
            derivs.push(parse_f64(f[2], lineno)?);
            let i = grid.len() - 1;
            check_row(&grid, &values, &derivs, i).map_err(|msg| Error::Parse { line: lineno, msg })?;
        }
        if !saw_header {
            return Err(Error::Parse {
                line: 1,
                msg: "empty input, expected header 't,v,dv'".into(),
            });
        }
        if grid.is_empty() {
            return Err(Error::Parse {
                line: 2,
                msg: "no data rows".into(),
            });
        }
        Self::new(grid, values, derivs, gamma, kind, None)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let env = ProfileJson {
            gamma: self.gamma.gamma(),
            kind: self.kind,
            limit_slope: self.limit_slope,
            grid_meta: GridMeta {
                n: self.grid.len(),
                t_min: self.t_min(),
                t_max: self.t_max(),
            },
            t: self.grid.clone(),
            v: self.values.clone(),
            dv: self.derivs.iter().map(|&d| finite_or_none(d)).collect(),
        };
        serde_json::to_value(env).expect("profile serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let env: ProfileJson = serde_json::from_value(v.clone())?;
        let g = GammaParam::new(env.gamma)?;
        let dv = env
            .dv
            .into_iter()
            .map(|d| d.unwrap_or(f64::INFINITY))
            .collect();
        Self::new(env.t, env.v, dv, g, env.kind, env.limit_slope)
    }
}

#[derive(Serialize, Deserialize)]
struct GridMeta {
    n: usize,
    t_min: f64,
    t_max: f64,
}

#[derive(Serialize, Deserialize)]
struct ProfileJson {
    gamma: f64,
    kind: ProfileKind,
    limit_slope: Option<f64>,
    grid_meta: GridMeta,
    t: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<Option<f64>>,
}

fn check_row(grid: &[f64], values: &[f64], derivs: &[f64], i: usize) -> std::result::Result<(), String> {
    let (t, v, d) = (grid[i], values[i], derivs[i]);
    if !t.is_finite() || t < 0.0 {
        return Err(format!("grid point {t} must be finite and >= 0"));
    }
    if i > 0 && !(t > grid[i - 1]) {
        return Err(format!(
            "grid not strictly increasing: {} then {t}",
            grid[i - 1]
        ));
    }
    if !v.is_finite() {
        return Err(format!("value at t = {t} is not finite"));
    }
    if t > 0.0 && !(v > 0.0) {
        return Err(format!("value at t = {t} must be positive, got {v}"));
    }
    if t == 0.0 && v != 0.0 {
        return Err(format!("value at t = 0 must be 0, got {v}"));
    }
    if d.is_nan() || (t > 0.0 && !d.is_finite()) {
        return Err(format!("derivative at t = {t} must be finite, got {d}"));
    }
    Ok(())
}

#[inline]
fn hermite(t: f64, t0: f64, t1: f64, v0: f64, v1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * v0 + h10 * h * d0 + h01 * v1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    (v, dh00 * v0 + dh10 * d0 + dh01 * v1 + dh11 * d1)
}
