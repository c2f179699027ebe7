use serde::{Deserialize, Serialize};

use super::boundary::BoundaryData;
use super::grid::{BoundaryMode, Field2D, Grid2D};
use crate::error::{Error, Result};
use crate::ode::Series;
use crate::par::Parallelism;
use crate::profiles::{eval_power, BarrierSpec, GammaParam};

/// Treatment of the boundary layer `u ~ C_γ x_N^{2/(γ+1)}` in the
/// discretization.
///
/// The plain five-point scheme loses one order near the bottom: its local
/// error at the first rows is `O(1)` relative to the source and pollutes the
/// whole field at `O(h)`. The correction adds `S'' − δ²_z S` to the source,
/// with `S` the local series of each column, which removes that error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    /// Plain five-point scheme.
    Off,
    /// `S = C_γ x_N^α`.
    Leading,
    /// `S = C_γ x_N^α + b x_N^s + c₂ b² x_N^q`, with `b` per column estimated
    /// from the computed field by deferred correction.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSpec {
    /// Stop when the largest relative Newton update is below this.
    pub tol: f64,
    pub max_newton: usize,
    /// Relative tolerance of the inner SOR solves.
    pub inner_eta: f64,
    pub max_sweeps: usize,
    pub correction: Correction,
    /// Deferred-correction passes for the series coefficients.
    pub max_passes: usize,
    pub b_tol: f64,
    /// Sub-barrier `c P` starts from this `c`.
    pub sub_fraction: f64,
    /// Super-barrier `β P(x_N + ε)`; `None` picks the smallest admissible `β`.
    pub barrier: Option<BarrierSpec>,
    pub parallelism: Parallelism,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_newton: 60,
            inner_eta: 1e-6,
            max_sweeps: 100_000,
            correction: Correction::Series,
            max_passes: 12,
            b_tol: 1e-9,
            sub_fraction: 0.5,
            barrier: None,
            parallelism: Parallelism::default(),
        }
    }
}

impl SolverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !(self.inner_eta > 0.0) || !(self.b_tol > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        if self.max_newton == 0 || self.max_sweeps == 0 || self.max_passes == 0 {
            return Err(Error::InvalidArgument("iteration limits must be positive".into()));
        }
        if !(self.sub_fraction > 0.0 && self.sub_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sub_fraction must lie in (0, 1], got {}",
                self.sub_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    /// Scaled sup-norm residual before each Newton step and after the last.
    pub residual_history: Vec<f64>,
    /// Every Newton update was nonnegative (iterates increase).
    pub monotone: bool,
    /// Residual history non-increasing after the first step.
    pub residual_monotone: bool,
    /// No projection onto `[sub, super]` after the first step.
    pub ordered_between_barriers: bool,
    pub iterations: usize,
    pub final_change: f64,
    pub projections: usize,
    pub sweeps: usize,
    /// Deferred-correction passes before the reported one.
    pub passes: usize,
    pub beta: f64,
    pub sub_fraction: f64,
    /// Series coefficient per column (0 unless the series correction is on).
    pub b_columns: Vec<f64>,
}

/// Sub- and super-barrier fields.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub sub: Field2D,
    pub sup: Field2D,
    pub beta: f64,
    pub sub_fraction: f64,
}

/// Discrete problem `−Δ_h u = u^{−γ} + τ` with Dirichlet data.
pub(crate) struct Problem<'a> {
    g: GammaParam,
    grid: Grid2D,
    data: &'a BoundaryData,
    tau: Vec<f64>,
    par: Parallelism,
}

impl<'a> Problem<'a> {
    fn new(g: GammaParam, grid: Grid2D, data: &'a BoundaryData, correction: Correction, b: &[f64], par: Parallelism) -> Self {
        let tau = build_tau(g, &grid, correction, b);
        Self { g, grid, data, tau, par }
    }

    /// `F(u)` at interior nodes (0 elsewhere).
    fn residual(&self, u: &[f64], out: &mut [f64]) {
        let gr = self.grid;
        let n = gr.row_len();
        let ih2 = 1.0 / (gr.h * gr.h);
        let gam = self.g.gamma();
        let tau = &self.tau;
        self.par.for_each_chunk_mut(out, n, |j, row| {
            if j == 0 || j == gr.nz {
                row.iter_mut().for_each(|x| *x = 0.0);
                return;
            }
            row[0] = 0.0;
            row[gr.nx] = 0.0;
            let k0 = j * n;
            for (i, r) in row.iter_mut().enumerate().take(gr.nx).skip(1) {
                let k = k0 + i;
                let lap = (4.0 * u[k] - u[k - 1] - u[k + 1] - u[k - n] - u[k + n]) * ih2;
                *r = lap - (-gam * u[k].ln()).exp() - tau[k];
            }
        });
    }

    fn scaled_norm(&self, f: &[f64], u: &[f64]) -> f64 {
        let gr = self.grid;
        let n = gr.row_len();
        let h2 = gr.h * gr.h;
        self.par.max_over(gr.nz.saturating_sub(1), |jj| {
            let j = jj + 1;
            (1..gr.nx)
                .map(|i| f[j * n + i].abs() * h2 / (4.0 * u[j * n + i]))
                .fold(0.0, f64::max)
        })
    }

    fn barrier_field(&self, scale: f64, eps: f64) -> Vec<f64> {
        let gr = self.grid;
        let mut u = vec![0.0; gr.n_nodes()];
        for j in 1..=gr.nz {
            let p = scale * eval_power(self.g, gr.z(j) + eps).0;
            u[j * gr.row_len()..(j + 1) * gr.row_len()].iter_mut().for_each(|x| *x = p);
        }
        u
    }

    /// Barrier values on the interior with the Dirichlet data on the edges.
    fn with_data(&self, mut u: Vec<f64>) -> Vec<f64> {
        self.data.impose(&self.grid, &mut u);
        u
    }

    fn boundary_ratio_max(&self, eps: f64) -> f64 {
        let gr = self.grid;
        let mut m: f64 = 0.0;
        for j in 1..=gr.nz {
            let p = eval_power(self.g, gr.z(j) + eps).0;
            m = m.max(self.data.left[j] / p).max(self.data.right[j] / p);
        }
        let p = eval_power(self.g, gr.height + eps).0;
        self.data.top.iter().fold(m, |m, v| m.max(v / p))
    }

    fn boundary_ratio_min(&self) -> f64 {
        let gr = self.grid;
        let mut m = f64::INFINITY;
        for j in 1..=gr.nz {
            let p = eval_power(self.g, gr.z(j)).0;
            m = m.min(self.data.left[j] / p).min(self.data.right[j] / p);
        }
        let p = eval_power(self.g, gr.height).0;
        self.data.top.iter().fold(m, |m, v| m.min(v / p))
    }

    /// Smallest `F` over the interior for the barrier with the data imposed.
    fn residual_extreme(&self, u: &[f64], lowest: bool) -> f64 {
        let mut f = vec![0.0; u.len()];
        self.residual(u, &mut f);
        let gr = self.grid;
        let n = gr.row_len();
        let mut ext = if lowest { f64::INFINITY } else { f64::NEG_INFINITY };
        for j in 1..gr.nz {
            for i in 1..gr.nx {
                let v = f[j * n + i];
                ext = if lowest { ext.min(v) } else { ext.max(v) };
            }
        }
        ext
    }

    fn bracket(&self, requested: Option<BarrierSpec>, sub_fraction: f64) -> Result<Bracket> {
        let g = self.g;
        let eps = requested.map(|b| b.eps).unwrap_or(0.0);
        // super: β P(x_N + ε) must dominate the data and be a discrete supersolution
        let mut min_beta = round_up(self.boundary_ratio_max(eps).max(1.0));
        let mut tries = 0;
        while self.residual_extreme(&self.with_data(self.barrier_field(min_beta, eps)), true) < 0.0 {
            min_beta = round_up(min_beta * 1.1);
            tries += 1;
            if tries > 400 {
                return Err(Error::Invariant(
                    "no admissible super-barrier found for this translation".into(),
                ));
            }
        }
        let beta = match requested {
            Some(b) if b.beta < min_beta => {
                return Err(Error::BracketInverted {
                    beta: b.beta,
                    min_beta,
                })
            }
            Some(b) => b.beta,
            None => min_beta,
        };
        // sub: c P below the data and a discrete subsolution
        let mut c = sub_fraction.min(0.5 * self.boundary_ratio_min());
        let mut tries = 0;
        while self.residual_extreme(&self.with_data(self.barrier_field(c, 0.0)), false) > 0.0 {
            c *= 0.5;
            tries += 1;
            if tries > 60 {
                return Err(Error::Invariant("no discrete sub-barrier found".into()));
            }
        }
        let sub = self.with_data(self.barrier_field(c, 0.0));
        let sup = self.with_data(self.barrier_field(beta, eps));
        if let Some(k) = (self.grid.row_len()..sub.len()).find(|&k| !(sub[k] <= sup[k])) {
            return Err(Error::BracketInverted {
                beta,
                min_beta: beta * sub[k] / sup[k],
            });
        }
        let mode = self.data.mode;
        Ok(Bracket {
            sub: Field2D::from_parts(self.grid, sub, g, mode),
            sup: Field2D::from_parts(self.grid, sup, g, mode),
            beta,
            sub_fraction: c,
        })
    }
}

fn round_up(x: f64) -> f64 {
    let e = x.log10().floor() - 2.0;
    let q = 10f64.powf(e);
    (x / q).ceil() * q
}

/// Correction term `S''(z_j) − δ²_z S(z_j)` per node.
fn build_tau(g: GammaParam, grid: &Grid2D, correction: Correction, b: &[f64]) -> Vec<f64> {
    let mut tau = vec![0.0; grid.n_nodes()];
    if correction == Correction::Off {
        return tau;
    }
    let sr = Series::new(g);
    let h = grid.h;
    let n = grid.row_len();
    let s_val = |b: f64, z: f64| if z <= 0.0 { 0.0 } else { sr.eval(b, z).0 };
    let s_dd = |b: f64, z: f64| {
        let cb = sr.c2 * b * b;
        sr.c * sr.a * (sr.a - 1.0) * z.powf(sr.a - 2.0)
            + b * sr.s * (sr.s - 1.0) * z.powf(sr.s - 2.0)
            + cb * sr.q * (sr.q - 1.0) * z.powf(sr.q - 2.0)
    };
    for i in 1..grid.nx {
        let bi = if correction == Correction::Series { b[i].max(0.0) } else { 0.0 };
        for j in 1..grid.nz {
            let z = grid.z(j);
            if bi * z.powf(sr.s - sr.a) / sr.c > 0.1 {
                break;
            }
            let d2 = (s_val(bi, z + h) - 2.0 * s_val(bi, z) + s_val(bi, z - h)) / (h * h);
            tau[j * n + i] = s_dd(bi, z) - d2;
        }
    }
    tau
}

/// Row used to estimate the series coefficient from the first integral.
fn b_row(grid: &Grid2D) -> usize {
    (grid.nz / 4).clamp(1, grid.nz - 1)
}

fn estimate_b(g: GammaParam, grid: &Grid2D, u: &[f64]) -> Vec<f64> {
    let sr = Series::new(g);
    let n = grid.row_len();
    let j = b_row(grid);
    let gm1 = g.gamma() - 1.0;
    let mut b = vec![0.0; grid.nx + 1];
    for (i, bi) in b.iter_mut().enumerate().take(grid.nx).skip(1) {
        let k = j * n + i;
        let uz = (u[k + n] - u[k - n]) / (2.0 * grid.h);
        let e = 0.5 * uz * uz - u[k].powf(-gm1) / gm1;
        *bi = e.max(0.0) / sr.kappa;
    }
    b[0] = b[1];
    b[grid.nx] = b[grid.nx - 1];
    b
}

struct NewtonRun {
    u: Vec<f64>,
    history: Vec<f64>,
    monotone: bool,
    ordered: bool,
    iterations: usize,
    final_change: f64,
    projections: usize,
    sweeps: usize,
}

fn sor_omega(grid: &Grid2D) -> f64 {
    let pi = std::f64::consts::PI;
    let rho = 0.5 * ((pi / grid.nx as f64).cos() + (pi / grid.nz as f64).cos());
    2.0 / (1.0 + (1.0 - rho * rho).sqrt())
}

/// Red–black SOR for `(−Δ_h + diag) δ = rhs` with `δ = 0` on the edges.
///
/// Each color is computed into `scratch` from the other color and copied
/// back, so the result does not depend on the execution policy.
#[allow(clippy::too_many_arguments)]
fn sor_solve(
    grid: &Grid2D,
    diag: &[f64],
    rhs: &[f64],
    delta: &mut [f64],
    scratch: &mut [f64],
    eta: f64,
    max_sweeps: usize,
    par: Parallelism,
) -> Result<usize> {
    let n = grid.row_len();
    let (nx, nz) = (grid.nx, grid.nz);
    let ih2 = 1.0 / (grid.h * grid.h);
    let omega = sor_omega(grid);
    for sweep in 1..=max_sweeps {
        let mut change: f64 = 0.0;
        for color in 0..2 {
            let d: &[f64] = delta;
            let c = par.chunks_max(scratch, n, |j, row| {
                if j == 0 || j == nz {
                    return 0.0;
                }
                let k0 = j * n;
                let i0 = if (1 + j) % 2 == color { 1 } else { 2 };
                let mut m: f64 = 0.0;
                for i in (i0..nx).step_by(2) {
                    let k = k0 + i;
                    let gs = (rhs[k] + (d[k - 1] + d[k + 1] + d[k - n] + d[k + n]) * ih2) / diag[k];
                    let new = d[k] + omega * (gs - d[k]);
                    m = m.max((new - d[k]).abs());
                    row[i] = new;
                }
                m
            });
            change = change.max(c);
            let s: &[f64] = scratch;
            par.for_each_chunk_mut(delta, n, |j, row| {
                if j == 0 || j == nz {
                    return;
                }
                let i0 = if (1 + j) % 2 == color { 1 } else { 2 };
                for i in (i0..nx).step_by(2) {
                    row[i] = s[j * n + i];
                }
            });
        }
        let size = par.max_over(delta.len(), |k| delta[k].abs());
        if change <= eta * size || size == 0.0 {
            return Ok(sweep);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_sweeps,
        change: f64::NAN,
    })
}

fn newton(pb: &Problem, start: &[f64], br: &Bracket, spec: &SolverSpec) -> Result<NewtonRun> {
    let gr = pb.grid;
    let n = gr.row_len();
    let nn = gr.n_nodes();
    let gam = pb.g.gamma();
    let ih2 = 1.0 / (gr.h * gr.h);
    let sub = br.sub.values();
    let sup = br.sup.values();
    let mut u = start.to_vec();
    pb.data.impose(&gr, &mut u);
    let mut f = vec![0.0; nn];
    let mut diag = vec![1.0; nn];
    let mut rhs = vec![0.0; nn];
    let mut delta = vec![0.0; nn];
    let mut scratch = vec![0.0; nn];
    let mut run = NewtonRun {
        u: Vec::new(),
        history: Vec::new(),
        monotone: true,
        ordered: true,
        iterations: 0,
        final_change: f64::INFINITY,
        projections: 0,
        sweeps: 0,
    };
    let mut escaping = 0;
    for it in 0..spec.max_newton {
        pb.residual(&u, &mut f);
        run.history.push(pb.scaled_norm(&f, &u));
        for j in 1..gr.nz {
            for i in 1..gr.nx {
                let k = j * n + i;
                diag[k] = 4.0 * ih2 + gam * (-(gam + 1.0) * u[k].ln()).exp();
                rhs[k] = -f[k];
            }
        }
        delta.iter_mut().for_each(|x| *x = 0.0);
        run.sweeps += sor_solve(&gr, &diag, &rhs, &mut delta, &mut scratch, spec.inner_eta, spec.max_sweeps, pb.par)?;
        // decreases below this are inner-solve error, not a loss of order
        let step = (1..gr.nz)
            .flat_map(|j| (1..gr.nx).map(move |i| j * n + i))
            .fold(0.0f64, |m, k| m.max(delta[k].abs() / u[k]));
        let noise = 1e3 * spec.inner_eta * step + 1e-13;
        let mut projected = 0;
        let mut change: f64 = 0.0;
        for j in 1..gr.nz {
            for i in 1..gr.nx {
                let k = j * n + i;
                let mut d = delta[k];
                let mut halvings = 0;
                while (u[k] + d > sup[k] || u[k] + d < sub[k]) && halvings < 4 {
                    d *= 0.5;
                    halvings += 1;
                }
                let mut next = u[k] + d;
                if next > sup[k] || next < sub[k] {
                    next = next.clamp(sub[k], sup[k]);
                    projected += 1;
                }
                if u[k] - next > noise * u[k] {
                    run.monotone = false;
                }
                change = change.max((next - u[k]).abs() / u[k]);
                u[k] = next;
            }
        }
        run.projections += projected;
        if projected > 0 {
            if it > 0 {
                run.ordered = false;
            }
            escaping += 1;
            if escaping >= 3 {
                return Err(Error::BracketEscape { steps: escaping });
            }
        } else {
            escaping = 0;
        }
        run.iterations = it + 1;
        run.final_change = change;
        if change <= spec.tol {
            pb.residual(&u, &mut f);
            run.history.push(pb.scaled_norm(&f, &u));
            run.u = u;
            return Ok(run);
        }
    }
    Err(Error::NoConvergence {
        iterations: spec.max_newton,
        change: run.final_change,
    })
}

/// Bracket for `data` under `spec`'s discretization (series coefficients 0).
pub fn initial_bracket(
    g: GammaParam,
    grid: &Grid2D,
    data: &BoundaryData,
    barrier: BarrierSpec,
    spec: &SolverSpec,
) -> Result<Bracket> {
    data.validate(grid)?;
    let b = vec![0.0; grid.nx + 1];
    let pb = Problem::new(g, *grid, data, spec.correction, &b, spec.parallelism);
    pb.bracket(Some(barrier), spec.sub_fraction)
}

/// Solves `−Δ_h u = u^{−γ}` with the given data by Newton's method from the
/// sub-barrier, with red–black SOR inner solves.
pub fn solve(g: GammaParam, grid: &Grid2D, data: &BoundaryData, spec: &SolverSpec) -> Result<(Field2D, IterationReport)> {
    spec.validate()?;
    data.validate(grid)?;
    let mut b = vec![0.0; grid.nx + 1];
    let mut passes = 0;
    if spec.correction == Correction::Series {
        let mut warm: Option<Vec<f64>> = None;
        for _ in 0..spec.max_passes {
            let pb = Problem::new(g, *grid, data, spec.correction, &b, spec.parallelism);
            let br = pb.bracket(spec.barrier, spec.sub_fraction)?;
            let start = warm.take().unwrap_or_else(|| br.sub.values().to_vec());
            let run = newton(&pb, &start, &br, spec)?;
            let nb = estimate_b(g, grid, &run.u);
            let scale = nb.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
            let diff = nb.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale;
            b = nb;
            passes += 1;
            warm = Some(run.u);
            if diff <= spec.b_tol {
                break;
            }
        }
    }
    let pb = Problem::new(g, *grid, data, spec.correction, &b, spec.parallelism);
    let br = pb.bracket(spec.barrier, spec.sub_fraction)?;
    let run = newton(&pb, br.sub.values(), &br, spec)?;
    // increases at round-off level do not count
    let residual_monotone = run
        .history
        .windows(2)
        .skip(1)
        .all(|w| w[1] <= w[0] || w[1] <= 1e-14);
    let field = Field2D::from_parts(*grid, run.u, g, data.mode);
    let report = IterationReport {
        residual_history: run.history,
        monotone: run.monotone,
        residual_monotone,
        ordered_between_barriers: run.ordered,
        iterations: run.iterations,
        final_change: run.final_change,
        projections: run.projections,
        sweeps: run.sweeps,
        passes,
        beta: br.beta,
        sub_fraction: br.sub_fraction,
        b_columns: b,
    };
    Ok((field, report))
}

/// Discrete 1-D solution of the same scheme on one column, with `u = 0` at
/// the bottom and `top` at `x_N = height`.
///
/// With lateral data taken from this column and constant top data, the
/// discrete 2-D problem is solved exactly by the column repeated across
/// the width.
pub fn column_solution(g: GammaParam, grid: &Grid2D, top: f64, spec: &SolverSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if !(top > 0.0) || !top.is_finite() {
        return Err(Error::InvalidArgument(format!("top value must be positive, got {top}")));
    }
    let nz = grid.nz;
    let h = grid.h;
    let ih2 = 1.0 / (h * h);
    let gam = g.gamma();
    let sr = Series::new(g);
    let col_grid = Grid2D {
        width: 2.0 * h,
        nx: 2,
        ..*grid
    };
    let ph = eval_power(g, grid.height).0;
    let c = spec.sub_fraction.min(0.5 * top / ph);
    let mut u: Vec<f64> = (0..=nz).map(|j| c * eval_power(g, grid.z(j)).0).collect();
    u[nz] = top;
    let mut b = 0.0;
    for _pass in 0..=spec.max_passes {
        let tau3 = build_tau(g, &col_grid, spec.correction, &[b, b, b]);
        let tau: Vec<f64> = (0..=nz).map(|j| tau3[j * 3 + 1]).collect();
        let mut converged = false;
        for _ in 0..spec.max_newton {
            // tridiagonal Newton system
            let m = nz - 1;
            let mut lower = vec![0.0; m];
            let mut dg = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut r = vec![0.0; m];
            for j in 1..nz {
                let fj = (2.0 * u[j] - u[j - 1] - u[j + 1]) * ih2 - (-gam * u[j].ln()).exp() - tau[j];
                dg[j - 1] = 2.0 * ih2 + gam * (-(gam + 1.0) * u[j].ln()).exp();
                lower[j - 1] = -ih2;
                upper[j - 1] = -ih2;
                r[j - 1] = -fj;
            }
            let d = thomas(&lower, &dg, &upper, &r);
            let mut change: f64 = 0.0;
            for j in 1..nz {
                let next = (u[j] + d[j - 1]).max(0.5 * u[j]);
                change = change.max((next - u[j]).abs() / u[j]);
                u[j] = next;
            }
            if change <= 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                iterations: spec.max_newton,
                change: f64::NAN,
            });
        }
        if spec.correction != Correction::Series {
            break;
        }
        let jb = b_row(grid);
        let uz = (u[jb + 1] - u[jb - 1]) / (2.0 * h);
        let e = 0.5 * uz * uz - u[jb].powf(1.0 - gam) / (gam - 1.0);
        let nb = e.max(0.0) / sr.kappa;
        let done = (nb - b).abs() <= spec.b_tol * nb.abs().max(1e-300);
        b = nb;
        if done {
            break;
        }
    }
    Ok(u)
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Boundary data whose x'-independent discrete solution is the column
/// solution, optionally perturbed.
pub fn consistent_data(g: GammaParam, grid: &Grid2D, top: f64, spec: &SolverSpec) -> Result<BoundaryData> {
    let col = column_solution(g, grid, top, spec)?;
    Ok(BoundaryData::from_column(grid, &col, BoundaryMode::OnedProfile))
}
