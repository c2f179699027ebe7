use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{fmt_g15, parse_f64, split_fields};
use crate::profiles::GammaParam;

/// Uniform square grid on `[−width/2, width/2] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub nz: usize,
    pub h: f64,
}

/// Grid with spacing `h`; both sides must be integer multiples of `h`.
pub fn build_grid(width: f64, height: f64, h: f64) -> Result<Grid2D> {
    for (name, v) in [("width", width), ("height", height), ("h", h)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let count = |len: f64, name: &str| -> Result<usize> {
        let r = len / h;
        let n = r.round();
        if (r - n).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::NonCommensurate(format!(
                "{name} {len} is not a multiple of h = {h} ({name}/h = {r})"
            )));
        }
        let n = n as usize;
        if n < 8 {
            return Err(Error::InvalidArgument(format!(
                "{name}/h = {n} is below the minimum of 8 cells"
            )));
        }
        Ok(n)
    };
    let nx = count(width, "width")?;
    let nz = count(height, "height")?;
    let hz = height / nz as f64;
    let hx = width / nx as f64;
    if (hx - hz).abs() > 1e-12 * hz {
        return Err(Error::NonCommensurate(format!(
            "spacings differ: width/nx = {hx}, height/nz = {hz}"
        )));
    }
    Ok(Grid2D {
        width,
        height,
        nx,
        nz,
        h: hz,
    })
}

impl Grid2D {
    /// Nodes per row.
    #[inline]
    pub fn row_len(&self) -> usize {
        self.nx + 1
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.nz + 1)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.width + i as f64 * self.h
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    OnedProfile,
    Perturbed,
    Custom,
}

/// Discrete field on a [`Grid2D`], row-major with row 0 at `x_N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    grid: Grid2D,
    values: Vec<f64>,
    gamma: GammaParam,
    boundary_mode: BoundaryMode,
}

impl Field2D {
    pub fn new(grid: Grid2D, values: Vec<f64>, gamma: GammaParam, boundary_mode: BoundaryMode) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid needs {}",
                values.len(),
                grid.n_nodes()
            )));
        }
        if let Some(k) = (0..grid.row_len()).find(|&k| values[k] != 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bottom row must be 0, found {} at i = {k}",
                values[k]
            )));
        }
        if let Some(k) = (grid.row_len()..values.len()).find(|&k| !(values[k] > 0.0) || !values[k].is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "field value at node {k} must be positive and finite, got {}",
                values[k]
            )));
        }
        Ok(Self::from_parts(grid, values, gamma, boundary_mode))
    }

    pub(crate) fn from_parts(grid: Grid2D, values: Vec<f64>, gamma: GammaParam, boundary_mode: BoundaryMode) -> Self {
        Self {
            grid,
            values,
            gamma,
            boundary_mode,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self) -> GammaParam {
        self.gamma
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.boundary_mode
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.grid.row_len();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,z,u")?;
        for j in 0..=self.grid.nz {
            for i in 0..=self.grid.nx {
                writeln!(
                    w,
                    "{},{},{}",
                    fmt_g15(self.grid.x(i)),
                    fmt_g15(self.grid.z(j)),
                    fmt_g15(self.at(i, j))
                )?;
            }
        }
        Ok(())
    }

    /// Reads the `x,z,u` format written by [`Field2D::write_csv`].
    pub fn read_csv<R: BufRead>(r: R, gamma: GammaParam) -> Result<Self> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        let mut saw_header = false;
        for (k, line) in r.lines().enumerate() {
            let lineno = k + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line.replace(' ', "") != "x,z,u" {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected header 'x,z,u', found '{line}'"),
                    });
                }
                saw_header = true;
                continue;
            }
            let f = split_fields(line, lineno, 3)?;
            rows.push((parse_f64(f[0], lineno)?, parse_f64(f[1], lineno)?, parse_f64(f[2], lineno)?));
        }
        let nxp = rows.iter().take_while(|r| r.1 == rows[0].1).count();
        if rows.is_empty() || nxp < 2 || !rows.len().is_multiple_of(nxp) {
            return Err(Error::Parse {
                line: rows.len() + 1,
                msg: "field rows do not form a rectangular grid".into(),
            });
        }
        let nzp = rows.len() / nxp;
        let h = rows[1].0 - rows[0].0;
        let grid = build_grid((nxp - 1) as f64 * h, (nzp - 1) as f64 * h, h).map_err(|e| Error::Parse {
            line: 2,
            msg: e.to_string(),
        })?;
        for (k, r) in rows.iter().enumerate() {
            let (i, j) = (k % nxp, k / nxp);
            let tol = 1e-9 * (1.0 + grid.width);
            if (r.0 - grid.x(i)).abs() > tol || (r.1 - grid.z(j)).abs() > tol {
                return Err(Error::Parse {
                    line: k + 2,
                    msg: format!("node ({}, {}) is off the grid", r.0, r.1),
                });
            }
        }
        let values = rows.into_iter().map(|r| r.2).collect();
        Self::new(grid, values, gamma, BoundaryMode::Custom)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gamma": self.gamma.gamma(),
            "boundary_mode": self.boundary_mode,
            "grid": self.grid,
            "values": self.values,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Env {
            gamma: GammaParam,
            boundary_mode: BoundaryMode,
            grid: Grid2D,
            values: Vec<f64>,
        }
        let env: Env = serde_json::from_value(v.clone())?;
        let grid = build_grid(env.grid.width, env.grid.height, env.grid.h)?;
        Self::new(grid, env.values, env.gamma, env.boundary_mode)
    }
}
