use serde::{Deserialize, Serialize};

use super::grid::{BoundaryMode, Grid2D};
use crate::error::{Error, Result};
use crate::profiles::Profile1D;

/// Dirichlet data on the top and lateral edges; the bottom edge is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    /// `nx + 1` values on `x_N = height`.
    pub top: Vec<f64>,
    /// `nz + 1` values on `x' = −width/2`, from the bottom.
    pub left: Vec<f64>,
    /// `nz + 1` values on `x' = width/2`, from the bottom.
    pub right: Vec<f64>,
    pub mode: BoundaryMode,
}

impl BoundaryData {
    pub fn custom(grid: &Grid2D, top: Vec<f64>, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        let d = Self {
            top,
            left,
            right,
            mode: BoundaryMode::Custom,
        };
        d.validate(grid)?;
        Ok(d)
    }

    /// Data sampled from a 1-D profile, identical on every column.
    pub fn from_profile(grid: &Grid2D, p: &Profile1D) -> Result<Self> {
        let col: Vec<f64> = (0..=grid.nz).map(|j| p.eval(grid.z(j)).0).collect();
        let d = Self::from_column(grid, &col, BoundaryMode::OnedProfile);
        d.validate(grid)?;
        Ok(d)
    }

    /// Data built from one column `col[j]`, `j = 0..=nz`.
    pub fn from_column(grid: &Grid2D, col: &[f64], mode: BoundaryMode) -> Self {
        let mut left = col.to_vec();
        left[0] = 0.0;
        Self {
            top: vec![col[grid.nz]; grid.nx + 1],
            right: left.clone(),
            left,
            mode,
        }
    }

    /// Multiplies the top and lateral data by `1 + a sin(π x' / width)`.
    pub fn perturbed(&self, grid: &Grid2D, a: f64) -> Result<Self> {
        if !a.is_finite() || a.abs() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "perturbation amplitude must lie in (−1, 1), got {a}"
            )));
        }
        let f = |x: f64| 1.0 + a * (std::f64::consts::PI * x / grid.width).sin();
        let top = self
            .top
            .iter()
            .enumerate()
            .map(|(i, v)| v * f(grid.x(i)))
            .collect();
        let fl = f(-0.5 * grid.width);
        let fr = f(0.5 * grid.width);
        let d = Self {
            top,
            left: self.left.iter().map(|v| v * fl).collect(),
            right: self.right.iter().map(|v| v * fr).collect(),
            mode: BoundaryMode::Perturbed,
        };
        d.validate(grid)?;
        Ok(d)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        if self.top.len() != grid.nx + 1 || self.left.len() != grid.nz + 1 || self.right.len() != grid.nz + 1 {
            return Err(Error::InvalidArgument(format!(
                "boundary data sizes {} / {} / {} do not match the grid ({} x {})",
                self.top.len(),
                self.left.len(),
                self.right.len(),
                grid.nx,
                grid.nz
            )));
        }
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !positive(&self.top) || !positive(&self.left[1..]) || !positive(&self.right[1..]) {
            return Err(Error::InvalidArgument(
                "boundary data must be positive on the top and lateral edges".into(),
            ));
        }
        Ok(())
    }

    /// Largest boundary value.
    pub fn max_value(&self) -> f64 {
        self.top
            .iter()
            .chain(&self.left)
            .chain(&self.right)
            .fold(0.0, |m, v| m.max(*v))
    }

    /// Writes the data into the boundary nodes of a row-major array.
    pub(crate) fn impose(&self, grid: &Grid2D, u: &mut [f64]) {
        let n = grid.row_len();
        u[..n].iter_mut().for_each(|x| *x = 0.0);
        for j in 1..grid.nz {
            u[j * n] = self.left[j];
            u[j * n + grid.nx] = self.right[j];
        }
        u[grid.nz * n..].copy_from_slice(&self.top);
    }
}
