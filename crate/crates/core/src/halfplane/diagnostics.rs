use serde::{Deserialize, Serialize};

use super::grid::Field2D;
use crate::bounds::SampleSource;
use crate::error::{Error, Result};
use crate::profiles::GammaParam;

/// Relative deviation of each row from its mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryDeviation {
    /// `per_row[j]`, with `per_row[0] = 0` for the bottom row.
    pub per_row: Vec<f64>,
    /// Largest deviation over the central half `|x'| ≤ width/4`, rows
    /// strictly between the bottom and the top edge.
    pub max_dev: f64,
}

/// Deviation of a field from x'-independence.
///
/// `per_row[j]` is the largest `|u − mean| / mean` along interior row `j`
/// (lateral boundary nodes excluded). `max_dev` uses only the central half
/// of the columns and skips the top row, which carries the Dirichlet data
/// itself.
pub fn symmetry_deviation(f: &Field2D) -> SymmetryDeviation {
    let gr = f.grid();
    let quarter = 0.25 * gr.width * (1.0 + 1e-12);
    let mut per_row = vec![0.0; gr.nz + 1];
    let mut max_dev: f64 = 0.0;
    for (j, slot) in per_row.iter_mut().enumerate().skip(1) {
        let row = &f.row(j)[1..gr.nx];
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        let mut all: f64 = 0.0;
        let mut central: f64 = 0.0;
        for (k, u) in row.iter().enumerate() {
            let d = (u - mean).abs() / mean;
            all = all.max(d);
            if gr.x(k + 1).abs() <= quarter {
                central = central.max(d);
            }
        }
        *slot = all;
        if j < gr.nz {
            max_dev = max_dev.max(central);
        }
    }
    SymmetryDeviation { per_row, max_dev }
}

/// `sup / inf` of the field over the nodes within `radius` of node
/// `center = (i, j)`.
pub fn harnack_ratio(f: &Field2D, center: (usize, usize), radius: f64) -> Result<f64> {
    let gr = f.grid();
    let (ic, jc) = center;
    if ic > gr.nx || jc > gr.nz {
        return Err(Error::InvalidArgument(format!("node ({ic}, {jc}) outside the grid")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let (xc, zc) = (gr.x(ic), gr.z(jc));
    let slack = 1e-12 * gr.h;
    if zc + slack < 2.0 * radius
        || zc + radius > gr.height + slack
        || xc - radius < -0.5 * gr.width - slack
        || xc + radius > 0.5 * gr.width + slack
    {
        return Err(Error::InvalidArgument(format!(
            "disk of radius {radius} at ({xc}, {zc}) leaves the domain or reaches the bottom layer"
        )));
    }
    let r = (radius / gr.h + 1e-9).floor() as usize;
    let r2 = (radius * radius) * (1.0 + 1e-12);
    let (mut sup, mut inf) = (0.0f64, f64::INFINITY);
    for j in jc.saturating_sub(r)..=(jc + r).min(gr.nz) {
        for i in ic.saturating_sub(r)..=(ic + r).min(gr.nx) {
            let dx = gr.x(i) - xc;
            let dz = gr.z(j) - zc;
            if dx * dx + dz * dz <= r2 {
                let u = f.at(i, j);
                sup = sup.max(u);
                inf = inf.min(u);
            }
        }
    }
    Ok(sup / inf)
}

impl SampleSource for Field2D {
    fn gamma(&self) -> GammaParam {
        Field2D::gamma(self)
    }

    /// Interior columns, rows `j ≥ 1`; level 1 keeps even `i` and `j`.
    fn value_samples(&self, level: usize) -> Vec<(f64, f64)> {
        let gr = self.grid();
        let step = 1 << level;
        let mut out = Vec::new();
        for j in (step..=gr.nz).step_by(step) {
            for i in (step..gr.nx).step_by(step) {
                out.push((gr.z(j), self.at(i, j)));
            }
        }
        out
    }

    /// Centered differences with spacing `2^level h`, rows from `4 h` up.
    fn gradient_samples(&self, level: usize) -> Vec<(f64, f64)> {
        let gr = self.grid();
        let step = 1 << level;
        let d = 2.0 * step as f64 * gr.h;
        let mut out = Vec::new();
        let j0 = 4usize.div_ceil(step) * step;
        for j in (j0..=gr.nz.saturating_sub(step)).step_by(step) {
            for i in (step..gr.nx.saturating_sub(step) + 1).step_by(step) {
                if i + step > gr.nx {
                    continue;
                }
                let ux = (self.at(i + step, j) - self.at(i - step, j)) / d;
                let uz = (self.at(i, j + step) - self.at(i, j - step)) / d;
                out.push((gr.z(j), ux.hypot(uz)));
            }
        }
        out
    }

    fn extent(&self) -> f64 {
        self.grid().height
    }
}
