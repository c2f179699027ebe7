//! Five-point finite differences for `−Δu = u^{−γ}` on rectangles
//! `[−W/2, W/2] × [0, H]` with `u = 0` on the bottom edge.

mod boundary;
mod diagnostics;
mod grid;
mod solver;

pub use boundary::BoundaryData;
pub use diagnostics::{harnack_ratio, symmetry_deviation, SymmetryDeviation};
pub use grid::{build_grid, BoundaryMode, Field2D, Grid2D};
pub use solver::{
    column_solution, consistent_data, initial_bracket, solve, Bracket, Correction, IterationReport, SolverSpec,
};
