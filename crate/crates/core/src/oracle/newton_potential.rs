use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::spaces::{Grid, RemainderField};

/// `∫_{[-1/2,1/2]^3} |x|^{-1} dx`, the self-cell weight in units of `h^2`.
pub const SELF_CELL_INTEGRAL: f64 = 2.380_077_363_979_553;

/// `-(1/4π) ∫ ρ(y)/|x - y| dy` at arbitrary points, by the midpoint rule on
/// the grid cells; a target that coincides with a node gets the exact
/// integral of the singularity over its own cell.
pub fn newtonian_potential_at(rho: &RemainderField, targets: &[[f64; 3]]) -> Result<Vec<f64>> {
    let grid = rho.grid();
    if grid.dimension() != 3 {
        return Err(invalid("d", "the Newtonian potential oracle is three-dimensional"));
    }
    let h = grid.spacing();
    let vol = h * h * h;
    let data = rho.data();
    let sources: Vec<([f64; 3], f64)> = (0..grid.len())
        .filter(|&i| data[i] != 0.0)
        .map(|i| (grid.point(i), data[i]))
        .collect();
    let coincide = 1e-9 * h;
    Ok(targets
        .par_iter()
        .map(|x| {
            let mut acc = 0.0;
            for (y, q) in &sources {
                let dx = x[0] - y[0];
                let dy = x[1] - y[1];
                let dz = x[2] - y[2];
                let r = (dx * dx + dy * dy + dz * dz).sqrt();
                if r < coincide {
                    acc += q * SELF_CELL_INTEGRAL * h * h;
                } else {
                    acc += q * vol / r;
                }
            }
            -acc / (4.0 * std::f64::consts::PI)
        })
        .collect())
}

/// Potential at every node of the grid (quadratic cost; keep grids small).
pub fn newtonian_potential(rho: &RemainderField) -> Result<RemainderField> {
    let grid: &Grid = rho.grid();
    let targets: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let values = newtonian_potential_at(rho, &targets)?;
    RemainderField::new(grid.clone(), values)
}
