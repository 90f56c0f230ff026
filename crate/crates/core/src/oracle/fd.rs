use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::spaces::{Grid, RemainderField};

fn neighbor(grid: &Grid, data: &[f64], idx: &[usize; 3], axis: usize, offset: i64) -> f64 {
    let n = grid.shape()[axis] as i64;
    let j = idx[axis] as i64 + offset;
    if j < 0 || j >= n {
        return 0.0;
    }
    let mut k = *idx;
    k[axis] = j as usize;
    data[grid.ravel(&k[..grid.dimension()])]
}

/// Centered finite-difference Laplacian of order 2 or 4; samples beyond the
/// box are taken as zero.
pub fn fd_laplacian(f: &RemainderField, order: usize) -> Result<RemainderField> {
    let stencil: &[(i64, f64)] = match order {
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        4 => &[
            (-2, -1.0 / 12.0),
            (-1, 4.0 / 3.0),
            (0, -2.5),
            (1, 4.0 / 3.0),
            (2, -1.0 / 12.0),
        ],
        _ => return Err(invalid("order", format!("stencil order must be 2 or 4, got {order}"))),
    };
    let grid = f.grid();
    let h2 = grid.spacing() * grid.spacing();
    let data = f.data();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let idx = grid.unravel(i);
            let mut acc = 0.0;
            for axis in 0..grid.dimension() {
                for &(o, c) in stencil {
                    acc += c * neighbor(grid, data, &idx, axis, o);
                }
            }
            acc / h2
        })
        .collect();
    RemainderField::new(grid.clone(), out)
}

/// Second-order centered first derivative along `axis`.
pub fn fd_gradient(f: &RemainderField, axis: usize) -> RemainderField {
    let grid = f.grid();
    let h = grid.spacing();
    let data = f.data();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let idx = grid.unravel(i);
            (neighbor(grid, data, &idx, axis, 1) - neighbor(grid, data, &idx, axis, -1)) / (2.0 * h)
        })
        .collect();
    RemainderField::new(grid.clone(), out).expect("finite")
}

fn japanese(x: &[f64; 3]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// `ℒ_δ f = Δf - 2δ⟨x⟩^{-2} x·∇f + (δ(δ+2)|x|^2⟨x⟩^{-4} - δ d ⟨x⟩^{-2}) f`
/// with second-order differences.
pub fn l_delta_apply(f: &RemainderField, delta: f64) -> RemainderField {
    let grid = f.grid();
    let d = grid.dimension();
    let lap = fd_laplacian(f, 2).expect("order 2");
    let grads: Vec<RemainderField> = (0..d).map(|a| fd_gradient(f, a)).collect();
    let data = f.data();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let b2 = japanese(&x).powi(2);
            let r2 = b2 - 1.0;
            let xdotgrad: f64 = (0..d).map(|a| x[a] * grads[a].data()[i]).sum();
            lap.data()[i] - 2.0 * delta / b2 * xdotgrad
                + (delta * (delta + 2.0) * r2 / (b2 * b2) - delta * d as f64 / b2) * data[i]
        })
        .collect();
    RemainderField::new(grid.clone(), out).expect("finite")
}

/// Relative `L^2` residual of `J_δ Δ J_{-δ} f - ℒ_δ f` over the nodes at
/// least two cells away from the faces.
pub fn l_delta_conjugation_check(f: &RemainderField, delta: f64) -> f64 {
    let grid = f.grid();
    let d = grid.dimension();
    let g = f.map_with_point(|x, v| japanese(x).powf(-delta) * v);
    let lhs = fd_laplacian(&g, 2)
        .expect("order 2")
        .map_with_point(|x, v| japanese(x).powf(delta) * v);
    let rhs = l_delta_apply(f, delta);
    let interior = |i: usize| {
        let idx = grid.unravel(i);
        (0..d).all(|a| idx[a] >= 2 && idx[a] + 2 < grid.shape()[a])
    };
    let (mut num, mut den) = (0.0, 0.0);
    for i in (0..grid.len()).filter(|&i| interior(i)) {
        num += (lhs.data()[i] - rhs.data()[i]).powi(2);
        den += f.data()[i].powi(2);
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}
