use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{fixed_max_by, fixed_sum_by};

/// A uniform, origin-centered Cartesian grid in `d = 2` or `3` dimensions.
///
/// Samples are stored row-major with the last axis fastest. Along each axis
/// the nodes are `origin + i h` with `origin = -(n - 1) h / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    shape: Vec<usize>,
    spacing: f64,
}

impl Grid {
    pub fn new(d: usize, shape: Vec<usize>, spacing: f64) -> Result<Self> {
        crate::sphere::check_dimension(d)?;
        if shape.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: shape.len(),
            });
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(invalid("shape", "every axis needs at least two samples"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid("spacing", format!("must be positive and finite, got {spacing}")));
        }
        Ok(Self { d, shape, spacing })
    }

    /// `n^d` grid with spacing `h`.
    pub fn cube(d: usize, n: usize, spacing: f64) -> Result<Self> {
        Self::new(d, vec![n; d], spacing)
    }

    /// `n^d` grid whose periodic box is `[-half_width, half_width)^d`, i.e.
    /// `h = 2 half_width / n`.
    pub fn centered(d: usize, n: usize, half_width: f64) -> Result<Self> {
        Self::cube(d, n, 2.0 * half_width / n as f64)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn origin(&self) -> Vec<f64> {
        self.shape
            .iter()
            .map(|&n| -((n - 1) as f64) * self.spacing / 2.0)
            .collect()
    }

    /// Half the extent of the sample box along the shortest axis.
    pub fn half_width(&self) -> f64 {
        let n = *self.shape.iter().min().expect("nonempty shape");
        (n - 1) as f64 * self.spacing / 2.0
    }

    /// Volume of one cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.d as i32)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.d];
        for a in (0..self.d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut i: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.d).rev() {
            idx[a] = i % self.shape[a];
            i /= self.shape[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut i = 0;
        for a in 0..self.d {
            i = i * self.shape[a] + idx[a];
        }
        i
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 - (self.shape[axis] - 1) as f64 / 2.0) * self.spacing
    }

    /// Position of the node with flat index `i` (unused trailing entries 0).
    pub fn point(&self, i: usize) -> [f64; 3] {
        let idx = self.unravel(i);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(a, idx[a]);
        }
        x
    }

    /// Trapezoid weight of node `i` (including the cell volume).
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        let idx = self.unravel(i);
        let mut w = self.cell_volume();
        for a in 0..self.d {
            if idx[a] == 0 || idx[a] + 1 == self.shape[a] {
                w *= 0.5;
            }
        }
        w
    }

    /// Sample `f` at every node, in parallel.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64; 3]) -> f64 + Sync,
    {
        (0..self.len()).into_par_iter().map(|i| f(&self.point(i))).collect()
    }

    /// The same box refined or coarsened to `n` points per axis.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        let extent = (self.shape[0] - 1) as f64 * self.spacing;
        Self::cube(self.d, n, extent / (n - 1) as f64)
    }
}

/// Real samples on a [`Grid`]: the remainder part of an asymptotic function.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderField {
    grid: Grid,
    data: Vec<f64>,
}

impl RemainderField {
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "grid {:?} has {} nodes but {} samples were given",
                grid.shape(),
                grid.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("remainder samples"));
        }
        Ok(Self { grid, data })
    }

    /// Construct without the finiteness scan; used internally where the data
    /// is produced by finite arithmetic on finite inputs.
    pub(crate) fn from_parts(grid: Grid, data: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data }
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            data: vec![0.0; n],
        }
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(&[f64; 3]) -> f64 + Sync,
    {
        let data = grid.sample(f);
        Self { grid, data }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.grid.d
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Self {
        Self {
            grid: self.grid.clone(),
            data: self.data.par_iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with the node position.
    pub fn map_with_point(&self, f: impl Fn(&[f64; 3], f64) -> f64 + Sync) -> Self {
        let g = &self.grid;
        let data = self
            .data
            .par_iter()
            .enumerate()
            .map(|(i, &v)| f(&g.point(i), v))
            .collect();
        Self {
            grid: self.grid.clone(),
            data,
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self {
            grid: self.grid.clone(),
            data: self
                .data
                .par_iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn axpy_in_place(&mut self, s: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.data
            .par_iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += s * b);
    }

    /// Trapezoid-rule integral over the box.
    pub fn integral(&self) -> f64 {
        fixed_sum_by(self.data.len(), |i| self.grid.trapezoid_weight(i) * self.data[i])
    }

    /// Trapezoid-weighted `L^p` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_weighted(&self.grid, p, |i| self.data[i])
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    pub fn sup_norm(&self) -> f64 {
        fixed_max_by(self.data.len(), |i| self.data[i].abs()).max(0.0)
    }

    /// Multilinear interpolation; zero outside the sample box.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let d = g.d;
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..d {
            let n = g.shape[a];
            let s = x[a] / g.spacing + (n - 1) as f64 / 2.0;
            if !(s >= 0.0 && s <= (n - 1) as f64) {
                return 0.0;
            }
            let i = (s.floor() as usize).min(n - 2);
            base[a] = i;
            frac[a] = s - i as f64;
        }
        let strides = g.strides();
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                idx += (base[a] + bit) * strides[a];
            }
            if w != 0.0 {
                acc += w * self.data[idx];
            }
        }
        acc
    }

    /// Largest absolute sample on the outermost layer of the box.
    pub fn boundary_sup(&self) -> f64 {
        let g = &self.grid;
        fixed_max_by(self.data.len(), |i| {
            let idx = g.unravel(i);
            let on_face = (0..g.d).any(|a| idx[a] == 0 || idx[a] + 1 == g.shape[a]);
            if on_face {
                self.data[i].abs()
            } else {
                0.0
            }
        })
        .max(0.0)
    }
}

pub(crate) fn lp_norm_weighted(grid: &Grid, p: f64, value: impl Fn(usize) -> f64 + Sync) -> f64 {
    let s = fixed_sum_by(grid.len(), |i| grid.trapezoid_weight(i) * value(i).abs().powf(p));
    s.powf(1.0 / p)
}

/// Complex samples on a [`Grid`], produced by complex-time evolution and
/// resolvents.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "grid has {} nodes but {} samples were given",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn from_real(f: &RemainderField) -> Self {
        Self {
            grid: f.grid.clone(),
            data: f.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn re(&self) -> RemainderField {
        RemainderField::from_parts(self.grid.clone(), self.data.iter().map(|c| c.re).collect())
    }

    pub fn im(&self) -> RemainderField {
        RemainderField::from_parts(self.grid.clone(), self.data.iter().map(|c| c.im).collect())
    }

    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        Self {
            grid: self.grid.clone(),
            data: self
                .data
                .par_iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        }
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm_weighted(&self.grid, p, |i| self.data[i].norm())
    }

    pub fn sup_norm(&self) -> f64 {
        fixed_max_by(self.data.len(), |i| self.data[i].norm()).max(0.0)
    }
}
