use num_complex::Complex64;
use rustfft::FftPlanner;

use super::legendre::{normalized_legendre, table_len, tri_index};
use super::{check_dimension, mode_count, SphereFunction, INV_SQRT_2PI, INV_SQRT_PI};
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;

/// Quadrature grid on `S^{d-1}`: equispaced angles for `d = 2`,
/// Gauss–Legendre colatitudes times equispaced longitudes for `d = 3`.
///
/// Samples are stored ring by ring (colatitude-major) with longitude fastest.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    d: usize,
    nlat: usize,
    nlon: usize,
    lat_nodes: Vec<f64>,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    legendre_l_max: usize,
    legendre: Vec<Vec<f64>>,
}

impl SphereGrid {
    /// Smallest grid on which `analyze` is exact up to degree `l_max`.
    pub fn new(d: usize, l_max: usize) -> Result<Self> {
        match d {
            2 => Self::with_resolution(2, 1, 2 * l_max + 2),
            _ => Self::with_resolution(d, l_max + 1, 2 * l_max + 2),
        }
    }

    /// Explicit resolution. For `d = 2`, `nlat` is ignored.
    pub fn with_resolution(d: usize, nlat: usize, nlon: usize) -> Result<Self> {
        check_dimension(d)?;
        if nlon == 0 || (d == 3 && nlat == 0) {
            return Err(crate::error::invalid("resolution", "grid needs at least one node per direction"));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let dphi = two_pi / nlon as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let (nlat, lat_nodes) = if d == 2 {
            for j in 0..nlon {
                let phi = j as f64 * dphi;
                points.push([phi.cos(), phi.sin(), 0.0]);
                weights.push(dphi);
            }
            (1, Vec::new())
        } else {
            let (z, w) = gauss_legendre(nlat);
            for (zi, wi) in z.iter().zip(&w) {
                let st = (1.0 - zi * zi).sqrt();
                for j in 0..nlon {
                    let phi = j as f64 * dphi;
                    points.push([st * phi.cos(), st * phi.sin(), *zi]);
                    weights.push(wi * dphi);
                }
            }
            (nlat, z)
        };
        // Legendre tables are sized for the largest degree analysis can resolve.
        let legendre_l_max = if d == 3 { (nlon.saturating_sub(2) / 2).min(nlat - 1) } else { 0 };
        let mut grid = Self {
            d,
            nlat,
            nlon,
            lat_nodes,
            points,
            weights,
            legendre_l_max: 0,
            legendre: Vec::new(),
        };
        if d == 3 {
            grid.build_legendre(legendre_l_max);
        }
        Ok(grid)
    }

    fn build_legendre(&mut self, l_max: usize) {
        self.legendre_l_max = l_max;
        self.legendre = self
            .lat_nodes
            .iter()
            .map(|&z| {
                let mut t = vec![0.0; table_len(l_max)];
                normalized_legendre(l_max, z, (1.0 - z * z).sqrt(), &mut t);
                t
            })
            .collect();
    }

    fn legendre_for(&self, l_max: usize) -> std::borrow::Cow<'_, [Vec<f64>]> {
        if l_max <= self.legendre_l_max {
            std::borrow::Cow::Borrowed(&self.legendre)
        } else {
            let mut g = self.clone();
            g.build_legendre(l_max);
            std::borrow::Cow::Owned(g.legendre)
        }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Unit vectors of the nodes (the third entry is 0 for `d = 2`).
    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest degree for which `analyze` is exact on this grid.
    pub fn max_exact_degree(&self) -> usize {
        let lon = self.nlon.saturating_sub(2) / 2;
        match self.d {
            2 => lon,
            _ => lon.min(self.nlat - 1),
        }
    }

    /// Evaluate `f` at every node.
    pub fn sample(&self, f: impl Fn(&[f64; 3]) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    /// Quadrature inner product of two sample vectors.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Harmonic analysis up to degree `l_max`.
    pub fn analyze(&self, samples: &[f64], l_max: usize) -> Result<SphereFunction> {
        if samples.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} sphere samples, got {}",
                self.len(),
                samples.len()
            )));
        }
        if l_max > self.max_exact_degree() {
            return Err(Error::InsufficientResolution {
                l_max,
                reason: format!(
                    "grid with {} colatitudes x {} longitudes resolves degree {} at most",
                    self.nlat,
                    self.nlon,
                    self.max_exact_degree()
                ),
            });
        }
        let rings = self.ring_spectra(samples);
        let dphi = 2.0 * std::f64::consts::PI / self.nlon as f64;
        let mut coeffs = vec![0.0; mode_count(self.d, l_max)];
        if self.d == 2 {
            let f = &rings[0];
            coeffs[0] = dphi * f[0].re * INV_SQRT_2PI;
            for l in 1..=l_max {
                coeffs[2 * l - 1] = dphi * f[l].re * INV_SQRT_PI;
                coeffs[2 * l] = -dphi * f[l].im * INV_SQRT_PI;
            }
        } else {
            let (_, w) = gauss_legendre(self.nlat);
            let table = self.legendre_for(l_max);
            for (i, f) in rings.iter().enumerate() {
                let wi = w[i] * dphi;
                let p = &table[i];
                for l in 0..=l_max {
                    let base = l * l + l;
                    coeffs[base] += wi * f[0].re * p[tri_index(l, 0)] * INV_SQRT_2PI;
                    for m in 1..=l {
                        let pl = wi * p[tri_index(l, m)] * INV_SQRT_PI;
                        coeffs[base + m] += pl * f[m].re;
                        coeffs[base - m] -= pl * f[m].im;
                    }
                }
            }
        }
        SphereFunction::new(self.d, l_max, coeffs)
    }

    /// Point values of `a` at every node.
    pub fn synthesize(&self, a: &SphereFunction) -> Result<Vec<f64>> {
        if a.dimension() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: a.dimension(),
            });
        }
        let l_max = a.l_max();
        let c = a.coeffs();
        let n = self.nlon;
        let mut planner = FftPlanner::<f64>::new();
        let ifft = planner.plan_fft_inverse(n);
        let mut out = Vec::with_capacity(self.len());
        let table = if self.d == 3 { Some(self.legendre_for(l_max)) } else { None };
        for ring in 0..self.nlat {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            if self.d == 2 {
                x[0] += c[0] * INV_SQRT_2PI;
                for l in 1..=l_max {
                    let a = c[2 * l - 1] * INV_SQRT_PI;
                    let b = c[2 * l] * INV_SQRT_PI;
                    x[l % n] += Complex64::new(a, -b);
                }
            } else {
                let p = &table.as_ref().expect("d = 3 has tables")[ring];
                for l in 0..=l_max {
                    let base = l * l + l;
                    x[0] += c[base] * p[tri_index(l, 0)] * INV_SQRT_2PI;
                    for m in 1..=l {
                        let pl = p[tri_index(l, m)] * INV_SQRT_PI;
                        x[m % n] += Complex64::new(pl * c[base + m], -pl * c[base - m]);
                    }
                }
            }
            ifft.process(&mut x);
            out.extend(x.iter().map(|v| v.re));
        }
        Ok(out)
    }

    fn ring_spectra(&self, samples: &[f64]) -> Vec<Vec<Complex64>> {
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(self.nlon);
        samples
            .chunks(self.nlon)
            .map(|ring| {
                let mut x: Vec<Complex64> = ring.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                fft.process(&mut x);
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{basis_values, mode_index};

    #[test]
    fn synthesis_matches_pointwise_basis() {
        for d in [2, 3] {
            let l_max = 5;
            let grid = SphereGrid::new(d, l_max).unwrap();
            let n = mode_count(d, l_max);
            let coeffs: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) as f64).sin()).collect();
            let f = SphereFunction::new(d, l_max, coeffs).unwrap();
            let vals = grid.synthesize(&f).unwrap();
            let mut b = vec![0.0; n];
            for (p, v) in grid.points().iter().zip(&vals) {
                basis_values(d, l_max, p, &mut b);
                let direct: f64 = f.coeffs().iter().zip(&b).map(|(c, x)| c * x).sum();
                assert!((direct - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_analyzes_to_degree_zero() {
        let grid = SphereGrid::new(3, 4).unwrap();
        let f = grid.analyze(&vec![1.0; grid.len()], 4).unwrap();
        assert!((f.coeffs()[0] - (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
        assert!(f.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn y10_roundtrip() {
        let grid = SphereGrid::new(3, 3).unwrap();
        let y = SphereFunction::mode(3, 3, 1, 0);
        let back = grid.analyze(&grid.synthesize(&y).unwrap(), 3).unwrap();
        assert!((back.coeffs()[mode_index(3, 1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_underresolved_analysis() {
        let grid = SphereGrid::new(3, 3).unwrap();
        assert!(matches!(
            grid.analyze(&vec![0.0; grid.len()], 4),
            Err(Error::InsufficientResolution { .. })
        ));
    }
}
