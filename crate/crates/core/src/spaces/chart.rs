use crate::error::{invalid, Error, Result};
use crate::sphere::{basis_values, mode_count, SphereFunction};

use super::cutoff::CutoffSpec;
use super::field::RemainderField;

/// The integer `N*` with `N - 1 < N* - d/p <= N`.
pub fn n_star(order: usize, d: usize, p: f64) -> usize {
    let ratio = d as f64 / p;
    let mut k = (order as f64 + ratio).floor() as i64;
    // Guard the floor against representation error in d/p.
    while (k as f64 - ratio) > order as f64 {
        k -= 1;
    }
    while (k as f64 + 1.0 - ratio) <= order as f64 {
        k += 1;
    }
    k.max(0) as usize
}

/// Asymptotic coefficients `a_k` for `k = n..=N*` of a function that behaves
/// like `Σ a_k(θ) / r^k` as `r → ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticChart {
    d: usize,
    n: usize,
    order: usize,
    n_star: usize,
    p: f64,
    m: usize,
    coeffs: Vec<SphereFunction>,
}

impl AsymptoticChart {
    /// `coeffs[j]` is `a_{n+j}`; there must be exactly `N* - n + 1` of them.
    pub fn new(
        d: usize,
        n: usize,
        order: usize,
        p: f64,
        m: usize,
        coeffs: Vec<SphereFunction>,
    ) -> Result<Self> {
        crate::sphere::check_dimension(d)?;
        if order < n {
            return Err(invalid("N", format!("order N = {order} must be at least n = {n}")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("must lie in (1, ∞), got {p}")));
        }
        let ns = n_star(order, d, p);
        let expected = ns + 1 - n;
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "chart with n = {n}, N* = {ns} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| c.dimension() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dimension(),
            });
        }
        Ok(Self {
            d,
            n,
            order,
            n_star: ns,
            p,
            m,
            coeffs,
        })
    }

    pub fn zeros(d: usize, n: usize, order: usize, p: f64, m: usize, l_max: usize) -> Result<Self> {
        let ns = n_star(order, d, p);
        let coeffs = (n..=ns.max(n)).map(|_| SphereFunction::zeros(d, l_max)).collect();
        Self::new(d, n, order, p, m, coeffs)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn start(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_star(&self) -> usize {
        self.n_star
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ks(&self) -> std::ops::RangeInclusive<usize> {
        self.n..=self.n_star
    }

    pub fn coeffs(&self) -> &[SphereFunction] {
        &self.coeffs
    }

    /// `a_k`, or `None` outside `n..=N*`.
    pub fn coeff(&self, k: usize) -> Option<&SphereFunction> {
        if k < self.n {
            None
        } else {
            self.coeffs.get(k - self.n)
        }
    }

    pub fn set_coeff(&mut self, k: usize, a: SphereFunction) -> Result<()> {
        if !self.ks().contains(&k) {
            return Err(invalid("k", format!("{k} outside {}..={}", self.n, self.n_star)));
        }
        if a.dimension() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: a.dimension(),
            });
        }
        self.coeffs[k - self.n] = a;
        Ok(())
    }

    /// Largest harmonic degree stored in any coefficient.
    pub fn l_max(&self) -> usize {
        self.coeffs.iter().map(|c| c.l_max()).max().unwrap_or(0)
    }

    /// Nominal sphere regularity `m + 1 + N* - k` for each `k`.
    pub fn reg_ladder(&self) -> Vec<(usize, i64)> {
        self.ks()
            .map(|k| (k, self.m as i64 + 1 + self.n_star as i64 - k as i64))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Same metadata with different coefficients.
    pub fn with_coeffs(&self, coeffs: Vec<SphereFunction>) -> Result<Self> {
        Self::new(self.d, self.n, self.order, self.p, self.m, coeffs)
    }

    /// `Σ_k a_k(θ) / r^k` at `x`, without the cutoff.
    pub fn eval_tail(&self, x: &[f64]) -> f64 {
        self.sampler().eval(x).0
    }

    pub fn sampler(&self) -> ChartSampler<'_> {
        ChartSampler::new(self)
    }
}

/// Evaluates a chart's far-field sum and its radial derivative at points.
pub struct ChartSampler<'a> {
    chart: &'a AsymptoticChart,
    l_max: usize,
    nmodes: usize,
}

impl<'a> ChartSampler<'a> {
    fn new(chart: &'a AsymptoticChart) -> Self {
        let l_max = chart.l_max();
        Self {
            chart,
            l_max,
            nmodes: mode_count(chart.d, l_max),
        }
    }

    /// `(Σ a_k/r^k, Σ -k a_k/r^{k+1})` at `x ≠ 0`.
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        let d = self.chart.d;
        let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut b = vec![0.0; self.nmodes];
        basis_values(d, self.l_max, &x[..d], &mut b);
        let mut value = 0.0;
        let mut radial = 0.0;
        for (j, a) in self.chart.coeffs.iter().enumerate() {
            let k = self.chart.n + j;
            let ak: f64 = a.coeffs().iter().zip(&b).map(|(c, v)| c * v).sum();
            let rk = r.powi(k as i32);
            value += ak / rk;
            radial -= k as f64 * ak / (rk * r);
        }
        (value, radial)
    }

    /// Values of the individual `a_k(θ)` at the direction of `x`.
    pub fn angular_values(&self, x: &[f64]) -> Vec<f64> {
        let d = self.chart.d;
        let mut b = vec![0.0; self.nmodes];
        basis_values(d, self.l_max, &x[..d], &mut b);
        self.chart
            .coeffs
            .iter()
            .map(|a| a.coeffs().iter().zip(&b).map(|(c, v)| c * v).sum())
            .collect()
    }
}

/// `χ(r) Σ a_k(θ)/r^k + f(x)`: an element of the asymptotic space.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticFunction {
    pub chart: AsymptoticChart,
    pub remainder: RemainderField,
    pub cutoff: CutoffSpec,
}

impl AsymptoticFunction {
    pub fn new(chart: AsymptoticChart, remainder: RemainderField, cutoff: CutoffSpec) -> Result<Self> {
        if chart.dimension() != remainder.dimension() {
            return Err(Error::DimensionMismatch {
                expected: chart.dimension(),
                found: remainder.dimension(),
            });
        }
        Ok(Self {
            chart,
            remainder,
            cutoff,
        })
    }

    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    /// Point value; the remainder is interpolated and vanishes off the box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_asymptotic(self, x)
    }

    /// The chart part `χ Σ a_k/r^k` sampled on the remainder grid.
    pub fn chart_on_grid(&self) -> RemainderField {
        chart_on_grid(&self.chart, &self.cutoff, self.remainder.grid())
    }

    /// Chart part plus remainder sampled on the remainder grid.
    pub fn to_grid(&self) -> RemainderField {
        self.chart_on_grid().add(&self.remainder)
    }
}

/// `χ(|x|) Σ_k a_k(x/|x|)/|x|^k + f(x)`.
pub fn eval_asymptotic(v: &AsymptoticFunction, x: &[f64]) -> f64 {
    let d = v.dimension();
    let r = x[..d].iter().map(|c| c * c).sum::<f64>().sqrt();
    let chi = v.cutoff.eval(r);
    let tail = if chi == 0.0 { 0.0 } else { chi * v.chart.eval_tail(x) };
    tail + v.remainder.interpolate(x)
}

/// Sample `χ Σ a_k/r^k` on a grid.
pub fn chart_on_grid(
    chart: &AsymptoticChart,
    cutoff: &CutoffSpec,
    grid: &super::field::Grid,
) -> RemainderField {
    let sampler = chart.sampler();
    let d = chart.dimension();
    RemainderField::from_fn(grid.clone(), |x| {
        let r = x[..d].iter().map(|c| c * c).sum::<f64>().sqrt();
        let chi = cutoff.eval(r);
        if chi == 0.0 {
            0.0
        } else {
            chi * sampler.eval(x).0
        }
    })
}
