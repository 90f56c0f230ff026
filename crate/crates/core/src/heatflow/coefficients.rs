use num_complex::Complex64;

use crate::spaces::AsymptoticChart;
use crate::sphere::SphereFunction;

/// Exact time dependence of the chart coefficients under the heat flow.
///
/// `a_k(t) = Σ_j c_{k,j} t^j` where `c_{k,0} = b_k` and
/// `c_{k,j+1} = (Δ_θ + (k-2)(k-d)) c_{k-2,j} / (j+1)`. The first two
/// coefficients `a_n`, `a_{n+1}` have no predecessor and stay constant.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFlow {
    initial: AsymptoticChart,
    /// `poly[k - n][j]` is the coefficient of `t^j` in `a_k`.
    poly: Vec<Vec<SphereFunction>>,
}

impl CoefficientFlow {
    pub fn chart(&self) -> &AsymptoticChart {
        &self.initial
    }

    /// Polynomial coefficients of `a_k`, lowest power first.
    pub fn polynomial(&self, k: usize) -> &[SphereFunction] {
        &self.poly[k - self.initial.start()]
    }

    /// Degree in `t` of `a_k`.
    pub fn degree(&self, k: usize) -> usize {
        self.polynomial(k).len() - 1
    }

    /// Largest degree over all `k`.
    pub fn max_degree(&self) -> usize {
        self.poly.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    /// The chart at real time `t`.
    pub fn eval(&self, t: f64) -> AsymptoticChart {
        let coeffs = self
            .poly
            .iter()
            .map(|p| {
                // Horner in t.
                let mut acc = p.last().expect("nonempty polynomial").clone();
                for c in p.iter().rev().skip(1) {
                    acc = c.add_scaled(&acc, t);
                }
                acc
            })
            .collect();
        self.initial.with_coeffs(coeffs).expect("metadata unchanged")
    }

    /// Real and imaginary parts of the chart at complex time `z`.
    pub fn eval_complex(&self, z: Complex64) -> (AsymptoticChart, AsymptoticChart) {
        let mut re = Vec::with_capacity(self.poly.len());
        let mut im = Vec::with_capacity(self.poly.len());
        for p in &self.poly {
            let n = p[0].coeffs().len();
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            let mut zj = Complex64::new(1.0, 0.0);
            for c in p {
                for (a, v) in acc.iter_mut().zip(c.coeffs()) {
                    *a += zj * v;
                }
                zj *= z;
            }
            let d = p[0].dimension();
            let l = p[0].l_max();
            re.push(SphereFunction::new(d, l, acc.iter().map(|c| c.re).collect()).expect("finite"));
            im.push(SphereFunction::new(d, l, acc.iter().map(|c| c.im).collect()).expect("finite"));
        }
        (
            self.initial.with_coeffs(re).expect("metadata unchanged"),
            self.initial.with_coeffs(im).expect("metadata unchanged"),
        )
    }

    /// The flow started from `a(t0)`: every coefficient polynomial shifted
    /// by `t ↦ t + t0`. Equal, up to roundoff, to evolving `eval(t0)`.
    pub fn shifted(&self, t0: f64) -> Self {
        let poly = self.poly.iter().map(|p| shift_polynomial(p, t0)).collect();
        Self {
            initial: self.eval(t0),
            poly,
        }
    }
}

fn shift_polynomial(p: &[SphereFunction], t0: f64) -> Vec<SphereFunction> {
    // c'_i = Σ_{j≥i} C(j, i) t0^{j-i} c_j
    let deg = p.len();
    (0..deg)
        .map(|i| {
            let mut acc = SphereFunction::zeros(p[0].dimension(), p[0].l_max());
            let mut binom = 1.0;
            let mut pow = 1.0;
            for (j, c) in p.iter().enumerate().skip(i) {
                if j > i {
                    binom = binom * j as f64 / (j - i) as f64;
                    pow *= t0;
                }
                acc = acc.add_scaled(c, binom * pow);
            }
            acc
        })
        .collect()
}

/// Build the exact coefficient flow of a chart.
pub fn evolve_coefficients(chart: &AsymptoticChart) -> CoefficientFlow {
    let d = chart.dimension() as i64;
    let n = chart.start();
    let l_max = chart.l_max();
    let mut poly: Vec<Vec<SphereFunction>> = Vec::new();
    for k in chart.ks() {
        let b = chart.coeff(k).expect("k in range").with_l_max(l_max);
        let mut p = vec![b];
        if k >= n + 2 {
            let shift = ((k as i64 - 2) * (k as i64 - d)) as f64;
            let prev = &poly[k - 2 - n];
            for (j, c) in prev.iter().enumerate() {
                p.push(c.shifted_laplacian(shift).scale(1.0 / (j as f64 + 1.0)));
            }
        }
        poly.push(p);
    }
    CoefficientFlow {
        initial: chart.clone(),
        poly,
    }
}
