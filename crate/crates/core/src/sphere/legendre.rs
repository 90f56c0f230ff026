//! Fully normalized associated Legendre functions, `∫_{-1}^{1} P̄_l^m(x)^2 dx = 1`,
//! without the Condon–Shortley phase.

/// Index of `(l, m)` with `0 <= m <= l` in a packed triangular table.
#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

pub fn table_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

/// Fill `out` with `P̄_l^m(x)` for all `0 <= m <= l <= l_max`. `sin_theta` is
/// `sqrt(1 - x^2)` supplied by the caller so that it can be computed from
/// Cartesian coordinates without cancellation.
pub fn normalized_legendre(l_max: usize, x: f64, sin_theta: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= table_len(l_max));
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta;
        }
        out[tri_index(m, m)] = pmm;
        if m == l_max {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p = (2.0 * mf + 3.0).sqrt() * x * pmm;
        out[tri_index(m + 1, m)] = p;
        for l in m + 2..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let next = a * (x * p - b * p_prev);
            p_prev = p;
            p = next;
            out[tri_index(l, m)] = p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::gauss_legendre;

    #[test]
    fn normalized_and_orthogonal() {
        let l_max = 12;
        let (x, w) = gauss_legendre(l_max + 2);
        let mut tables = Vec::new();
        for &xi in &x {
            let mut t = vec![0.0; table_len(l_max)];
            normalized_legendre(l_max, xi, (1.0 - xi * xi).sqrt(), &mut t);
            tables.push(t);
        }
        for m in 0..=l_max {
            for l1 in m..=l_max {
                for l2 in m..=l_max {
                    let s: f64 = (0..x.len())
                        .map(|i| w[i] * tables[i][tri_index(l1, m)] * tables[i][tri_index(l2, m)])
                        .sum();
                    let expect = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "l1={l1} l2={l2} m={m}: {s}");
                }
            }
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let x: f64 = 0.3;
        let s = (1.0 - x * x).sqrt();
        let mut t = vec![0.0; table_len(2)];
        normalized_legendre(2, x, s, &mut t);
        assert!((t[tri_index(1, 0)] - (1.5f64).sqrt() * x).abs() < 1e-15);
        assert!((t[tri_index(1, 1)] - (0.75f64).sqrt() * s).abs() < 1e-15);
        let p20 = (2.5f64).sqrt() * 0.5 * (3.0 * x * x - 1.0);
        assert!((t[tri_index(2, 0)] - p20).abs() < 1e-15);
    }
}
