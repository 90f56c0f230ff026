use crate::error::{invalid, Result};
use crate::numeric::least_squares;

/// Real orthonormal spherical harmonics of degree `l <= 3` written out as
/// Cartesian polynomials of the unit vector `(x, y, z)`, with `m > 0` the
/// cosine family and `m < 0` the sine family.
pub fn real_harmonic(l: usize, m: i64, u: &[f64; 3]) -> f64 {
    let pi = std::f64::consts::PI;
    let (x, y, z) = (u[0], u[1], u[2]);
    match (l, m) {
        (0, 0) => 0.5 / pi.sqrt(),
        (1, -1) => (3.0 / (4.0 * pi)).sqrt() * y,
        (1, 0) => (3.0 / (4.0 * pi)).sqrt() * z,
        (1, 1) => (3.0 / (4.0 * pi)).sqrt() * x,
        (2, -2) => 0.5 * (15.0 / pi).sqrt() * x * y,
        (2, -1) => 0.5 * (15.0 / pi).sqrt() * y * z,
        (2, 0) => 0.25 * (5.0 / pi).sqrt() * (3.0 * z * z - 1.0),
        (2, 1) => 0.5 * (15.0 / pi).sqrt() * x * z,
        (2, 2) => 0.25 * (15.0 / pi).sqrt() * (x * x - y * y),
        (3, -3) => 0.25 * (35.0 / (2.0 * pi)).sqrt() * y * (3.0 * x * x - y * y),
        (3, -2) => 0.5 * (105.0 / pi).sqrt() * x * y * z,
        (3, -1) => 0.25 * (21.0 / (2.0 * pi)).sqrt() * y * (5.0 * z * z - 1.0),
        (3, 0) => 0.25 * (7.0 / pi).sqrt() * z * (5.0 * z * z - 3.0),
        (3, 1) => 0.25 * (21.0 / (2.0 * pi)).sqrt() * x * (5.0 * z * z - 1.0),
        (3, 2) => 0.25 * (105.0 / pi).sqrt() * z * (x * x - y * y),
        (3, 3) => 0.25 * (35.0 / (2.0 * pi)).sqrt() * x * (x * x - 3.0 * y * y),
        _ => panic!("closed-form harmonic not tabulated for l = {l}, m = {m}"),
    }
}

/// Least-squares fit of `u(x) ≈ Σ_{l<=l_max} Σ_m c_{l,m} Y_{l,m}(θ)/r^{l+1}`
/// to samples `(x_i, u_i)`. Returns `c` grouped by degree, `m = -l..=l`.
pub fn far_field_fit(points: &[[f64; 3]], values: &[f64], l_max: usize) -> Result<Vec<Vec<f64>>> {
    if l_max > 3 {
        return Err(invalid("l_max", "far-field fit tabulates degrees up to 3"));
    }
    let cols = (l_max + 1) * (l_max + 1);
    if points.len() < cols || points.len() != values.len() {
        return Err(invalid("points", "need at least as many samples as unknowns"));
    }
    let mut a = Vec::with_capacity(points.len() * cols);
    for p in points {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let u = [p[0] / r, p[1] / r, p[2] / r];
        for l in 0..=l_max {
            for m in -(l as i64)..=l as i64 {
                a.push(real_harmonic(l, m, &u) / r.powi(l as i32 + 1));
            }
        }
    }
    let c = least_squares(&a, values, points.len(), cols)
        .ok_or_else(|| invalid("points", "far-field design matrix is rank deficient"))?;
    let mut out = Vec::new();
    let mut off = 0;
    for l in 0..=l_max {
        out.push(c[off..off + 2 * l + 1].to_vec());
        off += 2 * l + 1;
    }
    Ok(out)
}
