//! First Hankel function `H^{(1)}_ν(z)` for real `ν >= 0` and complex `z`.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// `|z|` at which evaluation switches from the power series to the
/// large-argument expansion.
pub const CROSSOVER: f64 = 10.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `Γ(x)` for real `x` (Lanczos, g = 7), with reflection for `x < 1/2`.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = std::f64::consts::PI;
    if x < 0.5 {
        return pi / ((pi * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * pi).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `1/Γ(x)`, zero at the poles.
fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn digamma_int(n: usize) -> f64 {
    // ψ(n) for a positive integer n.
    -EULER_GAMMA + (1..n).map(|j| 1.0 / j as f64).sum::<f64>()
}

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0
}

fn is_half_integer(nu: f64) -> bool {
    (nu - 0.5).fract() == 0.0
}

/// `J_ν(z)` by its power series (any real `ν` that is not a negative integer).
pub fn bessel_j_series(nu: f64, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    let q = -half * half;
    let mut term = half.powf(nu) * rgamma(nu + 1.0);
    // For negative non-integer ν starting with a vanishing 1/Γ is impossible,
    // so the recursion below is safe.
    let mut sum = term;
    for k in 1..400 {
        term *= q / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `Y_ν(z)` from power series: the `J_{-ν}` formula for non-integer `ν`,
/// the logarithmic series for integer `ν`.
pub fn bessel_y_series(nu: f64, z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    if !is_integer(nu) {
        let (s, c) = (nu * pi).sin_cos();
        return (bessel_j_series(nu, z) * c - bessel_j_series(-nu, z)) / s;
    }
    let n = nu as usize;
    let half = z * 0.5;
    let mut y = bessel_j_series(nu, z) * (half.ln() * (2.0 / pi));
    // Finite part: -(1/π) Σ_{k<n} (n-k-1)!/k! (z/2)^{2k-n}
    let mut fin = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let c = factorial(n - k - 1) / factorial(k);
        fin += half.powi(2 * k as i32 - n as i32) * c;
    }
    y -= fin / pi;
    // Series: -(1/π) Σ (-1)^k [ψ(k+1) + ψ(n+k+1)] (z/2)^{2k+n} / (k!(n+k)!)
    let q = -half * half;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
    for k in 1..400 {
        term *= q / (k as f64 * (k + n) as f64);
        let add = term * (digamma_int(k + 1) + digamma_int(n + k + 1));
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    y - sum / pi
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `H^{(1)}_ν = J_ν + i Y_ν` from the power series.
pub fn hankel1_series(nu: f64, z: Complex64) -> Complex64 {
    bessel_j_series(nu, z) + Complex64::i() * bessel_y_series(nu, z)
}

/// Large-argument expansion
/// `sqrt(2/(πz)) e^{i(z - νπ/2 - π/4)} Σ_k i^k a_k(ν) / z^k`, summed up to
/// `max_terms` terms or until the terms stop decreasing.
pub fn hankel1_asymptotic(nu: f64, z: Complex64, max_terms: usize) -> Complex64 {
    let pi = std::f64::consts::PI;
    let mu = 4.0 * nu * nu;
    let i = Complex64::i();
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..max_terms {
        let odd = (2 * k - 1) as f64;
        term *= i * (mu - odd * odd) / (k as f64 * 8.0 * z);
        let size = term.norm();
        if size >= last || size < 1e-17 * sum.norm() {
            break;
        }
        sum += term;
        last = size;
    }
    (2.0 / (pi * z)).sqrt() * (i * (z - nu * pi / 2.0 - pi / 4.0)).exp() * sum
}

/// Closed form for `ν = n + 1/2`: `H = sqrt(2z/π) h_n(z)` with the spherical
/// Hankel function
/// `h_n(z) = (-i)^{n+1} (e^{iz}/z) Σ_{k≤n} i^k (n+k)! / (k! (n-k)! (2z)^k)`.
pub fn hankel1_half_integer(n: usize, z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ik = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        sum += ik * factorial(n + k) / (factorial(k) * factorial(n - k)) / (z * 2.0).powi(k as i32);
        ik *= i;
    }
    let h = (-i).powi(n as i32 + 1) * (i * z).exp() / z * sum;
    (z * (2.0 / std::f64::consts::PI)).sqrt() * h
}

/// `H^{(1)}_ν(z)` for `ν >= 0`, `z ≠ 0`, `|arg z| < π`.
pub fn hankel1(nu: f64, z: Complex64) -> Result<Complex64> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(invalid("nu", format!("order must be finite and >= 0, got {nu}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(invalid("z", "the Hankel function is singular at z = 0"));
    }
    if is_half_integer(nu) {
        return Ok(hankel1_half_integer((nu - 0.5) as usize, z));
    }
    if z.norm() < CROSSOVER {
        Ok(hankel1_series(nu, z))
    } else {
        Ok(hankel1_asymptotic(nu, z, 200))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn half_order_closed_form_matches_series() {
        let z = Complex64::new(0.0, 1.0);
        let closed = -Complex64::i() * (2.0 / (std::f64::consts::PI * z)).sqrt() * (Complex64::i() * z).exp();
        let series = hankel1_series(0.5, z);
        assert!((closed - series).norm() < 1e-10 * closed.norm());
        assert!((hankel1(0.5, z).unwrap() - closed).norm() < 1e-15);
    }

    #[test]
    fn known_real_values() {
        // J_0(1), Y_0(1), J_1(2), Y_1(2)
        let h0 = hankel1_series(0.0, Complex64::new(1.0, 0.0));
        assert!((h0.re - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((h0.im - 0.088_256_964_215_676_96).abs() < 1e-14);
        let h1 = hankel1_series(1.0, Complex64::new(2.0, 0.0));
        assert!((h1.re - 0.576_724_807_756_873_4).abs() < 1e-14);
        assert!((h1.im - (-0.107_032_431_540_937_55)).abs() < 1e-14);
    }

    #[test]
    fn wronskian() {
        let pi = std::f64::consts::PI;
        for &(nu, z) in &[(0.0, Complex64::new(1.3, 0.4)), (0.3, Complex64::new(2.0, -1.0)), (2.0, Complex64::new(0.7, 2.2))] {
            let w = bessel_j_series(nu + 1.0, z) * bessel_y_series(nu, z)
                - bessel_j_series(nu, z) * bessel_y_series(nu + 1.0, z);
            let expect = 2.0 / (pi * z);
            assert!((w - expect).norm() < 1e-12 * expect.norm(), "nu={nu}");
        }
    }
}
