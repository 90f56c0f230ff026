use serde::{Deserialize, Serialize};

/// Shape of the transition of the cutoff between its plateaus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// `q(s) = s^4 (35 - 84 s + 70 s^2 - 20 s^3)`, C³ at both ends.
    #[default]
    PolynomialSmoothstep,
    /// `g(s) / (g(s) + g(1 - s))` with `g(s) = exp(-1/s)`, C^∞.
    SmoothBump,
}

/// Radial cutoff `χ`: 0 on `[0, r0]`, 1 on `[r1, ∞)`, monotone in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    #[serde(default)]
    pub kind: CutoffKind,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_r1")]
    pub r1: f64,
}

fn default_r0() -> f64 {
    1.0
}

fn default_r1() -> f64 {
    2.0
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            kind: CutoffKind::PolynomialSmoothstep,
            r0: 1.0,
            r1: 2.0,
        }
    }
}

impl CutoffSpec {
    pub fn bump() -> Self {
        Self {
            kind: CutoffKind::SmoothBump,
            ..Self::default()
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_derivatives(r).0
    }

    /// `(χ, χ', χ'')` at radius `r`.
    pub fn eval_with_derivatives(&self, r: f64) -> (f64, f64, f64) {
        if r <= self.r0 {
            return (0.0, 0.0, 0.0);
        }
        if r >= self.r1 {
            return (1.0, 0.0, 0.0);
        }
        let w = self.r1 - self.r0;
        let s = (r - self.r0) / w;
        let (q, dq, ddq) = match self.kind {
            CutoffKind::PolynomialSmoothstep => smoothstep(s),
            CutoffKind::SmoothBump => bump(s),
        };
        (q, dq / w, ddq / (w * w))
    }
}

/// Evaluate the cutoff at `r`.
pub fn cutoff_eval(spec: &CutoffSpec, r: f64) -> f64 {
    spec.eval(r)
}

fn smoothstep(s: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let q = s2 * s2 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3);
    let t = 1.0 - s;
    let dq = 140.0 * s3 * t * t * t;
    let ddq = 420.0 * s2 * t * t * (1.0 - 2.0 * s);
    (q, dq, ddq)
}

fn bump(s: f64) -> (f64, f64, f64) {
    let g = |x: f64| -> (f64, f64, f64) {
        if x <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let e = (-1.0 / x).exp();
        let x2 = x * x;
        (e, e / x2, e * (1.0 / (x2 * x2) - 2.0 / (x2 * x)))
    };
    let (a, da, dda) = g(s);
    let (b, db0, ddb0) = g(1.0 - s);
    // Chain rule for the reflected argument.
    let (db, ddb) = (-db0, ddb0);
    let sum = a + b;
    let num1 = da * b - a * db;
    let q = a / sum;
    let dq = num1 / (sum * sum);
    let ddq = ((dda * b - a * ddb) * sum - 2.0 * num1 * (da + db)) / (sum * sum * sum);
    (q, dq, ddq)
}
