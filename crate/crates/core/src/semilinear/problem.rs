use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spaces::{n_star, CutoffKind, CutoffSpec, Grid, RemainderField};

/// Cutoff used by semilinear problems. The transition annulus is wider than
/// the default so that `Δ(χ a_k/r^k)` is resolved at grid spacing 0.25.
pub fn semilinear_cutoff() -> CutoffSpec {
    CutoffSpec { kind: CutoffKind::PolynomialSmoothstep, r0: 2.0, r1: 6.0 }
}

/// Largest admissible value of `φ` or `ψ` on the faces of the box.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Solver settings shared by the equilibrium, flow and Picard drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Target for `‖Δu - ψu³ + φ‖_{L²}`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Relative residual for the inner GMRES solves.
    pub gmres_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    /// Time step of the flow integrator.
    pub dt: f64,
    /// Abort when `‖u‖_∞` exceeds this.
    pub blow_up: f64,
    pub picard_max_iter: usize,
    pub picard_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton_tol: 1e-8,
            newton_max_iter: 50,
            gmres_tol: 1e-12,
            gmres_restart: 40,
            gmres_max_iter: 400,
            dt: 0.01,
            blow_up: 1e6,
            picard_max_iter: 30,
            picard_tol: 1e-13,
        }
    }
}

/// `u_t = Δu + φ - ψu³` on `R³` with `ψ >= 0` and rapidly decaying data,
/// sampled on a common grid.
#[derive(Clone, Debug)]
pub struct SemilinearProblem {
    pub phi: RemainderField,
    pub psi: RemainderField,
    /// Asymptotic order `N` of the chart `a_1 .. a_{N*}`.
    pub order: usize,
    pub p: f64,
    pub cutoff: CutoffSpec,
    pub tolerances: Tolerances,
}

impl SemilinearProblem {
    pub fn new(phi: RemainderField, psi: RemainderField, order: usize, p: f64) -> Result<Self> {
        let prob = Self {
            phi,
            psi,
            order,
            p,
            cutoff: semilinear_cutoff(),
            tolerances: Tolerances::default(),
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_cutoff(mut self, cutoff: CutoffSpec) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.phi.dimension();
        if d != 3 {
            return Err(invalid("d", format!("semilinear problems are posed in d = 3, got {d}")));
        }
        if self.phi.grid() != self.psi.grid() {
            return Err(Error::ShapeMismatch("φ and ψ must share a grid".into()));
        }
        if self.order < 1 {
            return Err(invalid("N", "asymptotic order must be at least 1"));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid("p", format!("must lie in (1, ∞), got {}", self.p)));
        }
        if let Some(v) = self.psi.data().iter().find(|v| !(**v >= 0.0)) {
            return Err(invalid("psi", format!("must be non-negative everywhere, found {v}")));
        }
        for (name, f) in [("phi", &self.phi), ("psi", &self.psi)] {
            if f.data().iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name));
            }
            let b = f.boundary_sup();
            if b > BOUNDARY_TOLERANCE {
                return Err(invalid(
                    name,
                    format!("must decay to below {BOUNDARY_TOLERANCE:e} on the box faces, found {b:e}"),
                ));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    pub fn n_star(&self) -> usize {
        n_star(self.order, 3, self.p)
    }

    /// `ψu³ - φ`, the right-hand side of `Δu = ψu³ - φ`.
    pub fn source(&self, u: &[f64]) -> Vec<f64> {
        let phi = self.phi.data();
        let psi = self.psi.data();
        u.iter()
            .zip(phi.iter().zip(psi))
            .map(|(&v, (&f, &s))| s * v * v * v - f)
            .collect()
    }

    /// `φ - ψu³`.
    pub fn reaction(&self, u: &[f64]) -> Vec<f64> {
        self.source(u).into_iter().map(|v| -v).collect()
    }
}
