//! Run configuration. Every section has defaults, so `{}` is a valid config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use asympheat::semilinear::{semilinear_cutoff, Tolerances, BOUNDARY_TOLERANCE};
use asympheat::spaces::{n_star, AsymptoticChart, CutoffSpec, Grid, RemainderField, SphereFunction};
use asympheat::sphere::mode_count;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A config problem, tagged with the dotted path of the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "`{}`: {}", self.path, self.message)
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub grid: GridConfig,
    pub chart: ChartConfig,
    /// Initial remainder for `evolve`.
    pub remainder: Profile,
    pub cutoff: CutoffSpec,
    pub evolve: EvolveConfig,
    pub problem: ProblemConfig,
    pub flow: FlowConfig,
    pub resolvent: ResolventConfig,
    pub sweep: SweepConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    /// Samples per axis.
    pub n: usize,
    pub spacing: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { d: 3, n: 48, spacing: 0.25 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChartConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub p: f64,
    pub m: usize,
    pub l_max: usize,
    /// `a_k` by `k`, in sphere-mode order; short vectors are zero-padded.
    pub coeffs: BTreeMap<String, Vec<f64>>,
    /// When set, coefficients not listed in `coeffs` are drawn uniformly from
    /// `[-amplitude, amplitude]` with the run seed.
    pub random_amplitude: Option<f64>,
}

impl Default for ChartConfig {
    fn default() -> Self {
        Self {
            n: 0,
            order: 3,
            p: 4.0,
            m: 1,
            l_max: 2,
            coeffs: BTreeMap::new(),
            random_amplitude: Some(1.0),
        }
    }
}

/// `amplitude · exp(-|x - center|²/width²) · (1 + tilt·x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Profile {
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 3],
    pub tilt: [f64; 3],
}

impl Default for Profile {
    fn default() -> Self {
        Self { amplitude: 1.0, width: 1.0, center: [0.0; 3], tilt: [0.0; 3] }
    }
}

impl Profile {
    fn scaled(amplitude: f64) -> Self {
        Self { amplitude, ..Self::default() }
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        let mut r2 = 0.0;
        let mut lin = 1.0;
        for a in 0..3 {
            r2 += (x[a] - self.center[a]).powi(2);
            lin += self.tilt[a] * x[a];
        }
        self.amplitude * (-r2 / (self.width * self.width)).exp() * lin
    }

    pub fn sample(&self, grid: &Grid) -> RemainderField {
        RemainderField::from_fn(grid.clone(), |x| self.eval(x))
    }

    pub fn validate(&self, path: &str) -> Result<(), ConfigError> {
        if !self.amplitude.is_finite() {
            return Err(ConfigError::new(format!("{path}.amplitude"), "must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(ConfigError::new(format!("{path}.width"), "must be positive"));
        }
        if self.center.iter().chain(&self.tilt).any(|v| !v.is_finite()) {
            return Err(ConfigError::new(path, "center and tilt must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    pub times: Vec<f64>,
    /// Write chart and remainder snapshots at every time.
    pub snapshots: bool,
    /// Fit the growth exponent of the asymptotic norm over `t >= fit_from`
    /// and require it to stay below `(N + N* + 2)/2 + 0.1`.
    pub check_growth: bool,
    pub fit_from: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { times: vec![0.0, 0.25, 0.5, 1.0, 2.0], snapshots: true, check_growth: false, fit_from: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub phi: Profile,
    pub psi: Profile,
    #[serde(rename = "N")]
    pub order: usize,
    pub p: f64,
    pub cutoff: CutoffSpec,
    pub tolerances: Tolerances,
    /// Skip the (slow) maximum-principle oracle.
    pub skip_max_principle: bool,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            phi: Profile::default(),
            psi: Profile::scaled(0.5),
            order: 3,
            p: 4.0,
            cutoff: semilinear_cutoff(),
            tolerances: Tolerances::default(),
            skip_max_principle: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStart {
    /// The equilibrium of `problem`, optionally perturbed.
    Equilibrium,
    /// `u = 0` plus the optional perturbation.
    Zero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub start: FlowStart,
    pub perturbation: Option<Profile>,
    pub t_end: f64,
    pub dt: f64,
    pub snapshot_every: usize,
    pub monitor_p: Vec<f64>,
    pub delta: f64,
    /// Allowed increase of the monitored norms when `φ = 0`.
    pub monotone_slack: f64,
    /// Allowed sup distance from `u*` when starting at the equilibrium.
    pub stationary_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            start: FlowStart::Equilibrium,
            perturbation: None,
            t_end: 1.0,
            dt: 0.02,
            snapshot_every: 0,
            monitor_p: vec![2.0, 4.0],
            delta: 0.0,
            monotone_slack: 1e-8,
            stationary_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolventConfig {
    pub d: usize,
    /// Number of sector samples.
    pub count: usize,
    pub omega: f64,
    pub eps: f64,
    pub kappa: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub delta: f64,
    /// Random points for the closed-form kernel comparison.
    pub kernel_points: usize,
    /// `[re, im]` pairs for the resolvent identity on a Gaussian.
    pub identity_lambdas: Vec<[f64; 2]>,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        Self {
            d: 3,
            count: 50,
            omega: 1.0,
            eps: 0.3,
            kappa: 0.5,
            rho_min: 0.5,
            rho_max: 1e4,
            delta: 0.0,
            kernel_points: 100,
            identity_lambdas: vec![[1.0, 0.0], [-0.5, 2.0], [3.0, -4.0]],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub trials: usize,
    pub scale: f64,
    pub threshold: f64,
    pub k_max: usize,
    /// Required fraction of trials with every `a_k`, `k <= k_max`, non-zero.
    pub min_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { trials: 20, scale: 0.1, threshold: 1e-8, k_max: 3, min_fraction: 0.95 }
    }
}

/// Parse a config file, reporting the path of the first bad field.
pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ConfigError::new(path, e.into_inner().to_string())
    })
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("must be positive and finite, got {v}")))
    }
}

fn exponent(path: &str, p: f64) -> Result<(), ConfigError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("must lie in (1, ∞), got {p}")))
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.d == 2 || self.d == 3) {
            return Err(ConfigError::new("grid.d", format!("must be 2 or 3, got {}", self.d)));
        }
        if self.n < 8 {
            return Err(ConfigError::new("grid.n", format!("need at least 8 samples per axis, got {}", self.n)));
        }
        positive("grid.spacing", self.spacing)
    }

    pub fn build(&self) -> Result<Grid, ConfigError> {
        self.validate()?;
        Grid::cube(self.d, self.n, self.spacing).map_err(|e| ConfigError::new("grid", e.to_string()))
    }
}

impl ChartConfig {
    pub fn validate(&self, d: usize) -> Result<(), ConfigError> {
        if self.order < self.n {
            return Err(ConfigError::new("chart.N", format!("order N = {} is below n = {}", self.order, self.n)));
        }
        exponent("chart.p", self.p)?;
        let ns = n_star(self.order, d, self.p);
        let modes = mode_count(d, self.l_max);
        for (key, values) in &self.coeffs {
            let path = format!("chart.coeffs.{key}");
            let k: usize = key.parse().map_err(|_| ConfigError::new(&path, "key must be an integer k"))?;
            if k < self.n || k > ns {
                return Err(ConfigError::new(&path, format!("k must lie in {}..={ns}", self.n)));
            }
            if values.len() > modes {
                return Err(ConfigError::new(&path, format!("at most {modes} modes for l_max = {}", self.l_max)));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(ConfigError::new(&path, "coefficients must be finite"));
            }
        }
        if let Some(a) = self.random_amplitude {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(ConfigError::new("chart.random_amplitude", "must be finite and non-negative"));
            }
        }
        Ok(())
    }

    pub fn build(&self, d: usize, seed: u64) -> Result<AsymptoticChart, ConfigError> {
        self.validate(d)?;
        let ns = n_star(self.order, d, self.p);
        let modes = mode_count(d, self.l_max);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (self.n..=ns)
            .map(|k| {
                let mut c = vec![0.0; modes];
                if let Some(listed) = self.coeffs.get(&k.to_string()) {
                    c[..listed.len()].copy_from_slice(listed);
                } else if let Some(a) = self.random_amplitude {
                    for v in c.iter_mut() {
                        *v = a * rng.random_range(-1.0..1.0);
                    }
                }
                SphereFunction::new(d, self.l_max, c).expect("mode count")
            })
            .collect();
        AsymptoticChart::new(d, self.n, self.order, self.p, self.m, coeffs)
            .map_err(|e| ConfigError::new("chart", e.to_string()))
    }
}

fn cutoff(path: &str, c: &CutoffSpec) -> Result<(), ConfigError> {
    if !(c.r0 > 0.0 && c.r1 > c.r0 && c.r1.is_finite()) {
        return Err(ConfigError::new(path, format!("need 0 < r0 < r1, got r0 = {}, r1 = {}", c.r0, c.r1)));
    }
    Ok(())
}

impl ProblemConfig {
    pub fn validate(&self, grid: &GridConfig) -> Result<(), ConfigError> {
        if grid.d != 3 {
            return Err(ConfigError::new("grid.d", "semilinear problems are three-dimensional"));
        }
        self.phi.validate("problem.phi")?;
        self.psi.validate("problem.psi")?;
        if self.psi.amplitude < 0.0 {
            return Err(ConfigError::new("problem.psi.amplitude", "ψ must be non-negative"));
        }
        if self.psi.tilt != [0.0; 3] {
            return Err(ConfigError::new("problem.psi.tilt", "a tilted ψ changes sign"));
        }
        if self.order < 1 {
            return Err(ConfigError::new("problem.N", "asymptotic order must be at least 1"));
        }
        exponent("problem.p", self.p)?;
        cutoff("problem.cutoff", &self.cutoff)?;
        let t = &self.tolerances;
        positive("problem.tolerances.newton_tol", t.newton_tol)?;
        positive("problem.tolerances.gmres_tol", t.gmres_tol)?;
        positive("problem.tolerances.dt", t.dt)?;
        Ok(())
    }

    /// Sample `φ`, `ψ` and check that they vanish on the box faces.
    pub fn fields(&self, grid: &Grid) -> Result<(RemainderField, RemainderField), ConfigError> {
        let phi = self.phi.sample(grid);
        let psi = self.psi.sample(grid);
        for (name, f) in [("problem.phi", &phi), ("problem.psi", &psi)] {
            let b = f.boundary_sup();
            if b > BOUNDARY_TOLERANCE {
                return Err(ConfigError::new(
                    name,
                    format!("is {b:.3e} on the box faces; widen the grid or narrow the profile"),
                ));
            }
        }
        Ok((phi, psi))
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("flow.t_end", self.t_end)?;
        positive("flow.dt", self.dt)?;
        if self.dt > self.t_end {
            return Err(ConfigError::new("flow.dt", "step exceeds t_end"));
        }
        for (i, &p) in self.monitor_p.iter().enumerate() {
            exponent(&format!("flow.monitor_p[{i}]"), p)?;
        }
        if let Some(p) = &self.perturbation {
            p.validate("flow.perturbation")?;
        }
        Ok(())
    }
}

impl ResolventConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.d == 2 || self.d == 3) {
            return Err(ConfigError::new("resolvent.d", format!("must be 2 or 3, got {}", self.d)));
        }
        if !(self.eps > 0.0 && self.eps < std::f64::consts::PI) {
            return Err(ConfigError::new("resolvent.eps", "must lie in (0, π)"));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(ConfigError::new("resolvent.omega", "must be finite and non-negative"));
        }
        positive("resolvent.kappa", self.kappa)?;
        positive("resolvent.rho_min", self.rho_min)?;
        if !(self.rho_max > self.rho_min && self.rho_max.is_finite()) {
            return Err(ConfigError::new("resolvent.rho_max", "must exceed rho_min"));
        }
        for (i, l) in self.identity_lambdas.iter().enumerate() {
            if l.iter().any(|v| !v.is_finite()) {
                return Err(ConfigError::new(format!("resolvent.identity_lambdas[{i}]"), "must be finite"));
            }
            if l[1] == 0.0 && l[0] <= 0.0 {
                return Err(ConfigError::new(
                    format!("resolvent.identity_lambdas[{i}]"),
                    "λ on the spectrum (−∞, 0]",
                ));
            }
        }
        Ok(())
    }
}

impl SweepConfig {
    pub fn validate(&self, n_star: usize) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::new("sweep.trials", "need at least one trial"));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(ConfigError::new("sweep.scale", "must be finite and non-negative"));
        }
        if !(self.threshold >= 0.0) {
            return Err(ConfigError::new("sweep.threshold", "must be non-negative"));
        }
        if self.k_max == 0 || self.k_max > n_star {
            return Err(ConfigError::new("sweep.k_max", format!("must lie in 1..={n_star}")));
        }
        if !(0.0..=1.0).contains(&self.min_fraction) {
            return Err(ConfigError::new("sweep.min_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

impl Config {
    pub fn validate_common(&self) -> Result<(), ConfigError> {
        self.grid.validate()?;
        cutoff("cutoff", &self.cutoff)
    }
}
