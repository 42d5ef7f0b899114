//! Physical constants, slit and grid declarations, and scenario validation.
//!
//! Everything downstream (channels, superposition, the diffusion solver,
//! trajectories, the quantum oracle) consumes the types defined here.
//! A [`ValidatedScenario`] witnesses that every module's preconditions hold.

use crate::error::{Error, Result};

/// Shared physical constants in natural units.
///
/// `diffusivity`, `kt` and `energy` are derived, never set directly:
/// D = hbar / (2 m) (Einstein relation), kT = E = hbar * omega.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    pub diffusivity: f64,
    pub kt: f64,
    pub energy: f64,
}

impl PhysicalParams {
    /// Derives the dependent constants from `hbar`, `mass` and `omega`.
    pub fn derive(hbar: f64, mass: f64, omega: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("mass", mass), ("omega", omega)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveInput { name, value });
            }
        }
        Ok(PhysicalParams {
            hbar,
            mass,
            omega,
            diffusivity: hbar / (2.0 * mass),
            kt: hbar * omega,
            energy: hbar * omega,
        })
    }
}

impl Default for PhysicalParams {
    /// hbar = 2, m = 1, omega = 1, so that D = 1 and u0 = 1 / sigma0.
    fn default() -> Self {
        PhysicalParams::derive(2.0, 1.0, 1.0).expect("default constants are positive")
    }
}

/// One Gaussian channel: centroid, initial spread, amplitude weight,
/// additive phase offset and signed transverse centroid velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSpec {
    pub center: f64,
    pub sigma0: f64,
    pub weight: f64,
    pub phase_offset: f64,
    pub velocity_x: f64,
}

impl SlitSpec {
    /// A unit-weight slit at rest with no phase offset.
    pub fn new(center: f64, sigma0: f64) -> Self {
        SlitSpec {
            center,
            sigma0,
            weight: 1.0,
            phase_offset: 0.0,
            velocity_x: 0.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_phase_offset(mut self, phase_offset: f64) -> Self {
        self.phase_offset = phase_offset;
        self
    }

    pub fn with_velocity(mut self, velocity_x: f64) -> Self {
        self.velocity_x = velocity_x;
        self
    }

    /// Centroid position at time `t`.
    pub fn centroid_at(&self, t: f64) -> f64 {
        self.center + self.velocity_x * t
    }
}

/// Uniform space-time grid: `nx` points spanning `[x_min, x_max]` and
/// `nt` time steps of size `t_max / nt`, sampled at t = 0, dt, ..., t_max
/// (`nt + 1` time samples in total).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_max: f64,
    pub nt: usize,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.nt as f64
    }

    /// Number of time samples (`nt` steps -> `nt + 1` samples including t = 0).
    pub fn n_times(&self) -> usize {
        self.nt + 1
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.dx()
    }

    pub fn t_at(&self, it: usize) -> f64 {
        it as f64 * self.dt()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(|ix| self.x_at(ix))
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_times()).map(|it| self.t_at(it))
    }
}

/// Which products a run should emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutputSet {
    pub density: bool,
    pub current: bool,
    pub entangling: bool,
    pub trajectories: bool,
    pub oracle_diff: bool,
}

impl OutputSet {
    pub const NAMES: [&'static str; 5] =
        ["density", "current", "entangling", "trajectories", "oracle-diff"];

    pub fn set(&mut self, name: &str) -> bool {
        match name {
            "density" => self.density = true,
            "current" => self.current = true,
            "entangling" => self.entangling = true,
            "trajectories" => self.trajectories = true,
            "oracle-diff" => self.oracle_diff = true,
            _ => return false,
        }
        true
    }

    /// Requested product names in fixed declaration order.
    pub fn iter_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        [
            (self.density, "density"),
            (self.current, "current"),
            (self.entangling, "entangling"),
            (self.trajectories, "trajectories"),
            (self.oracle_diff, "oracle-diff"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
    }

    pub fn is_empty(&self) -> bool {
        self.iter_names().next().is_none()
    }
}

/// Declarative description of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub slits: Vec<SlitSpec>,
    pub grid: GridSpec,
    pub outputs: OutputSet,
    pub trajectory_seeds: usize,
}

impl ScenarioConfig {
    pub fn new(params: PhysicalParams, slits: Vec<SlitSpec>, grid: GridSpec) -> Self {
        ScenarioConfig {
            params,
            slits,
            grid,
            outputs: OutputSet::default(),
            trajectory_seeds: 20,
        }
    }
}

/// A [`ScenarioConfig`] that passed [`validate_scenario`]; downstream modules
/// rely on its invariants and never re-check them.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    cfg: ScenarioConfig,
}

impl ValidatedScenario {
    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn into_config(self) -> ScenarioConfig {
        self.cfg
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.cfg.params
    }

    pub fn slits(&self) -> &[SlitSpec] {
        &self.cfg.slits
    }

    pub fn grid(&self) -> &GridSpec {
        &self.cfg.grid
    }

    /// FNV-1a over the canonical byte image of params, slits and grid.
    /// Stable across runs; used to tag derived artifacts.
    pub fn tag(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut eat = |v: f64| {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        let p = &self.cfg.params;
        for v in [p.hbar, p.mass, p.omega] {
            eat(v);
        }
        for s in &self.cfg.slits {
            for v in [s.center, s.sigma0, s.weight, s.phase_offset, s.velocity_x] {
                eat(v);
            }
        }
        let g = &self.cfg.grid;
        for v in [g.x_min, g.x_max, g.nx as f64, g.t_max, g.nt as f64] {
            eat(v);
        }
        h
    }
}

/// Final dispersion sigma(t_max) for one slit (used by the 6-sigma rule).
fn sigma_final(slit: &SlitSpec, params: &PhysicalParams, t_max: f64) -> f64 {
    let u0 = params.diffusivity / slit.sigma0;
    (slit.sigma0 * slit.sigma0 + u0 * u0 * t_max * t_max).sqrt()
}

/// Checks every invariant the other modules assume and returns the witness.
///
/// Idempotent: validating the config of a `ValidatedScenario` yields an
/// equal witness.
pub fn validate_scenario(cfg: ScenarioConfig) -> Result<ValidatedScenario> {
    let g = &cfg.grid;
    if !g.x_min.is_finite() || !g.x_max.is_finite() || g.x_min >= g.x_max {
        return Err(Error::BadGrid {
            reason: format!("x_min = {} must be below x_max = {}", g.x_min, g.x_max),
        });
    }
    if g.nx < 3 {
        return Err(Error::BadGrid {
            reason: format!("nx = {} must be at least 3", g.nx),
        });
    }
    if g.nt < 1 {
        return Err(Error::BadGrid {
            reason: format!("nt = {} must be at least 1", g.nt),
        });
    }
    if !(g.t_max > 0.0) || !g.t_max.is_finite() {
        return Err(Error::BadGrid {
            reason: format!("t_max = {} must be positive", g.t_max),
        });
    }

    if cfg.slits.is_empty() {
        return Err(Error::EmptySlits);
    }
    for (i, s) in cfg.slits.iter().enumerate() {
        if !(s.sigma0 > 0.0) || !s.sigma0.is_finite() {
            return Err(Error::NonPositiveSigma {
                slit: i,
                value: s.sigma0,
            });
        }
        if s.weight < 0.0 || !s.weight.is_finite() {
            return Err(Error::NegativeWeight {
                slit: i,
                value: s.weight,
            });
        }
    }
    if !cfg.slits.iter().any(|s| s.weight > 0.0) {
        return Err(Error::EmptySlits);
    }

    // Boundary truncation stays below 1e-8 of peak when the domain covers
    // 6 sigma(t_max) around every final centroid.
    for (i, s) in cfg.slits.iter().enumerate() {
        let centroid = s.centroid_at(g.t_max);
        let reach = 6.0 * sigma_final(s, &cfg.params, g.t_max);
        let (needed_min, needed_max) = (centroid - reach, centroid + reach);
        if needed_min < g.x_min || needed_max > g.x_max {
            return Err(Error::DomainTooSmall {
                slit: i,
                needed_min,
                needed_max,
            });
        }
    }

    Ok(ValidatedScenario { cfg })
}
