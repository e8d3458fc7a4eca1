//! The PSO / DPSO state machine.
//!
//! Each iteration moves every particle with the inertia-weight update
//!
//! ```text
//! v <- omega v + c1 r1 (p - x) + c2 r2 (g - x) + v_mod
//! v <- clamp(v, -vmax, vmax)
//! x <- clamp(x + v, lb, ub)
//! ```
//!
//! where the modulation velocity `v_mod = c3 r3 kappa(p, g) (x - g) / (|x - g| + eps)`
//! is present only for [`Algorithm::Dpso`]. The global best is refreshed once,
//! after every particle has moved, so all particles of one iteration see the
//! same `g`. All randomness comes from [`RunStream`] addresses, which makes a
//! run a pure function of its configuration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{KernelError, KernelFamily, KernelSpec, DEFAULT_BETA};
use crate::rng::{uniform_box, RngError, RunStream, Slot};

pub const DEFAULT_SWARM_SIZE: usize = 40;
pub const DEFAULT_ITERATIONS: usize = 1000;
/// Clerc's constriction-equivalent inertia weight.
pub const DEFAULT_OMEGA: f64 = 0.7298;
/// Clerc's constriction-equivalent acceleration coefficient.
pub const DEFAULT_ACCELERATION: f64 = 1.49618;
pub const DEFAULT_C3: f64 = 1.0;
pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_VMAX_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid swarm configuration: {0}")]
    InvalidConfig(String),
    #[error("objective returned non-finite value {value} for particle {particle} at iteration {iteration}")]
    ObjectiveReturnedNonFinite {
        iteration: usize,
        particle: usize,
        value: f64,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Rng(#[from] RngError),
}

/// Update rule. `Pso` is the plain inertia-weight update; `Dpso` adds the
/// kernel-gated repulsion term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Pso,
    Dpso,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Dpso => "dpso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pso" => Ok(Algorithm::Pso),
            "dpso" => Ok(Algorithm::Dpso),
            other => Err(format!("unknown algorithm `{other}` (expected pso or dpso)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum InertiaSchedule {
    /// Use [`SwarmConfig::omega`] at every iteration.
    #[default]
    Constant,
    /// `omega_t = omega_max - (omega_max - omega_min) * t / T`.
    LinearDecay { omega_max: f64, omega_min: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub algorithm: Algorithm,
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub omega: f64,
    pub inertia: InertiaSchedule,
    pub c1: f64,
    pub c2: f64,
    /// Modulation strength; ignored by [`Algorithm::Pso`].
    pub c3: f64,
    pub kernel: KernelSpec,
    /// Guard in the denominator of the repulsion direction.
    pub epsilon: f64,
    /// Velocity bound per dimension as a fraction of `ub - lb`.
    pub vmax_fraction: f64,
    /// Draw r1 and r2 once per coordinate (the default). When false, each
    /// particle gets one r1 and one r2 shared by all coordinates, which
    /// confines its attraction to the plane spanned by `p - x` and `g - x`.
    pub per_dimension_draws: bool,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub stream: RunStream,
}

impl SwarmConfig {
    /// Default protocol settings on the box `[lb, ub]`: N = 40, T = 1000,
    /// Clerc coefficients, vmax = 0.2 (ub - lb), Gaussian kernel with
    /// bandwidth 0.1 |ub - lb|, and c3 = 1 for DPSO or 0 for PSO.
    pub fn new(algorithm: Algorithm, lb: Vec<f64>, ub: Vec<f64>) -> Result<Self, EngineError> {
        let kernel =
            KernelSpec::scaled_to_box(KernelFamily::GaussianDirect, DEFAULT_BETA, 1.0, &lb, &ub)?;
        let config = Self {
            algorithm,
            swarm_size: DEFAULT_SWARM_SIZE,
            max_iterations: DEFAULT_ITERATIONS,
            omega: DEFAULT_OMEGA,
            inertia: InertiaSchedule::Constant,
            c1: DEFAULT_ACCELERATION,
            c2: DEFAULT_ACCELERATION,
            c3: match algorithm {
                Algorithm::Pso => 0.0,
                Algorithm::Dpso => DEFAULT_C3,
            },
            kernel,
            epsilon: DEFAULT_EPSILON,
            vmax_fraction: DEFAULT_VMAX_FRACTION,
            per_dimension_draws: true,
            lb,
            ub,
            stream: RunStream::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn dimension(&self) -> usize {
        self.lb.len()
    }

    pub fn vmax(&self) -> Vec<f64> {
        self.lb
            .iter()
            .zip(&self.ub)
            .map(|(l, u)| self.vmax_fraction * (u - l))
            .collect()
    }

    pub fn inertia_at(&self, iteration: usize) -> f64 {
        match self.inertia {
            InertiaSchedule::Constant => self.omega,
            InertiaSchedule::LinearDecay {
                omega_max,
                omega_min,
            } => {
                let frac = if self.max_iterations == 0 {
                    0.0
                } else {
                    iteration as f64 / self.max_iterations as f64
                };
                omega_max - (omega_max - omega_min) * frac
            }
        }
    }

    /// Checks the configuration invariants. A degenerate box (`lb == ub` in
    /// some coordinate) is accepted; the swarm simply cannot move there.
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::InvalidConfig(msg));
        if self.swarm_size == 0 {
            return bad("swarm_size must be at least 1".into());
        }
        if self.lb.is_empty() {
            return bad("dimension must be at least 1".into());
        }
        if self.lb.len() != self.ub.len() {
            return bad(format!(
                "lb has {} entries but ub has {}",
                self.lb.len(),
                self.ub.len()
            ));
        }
        if self.max_iterations > u32::MAX as usize || self.swarm_size > u32::MAX as usize {
            return bad("swarm_size and max_iterations must fit in 32 bits".into());
        }
        for (k, (l, u)) in self.lb.iter().zip(&self.ub).enumerate() {
            if !(l.is_finite() && u.is_finite()) || l > u {
                return bad(format!("bounds [{l}, {u}] in dimension {k} are not a valid interval"));
            }
        }
        for (name, value) in [
            ("omega", self.omega),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
        ] {
            if !value.is_finite() {
                return bad(format!("{name} must be finite, got {value}"));
            }
        }
        if let InertiaSchedule::LinearDecay {
            omega_max,
            omega_min,
        } = self.inertia
        {
            if !(omega_max.is_finite() && omega_min.is_finite()) {
                return bad("inertia schedule endpoints must be finite".into());
            }
        }
        if self.c3 < 0.0 {
            return bad(format!("c3 must be non-negative, got {}", self.c3));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.vmax_fraction > 0.0 && self.vmax_fraction <= 1.0) {
            return bad(format!(
                "vmax_fraction must lie in (0, 1], got {}",
                self.vmax_fraction
            ));
        }
        self.kernel.validate()?;
        Ok(())
    }
}

/// Positions, velocities and bests of the whole swarm. Matrices are stored
/// row-major, one row of `dimension` values per particle.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    dimension: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    pbest_positions: Vec<f64>,
    pbest_fitness: Vec<f64>,
    gbest_position: Vec<f64>,
    gbest_fitness: f64,
    iteration: usize,
    eval_count: usize,
}

impl SwarmState {
    pub fn swarm_size(&self) -> usize {
        self.pbest_fitness.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn row(&self, i: usize) -> std::ops::Range<usize> {
        i * self.dimension..(i + 1) * self.dimension
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[self.row(i)]
    }

    pub fn velocity(&self, i: usize) -> &[f64] {
        &self.velocities[self.row(i)]
    }

    pub fn pbest_position(&self, i: usize) -> &[f64] {
        &self.pbest_positions[self.row(i)]
    }

    pub fn pbest_fitness(&self) -> &[f64] {
        &self.pbest_fitness
    }

    pub fn gbest_position(&self) -> &[f64] {
        &self.gbest_position
    }

    pub fn gbest_fitness(&self) -> f64 {
        self.gbest_fitness
    }

    /// Completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    /// Builds a state from explicit particle data, evaluating nothing. The
    /// global best is taken from the personal bests (lowest index on ties).
    /// Useful for placing a swarm in a known configuration.
    pub fn from_parts(
        positions: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        pbest_positions: Vec<Vec<f64>>,
        pbest_fitness: Vec<f64>,
    ) -> Result<Self, EngineError> {
        let n = pbest_fitness.len();
        let dimension = positions.first().map_or(0, Vec::len);
        let consistent = n > 0
            && positions.len() == n
            && velocities.len() == n
            && pbest_positions.len() == n
            && positions
                .iter()
                .chain(&velocities)
                .chain(&pbest_positions)
                .all(|r| r.len() == dimension);
        if !consistent || dimension == 0 {
            return Err(EngineError::InvalidConfig(
                "particle matrices must be non-empty and share one shape".into(),
            ));
        }
        let best = argmin(&pbest_fitness);
        let gbest_position = pbest_positions[best].clone();
        Ok(Self {
            dimension,
            positions: positions.concat(),
            velocities: velocities.concat(),
            pbest_positions: pbest_positions.concat(),
            gbest_fitness: pbest_fitness[best],
            pbest_fitness,
            gbest_position,
            iteration: 0,
            eval_count: 0,
        })
    }
}

/// Index of the smallest value, lowest index winning ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn checked_eval<F>(objective: &F, x: &[f64], iteration: usize, particle: usize) -> Result<f64, EngineError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let value = objective(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EngineError::ObjectiveReturnedNonFinite {
            iteration,
            particle,
            value,
        })
    }
}

/// Uniform initial positions, zero velocities, personal bests at the initial
/// positions and the global best at the best of them.
pub fn initialize<F>(config: &SwarmConfig, objective: &F) -> Result<SwarmState, EngineError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    config.validate()?;
    let n = config.swarm_size;
    let d = config.dimension();
    let mut positions = Vec::with_capacity(n * d);
    let mut fitness = Vec::with_capacity(n);
    for i in 0..n {
        let x = uniform_box(&config.stream, i as u32, &config.lb, &config.ub)?;
        fitness.push(checked_eval(objective, &x, 0, i)?);
        positions.extend_from_slice(&x);
    }
    let best = argmin(&fitness);
    let gbest_position = positions[best * d..(best + 1) * d].to_vec();
    Ok(SwarmState {
        dimension: d,
        velocities: vec![0.0; n * d],
        pbest_positions: positions.clone(),
        positions,
        gbest_fitness: fitness[best],
        pbest_fitness: fitness,
        gbest_position,
        iteration: 0,
        eval_count: n,
    })
}

/// `(x - g) / (|x - g| + epsilon)`: unit-like vector pointing from `g` to `x`.
pub fn repulsion_direction(x: &[f64], g: &[f64], epsilon: f64) -> Vec<f64> {
    let denom = distance(x, g) + epsilon;
    x.iter().zip(g).map(|(a, b)| (a - b) / denom).collect()
}

fn distance(x: &[f64], g: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn sq_distance(p: &[f64], g: &[f64]) -> f64 {
    p.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `c3 r3 kappa(p, g) d(x, g)`. Its norm never exceeds `c3`.
pub fn modulation_velocity(
    p: &[f64],
    g: &[f64],
    x: &[f64],
    c3: f64,
    r3: f64,
    kernel: &KernelSpec,
    epsilon: f64,
) -> Result<Vec<f64>, KernelError> {
    let kappa = crate::kernels::kernel_value(kernel, p, g)?;
    let coef = c3 * r3 * kappa;
    Ok(repulsion_direction(x, g, epsilon)
        .into_iter()
        .map(|d| coef * d)
        .collect())
}

/// Random coefficients of one particle's update. `r1` and `r2` hold either a
/// single value or one value per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateDraws {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: f64,
}

impl UpdateDraws {
    pub fn scalar(r1: f64, r2: f64, r3: f64) -> Self {
        Self {
            r1: vec![r1],
            r2: vec![r2],
            r3,
        }
    }

    fn fill(&mut self, config: &SwarmConfig, iteration: u32, particle: u32) {
        let stream = &config.stream;
        if config.per_dimension_draws {
            let d = config.dimension();
            self.r1.clear();
            self.r2.clear();
            self.r1
                .extend((0..d as u32).map(|k| stream.uniform01(iteration, particle, Slot::R1Dim(k))));
            self.r2
                .extend((0..d as u32).map(|k| stream.uniform01(iteration, particle, Slot::R2Dim(k))));
        } else {
            self.r1.clear();
            self.r2.clear();
            self.r1.push(stream.uniform01(iteration, particle, Slot::R1));
            self.r2.push(stream.uniform01(iteration, particle, Slot::R2));
        }
        self.r3 = match config.algorithm {
            Algorithm::Pso => 0.0,
            Algorithm::Dpso => stream.uniform01(iteration, particle, Slot::R3),
        };
    }
}

// Broadcast a scalar draw or index a per-coordinate one.
#[inline]
fn coef(draws: &[f64], k: usize) -> f64 {
    if draws.len() == 1 {
        draws[0]
    } else {
        draws[k]
    }
}

/// Writes the clamped new velocity into `v` in place. `x`, `p`, `g` and the
/// old `v` are the iteration-`t` values.
#[allow(clippy::too_many_arguments)]
fn write_velocity(
    config: &SwarmConfig,
    omega: f64,
    vmax: &[f64],
    x: &[f64],
    v: &mut [f64],
    p: &[f64],
    g: &[f64],
    draws: &UpdateDraws,
) {
    let (c1, c2) = (config.c1, config.c2);
    match config.algorithm {
        Algorithm::Pso => {
            for k in 0..v.len() {
                let r1 = coef(&draws.r1, k);
                let r2 = coef(&draws.r2, k);
                let new = omega * v[k] + c1 * r1 * (p[k] - x[k]) + c2 * r2 * (g[k] - x[k]);
                v[k] = new.clamp(-vmax[k], vmax[k]);
            }
        }
        Algorithm::Dpso => {
            let kappa = config.kernel.value_from_sq_distance(sq_distance(p, g));
            let scale = config.c3 * draws.r3 * kappa;
            let denom = distance(x, g) + config.epsilon;
            for k in 0..v.len() {
                let r1 = coef(&draws.r1, k);
                let r2 = coef(&draws.r2, k);
                let v_mod = scale * ((x[k] - g[k]) / denom);
                let new =
                    omega * v[k] + c1 * r1 * (p[k] - x[k]) + c2 * r2 * (g[k] - x[k]) + v_mod;
                v[k] = new.clamp(-vmax[k], vmax[k]);
            }
        }
    }
}

/// New velocity of one particle after clamping to `[-vmax, vmax]`.
pub fn velocity_update(
    config: &SwarmConfig,
    iteration: usize,
    x: &[f64],
    v: &[f64],
    p: &[f64],
    g: &[f64],
    draws: &UpdateDraws,
) -> Vec<f64> {
    let mut out = v.to_vec();
    write_velocity(
        config,
        config.inertia_at(iteration),
        &config.vmax(),
        x,
        &mut out,
        p,
        g,
        draws,
    );
    out
}

/// Advances the swarm by one synchronous iteration.
///
/// On error the state is left partially updated and should be discarded.
pub fn step<F>(state: &mut SwarmState, config: &SwarmConfig, objective: &F) -> Result<(), EngineError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let d = state.dimension;
    if d != config.dimension() || state.swarm_size() != config.swarm_size {
        return Err(EngineError::InvalidConfig(
            "state shape does not match configuration".into(),
        ));
    }
    let t = state.iteration;
    let omega = config.inertia_at(t);
    let vmax = config.vmax();
    let mut draws = UpdateDraws::scalar(0.0, 0.0, 0.0);
    for i in 0..config.swarm_size {
        let row = i * d..(i + 1) * d;
        draws.fill(config, t as u32, i as u32);
        let x = &mut state.positions[row.clone()];
        let v = &mut state.velocities[row.clone()];
        let p = &mut state.pbest_positions[row];
        write_velocity(config, omega, &vmax, x, v, p, &state.gbest_position, &draws);
        for k in 0..d {
            x[k] = (x[k] + v[k]).clamp(config.lb[k], config.ub[k]);
        }
        let f = checked_eval(objective, x, t + 1, i)?;
        if f < state.pbest_fitness[i] {
            state.pbest_fitness[i] = f;
            p.copy_from_slice(x);
        }
    }
    state.eval_count += config.swarm_size;
    let best = argmin(&state.pbest_fitness);
    if state.pbest_fitness[best] < state.gbest_fitness {
        state.gbest_fitness = state.pbest_fitness[best];
        state
            .gbest_position
            .copy_from_slice(&state.pbest_positions[best * d..(best + 1) * d]);
    }
    state.iteration += 1;
    Ok(())
}

/// Result of one complete optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Global best fitness after initialization and after each iteration.
    pub trace: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub wall_seconds: f64,
    pub eval_count: usize,
}

/// Initializes and runs `max_iterations` steps.
pub fn run<F>(config: &SwarmConfig, objective: &F) -> Result<RunOutcome, EngineError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let start = Instant::now();
    let mut state = initialize(config, objective)?;
    let mut trace = Vec::with_capacity(config.max_iterations + 1);
    trace.push(state.gbest_fitness);
    for _ in 0..config.max_iterations {
        step(&mut state, config, objective)?;
        trace.push(state.gbest_fitness);
    }
    let wall_seconds = start.elapsed().as_secs_f64();
    Ok(RunOutcome {
        trace,
        best_fitness: state.gbest_fitness,
        best_position: state.gbest_position,
        wall_seconds,
        eval_count: state.eval_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::sphere;

    fn config(algorithm: Algorithm, d: usize) -> SwarmConfig {
        SwarmConfig::new(algorithm, vec![-5.12; d], vec![5.12; d]).unwrap()
    }

    #[test]
    fn defaults() {
        let c = config(Algorithm::Dpso, 10);
        assert_eq!(c.swarm_size, 40);
        assert_eq!(c.max_iterations, 1000);
        assert_eq!(c.omega, 0.7298);
        assert_eq!((c.c1, c.c2, c.c3), (1.49618, 1.49618, 1.0));
        assert_eq!(c.epsilon, 1e-9);
        assert!(c.vmax().iter().all(|&v| (v - 0.2 * 10.24).abs() < 1e-12));
        assert!((c.kernel.sigma - 0.1 * 10.24 * 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(config(Algorithm::Pso, 10).c3, 0.0);
    }

    #[test]
    fn validation() {
        let mut c = config(Algorithm::Dpso, 3);
        c.c3 = -1.0;
        assert!(c.validate().is_err());
        let mut c = config(Algorithm::Dpso, 3);
        c.lb[1] = 6.0;
        assert!(c.validate().is_err());
        let mut c = config(Algorithm::Dpso, 3);
        c.vmax_fraction = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(Algorithm::Dpso, 3);
        c.swarm_size = 0;
        assert!(c.validate().is_err());
        let mut c = config(Algorithm::Dpso, 3);
        c.omega = f64::NAN;
        assert!(c.validate().is_err());
    }

    #[test]
    fn linear_decay_schedule() {
        let mut c = config(Algorithm::Pso, 2);
        c.max_iterations = 100;
        c.inertia = InertiaSchedule::LinearDecay {
            omega_max: 0.9,
            omega_min: 0.4,
        };
        assert_eq!(c.inertia_at(0), 0.9);
        assert!((c.inertia_at(50) - 0.65).abs() < 1e-15);
        assert!((c.inertia_at(100) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn initialization() {
        let c = config(Algorithm::Dpso, 5);
        let s = initialize(&c, &sphere).unwrap();
        assert_eq!(s.eval_count(), 40);
        assert_eq!(s.iteration(), 0);
        for i in 0..40 {
            assert!(s.velocity(i).iter().all(|&v| v == 0.0));
            assert_eq!(s.position(i), s.pbest_position(i));
            assert_eq!(s.pbest_fitness()[i], sphere(s.position(i)));
        }
        let min = s.pbest_fitness().iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(s.gbest_fitness(), min);
        assert_eq!(s, initialize(&c, &sphere).unwrap());
    }

    #[test]
    fn degenerate_box() {
        // The default bandwidth would be zero on a point box, so keep the
        // kernel of a regular box and collapse the bounds afterwards.
        let mut c = config(Algorithm::Dpso, 2);
        c.lb = vec![0.5, -1.0];
        c.ub = c.lb.clone();
        let s = initialize(&c, &sphere).unwrap();
        for i in 0..c.swarm_size {
            assert_eq!(s.position(i), &[0.5, -1.0]);
        }
        assert_eq!(s.gbest_fitness(), sphere(&[0.5, -1.0]));
        let out = run(&SwarmConfig { max_iterations: 5, ..c }, &sphere).unwrap();
        assert_eq!(out.best_position, vec![0.5, -1.0]);
    }

    #[test]
    fn repulsion_direction_examples() {
        let d = repulsion_direction(&[3.0, 4.0], &[0.0, 0.0], 1e-9);
        assert!((d[0] - 0.6).abs() < 1e-9 && (d[1] - 0.8).abs() < 1e-9);
        assert_eq!(repulsion_direction(&[1.0, 2.0], &[1.0, 2.0], 1e-9), vec![0.0, 0.0]);
    }

    #[test]
    fn modulation_examples() {
        let kernel = KernelSpec::gaussian(0.5).unwrap();
        let (p, g, x) = ([0.3, 0.1], [0.0, 0.0], [30.0, 40.0]);
        let zero = modulation_velocity(&p, &g, &x, 0.0, 0.7, &kernel, 1e-9).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        let open = modulation_velocity(&g, &g, &x, 1.0, 1.0, &kernel, 1e-9).unwrap();
        assert!((open[0] - 0.6).abs() < 1e-9 && (open[1] - 0.8).abs() < 1e-9);
        let far = [3.0, 4.0]; // |p - g| = 5 = 10 sigma
        let closed = modulation_velocity(&far, &g, &x, 2.0, 0.99, &kernel, 1e-9).unwrap();
        let norm = closed.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= (-50f64).exp() * 2.0);
    }

    #[test]
    fn fixed_point_velocity() {
        let c = config(Algorithm::Pso, 3);
        let x = [0.1, 0.2, 0.3];
        let v = velocity_update(&c, 0, &x, &[0.0; 3], &x, &x, &UpdateDraws::scalar(0.4, 0.9, 0.5));
        assert_eq!(v, vec![0.0; 3]);
    }

    #[test]
    fn velocity_is_clamped() {
        let c = config(Algorithm::Dpso, 2);
        let vmax = c.vmax()[0];
        let v = velocity_update(
            &c,
            0,
            &[-5.0, 5.0],
            &[100.0, -100.0],
            &[5.0, -5.0],
            &[5.0, -5.0],
            &UpdateDraws::scalar(0.99, 0.99, 0.99),
        );
        assert_eq!(v, vec![vmax, -vmax]);
    }

    #[test]
    fn single_particle_at_optimum_stays_put() {
        let mut c = config(Algorithm::Pso, 3);
        c.swarm_size = 1;
        let mut s = SwarmState::from_parts(
            vec![vec![0.0; 3]],
            vec![vec![0.0; 3]],
            vec![vec![0.0; 3]],
            vec![0.0],
        )
        .unwrap();
        let before = s.clone();
        step(&mut s, &c, &sphere).unwrap();
        assert_eq!(s.position(0), before.position(0));
        assert_eq!(s.velocity(0), before.velocity(0));
        assert_eq!(s.gbest_fitness(), 0.0);
        assert_eq!(s.iteration(), 1);
        assert_eq!(s.eval_count(), 1);
    }

    #[test]
    fn non_finite_objective_aborts() {
        let c = config(Algorithm::Dpso, 2);
        let calls = std::cell::Cell::new(0);
        let obj = |x: &[f64]| {
            calls.set(calls.get() + 1);
            if calls.get() > 45 {
                f64::NAN
            } else {
                sphere(x)
            }
        };
        let mut s = initialize(&c, &obj).unwrap();
        let err = step(&mut s, &c, &obj).unwrap_err();
        assert!(matches!(
            err,
            EngineError::ObjectiveReturnedNonFinite { iteration: 1, particle: 5, .. }
        ));
        assert!(initialize(&c, &|_: &[f64]| f64::INFINITY).is_err());
    }

    #[test]
    fn zero_iterations() {
        let mut c = config(Algorithm::Dpso, 4);
        c.max_iterations = 0;
        let out = run(&c, &sphere).unwrap();
        let init = initialize(&c, &sphere).unwrap();
        assert_eq!(out.trace, vec![init.gbest_fitness()]);
        assert_eq!(out.best_position, init.gbest_position());
        assert_eq!(out.eval_count, 40);
    }

    #[test]
    fn run_counts_and_monotone_trace() {
        let mut c = config(Algorithm::Dpso, 6);
        c.max_iterations = 50;
        let out = run(&c, &sphere).unwrap();
        assert_eq!(out.trace.len(), 51);
        assert_eq!(out.eval_count, 40 * 51);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*out.trace.last().unwrap(), out.best_fitness);
        assert_eq!(sphere(&out.best_position), out.best_fitness);
    }

    #[test]
    fn per_dimension_draws_change_the_trajectory() {
        let mut c = config(Algorithm::Pso, 4);
        c.max_iterations = 20;
        c.per_dimension_draws = false;
        let scalar = run(&c, &sphere).unwrap();
        c.per_dimension_draws = true;
        let per_dim = run(&c, &sphere).unwrap();
        assert_eq!(scalar.trace[0], per_dim.trace[0]);
        assert_ne!(scalar.trace, per_dim.trace);
    }
}
