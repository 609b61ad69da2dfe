//! Hybrid continuous/binary particle swarm.
//!
//! Each particle carries `(x, z, placed)` for every candidate unit. Positions
//! and heights follow the classic inertia/cognitive/social velocity update and
//! are clamped to their box; the placed flag shares the same velocity update
//! and is then resampled through a [`BinaryTransfer`] function.
//!
//! Every particle owns a ChaCha stream (`seed`, stream = particle index), so
//! results do not depend on how many threads evaluate the swarm. Draw order
//! per particle and iteration: `r_p, r_g` for each dimension in
//! `(x, z, placed)` order by unit index, then one `r_b` per unit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::Placement;
use crate::objective::{self, FitnessBreakdown};

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub num_particles: usize,
    /// Inertia weight.
    pub inertia: f64,
    /// Personal-best attraction weight.
    pub cognitive: f64,
    /// Global-best attraction weight.
    pub social: f64,
    pub max_iterations: usize,
    /// Minimum decrease of the global best that counts as progress.
    pub improvement_tol: f64,
    /// Defaults to `max_iterations / 10`.
    pub stall_window: Option<usize>,
    pub seed: u64,
    pub velocity_clamp: Option<f64>,
    pub transfer: BinaryTransfer,
}

/// Map from a placed-flag velocity to the probability of placing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryTransfer {
    /// `1 / (1 + e^v)`, decreasing in `v`: attraction toward a best flag of
    /// one lowers the chance of placing.
    AsWritten,
    /// `1 / (1 + e^-v)`, the increasing logistic.
    #[default]
    Logistic,
}

impl BinaryTransfer {
    pub fn probability(self, v: f64) -> f64 {
        match self {
            BinaryTransfer::AsWritten => 1.0 / (1.0 + v.exp()),
            BinaryTransfer::Logistic => 1.0 / (1.0 + (-v).exp()),
        }
    }
}

impl SwarmConfig {
    pub fn stall_window(&self) -> usize {
        self.stall_window.unwrap_or(self.max_iterations / 10).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_particles == 0 {
            return Err(Error::Config("swarm needs at least one particle".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.improvement_tol >= 0.0) {
            return Err(Error::Config("improvement_tol must be non-negative".into()));
        }
        if self.stall_window == Some(0) {
            return Err(Error::Config("stall_window must be at least 1".into()));
        }
        if let Some(c) = self.velocity_clamp {
            if !(c > 0.0) {
                return Err(Error::Config("velocity_clamp must be positive".into()));
            }
        }
        for (name, w) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !w.is_finite() {
                return Err(Error::Config(format!("{name} weight must be finite")));
            }
        }
        Ok(())
    }
}

pub fn update_velocity(
    v: f64,
    x: f64,
    p_best: f64,
    g_best: f64,
    swarm: &SwarmConfig,
    r_p: f64,
    r_g: f64,
) -> f64 {
    let v_new =
        swarm.inertia * v + swarm.cognitive * r_p * (p_best - x) + swarm.social * r_g * (g_best - x);
    match swarm.velocity_clamp {
        Some(c) => v_new.clamp(-c, c),
        None => v_new,
    }
}

/// Resamples a placed flag: `true` when `r_b < 1 / (1 + e^v)`.
pub fn update_binary(v_new: f64, r_b: f64) -> bool {
    update_binary_with(BinaryTransfer::AsWritten, v_new, r_b)
}

pub fn update_binary_with(transfer: BinaryTransfer, v_new: f64, r_b: f64) -> bool {
    r_b < transfer.probability(v_new)
}

/// Velocity of one unit's three decision variables.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UnitVelocity {
    pub x: f64,
    pub z: f64,
    pub placed: f64,
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Vec<Placement>,
    pub velocity: Vec<UnitVelocity>,
    pub best_position: Vec<Placement>,
    pub best: FitnessBreakdown,
    pub current: FitnessBreakdown,
    rng: ChaCha8Rng,
}

impl Particle {
    fn spawn(config: &ScenarioConfig, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.swarm.seed);
        rng.set_stream(index as u64);
        let road = &config.road;
        let position: Vec<Placement> = (0..config.num_elids)
            .map(|_| {
                let x = rng.gen_range(0.0..=road.length);
                let z = rng.gen_range(road.z_min..=road.z_max);
                let placed = rng.gen_bool(0.5);
                Placement::new(x, z, placed)
            })
            .collect();
        let placeholder = FitnessBreakdown {
            coverage: 0.0,
            lamp_count_penalty: 0.0,
            constraint_penalty: 0.0,
            fitness: f64::INFINITY,
            feasible: false,
        };
        Particle {
            velocity: vec![UnitVelocity::default(); position.len()],
            best_position: position.clone(),
            position,
            best: placeholder,
            current: placeholder,
            rng,
        }
    }

    fn evaluate(&mut self, config: &ScenarioConfig) -> Result<()> {
        self.current = objective::fitness(&self.position, config)?;
        if self.current.fitness < self.best.fitness {
            self.best = self.current;
            self.best_position.clone_from(&self.position);
        }
        Ok(())
    }

    fn advance(&mut self, config: &ScenarioConfig, global: &[Placement]) {
        let swarm = &config.swarm;
        let road = &config.road;
        let n = self.position.len();

        let mut draws = Vec::with_capacity(6 * n);
        for _ in 0..6 * n {
            draws.push(self.rng.gen::<f64>());
        }
        let flags: Vec<f64> = (0..n).map(|_| self.rng.gen::<f64>()).collect();

        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        for m in 0..n {
            let r = &draws[6 * m..6 * m + 6];
            let pos = self.position[m];
            let pb = self.best_position[m];
            let gb = global[m];
            let vel = &mut self.velocity[m];

            vel.x = update_velocity(vel.x, pos.x, pb.x, gb.x, swarm, r[0], r[1]);
            vel.z = update_velocity(vel.z, pos.z, pb.z, gb.z, swarm, r[2], r[3]);
            vel.placed = update_velocity(
                vel.placed,
                flag(pos.placed),
                flag(pb.placed),
                flag(gb.placed),
                swarm,
                r[4],
                r[5],
            );

            let (x, vx) = clamp_axis(pos.x + vel.x, vel.x, 0.0, road.length);
            let (z, vz) = clamp_axis(pos.z + vel.z, vel.z, road.z_min, road.z_max);
            vel.x = vx;
            vel.z = vz;
            self.position[m] = Placement::new(x, z, update_binary_with(swarm.transfer, vel.placed, flags[m]));
        }
    }
}

/// Clamps to `[lo, hi]`, zeroing the velocity when a bound is hit.
fn clamp_axis(value: f64, velocity: f64, lo: f64, hi: f64) -> (f64, f64) {
    if value < lo {
        (lo, 0.0)
    } else if value > hi {
        (hi, 0.0)
    } else {
        (value, velocity)
    }
}

/// One point of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub fitness: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_placements: Vec<Placement>,
    pub best_fitness: f64,
    pub best_coverage: f64,
    pub feasible: bool,
    pub breakdown: FitnessBreakdown,
    pub iterations_run: usize,
    /// Global best after initialization (entry 0) and after each iteration.
    pub convergence_trace: Vec<TracePoint>,
}

impl SolveResult {
    pub fn lamps_placed(&self) -> usize {
        self.best_placements.iter().filter(|p| p.placed).count()
    }

    /// Coverage with infeasible plans reported as zero.
    pub fn reported_coverage(&self) -> f64 {
        self.breakdown.reported_coverage()
    }
}

/// Swarm state, stepped one synchronous iteration at a time.
pub struct Swarm<'a> {
    config: &'a ScenarioConfig,
    particles: Vec<Particle>,
    global_position: Vec<Placement>,
    global: FitnessBreakdown,
    trace: Vec<TracePoint>,
    iteration: usize,
    stalled: usize,
}

impl<'a> Swarm<'a> {
    pub fn new(config: &'a ScenarioConfig) -> Result<Self> {
        Self::with_initial(config, Vec::new())
    }

    /// Starts particle `i` at `initial[i]` instead of a random draw. The
    /// particle's stream is advanced exactly as if it had been drawn.
    pub fn with_initial(config: &'a ScenarioConfig, initial: Vec<Vec<Placement>>) -> Result<Self> {
        config.validate()?;
        if initial.len() > config.swarm.num_particles {
            return Err(Error::Config(format!(
                "{} initial positions for {} particles",
                initial.len(),
                config.swarm.num_particles
            )));
        }
        let mut particles: Vec<Particle> = (0..config.swarm.num_particles)
            .map(|i| Particle::spawn(config, i))
            .collect();
        for (particle, start) in particles.iter_mut().zip(initial) {
            if start.len() != config.num_elids {
                return Err(Error::Config(format!(
                    "initial position has {} units, expected {}",
                    start.len(),
                    config.num_elids
                )));
            }
            for (i, p) in start.iter().enumerate() {
                p.check_bounds(i, &config.road)?;
            }
            particle.best_position.clone_from(&start);
            particle.position = start;
        }
        particles
            .par_iter_mut()
            .try_for_each(|p| p.evaluate(config))?;

        let mut swarm = Swarm {
            config,
            global_position: Vec::new(),
            global: particles[0].best,
            particles,
            trace: Vec::new(),
            iteration: 0,
            stalled: 0,
        };
        swarm.refresh_global();
        swarm.record();
        Ok(swarm)
    }

    fn leader(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.particles.iter().enumerate() {
            if p.best.fitness < self.particles[best].best.fitness {
                best = i;
            }
        }
        best
    }

    /// Returns whether the global best improved.
    fn refresh_global(&mut self) -> bool {
        let leader = self.leader();
        let candidate = &self.particles[leader];
        if candidate.best.fitness < self.global.fitness || self.global_position.is_empty() {
            self.global = candidate.best;
            self.global_position.clone_from(&candidate.best_position);
            true
        } else {
            false
        }
    }

    fn record(&mut self) {
        self.trace.push(TracePoint {
            fitness: self.global.fitness,
            coverage: self.global.coverage,
        });
    }

    /// Runs one iteration. Returns `false` once the swarm should stop.
    pub fn step(&mut self) -> Result<bool> {
        if self.finished() {
            return Ok(false);
        }
        let config = self.config;
        let global = &self.global_position;
        self.particles.par_iter_mut().try_for_each(|p| {
            p.advance(config, global);
            p.evaluate(config)
        })?;

        let previous = self.global.fitness;
        self.refresh_global();
        if previous - self.global.fitness > config.swarm.improvement_tol {
            self.stalled = 0;
        } else {
            self.stalled += 1;
        }
        self.iteration += 1;
        self.record();
        Ok(!self.finished())
    }

    pub fn finished(&self) -> bool {
        self.iteration >= self.config.swarm.max_iterations
            || self.stalled >= self.config.swarm.stall_window()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn global_best(&self) -> (&[Placement], &FitnessBreakdown) {
        (&self.global_position, &self.global)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn run(mut self) -> Result<SolveResult> {
        while self.step()? {}
        Ok(self.into_result())
    }

    pub fn into_result(self) -> SolveResult {
        SolveResult {
            best_fitness: self.global.fitness,
            best_coverage: self.global.coverage,
            feasible: self.global.feasible,
            breakdown: self.global,
            best_placements: self.global_position,
            iterations_run: self.iteration,
            convergence_trace: self.trace,
        }
    }
}

/// Runs the swarm on the global thread pool.
pub fn solve(config: &ScenarioConfig) -> Result<SolveResult> {
    Swarm::new(config)?.run()
}

/// Runs the swarm on a dedicated pool of `threads` workers.
pub fn solve_with_threads(config: &ScenarioConfig, threads: usize) -> Result<SolveResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| solve(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swarm_cfg(alpha: f64, bp: f64, bg: f64) -> SwarmConfig {
        SwarmConfig {
            num_particles: 1,
            inertia: alpha,
            cognitive: bp,
            social: bg,
            max_iterations: 10,
            improvement_tol: 1e-4,
            stall_window: None,
            seed: 0,
            velocity_clamp: None,
            transfer: BinaryTransfer::Logistic,
        }
    }

    fn small_config() -> ScenarioConfig {
        let mut c = ScenarioConfig::table1();
        c.num_elids = 4;
        c.swarm.num_particles = 12;
        c.swarm.max_iterations = 40;
        c
    }

    #[test]
    fn velocity_examples() {
        let s = swarm_cfg(1.0, 2.0, 2.0);
        assert_eq!(update_velocity(0.0, 3.0, 3.0, 3.0, &s, 0.7, 0.2), 0.0);
        assert_eq!(update_velocity(0.0, 0.0, 1.0, 2.0, &s, 0.5, 0.5), 3.0);
        let decay = swarm_cfg(0.5, 2.0, 2.0);
        assert_eq!(update_velocity(4.0, 1.0, 1.0, 1.0, &decay, 0.9, 0.9), 2.0);
    }

    #[test]
    fn velocity_clamp_applies() {
        let mut s = swarm_cfg(1.0, 2.0, 2.0);
        s.velocity_clamp = Some(1.5);
        assert_eq!(update_velocity(0.0, 0.0, 1.0, 2.0, &s, 0.5, 0.5), 1.5);
        assert_eq!(update_velocity(-10.0, 0.0, 0.0, 0.0, &s, 0.5, 0.5), -1.5);
    }

    #[test]
    fn transfer_functions_mirror() {
        for v in [-30.0, -2.0, 0.0, 0.7, 5.0] {
            let a = BinaryTransfer::AsWritten.probability(v);
            let l = BinaryTransfer::Logistic.probability(v);
            assert!((a + l - 1.0).abs() < 1e-15);
        }
        assert!(update_binary_with(BinaryTransfer::Logistic, 20.0, 0.999));
        assert!(!update_binary_with(BinaryTransfer::Logistic, -20.0, 1e-8));
    }

    #[test]
    fn binary_examples() {
        assert!(update_binary(0.0, 0.49));
        assert!(!update_binary(0.0, 0.51));
        assert!(!update_binary(20.0, 1e-8));
        assert!(update_binary(-20.0, 0.999_999));
        assert!(!update_binary(f64::INFINITY, 0.0));
    }

    #[test]
    fn velocity_decays_without_attraction() {
        let s = swarm_cfg(0.8, 0.0, 0.0);
        let (v0, tol) = (37.0f64, 1e-9);
        let bound = ((tol / v0).ln() / s.inertia.ln()).ceil() as usize;
        let mut v = v0;
        let mut steps = 0;
        while v.abs() >= tol {
            v = update_velocity(v, 0.3, 9.0, -4.0, &s, 0.6, 0.1);
            steps += 1;
        }
        assert!(steps <= bound, "{steps} > {bound}");
    }

    #[test]
    fn swarm_velocities_decay_without_attraction() {
        let mut c = small_config();
        c.swarm.inertia = 0.5;
        c.swarm.cognitive = 0.0;
        c.swarm.social = 0.0;
        c.swarm.max_iterations = 200;
        c.swarm.stall_window = Some(200);
        let mut swarm = Swarm::new(&c).unwrap();
        while swarm.step().unwrap() {}
        for p in swarm.particles() {
            for v in &p.velocity {
                assert_eq!((v.x, v.z, v.placed), (0.0, 0.0, 0.0));
            }
        }
    }

    #[test]
    fn positions_stay_in_box() {
        let c = small_config();
        let mut swarm = Swarm::new(&c).unwrap();
        loop {
            for p in swarm.particles() {
                for (i, u) in p.position.iter().enumerate() {
                    u.check_bounds(i, &c.road).unwrap();
                }
            }
            if !swarm.step().unwrap() {
                break;
            }
        }
    }

    #[test]
    fn trace_non_increasing() {
        let r = solve(&small_config()).unwrap();
        assert_eq!(r.convergence_trace.len(), r.iterations_run + 1);
        assert!(r.convergence_trace.windows(2).all(|w| w[1].fitness <= w[0].fitness));
        assert_eq!(r.convergence_trace.last().unwrap().fitness, r.best_fitness);
    }

    #[test]
    fn seeded_runs_are_identical_across_thread_counts() {
        let c = small_config();
        let a = solve_with_threads(&c, 1).unwrap();
        let b = solve_with_threads(&c, 4).unwrap();
        assert_eq!(a, b);
        let mut other = c.clone();
        other.swarm.seed += 1;
        assert_ne!(solve(&other).unwrap().convergence_trace, a.convergence_trace);
    }

    #[test]
    fn stall_with_unreachable_tolerance() {
        let mut c = small_config();
        c.num_elids = 2;
        c.lambda = 10.0;
        c.swarm.num_particles = 1;
        c.swarm.improvement_tol = f64::INFINITY;
        c.swarm.max_iterations = 100;
        let start = vec![Placement::new(300.0, 20.0, false), Placement::new(700.0, 30.0, false)];
        let r = Swarm::with_initial(&c, vec![start.clone()]).unwrap().run().unwrap();
        assert_eq!(r.iterations_run, c.swarm.stall_window());
        assert_eq!(r.iterations_run, 10);
        assert_eq!(r.best_placements, start);
        assert_eq!(r.best_fitness, 0.0);
        assert!(r.feasible);
    }

    #[test]
    fn invalid_swarm_rejected() {
        let mut c = small_config();
        c.swarm.num_particles = 0;
        assert!(solve(&c).is_err());
        let mut c = small_config();
        c.swarm.max_iterations = 0;
        assert!(solve(&c).is_err());
        let mut c = small_config();
        c.swarm.improvement_tol = -1.0;
        assert!(solve(&c).is_err());
    }

    #[test]
    fn stall_window_default() {
        let s = SwarmConfig {
            max_iterations: 500,
            ..swarm_cfg(1.0, 2.0, 2.0)
        };
        assert_eq!(s.stall_window(), 50);
        let s = SwarmConfig {
            max_iterations: 5,
            ..swarm_cfg(1.0, 2.0, 2.0)
        };
        assert_eq!(s.stall_window(), 1);
    }
}
