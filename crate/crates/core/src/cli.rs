//! Command implementations behind the `elid-planner` binary.
//!
//! Each command returns an outcome carrying its process exit code:
//! [`EXIT_FEASIBLE`] when the reported plan meets every constraint,
//! [`EXIT_INFEASIBLE`] when it does not, and [`EXIT_ERROR`] for I/O, parse
//! and validation failures (mapped by the binary from `Err`).
//!
//! CSV files are UTF-8 with a header row. Floats use the shortest
//! representation that parses back to the same bits, so `placements.csv`
//! can be fed to `evaluate` unchanged.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{Placement, WidthRule};
use crate::objective::{self, Evaluation};
use crate::oracle::{self, RasterConfig};
use crate::solver::{self, SolveResult};
use crate::BYTES_PER_GB;

pub const EXIT_FEASIBLE: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

/// Tolerance of the analytic-versus-raster agreement check.
pub const ORACLE_TOLERANCE: f64 = 1e-3;

fn feasibility_code(feasible: bool) -> u8 {
    if feasible {
        EXIT_FEASIBLE
    } else {
        EXIT_INFEASIBLE
    }
}

/// Row of `placements.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct PlacementRow {
    pub index: usize,
    pub placed: u8,
    pub x: f64,
    pub z: f64,
    pub omega: f64,
    pub l_near: f64,
    pub l_far: f64,
    pub l_width: f64,
    pub a_total: f64,
    pub a_rect: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub data_bytes: f64,
    pub energy_w: f64,
}

impl PlacementRow {
    pub fn rows(eval: &Evaluation) -> Vec<PlacementRow> {
        eval.placements
            .iter()
            .zip(&eval.footprints)
            .zip(&eval.profiles)
            .enumerate()
            .map(|(index, ((p, fp), prof))| PlacementRow {
                index,
                placed: p.placed as u8,
                x: p.x,
                z: p.z,
                omega: fp.omega,
                l_near: fp.l_near,
                l_far: fp.l_far,
                l_width: fp.l_width,
                a_total: fp.a_total,
                a_rect: fp.a_rect,
                x_start: fp.x_start,
                x_end: fp.x_end,
                data_bytes: prof.data,
                energy_w: prof.energy,
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
struct PlacementInput {
    x: f64,
    z: f64,
    #[serde(alias = "epsilon", deserialize_with = "flag")]
    placed: bool,
}

fn flag<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
    let s = String::deserialize(d)?;
    match s.trim() {
        "1" | "true" | "TRUE" | "True" => Ok(true),
        "0" | "false" | "FALSE" | "False" => Ok(false),
        other => Err(serde::de::Error::custom(format!(
            "placed flag must be 0/1 or true/false, got {other:?}"
        ))),
    }
}

/// Reads `x, z, placed` rows. Other columns are ignored.
pub fn read_placements(path: impl AsRef<Path>) -> Result<Vec<Placement>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for (line, row) in reader.deserialize::<PlacementInput>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: format!("row {}: {e}", line + 1),
        })?;
        out.push(Placement::new(row.x, row.z, row.placed));
    }
    Ok(out)
}

pub fn write_placements(path: impl AsRef<Path>, eval: &Evaluation) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for row in PlacementRow::rows(eval) {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}

#[derive(Debug, Serialize)]
struct TraceRow {
    iteration: usize,
    best_fitness: f64,
    best_coverage: f64,
}

pub fn write_trace(path: impl AsRef<Path>, result: &SolveResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for (iteration, t) in result.convergence_trace.iter().enumerate() {
        w.serialize(TraceRow {
            iteration,
            best_fitness: t.fitness,
            best_coverage: t.coverage,
        })?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub scenario: PathBuf,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub width_rule: Option<WidthRule>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub config: ScenarioConfig,
    pub result: SolveResult,
    pub evaluation: Evaluation,
    pub summary: String,
}

impl SolveOutcome {
    pub fn exit_code(&self) -> u8 {
        feasibility_code(self.result.feasible)
    }
}

fn load_with(path: &Path, width_rule: Option<WidthRule>) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::load(path)?;
    if let Some(rule) = width_rule {
        config.width_rule = rule;
    }
    Ok(config)
}

pub fn solve_summary(config: &ScenarioConfig, result: &SolveResult) -> String {
    let b = &result.breakdown;
    let mut s = String::new();
    let _ = writeln!(s, "seed:               {}", config.swarm.seed);
    let _ = writeln!(s, "feasible:           {}", if result.feasible { "yes" } else { "no" });
    let _ = writeln!(s, "effective coverage: {:.6}", b.reported_coverage());
    let _ = writeln!(s, "model coverage:     {:.6}", b.coverage);
    let _ = writeln!(s, "fitness:            {:.6}", b.fitness);
    let _ = writeln!(s, "lamp term:          {:.6}", b.lamp_count_penalty);
    let _ = writeln!(s, "constraint penalty: {:.6e}", b.constraint_penalty);
    let _ = writeln!(s, "lamps placed:       {} of {}", result.lamps_placed(), config.num_elids);
    let _ = writeln!(s, "iterations:         {}", result.iterations_run);
    s
}

/// Runs the swarm and writes `placements.csv`, `trace.csv` and `summary.txt`.
pub fn cmd_solve(opts: &SolveOptions) -> Result<SolveOutcome> {
    let mut config = load_with(&opts.scenario, opts.width_rule)?;
    if let Some(seed) = opts.seed {
        config.swarm.seed = seed;
    }
    let result = solver::solve(&config)?;
    let evaluation = objective::evaluate(&result.best_placements, &config)?;

    ensure_dir(&opts.out_dir)?;
    write_placements(opts.out_dir.join("placements.csv"), &evaluation)?;
    write_trace(opts.out_dir.join("trace.csv"), &result)?;
    let summary = solve_summary(&config, &result);
    let path = opts.out_dir.join("summary.txt");
    fs::write(&path, &summary).map_err(|e| Error::io(&path, e))?;

    Ok(SolveOutcome {
        config,
        result,
        evaluation,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct EvaluateOutcome {
    pub evaluation: Evaluation,
    pub report: String,
}

impl EvaluateOutcome {
    pub fn exit_code(&self) -> u8 {
        feasibility_code(self.evaluation.breakdown.feasible)
    }

    pub fn coverage(&self) -> f64 {
        self.evaluation.breakdown.coverage
    }

    pub fn reported_coverage(&self) -> f64 {
        self.evaluation.breakdown.reported_coverage()
    }
}

/// Evaluates a fixed plan. Missing units (fewer rows than candidates) are
/// simply absent.
pub fn evaluate_plan(config: &ScenarioConfig, placements: &[Placement]) -> Result<EvaluateOutcome> {
    if placements.len() > config.num_elids {
        return Err(Error::Config(format!(
            "{} placements for {} candidate units",
            placements.len(),
            config.num_elids
        )));
    }
    let evaluation = objective::evaluate(placements, config)?;
    let b = &evaluation.breakdown;
    let p = &evaluation.penalties;
    let mut s = String::new();
    let _ = writeln!(s, "width rule:         {:?}", config.width_rule);
    let _ = writeln!(s, "feasible:           {}", if b.feasible { "yes" } else { "no" });
    let _ = writeln!(s, "model coverage:     {:.6}", b.coverage);
    let _ = writeln!(s, "reported coverage:  {:.6}", b.reported_coverage());
    let _ = writeln!(s, "fitness:            {:.6}", b.fitness);
    let _ = writeln!(s, "lamp term:          {:.6}", b.lamp_count_penalty);
    let _ = writeln!(s, "constraint penalty: {:.6e}", b.constraint_penalty);
    let total_data: f64 = evaluation
        .placements
        .iter()
        .zip(&evaluation.profiles)
        .filter(|(pl, _)| pl.placed)
        .map(|(_, pr)| pr.data)
        .sum();
    let _ = writeln!(
        s,
        "throughput:         {:.4} GB of {:.4} GB/s, slack {:.6}",
        total_data / BYTES_PER_GB,
        config.limits.bandwidth / BYTES_PER_GB,
        -p.throughput.h
    );
    for (i, e) in p.energy.iter().enumerate() {
        let _ = writeln!(
            s,
            "energy[{i}]:          {:.4} W of {:.4} W, slack {:.6}",
            (e.h + 1.0) * config.limits.energy,
            config.limits.energy,
            -e.h
        );
    }
    Ok(EvaluateOutcome {
        evaluation,
        report: s,
    })
}

pub fn cmd_evaluate(
    scenario: &Path,
    placements: &Path,
    width_rule: Option<WidthRule>,
) -> Result<EvaluateOutcome> {
    let config = load_with(scenario, width_rule)?;
    let plan = read_placements(placements)?;
    evaluate_plan(&config, &plan)
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub scenario: PathBuf,
    pub depths: Vec<u32>,
    pub bandwidths_gbps: Vec<f64>,
    pub seeds: usize,
    pub master_seed: Option<u64>,
    pub out_dir: PathBuf,
    pub parallel: bool,
}

/// Row of `sweep.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub d: u32,
    pub bandwidth_gbps: f64,
    pub seed: u64,
    pub coverage: f64,
    pub fitness: f64,
    pub lamps: usize,
    pub iterations: usize,
    pub cell_median_coverage: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    /// Median coverage of one `(d, bandwidth)` cell.
    pub fn median(&self, d: u32, bandwidth_gbps: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.d == d && r.bandwidth_gbps == bandwidth_gbps)
            .map(|r| r.cell_median_coverage)
    }
}

/// Seed of the `k`-th run in every sweep cell: `master + k` (wrapping).
/// Run 0 therefore matches `solve` with the master seed.
pub fn sweep_seed(master: u64, k: usize) -> u64 {
    master.wrapping_add(k as u64)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Solves every `(d, bandwidth, seed)` combination and records the best
/// feasible coverage (zero for infeasible runs).
pub fn run_sweep(base: &ScenarioConfig, opts: &SweepOptions) -> Result<SweepOutcome> {
    if opts.depths.is_empty() || opts.bandwidths_gbps.is_empty() || opts.seeds == 0 {
        return Err(Error::Config(
            "sweep needs at least one depth, one bandwidth and one seed".into(),
        ));
    }
    let master = opts.master_seed.unwrap_or(base.swarm.seed);
    let mut jobs = Vec::new();
    for &d in &opts.depths {
        for &bw in &opts.bandwidths_gbps {
            for k in 0..opts.seeds {
                let mut c = base.clone();
                c.lidar.octree_depth = d;
                c.limits.bandwidth = bw * BYTES_PER_GB;
                c.swarm.seed = sweep_seed(master, k);
                c.validate()?;
                jobs.push((d, bw, c));
            }
        }
    }
    let run = |(d, bw, c): &(u32, f64, ScenarioConfig)| -> Result<SweepRow> {
        let r = solver::solve(c)?;
        Ok(SweepRow {
            d: *d,
            bandwidth_gbps: *bw,
            seed: c.swarm.seed,
            coverage: r.reported_coverage(),
            fitness: r.best_fitness,
            lamps: r.lamps_placed(),
            iterations: r.iterations_run,
            cell_median_coverage: f64::NAN,
        })
    };
    let mut rows: Vec<SweepRow> = if opts.parallel {
        jobs.par_iter().map(run).collect::<Result<_>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_>>()?
    };
    for chunk in rows.chunks_mut(opts.seeds) {
        let mut cov: Vec<f64> = chunk.iter().map(|r| r.coverage).collect();
        let m = median(&mut cov);
        chunk.iter_mut().for_each(|r| r.cell_median_coverage = m);
    }
    Ok(SweepOutcome { rows })
}

pub fn cmd_sweep(opts: &SweepOptions) -> Result<SweepOutcome> {
    let base = ScenarioConfig::load(&opts.scenario)?;
    let outcome = run_sweep(&base, opts)?;
    ensure_dir(&opts.out_dir)?;
    let path = opts.out_dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for row in &outcome.rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(outcome)
}

/// Random plan with between one and `max_units` candidates.
pub fn random_plan(config: &ScenarioConfig, max_units: usize, rng: &mut impl Rng) -> Vec<Placement> {
    let n = rng.gen_range(1..=max_units.max(1));
    let road = &config.road;
    (0..n)
        .map(|_| {
            Placement::new(
                rng.gen_range(0.0..=road.length),
                rng.gen_range(road.z_min..=road.z_max),
                rng.gen_bool(0.5),
            )
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OracleTrial {
    pub units: usize,
    pub analytic: f64,
    pub raster: f64,
}

impl OracleTrial {
    pub fn error(&self) -> f64 {
        (self.analytic - self.raster).abs()
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub trials: Vec<OracleTrial>,
    pub tolerance: f64,
}

impl OracleOutcome {
    pub fn max_error(&self) -> f64 {
        self.trials.iter().map(OracleTrial::error).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.trials.iter().all(|t| t.error() <= self.tolerance)
    }

    pub fn exit_code(&self) -> u8 {
        feasibility_code(self.passed())
    }
}

/// Compares the analytic coverage with the raster estimate on random plans.
pub fn oracle_check(
    config: &ScenarioConfig,
    resolution: f64,
    trials: usize,
    seed: u64,
) -> Result<OracleOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_units = config.num_elids.min(20);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let plan = random_plan(config, max_units, &mut rng);
        let eval = objective::evaluate(&plan, config)?;
        let raster = oracle::raster_coverage(
            &eval.footprints,
            &plan,
            &config.road,
            config.eta,
            RasterConfig::columns(resolution),
        )?;
        out.push(OracleTrial {
            units: plan.len(),
            analytic: eval.breakdown.coverage,
            raster,
        });
    }
    Ok(OracleOutcome {
        trials: out,
        tolerance: ORACLE_TOLERANCE,
    })
}

pub fn cmd_oracle_check(
    scenario: &Path,
    resolution: f64,
    trials: usize,
    out: &mut impl Write,
) -> Result<OracleOutcome> {
    let config = ScenarioConfig::load(scenario)?;
    let outcome = oracle_check(&config, resolution, trials, config.swarm.seed)?;
    let failures = outcome.trials.iter().filter(|t| t.error() > outcome.tolerance).count();
    writeln!(
        out,
        "{} trials at {} m: max |analytic - raster| = {:.3e}, {} above {:.0e}",
        outcome.trials.len(),
        resolution,
        outcome.max_error(),
        failures,
        outcome.tolerance
    )
    .map_err(|e| Error::io("<stdout>", e))?;
    Ok(outcome)
}
