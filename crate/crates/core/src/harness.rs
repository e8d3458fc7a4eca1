//! Seeded PSO-versus-DPSO experiments and their aggregation.
//!
//! A plan is the cross product functions x dimensions x algorithms x runs.
//! Run `r` of every cell draws from `RunStream(master_seed, r)`, so PSO and
//! DPSO share initial swarms and r1/r2 draws and differ only by the
//! modulation term. Cells are independent and run on a rayon pool; records
//! come back in canonical order (function name, dimension, algorithm, run)
//! whatever the worker count.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{self, BenchError, BenchmarkSpec, Modality};
use crate::kernels::{KernelFamily, KernelSpec, DEFAULT_BETA};
use crate::rng::{RunStream, DEFAULT_SEED};
use crate::stats;
use crate::swarm::{self, Algorithm, EngineError, InertiaSchedule, SwarmConfig};

pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_DIMENSIONS: [usize; 3] = [10, 30, 50];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    #[error("{function} D={dimension} {algorithm}: {source}")]
    Setup {
        function: String,
        dimension: usize,
        algorithm: Algorithm,
        source: EngineError,
    },
    #[error("{} cell(s) failed; first: {}", .0.len(), .0[0])]
    CellsFailed(Vec<CellFailure>),
    #[error("could not build worker pool: {0}")]
    ThreadPool(String),
    #[error("no runs recorded for {function} D={dimension} {algorithm}")]
    EmptyCell {
        function: String,
        dimension: usize,
        algorithm: Algorithm,
    },
    #[error("cells hold different run counts ({0} vs {1})")]
    UnequalRunCounts(usize, usize),
    #[error("{function} D={dimension} lacks a PSO/DPSO pair")]
    MissingPair { function: String, dimension: usize },
}

/// A run that ended with an engine error.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub function: String,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub run_index: u32,
    pub error: EngineError,
}

impl fmt::Display for CellFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} D={} {} run {}: {}",
            self.function, self.dimension, self.algorithm, self.run_index, self.error
        )
    }
}

/// An objective the harness can optimize.
pub trait Problem: Sync {
    fn name(&self) -> &str;
    fn bounds(&self, dimension: usize) -> (Vec<f64>, Vec<f64>);
    fn check_dimension(&self, dimension: usize) -> Result<(), String>;
    fn evaluate(&self, x: &[f64]) -> f64;
}

impl Problem for BenchmarkSpec {
    fn name(&self) -> &str {
        self.name
    }

    fn bounds(&self, dimension: usize) -> (Vec<f64>, Vec<f64>) {
        BenchmarkSpec::bounds(self, dimension)
    }

    fn check_dimension(&self, dimension: usize) -> Result<(), String> {
        BenchmarkSpec::check_dimension(self, dimension).map_err(|e| e.to_string())
    }

    #[inline]
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

/// Swarm settings shared by every cell; bounds, algorithm and seed are
/// filled in per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSettings {
    pub swarm_size: usize,
    pub iterations: usize,
    pub omega: f64,
    pub inertia: InertiaSchedule,
    pub c1: f64,
    pub c2: f64,
    /// Modulation strength of DPSO cells. PSO cells always use 0.
    pub c3: f64,
    pub kernel: KernelFamily,
    /// Kernel bandwidth as a fraction of the box diagonal.
    pub beta: f64,
    /// Divergence decay rate for the `kl` and `hellinger` kernels.
    pub alpha: f64,
    pub epsilon: f64,
    pub vmax_fraction: f64,
    pub per_dimension_draws: bool,
}

impl Default for ProtocolSettings {
    fn default() -> Self {
        Self {
            swarm_size: swarm::DEFAULT_SWARM_SIZE,
            iterations: swarm::DEFAULT_ITERATIONS,
            omega: swarm::DEFAULT_OMEGA,
            inertia: InertiaSchedule::Constant,
            c1: swarm::DEFAULT_ACCELERATION,
            c2: swarm::DEFAULT_ACCELERATION,
            c3: swarm::DEFAULT_C3,
            kernel: KernelFamily::GaussianDirect,
            beta: DEFAULT_BETA,
            alpha: 1.0,
            epsilon: swarm::DEFAULT_EPSILON,
            vmax_fraction: swarm::DEFAULT_VMAX_FRACTION,
            per_dimension_draws: true,
        }
    }
}

impl ProtocolSettings {
    pub fn swarm_config(
        &self,
        algorithm: Algorithm,
        lb: Vec<f64>,
        ub: Vec<f64>,
        stream: RunStream,
    ) -> Result<SwarmConfig, EngineError> {
        let kernel = KernelSpec::scaled_to_box(self.kernel, self.beta, self.alpha, &lb, &ub)?;
        let config = SwarmConfig {
            algorithm,
            swarm_size: self.swarm_size,
            max_iterations: self.iterations,
            omega: self.omega,
            inertia: self.inertia,
            c1: self.c1,
            c2: self.c2,
            c3: match algorithm {
                Algorithm::Pso => 0.0,
                Algorithm::Dpso => self.c3,
            },
            kernel,
            epsilon: self.epsilon,
            vmax_fraction: self.vmax_fraction,
            per_dimension_draws: self.per_dimension_draws,
            lb,
            ub,
            stream,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub functions: Vec<String>,
    pub dimensions: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub master_seed: u64,
    pub settings: ProtocolSettings,
    /// Worker threads; 0 lets rayon pick.
    pub workers: usize,
    /// Measure wall time (with one untimed warm-up run per function and
    /// dimension). When off, every `wall_seconds` is recorded as 0 and the
    /// results file becomes byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            functions: bench::list_functions(None)
                .into_iter()
                .map(String::from)
                .collect(),
            dimensions: DEFAULT_DIMENSIONS.to_vec(),
            algorithms: vec![Algorithm::Pso, Algorithm::Dpso],
            runs: DEFAULT_RUNS,
            master_seed: DEFAULT_SEED,
            settings: ProtocolSettings::default(),
            workers: 0,
            timing: true,
        }
    }
}

impl ExperimentPlan {
    pub fn cell_count(&self) -> usize {
        self.functions.len() * self.dimensions.len() * self.algorithms.len() * self.runs
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidPlan(m.to_owned()));
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.runs > u32::MAX as usize {
            return bad("runs must fit in 32 bits");
        }
        if self.functions.is_empty() || self.dimensions.is_empty() || self.algorithms.is_empty() {
            return bad("functions, dimensions and algorithms must be non-empty");
        }
        if self.dimensions.contains(&0) {
            return bad("dimensions must be positive");
        }
        for f in &self.functions {
            let spec = bench::lookup(f)?;
            for &d in &self.dimensions {
                spec.check_dimension(d)?;
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// lists are comma separated. Unknown keys are rejected.
    pub fn from_config_str(text: &str) -> Result<Self, HarnessError> {
        let mut plan = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::InvalidPlan(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            plan.set(key.trim(), value.trim())
                .map_err(|e| HarnessError::InvalidPlan(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(plan)
    }

    /// Applies one configuration key. Keys use the config-file spelling
    /// (`swarm_size`, `vmax_fraction`, ...).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse()
                .map_err(|_| format!("`{key}`: cannot parse `{v}`"))
        }
        fn list(v: &str) -> impl Iterator<Item = &str> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty())
        }
        let s = &mut self.settings;
        match key {
            "functions" => self.functions = parse_function_list(value)?,
            "dimensions" => {
                self.dimensions = list(value)
                    .map(|d| num(key, d))
                    .collect::<Result<_, _>>()?
            }
            "algorithms" => {
                self.algorithms = list(value)
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "runs" => self.runs = num(key, value)?,
            "seed" => self.master_seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "timing" => self.timing = num(key, value)?,
            "kernel" => s.kernel = value.parse()?,
            "beta" => s.beta = num(key, value)?,
            "alpha" => s.alpha = num(key, value)?,
            "c1" => s.c1 = num(key, value)?,
            "c2" => s.c2 = num(key, value)?,
            "c3" => s.c3 = num(key, value)?,
            "omega" => s.omega = num(key, value)?,
            "epsilon" => s.epsilon = num(key, value)?,
            "vmax_fraction" => s.vmax_fraction = num(key, value)?,
            "iterations" => s.iterations = num(key, value)?,
            "swarm_size" => s.swarm_size = num(key, value)?,
            "per_dimension_draws" => s.per_dimension_draws = num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

/// Expands `all`, `unimodal` and `multimodal`, otherwise takes the names
/// literally. Names are checked later by [`ExperimentPlan::validate`].
pub fn parse_function_list(value: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "all" => out.extend(bench::list_functions(None).into_iter().map(String::from)),
            "unimodal" | "multimodal" => out.extend(
                bench::list_functions(Some(item.parse::<Modality>()?))
                    .into_iter()
                    .map(String::from),
            ),
            name => out.push(name.to_owned()),
        }
    }
    if out.is_empty() {
        return Err("function list is empty".into());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Outcome of one (function, dimension, algorithm, run) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub function: String,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub run_index: u32,
    pub final_fitness: f64,
    pub final_position: Vec<f64>,
    /// Global best fitness after initialization and after every iteration.
    pub trace: Vec<f64>,
    pub wall_seconds: f64,
    pub eval_count: usize,
}

/// Records of the cells that finished and the cells that failed.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
}

#[derive(Clone, Copy)]
struct Cell<'a> {
    problem: &'a dyn Problem,
    dimension: usize,
    algorithm: Algorithm,
    run_index: u32,
}

/// Runs the plan over the registered benchmarks and fails if any cell failed.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<RunRecord>, HarnessError> {
    let outcome = execute(plan)?;
    if outcome.failures.is_empty() {
        Ok(outcome.records)
    } else {
        Err(HarnessError::CellsFailed(outcome.failures))
    }
}

/// Runs every cell of the plan over the registered benchmarks, keeping going
/// past failed cells.
pub fn execute(plan: &ExperimentPlan) -> Result<ExperimentOutcome, HarnessError> {
    plan.validate()?;
    let specs = plan
        .functions
        .iter()
        .map(|f| bench::lookup(f).map(|s| s as &dyn Problem))
        .collect::<Result<Vec<_>, _>>()?;
    execute_problems(plan, &specs)
}

/// Like [`execute`] but over caller-supplied problems; `plan.functions` is
/// ignored.
pub fn execute_problems(
    plan: &ExperimentPlan,
    problems: &[&dyn Problem],
) -> Result<ExperimentOutcome, HarnessError> {
    if plan.runs == 0 || plan.runs > u32::MAX as usize {
        return Err(HarnessError::InvalidPlan("runs must be in 1..=u32::MAX".into()));
    }
    let mut problems = problems.to_vec();
    problems.sort_by(|a, b| a.name().cmp(b.name()));
    let mut dimensions = plan.dimensions.clone();
    dimensions.sort_unstable();
    dimensions.dedup();
    let mut algorithms = plan.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();

    // Fail fast on configuration errors before any optimization work.
    for p in &problems {
        for &d in &dimensions {
            p.check_dimension(d).map_err(HarnessError::InvalidPlan)?;
            for &a in &algorithms {
                let (lb, ub) = p.bounds(d);
                plan.settings
                    .swarm_config(a, lb, ub, RunStream::new(plan.master_seed, 0))
                    .map_err(|source| HarnessError::Setup {
                        function: p.name().to_owned(),
                        dimension: d,
                        algorithm: a,
                        source,
                    })?;
            }
        }
    }

    let mut cells = Vec::with_capacity(problems.len() * dimensions.len() * algorithms.len() * plan.runs);
    for &problem in &problems {
        for &dimension in &dimensions {
            for &algorithm in &algorithms {
                for run_index in 0..plan.runs as u32 {
                    cells.push(Cell {
                        problem,
                        dimension,
                        algorithm,
                        run_index,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;

    let results: Vec<Result<RunRecord, CellFailure>> = pool.install(|| {
        if plan.timing {
            let warmups: Vec<Cell> = cells
                .iter()
                .filter(|c| c.run_index == 0 && c.algorithm == algorithms[0])
                .copied()
                .collect();
            warmups.par_iter().for_each(|c| {
                let _ = run_cell(plan, c);
            });
        }
        cells.par_iter().map(|c| run_cell(plan, c)).collect()
    });

    let mut outcome = ExperimentOutcome::default();
    for r in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}

fn run_cell(plan: &ExperimentPlan, cell: &Cell) -> Result<RunRecord, CellFailure> {
    let fail = |error| CellFailure {
        function: cell.problem.name().to_owned(),
        dimension: cell.dimension,
        algorithm: cell.algorithm,
        run_index: cell.run_index,
        error,
    };
    let (lb, ub) = cell.problem.bounds(cell.dimension);
    let stream = RunStream::new(plan.master_seed, cell.run_index);
    let config = plan
        .settings
        .swarm_config(cell.algorithm, lb, ub, stream)
        .map_err(fail)?;
    let problem = cell.problem;
    let objective = |x: &[f64]| problem.evaluate(x);
    let out = swarm::run(&config, &objective).map_err(fail)?;
    Ok(RunRecord {
        function: cell.problem.name().to_owned(),
        dimension: cell.dimension,
        algorithm: cell.algorithm,
        run_index: cell.run_index,
        final_fitness: out.best_fitness,
        final_position: out.best_position,
        trace: out.trace,
        wall_seconds: if plan.timing { out.wall_seconds } else { 0.0 },
        eval_count: out.eval_count,
    })
}

/// Per-cell aggregate over runs. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub dimension: usize,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub iqr_low: f64,
    pub iqr_high: f64,
    pub mean_wall_seconds: f64,
    /// Strictly lower mean than the other algorithm at this function and
    /// dimension.
    pub winner_flag: bool,
    /// Two-sided Mann-Whitney U p-value against the other algorithm. Not
    /// part of the reference protocol.
    pub mann_whitney_p: Option<f64>,
}

type CellKey = (String, usize, Algorithm);

/// Aggregates records per (function, dimension, algorithm), in canonical
/// order. Values are ordered by run index first, so the result does not
/// depend on the order of `records`.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut groups: BTreeMap<CellKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.function.clone(), r.dimension, r.algorithm))
            .or_default()
            .push(r);
    }
    let mut expected = None;
    let mut finals: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(groups.len());
    for ((function, dimension, algorithm), mut group) in groups {
        if group.is_empty() {
            return Err(HarnessError::EmptyCell {
                function,
                dimension,
                algorithm,
            });
        }
        match expected {
            None => expected = Some(group.len()),
            Some(n) if n != group.len() => {
                return Err(HarnessError::UnequalRunCounts(n, group.len()))
            }
            Some(_) => {}
        }
        group.sort_by_key(|r| r.run_index);
        let values: Vec<f64> = group.iter().map(|r| r.final_fitness).collect();
        let walls: Vec<f64> = group.iter().map(|r| r.wall_seconds).collect();
        let sorted = stats::sorted_copy(&values);
        rows.push(SummaryRow {
            function: function.clone(),
            dimension,
            algorithm,
            runs: values.len(),
            mean: stats::mean(&values),
            std: stats::sample_std(&values),
            median: stats::percentile_sorted(&sorted, 0.5),
            iqr_low: stats::percentile_sorted(&sorted, 0.25),
            iqr_high: stats::percentile_sorted(&sorted, 0.75),
            mean_wall_seconds: stats::mean(&walls),
            winner_flag: false,
            mann_whitney_p: None,
        });
        finals.insert((function, dimension, algorithm), values);
    }

    // Rows of one (function, dimension) are adjacent, PSO before DPSO.
    let mut i = 0;
    while i < rows.len() {
        let mut j = i + 1;
        while j < rows.len()
            && rows[j].function == rows[i].function
            && rows[j].dimension == rows[i].dimension
        {
            j += 1;
        }
        if j - i == 2 {
            let (a, b) = (rows[i].mean, rows[i + 1].mean);
            rows[i].winner_flag = a < b;
            rows[i + 1].winner_flag = b < a;
            let key = |r: &SummaryRow| (r.function.clone(), r.dimension, r.algorithm);
            let p = stats::mann_whitney_p(&finals[&key(&rows[i])], &finals[&key(&rows[i + 1])]);
            rows[i].mann_whitney_p = Some(p);
            rows[i + 1].mann_whitney_p = Some(p);
        }
        i = j;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadRow {
    pub function: String,
    pub dimension: usize,
    /// DPSO mean wall time over PSO mean wall time.
    pub ratio: f64,
}

pub fn overhead_report(summary: &[SummaryRow]) -> Result<Vec<OverheadRow>, HarnessError> {
    let mut pairs: BTreeMap<(String, usize), [Option<f64>; 2]> = BTreeMap::new();
    for row in summary {
        let slot = match row.algorithm {
            Algorithm::Pso => 0,
            Algorithm::Dpso => 1,
        };
        pairs
            .entry((row.function.clone(), row.dimension))
            .or_default()[slot] = Some(row.mean_wall_seconds);
    }
    pairs
        .into_iter()
        .map(|((function, dimension), times)| match times {
            [Some(pso), Some(dpso)] => Ok(OverheadRow {
                function,
                dimension,
                ratio: dpso / pso,
            }),
            _ => Err(HarnessError::MissingPair {
                function,
                dimension,
            }),
        })
        .collect()
}

/// Mean overhead ratio over functions, per dimension (ascending).
pub fn mean_overhead_by_dimension(rows: &[OverheadRow]) -> Vec<(usize, f64)> {
    let mut by_dim: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in rows {
        by_dim.entry(r.dimension).or_default().push(r.ratio);
    }
    by_dim
        .into_iter()
        .map(|(d, ratios)| (d, stats::mean(&ratios)))
        .collect()
}

/// Win counts per modality over (function, dimension) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerDigest {
    pub modality: Modality,
    pub pso_wins: usize,
    pub dpso_wins: usize,
    pub ties: usize,
}

impl WinnerDigest {
    pub fn total(&self) -> usize {
        self.pso_wins + self.dpso_wins + self.ties
    }
}

/// Functions that are not registered benchmarks are left out.
pub fn winner_digest(summary: &[SummaryRow]) -> Vec<WinnerDigest> {
    let mut pairs: BTreeMap<(String, usize), (bool, bool)> = BTreeMap::new();
    for row in summary {
        let e = pairs
            .entry((row.function.clone(), row.dimension))
            .or_default();
        match row.algorithm {
            Algorithm::Pso => e.0 |= row.winner_flag,
            Algorithm::Dpso => e.1 |= row.winner_flag,
        }
    }
    [Modality::Unimodal, Modality::Multimodal]
        .into_iter()
        .map(|modality| {
            let mut d = WinnerDigest {
                modality,
                pso_wins: 0,
                dpso_wins: 0,
                ties: 0,
            };
            for ((f, _), (pso, dpso)) in &pairs {
                if bench::lookup(f).map(|b| b.modality) != Ok(modality) {
                    continue;
                }
                match (pso, dpso) {
                    (true, _) => d.pso_wins += 1,
                    (_, true) => d.dpso_wins += 1,
                    _ => d.ties += 1,
                }
            }
            d
        })
        .collect()
}
