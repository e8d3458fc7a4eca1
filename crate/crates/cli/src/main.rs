use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dpso::bench::{self, Modality};
use dpso::harness::{self, ExperimentPlan, ProtocolSettings, RunRecord};
use dpso::kernels::KernelFamily;
use dpso::report::{self, Metadata, ReportBundle, DEFAULT_TRACE_STRIDE};
use dpso::rng::{RunStream, DEFAULT_SEED};
use dpso::swarm::{self, Algorithm};

/// Particle swarm optimization with divergence-guided modulation.
#[derive(Parser)]
#[command(name = "dpso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List benchmark functions with modality and bounds.
    List {
        /// Only show `unimodal` or `multimodal` functions.
        #[arg(long)]
        modality: Option<Modality>,
    },
    /// Optimize one function once.
    Run(RunArgs),
    /// Run a PSO-versus-DPSO experiment and write its reports.
    Experiment(ExperimentArgs),
}

/// Swarm settings. Unset flags keep the value from the config file or the
/// built-in default.
#[derive(Args, Default)]
struct SettingsArgs {
    /// Modulation strength of DPSO [default: 1.0; PSO always uses 0].
    #[arg(long)]
    c3: Option<f64>,
    /// Kernel bandwidth as a fraction of the box diagonal [default: 0.1].
    #[arg(long)]
    beta: Option<f64>,
    /// Decay rate of the divergence kernels [default: 1.0].
    #[arg(long)]
    alpha: Option<f64>,
    /// Similarity kernel: gaussian, kl or hellinger [default: gaussian].
    #[arg(long)]
    kernel: Option<KernelFamily>,
    /// Inertia weight [default: 0.7298].
    #[arg(long)]
    omega: Option<f64>,
    /// Cognitive acceleration [default: 1.49618].
    #[arg(long)]
    c1: Option<f64>,
    /// Social acceleration [default: 1.49618].
    #[arg(long)]
    c2: Option<f64>,
    /// Velocity limit as a fraction of the box width [default: 0.2].
    #[arg(long)]
    vmax_fraction: Option<f64>,
    /// Iterations per run [default: 1000].
    #[arg(long)]
    iterations: Option<usize>,
    /// Particles per swarm [default: 40].
    #[arg(long)]
    swarm_size: Option<usize>,
    /// Draw one r1 and one r2 per particle instead of one per coordinate.
    #[arg(long)]
    scalar_draws: bool,
}

impl SettingsArgs {
    fn apply(&self, s: &mut ProtocolSettings) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { s.$field = v; }
            )*};
        }
        set!(c3, beta, alpha, kernel, omega, c1, c2, vmax_fraction, iterations, swarm_size);
        if self.scalar_draws {
            s.per_dimension_draws = false;
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    function: String,
    #[arg(long, visible_alias = "dim")]
    dimension: usize,
    #[arg(long, default_value = "dpso")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Run index within the seed's streams.
    #[arg(long, default_value_t = 0)]
    run_index: u32,
    #[command(flatten)]
    settings: SettingsArgs,
    /// Write the global best trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TRACE_STRIDE)]
    trace_stride: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Plan file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated names, or `all`, `unimodal`, `multimodal` [default: all].
    #[arg(long, visible_alias = "function")]
    functions: Option<String>,
    /// Comma-separated dimensions [default: 10,30,50].
    #[arg(long, visible_alias = "dimension", value_delimiter = ',')]
    dimensions: Option<Vec<usize>>,
    /// Comma-separated algorithms [default: pso,dpso].
    #[arg(long, visible_alias = "algorithm", value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// Runs per cell [default: 30].
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed [default: 42].
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core [default: 0].
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    settings: SettingsArgs,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TRACE_STRIDE)]
    trace_stride: usize,
    /// Record every wall time as 0 so the results file is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { modality } => {
            list(modality);
            Ok(())
        }
        Command::Run(args) => run(args),
        Command::Experiment(args) => experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn list(modality: Option<Modality>) {
    for name in bench::list_functions(modality) {
        let spec = bench::lookup(name).expect("listed names are registered");
        println!(
            "{:<18} {:<10} [{}, {}]",
            spec.name, spec.modality, spec.lower_bound, spec.upper_bound
        );
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    if args.trace_stride == 0 {
        return Err(Failure::Usage("--trace-stride must be at least 1".into()));
    }
    let spec = bench::lookup(&args.function).map_err(|e| Failure::Usage(e.to_string()))?;
    spec.check_dimension(args.dimension)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let mut settings = ProtocolSettings::default();
    args.settings.apply(&mut settings);
    let (lb, ub) = spec.bounds(args.dimension);
    let config = settings
        .swarm_config(
            args.algorithm,
            lb,
            ub,
            RunStream::new(args.seed, args.run_index),
        )
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let objective = |x: &[f64]| spec.eval_unchecked(x);
    let out = swarm::run(&config, &objective).map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("final fitness: {:?}", out.best_fitness);
    println!("wall seconds: {:.6}", out.wall_seconds);

    if let Some(path) = args.trace {
        let record = RunRecord {
            function: spec.name.to_owned(),
            dimension: args.dimension,
            algorithm: args.algorithm,
            run_index: args.run_index,
            final_fitness: out.best_fitness,
            final_position: out.best_position,
            trace: out.trace,
            wall_seconds: out.wall_seconds,
            eval_count: out.eval_count,
        };
        report::write_traces(&[record], &path, args.trace_stride)
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn build_plan(args: &ExperimentArgs) -> Result<ExperimentPlan, Failure> {
    let mut plan = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            ExperimentPlan::from_config_str(&text).map_err(|e| {
                Failure::Usage(format!("{}: {e}", path.display()))
            })?
        }
        None => ExperimentPlan::default(),
    };
    if let Some(f) = &args.functions {
        plan.functions = harness::parse_function_list(f).map_err(Failure::Usage)?;
    }
    if let Some(d) = &args.dimensions {
        plan.dimensions = d.clone();
    }
    if let Some(a) = &args.algorithms {
        plan.algorithms = a.clone();
    }
    if let Some(r) = args.runs {
        plan.runs = r;
    }
    if let Some(s) = args.seed {
        plan.master_seed = s;
    }
    if let Some(w) = args.workers {
        plan.workers = w;
    }
    if args.no_timing {
        plan.timing = false;
    }
    args.settings.apply(&mut plan.settings);
    plan.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if args.trace_stride == 0 {
        return Err(Failure::Usage("--trace-stride must be at least 1".into()));
    }
    Ok(plan)
}

fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let plan = build_plan(&args)?;
    eprintln!(
        "running {} runs ({} functions x {} dimensions x {} algorithms x {} runs)",
        plan.cell_count(),
        plan.functions.len(),
        plan.dimensions.len(),
        plan.algorithms.len(),
        plan.runs
    );
    let started = Instant::now();
    let outcome = harness::execute(&plan).map_err(|e| Failure::Usage(e.to_string()))?;
    eprintln!("finished in {:.1} s", started.elapsed().as_secs_f64());

    for f in &outcome.failures {
        eprintln!("failed: {f}");
    }
    let bundle = ReportBundle::in_dir(&args.out_dir, Metadata::for_plan(&plan));
    let summary = if outcome.failures.is_empty() {
        harness::summarize(&outcome.records).map_err(|e| Failure::Runtime(e.to_string()))?
    } else {
        Vec::new()
    };
    bundle
        .write(&outcome.records, &summary, args.trace_stride)
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    eprintln!("reports written to {}", args.out_dir.display());

    if !outcome.failures.is_empty() {
        return Err(Failure::Runtime(format!(
            "{} of {} runs failed",
            outcome.failures.len(),
            plan.cell_count()
        )));
    }
    for d in harness::winner_digest(&summary) {
        if d.total() > 0 {
            println!(
                "{}: dpso {} / pso {} / ties {}",
                d.modality, d.dpso_wins, d.pso_wins, d.ties
            );
        }
    }
    Ok(())
}
