use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use occam::experiments::{self, ExperimentKind, ExperimentSpec, Setting};
use occam::fit::OccamOptions;
use occam::metrics::{exnvi, membership_error_matrix, BinaryMembership};
use occam::sampler::generate;

/// Overlapping community detection: simulate, fit and evaluate.
#[derive(Parser)]
#[command(name = "occam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a network and write its edge list, memberships and metadata.
    Generate {
        #[command(flatten)]
        sim: SimArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit memberships to an edge-list graph.
    Fit {
        /// Edge list: one "i j" pair per line, 0-based.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Minimum node count (ids beyond it extend the graph).
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for z_hat.csv, gamma_hat.csv and metadata.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score estimated memberships against the truth.
    Eval {
        /// True memberships, headerless CSV with K columns.
        #[arg(long)]
        truth: PathBuf,
        /// Estimated memberships, same shape.
        #[arg(long)]
        estimate: PathBuf,
        /// Binarization level for both inputs [default: 1/K].
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Sweep the regularization constant C_tau (default 50 replications).
    SweepCtau(SweepArgs),
    /// Sweep the off-diagonal connectivity rho (default 200 replications).
    SweepRho(SweepArgs),
    /// Track the membership error as the node count grows (default 50 replications).
    TrendN(SweepArgs),
}

#[derive(Args, Default)]
struct SimArgs {
    /// Number of nodes [default: 500].
    #[arg(long)]
    n: Option<usize>,
    /// Number of communities [default: 3].
    #[arg(long)]
    k: Option<usize>,
    /// Off-diagonal connectivity of the planted partition [default: 0.1].
    #[arg(long)]
    rho: Option<f64>,
    /// Overlap profile: A, B, A-caption or pure [default: A].
    #[arg(long)]
    profile: Option<String>,
    /// Degree heterogeneity: nohub or hub [default: nohub].
    #[arg(long)]
    theta: Option<String>,
    /// Expected average degree [default: 40].
    #[arg(long)]
    degree: Option<f64>,
    /// strict fails when a probability exceeds one; clip caps it [default: clip with hubs, else strict].
    #[arg(long)]
    edge_policy: Option<String>,
    /// Block allocation: deterministic or multinomial [default: deterministic].
    #[arg(long)]
    allocation: Option<String>,
    /// Master seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
struct FitArgs {
    /// Constant in the default regularizer [default: 0.1].
    #[arg(long)]
    c_tau: Option<f64>,
    /// Use this regularizer instead of the default formula.
    #[arg(long)]
    tau: Option<f64>,
    /// Binarization level [default: 1/K].
    #[arg(long)]
    threshold: Option<f64>,
    /// K-medians restarts [default: 10].
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Start from a named preset (e.g. fig1-n500-nohub-d40-rho0.1, fig2-A-d40-nohub, trend).
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// Start from a key=value spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Comma-separated grid of swept values.
    #[arg(long)]
    grid: Option<String>,
    /// Replications per grid value.
    #[arg(long)]
    reps: Option<usize>,
    #[command(flatten)]
    sim: SimArgs,
    #[command(flatten)]
    fit: FitArgs,
    /// Add a wall_time_ms column (output is then no longer reproducible).
    #[arg(long)]
    timing: bool,
    /// CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

type Failure = Box<dyn std::error::Error>;

impl SimArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |key, value: Option<String>| {
            if let Some(v) = value {
                out.push((key, v));
            }
        };
        push("n", self.n.map(|v| v.to_string()));
        push("k", self.k.map(|v| v.to_string()));
        push("rho", self.rho.map(|v| v.to_string()));
        push("profile", self.profile.clone());
        push("theta", self.theta.clone());
        push("degree", self.degree.map(|v| v.to_string()));
        push("edge_policy", self.edge_policy.clone());
        push("allocation", self.allocation.clone());
        push("seed", self.seed.map(|v| v.to_string()));
        out
    }
}

impl FitArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(v) = self.c_tau {
            out.push(("c_tau", v.to_string()));
        }
        if let Some(v) = self.tau {
            out.push(("tau", v.to_string()));
        }
        if let Some(v) = self.threshold {
            out.push(("threshold", v.to_string()));
        }
        if let Some(v) = self.restarts {
            out.push(("restarts", v.to_string()));
        }
        out
    }

    fn options(&self, seed: u64) -> Result<OccamOptions, Failure> {
        let mut spec = ExperimentSpec::new(ExperimentKind::SingleFit, Setting::default());
        for (key, value) in self.overrides() {
            spec.apply(key, &value)?;
        }
        Ok(OccamOptions { seed, ..spec.opts })
    }
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_generate(sim: &SimArgs, out: &Path) -> Result<(), Failure> {
    let mut spec = ExperimentSpec::new(ExperimentKind::SingleFit, Setting::default());
    for (key, value) in sim.overrides() {
        spec.apply(key, &value)?;
    }
    let setting = &spec.base;
    let net = generate(&setting.sampler_config(spec.master_seed)?)?;
    fs::create_dir_all(out)?;
    occam::io::write_edge_list(&net.adjacency, create(&out.join("edges.txt"))?)?;
    occam::io::write_matrix_csv(net.params.z.matrix(), create(&out.join("memberships.csv"))?)?;
    occam::io::write_column_csv(net.params.theta.values().as_slice(), create(&out.join("theta.csv"))?)?;
    let mut meta = spec.to_key_values();
    meta.retain(|(k, _)| !matches!(k.as_str(), "kind" | "label" | "grid" | "reps" | "c_tau" | "restarts"));
    meta.push(("alpha".into(), net.params.alpha.to_string()));
    meta.push(("edges".into(), net.adjacency.edge_count().to_string()));
    meta.push(("clipped_pairs".into(), net.clipped_pairs.to_string()));
    occam::io::write_key_values(&meta, create(&out.join("metadata.txt"))?)?;
    eprintln!(
        "wrote {} nodes and {} edges to {}",
        net.adjacency.nodes(),
        net.adjacency.edge_count(),
        out.display()
    );
    Ok(())
}

fn read_csv(path: &Path) -> Result<occam::nalgebra::DMatrix<f64>, Failure> {
    Ok(occam::io::read_matrix_csv(BufReader::new(File::open(path)?))?)
}

fn run_eval(truth: &Path, estimate: &Path, threshold: Option<f64>) -> Result<(), Failure> {
    let z = read_csv(truth)?;
    let z_hat = read_csv(estimate)?;
    let k = z.ncols();
    if k == 0 {
        return Err("truth has no columns".into());
    }
    let t = threshold.unwrap_or(1.0 / k as f64);
    let score = exnvi(&BinaryMembership::threshold(&z, t), &BinaryMembership::threshold(&z_hat, t))?;
    let error = membership_error_matrix(&z_hat, &z)?;
    let perm: Vec<String> = score.permutation.iter().map(usize::to_string).collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "exnvi={}", score.value)?;
    writeln!(out, "membership_error={error}")?;
    writeln!(out, "threshold={t}")?;
    writeln!(out, "permutation={}", perm.join(","))?;
    Ok(())
}

/// Returns the number of failed rows.
fn run_sweep(kind: ExperimentKind, args: &SweepArgs) -> Result<usize, Failure> {
    let mut spec = match (&args.spec, &args.preset) {
        (Some(path), _) => ExperimentSpec::read(path)?,
        (None, Some(name)) => experiments::preset(name)?,
        (None, None) => ExperimentSpec::new(kind, Setting::default()),
    };
    if spec.kind != kind {
        return Err(format!("this command runs {kind} experiments, but the spec is {}", spec.kind).into());
    }
    for (key, value) in args.sim.overrides().into_iter().chain(args.fit.overrides()) {
        spec.apply(key, &value)?;
    }
    if let Some(grid) = &args.grid {
        spec.apply("grid", grid)?;
    }
    if let Some(reps) = args.reps {
        spec.replications = reps;
    }
    if args.timing {
        spec.record_timing = true;
    }
    if let Some(out) = &args.out {
        spec.output_path = Some(out.clone());
    }
    let rows = experiments::run_experiment(&spec)?;
    match &spec.output_path {
        Some(path) => experiments::write_rows_csv(&rows, spec.record_timing, create(path)?)?,
        None => experiments::write_rows_csv(&rows, spec.record_timing, io::stdout().lock())?,
    }
    let summary = experiments::summarize(&rows);
    for s in &summary {
        eprintln!(
            "{}={}: mean exnvi {:.4}, mean membership_error {:.4}, {} ok, {} failed",
            kind, s.swept_value, s.mean_exnvi, s.mean_membership_error, s.ok_rows, s.failed_rows
        );
    }
    Ok(summary.iter().map(|s| s.failed_rows).sum())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Generate { sim, out } => run_generate(&sim, &out)?,
        Command::Fit {
            graph,
            k,
            n,
            fit,
            seed,
            out,
        } => {
            let opts = fit.options(seed)?;
            let output = experiments::run_single_fit(&graph, k, n, &opts, &out)?;
            eprintln!(
                "alpha_hat {}, tau {}; wrote {}",
                output.result.alpha_hat,
                output.result.tau,
                out.display()
            );
        }
        Command::Eval {
            truth,
            estimate,
            threshold,
        } => run_eval(&truth, &estimate, threshold)?,
        Command::SweepCtau(args) => return sweep_exit(ExperimentKind::CtauSweep, &args),
        Command::SweepRho(args) => return sweep_exit(ExperimentKind::RhoSweep, &args),
        Command::TrendN(args) => return sweep_exit(ExperimentKind::NTrend, &args),
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_exit(kind: ExperimentKind, args: &SweepArgs) -> Result<ExitCode, Failure> {
    let failed = run_sweep(kind, args)?;
    if failed > 0 {
        eprintln!("{failed} rows failed");
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
