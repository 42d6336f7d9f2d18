//! Seeded simulation sweeps and their CSV output.
//!
//! Every (grid point, replication) pair draws from its own generator seeded
//! by mixing the master seed with both indices, so output does not depend on
//! how rows are scheduled across threads.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit, threshold_binary, OccamOptions, OccamResult};
use crate::io;
use crate::metrics::{exnvi, membership_error};
use crate::model::planted_partition_b;
use crate::sampler::{generate, Allocation, EdgeProbabilityPolicy, OverlapProfile, SamplerConfig, ThetaLaw};

pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    CtauSweep,
    RhoSweep,
    NTrend,
    /// One synthetic fit per replication at the base setting.
    SingleFit,
}

impl ExperimentKind {
    pub fn default_replications(self) -> usize {
        match self {
            Self::CtauSweep | Self::NTrend => 50,
            Self::RhoSweep => 200,
            Self::SingleFit => 1,
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Self::CtauSweep => (-6..=6).map(|e| 2f64.powi(2 * e)).collect(),
            Self::RhoSweep => (0..=10).map(|i| i as f64 / 20.0).collect(),
            Self::NTrend => vec![250.0, 500.0, 1000.0, 2000.0],
            Self::SingleFit => vec![0.0],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CtauSweep => "ctau",
            Self::RhoSweep => "rho",
            Self::NTrend => "ntrend",
            Self::SingleFit => "single",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ctau" | "sweep-ctau" => Ok(Self::CtauSweep),
            "rho" | "sweep-rho" => Ok(Self::RhoSweep),
            "ntrend" | "trend-n" => Ok(Self::NTrend),
            "single" | "fit" => Ok(Self::SingleFit),
            _ => Err(Error::InvalidParameter(format!("unknown experiment kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaChoice {
    NoHub,
    Hub,
}

impl ThetaChoice {
    pub fn law(self) -> ThetaLaw {
        match self {
            Self::NoHub => ThetaLaw::PointMassOne,
            Self::Hub => ThetaLaw::Hub,
        }
    }
}

impl fmt::Display for ThetaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NoHub => "nohub",
            Self::Hub => "hub",
        })
    }
}

impl FromStr for ThetaChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nohub" => Ok(Self::NoHub),
            "hub" => Ok(Self::Hub),
            _ => Err(Error::InvalidParameter(format!("theta must be nohub or hub, got {s:?}"))),
        }
    }
}

fn parse_policy(s: &str) -> Result<EdgeProbabilityPolicy> {
    match s {
        "strict" => Ok(EdgeProbabilityPolicy::Strict),
        "clip" => Ok(EdgeProbabilityPolicy::Clip),
        _ => Err(Error::InvalidParameter(format!("edge policy must be strict or clip, got {s:?}"))),
    }
}

fn policy_name(p: EdgeProbabilityPolicy) -> &'static str {
    match p {
        EdgeProbabilityPolicy::Strict => "strict",
        EdgeProbabilityPolicy::Clip => "clip",
    }
}

fn parse_allocation(s: &str) -> Result<Allocation> {
    match s {
        "deterministic" => Ok(Allocation::Deterministic),
        "multinomial" => Ok(Allocation::Multinomial),
        _ => Err(Error::InvalidParameter(format!("allocation must be deterministic or multinomial, got {s:?}"))),
    }
}

fn allocation_name(a: Allocation) -> &'static str {
    match a {
        Allocation::Deterministic => "deterministic",
        Allocation::Multinomial => "multinomial",
    }
}

/// Overlap profile by name. `pure` works for any `K`; the lettered presets
/// are defined for three communities.
pub fn profile_for(name: &str, k: usize) -> Result<OverlapProfile> {
    if name == "pure" {
        return OverlapProfile::symmetric(k, &[1.0 / k as f64]);
    }
    if k != 3 {
        return Err(Error::InvalidProfile(format!("profile {name:?} is defined for K = 3 only")));
    }
    OverlapProfile::preset(name)
}

/// A planted-partition simulation setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub profile: String,
    pub theta: ThetaChoice,
    pub degree: f64,
    pub allocation: Allocation,
    pub edge_policy: EdgeProbabilityPolicy,
}

impl Default for Setting {
    fn default() -> Self {
        Self {
            n: 500,
            k: 3,
            rho: 0.1,
            profile: "A".into(),
            theta: ThetaChoice::NoHub,
            degree: 40.0,
            allocation: Allocation::Deterministic,
            edge_policy: EdgeProbabilityPolicy::Strict,
        }
    }
}

impl Setting {
    /// Hub degrees overshoot probability one at usual densities, so hub
    /// settings clip by default.
    pub fn with_theta(mut self, theta: ThetaChoice) -> Self {
        self.theta = theta;
        self.edge_policy = match theta {
            ThetaChoice::Hub => EdgeProbabilityPolicy::Clip,
            ThetaChoice::NoHub => EdgeProbabilityPolicy::Strict,
        };
        self
    }

    pub fn sampler_config(&self, seed: u64) -> Result<SamplerConfig> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("K must be at least 1".into()));
        }
        let mut config = SamplerConfig::new(
            self.n,
            profile_for(&self.profile, self.k)?,
            self.theta.law(),
            planted_partition_b(self.k, self.rho),
            self.degree,
            seed,
        );
        config.allocation = self.allocation;
        config.edge_policy = self.edge_policy;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub label: String,
    pub grid: Vec<f64>,
    pub replications: usize,
    pub base: Setting,
    pub opts: OccamOptions,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Adds a `wall_time_ms` column, which makes output non-reproducible.
    pub record_timing: bool,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, base: Setting) -> Self {
        Self {
            kind,
            label: kind.to_string(),
            grid: kind.default_grid(),
            replications: kind.default_replications(),
            base,
            opts: OccamOptions::default(),
            master_seed: 0,
            output_path: None,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid values must be finite".into()));
        }
        if self.kind == ExperimentKind::NTrend {
            if self.grid.iter().any(|&v| v < 2.0 || v.fract() != 0.0) {
                return Err(Error::InvalidParameter("node counts must be integers >= 2".into()));
            }
            if self.grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("node-count grid must be increasing".into()));
            }
        }
        Ok(())
    }

    /// Setting and options for one grid value.
    fn point(&self, value: f64) -> (Setting, OccamOptions) {
        let mut setting = self.base.clone();
        let mut opts = self.opts.clone();
        match self.kind {
            ExperimentKind::CtauSweep => opts.c_tau = value,
            ExperimentKind::RhoSweep => setting.rho = value,
            ExperimentKind::NTrend => setting.n = value as usize,
            ExperimentKind::SingleFit => {}
        }
        (setting, opts)
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let b = &self.base;
        let grid: Vec<String> = self.grid.iter().map(f64::to_string).collect();
        let mut pairs = vec![
            ("kind", self.kind.to_string()),
            ("label", self.label.clone()),
            ("grid", grid.join(",")),
            ("reps", self.replications.to_string()),
            ("seed", self.master_seed.to_string()),
            ("n", b.n.to_string()),
            ("k", b.k.to_string()),
            ("rho", b.rho.to_string()),
            ("profile", b.profile.clone()),
            ("theta", b.theta.to_string()),
            ("degree", b.degree.to_string()),
            ("allocation", allocation_name(b.allocation).to_string()),
            ("edge_policy", policy_name(b.edge_policy).to_string()),
            ("c_tau", self.opts.c_tau.to_string()),
            ("restarts", self.opts.kmedians.restarts.to_string()),
        ];
        if let Some(tau) = self.opts.tau_override {
            pairs.push(("tau", tau.to_string()));
        }
        if let Some(t) = self.opts.threshold {
            pairs.push(("threshold", t.to_string()));
        }
        if let Some(path) = &self.output_path {
            pairs.push(("output", path.display().to_string()));
        }
        if self.record_timing {
            pairs.push(("timing", "true".into()));
        }
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Builds a spec from `key=value` pairs. A `preset` key (if any) supplies
    /// the starting point; later keys override it.
    pub fn from_key_values(pairs: &[(String, String)]) -> Result<Self> {
        let lookup = |key: &str| pairs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let mut spec = match (lookup("preset"), lookup("kind")) {
            (Some(name), _) => preset(name)?,
            (None, Some(kind)) => Self::new(kind.parse()?, Setting::default()),
            (None, None) => return Err(Error::InvalidParameter("spec needs a kind or a preset".into())),
        };
        for (key, value) in pairs {
            spec.apply(key, value)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Sets one field from its textual form.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse {value:?}")))
        }
        match key {
            "preset" => {}
            "kind" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.kind {
                    let label_was_default = self.label == self.kind.to_string();
                    self.kind = kind;
                    self.grid = kind.default_grid();
                    self.replications = kind.default_replications();
                    if label_was_default {
                        self.label = kind.to_string();
                    }
                }
            }
            "label" => self.label = value.to_string(),
            "grid" => {
                self.grid = value
                    .split(',')
                    .map(|s| num::<f64>(key, s.trim()))
                    .collect::<Result<Vec<f64>>>()?
            }
            "reps" | "replications" => self.replications = num(key, value)?,
            "seed" => self.master_seed = num(key, value)?,
            "n" => self.base.n = num(key, value)?,
            "k" => self.base.k = num(key, value)?,
            "rho" => self.base.rho = num(key, value)?,
            "profile" => self.base.profile = value.to_string(),
            "theta" => self.base = self.base.clone().with_theta(value.parse()?),
            "degree" => self.base.degree = num(key, value)?,
            "allocation" => self.base.allocation = parse_allocation(value)?,
            "edge_policy" => self.base.edge_policy = parse_policy(value)?,
            "c_tau" => self.opts.c_tau = num(key, value)?,
            "tau" => self.opts.tau_override = Some(num(key, value)?),
            "threshold" => self.opts.threshold = Some(num(key, value)?),
            "restarts" => self.opts.kmedians.restarts = num(key, value)?,
            "output" => self.output_path = Some(PathBuf::from(value)),
            "timing" => self.record_timing = num(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown spec key {key:?}"))),
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_key_values(&io::read_key_values(BufReader::new(File::open(path)?))?)
    }
}

/// Named experiment presets.
///
/// * `fig1-n{500,2000}-{nohub,hub}-d{20,40}-rho{0.1,0.25}`: C_tau sweeps.
/// * `fig2-{A,B}-d{20,40}-{nohub,hub}`: rho sweeps at n = 500.
/// * `trend`: node-count trend at K = 3, rho = 0.1, profile A, degree 40.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let unknown = || Error::InvalidParameter(format!("unknown preset {name:?}"));
    let parts: Vec<&str> = name.split('-').collect();
    let degree = |s: &str| s.strip_prefix('d').and_then(|d| d.parse::<f64>().ok()).ok_or_else(unknown);
    let mut spec = match parts.as_slice() {
        ["fig1", n, theta, d, rho] => {
            let n: usize = n.strip_prefix('n').and_then(|v| v.parse().ok()).ok_or_else(unknown)?;
            let rho: f64 = rho.strip_prefix("rho").and_then(|v| v.parse().ok()).ok_or_else(unknown)?;
            let base = Setting {
                n,
                rho,
                degree: degree(d)?,
                ..Setting::default()
            }
            .with_theta(theta.parse()?);
            ExperimentSpec::new(ExperimentKind::CtauSweep, base)
        }
        ["fig2", profile, d, theta] => {
            let base = Setting {
                profile: profile.to_string(),
                degree: degree(d)?,
                ..Setting::default()
            }
            .with_theta(theta.parse()?);
            profile_for(&base.profile, base.k)?;
            ExperimentSpec::new(ExperimentKind::RhoSweep, base)
        }
        ["trend"] => ExperimentSpec::new(ExperimentKind::NTrend, Setting::default()),
        _ => return Err(unknown()),
    };
    spec.label = name.to_string();
    Ok(spec)
}

pub fn preset_names() -> Vec<String> {
    let mut names = Vec::new();
    for n in [500, 2000] {
        for theta in ["nohub", "hub"] {
            for d in [20, 40] {
                for rho in ["0.1", "0.25"] {
                    names.push(format!("fig1-n{n}-{theta}-d{d}-rho{rho}"));
                }
            }
        }
    }
    for profile in ["A", "B"] {
        for d in [20, 40] {
            for theta in ["nohub", "hub"] {
                names.push(format!("fig2-{profile}-d{d}-{theta}"));
            }
        }
    }
    names.push("trend".into());
    names
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, Self::Ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub label: String,
    pub grid_index: usize,
    pub swept_value: f64,
    pub replication: usize,
    pub exnvi: f64,
    pub membership_error: f64,
    pub alpha_hat: f64,
    pub tau: f64,
    pub status: RowStatus,
    pub wall_time_ms: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the sampler of one (grid point, replication) row.
pub fn row_seed(master: u64, grid_index: usize, replication: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid_index as u64) ^ replication as u64)
}

fn fit_seed(row: u64) -> u64 {
    splitmix64(row ^ 0x5EED_0F_C1u64)
}

struct Measured {
    exnvi: f64,
    membership_error: f64,
    alpha_hat: f64,
    tau: f64,
}

fn evaluate(setting: &Setting, opts: &OccamOptions, seed: u64) -> Result<Measured> {
    let config = setting.sampler_config(seed)?;
    let net = generate(&config)?;
    let opts = OccamOptions {
        seed: fit_seed(seed),
        ..opts.clone()
    };
    let result: OccamResult = fit(&net.adjacency, setting.k, &opts)?;
    let truth = threshold_binary(&net.params.z, result.threshold);
    Ok(Measured {
        exnvi: exnvi(&truth, &result.binary)?.value,
        membership_error: membership_error(&result.z_hat, &net.params.z)?,
        alpha_hat: result.alpha_hat,
        tau: result.tau,
    })
}

/// Runs every (grid point, replication) row. Errors inside a row are
/// recorded in its status; only an invalid spec fails the whole run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.replications).map(move |r| (g, r)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(g, r)| {
            let value = spec.grid[g];
            let (setting, opts) = spec.point(value);
            let start = Instant::now();
            let outcome = evaluate(&setting, &opts, row_seed(spec.master_seed, g, r));
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            let (m, status) = match outcome {
                Ok(m) => (m, RowStatus::Ok),
                Err(e) => (
                    Measured {
                        exnvi: f64::NAN,
                        membership_error: f64::NAN,
                        alpha_hat: f64::NAN,
                        tau: f64::NAN,
                    },
                    RowStatus::Failed(e.to_string()),
                ),
            };
            ExperimentRow {
                label: spec.label.clone(),
                grid_index: g,
                swept_value: value,
                replication: r,
                exnvi: m.exnvi,
                membership_error: m.membership_error,
                alpha_hat: m.alpha_hat,
                tau: m.tau,
                status,
                wall_time_ms,
            }
        })
        .collect();
    Ok(rows)
}

fn run_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<Vec<ExperimentRow>> {
    if spec.kind != kind {
        return Err(Error::InvalidParameter(format!("expected a {kind} spec, got {}", spec.kind)));
    }
    run_experiment(spec)
}

pub fn run_ctau_sweep(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    run_kind(spec, ExperimentKind::CtauSweep)
}

pub fn run_rho_sweep(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    run_kind(spec, ExperimentKind::RhoSweep)
}

pub fn run_n_trend(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>> {
    run_kind(spec, ExperimentKind::NTrend)
}

fn csv_field(s: &str) -> String {
    s.chars().map(|c| if c == ',' || c == '\n' || c == '\r' { ';' } else { c }).collect()
}

pub fn write_rows_csv<W: Write>(rows: &[ExperimentRow], include_timing: bool, mut out: W) -> Result<()> {
    writeln!(out, "# schema={CSV_SCHEMA}")?;
    let mut header = "label,swept_value,replication,exnvi,membership_error,alpha_hat,tau,status".to_string();
    if include_timing {
        header.push_str(",wall_time_ms");
    }
    writeln!(out, "{header}")?;
    for row in rows {
        let status = match &row.status {
            RowStatus::Ok => "ok".to_string(),
            RowStatus::Failed(msg) => format!("failed: {}", csv_field(msg)),
        };
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&row.label),
            row.swept_value,
            row.replication,
            row.exnvi,
            row.membership_error,
            row.alpha_hat,
            row.tau,
            status
        )?;
        if include_timing {
            write!(out, ",{:.3}", row.wall_time_ms)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn rows_to_csv_string(rows: &[ExperimentRow], include_timing: bool) -> String {
    let mut buf = Vec::new();
    write_rows_csv(rows, include_timing, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

/// Per-grid-point means over successful rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSummary {
    pub swept_value: f64,
    pub mean_exnvi: f64,
    pub mean_membership_error: f64,
    pub ok_rows: usize,
    pub failed_rows: usize,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<GridSummary> {
    let mut out: Vec<(usize, GridSummary)> = Vec::new();
    for row in rows {
        let pos = match out.iter().position(|(g, _)| *g == row.grid_index) {
            Some(p) => p,
            None => {
                out.push((
                    row.grid_index,
                    GridSummary {
                        swept_value: row.swept_value,
                        mean_exnvi: 0.0,
                        mean_membership_error: 0.0,
                        ok_rows: 0,
                        failed_rows: 0,
                    },
                ));
                out.len() - 1
            }
        };
        let s = &mut out[pos].1;
        if row.status.is_ok() {
            s.mean_exnvi += row.exnvi;
            s.mean_membership_error += row.membership_error;
            s.ok_rows += 1;
        } else {
            s.failed_rows += 1;
        }
    }
    out.into_iter()
        .map(|(_, mut s)| {
            let count = s.ok_rows as f64;
            if s.ok_rows == 0 {
                s.mean_exnvi = f64::NAN;
                s.mean_membership_error = f64::NAN;
            } else {
                s.mean_exnvi /= count;
                s.mean_membership_error /= count;
            }
            s
        })
        .collect()
}

/// Files written by [`run_single_fit`].
#[derive(Debug, Clone)]
pub struct SingleFitOutput {
    pub result: OccamResult,
    pub z_hat_path: PathBuf,
    pub gamma_hat_path: PathBuf,
    pub metadata_path: PathBuf,
}

/// Fits an edge-list graph and writes `z_hat.csv`, `gamma_hat.csv` and
/// `metadata.txt` into `out_dir`.
pub fn run_single_fit(
    graph_path: &Path,
    k: usize,
    min_nodes: usize,
    opts: &OccamOptions,
    out_dir: &Path,
) -> Result<SingleFitOutput> {
    let a = io::read_edge_list(BufReader::new(File::open(graph_path)?), min_nodes)?;
    if k > a.nodes() {
        return Err(Error::TooFewPoints { n: a.nodes(), k });
    }
    let result = fit(&a, k, opts)?;
    fs::create_dir_all(out_dir)?;
    let z_hat_path = out_dir.join("z_hat.csv");
    let gamma_hat_path = out_dir.join("gamma_hat.csv");
    let metadata_path = out_dir.join("metadata.txt");
    io::write_matrix_csv(result.z_hat.matrix(), BufWriter::new(File::create(&z_hat_path)?))?;
    io::write_matrix_csv(&result.binary.to_matrix(), BufWriter::new(File::create(&gamma_hat_path)?))?;
    let eigenvalues: Vec<String> = result.embedding.eigenvalues.iter().map(f64::to_string).collect();
    let metadata: Vec<(String, String)> = [
        ("graph", graph_path.display().to_string()),
        ("n", a.nodes().to_string()),
        ("edges", a.edge_count().to_string()),
        ("k", k.to_string()),
        ("alpha_hat", result.alpha_hat.to_string()),
        ("tau", result.tau.to_string()),
        ("c_tau", opts.c_tau.to_string()),
        ("threshold", result.threshold.to_string()),
        ("kmedians_loss", result.kmedians_loss.to_string()),
        ("kmedians_converged", result.kmedians_converged.to_string()),
        ("eigenvalues", eigenvalues.join(",")),
        ("seed", opts.seed.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    io::write_key_values(&metadata, BufWriter::new(File::create(&metadata_path)?))?;
    Ok(SingleFitOutput {
        result,
        z_hat_path,
        gamma_hat_path,
        metadata_path,
    })
}
