//! Command-line experiments with JSON/CSV reports.
//!
//! Exit codes: `0` everything held, `1` a property was violated or could not
//! be evaluated, `2` usage or configuration error. Settings come from an
//! optional JSON file (`--config`) and flags; flags win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{continuum_sweep, AngularSystem, StateFamily, SweepRow};
use crate::entropy::{DiscreteDistribution, GriddedDensity, Topology};
use crate::error::Error;
use crate::json::{format_f64, to_string};
use crate::maxent::{
    fit_boltzmann, fit_gaussian, fit_gaussian_to, fit_general_moments, fit_uniform,
    fit_von_mises, fit_von_mises_on, DiscreteFamily, MaxEntModel, MomentConstraint,
    MomentFunction, Support,
};
use crate::quantum::{measure_projective, random_density_matrix, OrthonormalBasis};
use crate::reur::{
    evaluate_birula, evaluate_frank_lieb, evaluate_maassen_uffink, evaluate_reur_discrete,
    evaluate_reur_relative_only, evaluate_robertson, robertson_strengthened, Preset,
    ReurReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const DEFAULT_INSTANCES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_PHASE_WIDTH: f64 = 4.0;
pub const DEFAULT_J_VALUES: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "reur", version, about = "Relative entropic uncertainty relations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random-instance check of the discrete relations.
    Verify(VerifyArgs),
    /// Position/momentum relations for preset states.
    Continuous(ContinuousArgs),
    /// Angle/angular-momentum continuum sweep.
    Angular(AngularArgs),
    /// Fit a maximum-entropy model to a histogram or density file.
    MaxentFit(MaxentFitArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Satisfaction tolerance override.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Total number of random instances; dimensions are cycled.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Inclusive range `2..8` or list `2,3,5`.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long, value_enum)]
    pub models: Option<ModelsArg>,
    /// Negate the S(rho) term in every report (negative control).
    #[arg(long)]
    pub inject_bug: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContinuousArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Presets: gaussian, squeezed(A), hermite-N, gaussian-superposition, thermal(B).
    #[arg(long = "preset", value_delimiter = ';')]
    pub presets: Vec<String>,
    /// Power-of-two grid size.
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AngularArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Width `s` of the phase family, amplitudes `exp(-m²/(4s²))`.
    #[arg(long)]
    pub width: Option<f64>,
    /// Comma-separated J values (half-integers allowed).
    #[arg(long)]
    pub j_values: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MaxentFitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Histogram CSV (`outcome,weight`) or density JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FitFamily>,
    /// Power moments for the `moments` family, e.g. `1,2`.
    #[arg(long)]
    pub moments: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelsArg {
    Uniform,
    Boltzmann,
    Moments,
}

impl From<ModelsArg> for DiscreteFamily {
    fn from(m: ModelsArg) -> Self {
        match m {
            ModelsArg::Uniform => DiscreteFamily::Uniform,
            ModelsArg::Boltzmann => DiscreteFamily::Boltzmann,
            ModelsArg::Moments => DiscreteFamily::Moments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Phase,
    MaximallyMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFamily {
    Uniform,
    Boltzmann,
    Moments,
    Gaussian,
    VonMises,
}

/// Settings file. Every field is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub instances: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub models: Option<ModelsArg>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub inject_bug: Option<bool>,
    pub presets: Option<Vec<String>>,
    pub grid_points: Option<usize>,
    pub family: Option<FamilyArg>,
    pub width: Option<f64>,
    pub j_values: Option<Vec<f64>>,
    pub input: Option<PathBuf>,
    pub fit_family: Option<FitFamily>,
    pub moments: Option<Vec<u32>>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Violation(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Violation(_) => EXIT_VIOLATION,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

/// Library errors caused by bad input data are configuration errors;
/// everything else means the run could not establish the property.
fn classify(e: Error) -> Failure {
    match e {
        Error::Io(_)
        | Error::Parse(_)
        | Error::InvalidDistribution(_)
        | Error::InvalidDensity(_)
        | Error::Infeasible(_)
        | Error::UnsupportedFamily(_)
        | Error::IncompatibleSupport(_)
        | Error::InvalidParameter(_)
        | Error::TooFewPoints { .. }
        | Error::DegenerateLabels => Failure::Config(e.to_string()),
        other => Failure::Violation(other.to_string()),
    }
}

fn load_config(common: &CommonArgs, command: &str) -> Result<ExperimentConfig, Failure> {
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = &cfg.command {
        if c != command {
            return Err(config_err(format!(
                "config is for '{c}', not '{command}'"
            )));
        }
    }
    Ok(cfg)
}

fn tolerance(common: &CommonArgs, cfg: &ExperimentConfig) -> Result<Option<f64>, Failure> {
    match common.tolerance.or(cfg.tolerance) {
        Some(t) if !(t > 0.0) || !t.is_finite() => {
            Err(config_err(format!("tolerance must be positive, got {t}")))
        }
        t => Ok(t),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| config_err(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn serialize<T: Serialize>(value: &T) -> Result<String, Failure> {
    to_string(value).map_err(|e| Failure::Violation(e.to_string()))
}

/// Parses `2..8` (inclusive) or `2,3,5`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || config_err(format!("bad --dims '{s}'"));
    let dims: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    validate_dims(&dims)?;
    Ok(dims)
}

fn validate_dims(dims: &[usize]) -> Result<(), Failure> {
    if dims.is_empty() || dims.iter().any(|&d| !(2..=64).contains(&d)) {
        return Err(config_err(format!("dimensions must lie in 2..=64, got {dims:?}")));
    }
    Ok(())
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| config_err(format!("bad {what} '{s}'"))))
        .collect()
}

/// One random (state, basis pair) instance and its three reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub seed: u64,
    pub dim: usize,
    pub rank: usize,
    pub reports: Vec<ReurReport>,
    pub violations: Vec<String>,
}

/// Settings of a `verify` run after merging file and flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySettings {
    pub seed: u64,
    pub instances: usize,
    pub dims: Vec<usize>,
    pub models: DiscreteFamily,
    pub tolerance: Option<f64>,
    pub inject_bug: bool,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            instances: DEFAULT_INSTANCES,
            dims: (2..=8).collect(),
            models: DiscreteFamily::Uniform,
            tolerance: None,
            inject_bug: false,
        }
    }
}

/// Builds and evaluates instance `index`: seed `seed + index`, dimension
/// cycled through `dims`.
pub fn verify_instance(settings: &VerifySettings, index: usize) -> InstanceOutcome {
    let seed = settings.seed.wrapping_add(index as u64);
    let dim = settings.dims[index % settings.dims.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.random_range(1..=dim);
    let mut outcome = InstanceOutcome {
        index,
        seed,
        dim,
        rank,
        reports: Vec::new(),
        violations: Vec::new(),
    };
    match evaluate_instance(settings, dim, rank, &mut rng) {
        Ok(reports) => {
            outcome.violations = audit(&reports);
            outcome.reports = reports
                .into_iter()
                .map(|r| {
                    let mut fp = r.fingerprint.clone();
                    fp.seed = Some(seed);
                    r.with_fingerprint(fp)
                })
                .collect();
        }
        Err(e) => outcome.violations.push(format!("evaluation failed: {e}")),
    }
    outcome
}

fn evaluate_instance(
    settings: &VerifySettings,
    dim: usize,
    rank: usize,
    rng: &mut ChaCha8Rng,
) -> crate::Result<Vec<ReurReport>> {
    let rho = random_density_matrix(dim, rank, rng.random())?;
    let a = OrthonormalBasis::random(dim, rng.random())?;
    let b = OrthonormalBasis::random(dim, rng.random())?;
    let model_p = settings.models.fit_to(&measure_projective(&rho, &a)?)?;
    let model_q = settings.models.fit_to(&measure_projective(&rho, &b)?)?;
    let mut reports = vec![
        evaluate_maassen_uffink(&rho, &a, &b)?,
        evaluate_reur_discrete(&rho, &a, &b, &model_p, &model_q)?,
        evaluate_reur_relative_only(&rho, &a, &b, &model_p, &model_q)?,
    ];
    if settings.inject_bug {
        reports[0] = reports[0].clone().with_negated_rhs_term("S(rho)");
        reports[1] = reports[1].clone().with_negated_rhs_term("-S(rho)");
    }
    if let Some(t) = settings.tolerance {
        reports = reports.into_iter().map(|r| r.with_tolerance(t)).collect();
    }
    Ok(reports)
}

/// Checks every invariant that ties the three reports together.
fn audit(reports: &[ReurReport]) -> Vec<String> {
    let [mu, discrete, relative] = reports else {
        return vec!["expected three reports".into()];
    };
    let mut v = Vec::new();
    for r in reports {
        if !r.satisfied {
            v.push(format!("{:?} violated: gap {}", r.relation_id, r.gap));
        }
    }
    for r in [discrete, relative] {
        if r.lhs < -1e-12 {
            v.push(format!("{:?}: negative lhs {}", r.relation_id, r.lhs));
        }
        if let Some(t) = r.trivial_bound {
            if r.rhs > t + 1e-12 {
                v.push(format!(
                    "{:?}: rhs {} exceeds trivial bound {}",
                    r.relation_id, r.rhs, t
                ));
            }
        }
    }
    if (relative.rhs - discrete.rhs).abs() > discrete.tolerance {
        v.push(format!(
            "relative-entropy form rhs {} differs from {}",
            relative.rhs, discrete.rhs
        ));
    }
    if let Some(lncd) = relative.rhs_term("ln(cd)") {
        if lncd < -1e-12 {
            v.push(format!("ln(cd) = {lncd} < 0"));
        }
    }
    if mu.satisfied != discrete.satisfied {
        v.push("Maassen-Uffink and relative-entropy verdicts disagree".into());
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstGap {
    pub relation_id: crate::reur::RelationId,
    pub gap: f64,
    pub instance: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub command: &'static str,
    pub settings: VerifySettings,
    pub all_satisfied: bool,
    pub violation_count: usize,
    pub worst_gap: Option<WorstGap>,
    /// Instances with at least one violation, for replay with
    /// `--seed <seed> --instances 1 --dims <dim>`.
    pub violations: Vec<Violation>,
    pub instances: Vec<InstanceOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub instance: usize,
    pub seed: u64,
    pub dim: usize,
    pub checks: Vec<String>,
}

pub fn run_verify_settings(settings: &VerifySettings) -> VerifySummary {
    let instances: Vec<InstanceOutcome> = (0..settings.instances)
        .into_par_iter()
        .map(|i| verify_instance(settings, i))
        .collect();
    let violations: Vec<Violation> = instances
        .iter()
        .filter(|o| !o.violations.is_empty())
        .map(|o| Violation {
            instance: o.index,
            seed: o.seed,
            dim: o.dim,
            checks: o.violations.clone(),
        })
        .collect();
    let worst_gap = instances
        .iter()
        .flat_map(|o| o.reports.iter().map(move |r| (o, r)))
        .min_by(|a, b| a.1.gap.total_cmp(&b.1.gap))
        .map(|(o, r)| WorstGap {
            relation_id: r.relation_id,
            gap: r.gap,
            instance: o.index,
            seed: o.seed,
        });
    VerifySummary {
        command: "verify",
        settings: settings.clone(),
        all_satisfied: violations.is_empty(),
        violation_count: violations.len(),
        worst_gap,
        violations,
        instances,
    }
}

fn verify_csv(summary: &VerifySummary) -> String {
    let mut s = String::from("instance,seed,dim,relation,lhs,rhs,gap,satisfied,c,trivial_bound\n");
    for o in &summary.instances {
        for r in &o.reports {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                o.index,
                o.seed,
                o.dim,
                relation_name(r),
                format_f64(r.lhs),
                format_f64(r.rhs),
                format_f64(r.gap),
                r.satisfied,
                format_f64(r.c),
                r.trivial_bound.map(format_f64).unwrap_or_default()
            );
        }
    }
    s
}

fn relation_name(r: &ReurReport) -> String {
    serde_json::to_value(r.relation_id)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common, "verify")?;
    let mut settings = VerifySettings::default();
    if let Some(seed) = args.common.seed.or(cfg.seed) {
        settings.seed = seed;
    }
    if let Some(n) = args.instances.or(cfg.instances) {
        if !(1..=1_000_000).contains(&n) {
            return Err(config_err(format!("instances must lie in 1..=1000000, got {n}")));
        }
        settings.instances = n;
    }
    if let Some(d) = &args.dims {
        settings.dims = parse_dims(d)?;
    } else if let Some(d) = &cfg.dims {
        validate_dims(d)?;
        settings.dims = d.clone();
    }
    if let Some(m) = args.models.or(cfg.models) {
        settings.models = m.into();
    }
    settings.tolerance = tolerance(&args.common, &cfg)?;
    settings.inject_bug = args.inject_bug || cfg.inject_bug.unwrap_or(false);
    let format = args.common.format.or(cfg.format).unwrap_or(Format::Json);
    let out = args.common.out.clone().or(cfg.out.clone());

    let summary = run_verify_settings(&settings);
    let text = match format {
        Format::Json => serialize(&summary)?,
        Format::Csv => verify_csv(&summary),
    };
    write_output(out.as_deref(), &text)?;
    if summary.all_satisfied {
        Ok(())
    } else {
        let first = &summary.violations[0];
        Err(Failure::Violation(format!(
            "{} of {} instances violated; first: instance {} (seed {}, dim {}): {}",
            summary.violation_count,
            settings.instances,
            first.instance,
            first.seed,
            first.dim,
            first.checks.join("; ")
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetOutcome {
    pub preset: String,
    pub pure: bool,
    pub s_rho: f64,
    pub sigma_x: f64,
    pub sigma_k: f64,
    pub sigma_product: f64,
    pub strengthened_bound: f64,
    pub robertson_bound: f64,
    pub reports: Vec<ReurReport>,
}

pub fn evaluate_preset(
    preset: Preset,
    grid_points: usize,
    tolerance: Option<f64>,
) -> crate::Result<PresetOutcome> {
    let (f, g, s_rho) = preset.densities(grid_points)?;
    let mut reports = Vec::new();
    if preset.is_pure() {
        reports.push(evaluate_birula(&f, &g)?);
    }
    reports.push(evaluate_frank_lieb(&f, &g, s_rho)?);
    reports.push(evaluate_robertson(&f, &g)?);
    if let Some(t) = tolerance {
        reports = reports.into_iter().map(|r| r.with_tolerance(t)).collect();
    }
    let b = robertson_strengthened(&f, &g)?;
    Ok(PresetOutcome {
        preset: preset.to_string(),
        pure: preset.is_pure(),
        s_rho,
        sigma_x: b.sigma_x,
        sigma_k: b.sigma_k,
        sigma_product: b.sigma_product,
        strengthened_bound: b.strengthened_bound,
        robertson_bound: b.robertson_bound,
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousSummary {
    pub command: &'static str,
    pub grid_points: usize,
    pub all_satisfied: bool,
    pub presets: Vec<PresetOutcome>,
}

fn continuous_csv(summary: &ContinuousSummary) -> String {
    let mut s = String::from(
        "preset,relation,lhs,rhs,gap,satisfied,S_rho,sigma_x,sigma_k,strengthened_bound\n",
    );
    for p in &summary.presets {
        for r in &p.reports {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                p.preset,
                relation_name(r),
                format_f64(r.lhs),
                format_f64(r.rhs),
                format_f64(r.gap),
                r.satisfied,
                format_f64(p.s_rho),
                format_f64(p.sigma_x),
                format_f64(p.sigma_k),
                format_f64(p.strengthened_bound)
            );
        }
    }
    s
}

pub const DEFAULT_PRESETS: [&str; 5] = [
    "gaussian",
    "squeezed(4)",
    "hermite-1",
    "gaussian-superposition",
    "thermal(1)",
];

pub fn cmd_continuous(args: &ContinuousArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common, "continuous")?;
    let names: Vec<String> = if !args.presets.is_empty() {
        args.presets.clone()
    } else if let Some(p) = &cfg.presets {
        p.clone()
    } else {
        DEFAULT_PRESETS.iter().map(|s| s.to_string()).collect()
    };
    let presets = names
        .iter()
        .map(|n| n.parse::<Preset>().map_err(|e| config_err(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let grid_points = args.grid_points.or(cfg.grid_points).unwrap_or(DEFAULT_GRID_POINTS);
    if !grid_points.is_power_of_two() || !(64..=1 << 20).contains(&grid_points) {
        return Err(config_err(format!(
            "grid points must be a power of two in 64..=2^20, got {grid_points}"
        )));
    }
    let tol = tolerance(&args.common, &cfg)?;
    let format = args.common.format.or(cfg.format).unwrap_or(Format::Json);
    let out = args.common.out.clone().or(cfg.out.clone());

    let outcomes = presets
        .par_iter()
        .map(|&p| evaluate_preset(p, grid_points, tol))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| Failure::Violation(e.to_string()))?;
    let all_satisfied = outcomes.iter().all(|o| {
        o.reports.iter().all(|r| r.satisfied)
            && o.sigma_product >= o.strengthened_bound - crate::reur::CONTINUOUS_TOL
    });
    let summary = ContinuousSummary {
        command: "continuous",
        grid_points,
        all_satisfied,
        presets: outcomes,
    };
    let text = match format {
        Format::Json => serialize(&summary)?,
        Format::Csv => continuous_csv(&summary),
    };
    write_output(out.as_deref(), &text)?;
    if all_satisfied {
        Ok(())
    } else {
        Err(Failure::Violation("a continuous relation was violated".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularSummary {
    pub command: &'static str,
    pub family: String,
    pub grid_points: usize,
    pub all_satisfied: bool,
    pub rows: Vec<SweepRow>,
}

fn angular_csv(summary: &AngularSummary) -> String {
    let mut s = String::from(
        "J,mode,c,S_rho,lhs,rhs,gap,satisfied,corrected_discrete_entropy,continuous_entropy,lhs_difference,completeness_residual\n",
    );
    for row in &summary.rows {
        let j = AngularSystem::new(row.two_j).j();
        for (mode, r) in [("discrete_pvm", &row.discrete), ("continuous_povm", &row.continuous)] {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                j,
                mode,
                format_f64(r.c),
                format_f64(-r.rhs_term("-S(rho)").unwrap_or(f64::NAN)),
                format_f64(r.lhs),
                format_f64(r.rhs),
                format_f64(r.gap),
                r.satisfied,
                format_f64(row.corrected_discrete_entropy),
                format_f64(row.continuous_entropy),
                format_f64(row.lhs_difference),
                format_f64(row.completeness_residual)
            );
        }
    }
    s
}

pub fn cmd_angular(args: &AngularArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common, "angular")?;
    let family_arg = args.family.or(cfg.family).unwrap_or(FamilyArg::Phase);
    let family = match family_arg {
        FamilyArg::Phase => {
            let width = args.width.or(cfg.width).unwrap_or(DEFAULT_PHASE_WIDTH);
            if !(width > 0.0) || !width.is_finite() {
                return Err(config_err(format!("width must be positive, got {width}")));
            }
            StateFamily::Phase { width }
        }
        FamilyArg::MaximallyMixed => StateFamily::MaximallyMixed,
    };
    let j_values: Vec<f64> = match (&args.j_values, &cfg.j_values) {
        (Some(s), _) => parse_list(s, "J values")?,
        (None, Some(v)) => v.clone(),
        (None, None) => DEFAULT_J_VALUES.to_vec(),
    };
    let mut two_js = Vec::with_capacity(j_values.len());
    for j in &j_values {
        let two = 2.0 * j;
        if !(0.0..=512.0).contains(&two) || two.fract() != 0.0 {
            return Err(config_err(format!("J must be a half-integer in 0..=256, got {j}")));
        }
        two_js.push(two as u32);
    }
    if two_js.is_empty() {
        return Err(config_err("no J values"));
    }
    let grid_points = args.grid_points.or(cfg.grid_points).unwrap_or(DEFAULT_GRID_POINTS);
    let needed = two_js.iter().max().map(|t| *t as usize + 2).unwrap_or(2);
    if grid_points < needed || grid_points > 1 << 20 {
        return Err(config_err(format!(
            "grid points must lie in {needed}..=2^20, got {grid_points}"
        )));
    }
    let format = args.common.format.or(cfg.format).unwrap_or(Format::Csv);
    let out = args.common.out.clone().or(cfg.out.clone());

    let mut rows = continuum_sweep(family, &two_js, grid_points).map_err(classify)?;
    if let Some(t) = tolerance(&args.common, &cfg)? {
        for row in rows.iter_mut() {
            row.discrete = row.discrete.clone().with_tolerance(t);
            row.continuous = row.continuous.clone().with_tolerance(t);
        }
    }
    let all_satisfied = rows.iter().all(|r| {
        r.discrete.satisfied && r.continuous.satisfied && r.completeness_residual <= COMPLETENESS_TOL
    });
    let summary = AngularSummary {
        command: "angular",
        family: family.name(),
        grid_points,
        all_satisfied,
        rows,
    };
    match format {
        Format::Json => write_output(out.as_deref(), &serialize(&summary)?)?,
        Format::Csv => {
            write_output(out.as_deref(), &angular_csv(&summary))?;
            if let Some(path) = &out {
                write_output(Some(&path.with_extension("json")), &serialize(&summary)?)?;
            }
        }
    }
    if all_satisfied {
        Ok(())
    } else {
        Err(Failure::Violation("an angular relation or completeness check failed".into()))
    }
}

enum FitInput {
    Histogram(DiscreteDistribution),
    Density(GriddedDensity),
}

fn read_fit_input(path: &Path) -> Result<FitInput, Failure> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let read = if is_json {
        GriddedDensity::from_json_path(path).map(FitInput::Density)
    } else {
        DiscreteDistribution::from_csv_path(path).map(FitInput::Histogram)
    };
    read.map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// Fits `family` to the data; the default is Boltzmann for histograms,
/// Gaussian for line densities and von Mises for circle densities.
pub fn fit_input(
    data: &FitInputRef<'_>,
    family: Option<FitFamily>,
    powers: &[u32],
) -> crate::Result<MaxEntModel> {
    match *data {
        FitInputRef::Histogram(p) => match family.unwrap_or(FitFamily::Boltzmann) {
            FitFamily::Uniform => fit_uniform(Support::Outcomes {
                outcomes: p.outcomes().to_vec(),
            }),
            FitFamily::Boltzmann => fit_boltzmann(p.outcomes(), p.mean()),
            FitFamily::Moments => {
                let constraints: Vec<MomentConstraint> = powers
                    .iter()
                    .map(|&k| MomentConstraint::matching(MomentFunction::Power(k), p))
                    .collect();
                fit_general_moments(p.outcomes(), &constraints)
            }
            FitFamily::Gaussian => {
                let mean = p.mean();
                fit_gaussian(mean, p.expectation(|x| (x - mean).powi(2)))
            }
            FitFamily::VonMises => fit_von_mises(p.circular_moment()),
        },
        FitInputRef::Density(f) => {
            let default = match f.topology() {
                Topology::Line => FitFamily::Gaussian,
                Topology::Circle => FitFamily::VonMises,
            };
            match (family.unwrap_or(default), f.topology()) {
                (FitFamily::Gaussian, Topology::Line) => fit_gaussian_to(f),
                (FitFamily::Uniform, Topology::Line) => {
                    let (lo, hi) = f.grid().extent();
                    fit_uniform(Support::Interval { lo, hi })
                }
                (FitFamily::Uniform, Topology::Circle) => fit_uniform(Support::Circle {
                    circumference: f.grid().period().unwrap_or(f.grid().extent().1),
                }),
                (FitFamily::VonMises, Topology::Circle) => {
                    let period = f.grid().period().expect("circle grid has a period");
                    fit_von_mises_on(f.circular_moment()?, period)
                }
                (fam, top) => Err(Error::UnsupportedFamily(format!(
                    "{fam:?} on a {top:?} density"
                ))),
            }
        }
    }
}

/// Borrowed fitting input.
pub enum FitInputRef<'a> {
    Histogram(&'a DiscreteDistribution),
    Density(&'a GriddedDensity),
}

pub fn cmd_maxent_fit(args: &MaxentFitArgs) -> Result<(), Failure> {
    let cfg = load_config(&args.common, "maxent-fit")?;
    let input = args
        .input
        .clone()
        .or(cfg.input.clone())
        .ok_or_else(|| config_err("--input is required"))?;
    let family = args.family.or(cfg.fit_family);
    let powers: Vec<u32> = match (&args.moments, &cfg.moments) {
        (Some(s), _) => parse_list(s, "moments")?,
        (None, Some(v)) => v.clone(),
        (None, None) => vec![1, 2],
    };
    if powers.is_empty() || powers.iter().any(|&k| k == 0) {
        return Err(config_err("moment powers must be positive"));
    }
    if args.common.format.or(cfg.format) == Some(Format::Csv) {
        return Err(config_err("maxent-fit writes JSON only"));
    }
    let out = args.common.out.clone().or(cfg.out.clone());
    let data = read_fit_input(&input)?;
    let borrowed = match &data {
        FitInput::Histogram(p) => FitInputRef::Histogram(p),
        FitInput::Density(f) => FitInputRef::Density(f),
    };
    let model = fit_input(&borrowed, family, &powers).map_err(classify)?;
    write_output(out.as_deref(), &serialize(&model)?)
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Continuous(a) => cmd_continuous(a),
        Command::Angular(a) => cmd_angular(a),
        Command::MaxentFit(a) => cmd_maxent_fit(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            match &failure {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Violation(m) => eprintln!("violation: {m}"),
            }
            failure.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reur::Fingerprint;

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("2..4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_dims("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_dims("3, 5").unwrap(), vec![3, 5]);
        assert!(parse_dims("1..3").is_err());
        assert!(parse_dims("5..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn instance_is_deterministic() {
        let s = VerifySettings {
            instances: 3,
            ..VerifySettings::default()
        };
        assert_eq!(verify_instance(&s, 2), verify_instance(&s, 2));
        let o = verify_instance(&s, 2);
        assert_eq!(o.seed, 2);
        assert_eq!(o.dim, 4);
        assert!(o.violations.is_empty(), "{:?}", o.violations);
        assert_eq!(o.reports[1].fingerprint.seed, Some(2));
    }

    #[test]
    fn replay_of_one_instance() {
        let s = VerifySettings {
            seed: 7,
            instances: 10,
            ..VerifySettings::default()
        };
        let full = run_verify_settings(&s);
        let o = &full.instances[6];
        let replay = VerifySettings {
            seed: o.seed,
            instances: 1,
            dims: vec![o.dim],
            ..VerifySettings::default()
        };
        let again = verify_instance(&replay, 0);
        assert_eq!(again.reports, o.reports);
    }

    #[test]
    fn injected_bug_is_caught() {
        let s = VerifySettings {
            instances: 20,
            inject_bug: true,
            ..VerifySettings::default()
        };
        let summary = run_verify_settings(&s);
        assert!(!summary.all_satisfied);
    }

    #[test]
    fn all_model_families_pass() {
        for models in [DiscreteFamily::Uniform, DiscreteFamily::Boltzmann, DiscreteFamily::Moments] {
            let s = VerifySettings {
                instances: 28,
                models,
                ..VerifySettings::default()
            };
            let summary = run_verify_settings(&s);
            assert!(summary.all_satisfied, "{models:?}: {:?}", summary.violations);
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"seed": 1, "sede": 2}"#);
        assert!(err.is_err());
        let ok: ExperimentConfig = serde_json::from_str(r#"{"seed": 1, "dims": [2, 3]}"#).unwrap();
        assert_eq!(ok.dims, Some(vec![2, 3]));
    }

    #[test]
    fn fit_input_defaults() {
        let p = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.7310585786300049, 0.2689414213699951]).unwrap();
        let model = fit_input(&FitInputRef::Histogram(&p), None, &[1, 2]).unwrap();
        let crate::maxent::Family::Boltzmann { gamma, .. } = model.family else {
            panic!()
        };
        assert!((gamma - 1.0).abs() < 1e-6);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["reur", "bogus"]), EXIT_CONFIG);
        assert_eq!(run(["reur", "verify", "--dims", "0..3"]), EXIT_CONFIG);
        assert_eq!(run(["reur", "verify", "--tolerance", "-1"]), EXIT_CONFIG);
        assert_eq!(run(["reur", "maxent-fit"]), EXIT_CONFIG);
        assert_eq!(run(["reur", "continuous", "--preset", "nonsense"]), EXIT_CONFIG);
        assert_eq!(run(["reur", "--help"]), EXIT_OK);
    }

    #[test]
    fn fingerprint_defaults_are_omitted() {
        let v = serde_json::to_value(Fingerprint::default()).unwrap();
        assert_eq!(v, serde_json::json!({}));
    }
}
