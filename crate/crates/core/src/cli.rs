//! Scenario runner behind the `beltrami` binary.
//!
//! Scenarios are TOML files with `schema = 1`. Every subcommand writes its
//! artifacts into the output directory and exits with 0 on success, 2 on a
//! configuration error, 3 on a numerical failure and 4 on an I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    classify, equicontinuity_bound, inverse_poletsky_check, Annulus, ClassifyOptions, Eta,
    SampledWeight, Weight,
};
use crate::coefficients::{effective_mu, joint_dilatation, truncate, CoefficientField, TruncationLevel};
use crate::dilatation::{change_of_variables_check, check_exponent, dilatation_report, k_mu_g};
use crate::error::{Error, Result};
use crate::grid::{wirtinger_at, ComplexField, GridSpec, Meaning, Region};
use crate::io;
use crate::oracle::{f_k_example, g_k_example, mu_k_example, q_example, ExampleParams};
use crate::solver::{
    far_field_profile, invert_on_grid, solve_principal, solve_truncated, PrincipalSolution, SampledMap,
    SolverSettings,
};
use crate::transforms::TransformPlan;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "beltrami", version, about = "Beltrami equations with two characteristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML, schema = 1).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `out` in the scenario.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized diagnostics; overrides `seed` in the scenario.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Solve the truncation ladder and dump per-level solutions.
    Solve,
    /// Compare solutions, inverses and dilatations with the closed-form family.
    VerifyOracle,
    /// Classify a weight Q as normal / compact.
    Classify,
    /// Dilatation, change-of-variables, modulus and equicontinuity diagnostics.
    Diagnose,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub center: [f64; 2],
    pub halfwidth: f64,
    pub resolution: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientSource {
    Example1 { alpha: f64 },
    File { path: PathBuf },
    Zero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightSource {
    Example1 { alpha: f64 },
    Constant { value: f64 },
    /// `x,y,q` CSV on the `[weight.grid]` grid.
    File { path: PathBuf, grid: GridConfig },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol_inv")]
    pub tol_inv: f64,
}

fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    2000
}
fn default_tol_inv() -> f64 {
    1e-10
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
            tol_inv: default_tol_inv(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub poletsky: bool,
    #[serde(default)]
    pub equicontinuity: bool,
    #[serde(default)]
    pub classify: bool,
    #[serde(default)]
    pub far_field_radii: Vec<f64>,
    /// Window on which Cauchy gaps and oracle errors are measured.
    #[serde(default = "default_gap_window")]
    pub gap_window: Region,
    /// Region `C` for dilatation integrals and the change of variables.
    #[serde(default = "default_integration_region")]
    pub region: Region,
    /// `[center_re, center_im, r1, r2]` per annulus.
    #[serde(default)]
    pub annuli: Vec<[f64; 4]>,
    #[serde(default = "default_capacity_resolution")]
    pub capacity_resolution: usize,
    #[serde(default = "default_probes")]
    pub probes: Vec<[f64; 2]>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_scan_range")]
    pub scan_range: [f64; 2],
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_compact")]
    pub compact: Region,
    #[serde(default = "default_domain")]
    pub domain: Region,
}

fn default_gap_window() -> Region {
    Region::disk(Complex64::new(0.0, 0.0), 1.2)
}
fn default_integration_region() -> Region {
    Region::disk(Complex64::new(0.0, 0.0), 0.95)
}
fn default_capacity_resolution() -> usize {
    512
}
fn default_probes() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0]]
}
fn default_delta() -> f64 {
    0.5
}
fn default_scan_range() -> [f64; 2] {
    [0.0, 1.0]
}
fn default_pairs() -> usize {
    10_000
}
fn default_compact() -> Region {
    Region::disk(Complex64::new(0.0, 0.0), 0.6)
}
fn default_domain() -> Region {
    Region::disk(Complex64::new(0.0, 0.0), 1.0)
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        toml::from_str("").expect("all analysis fields have defaults")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleThresholds {
    #[serde(default = "default_f_sup")]
    pub f_sup: f64,
    #[serde(default = "default_f_median")]
    pub f_median: f64,
    #[serde(default = "default_g_sup")]
    pub g_sup: f64,
    #[serde(default = "default_k_rel")]
    pub k_rel: f64,
}

fn default_f_sup() -> f64 {
    0.05
}
fn default_f_median() -> f64 {
    0.01
}
fn default_g_sup() -> f64 {
    0.05
}
fn default_k_rel() -> f64 {
    0.05
}

impl Default for OracleThresholds {
    fn default() -> Self {
        toml::from_str("").expect("all thresholds have defaults")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub grid: GridConfig,
    pub coefficient: Option<CoefficientSource>,
    #[serde(default)]
    pub levels: Vec<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub weight: Option<WeightSource>,
    #[serde(default)]
    pub oracle: OracleThresholds,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_p() -> f64 {
    2.0
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        self.grid_spec()?;
        if self.levels.windows(2).any(|w| w[0] >= w[1]) || self.levels.contains(&0) {
            return Err(config_err("levels must be positive and strictly increasing"));
        }
        check_exponent(self.p).map_err(|e| config_err(e.to_string()))?;
        if !(self.solver.tol > 0.0) || !(self.solver.tol_inv > 0.0) || self.solver.max_iter == 0 {
            return Err(config_err("solver needs tol > 0, tol_inv > 0 and max_iter >= 1"));
        }
        if let Some(CoefficientSource::Example1 { alpha }) = &self.coefficient {
            if !(*alpha > 0.0 && *alpha < 2.0) {
                return Err(config_err("alpha must lie in (0, 2)"));
            }
        }
        for a in &self.analysis.annuli {
            Annulus::new(Complex64::new(a[0], a[1]), a[2], a[3]).map_err(|e| config_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        grid_from(&self.grid)
    }

    fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
        }
    }

    fn coefficient_field(&self, base: &Path) -> Result<CoefficientField> {
        let spec = self.grid_spec()?;
        match self.coefficient.as_ref().ok_or_else(|| config_err("missing [coefficient]"))? {
            CoefficientSource::Example1 { alpha } => {
                let alpha = *alpha;
                // Level-independent sample; truncation happens per level.
                CoefficientField::from_fns(
                    spec,
                    |z| crate::oracle::mu_example(z, alpha),
                    |_| Complex64::new(0.0, 0.0),
                )
            }
            CoefficientSource::File { path } => io::read_coefficients(&base.join(path), &spec),
            CoefficientSource::Zero => Ok(CoefficientField::zero(spec)),
        }
    }

    fn example_alpha(&self) -> Option<f64> {
        match self.coefficient {
            Some(CoefficientSource::Example1 { alpha }) => Some(alpha),
            _ => None,
        }
    }

    fn weight(&self, base: &Path) -> Result<Box<dyn Weight>> {
        let source = match (&self.weight, self.example_alpha()) {
            (Some(w), _) => w.clone(),
            (None, Some(alpha)) => WeightSource::Example1 { alpha },
            (None, None) => return Err(config_err("missing [weight]")),
        };
        Ok(match source {
            WeightSource::Example1 { alpha } => Box::new(move |y: Complex64| q_example(y, alpha)),
            WeightSource::Constant { value } => {
                if !(value >= 0.0) {
                    return Err(config_err("weight must be nonnegative"));
                }
                Box::new(move |_: Complex64| value)
            }
            WeightSource::File { path, grid } => {
                let spec = grid_from(&grid)?;
                Box::new(SampledWeight::new(io::read_weight(&base.join(path), &spec)?)?)
            }
        })
    }
}

fn grid_from(g: &GridConfig) -> Result<GridSpec> {
    GridSpec::new(Complex64::new(g.center[0], g.center[1]), g.halfwidth, g.resolution)
        .map_err(|e| config_err(e.to_string()))
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Parse { .. } => 2,
        Error::Io(_) | Error::Json(_) => 4,
        Error::AtLevel { source, .. } => exit_code(source),
        Error::SamplingFailure { .. }
        | Error::SupportOverflow
        | Error::Divergence { .. }
        | Error::NoConvergence { .. }
        | Error::Degenerate => 3,
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Context {
    cfg: ScenarioConfig,
    base: PathBuf,
    out: PathBuf,
    seed: u64,
}

pub fn run(cli: &Cli) -> Result<i32> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| config_err("--config <path> is required"))?;
    let text = fs::read_to_string(path)?;
    let cfg = ScenarioConfig::parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(|o| base.join(o)))
        .ok_or_else(|| config_err("no output directory (use --out or `out`)"))?;
    fs::create_dir_all(&out)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    let ctx = Context { cfg, base, out, seed };
    match cli.command {
        Command::Solve => cmd_solve(&ctx),
        Command::VerifyOracle => cmd_verify_oracle(&ctx),
        Command::Classify => cmd_classify(&ctx),
        Command::Diagnose => cmd_diagnose(&ctx),
    }
}

#[derive(Serialize)]
struct LevelDiagnostics {
    level: Option<usize>,
    iterations: usize,
    residual: f64,
    cauchy_gap_prev: Option<f64>,
    flagged_nodes: usize,
}

#[derive(Serialize)]
struct LadderReport {
    levels: Vec<Option<usize>>,
    cauchy_gaps: Vec<f64>,
    residuals: Vec<f64>,
    iterations: Vec<usize>,
    far_field_exponent: Option<f64>,
}

#[derive(Serialize)]
struct FailureManifest {
    level: Option<usize>,
    error: String,
    completed_levels: Vec<Option<usize>>,
}

fn level_name(level: Option<usize>) -> String {
    level.map_or_else(|| "untruncated".to_string(), |n| format!("level_{n}"))
}

/// Solves every configured level (or the untruncated coefficient when no
/// levels are given), calling `each` after each success. On failure a
/// manifest is written and the error returned.
fn solve_levels<F>(ctx: &Context, mut each: F) -> Result<Vec<(Option<usize>, PrincipalSolution)>>
where
    F: FnMut(Option<usize>, &PrincipalSolution, Option<f64>) -> Result<()>,
{
    let cfg = &ctx.cfg;
    let coeff = cfg.coefficient_field(&ctx.base)?;
    let plan = TransformPlan::new(*coeff.spec());
    let levels: Vec<Option<usize>> = if cfg.levels.is_empty() {
        vec![None]
    } else {
        cfg.levels.iter().map(|&n| Some(n)).collect()
    };
    let mut done: Vec<(Option<usize>, PrincipalSolution)> = Vec::new();
    for level in levels {
        let result = match level {
            Some(n) => solve_truncated(&coeff, TruncationLevel::new(n)?, &plan, cfg.solver_settings()),
            None => solve_principal(&coeff, &plan, cfg.solver_settings()),
        };
        let sol = match result {
            Ok(s) => s,
            Err(e) => {
                io::write_json(
                    &ctx.out.join("failure.json"),
                    &FailureManifest {
                        level,
                        error: e.to_string(),
                        completed_levels: done.iter().map(|d| d.0).collect(),
                    },
                )?;
                return Err(match level {
                    Some(n) => Error::AtLevel {
                        level: n,
                        source: Box::new(e),
                    },
                    None => e,
                });
            }
        };
        let gap = match done.last() {
            Some((_, prev)) => Some(sol.map.sup_distance(&prev.map, &cfg.analysis.gap_window)?),
            None => None,
        };
        each(level, &sol, gap)?;
        done.push((level, sol));
    }
    Ok(done)
}

fn cmd_solve(ctx: &Context) -> Result<i32> {
    let mut gaps = Vec::new();
    let solutions = solve_levels(ctx, |level, sol, gap| {
        let name = level_name(level);
        io::write_field(&ctx.out.join(format!("{name}.csv")), sol.map.displacement())?;
        io::write_json(
            &ctx.out.join(format!("{name}_diagnostics.json")),
            &LevelDiagnostics {
                level,
                iterations: sol.diagnostics.iterations,
                residual: sol.diagnostics.residual,
                cauchy_gap_prev: gap,
                flagged_nodes: sol.diagnostics.flagged_nodes,
            },
        )?;
        if let Some(g) = gap {
            gaps.push(g);
        }
        Ok(())
    })?;
    let limit = &solutions.last().expect("at least one level").1.map;
    let radii = &ctx.cfg.analysis.far_field_radii;
    let mut exponent = None;
    if !radii.is_empty() {
        let profile = far_field_profile(limit, radii)?;
        let mut csv = String::from("radius,sup_error\n");
        for (r, e) in &profile.points {
            csv.push_str(&format!("{r:.12e},{e:.12e}\n"));
        }
        fs::write(ctx.out.join("far_field.csv"), csv)?;
        exponent = profile.exponent;
    }
    io::write_json(
        &ctx.out.join("ladder.json"),
        &LadderReport {
            levels: solutions.iter().map(|s| s.0).collect(),
            cauchy_gaps: gaps,
            residuals: solutions.iter().map(|s| s.1.diagnostics.residual).collect(),
            iterations: solutions.iter().map(|s| s.1.diagnostics.iterations).collect(),
            far_field_exponent: exponent,
        },
    )?;
    Ok(0)
}

#[derive(Serialize, Default)]
struct ErrorStats {
    max: f64,
    median: f64,
    samples: usize,
}

impl ErrorStats {
    fn from(mut v: Vec<f64>) -> Self {
        if v.is_empty() {
            return Self::default();
        }
        v.sort_by(f64::total_cmp);
        Self {
            max: *v.last().expect("nonempty"),
            median: v[v.len() / 2],
            samples: v.len(),
        }
    }
}

#[derive(Serialize)]
struct OracleLevelReport {
    k: usize,
    iterations: usize,
    residual: f64,
    /// `|f − f_k|` on the gap window.
    f: ErrorStats,
    /// `|g − g_k|` on `|y| <= 0.9` off the branch circle.
    g: ErrorStats,
    /// Relative error of the finite-difference dilatation of the solved inverse.
    k_mu_g_solved: ErrorStats,
    /// Relative error of the finite-difference dilatation of the exact inverse.
    k_mu_g_oracle: ErrorStats,
    passed: bool,
}

#[derive(Serialize)]
struct OracleReport {
    alpha: f64,
    thresholds: OracleThresholds,
    levels: Vec<OracleLevelReport>,
    passed: bool,
}

/// Nodes where the outer-branch dilatation of the inverse is compared:
/// `image_radius < |y| < 1`, two cells away from either circle.
fn off_branch(y: Complex64, inner: f64, h: f64) -> bool {
    let s = y.norm();
    s > inner + 2.0 * h && s < 1.0 - 2.0 * h
}

fn cmd_verify_oracle(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.cfg;
    let alpha = cfg
        .example_alpha()
        .ok_or_else(|| config_err("verify-oracle needs coefficient source example1"))?;
    if cfg.levels.is_empty() {
        return Err(config_err("verify-oracle needs at least one level"));
    }
    for &k in &cfg.levels {
        ExampleParams::new(alpha, k as f64).map_err(|e| config_err(e.to_string()))?;
    }
    let spec = cfg.grid_spec()?;
    let h = spec.spacing();
    let th = cfg.oracle.clone();
    let mut levels = Vec::new();
    solve_levels(ctx, |level, sol, _| {
        let k = level.expect("levels are set");
        let p = ExampleParams::new(alpha, k as f64)?;
        let mut fe = Vec::new();
        for idx in 0..spec.len() {
            let z = spec.node_at(idx);
            if cfg.analysis.gap_window.contains(z) {
                fe.push((sol.map.value_at(idx) - f_k_example(z, &p)).norm());
            }
        }
        let g = invert_on_grid(&sol.map, spec, cfg.solver.tol_inv)?;
        let oracle_g = SampledMap::from_fn(spec, |y| g_k_example(y, &p))?;
        let (mut ge, mut ks, mut ko) = (Vec::new(), Vec::new(), Vec::new());
        let inner = p.image_radius();
        for idx in 0..spec.len() {
            let y = spec.node_at(idx);
            let s = y.norm();
            if s <= 0.9 && (s - inner).abs() > 2.0 * h && !g.is_flagged(idx) {
                ge.push((g.value_at(idx) - g_k_example(y, &p)).norm());
            }
            if s <= 0.9 && off_branch(y, inner, h) {
                let exact = q_example(y, alpha);
                if let Ok(v) = k_mu_g(g.f_z().values()[idx], g.f_zbar().values()[idx]) {
                    ks.push((v - exact).abs() / exact);
                }
                if let Ok(v) = k_mu_g(oracle_g.f_z().values()[idx], oracle_g.f_zbar().values()[idx]) {
                    ko.push((v - exact).abs() / exact);
                }
            }
        }
        let (f, g, ks, ko) = (ErrorStats::from(fe), ErrorStats::from(ge), ErrorStats::from(ks), ErrorStats::from(ko));
        let passed = f.max <= th.f_sup && f.median <= th.f_median && g.max <= th.g_sup && ko.max <= th.k_rel;
        levels.push(OracleLevelReport {
            k,
            iterations: sol.diagnostics.iterations,
            residual: sol.diagnostics.residual,
            f,
            g,
            k_mu_g_solved: ks,
            k_mu_g_oracle: ko,
            passed,
        });
        Ok(())
    })?;
    let passed = levels.iter().all(|l| l.passed);
    io::write_json(
        &ctx.out.join("oracle.json"),
        &OracleReport {
            alpha,
            thresholds: th,
            levels,
            passed,
        },
    )?;
    Ok(if passed { 0 } else { 3 })
}

fn probes(cfg: &ScenarioConfig) -> Vec<Complex64> {
    cfg.analysis.probes.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

fn classify_options(cfg: &ScenarioConfig) -> ClassifyOptions {
    ClassifyOptions {
        scan_range: (cfg.analysis.scan_range[0], cfg.analysis.scan_range[1]),
        delta: cfg.analysis.delta,
        ..ClassifyOptions::default()
    }
}

fn cmd_classify(ctx: &Context) -> Result<i32> {
    let q = ctx.cfg.weight(&ctx.base)?;
    let verdict = classify(q.as_ref(), &probes(&ctx.cfg), &classify_options(&ctx.cfg))?;
    io::write_json(&ctx.out.join("classification.json"), &verdict)?;
    Ok(0)
}

#[derive(Serialize)]
struct PoletskyEntry {
    annulus: Annulus,
    eta: Eta,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

#[derive(Serialize)]
struct DiagnoseReport {
    level: Option<usize>,
    joint_dilatation_violations: usize,
    effective_mu_flagged: usize,
    inverse_flagged_nodes: usize,
    change_of_variables: crate::dilatation::ChangeOfVariables,
    poletsky: Vec<PoletskyEntry>,
    equicontinuity: Option<crate::analysis::Equicontinuity>,
    far_field: Option<crate::solver::FarFieldProfile>,
    classification: Option<crate::analysis::ClassificationVerdict>,
    seed: u64,
}

fn cmd_diagnose(ctx: &Context) -> Result<i32> {
    let cfg = &ctx.cfg;
    let an = &cfg.analysis;
    let solutions = solve_levels(ctx, |_, _, _| Ok(()))?;
    let (level, limit) = solutions.last().expect("at least one level");
    let spec = cfg.grid_spec()?;
    let coeff = cfg.coefficient_field(&ctx.base)?;
    let coeff = match level {
        Some(n) => truncate(&coeff, TruncationLevel::new(*n)?),
        None => coeff,
    };
    let joint = joint_dilatation(&coeff);
    let eff = effective_mu(&coeff, limit.map.f_z())?;
    let g = invert_on_grid(&limit.map, spec, cfg.solver.tol_inv)?;

    let report = dilatation_report(&g, &an.region, cfg.p)?;
    io::write_json(&ctx.out.join("dilatation.json"), &report)?;
    io::write_field(&ctx.out.join("k_mu_g.csv"), &report.k_mu_g)?;
    io::write_field(&ctx.out.join("k_inner_p.csv"), &report.k_inner_p)?;
    let cov = change_of_variables_check(&limit.map, &g, &an.region, cfg.p)?;

    let mut poletsky = Vec::new();
    if an.poletsky {
        let q = cfg.weight(&ctx.base)?;
        for a in &an.annuli {
            let ann = Annulus::new(Complex64::new(a[0], a[1]), a[2], a[3])?;
            for eta in [Eta::Uniform, Eta::Log] {
                let c = inverse_poletsky_check(&limit.map, &g, q.as_ref(), &ann, eta, an.capacity_resolution)?;
                poletsky.push(PoletskyEntry {
                    annulus: ann,
                    eta,
                    lhs: c.lhs,
                    rhs: c.rhs,
                    holds: c.holds,
                });
            }
        }
    }
    let equicontinuity = if an.equicontinuity {
        let maps: Vec<&SampledMap> = solutions.iter().map(|s| &s.1.map).collect();
        Some(equicontinuity_bound(&maps, &an.compact, &an.domain, an.pairs, ctx.seed)?)
    } else {
        None
    };
    let far_field = if an.far_field_radii.is_empty() {
        None
    } else {
        Some(far_field_profile(&limit.map, &an.far_field_radii)?)
    };
    let classification = if an.classify {
        let q = cfg.weight(&ctx.base)?;
        Some(classify(q.as_ref(), &probes(cfg), &classify_options(cfg))?)
    } else {
        None
    };
    io::write_json(
        &ctx.out.join("diagnose.json"),
        &DiagnoseReport {
            level: *level,
            joint_dilatation_violations: joint.violations.len(),
            effective_mu_flagged: eff.flagged.len(),
            inverse_flagged_nodes: g.flagged_count(),
            change_of_variables: cov,
            poletsky,
            equicontinuity,
            far_field,
            classification,
            seed: ctx.seed,
        },
    )?;
    Ok(0)
}

/// Finite-difference `K_{μ_g}` of a pointwise map at `y`.
pub fn pointwise_k_mu<F: Fn(Complex64) -> Complex64>(g: F, y: Complex64, step: f64) -> Result<f64> {
    let (a, b) = wirtinger_at(g, y, step);
    k_mu_g(a, b)
}

/// Samples `μ_k` of the closed-form family on `spec`.
pub fn example_coefficient(spec: GridSpec, params: &ExampleParams) -> Result<CoefficientField> {
    CoefficientField::new(
        ComplexField::sample(|z| mu_k_example(z, params), spec, Meaning::Coefficient)?,
        ComplexField::zeros(spec, Meaning::Coefficient),
    )
}
