//! Batch front end for `normext`: model ingestion, command dispatch and
//! reports. The binary in `main.rs` only parses arguments.

pub mod figure;
pub mod report;
pub mod schema;

use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;

use normext::extensions::{
    boundary_isometry, check_normal, BoundarySpace, ExtensionSubspace, GraphOperator, NormalityVerdict,
};
use normext::linalg::{self, CMat};
use normext::onedim::{self, classify, eigen_residual, oracle_scan, Classification};
use normext::polar::{kernel_relations, polar_decompose};
use normext::vishik::green_check_batch;
use normext::{DiscreteModel, Execution, Tolerance};

use report::{RunReport, Timing};
use schema::{BoundarySpec, ModelFile};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{}::{}: {}", .0.module(), .0.code(), .0)]
    Math(#[from] normext::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Schema(_) => "SchemaError",
            CliError::Math(e) => e.code(),
            CliError::Io(_) => "IoError",
        }
    }
}

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// A mathematical verdict failed and `--assert` was given.
    pub const VERDICT_FAILED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    GreenCheck,
    CheckSubspace,
    Classify,
    OracleScan,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::GreenCheck => "green-check",
            Command::CheckSubspace => "check-subspace",
            Command::Classify => "classify",
            Command::OracleScan => "oracle-scan",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Options {
    /// Overrides `inner_product_tol` (and raises `residual_tol` to match).
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub pairs: usize,
    pub grid: usize,
    pub terms: u64,
    pub subspace: Option<PathBuf>,
    pub figure: Option<PathBuf>,
    pub figure_atoms: u64,
    pub timings: bool,
    pub sequential: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: None,
            seed: None,
            pairs: 200,
            grid: onedim::DEFAULT_GRID,
            terms: onedim::DEFAULT_TERMS,
            subspace: None,
            figure: None,
            figure_atoms: 40,
            timings: false,
            sequential: false,
        }
    }
}

struct Timer {
    enabled: bool,
    stages: Vec<Timing>,
}

impl Timer {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.stages.push(Timing { stage: stage.into(), seconds: start.elapsed().as_secs_f64() });
        }
        out
    }
}

fn tolerance(file: &ModelFile, opts: &Options) -> Tolerance {
    let mut t = file.tolerance.resolve();
    if let Some(x) = opts.tol {
        t.inner_product_tol = x;
        t.residual_tol = t.residual_tol.max(x);
    }
    t
}

/// Runs one command on the text of a model file.
pub fn run(command: Command, model_text: &str, opts: &Options) -> Result<RunReport, CliError> {
    let file = ModelFile::parse(model_text)?;
    let tol = tolerance(&file, opts);
    let seed = opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    let mut report = RunReport::new(command.name(), &file.canonical(), seed, tol);
    let mut timer = Timer { enabled: opts.timings, stages: Vec::new() };

    let exec = if opts.sequential { Execution::Sequential } else { Execution::Parallel };
    let model = timer.time("build", || file.build(tol))?.with_execution(exec);

    let all = command == Command::Report;
    if command == Command::Validate || all {
        timer.time("validate", || validate(&model, &mut report))?;
    }
    if command == Command::GreenCheck || all {
        timer.time("green-check", || green_check(&model, opts.pairs, seed, &mut report))?;
    }
    if command == Command::CheckSubspace || (all && (file.subspace.is_some() || opts.subspace.is_some())) {
        let basis = subspace_basis(&file, opts)?;
        timer.time("check-subspace", || check_subspace(&model, &basis, &mut report))?;
    }
    let mut classification = None;
    if command == Command::Classify || all {
        classification = Some(timer.time("classify", || classify_cmd(&model, &mut report))?);
    }
    if command == Command::OracleScan || all {
        timer.time("oracle-scan", || scan_cmd(&model, opts, &mut report))?;
    }
    if let Some(path) = &opts.figure {
        let c = match classification {
            Some(c) => c,
            None => classify(&model)?,
        };
        std::fs::write(path, figure::render(&model, &c, opts.figure_atoms))?;
    }
    if opts.timings {
        report.timings = Some(timer.stages);
    }
    Ok(report)
}

fn validate(model: &DiscreteModel, report: &mut RunReport) -> Result<(), CliError> {
    let g = model.growth();
    report.insert(
        "growth",
        json!({
            "beta": g.exponent,
            "c_lower": g.c_lower,
            "c_upper": g.c_upper,
            "rho": g.rho,
            "kappa": g.kappa,
            "regularity_constant": model.regularity_constant(),
        }),
    );
    let (xx, bound) = model.norm_sq(model.xi())?;
    report.residual("xi_norm_sq", xx, bound);
    report.verdict("xi_square_summable", true, "xi lies in l2");
    report.verdict("xi_outside_domain_of_r", true, "xi is not in D(R)");

    let p = polar_decompose(model);
    report.insert(
        "symbols",
        json!({
            "u": p.phase.to_string(),
            "abs": p.modulus.to_string(),
            "w": p.w.to_string(),
        }),
    );
    let rel = kernel_relations(model)?;
    let tol = model.tolerance().subspace_tol;
    for (name, r) in [
        ("kernel_a_from_t", rel.a_from_t),
        ("kernel_b_from_t", rel.b_from_t),
        ("w_maps_kernel_b_to_a", rel.w_maps_b_to_a),
        ("inverse_kernel_images", rel.inverse_images),
    ] {
        report.residual(name, r.sin2, r.bound);
        report.verdict(name, r.holds(tol), format!("squared sine {:e}", r.sin2));
    }
    Ok(())
}

fn green_check(model: &DiscreteModel, pairs: usize, seed: u64, report: &mut RunReport) -> Result<(), CliError> {
    let batch = green_check_batch(model, pairs, seed)?;
    let within = batch
        .results
        .iter()
        .all(|r| r.residual <= 10.0 * r.bound || r.residual == 0.0);
    let tight = batch.max_bound <= model.tolerance().residual_tol;
    report.residual("green_max", batch.max_residual, batch.max_bound);
    report.insert(
        "green",
        json!({ "pairs": pairs, "max_residual": batch.max_residual, "max_bound": batch.max_bound, "max_ratio": batch.max_ratio }),
    );
    report.verdict("green_within_bound", within, format!("max residual/bound ratio {:e}", batch.max_ratio));
    report.verdict("green_bound_below_tolerance", tight, format!("max bound {:e}", batch.max_bound));
    Ok(())
}

fn subspace_basis(file: &ModelFile, opts: &Options) -> Result<Vec<BoundarySpec>, CliError> {
    if let Some(path) = &opts.subspace {
        let text = std::fs::read_to_string(path)?;
        return serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("subspace file: {e}")));
    }
    file.subspace
        .clone()
        .ok_or_else(|| CliError::Schema("check-subspace needs a `subspace` field or --subspace".into()))
}

fn rows(m: &CMat) -> Vec<Vec<Complex64>> {
    linalg::matrix_serde::to_rows(m)
}

fn check_subspace(model: &DiscreteModel, basis: &[BoundarySpec], report: &mut RunReport) -> Result<(), CliError> {
    let space = BoundarySpace::from_model(model)?;
    let c = ExtensionSubspace::new(&space, basis.iter().map(BoundarySpec::value).collect(), model.tolerance().subspace_tol)?;
    let verdict = check_normal(model, &c)?;
    let r = verdict.residuals();
    report.residual("subspace_sin2", r.subspace, r.subspace_bound);
    report.residual("norm_mismatch", r.norm, r.norm_bound);
    let detail = match &verdict {
        NormalityVerdict::Normal { .. } => "normal".to_string(),
        NormalityVerdict::NotNormal { reason, .. } => format!("not normal: {reason:?}"),
    };
    report.verdict("normal", verdict.is_normal(), detail);
    if let NormalityVerdict::Normal { witness, .. } = &verdict {
        report.insert("witness", rows(witness));
    }
    // graphs over N(B*) also get the boundary isometry
    if c.dim() == space.dim_v() {
        let m = c.matrix(&space);
        let v = m.rows(space.dim_u(), space.dim_v()).into_owned();
        let u = m.rows(0, space.dim_u()).into_owned();
        if let Some(vinv) = v.try_inverse() {
            let g = GraphOperator::new(&space, u * vinv)?;
            let iso = boundary_isometry(model, &g)?;
            report.verdict(
                "isometry_agrees",
                iso.is_some() == verdict.is_normal(),
                format!("boundary isometry {}", if iso.is_some() { "exists" } else { "absent" }),
            );
            report.insert("boundary_isometry", iso.as_ref().map(rows));
        }
    }
    Ok(())
}

fn classify_cmd(model: &DiscreteModel, report: &mut RunReport) -> Result<Classification, CliError> {
    let c = classify(model)?;
    if let Some((t, s)) = c.line() {
        let r = eigen_residual(model, t, s, onedim::DEFAULT_TERMS)?;
        report.residual("eigen", r.value, r.bound);
        report.verdict(
            "eigenvector",
            r.value + r.bound <= model.tolerance().residual_tol,
            format!("xi is an eigenvector of R_t on x - {t}y = {s}"),
        );
    }
    report.insert("classification", &c);
    Ok(c)
}

fn scan_cmd(model: &DiscreteModel, opts: &Options, report: &mut RunReport) -> Result<(), CliError> {
    let scan = oracle_scan(model, opts.grid, opts.terms)?;
    let c = classify(model)?;
    let tol = 1e-6;
    let found = scan.best.residual.value + scan.best.residual.bound <= tol;
    report.residual("oracle_best", scan.best.residual.value, scan.best.residual.bound);
    report.insert(
        "oracle_scan",
        json!({
            "grid": scan.grid,
            "terms": scan.terms,
            "argmin_angle": scan.angle(scan.argmin),
            "grid_min": scan.grid_min,
            "best": scan.best,
        }),
    );
    let located = match c.line() {
        Some((t, _)) => scan.best.gamma.distance(&onedim::gamma_from_t(t)) <= 4.0 * std::f64::consts::PI / scan.grid as f64,
        None => true,
    };
    report.verdict(
        "oracle_agrees_with_classify",
        found == c.line().is_some() && located,
        format!("oracle {} a normal one-dimensional extension", if found { "finds" } else { "finds no" }),
    );
    Ok(())
}
