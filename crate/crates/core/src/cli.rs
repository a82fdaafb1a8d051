//! Command-line front end: argument parsing, pipeline orchestration, report
//! emission, and exit-status mapping.
//!
//! Exit codes: 0 success, 2 input/parse error, 3 precondition violated,
//! 4 resource guard, 5 internal invariant breach.

use crate::arith::{ZetaError, ZetaZeroTable, ZeroTableError};
use crate::continuation::{
    self, singular_candidates, ContinuationContext, ContinuationError,
};
use crate::cyclotomy::{self, CyclotomyError, CyclotomyVerdict, NonCyclotomicWitness};
use crate::geometry::{self, GeometryError};
use crate::igusa::{self, IgusaError};
use crate::poly::{parse_polynomial, PolyError, SparsePolynomial};
use crate::puiseux::{self, BasePoint, DirectionConfig, PuiseuxError};
use crate::report::{complex_value, rational_value, Document};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

/// Environment variable overriding the zeta-zero table path.
pub const ZEROS_ENV: &str = "EULERPROD_ZETA_ZEROS";

#[derive(Debug, Parser)]
#[command(
    name = "eulerprod",
    version,
    about = "Multivariate Euler products of Igusa type: expansions, boundaries, continuation, zeros"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact cyclotomic-expansion exponents gamma(beta) with verification
    Expand(ExpandArgs),
    /// Natural-boundary verdict for prod_p h(p^-s1,..,p^-sn,p^-c)
    Classify(ClassifyArgs),
    /// The polytope W_c(delta), its supporting faces, and point membership
    Boundary(BoundaryArgs),
    /// Meromorphic continuation value at a point, with certificates
    Evaluate(EvaluateArgs),
    /// Puiseux branches and the zero lattice at a boundary face
    Zeros(ZerosArgs),
    /// The Igusa zeta function of Z[T,1/T]: verdict, polytope, identities
    Igusa(IgusaArgs),
}

#[derive(Debug, Args)]
pub struct PolySource {
    /// Polynomial text in the canonical grammar, e.g. "1 - X1*X2"
    #[arg(long, conflicts_with = "poly_file")]
    pub poly: Option<String>,
    /// Path to a file holding the polynomial in the same grammar
    #[arg(long)]
    pub poly_file: Option<PathBuf>,
    /// Number of s-variables (the polynomial uses X1..X{n+1})
    #[arg(long)]
    pub n: usize,
    /// The fixed integer exponent shift c (nonzero)
    #[arg(long, default_value_t = 1)]
    pub c: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for every randomized draw (fixed default for reproducibility)
    #[arg(long, default_value_t = 20_110_901)]
    pub seed: u64,
    /// Zeta-zero table path (overrides the bundled table and EULERPROD_ZETA_ZEROS)
    #[arg(long)]
    pub zeros_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Slab bound on |beta|
    #[arg(long, default_value_t = 6)]
    pub beta_bound: u32,
    /// Total-degree bound for the reconstruction check
    #[arg(long, default_value_t = 8)]
    pub degree_bound: u32,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Analyze even when some alpha_(n)j is zero
    #[arg(long)]
    pub allow_alpha_prefix_zero: bool,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Optional point sigma (comma-separated reals, length n) for membership
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Evaluation point (comma-separated reals, length n)
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tail_tolerance: f64,
    /// Prime cutoff for the direct-product cross check (0 skips it)
    #[arg(long, default_value_t = 0)]
    pub prime_limit: u64,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub source: PolySource,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Face polar column, comma-separated exponents of length n+1
    /// (defaults to the first supporting non-degenerate face)
    #[arg(long)]
    pub face: Option<String>,
    /// Base-point real part on the face, comma-separated rationals of length n
    /// (defaults to a seeded admissible draw)
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Base-point imaginary part, comma-separated reals of length n
    /// (defaults to a seeded draw)
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Primes whose zero lattices are listed
    #[arg(long, default_value = "53,101,997")]
    pub primes: String,
    /// Lattice indexes m = 0..=m_max per prime
    #[arg(long, default_value_t = 10)]
    pub m_max: i64,
    /// Rectangle imaginary window start
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    /// Rectangle imaginary window height
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Rectangle real window (1/(nu+1), 1/nu); 0 derives nu from the first prime
    #[arg(long, default_value_t = 0)]
    pub nu: u32,
    /// Prime cutoff for the rectangle scan
    #[arg(long, default_value_t = 2000)]
    pub prime_limit: u64,
    /// Slab bound for singular candidates
    #[arg(long, default_value_t = 4)]
    pub beta_bound: u32,
    /// Write zero-lattice scatter data (plain-text columns) to this path
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IgusaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of variables (n >= 2)
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Real point s for the identity check, comma-separated, length n
    #[arg(long, default_value = "4,4", allow_hyphen_values = true)]
    pub s: String,
    /// Partial-sum cutoff M
    #[arg(long, default_value_t = 200)]
    pub m: u64,
    /// Euler-product prime cutoff P
    #[arg(long, default_value_t = 200)]
    pub prime_limit: u64,
}

/// Everything a run can fail with, with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Poly(#[from] PolyError),
    #[error("input error: {0}")]
    Io(String),
    #[error("input error: {0}")]
    BadFlag(String),
    #[error("input error: {0}")]
    ZeroTable(#[from] ZeroTableError),
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Continuation(#[from] ContinuationError),
    #[error("{0}")]
    Cyclotomy(#[from] CyclotomyError),
    #[error("{0}")]
    Igusa(#[from] IgusaError),
    #[error("{0}")]
    Puiseux(#[from] PuiseuxError),
    #[error("{0}")]
    Zeta(#[from] ZetaError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Poly(_) | RunError::Io(_) | RunError::BadFlag(_) | RunError::ZeroTable(_) => {
                EXIT_INPUT
            }
            RunError::Geometry(GeometryError::AlphaPrefixZero) => EXIT_PRECONDITION,
            RunError::Geometry(GeometryError::RayReductionFailed) => EXIT_INTERNAL,
            RunError::Continuation(e) => match e {
                ContinuationError::InvalidDelta(_)
                | ContinuationError::OutsideDomain { .. }
                | ContinuationError::NearSingularity { .. } => EXIT_PRECONDITION,
                ContinuationError::TailNotStagnant { .. } => EXIT_RESOURCE,
                ContinuationError::Cyclotomy(e) => cyclotomy_code(e),
                ContinuationError::Zeta(e) => zeta_code(e),
            },
            RunError::Cyclotomy(e) => cyclotomy_code(e),
            RunError::Igusa(e) => match e {
                IgusaError::InvalidN(_) => EXIT_INPUT,
                IgusaError::DegenerateGeometricSeries { .. } => EXIT_PRECONDITION,
                IgusaError::ResourceGuard { .. } => EXIT_RESOURCE,
                IgusaError::Zeta(e) => zeta_code(e),
            },
            RunError::Puiseux(e) => match e {
                PuiseuxError::FaceNotSupporting(_)
                | PuiseuxError::InvalidBasePoint(_)
                | PuiseuxError::NoDirectionFound { .. }
                | PuiseuxError::ParityInfeasible
                | PuiseuxError::NoEPrimeFound
                | PuiseuxError::RedrawBudgetExhausted
                | PuiseuxError::NotDescending
                | PuiseuxError::NoDescendingBranch
                | PuiseuxError::NonPositiveRealPart { .. }
                | PuiseuxError::NoConvergence => EXIT_PRECONDITION,
                PuiseuxError::NewtonDivergence { .. }
                | PuiseuxError::BranchCollision { .. }
                | PuiseuxError::DerivativeVanishes
                | PuiseuxError::MissingSample { .. }
                | PuiseuxError::CrossValidation { .. } => EXIT_INTERNAL,
            },
            RunError::Zeta(e) => zeta_code(e),
        }
    }
}

fn cyclotomy_code(e: &CyclotomyError) -> i32 {
    match e {
        CyclotomyError::ResourceGuard { .. } => EXIT_RESOURCE,
        CyclotomyError::AmbiguousAggregation { .. } => EXIT_PRECONDITION,
        CyclotomyError::NonIntegerGamma { .. } | CyclotomyError::GammaOverflow { .. } => {
            EXIT_INTERNAL
        }
    }
}

fn zeta_code(e: &ZetaError) -> i32 {
    match e {
        ZetaError::Pole | ZetaError::OutOfRange(_) => EXIT_PRECONDITION,
        ZetaError::SelfTestFailed(_) => EXIT_INTERNAL,
    }
}

/// Runs a parsed command and renders its report.
/// Returns the exit status and the report body.
pub fn run(cli: Cli) -> (i32, String) {
    let format = match &cli.command {
        Command::Expand(a) => a.common.format,
        Command::Classify(a) => a.common.format,
        Command::Boundary(a) => a.common.format,
        Command::Evaluate(a) => a.common.format,
        Command::Zeros(a) => a.common.format,
        Command::Igusa(a) => a.common.format,
    };
    match dispatch(cli) {
        Ok(doc) => {
            let body = match format {
                Format::Text => doc.to_text(),
                Format::Json => doc.to_json(),
            };
            (EXIT_OK, body)
        }
        Err(e) => (e.exit_code(), format!("error: {e}\n")),
    }
}

fn dispatch(cli: Cli) -> Result<Document, RunError> {
    match cli.command {
        Command::Expand(args) => run_expand(args),
        Command::Classify(args) => run_classify(args),
        Command::Boundary(args) => run_boundary(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Zeros(args) => run_zeros(args),
        Command::Igusa(args) => run_igusa(args),
    }
}

fn load_poly(source: &PolySource) -> Result<SparsePolynomial, RunError> {
    if source.c == 0 {
        return Err(RunError::BadFlag("c must be nonzero".into()));
    }
    if source.n == 0 {
        return Err(RunError::BadFlag("n must be at least 1".into()));
    }
    let text = match (&source.poly, &source.poly_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| RunError::Io(e.to_string()))?
        }
        (None, None) => {
            return Err(RunError::BadFlag(
                "one of --poly or --poly-file is required".into(),
            ))
        }
    };
    Ok(parse_polynomial(&text, source.n)?)
}

fn load_zero_table(common: &CommonArgs) -> Result<ZetaZeroTable, RunError> {
    if let Some(path) = &common.zeros_file {
        return Ok(ZetaZeroTable::load(path)?);
    }
    if let Ok(path) = std::env::var(ZEROS_ENV) {
        if !path.is_empty() {
            return Ok(ZetaZeroTable::load(std::path::Path::new(&path))?);
        }
    }
    Ok(ZetaZeroTable::bundled())
}

fn parse_reals(text: &str, expect: usize, what: &str) -> Result<Vec<f64>, RunError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse()).collect();
    let values = values.map_err(|_| RunError::BadFlag(format!("cannot parse {what}: {text}")))?;
    if values.len() != expect {
        return Err(RunError::BadFlag(format!(
            "{what} needs {expect} entries, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_rationals(text: &str, expect: usize, what: &str) -> Result<Vec<BigRational>, RunError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let r = if let Some((num, den)) = part.split_once('/') {
            let n = BigInt::from_str(num.trim())
                .map_err(|_| RunError::BadFlag(format!("bad rational in {what}: {part}")))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|_| RunError::BadFlag(format!("bad rational in {what}: {part}")))?;
            BigRational::new(n, d)
        } else {
            BigRational::from_integer(
                BigInt::from_str(part)
                    .map_err(|_| RunError::BadFlag(format!("bad rational in {what}: {part}")))?,
            )
        };
        out.push(r);
    }
    if out.len() != expect {
        return Err(RunError::BadFlag(format!(
            "{what} needs {expect} entries, got {}",
            out.len()
        )));
    }
    Ok(out)
}

fn parse_exponents(text: &str, expect: usize) -> Result<Vec<u32>, RunError> {
    let values: Result<Vec<u32>, _> = text.split(',').map(|s| s.trim().parse()).collect();
    let values =
        values.map_err(|_| RunError::BadFlag(format!("cannot parse exponent list: {text}")))?;
    if values.len() != expect {
        return Err(RunError::BadFlag(format!(
            "exponent list needs {expect} entries, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn echo_inputs(doc: &mut Document, h: &SparsePolynomial, source: &PolySource) {
    doc.input("polynomial", json!(h.render()));
    doc.input("n", json!(source.n));
    doc.input("c", json!(source.c));
}

fn run_expand(args: ExpandArgs) -> Result<Document, RunError> {
    let h = load_poly(&args.source)?;
    let mut doc = Document::new("expand");
    echo_inputs(&mut doc, &h, &args.source);
    doc.setting("beta_bound", json!(args.beta_bound));
    doc.setting("degree_bound", json!(args.degree_bound));
    doc.setting("seed", json!(args.common.seed));
    let table = cyclotomy::expansion_table(&h, args.beta_bound)?;
    doc.result(
        "distance_constant",
        rational_value(&table.distance_constant),
    );
    doc.result("nonzero_entries", json!(table.entries.len()));
    doc.result("table", json!(table.export_text()));
    let verify = cyclotomy::verify_expansion(&h, args.degree_bound)?;
    doc.certificate("reconstruction_pass", json!(verify.pass));
    doc.certificate("reconstruction_factors", json!(verify.factors_used));
    if let Some(m) = &verify.first_mismatch {
        doc.certificate(
            "first_mismatch",
            json!({
                "monomial": m.monomial,
                "expected": m.expected.to_string(),
                "got": m.got.to_string(),
            }),
        );
    }
    Ok(doc)
}

fn cyclotomy_verdict_value(v: &CyclotomyVerdict) -> Value {
    match v {
        CyclotomyVerdict::Cyclotomic { factorization } => {
            let factors: Vec<Value> = factorization
                .iter()
                .map(|(lambda, g)| json!({ "lambda": lambda, "exponent": g }))
                .collect();
            json!({ "kind": "Cyclotomic", "factorization": factors })
        }
        CyclotomyVerdict::NotCyclotomicCertified { witness } => {
            let w = match witness {
                NonCyclotomicWitness::RootModulus { root, modulus } => json!({
                    "type": "root_modulus",
                    "root": complex_value(*root),
                    "modulus": modulus,
                }),
                NonCyclotomicWitness::Substitution {
                    powers,
                    root,
                    modulus,
                } => json!({
                    "type": "substitution",
                    "powers": powers,
                    "root": complex_value(*root),
                    "modulus": modulus,
                }),
            };
            json!({ "kind": "NotCyclotomicCertified", "witness": w })
        }
        CyclotomyVerdict::UnknownUpToBound {
            beta_bound,
            degree_bound,
        } => json!({
            "kind": "UnknownUpToBound",
            "beta_bound": beta_bound,
            "degree_bound": degree_bound,
        }),
    }
}

fn face_report_value(f: &geometry::FaceReport) -> Value {
    json!({
        "term_index": f.e,
        "polar": f.polar.0,
        "primitive": f.primitive.0,
        "lambda_e": f.lambda_e,
        "nondegenerate": f.nondegenerate,
        "hypothesis_H": f.hypothesis_h,
        "coprime_condition": f.coprime_condition,
        "supporting": f.supporting,
        "witness": f.witness.as_ref().map(|w| {
            w.iter().map(rational_value).collect::<Vec<Value>>()
        }),
    })
}

fn run_classify(args: ClassifyArgs) -> Result<Document, RunError> {
    let h = load_poly(&args.source)?;
    let mut doc = Document::new("classify");
    echo_inputs(&mut doc, &h, &args.source);
    doc.setting("seed", json!(args.common.seed));
    doc.setting(
        "allow_alpha_prefix_zero",
        json!(args.allow_alpha_prefix_zero),
    );
    let opts = geometry::ClassifyOptions {
        allow_alpha_prefix_zero: args.allow_alpha_prefix_zero,
        ..Default::default()
    };
    let outcome = geometry::classify_boundary_with(&h, args.source.c, &opts)?;
    doc.result("verdict", json!(outcome.verdict.kind()));
    let removed: Vec<Value> = outcome
        .removed_factors
        .iter()
        .map(|(lambda, mult)| json!({ "lambda": lambda.0, "multiplicity": mult }))
        .collect();
    doc.result("removed_cyclotomic_factors", json!(removed));
    doc.result("residual", json!(outcome.residual.render()));
    if let Some(cv) = &outcome.residual_cyclotomicity {
        doc.result("residual_cyclotomicity", cyclotomy_verdict_value(cv));
    }
    let faces: Vec<Value> = outcome.all_faces.iter().map(face_report_value).collect();
    doc.result("faces", json!(faces));
    let qualifying: Vec<Value> = match &outcome.verdict {
        geometry::BoundaryVerdict::StrongBoundary(fs)
        | geometry::BoundaryVerdict::WeakBoundary(fs)
        | geometry::BoundaryVerdict::Inconclusive(fs) => {
            fs.iter().map(face_report_value).collect()
        }
        _ => Vec::new(),
    };
    doc.certificate("qualifying_faces", json!(qualifying));
    Ok(doc)
}

fn run_boundary(args: BoundaryArgs) -> Result<Document, RunError> {
    let h = load_poly(&args.source)?;
    let mut doc = Document::new("boundary");
    echo_inputs(&mut doc, &h, &args.source);
    doc.setting("delta", json!(args.delta));
    let delta_rat = BigRational::new(
        BigInt::from((args.delta * 1e9).round() as i64),
        BigInt::from(1_000_000_000i64),
    );
    let system = geometry::HalfspaceSystem::w_c_system(&h, args.source.c, &delta_rat);
    let rows: Vec<Value> = system
        .normalized_rows()
        .iter()
        .map(|(normal, offset)| json!({ "normal": normal, "offset": rational_value(offset) }))
        .collect();
    doc.result("halfspace_rows", json!(rows));
    let faces: Vec<Value> = geometry::faces(&h, args.source.c)
        .iter()
        .map(face_report_value)
        .collect();
    doc.result("faces", json!(faces));
    if let Some(point) = &args.point {
        let sigma = parse_reals(point, h.n(), "--point")?;
        let inside = geometry::membership(&h, args.source.c, args.delta, &sigma);
        doc.result("membership", json!({ "point": sigma, "inside": inside }));
    }
    Ok(doc)
}

fn run_evaluate(args: EvaluateArgs) -> Result<Document, RunError> {
    let h = load_poly(&args.source)?;
    let mut doc = Document::new("evaluate");
    echo_inputs(&mut doc, &h, &args.source);
    let point = parse_reals(&args.point, h.n(), "--point")?;
    let s: Vec<Complex64> = point.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    doc.input("point", json!(point));
    doc.setting("delta", json!(args.delta));
    doc.setting("tail_tolerance", json!(args.tail_tolerance));
    doc.setting("prime_limit", json!(args.prime_limit));
    let ctx = ContinuationContext {
        delta: args.delta,
        tail_tolerance: args.tail_tolerance,
        zeros: load_zero_table(&args.common)?,
        ..Default::default()
    };
    let out = continuation::continued_value(&h, args.source.c, &s, &ctx)?;
    doc.result("value", complex_value(out.value));
    doc.certificate("m_delta", json!(out.m_delta));
    doc.certificate("beta_bound", json!(out.beta_bound));
    let ledger: Vec<Value> = out
        .stagnation
        .iter()
        .map(|e| {
            json!({
                "beta_norm": e.beta_norm,
                "movement": e.movement,
                "nonzero_gammas": e.nonzero_gammas,
            })
        })
        .collect();
    doc.certificate("stagnation_ledger", json!(ledger));
    if let Some((beta, rho, dist)) = &out.nearest_singularity {
        doc.certificate(
            "nearest_singular_candidate",
            json!({ "beta": beta, "rho": rho, "distance": dist }),
        );
    }
    if args.prime_limit > 0 {
        let direct = continuation::direct_euler_product(&h, args.source.c, &s, args.prime_limit);
        doc.result("direct_product", complex_value(direct.value));
        doc.result(
            "direct_vs_continued",
            json!((out.value - direct.value).norm()),
        );
        if let Some(w) = direct.convergence_warning {
            doc.result("direct_product_warning", json!(w));
        }
    }
    Ok(doc)
}

fn run_igusa(args: IgusaArgs) -> Result<Document, RunError> {
    let mut doc = Document::new("igusa");
    let h = igusa::igusa_h(args.n)?;
    doc.input("n", json!(args.n));
    doc.input("polynomial", json!(h.render()));
    doc.setting("s", json!(args.s));
    doc.setting("partial_sum_cutoff", json!(args.m));
    doc.setting("prime_limit", json!(args.prime_limit));
    let outcome = geometry::classify_boundary(&h, 1)?;
    doc.result("verdict", json!(outcome.verdict.kind()));
    let boundary = igusa::igusa_boundary(args.n)?;
    let rows: Vec<Value> = boundary
        .normalized_rows()
        .iter()
        .map(|(normal, offset)| json!({ "normal": normal, "offset": rational_value(offset) }))
        .collect();
    doc.result("boundary_rows", json!(rows));
    doc.result("consistency_pass", json!(igusa::igusa_consistency(args.n)?));
    let s_real = parse_reals(&args.s, args.n, "--s")?;
    let s: Vec<Complex64> = s_real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let partial = igusa::igusa_partial_sum(&s, args.m)?;
    let product = igusa::igusa_product_value(&s, args.prime_limit)?;
    doc.result("partial_sum", complex_value(partial));
    doc.result("product_value", complex_value(product));
    doc.result("identity_residual", json!((partial - product).norm()));
    // closed form vs truncated series local check
    let mut local = Vec::new();
    for p in [2u64, 3, 5] {
        let closed = igusa::igusa_local_factor(p, &s)?;
        let series = igusa::igusa_local_factor_series(p, &s, 40);
        local.push(json!({ "p": p, "residual": (closed - series).norm() }));
    }
    doc.certificate("local_factor_residuals", json!(local));
    doc.certificate(
        "partial_sum_tail_note",
        json!(format!(
            "terms beyond M={} are dropped; for real s with min component sigma the tail is O(M^(2-2*sigma))",
            args.m
        )),
    );
    Ok(doc)
}

struct ZerosPipeline {
    c: i64,
    base: BasePoint,
    direction: DirectionConfig,
    e_prime: Option<usize>,
    ray_cyclotomic: bool,
}

const GENERICITY_RETRY_BUDGET: usize = 16;

/// Resolves face, base point, direction, and e' — redrawing tau0 within the
/// budget whenever a genericity check fails downstream.
fn prepare_zeros(args: &ZerosArgs, h: &SparsePolynomial) -> Result<ZerosPipeline, RunError> {
    let c = args.source.c;
    // face selection
    let e = match &args.face {
        Some(text) => {
            let expo = parse_exponents(text, h.n() + 1)?;
            h.term_index(&expo).ok_or_else(|| {
                RunError::BadFlag(format!("no term with exponent {expo:?}"))
            })?
        }
        None => geometry::faces(h, c)
            .iter()
            .find(|f| f.nondegenerate)
            .map(|f| f.e)
            .ok_or(RunError::Puiseux(PuiseuxError::FaceNotSupporting(0)))?,
    };
    if !geometry::is_nondegenerate_face(h, e) {
        return Err(RunError::Puiseux(PuiseuxError::DerivativeVanishes));
    }
    let mut base = match (&args.sigma, &args.tau) {
        (Some(sig), tau) => {
            let sigma_prefix = parse_rationals(sig, h.n(), "--sigma")?;
            let tau_prefix = match tau {
                Some(t) => parse_reals(t, h.n(), "--tau")?,
                None => vec![0.0; h.n()],
            };
            puiseux::BasePoint::from_sigma(h, c, e, sigma_prefix, tau_prefix)?
        }
        (None, _) => {
            let mut bp = puiseux::base_point(h, c, e, args.common.seed)?;
            if let Some(t) = &args.tau {
                bp.tau0 = {
                    let mut v = parse_reals(t, h.n(), "--tau")?;
                    v.push(0.0);
                    v
                };
            }
            bp
        }
    };
    // is the ray univariate cyclotomic? decides whether parity is needed
    let mp = h.main_part(e);
    let (ray_poly, _) = crate::poly::ray_reduce(&mp).expect("main part is single-ray");
    let ray_cyclotomic = matches!(
        cyclotomy::is_cyclotomic_univariate(&ray_poly),
        CyclotomyVerdict::Cyclotomic { .. }
    );
    // pre-direction and working root
    let pre_direction = puiseux::choose_direction(h, e, None, false)?;
    for _attempt in 0..GENERICITY_RETRY_BUDGET {
        let (_, int_ray) = puiseux::ray_polynomial(h, e, &pre_direction, 2, &base.tau0);
        let roots = crate::roots::int_polynomial_roots(&int_ray.coeffs);
        let working = roots
            .iter()
            .copied()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .expect("ray polynomial has roots");
        let e_prime = match puiseux::select_e_prime(h, &base, &pre_direction, working) {
            Ok(ep) => Some(ep),
            Err(PuiseuxError::NoEPrimeFound) if h.lambda(e).len() == h.r() => None,
            Err(PuiseuxError::NoEPrimeFound) => {
                base = base.redraw_tau(h);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let direction = if ray_cyclotomic && e_prime.is_some() {
            puiseux::choose_direction(h, e, e_prime, true)?
        } else {
            pre_direction.clone()
        };
        // re-select e' under the final direction
        let (_, int_ray) = puiseux::ray_polynomial(h, e, &direction, 2, &base.tau0);
        let roots = crate::roots::int_polynomial_roots(&int_ray.coeffs);
        let working = roots
            .iter()
            .copied()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .expect("ray polynomial has roots");
        let e_prime = match (e_prime, puiseux::select_e_prime(h, &base, &direction, working)) {
            (None, _) => None,
            (Some(_), Ok(ep)) => Some(ep),
            (Some(_), Err(PuiseuxError::NoEPrimeFound)) => {
                base = base.redraw_tau(h);
                continue;
            }
            (_, Err(e)) => return Err(e.into()),
        };
        return Ok(ZerosPipeline {
            c,
            base,
            direction,
            e_prime,
            ray_cyclotomic,
        });
    }
    Err(RunError::Puiseux(PuiseuxError::RedrawBudgetExhausted))
}

fn run_zeros(args: ZerosArgs) -> Result<Document, RunError> {
    let h = load_poly(&args.source)?;
    let mut doc = Document::new("zeros");
    echo_inputs(&mut doc, &h, &args.source);
    doc.setting("seed", json!(args.common.seed));
    doc.setting("primes", json!(args.primes));
    doc.setting("m_max", json!(args.m_max));
    doc.setting("u", json!(args.u));
    doc.setting("eta", json!(args.eta));
    doc.setting("beta_bound", json!(args.beta_bound));
    let pipeline = prepare_zeros(&args, &h)?;
    let c = pipeline.c;
    let e = pipeline.base.face;
    doc.result(
        "face",
        json!({
            "term_index": e,
            "polar": h.terms()[e].exponent.0,
            "ray_cyclotomic": pipeline.ray_cyclotomic,
        }),
    );
    doc.result(
        "base_point",
        json!({
            "sigma0": pipeline
                .base
                .sigma0
                .iter()
                .map(rational_value)
                .collect::<Vec<Value>>(),
            "tau0": pipeline.base.tau0,
            "seed": pipeline.base.seed,
        }),
    );
    doc.result(
        "direction",
        json!({
            "theta": pipeline.direction.theta,
            "pairings": pipeline.direction.pairings,
        }),
    );
    if let Some(ep) = pipeline.e_prime {
        doc.result(
            "e_prime",
            json!({
                "term_index": ep,
                "column": h.terms()[ep].exponent.0,
                "sigma_pairing": rational_value(&pipeline.base.pairing(&h, ep)),
            }),
        );
    }
    let primes: Vec<u64> = args
        .primes
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| RunError::BadFlag(format!("cannot parse --primes: {}", args.primes)))?;
    let mut zero_rows: Vec<Value> = Vec::new();
    let mut plot_lines = String::from("# p m re_t im_t residual\n");
    let mut all_zeros: Vec<Complex64> = Vec::new();
    let mut branch_info: Vec<Value> = Vec::new();
    for &p in &primes {
        let branch = puiseux::descending_branch(
            &h,
            &pipeline.base,
            &pipeline.direction,
            pipeline.e_prime,
            p,
            1e-2,
        )?;
        branch_info.push(json!({
            "p": p,
            "c0": complex_value(branch.c0),
            "c1": branch.c1.map(complex_value),
            "theta1": branch.theta1,
            "descending": branch.descending,
            "genericity": puiseux::genericity_check(&branch),
            "max_residual": branch
                .residual_profile
                .iter()
                .map(|&(_, r)| r)
                .fold(0.0f64, f64::max),
        }));
        let lattice = puiseux::zero_lattice(&branch, p, 0..=args.m_max)?;
        for (m, &t) in lattice.iter().enumerate() {
            let (refined, residual) =
                puiseux::verify_zero(&h, c, &pipeline.base, &pipeline.direction, p, t)?;
            zero_rows.push(json!({
                "p": p,
                "m": m,
                "re": refined.re,
                "im": refined.im,
                "residual": residual,
            }));
            plot_lines.push_str(&format!(
                "{} {} {:.17e} {:.17e} {:.3e}\n",
                p, m, refined.re, refined.im, residual
            ));
            all_zeros.push(refined);
        }
    }
    doc.result("branches", json!(branch_info));
    doc.result("zeros", json!(zero_rows));
    // rectangle count: derive nu from the first prime when not given
    let nu = if args.nu > 0 {
        args.nu
    } else {
        let branch = puiseux::descending_branch(
            &h,
            &pipeline.base,
            &pipeline.direction,
            pipeline.e_prime,
            primes[0],
            1e-2,
        )?;
        let x = 1.0 / primes[0] as f64;
        let omega = branch
            .samples
            .iter()
            .find(|(xs, _)| (xs - x).abs() <= 1e-12 * x)
            .map(|&(_, om)| om)
            .ok_or(RunError::Puiseux(PuiseuxError::MissingSample { x }))?;
        let re_t = -omega.norm().ln() / (primes[0] as f64).ln();
        ((1.0 / re_t).floor() as u32).max(1)
    };
    doc.setting("nu", json!(nu));
    let (total, ledger, skipped) = puiseux::count_zeros_in_rectangle(
        args.u,
        args.eta,
        nu,
        args.prime_limit,
        |p| {
            match puiseux::descending_branch(
                &h,
                &pipeline.base,
                &pipeline.direction,
                pipeline.e_prime,
                p,
                1e-2,
            ) {
                Ok(branch) => Ok(Some(branch)),
                // below the trackable regime (1/p too large for Newton
                // continuation from the ray roots): skip, reported
                Err(PuiseuxError::NewtonDivergence { .. })
                | Err(PuiseuxError::BranchCollision { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        },
    )?;
    let ledger_rows: Vec<Value> = ledger
        .iter()
        .map(|l| json!({ "p": l.p, "count": l.count, "re_t": l.re_t, "window": l.window }))
        .collect();
    doc.result(
        "rectangle",
        json!({ "total": total, "per_prime": ledger_rows, "skipped_primes": skipped }),
    );
    // singular candidates and interference
    let zeros_table = load_zero_table(&args.common)?;
    let candidates = singular_candidates(
        &h,
        c,
        &pipeline.base.sigma0,
        &pipeline.base.tau0,
        &pipeline.direction.theta,
        args.beta_bound,
        &zeros_table,
    )?;
    doc.result("singular_candidates", json!(candidates.len()));
    let interference = puiseux::interference_check(&all_zeros, &candidates);
    doc.result(
        "interference",
        json!({
            "min_distance": interference.min_distance,
            "flagged": interference.flagged.len(),
        }),
    );
    if let Some(path) = &args.plot {
        std::fs::write(path, &plot_lines).map_err(|e| RunError::Io(e.to_string()))?;
        doc.result("plot_file", json!(path.display().to_string()));
    }
    Ok(doc)
}
