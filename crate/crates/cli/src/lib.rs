//! Command implementations behind the `twistor-kit` binary. Each command
//! returns an [`Outcome`] so it can be driven from tests without a process.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::fs;
use twistor_core::catalog::{self, CatalogEntry, Condition, Sweep, KEYS};
use twistor_core::coords::{cx, direction_of, ExtC, Point4C, SliceKind, C64};
use twistor_core::error::Error;
use twistor_core::exec::Exec;
use twistor_core::fieldexpr::{BranchSign, FieldExpr};
use twistor_core::groups::{is_sl2h, is_su4h, named_matrix, transform_mu, transform_surface, BlockMatrix4};
use twistor_core::hyperbolic::{
    chart_sampler, ode_residual, restrict_boundary, solve_superminimal, Family, PhiSolution, SurfaceChart,
};
use twistor_core::kerr::{kerr_eval, named_surface, TwistorSurface};
use twistor_core::residuals::{
    check_alpha, check_boundary_orthogonality, check_hc3, check_hermitian, check_hyperbolic_hm, check_sfr, Exclusion,
    ResidualReport, SamplerSpec,
};
use twistor_core::trace::{
    invariant_defect, parse_leaves, to_csv, to_svg, trace_leaves, Projection, SliceField, TraceOptions,
};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "twistor-kit",
    version,
    about = "Twistor surfaces, Hermitian structures, shear-free congruences and their certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run residual certificates for a catalog entry or user expressions.
    Verify(VerifyArgs),
    /// Solve the Kerr equation of a twistor surface at a point.
    Kerr(KerrArgs),
    /// Trace leaves of the foliation on an ℝ³-slice.
    Trace(TraceArgs),
    /// Apply a conformal matrix to a catalog entry.
    Transform(TransformArgs),
    /// Build the hyperbolic harmonic morphism of a twistor surface and its boundary map.
    Boundary(BoundaryArgs),
    /// List the example catalog.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Samples per condition.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Seed; defaults to $TWISTOR_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pass threshold on max |residual|.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Sampling box "lo,hi" applied to every slice coordinate.
    #[arg(long = "box")]
    pub bounds: Option<String>,
    /// Evaluate samples on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Catalog key (e.g. radial, bunch:0.5, robinson:1).
    pub key: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub phi: Option<String>,
    /// A map on ℝ³ checked for horizontal conformality.
    #[arg(long)]
    pub f: Option<String>,
    /// Condition id or `all`.
    #[arg(long, default_value = "all")]
    pub condition: String,
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Branch {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

impl From<Branch> for BranchSign {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Plus => BranchSign::Plus,
            Branch::Minus => BranchSign::Minus,
        }
    }
}

#[derive(Debug, Args)]
pub struct KerrArgs {
    /// Named surface (w0..w3, hopf, robinson:s, quadric-radial, quadric-circles, quadric-coaxal) or a JSON file.
    #[arg(long)]
    pub surface: String,
    /// "x0,x1,x2,x3"; entries may be complex, e.g. "0.5+2*i".
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Read the point as Minkowski (t,x1,x2,x3).
    #[arg(long)]
    pub minkowski: bool,
    #[arg(long, value_enum, default_value = "+")]
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    pub key: String,
    /// Slice time.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// x1 of seeds given as a range.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x1: f64,
    /// Seeds: "a:b:n" along the x2-axis, or "x1,x2,x3;..." points.
    #[arg(long, default_value = "0.5:2:4", allow_hyphen_values = true)]
    pub leaves: String,
    /// Arclength step.
    #[arg(long, default_value_t = 2e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// SVG plane: x2x3 or half-plane (x1,x2 with x3 = 0).
    #[arg(long)]
    pub plane: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Named matrix (inversion, dilation:λ, translation:t,x1,x2,x3, lorentz-boost:λ, cxsame, ...) or a JSON file.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    #[arg(long = "apply-to")]
    pub apply_to: String,
    /// Catalog key to compare the image against.
    #[arg(long)]
    pub compare: Option<String>,
    /// Check the image against the conditions the matrix preserves.
    #[arg(long = "then-verify")]
    pub then_verify: bool,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Emit {
    Phi,
    F,
    Trace,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// robinson:s, quadric-radial, quadric-circles or quadric-coaxal.
    #[arg(long)]
    pub surface: String,
    /// "re,im".
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub a0: String,
    #[arg(long, value_enum, default_value = "phi")]
    pub emit: Emit,
    /// Seeds for --emit trace (see `trace --leaves`).
    #[arg(long, default_value = "0.5:2:4", allow_hyphen_values = true)]
    pub leaves: String,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Show a single entry.
    pub key: Option<String>,
}

/// Exit code and captured output of a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn judged(passed: bool, stdout: String) -> Self {
        Outcome { code: if passed { 0 } else { 1 }, stdout, stderr: String::new() }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let r = match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Kerr(a) => cmd_kerr(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Transform(a) => cmd_transform(&a),
        Command::Boundary(a) => cmd_boundary(&a),
        Command::Catalog(a) => cmd_catalog(&a),
    };
    r.unwrap_or_else(Outcome::error)
}

type CmdResult = std::result::Result<Outcome, Error>;

pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("TWISTOR_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Invalid(format!("TWISTOR_SEED `{v}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn exec_of(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn parse_pair(s: &str, what: &str) -> Result<[f64; 2], Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Invalid(format!("{what} `{s}`")))?;
    <[f64; 2]>::try_from(v).map_err(|_| Error::Invalid(format!("{what} `{s}` needs two numbers")))
}

fn sweep_of(a: &SweepArgs) -> Result<Sweep, Error> {
    let bounds = a.bounds.as_deref().map(|b| parse_pair(b, "box")).transpose()?;
    if let Some([lo, hi]) = bounds {
        if hi <= lo {
            return Err(Error::Invalid("box needs lo < hi".into()));
        }
    }
    Ok(Sweep { samples: a.samples, seed: resolve_seed(a.seed)?, tol: a.tol, exec: exec_of(a.sequential), bounds })
}

fn parse_expr(s: &Option<String>) -> Result<Option<FieldExpr>, Error> {
    s.as_deref().map(FieldExpr::parse).transpose()
}

fn c_json(z: C64) -> Value {
    json!(cx(z))
}

fn report_json(r: &ResidualReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

fn write_or_return(out: &Option<String>, text: String) -> Result<String, Error> {
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Error::Invalid(format!("writing {path}: {e}")))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn conditions_for(entry: &CatalogEntry, spec: &str) -> Result<Vec<Condition>, Error> {
    if spec == "all" {
        return Ok(entry.conditions.clone());
    }
    spec.split(',')
        .map(|s| {
            let c = Condition::parse(s.trim())?;
            if entry.applies(c) {
                Ok(c)
            } else {
                Err(Error::Invalid(format!("condition {} does not apply to {}", c.id(), entry.key)))
            }
        })
        .collect()
}

pub fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let custom = a.mu.is_some() || a.phi.is_some() || a.f.is_some();
    let entry = match (&a.key, custom) {
        (Some(k), false) => catalog::entry(k)?,
        (None, true) => catalog::custom(parse_expr(&a.mu)?, parse_expr(&a.phi)?, parse_expr(&a.f)?)?,
        (Some(_), true) => return Err(Error::Invalid("give a catalog key or expressions, not both".into())),
        (None, false) => return Err(Error::Invalid("give a catalog key or --mu/--phi/--f".into())),
    };
    let sweep = sweep_of(&a.sweep)?;
    let reports = conditions_for(&entry, &a.condition)?
        .into_iter()
        .map(|c| entry.verify(c, &sweep))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let v = json!({
        "key": entry.key,
        "seed": sweep.seed,
        "passed": passed,
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    Ok(Outcome::judged(passed, write_or_return(&a.out, pretty(&v))?))
}

fn load_surface(key: &str) -> Result<TwistorSurface, Error> {
    match named_surface(key) {
        Ok(s) => Ok(s),
        Err(e) => match fs::read_to_string(key) {
            Ok(text) => TwistorSurface::from_json(&text),
            Err(_) => Err(e),
        },
    }
}

fn parse_point(s: &str, minkowski: bool) -> Result<Point4C, Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::Arity { expected: 4, got: parts.len() });
    }
    let mut z = [C64::new(0.0, 0.0); 4];
    for (k, p) in parts.iter().enumerate() {
        z[k] = FieldExpr::parse(p)?.eval(&Point4C::ORIGIN, BranchSign::Plus)?;
    }
    if minkowski {
        if z.iter().any(|v| v.im != 0.0) {
            return Err(Error::Invalid("Minkowski coordinates are real".into()));
        }
        return Ok(Point4C::minkowski(z[0].re, z[1].re, z[2].re, z[3].re));
    }
    Ok(Point4C::new(z))
}

pub fn cmd_kerr(a: &KerrArgs) -> CmdResult {
    let s = load_surface(&a.surface)?;
    let p = parse_point(&a.point, a.minkowski)?;
    let branch: BranchSign = a.branch.into();
    let m = kerr_eval(&s, &p, branch)?;
    let mu = match m.mu() {
        ExtC::Finite(z) => c_json(z),
        ExtC::Infinity => json!("inf"),
    };
    let n = m.normalized();
    let v = json!({
        "surface": s.to_json(),
        "branch": if branch == BranchSign::Plus { "+" } else { "-" },
        "point": p.to_json(),
        "w": [c_json(n.w0), c_json(n.w1)],
        "mu": mu,
        "U": direction_of(&n),
    });
    Ok(Outcome::ok(pretty(&v)))
}

fn family_of(key: &str) -> Result<Family, Error> {
    let (head, arg) = match key.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (key, None),
    };
    match (head, arg) {
        ("robinson" | "linear", a) => {
            let s = a.map_or(Ok(0.0), |v| v.trim().parse()).map_err(|_| Error::UnknownKey(key.into()))?;
            Ok(Family::Linear { s })
        }
        ("quadric-radial", None) => Ok(Family::Radial),
        ("quadric-circles", None) => Ok(Family::Circles),
        ("quadric-coaxal", None) => Ok(Family::Coaxal),
        _ => Err(Error::UnsupportedFamily(key.into())),
    }
}

/// A function constant along the leaves on the slice at time t, if known.
fn leaf_invariant(entry: &CatalogEntry, t: f64) -> Option<FieldExpr> {
    let at = solve_superminimal(&SurfaceChart::of(entry.family?).ok()?, C64::new(0.0, -t)).ok()?;
    restrict_boundary(&at).ok()
}

pub fn cmd_trace(a: &TraceArgs) -> CmdResult {
    let entry = catalog::entry(&a.key)?;
    let mu = entry.mu.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no direction field", entry.key)))?;
    let field = SliceField::new(mu, a.t)?;
    let seeds = parse_leaves(&a.leaves, a.x1)?;
    if a.step <= 0.0 {
        return Err(Error::Invalid("step must be positive".into()));
    }
    let opts = TraceOptions { step: a.step, steps: a.steps, exec: exec_of(a.sequential), ..TraceOptions::default() };
    let recs = trace_leaves(&field, &seeds, &opts);
    let invariant = leaf_invariant(&entry, a.t).or_else(|| if a.t == 0.0 { entry.f.clone() } else { None });
    let mut notes = Vec::new();
    for r in &recs {
        let defect = invariant.as_ref().and_then(|f| invariant_defect(f, r).ok());
        notes.push(json!({
            "leaf": r.leaf,
            "samples": r.samples.len(),
            "truncated": r.truncated,
            "invariant_defect": defect,
        }));
    }
    let text = match a.format {
        Format::Csv => to_csv(&recs),
        Format::Svg => {
            let plane = match &a.plane {
                Some(p) => Projection::parse(p)?,
                None if entry.key == "quadric-coaxal" => Projection::X1X2,
                None => Projection::X2X3,
            };
            to_svg(&recs, plane)
        }
    };
    let stdout = write_or_return(&a.out, text)?;
    let stderr = pretty(&json!({ "key": entry.key, "t": a.t, "leaves": notes }));
    Ok(Outcome { code: 0, stdout, stderr })
}

fn load_matrix(key: &str) -> Result<BlockMatrix4, Error> {
    match named_matrix(key) {
        Ok(m) => Ok(m),
        Err(e) => match fs::read_to_string(key) {
            Ok(text) => BlockMatrix4::from_json(&text),
            Err(_) => Err(e),
        },
    }
}

/// max |a − b| / (1 + |b|) over sampled points where both evaluate.
fn max_rel_diff(a: &FieldExpr, b: &FieldExpr, spec: &SamplerSpec) -> Result<f64, Error> {
    let a = a.resolve_conj(&spec.slice)?;
    let b = b.resolve_conj(&spec.slice)?;
    let pts = spec.draw(&[a.clone(), b.clone()])?;
    let mut worst = 0.0f64;
    for p in pts {
        let (x, y) = (a.eval(&p, BranchSign::Plus)?, b.eval(&p, BranchSign::Plus)?);
        worst = worst.max((x - y).norm() / (1.0 + y.norm()));
    }
    Ok(worst)
}

pub fn cmd_transform(a: &TransformArgs) -> CmdResult {
    let p = load_matrix(&a.matrix)?;
    let entry = catalog::entry(&a.apply_to)?;
    let sweep = sweep_of(&a.sweep)?;
    let mu = entry.mu.as_ref().ok_or_else(|| Error::Invalid(format!("{} has no mu-field", entry.key)))?;
    let image = transform_mu(&p, mu)?;
    let surface = entry.surface.as_ref().map(|s| transform_surface(&p, s)).transpose()?;
    let (sl2h, su4h) = (is_sl2h(&p), is_su4h(&p));
    let [lo, hi] = sweep.bounds.unwrap_or(entry.bounds);
    let spec = |kind| {
        SamplerSpec::on(kind, Point4C::ORIGIN, lo, hi, sweep.samples, sweep.seed)
            .with_tol(sweep.tol)
            .with_exec(sweep.exec)
            .exclude(Exclusion::MarginAtLeast(image.clone(), 0.1))
    };
    let mut passed = true;
    let mut comparison = Value::Null;
    if let Some(k) = &a.compare {
        let target = catalog::entry(k)?;
        let surface_distance = match (&surface, &target.surface) {
            (Some(s), Some(t)) => Some(s.coeff_distance(t)),
            _ => None,
        };
        let mu_diff = match &target.mu {
            Some(m) => {
                Some(max_rel_diff(&image, m, &spec(SliceKind::C4).exclude(Exclusion::MarginAtLeast(m.clone(), 0.1)))?)
            }
            None => None,
        };
        let matches = surface_distance.map_or_else(|| mu_diff.is_some_and(|d| d <= 1e-10), |d| d <= 1e-12);
        passed &= matches;
        comparison =
            json!({ "key": k, "surface_distance": surface_distance, "mu_max_rel_diff": mu_diff, "matches": matches });
    }
    let mut reports = Vec::new();
    if a.then_verify {
        reports.push(check_alpha(&image, &spec(SliceKind::C4))?);
        if sl2h {
            reports.push(check_hermitian(&image, &spec(SliceKind::R4))?);
        }
        if su4h {
            reports.push(check_sfr(&image, &spec(SliceKind::M4))?);
        }
        passed &= reports.iter().all(|r| r.passed);
    }
    let v = json!({
        "matrix": a.matrix,
        "apply_to": entry.key,
        "sl2h": sl2h,
        "su4h": su4h,
        "mu": image.to_string(),
        "surface": surface.as_ref().map(|s| s.to_json()),
        "compare": comparison,
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Outcome::judged(passed, pretty(&v)))
}

/// Closed forms the construction should reproduce, with the slice to compare on.
fn references(family: Family, a0: C64) -> Vec<(&'static str, FieldExpr, SliceKind)> {
    let e = |s: &str| FieldExpr::parse(s).expect("reference expression");
    let zero = C64::new(0.0, 0.0);
    match family {
        Family::Circles if a0 == zero => vec![
            ("phi", e("-i*x1 + sqrt(x0^2 + x2^2 + x3^2)"), SliceKind::R4),
            ("f", e("-i*x1 + sqrt(x2^2 + x3^2)"), SliceKind::R3),
        ],
        Family::Circles => vec![(
            "f",
            e("-i*x1 + sqrt(x0^2 + x2^2 + x3^2) - x0*ln((sqrt(x0^2 + x2^2 + x3^2) + x0)/(x2 - i*x3))"),
            SliceKind::R3,
        )],
        Family::Linear { s } => vec![(
            "f",
            e(&format!("((x1 + i*x0)^2 + x2^2 + x3^2 - ({s})^2 + 2*i*(x1 + i*x0)*({s}))/(x2 + i*x3)")),
            SliceKind::R3,
        )],
        Family::Radial | Family::Coaxal => Vec::new(),
    }
}

fn boundary_checks(sol: &PhiSolution, sweep: &Sweep) -> Result<Vec<ResidualReport>, Error> {
    let [lo, hi] = sweep.bounds.unwrap_or([-2.0, 2.0]);
    let base = |kind| {
        SamplerSpec::on(kind, sol.basepoint(), lo, hi, sweep.samples, sweep.seed)
            .with_tol(sweep.tol)
            .with_exec(sweep.exec)
            .exclude(Exclusion::MarginAtLeast(sol.phi.clone(), 0.1))
    };
    let ode = chart_sampler(sol, lo, hi, sweep.samples, sweep.seed, 0.1)?.with_tol(1e-10).with_exec(sweep.exec);
    let hyp = base(SliceKind::R4).with_bounds(vec![[0.1, hi.max(1.1)], [lo, hi], [lo, hi], [lo, hi]]);
    let f = restrict_boundary(sol)?;
    Ok(vec![
        ode_residual(sol, &ode)?,
        check_hyperbolic_hm(&sol.phi, &hyp)?,
        check_boundary_orthogonality(&sol.phi, &base(SliceKind::R3))?,
        check_hc3(&f, &base(SliceKind::R3))?,
    ])
}

pub fn cmd_boundary(a: &BoundaryArgs) -> CmdResult {
    let family = family_of(&a.surface)?;
    let [re, im] = parse_pair(&a.a0, "a0")?;
    let a0 = C64::new(re, im);
    let sweep = sweep_of(&a.sweep)?;
    let sol = solve_superminimal(&SurfaceChart::of(family)?, a0)?;
    let f = restrict_boundary(&sol)?;
    if a.emit == Emit::Trace {
        if re != 0.0 {
            return Err(Error::Invalid("tracing needs a Minkowski slice: a0 = -i t".into()));
        }
        let field = SliceField::new(&sol.mu, -im)?;
        let recs = trace_leaves(
            &field,
            &parse_leaves(&a.leaves, 0.0)?,
            &TraceOptions { exec: sweep.exec, ..TraceOptions::default() },
        );
        let notes: Vec<Value> = recs
            .iter()
            .map(|r| json!({ "leaf": r.leaf, "samples": r.samples.len(), "truncated": r.truncated, "invariant_defect": invariant_defect(&f, r).ok() }))
            .collect();
        let stdout = write_or_return(&a.out, to_csv(&recs))?;
        return Ok(Outcome { code: 0, stdout, stderr: pretty(&json!({ "leaves": notes })) });
    }
    let reports = boundary_checks(&sol, &sweep)?;
    let mut passed = reports.iter().all(|r| r.passed);
    let mut refs = Vec::new();
    let mut candidates = references(family, a0);
    if family == Family::Radial {
        candidates.push(("phi", sol.mu.clone(), SliceKind::R4));
    }
    for (name, expr, kind) in candidates {
        let target = if name == "phi" { &sol.phi } else { &f };
        let mut spec = SamplerSpec::on(kind, sol.basepoint(), -2.0, 2.0, 100, sweep.seed)
            .exclude(Exclusion::MarginAtLeast(target.clone() + expr.clone(), 0.1));
        if kind == SliceKind::R4 {
            spec = spec.with_bounds(vec![[0.1, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]]);
        }
        let d = max_rel_diff(target, &expr, &spec)?;
        let ok = d <= 1e-12;
        passed &= ok;
        refs.push(json!({ "name": name, "expr": expr.to_string(), "max_rel_diff": d, "matches": ok }));
    }
    let v = json!({
        "surface": a.surface,
        "a0": c_json(a0),
        "branch": if sol.chart.branch == BranchSign::Plus { "+" } else { "-" },
        "zeta_tilde": sol.zeta_tilde.to_string(),
        "mu": sol.mu.to_string(),
        "phi": if a.emit == Emit::Phi { Value::String(sol.phi.to_string()) } else { Value::Null },
        "f": f.to_string(),
        "references": refs,
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Outcome::judged(passed, write_or_return(&a.out, pretty(&v))?))
}

fn entry_json(e: &CatalogEntry) -> Value {
    json!({
        "key": e.key,
        "title": e.title,
        "f": e.f.as_ref().map(|x| x.to_string()),
        "mu": e.mu.as_ref().map(|x| x.to_string()),
        "surface": e.surface.as_ref().map(|s| s.to_string()),
        "box": e.bounds,
        "margin": e.margin,
        "singular": e.singular,
        "conditions": e.conditions.iter().map(|c| c.id()).collect::<Vec<_>>(),
    })
}

pub fn cmd_catalog(a: &CatalogArgs) -> CmdResult {
    let v = match &a.key {
        Some(k) => entry_json(&catalog::entry(k)?),
        None => Value::Array(KEYS.iter().map(|k| catalog::entry(k).map(|e| entry_json(&e))).collect::<Result<_, _>>()?),
    };
    Ok(Outcome::ok(pretty(&v)))
}
