//! Command dispatch and report formatting for the `commfiber` binary.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commfiber::angle::{parse_angle_list, Angle};
use commfiber::caps::Caps;
use commfiber::descriptor::load_group;
use commfiber::error::Error;
use commfiber::fc::{build_fc_group, FcGroup, FcPoint};
use commfiber::finite::{brute_force_fiber, enumerate_group, frobenius_fiber, FiniteGroup};
use commfiber::group::{GroupPoint, GroupSpec, MATRIX_TOL};
use commfiber::montecarlo::{ball_decay, estimate_commuting_probability, MCEstimate, DEFAULT_MC_CHUNK};
use commfiber::perm::Perm;
use commfiber::torus::torus_partial_sum;
use commfiber::weyl::{su_convergence, DEFAULT_CHUNK};
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

const ENV_HELP: &str = "Size caps for the exhaustive computations can be raised through the environment:
  COMMFIBER_GROUP_CAP   largest group order enumerated (default 10000)
  COMMFIBER_CLASS_CAP   largest class count for a character table (default 64)
  COMMFIBER_PAIR_CAP    largest number of brute-force pair evaluations (default 1e8)
  COMMFIBER_WEIGHT_CAP  largest number of dominant weights enumerated (default 1e7)

Groups are built-in names (S3 S4 A4 D4 Q8 Z2 Z4 T<k> SU<N> O2), inline JSON or a JSON file.
Angles are radians (\"0.5\") or exact fractions of pi (\"1/3 pi\").

Exit status: 0 on success, 1 on invalid input, 2 when a computation fails or hits a cap.";

#[derive(Parser, Debug)]
#[command(name = "commfiber", version, about = "Commutator-map fiber measures and their character-sum formulas", after_help = ENV_HELP)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Worker threads for the parallel sums and samplers.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024), global = true)]
    pub threads: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character table of a finite group, one row per (character, class).
    FiniteTable(GroupArg),
    /// Commutator fiber sizes per conjugacy class, by character sum and by brute force.
    FiniteFrobenius(FrobeniusArgs),
    /// Normalized torus character sums over the box |m_j| ≤ n.
    TorusSum(TorusArgs),
    /// Normalized SU(N) character sums over weights of weight-sum ≤ n.
    SunSum(SunArgs),
    /// Truncated character-sum formula against the exact fiber measure of an FC quotient.
    FcMeasure(FcArgs),
    /// Fiber measure restricted to the FC-centre of a torus-by-finite semidirect product.
    OpenfcMeasure(OpenFcArgs),
    /// Monte Carlo estimate of the commuting probability.
    McCommprob(CommProbArgs),
    /// Monte Carlo estimates of the commutator landing in ε-balls around a point.
    McBall(BallArgs),
    /// Check a group descriptor, and optionally a point, for consistency.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct GroupArg {
    /// Built-in name, inline JSON or JSON file.
    #[arg(long)]
    pub group: String,
}

#[derive(Args, Debug)]
pub struct FrobeniusArgs {
    #[command(flatten)]
    pub group: GroupArg,
    /// Skip the brute-force count.
    #[arg(long)]
    pub no_brute_force: bool,
}

#[derive(Args, Debug)]
pub struct Sweep {
    /// Largest truncation depth.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=1_000_000))]
    pub depth: u64,
    /// Report every `stride`-th depth (the final depth is always reported).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
}

impl Sweep {
    fn depths(&self) -> Vec<u64> {
        let mut out: Vec<u64> = (0..=self.depth).step_by(self.stride as usize).collect();
        if out.last() != Some(&self.depth) {
            out.push(self.depth);
        }
        out
    }
}

#[derive(Args, Debug)]
pub struct TorusArgs {
    /// Comma-separated angles, one per torus coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    #[command(flatten)]
    pub sweep: Sweep,
}

#[derive(Args, Debug)]
pub struct SunArgs {
    /// The N of SU(N).
    #[arg(long = "N", visible_alias = "n", value_parser = clap::value_parser!(u64).range(2..=64))]
    pub n: u64,
    /// Comma-separated eigenangles summing to 0 mod 2π.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: String,
    #[command(flatten)]
    pub sweep: Sweep,
    /// Summands per parallel chunk; results depend only on this, not on threads.
    #[arg(long, default_value_t = DEFAULT_CHUNK, value_parser = chunk_parser)]
    pub chunk: usize,
}

#[derive(Args, Debug)]
pub struct FcArgs {
    #[command(flatten)]
    pub group: GroupArg,
    /// Point as "angles;cycles" (products: components joined by "|").
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[command(flatten)]
    pub sweep: Sweep,
}

#[derive(Args, Debug)]
pub struct OpenFcArgs {
    #[command(flatten)]
    pub group: GroupArg,
    /// Point "angles;cycles" whose fiber is measured; defaults to the identity.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Also look for h0 with [x, h0] = point and test it on the coset h0·C_G(x).
    #[arg(long, allow_hyphen_values = true)]
    pub witness_for: Option<String>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per RNG stream; estimates depend only on seed and chunk.
    #[arg(long, default_value_t = DEFAULT_MC_CHUNK, value_parser = chunk_parser)]
    pub chunk: usize,
}

#[derive(Args, Debug)]
pub struct CommProbArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Ball radius around the identity (ignored for exact groups).
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Centre of the balls; defaults to the identity.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Comma-separated radii.
    #[arg(long, default_value = "0.4,0.2,0.1")]
    pub epsilon: String,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub group: GroupArg,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Frobenius-norm tolerance for matrix membership checks.
    #[arg(long, default_value_t = MATRIX_TOL, value_parser = positive)]
    pub matrix_tol: f64,
}

fn chunk_parser(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(c) if c >= 1 => Ok(c),
        _ => Err(format!("chunk must be a positive integer, got {s}")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s}")),
    }
}

/// A sweep or per-class table: column names plus rows in sweep order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub version: String,
    pub group: Option<String>,
    pub group_digest: Option<String>,
    pub metadata: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Report {
    Table(Table),
    Estimate(MCEstimate),
}

impl Report {
    pub fn to_json(&self) -> String {
        let text = match self {
            Report::Table(t) => serde_json::to_string_pretty(t),
            Report::Estimate(e) => serde_json::to_string_pretty(e),
        };
        text.expect("reports hold only finite JSON values")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self {
            Report::Table(t) => {
                w.write_record(&t.columns).expect("in-memory write");
                for row in &t.rows {
                    w.write_record(row.iter().map(cell)).expect("in-memory write");
                }
            }
            Report::Estimate(e) => w.serialize(e).expect("in-memory write"),
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json() + "\n",
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON numbers must be finite; anything else is written as a string.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn rational(r: Rational64) -> Value {
    json!(r.to_string())
}

fn table(command: &str, spec: Option<&GroupSpec>, columns: &[&str]) -> Table {
    Table {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        group: spec.map(GroupSpec::describe),
        group_digest: spec.map(GroupSpec::digest),
        metadata: BTreeMap::new(),
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows: Vec::new(),
    }
}

fn finite(spec: &GroupSpec) -> Result<&Arc<FiniteGroup>, Error> {
    match spec {
        GroupSpec::Finite(g) => Ok(g),
        other => Err(Error::InvalidArgument(format!("{} is not a finite permutation group", other.describe()))),
    }
}

fn finite_table(a: &GroupArg, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.group, caps)?;
    let g = finite(&spec)?;
    let t = g.character_table_with(caps)?;
    let mut out = table("finite-table", Some(&spec), &["character", "degree", "class", "representative", "class_size", "re", "im"]);
    for row in 0..t.len() {
        for (c, class) in g.conjugacy_classes().iter().enumerate() {
            let v = t.value(row, c);
            out.rows.push(vec![
                json!(row),
                json!(t.degree(row)),
                json!(c),
                json!(g.element(class.representative).to_string()),
                json!(class.size()),
                num(v.re),
                num(v.im),
            ]);
        }
    }
    out.metadata.insert("row_orthogonality_error".into(), num(t.row_orthogonality_error()));
    out.metadata.insert("column_orthogonality_error".into(), num(t.column_orthogonality_error()));
    Ok(Report::Table(out))
}

fn finite_frobenius(a: &FrobeniusArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.group.group, caps)?;
    let g = finite(&spec)?;
    let order = g.order() as i64;
    let mut out = table(
        "finite-frobenius",
        Some(&spec),
        &["class", "representative", "class_size", "frobenius", "brute_force", "measure"],
    );
    for (c, class) in g.conjugacy_classes().iter().enumerate() {
        let rep = class.representative;
        let f = frobenius_fiber(g, rep)?;
        let brute = if a.no_brute_force { Value::Null } else { json!(brute_force_fiber(g, rep, caps)?) };
        out.rows.push(vec![
            json!(c),
            json!(g.element(rep).to_string()),
            json!(class.size()),
            json!(f),
            brute,
            rational(Rational64::new(f as i64, order * order)),
        ]);
    }
    Ok(Report::Table(out))
}

fn torus_sum(a: &TorusArgs) -> Result<Report, Error> {
    let theta = parse_angle_list(&a.theta)?;
    if theta.is_empty() {
        return Err(Error::InvalidArgument("theta needs at least one angle".into()));
    }
    let spec = GroupSpec::Torus(theta.len());
    let mut out = table("torus-sum", Some(&spec), &["depth", "count", "value", "bound", "limit"]);
    for n in a.sweep.depths() {
        let r = torus_partial_sum(&theta, n);
        out.rows.push(vec![json!(n), json!(r.count.to_string()), num(r.value.re), num(r.bound), json!(r.limit)]);
    }
    out.metadata.insert("theta".into(), json!(a.theta));
    Ok(Report::Table(out))
}

fn sun_sum(a: &SunArgs, caps: &Caps) -> Result<Report, Error> {
    let n = a.n as usize;
    let theta = parse_angle_list(&a.angles)?;
    let spec = GroupSpec::SpecialUnitary(n);
    let reports = su_convergence(n, &theta, a.sweep.depth, a.chunk, caps)?;
    let mut out = table(
        "sun-sum",
        Some(&spec),
        &["depth", "irr_count", "raw_re", "raw_im", "normalized_re", "normalized_im", "bound", "violates_bound"],
    );
    for d in a.sweep.depths() {
        let r = &reports[d as usize];
        out.rows.push(vec![
            json!(r.depth),
            json!(r.irr_count.to_string()),
            num(r.raw.re),
            num(r.raw.im),
            num(r.normalized.re),
            num(r.normalized.im),
            num(r.bound),
            json!(r.violates_bound),
        ]);
    }
    out.metadata.insert("angles".into(), json!(a.angles));
    out.metadata.insert("exponent".into(), json!(reports[0].exponent));
    out.metadata.insert("chunk_size".into(), json!(a.chunk));
    Ok(Report::Table(out))
}

fn trivial_group(caps: &Caps) -> Result<Arc<FiniteGroup>, Error> {
    Ok(Arc::new(enumerate_group(&[Perm::identity(1)], caps)?))
}

/// Views finite groups, tori and their products (with at most one finite
/// factor) as FC quotients with trivial `N`.
fn as_fc(spec: &GroupSpec, caps: &Caps) -> Result<Arc<FcGroup>, Error> {
    fn collect<'a>(spec: &'a GroupSpec, k: &mut usize, finite: &mut Vec<&'a Arc<FiniteGroup>>) -> Result<(), Error> {
        match spec {
            GroupSpec::Finite(g) => finite.push(g),
            GroupSpec::Torus(d) => *k += d,
            GroupSpec::Product(parts) => {
                for p in parts {
                    collect(p, k, finite)?;
                }
            }
            other => {
                return Err(Error::InvalidArgument(format!("{} is not an FC group of the form (T^k × Δ)/N", other.describe())))
            }
        }
        Ok(())
    }
    if let GroupSpec::FcQuotient(g) = spec {
        return Ok(g.clone());
    }
    let (mut k, mut parts) = (0, Vec::new());
    collect(spec, &mut k, &mut parts)?;
    let delta = match parts.as_slice() {
        [] => trivial_group(caps)?,
        [g] => Arc::clone(g),
        _ => return Err(Error::InvalidArgument("products with more than one finite factor are not supported".into())),
    };
    Ok(Arc::new(build_fc_group(k, delta, vec![])?))
}

fn fc_point(spec: &GroupSpec, fc: &FcGroup, p: &GroupPoint) -> Result<FcPoint, Error> {
    fn walk(p: &GroupPoint, fc: &FcGroup, torus: &mut Vec<Angle>, delta: &mut Option<usize>) -> Result<(), Error> {
        match p {
            GroupPoint::Torus(t) => torus.extend(t.iter().copied()),
            GroupPoint::Permutation(x) => {
                *delta = Some(fc.delta().index_of(x).ok_or_else(|| Error::SpecMismatch(format!("{x} is not in Δ")))?)
            }
            GroupPoint::Product(xs) => {
                for x in xs {
                    walk(x, fc, torus, delta)?;
                }
            }
            other => return Err(Error::SpecMismatch(format!("{other:?} is not a point of an FC quotient"))),
        }
        Ok(())
    }
    if let GroupPoint::Coset(x) = p {
        return Ok(x.clone());
    }
    let (mut torus, mut delta) = (Vec::new(), None);
    walk(p, fc, &mut torus, &mut delta)?;
    let delta = delta.unwrap_or_else(|| fc.delta().identity());
    let point = FcPoint { torus, delta };
    if !fc.contains(&point) {
        return Err(Error::SpecMismatch(format!("{} is not a point of {}", spec.format_point(p), fc.describe())));
    }
    Ok(point)
}

fn point_or_identity(spec: &GroupSpec, point: &Option<String>) -> Result<GroupPoint, Error> {
    match point {
        Some(s) => spec.parse_point(s),
        None => Ok(spec.identity()),
    }
}

fn fc_measure(a: &FcArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.group.group, caps)?;
    let fc = as_fc(&spec, caps)?;
    let p = point_or_identity(&spec, &a.point)?;
    let x = fc_point(&spec, &fc, &p)?;
    let exact = fc.fiber_exact(&x, caps)?;
    let exact_f = exact.to_f64().unwrap_or(f64::NAN);
    let c = fc.convergence_constant(&x, caps)?;
    let mut out = table(
        "fc-measure",
        Some(&spec),
        &["depth", "characters", "formula", "exact", "difference", "error_bound"],
    );
    for t in a.sweep.depths() {
        let f = fc.fiber_formula(&x, t)?;
        out.rows.push(vec![
            json!(t),
            json!(fc.enumerate_characters(t).characters.len()),
            num(f),
            num(exact_f),
            num((f - exact_f).abs()),
            num(c / (2 * t + 1) as f64),
        ]);
    }
    out.metadata.insert("point".into(), json!(spec.format_point(&p)));
    out.metadata.insert("exact".into(), rational(exact));
    out.metadata.insert("convergence_constant".into(), num(c));
    out.metadata.insert("torus_trivial".into(), json!(fc.is_torus_trivial(&x, caps)?));
    Ok(Report::Table(out))
}

fn openfc_measure(a: &OpenFcArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.group.group, caps)?;
    let GroupSpec::Semidirect(g) = &spec else {
        return Err(Error::InvalidArgument(format!("{} is not a semidirect product T^k ⋊ Φ", spec.describe())));
    };
    let GroupPoint::Semidirect(p) = point_or_identity(&spec, &a.point)? else {
        unreachable!("points of a semidirect spec are semidirect points")
    };
    let centre = g.fc_centre();
    let measure = g.restricted_fiber_measure(&p, caps)?;
    let mut columns = vec!["point", "phi_order", "kernel_order", "index", "whole_group", "measure", "measure_value"];
    let mut row = vec![
        json!(spec.format_point(&GroupPoint::Semidirect(p.clone()))),
        json!(g.phi().order()),
        json!(centre.kernel_order),
        json!(centre.index),
        json!(centre.is_whole_group),
        rational(measure),
        num(measure.to_f64().unwrap_or(f64::NAN)),
    ];
    if let Some(xs) = &a.witness_for {
        let GroupPoint::Semidirect(x) = spec.parse_point(xs)? else {
            unreachable!("points of a semidirect spec are semidirect points")
        };
        let w = g.coset_witness(&x, &p, a.trials as usize, a.seed)?;
        columns.extend(["witness_x", "h0", "trials", "passes"]);
        row.extend([
            json!(xs),
            json!(spec.format_point(&GroupPoint::Semidirect(w.h0.clone()))),
            json!(w.trials),
            json!(w.passes),
        ]);
    }
    let mut out = table("openfc-measure", Some(&spec), &columns);
    out.rows.push(row);
    Ok(Report::Table(out))
}

fn mc_commprob(a: &CommProbArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.mc.group.group, caps)?;
    let est = estimate_commuting_probability(&spec, a.mc.samples, a.mc.seed, a.epsilon, a.mc.chunk)?;
    Ok(Report::Estimate(est))
}

fn mc_ball(a: &BallArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.mc.group.group, caps)?;
    let g = point_or_identity(&spec, &a.point)?;
    let mut radii = Vec::new();
    for piece in a.epsilon.split(',') {
        radii.push(positive(piece.trim()).map_err(Error::InvalidArgument)?);
    }
    radii.sort_by(|x, y| y.total_cmp(x));
    let runs = ball_decay(&spec, &g, &radii, a.mc.samples, a.mc.seed, a.mc.chunk)?;
    let mut out = table(
        "mc-ball",
        Some(&spec),
        &["epsilon", "estimate", "std_error", "hits", "samples", "seed", "z_from_previous", "wall_time"],
    );
    for (i, r) in runs.iter().enumerate() {
        let z = if i == 0 { Value::Null } else { num(runs[i - 1].z_score(r)) };
        out.rows.push(vec![
            num(r.epsilon.unwrap_or(f64::NAN)),
            num(r.estimate),
            num(r.std_error),
            json!(r.hits),
            json!(r.samples),
            json!(r.seed),
            z,
            num(r.wall_time),
        ]);
    }
    out.metadata.insert("point".into(), json!(spec.format_point(&g)));
    out.metadata.insert("metric".into(), json!(spec.metric_name()));
    out.metadata.insert("chunk_size".into(), json!(a.mc.chunk));
    Ok(Report::Table(out))
}

fn validate(a: &ValidateArgs, caps: &Caps) -> Result<Report, Error> {
    let spec = load_group(&a.group.group, caps)?;
    let mut out = table("validate", Some(&spec), &["check", "passed", "detail"]);
    out.rows.push(vec![json!("descriptor"), json!(true), json!(spec.describe())]);
    out.rows.push(vec![json!("dimension"), json!(true), json!(format!("dim {}, rank {}", spec.dimension(), spec.rank()))]);
    if let GroupSpec::Finite(g) = &spec {
        let t = g.character_table_with(caps)?;
        let err = t.row_orthogonality_error().max(t.column_orthogonality_error());
        let ok = err < commfiber::finite::ORTHOGONALITY_TOL;
        out.rows.push(vec![json!("character_orthogonality"), json!(ok), num(err)]);
        let mut mismatches = Vec::new();
        for class in g.conjugacy_classes() {
            let rep = class.representative;
            if frobenius_fiber(g, rep)? != brute_force_fiber(g, rep, caps)? {
                mismatches.push(g.element(rep).to_string());
            }
        }
        out.rows.push(vec![json!("frobenius_vs_brute_force"), json!(mismatches.is_empty()), json!(mismatches.join(" "))]);
    }
    if let Some(s) = &a.point {
        let p = spec.parse_point(s)?;
        let ok = spec.contains_within(&p, a.matrix_tol);
        out.rows.push(vec![json!("point"), json!(ok), json!(spec.format_point(&p))]);
    }
    out.metadata.insert("matrix_tol".into(), num(a.matrix_tol));
    let failed: Vec<String> = out.rows.iter().filter(|r| r[1] == json!(false)).map(|r| cell(&r[0])).collect();
    if !failed.is_empty() {
        return Err(Error::InvalidArgument(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(Report::Table(out))
}

/// Computes the report for one command.
pub fn execute(command: &Command, caps: &Caps) -> Result<Report, Error> {
    match command {
        Command::FiniteTable(a) => finite_table(a, caps),
        Command::FiniteFrobenius(a) => finite_frobenius(a, caps),
        Command::TorusSum(a) => torus_sum(a),
        Command::SunSum(a) => sun_sum(a, caps),
        Command::FcMeasure(a) => fc_measure(a, caps),
        Command::OpenfcMeasure(a) => openfc_measure(a, caps),
        Command::McCommprob(a) => mc_commprob(a, caps),
        Command::McBall(a) => mc_ball(a, caps),
        Command::Validate(a) => validate(a, caps),
    }
}

/// Exit status for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

/// Joins two-word spellings such as `sun sum` into the subcommand name.
pub fn normalize_args(mut args: Vec<String>) -> Vec<String> {
    const JOINED: [&str; 8] = [
        "finite-table",
        "finite-frobenius",
        "torus-sum",
        "sun-sum",
        "fc-measure",
        "openfc-measure",
        "mc-commprob",
        "mc-ball",
    ];
    if args.len() >= 3 {
        let joined = format!("{}-{}", args[1], args[2]);
        if JOINED.contains(&joined.as_str()) {
            args.splice(1..3, [joined]);
        }
    }
    args
}

/// Parses arguments, runs the command and writes the report; returns the exit status.
pub fn run(args: Vec<String>, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads as usize).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start {} threads: {e}", cli.threads);
            return 2;
        }
    };
    let caps = Caps::from_env();
    match pool.install(|| execute(&cli.command, &caps)) {
        Ok(report) => {
            if let Err(e) = stdout.write_all(report.render(cli.format).as_bytes()) {
                let _ = writeln!(stderr, "error: writing output: {e}");
                return 2;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
