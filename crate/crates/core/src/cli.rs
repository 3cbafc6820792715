//! The `tvb` command line: document format, subcommands and report rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle_ops::{self, DivisorData};
use crate::cohomology::{cech_all, ext_graded, global_sections, GradedDims};
use crate::complexity_one::{self, C1Chart, C1Data, C1Point, Choices, Location};
use crate::deformation::{obstruction_report, unobstructed_fano};
use crate::downgrade::{downgrade_bundle, downgrade_fan, line_summand_profile, render_prefan, ProjectionData};
use crate::error::Error;
use crate::examples;
use crate::filtration::{check_compatibility, Filtration, KlyachkoBundle};
use crate::lattice::matrix::Q;
use crate::lattice::{fan_validate, Fan, Subspace};
use crate::sampling;
use crate::splitting::{split_into_line_bundles, SplittingResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Exact rational as [numerator, denominator].
pub type RatDoc = [i64; 2];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub level: i64,
    pub basis: Vec<Vec<RatDoc>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub rank: usize,
    /// Keyed by ray index; rays left out carry the trivial filtration jumping at 0.
    #[serde(default)]
    pub filtrations: BTreeMap<String, Vec<StepDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocationDoc {
    Finite(RatDoc),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointDoc {
    pub label: String,
    pub location: LocationDoc,
    pub v: Vec<RatDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C1Doc {
    pub rank: usize,
    #[serde(default)]
    pub h: Vec<Vec<i64>>,
    pub charts: Vec<Vec<PointDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bundles: BTreeMap<String, BundleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub divisors: BTreeMap<String, Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<C1Doc>,
}

/// Failure of a command: exit code and message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        input_error(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn rat_doc(x: &Q) -> CliResult<RatDoc> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok([n, d]),
        _ => Err(input_error("rational out of range for the document format")),
    }
}

fn rat_from(r: &RatDoc) -> CliResult<Q> {
    if r[1] == 0 {
        return Err(input_error("zero denominator"));
    }
    Ok(Q::new(BigInt::from(r[0]), BigInt::from(r[1])))
}

pub fn subspace_doc(s: &Subspace) -> CliResult<Vec<Vec<RatDoc>>> {
    s.vectors().iter().map(|v| v.iter().map(rat_doc).collect()).collect()
}

pub fn bundle_doc(v: &KlyachkoBundle) -> CliResult<BundleDoc> {
    let mut filtrations = BTreeMap::new();
    for (k, f) in v.filtrations().iter().enumerate() {
        let steps = f
            .steps()
            .iter()
            .map(|(l, s)| Ok(StepDoc { level: *l, basis: subspace_doc(s)? }))
            .collect::<CliResult<Vec<_>>>()?;
        filtrations.insert(k.to_string(), steps);
    }
    Ok(BundleDoc { rank: v.rank(), filtrations })
}

pub fn bundle_from_doc(fan: &Arc<Fan>, doc: &BundleDoc) -> CliResult<KlyachkoBundle> {
    let n = fan.rays().len();
    let mut fils: Vec<Filtration> = (0..n).map(|_| Filtration::trivial(doc.rank, 0)).collect();
    for (key, steps) in &doc.filtrations {
        let k: usize = key.parse().map_err(|_| input_error(format!("ray key {:?} is not an index", key)))?;
        if k >= n {
            return Err(input_error(format!("ray index {} out of range", k)));
        }
        let steps = steps
            .iter()
            .map(|s| {
                let rows = s
                    .basis
                    .iter()
                    .map(|r| {
                        if r.len() != doc.rank {
                            return Err(input_error("basis vector of the wrong length"));
                        }
                        r.iter().map(rat_from).collect::<CliResult<Vec<Q>>>()
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Ok((s.level, Subspace::span(doc.rank, rows)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        fils[k] = Filtration::new(doc.rank, steps)?;
    }
    Ok(KlyachkoBundle::on_fan(fan, doc.rank, fils)?)
}

pub fn fan_document(fan: &Fan) -> Document {
    Document {
        schema_version: SCHEMA_VERSION,
        rank: fan.rank(),
        rays: fan.rays().iter().map(|r| r.to_i64()).collect(),
        cones: fan.maximal_cones().to_vec(),
        bundles: BTreeMap::new(),
        projection: None,
        divisors: BTreeMap::new(),
        c1: None,
    }
}

pub fn c1_from_doc(doc: &C1Doc) -> CliResult<C1Data> {
    let charts = doc
        .charts
        .iter()
        .map(|pts| {
            let points = pts
                .iter()
                .map(|p| {
                    let location = match &p.location {
                        LocationDoc::Finite(r) => Location::Finite(rat_from(r)?),
                        LocationDoc::Named(s) if s == "inf" => Location::Infinity,
                        LocationDoc::Named(s) => return Err(input_error(format!("unknown location {:?}", s))),
                    };
                    let v = p.v.iter().map(rat_from).collect::<CliResult<Vec<_>>>()?;
                    Ok(C1Point { label: p.label.clone(), location, v })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(C1Chart { points })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let data = C1Data { rank: doc.rank, h: doc.h.clone(), charts };
    data.validate()?;
    Ok(data)
}

pub fn c1_doc(data: &C1Data) -> CliResult<C1Doc> {
    let charts = data
        .charts
        .iter()
        .map(|c| {
            c.points
                .iter()
                .map(|p| {
                    Ok(PointDoc {
                        label: p.label.clone(),
                        location: match &p.location {
                            Location::Finite(a) => LocationDoc::Finite(rat_doc(a)?),
                            Location::Infinity => LocationDoc::Named("inf".into()),
                        },
                        v: p.v.iter().map(rat_doc).collect::<CliResult<Vec<_>>>()?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(C1Doc { rank: data.rank, h: data.h.clone(), charts })
}

/// A fan argument is a document path or one of the built-in names.
pub fn load(fan_arg: &str) -> CliResult<(Arc<Fan>, Document)> {
    if Path::new(fan_arg).is_file() {
        let text = std::fs::read_to_string(fan_arg).map_err(input_error)?;
        let doc: Document = serde_json::from_str(&text).map_err(input_error)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(input_error(format!("unsupported schema_version {}", doc.schema_version)));
        }
        let fan = Arc::new(Fan::from_i64(doc.rank, &doc.rays, &doc.cones)?);
        for (name, d) in &doc.divisors {
            if d.len() != fan.rays().len() {
                return Err(input_error(format!("divisor {} has the wrong number of coefficients", name)));
            }
        }
        for b in doc.bundles.values() {
            bundle_from_doc(&fan, b)?;
        }
        return Ok((fan, doc));
    }
    match examples::by_name(fan_arg) {
        Some(f) => {
            let doc = fan_document(&f);
            Ok((f, doc))
        }
        None => Err(input_error(format!(
            "{:?} is neither a file nor a built-in fan ({})",
            fan_arg,
            examples::NAMES.join(", ")
        ))),
    }
}

/// Bundles named in the document first, then divisors, then the built-ins.
pub fn resolve_bundle(fan: &Arc<Fan>, doc: &Document, name: &str) -> CliResult<KlyachkoBundle> {
    if let Some(b) = doc.bundles.get(name) {
        return bundle_from_doc(fan, b);
    }
    if let Some(d) = doc.divisors.get(name) {
        return Ok(bundle_ops::line_bundle(fan, &DivisorData::new(d.clone()))?);
    }
    Ok(match name {
        "tangent" => bundle_ops::tangent(fan)?,
        "cotangent" => bundle_ops::cotangent(fan)?,
        "canonical" => bundle_ops::canonical(fan)?,
        "trivial" => bundle_ops::line_bundle(fan, &DivisorData::zero(fan.rays().len()))?,
        _ => return Err(input_error(format!("unknown bundle {:?}", name))),
    })
}

pub fn parse_rows(s: &str) -> CliResult<Vec<Vec<i64>>> {
    s.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(parse_ints)
        .collect()
}

pub fn parse_ints(s: &str) -> CliResult<Vec<i64>> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| input_error(format!("not an integer: {:?}", t))))
        .collect()
}

fn fmt_q(x: &Q) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn fmt_vec(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}

fn fmt_space(s: &Subspace) -> String {
    if s.is_zero() {
        "0".into()
    } else if s.is_full() {
        format!("K^{}", s.ambient_dim())
    } else {
        format!("<{}>", s.vectors().iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(", "))
    }
}

pub fn ray_labels(fan: &Fan) -> Vec<String> {
    fan.rays().iter().enumerate().map(|(k, r)| format!("ray {} {:?}", k, r.to_i64())).collect()
}

/// Case-style table: one line per level range.
pub fn filtration_table(labels: &[String], v: &KlyachkoBundle) -> String {
    let mut s = String::new();
    for (k, f) in v.filtrations().iter().enumerate() {
        let _ = writeln!(s, "{}:", labels.get(k).cloned().unwrap_or_else(|| format!("ray {}", k)));
        let steps = f.steps();
        if steps.is_empty() {
            let _ = writeln!(s, "  E(i) = 0  for all i");
            continue;
        }
        let mut prev: Option<i64> = None;
        for (l, sp) in steps {
            let range = match prev {
                None => format!("i <= {}", l),
                Some(p) if p + 1 == *l => format!("i = {}", l),
                Some(p) => format!("{} <= i <= {}", p + 1, l),
            };
            let _ = writeln!(s, "  E(i) = {:<24} {}", fmt_space(sp), range);
            prev = Some(*l);
        }
        let _ = writeln!(s, "  E(i) = {:<24} i > {}", "0", prev.unwrap_or(0));
    }
    s
}

fn graded_json(g: &GradedDims) -> Value {
    let entries: Vec<Value> = g.entries.iter().map(|(u, d)| json!({"u": u, "dim": d})).collect();
    json!({"total": g.total(), "degrees": entries})
}

fn graded_text(g: &GradedDims) -> String {
    let mut s = String::new();
    for (u, d) in &g.entries {
        let _ = writeln!(s, "  u = {:?}: {}", u, d);
    }
    let _ = writeln!(s, "  total: {}", g.total());
    s
}

/// Totals on each coordinate axis of M (including the origin).
pub fn axis_totals(g: &GradedDims, rank: usize) -> Vec<usize> {
    (0..rank)
        .map(|j| g.entries.iter().filter(|(u, _)| u.iter().enumerate().all(|(i, x)| i == j || *x == 0)).map(|(_, d)| d).sum())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// Human-readable report.
    Text,
    /// Case-style filtration tables.
    Filtrations,
    /// Degree-by-degree listing.
    Graded,
    /// Machine-readable JSON.
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Sum,
    Tensor,
    Wedge,
    Sym,
    Dual,
    Det,
}

#[derive(Debug, Parser)]
#[command(name = "tvb", version, about = "Exact computations with toric vector bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Document path or built-in fan name.
    #[arg(long)]
    pub fan: String,
    #[arg(long, value_enum, default_value = "text")]
    pub emit: Emit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the fan and every bundle in the document.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Check compatibility of a bundle's filtrations on every maximal cone.
    Compat {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        /// Check a seeded random bundle of this rank instead.
        #[arg(long)]
        random_rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Filtrations of the tangent bundle.
    Tangent {
        #[command(flatten)]
        common: Common,
    },
    /// Graded global sections.
    Sections {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
    },
    /// Graded Čech cohomology.
    Cohom {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long)]
        i: Option<usize>,
    },
    /// Graded Ext^i(V, W).
    Ext {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        /// Second argument; defaults to the first.
        #[arg(long)]
        with: Option<String>,
        #[arg(long, default_value_t = 1)]
        i: usize,
        /// List every degree in the text report.
        #[arg(long)]
        graded: bool,
    },
    /// The line bundle of a divisor given by its ray coefficients.
    LineBundle {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
    },
    /// Direct sum, tensor, exterior and symmetric powers, dual, determinant.
    Ops {
        #[arg(value_enum)]
        op: Op,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long)]
        with: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Downgrade along a surjection mu: N -> N-bar.
    Downgrade {
        #[command(flatten)]
        common: Common,
        /// Rows separated by ';'; defaults to the document's projection.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long)]
        bundle: Option<String>,
    },
    /// Equivariant splitting into line bundles.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "tangent")]
        bundle: String,
        #[arg(long)]
        random_rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Both sides of the obstruction isomorphism for the tangent bundle.
    Obstructions {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        i: usize,
    },
    /// Global vector fields from complexity-one data.
    C1Sections {
        #[command(flatten)]
        common: Common,
        /// Rank-one projection used to build the data; defaults to the document's c1 block or projection.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Single degree instead of the total.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resampled choices of V(u) and ε to compare.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

/// Result of a command: exit code and output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    json: Value,
    text: String,
}

impl Report {
    fn ok(json: Value, text: String) -> Report {
        Report { code: 0, json, text }
    }
}

fn render(emit: Emit, r: Report) -> Outcome {
    let stdout = match emit {
        Emit::Json => serde_json::to_string_pretty(&r.json).expect("serializable") + "\n",
        _ => r.text,
    };
    Outcome { code: r.code, stdout, stderr: String::new() }
}

pub fn run_cli(cli: Cli) -> Outcome {
    let emit = match &cli.command {
        Command::Validate { common }
        | Command::Compat { common, .. }
        | Command::Tangent { common }
        | Command::Sections { common, .. }
        | Command::Cohom { common, .. }
        | Command::Ext { common, .. }
        | Command::LineBundle { common, .. }
        | Command::Ops { common, .. }
        | Command::Downgrade { common, .. }
        | Command::Split { common, .. }
        | Command::Obstructions { common, .. }
        | Command::C1Sections { common, .. } => common.emit,
    };
    match dispatch(&cli.command, emit) {
        Ok(r) => render(emit, r),
        Err(f) => {
            let stdout = if emit == Emit::Json {
                serde_json::to_string_pretty(&json!({"error": f.message, "code": f.code})).expect("serializable") + "\n"
            } else {
                String::new()
            };
            Outcome { code: f.code, stdout, stderr: format!("error: {}\n", f.message) }
        }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

fn bundle_report(fan: &Fan, name: &str, v: &KlyachkoBundle) -> CliResult<Report> {
    let mut doc = fan_document(fan);
    doc.bundles.insert(name.to_string(), bundle_doc(v)?);
    let text = format!("{} (rank {})\n{}", name, v.rank(), filtration_table(&ray_labels(fan), v));
    Ok(Report::ok(serde_json::to_value(&doc).expect("serializable"), text))
}

fn random_or_named(
    fan: &Arc<Fan>,
    doc: &Document,
    bundle: &str,
    random_rank: Option<usize>,
    seed: u64,
) -> CliResult<(String, KlyachkoBundle)> {
    match random_rank {
        Some(r) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((format!("random{}", seed), sampling::random_bundle(&mut rng, fan, r, r + 1)))
        }
        None => Ok((bundle.to_string(), resolve_bundle(fan, doc, bundle)?)),
    }
}

fn dispatch(cmd: &Command, emit: Emit) -> CliResult<Report> {
    match cmd {
        Command::Validate { common } => {
            let (fan, doc) = load(&common.fan)?;
            let d = fan_validate(&fan);
            let mut bundles = BTreeMap::new();
            let mut text = format!(
                "fan: rank {}, {} rays, {} maximal cones\n  smooth: {}\n  simplicial: {}\n  complete: {}\n",
                fan.rank(),
                fan.rays().len(),
                fan.maximal_cones().len(),
                d.smooth,
                d.simplicial,
                d.complete
            );
            let mut code = 0;
            for name in doc.bundles.keys() {
                let v = resolve_bundle(&fan, &doc, name)?;
                let ok = check_compatibility(&v)?.is_ok();
                if !ok {
                    code = 1;
                }
                bundles.insert(name.clone(), ok);
                let _ = writeln!(text, "bundle {}: {}", name, if ok { "compatible" } else { "incompatible" });
            }
            let json = json!({
                "rank": fan.rank(),
                "smooth": d.smooth,
                "simplicial": d.simplicial,
                "complete": d.complete,
                "bundles_compatible": bundles,
            });
            Ok(Report { code, json, text })
        }
        Command::Compat { common, bundle, random_rank, seed } => {
            let (fan, doc) = load(&common.fan)?;
            let (name, v) = random_or_named(&fan, &doc, bundle, *random_rank, *seed)?;
            match check_compatibility(&v)? {
                Ok(decs) => {
                    let mut text = format!("{}: compatible\n", name);
                    let mut cones = Vec::new();
                    for (rays, d) in &decs {
                        let pieces: Vec<Value> = d
                            .pieces
                            .iter()
                            .map(|(u, s)| Ok(json!({"index": u, "basis": subspace_doc(s)?})))
                            .collect::<CliResult<_>>()?;
                        let _ = writeln!(
                            text,
                            "  cone {:?}: {}",
                            rays,
                            d.pieces.iter().map(|(u, s)| format!("{:?}->{}", u, fmt_space(s))).collect::<Vec<_>>().join("  ")
                        );
                        cones.push(json!({"rays": rays, "pieces": pieces}));
                    }
                    Ok(Report::ok(json!({"bundle": name, "compatible": true, "cones": cones}), text))
                }
                Err(f) => Ok(Report {
                    code: 1,
                    json: json!({"bundle": name, "compatible": false, "cone": f.cone, "ray": f.ray, "level": f.level}),
                    text: format!("{}: incompatible on cone {} (ray {}, level {})\n", name, f.cone, f.ray, f.level),
                }),
            }
        }
        Command::Tangent { common } => {
            let (fan, _) = load(&common.fan)?;
            let t = bundle_ops::tangent(&fan)?;
            bundle_report(&fan, "tangent", &t)
        }
        Command::Sections { common, bundle } => {
            let (fan, doc) = load(&common.fan)?;
            let v = resolve_bundle(&fan, &doc, bundle)?;
            let g = global_sections(&v)?;
            let text = format!("H^0({}) by degree:\n{}", bundle, graded_text(&g));
            Ok(Report::ok(json!({"bundle": bundle, "h0": graded_json(&g)}), text))
        }
        Command::Cohom { common, bundle, i } => {
            let (fan, doc) = load(&common.fan)?;
            let v = resolve_bundle(&fan, &doc, bundle)?;
            let all = cech_all(&v)?;
            let degrees: Vec<usize> = match i {
                Some(i) => vec![*i],
                None => (0..=fan.rank()).collect(),
            };
            let mut text = String::new();
            let mut out = BTreeMap::new();
            for p in degrees {
                let g = all.get(p).cloned().unwrap_or_default();
                let _ = write!(text, "H^{}({}):\n{}", p, bundle, graded_text(&g));
                out.insert(p.to_string(), graded_json(&g));
            }
            Ok(Report::ok(json!({"bundle": bundle, "cohomology": out}), text))
        }
        Command::Ext { common, bundle, with, i, graded } => {
            let (fan, doc) = load(&common.fan)?;
            let v = resolve_bundle(&fan, &doc, bundle)?;
            let wname = with.clone().unwrap_or_else(|| bundle.clone());
            let w = resolve_bundle(&fan, &doc, &wname)?;
            let g = ext_graded(&v, &w, *i)?;
            let axes = axis_totals(&g, fan.rank());
            let mut text = format!("Ext^{}({}, {}): total {}\n", i, bundle, wname, g.total());
            if *graded || emit == Emit::Graded {
                text.push_str(&graded_text(&g));
            }
            for (j, t) in axes.iter().enumerate() {
                let _ = writeln!(text, "  axis {}: {}", j, t);
            }
            Ok(Report::ok(json!({"i": i, "v": bundle, "w": wname, "ext": graded_json(&g), "axis_totals": axes}), text))
        }
        Command::LineBundle { common, divisor } => {
            let (fan, _) = load(&common.fan)?;
            let d = parse_ints(divisor)?;
            if d.len() != fan.rays().len() {
                return Err(input_error(format!("expected {} coefficients", fan.rays().len())));
            }
            let l = bundle_ops::line_bundle(&fan, &DivisorData::new(d.clone()))?;
            let mut r = bundle_report(&fan, "line", &l)?;
            let g = global_sections(&l)?;
            r.json["h0"] = graded_json(&g);
            r.json["divisor"] = json!(d);
            if emit == Emit::Graded || emit == Emit::Text {
                let _ = write!(r.text, "H^0:\n{}", graded_text(&g));
            }
            Ok(r)
        }
        Command::Ops { op, common, bundle, with, k } => {
            let (fan, doc) = load(&common.fan)?;
            let v = resolve_bundle(&fan, &doc, bundle)?;
            let other = || -> CliResult<KlyachkoBundle> {
                let n = with.as_deref().ok_or_else(|| input_error("--with is required"))?;
                resolve_bundle(&fan, &doc, n)
            };
            let (name, out) = match op {
                Op::Sum => ("sum", bundle_ops::direct_sum(&v, &other()?)?),
                Op::Tensor => ("tensor", bundle_ops::tensor(&v, &other()?)?),
                Op::Wedge => ("wedge", bundle_ops::wedge(&v, *k)?),
                Op::Sym => ("sym", bundle_ops::sym(&v, *k)?),
                Op::Dual => ("dual", bundle_ops::dual(&v)?),
                Op::Det => ("det", bundle_ops::determinant(&v)?),
            };
            bundle_report(&fan, name, &out)
        }
        Command::Downgrade { common, mu, bundle } => {
            let (fan, doc) = load(&common.fan)?;
            let rows = match mu {
                Some(s) => parse_rows(s)?,
                None => doc.projection.clone().ok_or_else(|| input_error("--mu or a document projection is required"))?,
            };
            let proj = ProjectionData::from_i64_rows(fan.rank(), &rows)?;
            let res = downgrade_fan(&fan, &proj)?;
            let p = res.quotient.prefan();
            let quotient_rays: Vec<Value> = res
                .ray_map
                .iter()
                .map(|&r| json!({"ray": r, "vector": fan.ray(r).to_i64(), "image": proj.apply(fan.ray(r)).to_i64()}))
                .collect();
            let elements: Vec<Value> = (0..p.len())
                .map(|e| {
                    json!({
                        "name": p.name(e),
                        "cone": p.cone(e).generators().iter().map(|g| g.to_i64()).collect::<Vec<_>>(),
                        "sublattice": res.quotient.sublattice(e).iter().map(|g| g.to_i64()).collect::<Vec<_>>(),
                        "stabilizer": res.stabilizers[e].iter().map(|z| z.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let covers: Vec<Value> = p.covers().iter().map(|(a, b)| json!([p.name(*a), p.name(*b)])).collect();
            let contracted: Vec<Vec<i64>> = res.contracted.iter().map(|r| r.to_i64()).collect();
            let mut json = json!({
                "mu": rows,
                "dm_rays": quotient_rays,
                "contracted_rays": res.contracted_rays,
                "contracted": contracted,
                "prefan": {"elements": elements, "covers": covers},
            });
            let mut text = String::new();
            let _ = writeln!(text, "DM-locus rays: {:?}", res.ray_map);
            let _ = writeln!(text, "contracted H: {:?}", contracted);
            text.push_str(&render_prefan(&res.quotient));
            if let Some(b) = bundle {
                let v = resolve_bundle(&fan, &doc, b)?;
                let d = downgrade_bundle(&v, &proj)?;
                let _ = writeln!(text, "quotient filtrations of {}:", b);
                let labels: Vec<String> = res
                    .ray_map
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| format!("quotient ray {} (ray {} {:?})", k, r, fan.ray(r).to_i64()))
                    .collect();
                text.push_str(&filtration_table(&labels, &d.stacky_bundle));
                let mut hf = Vec::new();
                for h in &d.h_filtrations {
                    let _ = writeln!(text, "H-filtration of ray {}:", h.gamma);
                    let mut levels = Vec::new();
                    for l in &h.levels {
                        let _ = writeln!(text, "  level {}: {}", l.level, fmt_space(&l.space));
                        let mut fams = Vec::new();
                        for (k, f) in l.filtrations.iter().enumerate() {
                            let steps: Vec<String> =
                                f.steps.iter().map(|(i, s)| format!("{}:{}", i, fmt_space(s))).collect();
                            let _ = writeln!(text, "    quotient ray {}: {}", k, steps.join(" "));
                            let st = f
                                .steps
                                .iter()
                                .map(|(i, s)| Ok(json!({"level": i, "basis": subspace_doc(s)?})))
                                .collect::<CliResult<Vec<_>>>()?;
                            fams.push(json!(st));
                        }
                        levels.push(json!({"level": l.level, "space": subspace_doc(&l.space)?, "filtrations": fams}));
                    }
                    hf.push(json!({"gamma": h.gamma, "levels": levels}));
                }
                json["bundle"] = json!(b);
                json["h_filtrations"] = json!(hf);
                match line_summand_profile(&d) {
                    Ok(prof) => {
                        let mut ps = Vec::new();
                        for s in &prof {
                            let _ = writeln!(text, "summand {}: jumps {:?}", fmt_space(&s.line), s.jumps);
                            ps.push(json!({"line": subspace_doc(&s.line)?, "jumps": s.jumps}));
                        }
                        json["summands"] = json!(ps);
                    }
                    Err(_) => {
                        let _ = writeln!(text, "downgraded bundle does not split into lines");
                        json["summands"] = Value::Null;
                    }
                }
            }
            Ok(Report::ok(json, text))
        }
        Command::Split { common, bundle, random_rank, seed } => {
            let (fan, doc) = load(&common.fan)?;
            let (name, v) = random_or_named(&fan, &doc, bundle, *random_rank, *seed)?;
            match split_into_line_bundles(&v)? {
                SplittingResult::Split { summands } => {
                    let mut text = format!("{}: split\n", name);
                    let mut out = Vec::new();
                    for (d, l) in &summands {
                        let _ = writeln!(text, "  O({:?}) on {}", d.coefficients, fmt_space(l));
                        out.push(json!({"divisor": d.coefficients, "line": subspace_doc(l)?}));
                    }
                    Ok(Report::ok(json!({"bundle": name, "split": true, "summands": out}), text))
                }
                SplittingResult::NotSplit { ray, level } => Ok(Report {
                    code: 1,
                    json: json!({"bundle": name, "split": false, "ray": ray, "level": level}),
                    text: format!("{}: not split (ray {}, level {})\n", name, ray, level),
                }),
            }
        }
        Command::Obstructions { common, i } => {
            let (fan, _) = load(&common.fan)?;
            let r = obstruction_report(&fan, *i)?;
            let unobs = unobstructed_fano(&fan)?;
            let mut text = format!(
                "Ext^{}(T,T): total {}\nrestriction side: total {}\nmatch: {}\nevery invariant divisor Fano: {}\n",
                i, r.lhs_total, r.rhs_total, r.matches, unobs
            );
            for d in r.rhs.iter().filter(|d| d.dim > 0) {
                let _ = writeln!(text, "  rho {} gamma {}: {}", d.rho, d.gamma, d.dim);
            }
            let mut json = serde_json::to_value(&r).expect("serializable");
            json["unobstructed_fano"] = json!(unobs);
            Ok(Report { code: if r.matches { 0 } else { 1 }, json, text })
        }
        Command::C1Sections { common, mu, u, seed, samples } => {
            let (fan, doc) = load(&common.fan)?;
            let data = match (mu, &doc.c1, &doc.projection) {
                (Some(s), _, _) => {
                    complexity_one::from_projection(&fan, &ProjectionData::from_i64_rows(fan.rank(), &parse_rows(s)?)?)?
                }
                (None, Some(c), _) => c1_from_doc(c)?,
                (None, None, Some(p)) => complexity_one::from_projection(&fan, &ProjectionData::from_i64_rows(fan.rank(), p)?)?,
                _ => return Err(input_error("--mu, a c1 block or a projection is required")),
            };
            let data_doc = serde_json::to_value(c1_doc(&data)?).expect("serializable");
            match u {
                Some(s) => {
                    let u = parse_ints(s)?;
                    let d = complexity_one::vf_sections_degree(&data, &u)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let resampled: Vec<usize> = (0..*samples)
                        .map(|_| complexity_one::vf_sections_degree_with(&data, &u, &Choices::random(&mut rng, data.rank)))
                        .collect::<Result<_, _>>()?;
                    let stable = resampled.iter().all(|&x| x == d);
                    let text = format!(
                        "h0(T)_u at u = {:?}: {}\nresampled choices: {:?} (stable: {})\n",
                        u, d, resampled, stable
                    );
                    Ok(Report::ok(
                        json!({"data": data_doc, "u": u, "dim": d, "resampled": resampled, "stable": stable}),
                        text,
                    ))
                }
                None => {
                    let g = complexity_one::total_vf(&data)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let mut stable = true;
                    for _ in 0..*samples {
                        let c = Choices::random(&mut rng, data.rank);
                        for (uu, &d) in &g.entries {
                            if complexity_one::vf_sections_degree_with(&data, uu, &c)? != d {
                                stable = false;
                            }
                        }
                    }
                    let text = format!(
                        "complexity-one data: {} chart(s), H = {:?}\nglobal vector fields by degree:\n{}resampled choices stable: {}\n",
                        data.charts.len(),
                        data.h,
                        graded_text(&g),
                        stable
                    );
                    Ok(Report::ok(json!({"data": data_doc, "h0": graded_json(&g), "stable": stable}), text))
                }
            }
        }
    }
}
