//! Command-line surface. [`run`] is the whole program minus process exit, so tests drive it
//! in-process.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Rational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::ser::rational_to_string;
use crate::curves::{classify, parse_planar, parse_spatial, CurveClass, PlanarCurve};
use crate::invariants::{invariants, GroupTag};
use crate::points::{
    affine_point_invariants, decide_affine_points_with, decide_finite_points_with,
    projective_point_invariants, PointError, PointList2D, PointList3D, PointOptions,
};
use crate::projection::{decide_with, CameraClass, DecideError, DecideOptions};
use crate::signatures::{
    equivalent, normalize_implicit, parameter_grid, prepare, samples_csv, SignatureError,
    SignatureObject,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "curveproj",
    about = "Exact projection decisions for rational curves and point lists"
)]
struct Cli {
    /// Emit the full JSON result instead of a one-line summary.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on the degree of assembled parameter systems.
    #[arg(long, global = true, default_value_t = 400)]
    max_degree: u32,
    /// Cap on the coefficient bit size of eliminants.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_bits: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Class of a planar curve (line, conic type, constant signature, generic).
    Classify(CurveArgs),
    /// The invariant pair `(J, K)` as rational functions of `t`.
    Invariants(CurveArgs),
    /// The signature of a planar curve: implicit polynomial in `J, K` or a single point.
    Signature(CurveArgs),
    /// Group equivalence of two planar curves (`--curve` twice).
    Equiv(EquivArgs),
    /// Whether a spatial object projects onto a planar one.
    #[command(subcommand)]
    Project(ProjectCmd),
}

#[derive(Subcommand, Debug)]
enum ProjectCmd {
    Curve(ProjectCurveArgs),
    Points(ProjectPointsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Equiaffine,
    Affine,
    Projective,
}

impl From<GroupArg> for GroupTag {
    fn from(g: GroupArg) -> GroupTag {
        match g {
            GroupArg::Equiaffine => GroupTag::EquiAffine,
            GroupArg::Affine => GroupTag::Affine,
            GroupArg::Projective => GroupTag::Projective,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CameraArg {
    Finite,
    Affine,
}

impl From<CameraArg> for CameraClass {
    fn from(c: CameraArg) -> CameraClass {
        match c {
            CameraArg::Finite => CameraClass::Finite,
            CameraArg::Affine => CameraClass::Affine,
        }
    }
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    curve: String,
    #[arg(long, value_enum, default_value = "affine")]
    group: GroupArg,
    /// Write `t,J,K` samples of the invariant map to this CSV file.
    #[arg(long)]
    emit_samples: Option<String>,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[arg(long, num_args = 1, required = true)]
    curve: Vec<String>,
    #[arg(long, value_enum, default_value = "affine")]
    group: GroupArg,
}

#[derive(Args, Debug)]
struct ProjectCurveArgs {
    #[arg(long, value_enum)]
    camera: CameraArg,
    #[arg(long)]
    space: String,
    #[arg(long)]
    plane: String,
}

#[derive(Args, Debug)]
struct ProjectPointsArgs {
    #[arg(long, value_enum)]
    camera: CameraArg,
    #[arg(long)]
    points3d: String,
    #[arg(long)]
    points2d: String,
}

/// Everything a query prints with `--json`. Command-specific payloads live in `certificate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    /// Arguments after the program name.
    pub command: Vec<String>,
    /// `Yes`/`No`, `Equivalent`/`NotEquivalent`, a class tag, or absent.
    pub verdict: Option<String>,
    pub witness: Option<Value>,
    pub certificate: Value,
    pub error: Option<String>,
    pub exit_code: i32,
    pub elapsed_ms: u64,
}

impl QueryResult {
    /// Pretty JSON with keys in sorted order, so parsing and re-emitting is the identity.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}

struct Outcome {
    verdict: Option<String>,
    witness: Option<Value>,
    certificate: Value,
    summary: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(m: impl ToString) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: m.to_string(),
        }
    }
}

fn from_signature_error(e: SignatureError) -> Failure {
    match e {
        SignatureError::Implicitization => Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        },
        other => Failure::input(other),
    }
}

fn from_decide_error(e: DecideError) -> Failure {
    match e {
        DecideError::LimitExceeded { .. } => Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        },
        DecideError::Signature(s) => from_signature_error(s),
    }
}

fn from_point_error(e: PointError) -> Failure {
    match e {
        PointError::LimitExceeded(_) => Failure {
            code: EXIT_LIMIT,
            message: e.to_string(),
        },
        other => Failure::input(other),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn planar(text: &str) -> Result<PlanarCurve, Failure> {
    parse_planar(text).map_err(|e| Failure::input(format!("planar curve: {e}")))
}

fn class_label(c: &CurveClass) -> String {
    match c {
        CurveClass::Line => "line".into(),
        CurveClass::Parabola => "conic/parabola".into(),
        CurveClass::Ellipse => "conic/ellipse".into(),
        CurveClass::Hyperbola => "conic/hyperbola".into(),
        CurveClass::DegenerateSignature { .. } => "constant-signature".into(),
        CurveClass::Generic => "generic".into(),
    }
}

fn emit_samples(
    path: &Option<String>,
    gamma: &PlanarCurve,
    group: GroupTag,
) -> Result<Option<String>, Failure> {
    let Some(path) = path else { return Ok(None) };
    let pair = invariants(gamma, group).map_err(Failure::input)?;
    let ts = parameter_grid(&Rational::from(-3), &Rational::from(3), 121);
    std::fs::write(path, samples_csv(&pair, &ts))
        .map_err(|e| Failure::input(format!("{path}: {e}")))?;
    Ok(Some(path.clone()))
}

fn signature_value(sig: &SignatureObject) -> Value {
    match sig {
        SignatureObject::DegeneratePoint { j, k } => {
            json!({ "kind": "point", "j": rational_to_string(j), "k": rational_to_string(k) })
        }
        SignatureObject::Curve { map, implicit } => json!({
            "kind": "curve",
            "j": map.j.to_string(),
            "k": map.k.to_string(),
            "implicit": normalize_implicit(implicit).to_string(),
        }),
    }
}

fn run_classify(a: &CurveArgs) -> Result<Outcome, Failure> {
    let gamma = planar(&a.curve)?;
    let group = a.group.into();
    let class = classify(&gamma, group).map_err(Failure::input)?;
    let label = class_label(&class);
    Ok(Outcome {
        verdict: Some(label.clone()),
        witness: None,
        summary: label.clone(),
        certificate: json!({
            "class": label,
            "tag": to_value(&class),
            "conic": class.is_conic(),
            "exceptional": class.is_exceptional(group),
            "group": group.name(),
        }),
    })
}

fn run_invariants(a: &CurveArgs) -> Result<Outcome, Failure> {
    let gamma = planar(&a.curve)?;
    let group = a.group.into();
    let pair = invariants(&gamma, group).map_err(Failure::input)?;
    let samples = emit_samples(&a.emit_samples, &gamma, group)?;
    Ok(Outcome {
        verdict: None,
        witness: None,
        summary: format!("J = {}\nK = {}", pair.j, pair.k),
        certificate: json!({
            "group": group.name(),
            "j": pair.j.to_string(),
            "k": pair.k.to_string(),
            "samples": samples,
        }),
    })
}

fn run_signature(a: &CurveArgs) -> Result<Outcome, Failure> {
    let gamma = planar(&a.curve)?;
    let group = a.group.into();
    let p = prepare(&gamma, group).map_err(from_signature_error)?;
    let samples = if p.signature.is_some() {
        emit_samples(&a.emit_samples, &gamma, group)?
    } else {
        None
    };
    let (summary, sig) = match &p.signature {
        Some(s @ SignatureObject::Curve { implicit, .. }) => (
            format!("{} = 0", normalize_implicit(implicit)),
            signature_value(s),
        ),
        Some(s @ SignatureObject::DegeneratePoint { j, k }) => {
            (format!("point ({j}, {k})"), signature_value(s))
        }
        None => (
            format!("special class {}", class_label(&p.class)),
            Value::Null,
        ),
    };
    Ok(Outcome {
        verdict: None,
        witness: None,
        summary,
        certificate: json!({
            "group": group.name(),
            "class": class_label(&p.class),
            "signature": sig,
            "samples": samples,
        }),
    })
}

fn run_equiv(a: &EquivArgs) -> Result<Outcome, Failure> {
    let [c1, c2] = a.curve.as_slice() else {
        return Err(Failure::input("equiv needs exactly two --curve arguments"));
    };
    let (g1, g2) = (planar(c1)?, planar(c2)?);
    let group = a.group.into();
    let v = equivalent(&g1, &g2, group).map_err(from_signature_error)?;
    let verdict = format!("{:?}", v.verdict);
    Ok(Outcome {
        verdict: Some(verdict.clone()),
        witness: None,
        summary: verdict,
        certificate: json!({ "group": group.name(), "evidence": to_value(&v.evidence) }),
    })
}

fn run_project_curve(a: &ProjectCurveArgs, opts: &DecideOptions) -> Result<Outcome, Failure> {
    let space = parse_spatial(&a.space).map_err(|e| Failure::input(format!("space curve: {e}")))?;
    let gamma = planar(&a.plane)?;
    let class: CameraClass = a.camera.into();
    let d = decide_with(&space, &gamma, class, opts).map_err(from_decide_error)?;
    let group = match class {
        CameraClass::Finite => GroupTag::Projective,
        CameraClass::Affine => GroupTag::Affine,
    };
    let target = prepare(&gamma, group).map_err(from_signature_error)?;
    let verdict = format!("{:?}", d.verdict);
    let summary = match &d.witness {
        Some(w) => format!(
            "{verdict} ({} {:?})",
            w.family.name(),
            w.params.iter().map(rational_to_string).collect::<Vec<_>>()
        ),
        None => verdict.clone(),
    };
    Ok(Outcome {
        verdict: Some(verdict),
        witness: d.witness.as_ref().map(to_value),
        summary,
        certificate: json!({
            "camera": to_value(&class),
            "target_class": class_label(&target.class),
            "target_signature": target.signature.as_ref().map(signature_value),
            "verification": to_value(&d.verification),
            "trace": to_value(&d.trace),
        }),
    })
}

fn run_project_points(a: &ProjectPointsArgs, opts: &PointOptions) -> Result<Outcome, Failure> {
    let read =
        |p: &str| std::fs::read_to_string(p).map_err(|e| Failure::input(format!("{p}: {e}")));
    let z = PointList3D::from_csv(&read(&a.points3d)?).map_err(from_point_error)?;
    let x = PointList2D::from_csv(&read(&a.points2d)?).map_err(from_point_error)?;
    let class: CameraClass = a.camera.into();
    let d = match class {
        CameraClass::Finite => decide_finite_points_with(&z, &x, opts),
        CameraClass::Affine => decide_affine_points_with(&z, &x, opts),
    }
    .map_err(from_point_error)?;
    let target_invariants = match class {
        CameraClass::Finite => projective_point_invariants(&x),
        CameraClass::Affine => affine_point_invariants(&x),
    }
    .ok();
    let verdict = format!("{:?}", d.verdict);
    Ok(Outcome {
        verdict: Some(verdict.clone()),
        witness: d.witness.as_ref().map(to_value),
        summary: verdict,
        certificate: json!({
            "camera": to_value(&class),
            "points": z.len(),
            "target_invariants": target_invariants.as_ref().map(to_value),
            "trace": to_value(&d.trace),
        }),
    })
}

/// Runs one query. Returns the exit code and the text for standard output.
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, e.to_string());
        }
    };
    let start = Instant::now();
    let mut dopts = DecideOptions {
        max_degree: cli.max_degree,
        ..DecideOptions::default()
    };
    dopts.solve.max_bits = cli.max_bits;
    let mut popts = PointOptions::default();
    popts.solve.max_bits = cli.max_bits;
    let res = match &cli.cmd {
        Cmd::Classify(a) => run_classify(a),
        Cmd::Invariants(a) => run_invariants(a),
        Cmd::Signature(a) => run_signature(a),
        Cmd::Equiv(a) => run_equiv(a),
        Cmd::Project(ProjectCmd::Curve(a)) => run_project_curve(a, &dopts),
        Cmd::Project(ProjectCmd::Points(a)) => run_project_points(a, &popts),
    };
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let command = argv.iter().skip(1).cloned().collect();
    let (q, summary) = match res {
        Ok(o) => (
            QueryResult {
                command,
                verdict: o.verdict,
                witness: o.witness,
                certificate: o.certificate,
                error: None,
                exit_code: EXIT_OK,
                elapsed_ms,
            },
            o.summary,
        ),
        Err(f) => (
            QueryResult {
                command,
                verdict: None,
                witness: None,
                certificate: Value::Null,
                error: Some(f.message.clone()),
                exit_code: f.code,
                elapsed_ms,
            },
            format!("error: {}", f.message),
        ),
    };
    let out = if cli.json { q.to_json() } else { summary };
    (q.exit_code, out)
}
