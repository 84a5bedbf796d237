//! Deciders for projections of rational space curves onto planar curves under finite and
//! affine cameras.
//!
//! A finite camera maps `Gamma` onto `gamma` iff `gamma` is projectively equivalent to some
//! member of the family `eps_c = ((z1 + c1)/(z3 + c3), (z2 + c2)/(z3 + c3))`. An affine camera
//! does iff `gamma` is affinely equivalent to `alpha`, to some `beta_b` or to some `delta_cf`.
//! Each family is searched for a parameter value whose member is group-equivalent to
//! `gamma`; a YES always carries an exact equivalence certificate for the specialized member.

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::linalg::{self, Matrix};
use crate::algebra::solve::{
    diagonal_tuples, enumeration, exclude_points, solve_system_with, SolveError, SolveOptions,
};
use crate::algebra::{MultiPoly, RationalFunction, SolveOutcome, Var};
use crate::curves::{
    make_affine_families, make_epsilon_family, CurveClass, CurveFamily, PlanarCurve, SpatialCurve,
};
use crate::invariants::{jet, GroupTag, InvariantPair};
use crate::signatures::{
    compare_prepared, prepare, pullback, signature_of_map, EquivalenceVerdict, PreparedCurve,
    SignatureError, SignatureObject,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CameraError {
    #[error("matrix does not have rank 3")]
    RankDeficient,
    #[error("matrix is neither a finite nor an affine camera")]
    NotFiniteOrAffine,
    #[error("planar map has the wrong form for this camera class: {0}")]
    BadPlanarMap(&'static str),
    #[error("wrong number of parameters for family {0}")]
    ParamCount(&'static str),
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("size limit exceeded in family {family}: {detail}")]
    LimitExceeded {
        family: &'static str,
        detail: String,
        trace: Vec<BranchRecord>,
    },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CameraClass {
    Finite,
    Affine,
}

/// A 3x4 camera matrix of rank 3 with its class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionMatrix {
    #[serde(with = "rows")]
    pub entries: [[Rational; 4]; 3],
    pub class: CameraClass,
}

mod rows {
    use rug::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::algebra::ser::{parse_rational, rational_to_string};

    pub fn serialize<S: Serializer>(m: &[[Rational; 4]; 3], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|r| r.iter().map(rational_to_string).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[Rational; 4]; 3], D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        if v.len() != 3 || v.iter().any(|r| r.len() != 4) {
            return Err(D::Error::custom("camera matrix must be 3x4"));
        }
        let mut out: [[Rational; 4]; 3] = Default::default();
        for (i, r) in v.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                out[i][j] = parse_rational(x)
                    .ok_or_else(|| D::Error::custom(format!("bad rational {x:?}")))?;
            }
        }
        Ok(out)
    }
}

fn int(k: i64) -> Rational {
    Rational::from(k)
}

impl ProjectionMatrix {
    pub fn new(entries: [[Rational; 4]; 3]) -> Result<ProjectionMatrix, CameraError> {
        let m: Matrix = entries.iter().map(|r| r.to_vec()).collect();
        if linalg::rank(&m) != 3 {
            return Err(CameraError::RankDeficient);
        }
        let left = [0, 1, 2].map(|i| [0, 1, 2].map(|j| entries[i][j].clone()));
        let class =
            if entries[2][..3].iter().all(|x| x.cmp0().is_eq()) && entries[2][3].cmp0().is_ne() {
                CameraClass::Affine
            } else if linalg::det3(&left).cmp0().is_ne() {
                CameraClass::Finite
            } else {
                return Err(CameraError::NotFiniteOrAffine);
            };
        Ok(ProjectionMatrix { entries, class })
    }

    /// `[I | 0]`, the pinhole camera at the origin.
    pub fn standard_finite() -> ProjectionMatrix {
        let e = [0, 1, 2].map(|i| [0, 1, 2, 3].map(|j| int((i == j) as i64)));
        ProjectionMatrix::new(e).expect("standard finite camera")
    }

    /// Orthogonal projection onto the `z1 z2` plane.
    pub fn standard_affine() -> ProjectionMatrix {
        let mut e: [[Rational; 4]; 3] = Default::default();
        e[0][0] = int(1);
        e[1][1] = int(1);
        e[2][3] = int(1);
        ProjectionMatrix::new(e).expect("standard affine camera")
    }

    fn row(&self, i: usize, z: &[RationalFunction; 3]) -> RationalFunction {
        let r = &self.entries[i];
        z[0].scale(&r[0])
            .add(&z[1].scale(&r[1]))
            .add(&z[2].scale(&r[2]))
            .add(&RationalFunction::from_rational(&r[3]))
    }

    /// Image of a spatial curve; `None` if the last homogeneous coordinate vanishes identically.
    pub fn apply(&self, curve: &SpatialCurve) -> Option<PlanarCurve> {
        let w = self.row(2, &curve.z);
        if w.is_zero() {
            return None;
        }
        let x = self.row(0, &curve.z).div(&w).ok()?;
        let y = self.row(1, &curve.z).div(&w).ok()?;
        PlanarCurve::new(x, y).ok()
    }

    pub fn apply_point(&self, p: &[Rational; 3]) -> Option<[Rational; 2]> {
        let h: Vec<Rational> = (0..3)
            .map(|i| {
                let r = &self.entries[i];
                Rational::from(&r[0] * &p[0])
                    + Rational::from(&r[1] * &p[1])
                    + Rational::from(&r[2] * &p[2])
                    + &r[3]
            })
            .collect();
        if h[2].cmp0().is_eq() {
            return None;
        }
        Some([Rational::from(&h[0] / &h[2]), Rational::from(&h[1] / &h[2])])
    }

    /// Scales so that the last nonzero entry of the last row is 1.
    pub fn normalized(&self) -> ProjectionMatrix {
        let piv = self.entries[2]
            .iter()
            .rev()
            .find(|x| x.cmp0().is_ne())
            .cloned()
            .expect("rank 3");
        let entries = self.entries.clone().map(|r| r.map(|x| x / &piv));
        ProjectionMatrix {
            entries,
            class: self.class,
        }
    }
}

impl fmt::Display for ProjectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    Epsilon,
    Alpha,
    Beta,
    Delta,
}

impl FamilyId {
    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Epsilon => "epsilon",
            FamilyId::Alpha => "alpha",
            FamilyId::Beta => "beta",
            FamilyId::Delta => "delta",
        }
    }

    pub fn params(self) -> Vec<Var> {
        match self {
            FamilyId::Epsilon => vec![Var::C1, Var::C2, Var::C3],
            FamilyId::Alpha => vec![],
            FamilyId::Beta => vec![Var::B],
            FamilyId::Delta => vec![Var::C, Var::F],
        }
    }

    pub fn camera_class(self) -> CameraClass {
        if self == FamilyId::Epsilon {
            CameraClass::Finite
        } else {
            CameraClass::Affine
        }
    }

    /// Camera mapping `Gamma` onto the family member itself.
    fn base_matrix(self, p: &[Rational]) -> [[Rational; 4]; 3] {
        let z = || Rational::new();
        let o = || int(1);
        match self {
            FamilyId::Epsilon => [
                [o(), z(), z(), p[0].clone()],
                [z(), o(), z(), p[1].clone()],
                [z(), z(), o(), p[2].clone()],
            ],
            FamilyId::Alpha => [
                [z(), o(), z(), z()],
                [z(), z(), o(), z()],
                [z(), z(), z(), o()],
            ],
            FamilyId::Beta => [
                [o(), p[0].clone(), z(), z()],
                [z(), z(), o(), z()],
                [z(), z(), z(), o()],
            ],
            FamilyId::Delta => [
                [o(), z(), p[0].clone(), z()],
                [z(), o(), p[1].clone(), z()],
                [z(), z(), z(), o()],
            ],
        }
    }
}

/// `[A] * P_family(params)`; `A` defaults to the identity.
pub fn build_camera(
    family: FamilyId,
    params: &[Rational],
    a: Option<&[[Rational; 3]; 3]>,
) -> Result<ProjectionMatrix, CameraError> {
    if params.len() != family.params().len() {
        return Err(CameraError::ParamCount(family.name()));
    }
    let base = family.base_matrix(params);
    let Some(a) = a else {
        return ProjectionMatrix::new(base);
    };
    if linalg::det3(a).cmp0().is_eq() {
        return Err(CameraError::BadPlanarMap("singular"));
    }
    if family.camera_class() == CameraClass::Affine
        && (a[2][0].cmp0().is_ne() || a[2][1].cmp0().is_ne() || a[2][2].cmp0().is_eq())
    {
        return Err(CameraError::BadPlanarMap(
            "affine cameras need a last row (0, 0, l)",
        ));
    }
    let am: Matrix = a.iter().map(|r| r.to_vec()).collect();
    let bm: Matrix = base.iter().map(|r| r.to_vec()).collect();
    let prod = linalg::mat_mul(&am, &bm);
    let entries = [0, 1, 2].map(|i| [0, 1, 2, 3].map(|j| prod[i][j].clone()));
    ProjectionMatrix::new(entries)
}

fn family_curve(space: &SpatialCurve, id: FamilyId) -> CurveFamily {
    match id {
        FamilyId::Epsilon => make_epsilon_family(space),
        FamilyId::Alpha => make_affine_families(space).0,
        FamilyId::Beta => make_affine_families(space).1,
        FamilyId::Delta => make_affine_families(space).2,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub family: FamilyId,
    #[serde(with = "crate::algebra::ser::rational_vec")]
    pub params: Vec<Rational>,
    /// The specialized family member, when defined.
    pub specialized: Option<String>,
    pub equivalence: Option<EquivalenceVerdict>,
    pub rejection: Option<String>,
    pub passed: bool,
}

/// Specializes the family and checks group equivalence with `gamma`.
pub fn verify_witness(
    space: &SpatialCurve,
    gamma: &PlanarCurve,
    family: FamilyId,
    params: &[Rational],
) -> Result<VerificationRecord, DecideError> {
    let group = group_of(family);
    let target = prepare(gamma, group)?;
    verify_prepared(&family_curve(space, family), &target, family, params)
}

fn group_of(family: FamilyId) -> GroupTag {
    match family.camera_class() {
        CameraClass::Finite => GroupTag::Projective,
        CameraClass::Affine => GroupTag::Affine,
    }
}

fn verify_prepared(
    fam: &CurveFamily,
    target: &PreparedCurve,
    family: FamilyId,
    params: &[Rational],
) -> Result<VerificationRecord, DecideError> {
    let mut rec = VerificationRecord {
        family,
        params: params.to_vec(),
        specialized: None,
        equivalence: None,
        rejection: None,
        passed: false,
    };
    let member = match fam.specialize(params) {
        Ok(m) => m,
        Err(e) => {
            rec.rejection = Some(format!("specialization failed: {e}"));
            return Ok(rec);
        }
    };
    rec.specialized = Some(member.to_string());
    let prepared = match prepare(&member, group_of(family)) {
        Ok(p) => p,
        Err(e) => {
            rec.rejection = Some(format!("member signature failed: {e}"));
            return Ok(rec);
        }
    };
    let v = compare_prepared(target, &prepared, group_of(family))?;
    rec.passed = v.is_equivalent();
    rec.equivalence = Some(v);
    Ok(rec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchKind {
    /// Parameter-free family compared directly.
    Direct,
    /// Target is a line or conic; class membership imposed on the family.
    Special,
    /// Target signature is a single point.
    Degenerate,
    /// Target signature is a curve.
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchResult {
    Verified,
    Rejected,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub family: FamilyId,
    pub kind: BranchKind,
    pub target_class: CurveClass,
    pub equations: usize,
    /// `infeasible`, `solutions`, `positive-dimensional`, `not-assembled` or `limit-exceeded`.
    pub system: String,
    pub candidates_tried: usize,
    pub flags: Vec<String>,
    pub result: BranchResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub family: FamilyId,
    #[serde(with = "crate::algebra::ser::rational_vec")]
    pub params: Vec<Rational>,
    /// Camera onto the family member (`A` = identity), or the fitted camera onto `gamma` itself
    /// when one was recovered.
    pub camera: ProjectionMatrix,
    pub camera_maps_onto_target: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Answer,
    pub witness: Option<Witness>,
    pub verification: Option<VerificationRecord>,
    pub trace: Vec<BranchRecord>,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Maximum `t`-degree of an assembled parameter system before it is refused.
    pub max_degree: u32,
    /// Maximum dense term count of a pulled-back signature polynomial before it is refused.
    pub max_terms: f64,
    /// Limits handed to the polynomial system solver.
    pub solve: SolveOptions,
    /// Number of exact solutions verified per family.
    pub witness_budget: usize,
    /// Small-rational parameter tuples tried when the generic system is too large.
    pub fallback_budget: usize,
    /// Try a camera recovered by linear algebra before solving parameter systems.
    pub camera_fit: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_degree: 400,
            max_terms: 2.0e6,
            solve: SolveOptions::default(),
            witness_budget: 20,
            fallback_budget: 12,
            camera_fit: true,
        }
    }
}

/// Nonzero coefficients of the numerator with respect to `t`.
fn t_coefficients(p: &MultiPoly) -> Vec<MultiPoly> {
    p.coeffs_in(Var::T)
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect()
}

fn outcome_name(o: &SolveOutcome) -> &'static str {
    match o {
        SolveOutcome::Infeasible => "infeasible",
        SolveOutcome::Solutions(_) => "solutions",
        SolveOutcome::PositiveDimensional { .. } => "positive-dimensional",
    }
}

/// What the family has to match.
enum Target {
    Special(CurveClass),
    Point(Rational, Rational),
    Curve(MultiPoly),
}

fn target_of(p: &PreparedCurve) -> Target {
    match &p.signature {
        None => Target::Special(p.class.clone()),
        Some(SignatureObject::DegeneratePoint { j, k }) => Target::Point(j.clone(), k.clone()),
        Some(SignatureObject::Curve { implicit, .. }) => Target::Curve(implicit.clone()),
    }
}

/// Family invariants over the parameter ring.
fn family_invariants(jets: &jet::Jets, group: GroupTag) -> Option<InvariantPair> {
    match group {
        GroupTag::Projective => jet::projective_from_jets(jets).ok(),
        _ => jet::affine_from_jets(jets).ok(),
    }
}

/// The polynomial conditions for one family and target. Returns equations and the polynomials
/// whose common vanishing marks exceptional family members.
pub fn assemble_parameter_system(
    target: &SignatureObject,
    fam: &CurveFamily,
    group: GroupTag,
) -> Option<(Vec<MultiPoly>, Vec<MultiPoly>)> {
    let jets = jet::jets_of(&fam.x, &fam.y);
    let inv = family_invariants(&jets, group)?;
    let t = match target {
        SignatureObject::DegeneratePoint { j, k } => Target::Point(j.clone(), k.clone()),
        SignatureObject::Curve { implicit, .. } => Target::Curve(implicit.clone()),
    };
    Some(system_for(&t, &jets, Some(&inv), group))
}

fn system_for(
    target: &Target,
    jets: &jet::Jets,
    inv: Option<&InvariantPair>,
    group: GroupTag,
) -> (Vec<MultiPoly>, Vec<MultiPoly>) {
    let exceptional_locus = || match group {
        GroupTag::Projective => t_coefficients(jets.q.num()),
        _ => t_coefficients(jets.p.num()),
    };
    match target {
        Target::Special(class) => match class {
            CurveClass::Line => (t_coefficients(jets.n.num()), vec![]),
            CurveClass::Parabola if group == GroupTag::Affine => {
                (t_coefficients(jets.p.num()), t_coefficients(jets.n.num()))
            }
            CurveClass::Ellipse | CurveClass::Hyperbola if group == GroupTag::Affine => {
                (t_coefficients(jets.q.num()), t_coefficients(jets.p.num()))
            }
            _ => (t_coefficients(jets.q.num()), t_coefficients(jets.n.num())),
        },
        Target::Point(j0, k0) => {
            let inv = inv.expect("invariants");
            let dj = inv.j.sub(&RationalFunction::from_rational(j0));
            let dk = inv.k.sub(&RationalFunction::from_rational(k0));
            let mut eqs = t_coefficients(dj.num());
            eqs.extend(t_coefficients(dk.num()));
            (eqs, exceptional_locus())
        }
        Target::Curve(f) => {
            let inv = inv.expect("invariants");
            (t_coefficients(&pullback(f, inv)), exceptional_locus())
        }
    }
}

/// Degree of the pulled-back signature polynomial in each variable of the family, and the
/// number of terms of a dense polynomial with those degrees.
fn pullback_size(f: &MultiPoly, inv: &InvariantPair, vars: &[Var]) -> (u32, f64) {
    let (a, b) = (f.degree(Var::J), f.degree(Var::K));
    let deg = |v: Var| {
        let dj = inv.j.num().degree(v).max(inv.j.den().degree(v));
        let dk = inv.k.num().degree(v).max(inv.k.den().degree(v));
        a * dj + b * dk
    };
    let t_degree = deg(Var::T);
    let dense = std::iter::once(Var::T)
        .chain(vars.iter().copied())
        .map(|v| deg(v) as f64 + 1.0)
        .product();
    (t_degree, dense)
}

/// Camera recovered by exact linear algebra under the assumption that `gamma` and `Gamma`
/// share their parameterization. Returns the family, its parameters and the full camera.
pub fn fit_camera(
    space: &SpatialCurve,
    gamma: &PlanarCurve,
    class: CameraClass,
) -> Option<(FamilyId, Vec<Rational>, ProjectionMatrix)> {
    // common denominator of the space curve
    let mut d = MultiPoly::one();
    for z in &space.z {
        d = d.mul(
            &z.den()
                .div_exact(&crate::algebra::gcd(&d, z.den()))
                .expect("gcd divides"),
        );
    }
    let zp: Vec<MultiPoly> = space
        .z
        .iter()
        .map(|z| z.num().mul(&d.div_exact(z.den()).expect("lcm")))
        .chain(std::iter::once(d.clone()))
        .collect();
    // rows: t-coefficients of linear combinations, one column per unknown
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut push = |cols: Vec<MultiPoly>| {
        let deg = cols.iter().map(|c| c.degree(Var::T)).max().unwrap_or(0) as usize;
        let coeffs: Vec<Vec<Integer>> = cols
            .iter()
            .map(|c| {
                let mut u = c.to_univariate(Var::T).expect("univariate");
                u.resize(deg + 1, Integer::new());
                u
            })
            .collect();
        for k in 0..=deg {
            let row: Vec<Rational> = coeffs
                .iter()
                .map(|u| Rational::from(u[k].clone()))
                .collect();
            if row.iter().any(|x| x.cmp0().is_ne()) {
                rows.push(row);
            }
        }
    };
    let zero = MultiPoly::zero();
    match class {
        CameraClass::Finite => {
            // n * (p3 . Z) - d * (pi . Z) = 0, unknowns p1 (4), p2 (4), p3 (4)
            for (i, c) in [&gamma.x, &gamma.y].iter().enumerate() {
                let mut cols = vec![zero.clone(); 12];
                for j in 0..4 {
                    cols[4 * i + j] = c.den().mul(&zp[j]).neg();
                    cols[8 + j] = c.num().mul(&zp[j]);
                }
                push(cols);
            }
            let ns = linalg::nullspace(&rows, 12);
            if ns.len() != 1 {
                return None;
            }
            let v = &ns[0];
            let entries = [0, 1, 2].map(|i| [0, 1, 2, 3].map(|j| v[4 * i + j].clone()));
            let cam = ProjectionMatrix::new(entries).ok()?;
            if cam.class != CameraClass::Finite {
                return None;
            }
            let m: Matrix = (0..3).map(|i| cam.entries[i][..3].to_vec()).collect();
            let p4: Vec<Rational> = (0..3).map(|i| cam.entries[i][3].clone()).collect();
            let c = linalg::solve(&m, &p4)?;
            Some((FamilyId::Epsilon, c, cam.normalized()))
        }
        CameraClass::Affine => {
            // d_i * (pi . Z) - l * n_i * D = 0, unknowns p1 (4), p2 (4), l
            for (i, c) in [&gamma.x, &gamma.y].iter().enumerate() {
                let mut cols = vec![zero.clone(); 9];
                for j in 0..4 {
                    cols[4 * i + j] = c.den().mul(&zp[j]);
                }
                cols[8] = c.num().mul(&d).neg();
                push(cols);
            }
            let ns = linalg::nullspace(&rows, 9);
            if ns.len() != 1 || ns[0][8].cmp0().is_eq() {
                return None;
            }
            let l = ns[0][8].clone();
            let v: Vec<Rational> = ns[0].iter().map(|x| Rational::from(x / &l)).collect();
            let mut entries: [[Rational; 4]; 3] = Default::default();
            entries[0].clone_from_slice(&v[..4]);
            entries[1].clone_from_slice(&v[4..8]);
            entries[2][3] = int(1);
            let cam = ProjectionMatrix::new(entries).ok()?;
            let m: Matrix = (0..2).map(|i| cam.entries[i][..3].to_vec()).collect();
            let k = linalg::nullspace(&m, 3);
            if k.len() != 1 {
                return None;
            }
            let k = &k[0];
            let (fam, params) = if k[2].cmp0().is_ne() {
                (
                    FamilyId::Delta,
                    vec![
                        -Rational::from(&k[0] / &k[2]),
                        -Rational::from(&k[1] / &k[2]),
                    ],
                )
            } else if k[1].cmp0().is_ne() {
                (FamilyId::Beta, vec![-Rational::from(&k[0] / &k[1])])
            } else {
                (FamilyId::Alpha, vec![])
            };
            Some((fam, params, cam))
        }
    }
}

struct Ctx<'a> {
    space: &'a SpatialCurve,
    target: PreparedCurve,
    group: GroupTag,
    opts: &'a DecideOptions,
    fit: Option<(FamilyId, Vec<Rational>, ProjectionMatrix)>,
}

enum FamilyOutcome {
    Verified(Box<(Witness, VerificationRecord)>),
    NotVerified,
    Undecided(String),
}

impl<'a> Ctx<'a> {
    fn try_candidates(
        &self,
        fam: &CurveFamily,
        id: FamilyId,
        cands: impl IntoIterator<Item = Vec<Rational>>,
        tried: &mut usize,
        limit: usize,
    ) -> Result<Option<(Witness, VerificationRecord)>, DecideError> {
        for c in cands.into_iter().take(limit) {
            *tried += 1;
            let rec = verify_prepared(fam, &self.target, id, &c)?;
            if rec.passed {
                let w = self.witness(id, &c);
                return Ok(Some((w, rec)));
            }
        }
        Ok(None)
    }

    fn witness(&self, id: FamilyId, params: &[Rational]) -> Witness {
        if let Some((fid, fp, cam)) = &self.fit {
            if *fid == id && fp.as_slice() == params {
                return Witness {
                    family: id,
                    params: params.to_vec(),
                    camera: cam.clone(),
                    camera_maps_onto_target: true,
                };
            }
        }
        let camera = build_camera(id, params, None).expect("family camera");
        Witness {
            family: id,
            params: params.to_vec(),
            camera,
            camera_maps_onto_target: false,
        }
    }

    fn run_family(
        &self,
        id: FamilyId,
        trace: &mut Vec<BranchRecord>,
    ) -> Result<FamilyOutcome, DecideError> {
        let fam = family_curve(self.space, id);
        let target = target_of(&self.target);
        let kind = match (&target, fam.params.is_empty()) {
            (_, true) => BranchKind::Direct,
            (Target::Special(_), _) => BranchKind::Special,
            (Target::Point(..), _) => BranchKind::Degenerate,
            (Target::Curve(_), _) => BranchKind::Generic,
        };
        let mut rec = BranchRecord {
            family: id,
            kind,
            target_class: self.target.class.clone(),
            equations: 0,
            system: "not-assembled".into(),
            candidates_tried: 0,
            flags: vec![],
            result: BranchResult::Rejected,
        };
        let finish =
            |mut rec: BranchRecord, result: BranchResult, trace: &mut Vec<BranchRecord>| {
                rec.result = result;
                trace.push(rec);
            };
        if kind == BranchKind::Direct {
            let found = self.try_candidates(&fam, id, [vec![]], &mut rec.candidates_tried, 1)?;
            return Ok(match found {
                Some((w, v)) => {
                    finish(rec, BranchResult::Verified, trace);
                    FamilyOutcome::Verified(Box::new((w, v)))
                }
                None => {
                    finish(rec, BranchResult::Rejected, trace);
                    FamilyOutcome::NotVerified
                }
            });
        }
        // a camera recovered by linear algebra gives a candidate directly
        if let Some((fid, params, _)) = &self.fit {
            if *fid == id {
                if let Some((w, v)) =
                    self.try_candidates(&fam, id, [params.clone()], &mut rec.candidates_tried, 1)?
                {
                    rec.flags.push("camera-fit".into());
                    finish(rec, BranchResult::Verified, trace);
                    return Ok(FamilyOutcome::Verified(Box::new((w, v))));
                }
            }
        }
        let jets = jet::jets_of(&fam.x, &fam.y);
        let inv = match &target {
            Target::Special(_) => None,
            _ => match family_invariants(&jets, self.group) {
                Some(inv) => Some(inv),
                None => {
                    rec.flags.push("family-exceptional".into());
                    finish(rec, BranchResult::Rejected, trace);
                    return Ok(FamilyOutcome::NotVerified);
                }
            },
        };
        if let (Target::Curve(f), Some(inv)) = (&target, &inv) {
            let (deg, dense) = pullback_size(f, inv, &fam.params);
            if deg > self.opts.max_degree || dense > self.opts.max_terms {
                rec.system = "limit-exceeded".into();
                let why = format!("pulled-back system of t-degree {deg} and dense size {dense:.3e} exceeds the caps");
                return self.fallback(&fam, id, rec, trace, why);
            }
        }
        let (eqs, excl) = system_for(&target, &jets, inv.as_ref(), self.group);
        rec.equations = eqs.len();
        let report = match solve_system_with(&eqs, &fam.params, &self.opts.solve) {
            Ok(r) => r,
            Err(SolveError::LimitExceeded(d)) => {
                rec.system = "limit-exceeded".into();
                return self.fallback(&fam, id, rec, trace, d);
            }
        };
        let (report, dropped) = exclude_points(&report, &fam.params, &excl);
        if dropped > 0 {
            rec.flags.push(format!("excluded-exceptional-{dropped}"));
        }
        let outcome = report.outcome();
        rec.system = outcome_name(&outcome).into();
        if outcome == SolveOutcome::Infeasible {
            finish(rec, BranchResult::Rejected, trace);
            return Ok(FamilyOutcome::NotVerified);
        }
        let cands = report.exact_points();
        let irrational =
            report.isolated.iter().filter(|b| !b.is_exact()).count() + report.unresolved;
        let found = self.try_candidates(
            &fam,
            id,
            cands,
            &mut rec.candidates_tried,
            self.opts.witness_budget,
        )?;
        if let Some((w, v)) = found {
            finish(rec, BranchResult::Verified, trace);
            return Ok(FamilyOutcome::Verified(Box::new((w, v))));
        }
        if report.positive_dimensional {
            rec.flags.push("positive-dimensional-unverified".into());
        }
        if irrational > 0 {
            // feasible over the reals but no exact witness: neither answer is certified
            rec.flags
                .push(format!("irrational-solutions-unverified-{irrational}"));
            finish(rec, BranchResult::Undecided, trace);
            return Ok(FamilyOutcome::Undecided(format!(
                "{irrational} real solutions without a rational witness"
            )));
        }
        finish(rec, BranchResult::Rejected, trace);
        Ok(FamilyOutcome::NotVerified)
    }

    /// Small-rational search used when the symbolic system is out of reach. A hit is a verified
    /// YES; a miss leaves the branch undecided.
    fn fallback(
        &self,
        fam: &CurveFamily,
        id: FamilyId,
        mut rec: BranchRecord,
        trace: &mut Vec<BranchRecord>,
        why: String,
    ) -> Result<FamilyOutcome, DecideError> {
        let n = fam.params.len();
        let vals = enumeration(64);
        let cands = diagonal_tuples(n, self.opts.fallback_budget)
            .into_iter()
            .map(|ix| ix.iter().map(|&i| vals[i].clone()).collect::<Vec<_>>());
        let found = self.try_candidates(
            fam,
            id,
            cands,
            &mut rec.candidates_tried,
            self.opts.fallback_budget,
        )?;
        rec.flags.push("small-rational-search".into());
        match found {
            Some((w, v)) => {
                rec.result = BranchResult::Verified;
                trace.push(rec);
                Ok(FamilyOutcome::Verified(Box::new((w, v))))
            }
            None => {
                rec.result = BranchResult::Undecided;
                trace.push(rec);
                Ok(FamilyOutcome::Undecided(why))
            }
        }
    }
}

fn decide(
    space: &SpatialCurve,
    gamma: &PlanarCurve,
    class: CameraClass,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    let group = match class {
        CameraClass::Finite => GroupTag::Projective,
        CameraClass::Affine => GroupTag::Affine,
    };
    let target = prepare(gamma, group)?;
    let fit = if opts.camera_fit {
        fit_camera(space, gamma, class)
    } else {
        None
    };
    let ctx = Ctx {
        space,
        target,
        group,
        opts,
        fit,
    };
    let families: &[FamilyId] = match class {
        CameraClass::Finite => &[FamilyId::Epsilon],
        CameraClass::Affine => &[FamilyId::Alpha, FamilyId::Beta, FamilyId::Delta],
    };
    let mut trace = Vec::new();
    let mut undecided: Option<(FamilyId, String)> = None;
    for &id in families {
        match ctx.run_family(id, &mut trace)? {
            FamilyOutcome::Verified(found) => {
                let (w, v) = *found;
                return Ok(Decision {
                    verdict: Answer::Yes,
                    witness: Some(w),
                    verification: Some(v),
                    trace,
                });
            }
            FamilyOutcome::NotVerified => {}
            FamilyOutcome::Undecided(why) => {
                undecided.get_or_insert((id, why));
            }
        }
    }
    if let Some((id, detail)) = undecided {
        return Err(DecideError::LimitExceeded {
            family: id.name(),
            detail,
            trace,
        });
    }
    Ok(Decision {
        verdict: Answer::No,
        witness: None,
        verification: None,
        trace,
    })
}

pub fn decide_finite(space: &SpatialCurve, gamma: &PlanarCurve) -> Result<Decision, DecideError> {
    decide(space, gamma, CameraClass::Finite, &DecideOptions::default())
}

pub fn decide_affine(space: &SpatialCurve, gamma: &PlanarCurve) -> Result<Decision, DecideError> {
    decide(space, gamma, CameraClass::Affine, &DecideOptions::default())
}

pub fn decide_with(
    space: &SpatialCurve,
    gamma: &PlanarCurve,
    class: CameraClass,
    opts: &DecideOptions,
) -> Result<Decision, DecideError> {
    decide(space, gamma, class, opts)
}

/// The signature object of a target, for callers assembling systems themselves.
pub fn target_signature(
    gamma: &PlanarCurve,
    group: GroupTag,
) -> Result<SignatureObject, DecideError> {
    let p = prepare(gamma, group)?;
    match p.signature {
        Some(s) => Ok(s),
        None => Err(DecideError::Signature(SignatureError::Exceptional(
            group.name(),
            p.class.name(),
        ))),
    }
}

#[doc(hidden)]
pub fn signature_from_pair(pair: InvariantPair) -> Result<SignatureObject, SignatureError> {
    signature_of_map(pair)
}
