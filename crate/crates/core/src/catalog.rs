//! Closed-form ruled translating solitons.
//!
//! Every family is a ruled surface `gamma(s) + t w(s)` built from Taylor
//! closures, so jets are exact to rounding. Ambient translations are not
//! parameters; apply them with [`ParametricSurface::transformed`].
//!
//! Cylinders use the two orientations the profile ODEs are written for:
//!
//! ```text
//! spacelike rulings:  X(s,t) = (0, s, u(s)) + t (1,0,0)
//! timelike rulings:   X(s,t) = (s, u(s), 0) + t (0,0,1)
//! ```
//!
//! The lightlike-director families use `w(s) = (1, s, s)`, so `w'` is the
//! constant lightlike vector `(0,1,1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::curve::{ConstantCurve, Curve, EvalError, FnCurve, LineCurve, SharedCurve};
use crate::expr::{parse_scalar, ParseError};
use crate::series::Series;
use crate::surface::{fundamental_data, Domain, Grid, ParametricSurface, SurfaceError, DEFAULT_DEGENERACY_TOL};
use crate::{Sign, Surface, Vec3};

type S = Series<f64>;

/// A scalar profile `u(s)` evaluated through Taylor arithmetic.
pub type Profile = Arc<dyn Fn(&S) -> Result<S, EvalError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("{family}: domain violation: {constraint}")]
    DomainViolation { family: FamilyId, constraint: String },
    #[error("{family}: expected eps = {expected} but <N,N> = {found} at (s, t) = ({s}, {t})")]
    EpsMismatch {
        family: FamilyId,
        expected: Sign,
        found: Sign,
        s: f64,
        t: f64,
    },
    #[error("{family}: degenerate base curve at s = {s} (u' = {du})")]
    DegenerateBase { family: FamilyId, s: f64, du: f64 },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: unknown parameter `{name}` (expected one of: {expected})")]
    UnknownParam {
        family: FamilyId,
        name: String,
        expected: String,
    },
    #[error("{family}: invalid parameter {name} = {value}: {reason}")]
    InvalidParam {
        family: FamilyId,
        name: String,
        value: f64,
        reason: String,
    },
    #[error("{family}: invalid profile expression: {source}")]
    Profile {
        family: FamilyId,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Gr1Cosh,
    Gr1Sinh,
    Gr2Exp,
    Gr2Arctanh,
    Gr3,
    NullScroll,
    Thm4V0,
    Thm4A0,
    Thm4A1,
    Thm4A2,
    IntroX,
    IntroY,
    GenericCylinder,
}

/// One named real parameter of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

const fn p(name: &'static str, default: f64, doc: &'static str) -> ParamSpec {
    ParamSpec { name, default, doc }
}

const SHIFT: &str = "profile shift";
const ADDITIVE: &str = "additive constant";
const GR1_PARAMS: &[ParamSpec] = &[
    p("a", 0.0, SHIFT),
    p("b", 0.0, ADDITIVE),
    p("v1", 0.0, "free velocity component"),
];
const GR2_PARAMS: &[ParamSpec] = &[
    p("a", 1.0, "integration constant"),
    p("b", 0.0, ADDITIVE),
    p("v1", 0.0, "free velocity component"),
    p("sign", 1.0, "branch sign, +1 or -1"),
];
const GR3_PARAMS: &[ParamSpec] = &[
    p("a", 0.0, SHIFT),
    p("b", 0.0, ADDITIVE),
    p("v3", 0.0, "free velocity component"),
];
const NULL_SCROLL_PARAMS: &[ParamSpec] = &[
    p("base", 0.0, "base profile: 0 = exp(s), 1 = s^3 + s, 2 = sinh(s)"),
    p("k", 1.0, "velocity scale, v = k (1,0,1)"),
];
const V0_PARAMS: &[ParamSpec] = &[
    p("a", 1.0, "integration constant"),
    p("b", 0.0, ADDITIVE),
    p("eps", 1.0, "causal sign <N,N>, +1 or -1"),
];
const A0_PARAMS: &[ParamSpec] = &[
    p("v2", 0.0, "velocity (1, v2, v2)"),
    p("b", 0.0, ADDITIVE),
    p("eps", 1.0, "causal sign <N,N>, +1 or -1"),
];
const A1_PARAMS: &[ParamSpec] = &[
    p("v2", 0.0, "velocity (1, v2, v2)"),
    p("a", -1.0, "nonzero; eps = sign(a)"),
    p("b", 1.0, ADDITIVE),
];
const A2_PARAMS: &[ParamSpec] = &[
    p("v2", 0.0, "velocity (1, v2, v2)"),
    p("a", 1.0, "nonzero; eps = -sign(a)"),
    p("b", 0.0, ADDITIVE),
];
const CYLINDER_PARAMS: &[ParamSpec] = &[
    p("case", 1.0, "rulings: 0 = spacelike (1,0,0), 1 = timelike (0,0,1)"),
    p("v1", 0.0, "velocity x"),
    p("v2", 1.0, "velocity y"),
    p("v3", 0.0, "velocity z"),
];

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::Gr1Cosh,
        FamilyId::Gr1Sinh,
        FamilyId::Gr2Exp,
        FamilyId::Gr2Arctanh,
        FamilyId::Gr3,
        FamilyId::NullScroll,
        FamilyId::Thm4V0,
        FamilyId::Thm4A0,
        FamilyId::Thm4A1,
        FamilyId::Thm4A2,
        FamilyId::IntroX,
        FamilyId::IntroY,
        FamilyId::GenericCylinder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Gr1Cosh => "Gr1Cosh",
            FamilyId::Gr1Sinh => "Gr1Sinh",
            FamilyId::Gr2Exp => "Gr2Exp",
            FamilyId::Gr2Arctanh => "Gr2Arctanh",
            FamilyId::Gr3 => "Gr3",
            FamilyId::NullScroll => "NullScroll",
            FamilyId::Thm4V0 => "Thm4V0",
            FamilyId::Thm4A0 => "Thm4A0",
            FamilyId::Thm4A1 => "Thm4A1",
            FamilyId::Thm4A2 => "Thm4A2",
            FamilyId::IntroX => "IntroX",
            FamilyId::IntroY => "IntroY",
            FamilyId::GenericCylinder => "GenericCylinder",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            FamilyId::Gr1Cosh | FamilyId::Gr1Sinh => GR1_PARAMS,
            FamilyId::Gr2Exp | FamilyId::Gr2Arctanh => GR2_PARAMS,
            FamilyId::Gr3 => GR3_PARAMS,
            FamilyId::NullScroll => NULL_SCROLL_PARAMS,
            FamilyId::Thm4V0 => V0_PARAMS,
            FamilyId::Thm4A0 => A0_PARAMS,
            FamilyId::Thm4A1 => A1_PARAMS,
            FamilyId::Thm4A2 => A2_PARAMS,
            FamilyId::IntroX | FamilyId::IntroY => &[],
            FamilyId::GenericCylinder => CYLINDER_PARAMS,
        }
    }

    /// One-line description of the family's construction.
    pub fn description(self) -> &'static str {
        match self {
            FamilyId::Gr1Cosh => "cylinder, spacelike rulings (1,0,0): u = -log cosh(s+a) + b, v = (v1,0,1)",
            FamilyId::Gr1Sinh => "cylinder, spacelike rulings (1,0,0): u = log sinh(s+a) + b, s+a > 0, v = (v1,0,1)",
            FamilyId::Gr2Exp => {
                "cylinder, spacelike rulings (1,0,0): u = +-log(e^s + sqrt(e^2s + a)) + b, v = (v1,+-1,0) by sign(a)"
            }
            FamilyId::Gr2Arctanh => {
                "cylinder, spacelike rulings (1,0,0): u = +-arctanh sqrt(1 - a e^2s) + b, v = (v1,1,0)"
            }
            FamilyId::Gr3 => "cylinder, timelike rulings (0,0,1): u = -log cos(s+a) + b, v = (0,1,v3)",
            FamilyId::NullScroll => "null scroll: (u, s, -u) + t (1,0,1) with u' != 0, H = K = 0, v = k (1,0,1)",
            FamilyId::Thm4V0 => "lightlike director (1,s,s), logarithmic base, v = (0,1,1)",
            FamilyId::Thm4A0 => "lightlike director (1,s,s), base with pole at s = v2, v = (1,v2,v2)",
            FamilyId::Thm4A1 => "lightlike director (1,s,s), arctan base, eps = sign(a), v = (1,v2,v2)",
            FamilyId::Thm4A2 => {
                "lightlike director (1,s,s), arctanh base on |p(s-v2)| < 1, eps = -sign(a), v = (1,v2,v2)"
            }
            FamilyId::IntroX => "(log s, 1/(2s), -1/(2s)) + t (1,s,s), s > 0, t > 1/2, v = (1,0,0)",
            FamilyId::IntroY => "(-log(1+s^2)/2, atan s + s, s) + t (1,s,s), t > -3/2, v = (1,0,0)",
            FamilyId::GenericCylinder => "cylinder over a user profile u(s) with either ruling orientation",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = CatalogError;

    /// Case-insensitive; `-` and `_` are ignored (`gr1-cosh` = `Gr1Cosh`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = |x: &str| {
            x.chars()
                .filter(|c| *c != '-' && *c != '_')
                .collect::<String>()
                .to_ascii_lowercase()
        };
        let key = norm(s);
        FamilyId::ALL
            .into_iter()
            .find(|id| norm(id.name()) == key)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// Ruling orientation of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RulingCase {
    /// `w = (1,0,0)`, base `(0, s, u(s))`.
    SpacelikeW,
    /// `w = (0,0,1)`, base `(s, u(s), 0)`.
    TimelikeW,
}

impl RulingCase {
    pub fn director(self) -> Vec3 {
        match self {
            RulingCase::SpacelikeW => Vec3::e1(),
            RulingCase::TimelikeW => Vec3::e3(),
        }
    }

    /// Base point of the cylinder for profile value `u`.
    pub fn base_point(self, s: f64, u: f64) -> Vec3 {
        match self {
            RulingCase::SpacelikeW => Vec3::new(0.0, s, u),
            RulingCase::TimelikeW => Vec3::new(s, u, 0.0),
        }
    }
}

#[derive(Clone)]
pub struct CylinderData {
    pub profile: Profile,
    pub case: RulingCase,
}

impl fmt::Debug for CylinderData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CylinderData")
            .field("case", &self.case)
            .finish_non_exhaustive()
    }
}

impl CylinderData {
    /// `(u, u', u'')` at `s`.
    pub fn profile_jet(&self, s: f64) -> Result<(f64, f64, f64), EvalError> {
        let u = (self.profile)(&S::variable(s, 2))?;
        Ok((u.derivative(0), u.derivative(1), u.derivative(2)))
    }
}

/// Optional overrides of a family's default parameter rectangle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Window {
    pub s: Option<(f64, f64)>,
    pub t: Option<(f64, f64)>,
}

impl Window {
    pub fn s(s0: f64, s1: f64) -> Self {
        Window {
            s: Some((s0, s1)),
            t: None,
        }
    }

    pub fn st(s: (f64, f64), t: (f64, f64)) -> Self {
        Window { s: Some(s), t: Some(t) }
    }
}

/// A constructed soliton: its surface, velocity and ruled structure.
#[derive(Clone)]
pub struct SolitonFamily {
    pub id: FamilyId,
    pub params: Vec<(&'static str, f64)>,
    pub velocity: Vec3,
    /// Expected `<N,N>` on the domain.
    pub eps: Sign,
    pub surface: Surface,
    pub gamma: SharedCurve<f64>,
    pub director: SharedCurve<f64>,
    pub cylinder: Option<CylinderData>,
}

impl fmt::Debug for SolitonFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolitonFamily")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("velocity", &self.velocity)
            .field("eps", &self.eps)
            .field("domain", &self.surface.domain)
            .finish_non_exhaustive()
    }
}

impl SolitonFamily {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn domain(&self) -> Domain<f64> {
        self.surface.domain
    }

    /// The same family on another parameter rectangle, revalidated.
    pub fn with_window(&self, window: Window) -> Result<SolitonFamily, CatalogError> {
        let d = self.domain();
        let domain = Domain::new(window.s.unwrap_or(d.s), window.t.unwrap_or(d.t));
        let mut out = self.clone();
        out.surface = self.surface.with_domain(domain);
        if self.id != FamilyId::GenericCylinder {
            check_eps(&out)?;
        }
        Ok(out)
    }
}

fn constant(x: f64, like: &S) -> S {
    S::constant(x, like.order())
}

fn check_range(family: FamilyId, name: &str, (a, b): (f64, f64)) -> Result<(), CatalogError> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(CatalogError::DomainViolation {
            family,
            constraint: format!("{name}-range [{a}, {b}] must be finite with {name}0 < {name}1"),
        })
    }
}

fn violation(family: FamilyId, constraint: String) -> CatalogError {
    CatalogError::DomainViolation { family, constraint }
}

fn require_sign(family: FamilyId, name: &str, value: f64) -> Result<Sign, CatalogError> {
    Sign::from_f64(value).ok_or_else(|| CatalogError::InvalidParam {
        family,
        name: name.into(),
        value,
        reason: "must be +1 or -1".into(),
    })
}

/// Compares the constructor's `eps` with `<N,N>` on a 9x9 interior sample.
fn check_eps(f: &SolitonFamily) -> Result<(), CatalogError> {
    for (s, t) in f.domain().interior_grid(Grid::new(9, 9)) {
        let jet = f.surface.jet(s, t)?;
        match fundamental_data(&jet, DEFAULT_DEGENERACY_TOL) {
            Ok(fd) if fd.eps != f.eps => {
                return Err(CatalogError::EpsMismatch {
                    family: f.id,
                    expected: f.eps,
                    found: fd.eps,
                    s,
                    t,
                })
            }
            Ok(_) | Err(SurfaceError::DegeneratePoint { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn cylinder_family(
    id: FamilyId,
    params: Vec<(&'static str, f64)>,
    profile: Profile,
    case: RulingCase,
    velocity: Vec3,
    eps: Sign,
    domain: Domain<f64>,
) -> Result<SolitonFamily, CatalogError> {
    check_range(id, "s", domain.s)?;
    check_range(id, "t", domain.t)?;
    let prof = Arc::clone(&profile);
    let gamma = FnCurve::new(move |s: &S| {
        let u = prof(s)?;
        let zero = constant(0.0, s);
        Ok(match case {
            RulingCase::SpacelikeW => [zero, s.clone(), u],
            RulingCase::TimelikeW => [s.clone(), u, zero],
        })
    })
    .shared();
    let director = ConstantCurve(case.director()).into_shared();
    let surface = ParametricSurface::ruled(Arc::clone(&gamma), Arc::clone(&director), domain);
    let fam = SolitonFamily {
        id,
        params,
        velocity,
        eps,
        surface,
        gamma,
        director,
        cylinder: Some(CylinderData { profile, case }),
    };
    check_eps(&fam)?;
    Ok(fam)
}

/// Cylinder over an arbitrary profile; a soliton exactly when `u` solves the
/// profile ODE of its ruling orientation.
pub fn make_cylinder(
    profile: Profile,
    case: RulingCase,
    v: Vec3,
    window: Window,
) -> Result<SolitonFamily, CatalogError> {
    let domain = Domain::new(window.s.unwrap_or((-1.0, 1.0)), window.t.unwrap_or((-1.0, 1.0)));
    let params = vec![
        ("case", if case == RulingCase::SpacelikeW { 0.0 } else { 1.0 }),
        ("v1", v.x),
        ("v2", v.y),
        ("v3", v.z),
    ];
    generic_cylinder(params, profile, case, v, domain)
}

fn generic_cylinder(
    params: Vec<(&'static str, f64)>,
    profile: Profile,
    case: RulingCase,
    velocity: Vec3,
    domain: Domain<f64>,
) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::GenericCylinder;
    check_range(id, "s", domain.s)?;
    check_range(id, "t", domain.t)?;
    let prof = Arc::clone(&profile);
    let gamma = FnCurve::new(move |s: &S| {
        let u = prof(s)?;
        let zero = constant(0.0, s);
        Ok(match case {
            RulingCase::SpacelikeW => [zero, s.clone(), u],
            RulingCase::TimelikeW => [s.clone(), u, zero],
        })
    })
    .shared();
    let director = ConstantCurve(case.director()).into_shared();
    let surface = ParametricSurface::ruled(Arc::clone(&gamma), Arc::clone(&director), domain);
    let (s, t) = ((domain.s.0 + domain.s.1) / 2.0, (domain.t.0 + domain.t.1) / 2.0);
    let eps = fundamental_data(&surface.jet(s, t)?, DEFAULT_DEGENERACY_TOL)?.eps;
    Ok(SolitonFamily {
        id,
        params,
        velocity,
        eps,
        surface,
        gamma,
        director,
        cylinder: Some(CylinderData { profile, case }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gr1Branch {
    Cosh,
    Sinh,
}

pub fn make_gr1(branch: Gr1Branch, a: f64, b: f64, v1: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    let (id, profile, default_s, eps): (FamilyId, Profile, (f64, f64), Sign) = match branch {
        Gr1Branch::Cosh => (
            FamilyId::Gr1Cosh,
            Arc::new(move |s: &S| Ok(-(s + a).cosh().ln() + b)),
            (-1.0, 1.0),
            Sign::Negative,
        ),
        Gr1Branch::Sinh => (
            FamilyId::Gr1Sinh,
            Arc::new(move |s: &S| Ok((s + a).sinh().ln() + b)),
            (0.5 - a, 2.0 - a),
            Sign::Positive,
        ),
    };
    let s_range = window.s.unwrap_or(default_s);
    check_range(id, "s", s_range)?;
    if branch == Gr1Branch::Sinh && s_range.0 + a <= 0.0 {
        return Err(violation(
            id,
            format!("s + a > 0 required, but s0 + a = {}", s_range.0 + a),
        ));
    }
    let domain = Domain::new(s_range, window.t.unwrap_or((-1.0, 1.0)));
    cylinder_family(
        id,
        vec![("a", a), ("b", b), ("v1", v1)],
        profile,
        RulingCase::SpacelikeW,
        Vec3::new(v1, 0.0, 1.0),
        eps,
        domain,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gr2Branch {
    Exp,
    Arctanh,
}

/// `sign` selects the `+-` in front of the profile. For the exponential
/// branch with `a < 0` the surface is timelike and the velocity is
/// `(v1, -1, 0)`.
pub fn make_gr2(
    branch: Gr2Branch,
    a: f64,
    b: f64,
    v1: f64,
    sign: Sign,
    window: Window,
) -> Result<SolitonFamily, CatalogError> {
    let sg = sign.value::<f64>();
    match branch {
        Gr2Branch::Exp => {
            let id = FamilyId::Gr2Exp;
            if a == 0.0 || !a.is_finite() {
                return Err(CatalogError::InvalidParam {
                    family: id,
                    name: "a".into(),
                    value: a,
                    reason: "must be nonzero".into(),
                });
            }
            let default_s = if a > 0.0 {
                (-1.0, 1.0)
            } else {
                let c = (-a).ln() / 2.0;
                (c + 0.5, c + 2.0)
            };
            let s_range = window.s.unwrap_or(default_s);
            check_range(id, "s", s_range)?;
            let lo = (2.0 * s_range.0).exp() + a;
            if lo <= 0.0 {
                return Err(violation(
                    id,
                    format!("e^(2s) + a > 0 required, but equals {lo} at s0 = {}", s_range.0),
                ));
            }
            let profile: Profile = Arc::new(move |s: &S| {
                let es = s.exp();
                Ok((&es + &(s.scale(2.0).exp() + a).sqrt()).ln().scale(sg) + b)
            });
            let (v2, eps) = if a > 0.0 {
                (1.0, Sign::Negative)
            } else {
                (-1.0, Sign::Positive)
            };
            cylinder_family(
                id,
                vec![("a", a), ("b", b), ("v1", v1), ("sign", sg)],
                profile,
                RulingCase::SpacelikeW,
                Vec3::new(v1, v2, 0.0),
                eps,
                Domain::new(s_range, window.t.unwrap_or((-1.0, 1.0))),
            )
        }
        Gr2Branch::Arctanh => {
            let id = FamilyId::Gr2Arctanh;
            if a <= 0.0 || !a.is_finite() {
                return Err(CatalogError::InvalidParam {
                    family: id,
                    name: "a".into(),
                    value: a,
                    reason: "must be positive".into(),
                });
            }
            let c = a.ln() / 2.0;
            let s_range = window.s.unwrap_or((-2.0 - c, -0.1 - c));
            check_range(id, "s", s_range)?;
            let hi = a * (2.0 * s_range.1).exp();
            if hi >= 1.0 {
                return Err(violation(
                    id,
                    format!("a e^(2s) < 1 required, but equals {hi} at s1 = {}", s_range.1),
                ));
            }
            let profile: Profile = Arc::new(move |s: &S| {
                let q = (-(s.scale(2.0).exp().scale(a)) + 1.0).sqrt();
                Ok(q.atanh().scale(sg) + b)
            });
            cylinder_family(
                id,
                vec![("a", a), ("b", b), ("v1", v1), ("sign", sg)],
                profile,
                RulingCase::SpacelikeW,
                Vec3::new(v1, 1.0, 0.0),
                Sign::Positive,
                Domain::new(s_range, window.t.unwrap_or((-1.0, 1.0))),
            )
        }
    }
}

pub fn make_gr3(a: f64, b: f64, v3: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::Gr3;
    let s_range = window.s.unwrap_or((-1.4 - a, 1.4 - a));
    check_range(id, "s", s_range)?;
    let half = std::f64::consts::FRAC_PI_2;
    if s_range.0 + a <= -half || s_range.1 + a >= half {
        return Err(violation(
            id,
            format!(
                "cos(s + a) > 0 required, i.e. s + a in (-pi/2, pi/2), but s + a spans [{}, {}]",
                s_range.0 + a,
                s_range.1 + a
            ),
        ));
    }
    cylinder_family(
        id,
        vec![("a", a), ("b", b), ("v3", v3)],
        Arc::new(move |s: &S| Ok(-(s + a).cos().ln() + b)),
        RulingCase::TimelikeW,
        Vec3::new(0.0, 1.0, v3),
        Sign::Positive,
        Domain::new(s_range, window.t.unwrap_or((-1.0, 1.0))),
    )
}

/// Built-in null-scroll base profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullBase {
    Exp,
    Cubic,
    Sinh,
}

impl NullBase {
    pub const ALL: [NullBase; 3] = [NullBase::Exp, NullBase::Cubic, NullBase::Sinh];

    pub fn profile(self) -> Profile {
        match self {
            NullBase::Exp => Arc::new(|s: &S| Ok(s.exp())),
            NullBase::Cubic => Arc::new(|s: &S| Ok(s.powi(3) + s.clone())),
            NullBase::Sinh => Arc::new(|s: &S| Ok(s.sinh())),
        }
    }

    fn index(self) -> f64 {
        match self {
            NullBase::Exp => 0.0,
            NullBase::Cubic => 1.0,
            NullBase::Sinh => 2.0,
        }
    }
}

/// `X(s,t) = (u, s, -u) + t (1,0,1)`, velocity `k (1,0,1)`.
pub fn make_null_scroll(u: Profile, k: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    make_null_scroll_with(u, k, window, f64::NAN)
}

pub fn make_null_scroll_base(base: NullBase, k: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    make_null_scroll_with(base.profile(), k, window, base.index())
}

fn make_null_scroll_with(u: Profile, k: f64, window: Window, base_index: f64) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::NullScroll;
    if k == 0.0 || !k.is_finite() {
        return Err(CatalogError::InvalidParam {
            family: id,
            name: "k".into(),
            value: k,
            reason: "velocity scale must be nonzero".into(),
        });
    }
    let domain = Domain::new(window.s.unwrap_or((-1.0, 1.0)), window.t.unwrap_or((-1.0, 1.0)));
    check_range(id, "s", domain.s)?;
    check_range(id, "t", domain.t)?;
    for i in 0..=100 {
        let s = domain.s.0 + (domain.s.1 - domain.s.0) * i as f64 / 100.0;
        let du = u(&S::variable(s, 1)).map_err(SurfaceError::from)?.derivative(1);
        if du.abs() <= 1e-9 {
            return Err(CatalogError::DegenerateBase { family: id, s, du });
        }
    }
    let prof = Arc::clone(&u);
    let gamma = FnCurve::new(move |s: &S| {
        let u = prof(s)?;
        Ok([u.clone(), s.clone(), -u])
    })
    .shared();
    let w = Vec3::new(1.0, 0.0, 1.0);
    let director = ConstantCurve(w).into_shared();
    let fam = SolitonFamily {
        id,
        params: vec![("base", base_index), ("k", k)],
        velocity: w * k,
        eps: Sign::Positive,
        surface: ParametricSurface::ruled(Arc::clone(&gamma), Arc::clone(&director), domain),
        gamma,
        director,
        cylinder: None,
    };
    check_eps(&fam)?;
    Ok(fam)
}

fn lightlike_director() -> SharedCurve<f64> {
    LineCurve {
        base: Vec3::e1(),
        slope: Vec3::new(0.0, 1.0, 1.0),
    }
    .into_shared()
}

/// `t`-range on the side of the degeneracy line `EG - F^2 = 0` where the
/// surface has causal sign `eps`, or the caller's range checked against it.
fn lightlike_director_t_range(
    id: FamilyId,
    gamma: &SharedCurve<f64>,
    eps: Sign,
    s_range: (f64, f64),
) -> Result<(f64, f64), CatalogError> {
    let wp = Vec3::new(0.0, 1.0, 1.0);
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    let mut q_sign: Option<Sign> = None;
    for i in 0..=100 {
        let s = s_range.0 + (s_range.1 - s_range.0) * i as f64 / 100.0;
        let g = gamma.jet(s).map_err(SurfaceError::from)?;
        let w = Vec3::new(1.0, s, s);
        let (r, q, f0) = (g.d1.dot(g.d1), g.d1.dot(wp), g.d1.dot(w));
        if q == 0.0 || q_sign.is_some_and(|qs| qs != Sign::of(q)) {
            return Err(violation(
                id,
                format!("<gamma', w'> must not vanish on the s-range (s = {s})"),
            ));
        }
        q_sign = Some(Sign::of(q));
        // EG - F^2 = 2Q (t - t*)
        let t_star = -(r - f0 * f0) / (2.0 * q);
        if Sign::of(q).value::<f64>() * -eps.value::<f64>() > 0.0 {
            t_lo = t_lo.max(t_star);
        } else {
            t_hi = t_hi.min(t_star);
        }
    }
    const MARGIN: f64 = 0.5;
    const LEN: f64 = 1.5;
    Ok(if t_lo.is_finite() {
        (t_lo + MARGIN, t_lo + MARGIN + LEN)
    } else {
        (t_hi - MARGIN - LEN, t_hi - MARGIN)
    })
}

fn lightlike_director_family(
    id: FamilyId,
    params: Vec<(&'static str, f64)>,
    gamma: FnCurve<f64>,
    eps: Sign,
    velocity: Vec3,
    s_range: (f64, f64),
    window_t: Option<(f64, f64)>,
) -> Result<SolitonFamily, CatalogError> {
    check_range(id, "s", s_range)?;
    let gamma = gamma.shared();
    let t_range = match window_t {
        Some(t) => t,
        None => lightlike_director_t_range(id, &gamma, eps, s_range)?,
    };
    check_range(id, "t", t_range)?;
    let director = lightlike_director();
    let fam = SolitonFamily {
        id,
        params,
        velocity,
        eps,
        surface: ParametricSurface::ruled(Arc::clone(&gamma), Arc::clone(&director), Domain::new(s_range, t_range)),
        gamma,
        director,
        cylinder: None,
    };
    check_eps(&fam)?;
    Ok(fam)
}

/// Velocity `(0,1,1)`; base built from `log(2 eps s + a)`.
pub fn make_thm4_v0(a: f64, b: f64, eps: Sign, window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::Thm4V0;
    let e = eps.value::<f64>();
    let ends = ((1.0 - a) / (2.0 * e), (4.0 - a) / (2.0 * e));
    let s_range = window.s.unwrap_or((ends.0.min(ends.1), ends.0.max(ends.1)));
    check_range(id, "s", s_range)?;
    for s in [s_range.0, s_range.1] {
        if 2.0 * e * s + a <= 0.0 {
            return Err(violation(
                id,
                format!("2 eps s + a > 0 required, but equals {} at s = {s}", 2.0 * e * s + a),
            ));
        }
    }
    let gamma = FnCurve::new(move |s: &S| {
        let l = (s.scale(2.0 * e) + a).ln();
        let phi = l.scale(1.0 / (2.0 * e));
        let x = l.scale(a / 4.0) - s.scale(1.0 / (2.0 * e));
        let z = l.scale(-(a * a + 4.0) / (16.0 * e)) + s.scale(b) - s.square().scale(e / 8.0);
        Ok([x, &z + &phi, z])
    });
    lightlike_director_family(
        id,
        vec![("a", a), ("b", b), ("eps", e)],
        gamma,
        eps,
        Vec3::new(0.0, 1.0, 1.0),
        s_range,
        window.t,
    )
}

/// Velocity `(1, v2, v2)`; base with a simple pole at `s = v2`.
pub fn make_thm4_a0(v2: f64, b: f64, eps: Sign, window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::Thm4A0;
    let e = eps.value::<f64>();
    let s_range = window.s.unwrap_or((v2 + 1.0, v2 + 2.0));
    check_range(id, "s", s_range)?;
    if s_range.0 <= v2 {
        return Err(violation(id, format!("s > v2 = {v2} required, but s0 = {}", s_range.0)));
    }
    let gamma = FnCurve::new(move |s: &S| {
        let d = s - v2;
        let inv = d.recip();
        let l = d.ln();
        let phi = inv.scale(1.0 / e);
        let x = (&l - &inv.scale(v2)).scale(1.0 / e);
        let z = (l.scale(2.0 * v2) - inv.scale(1.0 + v2 * v2)).scale(1.0 / (2.0 * e)) + s.scale(b);
        Ok([x, &z + &phi, z])
    });
    lightlike_director_family(
        id,
        vec![("v2", v2), ("b", b), ("eps", e)],
        gamma,
        eps,
        Vec3::new(1.0, v2, v2),
        s_range,
        window.t,
    )
}

/// Velocity `(1, v2, v2)`, `eps = sign(a)`, `p = sqrt(eps / a)`, base built
/// from `arctan(p (s - v2))`.
pub fn make_thm4_a1(v2: f64, a: f64, b: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::Thm4A1;
    if a == 0.0 || !a.is_finite() {
        return Err(CatalogError::InvalidParam {
            family: id,
            name: "a".into(),
            value: a,
            reason: "must be nonzero".into(),
        });
    }
    let eps = Sign::of(a);
    let e = eps.value::<f64>();
    let p = (e / a).sqrt();
    let s_range = window.s.unwrap_or((v2 - 1.0, v2 + 1.0));
    let gamma = FnCurve::new(move |s: &S| {
        let phi = (s - v2).scale(p);
        let at = phi.atan();
        let lg = (phi.square() + 1.0).ln();
        let big_phi = at.scale(-1.0 / (a * p));
        let x = lg.scale(1.0 / (2.0 * e)) + at.scale(v2 / (a * p));
        let z = (at.scale(p * p * (v2 * v2 + 1.0) - 1.0) + lg.scale(p * v2)).scale(1.0 / (2.0 * e * p)) + s.scale(b);
        Ok([x, &z + &big_phi, z])
    });
    lightlike_director_family(
        id,
        vec![("v2", v2), ("a", a), ("b", b)],
        gamma,
        eps,
        Vec3::new(1.0, v2, v2),
        s_range,
        window.t,
    )
}

/// Velocity `(1, v2, v2)`, `eps = -sign(a)`, `p = sqrt(-eps / a)`, defined
/// where `|p (s - v2)| < 1`.
pub fn make_thm4_a2(v2: f64, a: f64, b: f64, window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::Thm4A2;
    if a == 0.0 || !a.is_finite() {
        return Err(CatalogError::InvalidParam {
            family: id,
            name: "a".into(),
            value: a,
            reason: "must be nonzero".into(),
        });
    }
    let eps = Sign::of(a).flip();
    let e = eps.value::<f64>();
    let p = (-e / a).sqrt();
    let s_range = window.s.unwrap_or((v2 - 0.9 / p, v2 + 0.9 / p));
    check_range(id, "s", s_range)?;
    for s in [s_range.0, s_range.1] {
        let phi = p * (s - v2);
        if phi.abs() >= 1.0 {
            return Err(violation(
                id,
                format!("|p (s - v2)| < 1 required, but equals {} at s = {s}", phi.abs()),
            ));
        }
    }
    let gamma = FnCurve::new(move |s: &S| {
        let phi = (s - v2).scale(p);
        let ratio = (&phi + 1.0).ln() - (-&phi + 1.0).ln();
        let lg = (-phi.square() + 1.0).ln();
        let big_phi = ratio.scale(-1.0 / (2.0 * p * a));
        let x = lg.scale(1.0 / (2.0 * e)) + ratio.scale(v2 / (2.0 * a * p));
        let z = lg.scale(e * v2 / 2.0) + phi.atanh().scale((1.0 - a * e + v2 * v2) / (2.0 * a * p)) + s.scale(b);
        Ok([x, &z + &big_phi, z])
    });
    lightlike_director_family(
        id,
        vec![("v2", v2), ("a", a), ("b", b)],
        gamma,
        eps,
        Vec3::new(1.0, v2, v2),
        s_range,
        window.t,
    )
}

/// The two non-cylindrical examples with velocity `(1,0,0)`, written out
/// directly rather than through the general constructors.
pub fn intro_examples() -> (SolitonFamily, SolitonFamily) {
    (
        intro_x(Window::default()).expect("default window is valid"),
        intro_y(Window::default()).expect("default window is valid"),
    )
}

pub fn intro_x(window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::IntroX;
    let s_range = window.s.unwrap_or((0.5, 2.0));
    let t_range = window.t.unwrap_or((1.0, 2.0));
    check_range(id, "s", s_range)?;
    check_range(id, "t", t_range)?;
    if s_range.0 <= 0.0 {
        return Err(violation(id, format!("s > 0 required, but s0 = {}", s_range.0)));
    }
    if t_range.0 <= 0.5 {
        return Err(violation(id, format!("t > 1/2 required, but t0 = {}", t_range.0)));
    }
    let gamma = FnCurve::new(|s: &S| {
        let half_inv = s.recip().scale(0.5);
        Ok([s.ln(), half_inv.clone(), -half_inv])
    });
    intro_family(id, gamma, Sign::Positive, s_range, t_range)
}

pub fn intro_y(window: Window) -> Result<SolitonFamily, CatalogError> {
    let id = FamilyId::IntroY;
    let s_range = window.s.unwrap_or((-1.0, 1.0));
    let t_range = window.t.unwrap_or((0.0, 1.0));
    check_range(id, "s", s_range)?;
    check_range(id, "t", t_range)?;
    if t_range.0 <= -1.5 {
        return Err(violation(id, format!("t > -3/2 required, but t0 = {}", t_range.0)));
    }
    let gamma = FnCurve::new(|s: &S| Ok([(s.square() + 1.0).ln().scale(-0.5), s.atan() + s.clone(), s.clone()]));
    intro_family(id, gamma, Sign::Negative, s_range, t_range)
}

fn intro_family(
    id: FamilyId,
    gamma: FnCurve<f64>,
    eps: Sign,
    s_range: (f64, f64),
    t_range: (f64, f64),
) -> Result<SolitonFamily, CatalogError> {
    let gamma = gamma.shared();
    let director = FnCurve::new(|s: &S| Ok([constant(1.0, s), s.clone(), s.clone()])).shared();
    let fam = SolitonFamily {
        id,
        params: vec![],
        velocity: Vec3::e1(),
        eps,
        surface: ParametricSurface::ruled(Arc::clone(&gamma), Arc::clone(&director), Domain::new(s_range, t_range)),
        gamma,
        director,
        cylinder: None,
    };
    check_eps(&fam)?;
    Ok(fam)
}

/// Parameters and optional overrides for building a family by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildRequest {
    pub params: BTreeMap<String, f64>,
    pub window: Window,
    /// Profile expression in `s` (generic cylinders only).
    pub profile: Option<String>,
}

/// Builds `id` from named parameters, filling defaults from the schema.
pub fn build(id: FamilyId, req: &BuildRequest) -> Result<SolitonFamily, CatalogError> {
    let schema = id.params();
    for name in req.params.keys() {
        if !schema.iter().any(|p| p.name == name) {
            let expected = if schema.is_empty() {
                "none".to_string()
            } else {
                schema.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
            };
            return Err(CatalogError::UnknownParam {
                family: id,
                name: name.clone(),
                expected,
            });
        }
    }
    let get = |name: &str| -> f64 {
        req.params
            .get(name)
            .copied()
            .unwrap_or_else(|| schema.iter().find(|p| p.name == name).map_or(f64::NAN, |p| p.default))
    };
    let w = req.window;
    match id {
        FamilyId::Gr1Cosh => make_gr1(Gr1Branch::Cosh, get("a"), get("b"), get("v1"), w),
        FamilyId::Gr1Sinh => make_gr1(Gr1Branch::Sinh, get("a"), get("b"), get("v1"), w),
        FamilyId::Gr2Exp | FamilyId::Gr2Arctanh => {
            let branch = if id == FamilyId::Gr2Exp {
                Gr2Branch::Exp
            } else {
                Gr2Branch::Arctanh
            };
            let sign = require_sign(id, "sign", get("sign"))?;
            make_gr2(branch, get("a"), get("b"), get("v1"), sign, w)
        }
        FamilyId::Gr3 => make_gr3(get("a"), get("b"), get("v3"), w),
        FamilyId::NullScroll => {
            let idx = get("base");
            let base =
                NullBase::ALL
                    .into_iter()
                    .find(|b| b.index() == idx)
                    .ok_or_else(|| CatalogError::InvalidParam {
                        family: id,
                        name: "base".into(),
                        value: idx,
                        reason: "must be 0, 1 or 2".into(),
                    })?;
            make_null_scroll_base(base, get("k"), w)
        }
        FamilyId::Thm4V0 => make_thm4_v0(get("a"), get("b"), require_sign(id, "eps", get("eps"))?, w),
        FamilyId::Thm4A0 => make_thm4_a0(get("v2"), get("b"), require_sign(id, "eps", get("eps"))?, w),
        FamilyId::Thm4A1 => make_thm4_a1(get("v2"), get("a"), get("b"), w),
        FamilyId::Thm4A2 => make_thm4_a2(get("v2"), get("a"), get("b"), w),
        FamilyId::IntroX => intro_x(w),
        FamilyId::IntroY => intro_y(w),
        FamilyId::GenericCylinder => {
            let case = match get("case") {
                0.0 => RulingCase::SpacelikeW,
                1.0 => RulingCase::TimelikeW,
                c => {
                    return Err(CatalogError::InvalidParam {
                        family: id,
                        name: "case".into(),
                        value: c,
                        reason: "must be 0 or 1".into(),
                    })
                }
            };
            let text = req.profile.as_deref().unwrap_or("-log(cos(s))");
            let expr = parse_scalar(text).map_err(|source| CatalogError::Profile { family: id, source })?;
            let profile: Profile = Arc::new(move |s: &S| expr.eval(s));
            make_cylinder(profile, case, Vec3::new(get("v1"), get("v2"), get("v3")), w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::max_residual;

    fn grid() -> Grid {
        Grid::new(30, 30)
    }

    #[test]
    fn every_default_family_is_a_soliton() {
        for id in FamilyId::ALL {
            let f = build(id, &BuildRequest::default()).unwrap();
            let rep = max_residual(&f.surface, f.velocity, grid()).unwrap();
            assert!(rep.max_abs <= 1e-8, "{id}: {}", rep.max_abs);
        }
    }

    #[test]
    fn family_ids_parse_loosely() {
        assert_eq!("gr1-cosh".parse::<FamilyId>().unwrap(), FamilyId::Gr1Cosh);
        assert_eq!("THM4A1".parse::<FamilyId>().unwrap(), FamilyId::Thm4A1);
        assert!("nope".parse::<FamilyId>().is_err());
        assert_eq!(FamilyId::ALL.len(), 13);
    }

    #[test]
    fn schema_of_a1() {
        let names: Vec<_> = FamilyId::Thm4A1.params().iter().map(|p| p.name).collect();
        assert_eq!(names, ["v2", "a", "b"]);
    }

    #[test]
    fn domain_violations_name_the_constraint() {
        let e = make_gr2(Gr2Branch::Arctanh, 1.0, 0.0, 0.0, Sign::Positive, Window::s(0.0, 1.0)).unwrap_err();
        assert!(matches!(&e, CatalogError::DomainViolation { constraint, .. } if constraint.contains("a e^(2s) < 1")));
        assert!(matches!(
            make_gr1(Gr1Branch::Sinh, 0.0, 0.0, 0.0, Window::s(-1.0, 1.0)),
            Err(CatalogError::DomainViolation { .. })
        ));
        assert!(matches!(
            make_gr3(0.0, 0.0, 0.0, Window::s(-2.0, 0.0)),
            Err(CatalogError::DomainViolation { .. })
        ));
        assert!(matches!(
            make_thm4_a2(0.0, 1.0, 0.0, Window::s(-1.5, 0.0)),
            Err(CatalogError::DomainViolation { .. })
        ));
        assert!(matches!(
            make_thm4_a0(1.0, 0.0, Sign::Positive, Window::s(0.5, 2.0)),
            Err(CatalogError::DomainViolation { .. })
        ));
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let mut req = BuildRequest::default();
        req.params.insert("q".into(), 1.0);
        assert!(matches!(
            build(FamilyId::Gr3, &req),
            Err(CatalogError::UnknownParam { .. })
        ));
    }

    #[test]
    fn eps_mismatch_detected() {
        // t-range on the spacelike side of the degeneracy line t = 1/2
        let e = make_thm4_a0(0.0, 0.0, Sign::Positive, Window::st((1.0, 2.0), (-1.0, 0.0))).unwrap_err();
        assert!(matches!(
            e,
            CatalogError::EpsMismatch {
                expected: Sign::Positive,
                found: Sign::Negative,
                ..
            }
        ));
    }

    #[test]
    fn intro_x_position() {
        let (x, _) = intro_examples();
        let p = x.surface.point(1.0, 1.0).unwrap();
        assert!((p - Vec3::new(1.0, 1.5, 0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn null_scroll_requires_nonvanishing_slope() {
        let flat: Profile = Arc::new(|s: &S| Ok(s.square()));
        assert!(matches!(
            make_null_scroll(flat, 1.0, Window::default()),
            Err(CatalogError::DegenerateBase { .. })
        ));
    }

    #[test]
    fn non_soliton_cylinder() {
        let u: Profile = Arc::new(|s: &S| Ok(s.square()));
        let f = make_cylinder(u, RulingCase::TimelikeW, Vec3::e2(), Window::default()).unwrap();
        let rep = max_residual(&f.surface, f.velocity, grid()).unwrap();
        assert!(rep.max_abs > 1e-3);
    }
}
