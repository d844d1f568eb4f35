//! Classification of ruled surfaces `X(s,t) = gamma(s) + t w(s)` as
//! translating solitons.
//!
//! All tests are invariant under reparametrizing `s` and rescaling `w`:
//!
//! * cylindricity compares the Euclidean direction `w / |w|_E` along `s`;
//! * `delta` is the causal character of `w`, `eta` that of `w_hat'` where
//!   `w_hat = w / sqrt|<w,w>|` (only defined when `w` is not lightlike);
//! * straightness of a lightlike `w_hat'` is the Euclidean curvature
//!   `|w_hat' x w_hat''| / |w_hat'|^3` of the director curve.
//!
//! The decision tree:
//!
//! ```text
//! cylindrical                       -> Thm1-{Spacelike,Timelike}Cylinder | Thm1-NullScroll | Thm1-Plane
//! not cylindrical, w lightlike      -> Thm2-Excluded
//! not cylindrical, w_hat' lightlike -> Thm4-Candidate (fit with <w',v> = 0, then verify)
//! otherwise                         -> Thm3-Plane | Thm3-MustBeCylindrical
//! ```
//!
//! A label other than `Thm2-Excluded` and `Thm3-MustBeCylindrical` is only
//! given when the soliton residual at the supplied or fitted velocity passes;
//! otherwise the report says `NotASoliton` and lists the failed condition.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::SolitonFamily;
use crate::curve::{Curve, CurveJet, EvalError, SharedCurve};
use crate::export::write_csv;
use crate::fit::{solve_velocity_constrained, FitError, VelocityFit};
use crate::minkowski::{causal_character, triple, CausalCharacter};
use crate::series::Series;
use crate::surface::{max_residual, Domain, Grid, ParametricSurface, ResidualReport, SurfaceError, SurfaceJet2};
use crate::{Sign, Vec3};

type S = Series<f64>;

/// `sup |(w/|w|_E)'|` at or below this counts as cylindrical.
pub const CYLINDER_TOL: f64 = 1e-9;
/// Relative band for calling `w` or `w_hat'` lightlike.
pub const LIGHTLIKE_TOL: f64 = 1e-9;
/// Director curvature at or below this counts as straight.
pub const STRAIGHT_TOL: f64 = 1e-8;
/// Relative defect allowed in `w_hat x w_hat' = +-w_hat'`.
pub const CROSS_IDENTITY_TOL: f64 = 1e-10;
/// Planarity: max distance to the best plane relative to the sample extent.
pub const PLANARITY_TOL: f64 = 1e-8;
/// Euclidean angle (sine) below which `v` counts as parallel to the rulings.
pub const PARALLEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("director vanishes at s = {s}")]
    DirectorVanishes { s: f64 },
    #[error("director is lightlike at s = {s}, it cannot be normalized")]
    LightlikeDirector { s: f64 },
    #[error("director derivative is lightlike at s = {s}; no striction curve exists")]
    LightlikeDirectorDerivative { s: f64 },
    #[error("director derivative vanishes at s = {s}; the surface is cylindrical there")]
    StationaryDirector { s: f64 },
    #[error("t-samples do not determine a degree-{degree} polynomial: {reason}")]
    DegenerateSampleSet { degree: usize, reason: String },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("inconclusive sampling: {reason}")]
    InconclusiveSampling { reason: String, s: Option<f64> },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

impl From<EvalError> for ClassifyError {
    fn from(e: EvalError) -> Self {
        ClassifyError::Surface(e.into())
    }
}

/// A ruled surface given by its base curve and director.
#[derive(Clone)]
pub struct RuledSurfaceSpec {
    pub gamma: SharedCurve<f64>,
    pub director: SharedCurve<f64>,
    pub domain: Domain<f64>,
}

impl fmt::Debug for RuledSurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuledSurfaceSpec")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl RuledSurfaceSpec {
    pub fn new(gamma: SharedCurve<f64>, director: SharedCurve<f64>, s_range: (f64, f64), t_range: (f64, f64)) -> Self {
        RuledSurfaceSpec {
            gamma,
            director,
            domain: Domain::new(s_range, t_range),
        }
    }

    pub fn from_family(family: &SolitonFamily) -> Self {
        RuledSurfaceSpec {
            gamma: Arc::clone(&family.gamma),
            director: Arc::clone(&family.director),
            domain: family.domain(),
        }
    }

    pub fn surface(&self) -> ParametricSurface<f64> {
        ParametricSurface::ruled(Arc::clone(&self.gamma), Arc::clone(&self.director), self.domain)
    }

    pub fn jet(&self, s: f64, t: f64) -> Result<SurfaceJet2<f64>, EvalError> {
        Ok(SurfaceJet2::ruled(&self.gamma.jet(s)?, &self.director.jet(s)?, t))
    }

    fn s_samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.domain.s;
        if n == 1 {
            return vec![0.5 * (a + b)];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

fn mdot(a: &[S; 3], b: &[S; 3]) -> S {
    &(&a[0] * &b[0]) + &(&a[1] * &b[1]) - &a[2] * &b[2]
}

fn edot(a: &[S; 3], b: &[S; 3]) -> S {
    &(&a[0] * &b[0]) + &(&a[1] * &b[1]) + &a[2] * &b[2]
}

fn scale_all(a: &[S; 3], k: &S) -> [S; 3] {
    [&a[0] * k, &a[1] * k, &a[2] * k]
}

fn diff_all(a: &[S; 3]) -> [S; 3] {
    [a[0].differentiate(), a[1].differentiate(), a[2].differentiate()]
}

fn vec_at(a: &[S; 3], k: usize) -> Vec3 {
    Vec3::new(a[0].derivative(k), a[1].derivative(k), a[2].derivative(k))
}

/// Which norm a [`UnitDirector`] divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `w / |w|_E`; defined wherever `w != 0`.
    Euclidean,
    /// `w / sqrt|<w,w>|`; defined wherever `w` is not lightlike.
    Minkowski,
}

/// The director rescaled to unit length.
#[derive(Clone)]
pub struct UnitDirector {
    pub director: SharedCurve<f64>,
    pub normalization: Normalization,
}

impl Curve<f64> for UnitDirector {
    fn taylor(&self, s: f64, order: usize) -> Result<[S; 3], EvalError> {
        let w = self.director.taylor(s, order)?;
        let mut n = match self.normalization {
            Normalization::Euclidean => edot(&w, &w),
            Normalization::Minkowski => mdot(&w, &w),
        };
        if n.value() < 0.0 {
            n = -n;
        }
        if !(n.value() > 0.0) {
            return Err(EvalError::Domain {
                func: "normalize".into(),
                arg: n.value(),
                s,
            });
        }
        Ok(scale_all(&w, &n.sqrt().recip()))
    }
}

/// `gamma - (<gamma', w_hat'> / <w_hat', w_hat'>) w_hat` with the
/// Minkowski-unit director `w_hat`.
#[derive(Clone)]
pub struct StrictionCurve {
    pub gamma: SharedCurve<f64>,
    pub unit: UnitDirector,
}

impl Curve<f64> for StrictionCurve {
    fn taylor(&self, s: f64, order: usize) -> Result<[S; 3], EvalError> {
        let g = self.gamma.taylor(s, order + 1)?;
        let w = self.unit.taylor(s, order + 1)?;
        let (gp, wp) = (diff_all(&g), diff_all(&w));
        let c = mdot(&gp, &wp) / mdot(&wp, &wp);
        Ok([
            g[0].truncate(order) - &c * &w[0].truncate(order),
            g[1].truncate(order) - &c * &w[1].truncate(order),
            g[2].truncate(order) - &c * &w[2].truncate(order),
        ])
    }
}

/// Characters and inner products along the base curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RuledInvariants {
    pub s: Vec<f64>,
    /// `<w,w>` character per sample.
    pub delta_samples: Vec<CausalCharacter>,
    /// `w_hat'` character per sample; for lightlike `w` the raw `w'` is used.
    pub eta_samples: Vec<CausalCharacter>,
    /// `<gamma', w'>`.
    pub q: Vec<f64>,
    /// `<gamma', gamma'>`.
    pub r: Vec<f64>,
    /// `<gamma', w>`.
    pub f_ruling: Vec<f64>,
    /// `|(w / |w|_E)'|`.
    pub direction_variation: Vec<f64>,
    /// Euclidean curvature of `w_hat`; `None` where `w_hat'` vanishes or `w` is lightlike.
    pub director_curvature: Vec<Option<f64>>,
    /// `min(|w_hat x w_hat' - w_hat'|, |w_hat x w_hat' + w_hat'|) / |w_hat'|_E`.
    pub cross_identity_defect: Vec<Option<f64>>,
    /// Unit (Euclidean) direction of `w_hat'` per sample.
    pub derivative_direction: Vec<Option<Vec3>>,
    pub cylindrical: bool,
}

impl RuledInvariants {
    pub fn delta(&self) -> Option<CausalCharacter> {
        uniform(&self.delta_samples)
    }

    pub fn eta(&self) -> Option<CausalCharacter> {
        uniform(&self.eta_samples)
    }

    pub fn max_direction_variation(&self) -> f64 {
        self.direction_variation.iter().fold(0.0, |m, &x| m.max(x))
    }

    pub fn max_director_curvature(&self) -> f64 {
        self.director_curvature.iter().flatten().fold(0.0, |m, &x| m.max(x))
    }

    pub fn max_cross_identity_defect(&self) -> f64 {
        self.cross_identity_defect.iter().flatten().fold(0.0, |m, &x| m.max(x))
    }

    /// First sample whose character differs from the first one.
    fn first_change(chars: &[CausalCharacter], s: &[f64]) -> Option<f64> {
        chars.iter().position(|c| *c != chars[0]).map(|i| s[i])
    }
}

fn uniform(chars: &[CausalCharacter]) -> Option<CausalCharacter> {
    let first = *chars.first()?;
    chars.iter().all(|&c| c == first).then_some(first)
}

struct Sample {
    delta: CausalCharacter,
    eta: CausalCharacter,
    q: f64,
    r: f64,
    f: f64,
    variation: f64,
    curvature: Option<f64>,
    cross_defect: Option<f64>,
    direction: Option<Vec3>,
}

fn sample_invariants(spec: &RuledSurfaceSpec, s: f64) -> Result<Sample, ClassifyError> {
    let g: CurveJet<f64> = spec.gamma.jet(s)?;
    let w: CurveJet<f64> = spec.director.jet(s)?;
    if w.p.euclid_norm() == 0.0 {
        return Err(ClassifyError::DirectorVanishes { s });
    }
    let unit_e = UnitDirector {
        director: Arc::clone(&spec.director),
        normalization: Normalization::Euclidean,
    }
    .jet(s)?;
    let delta = causal_character(w.p, LIGHTLIKE_TOL);
    let mut out = Sample {
        delta,
        eta: causal_character(w.d1, LIGHTLIKE_TOL),
        q: g.d1.dot(w.d1),
        r: g.d1.dot(g.d1),
        f: g.d1.dot(w.p),
        variation: unit_e.d1.euclid_norm(),
        curvature: None,
        cross_defect: None,
        direction: None,
    };
    if matches!(delta, CausalCharacter::Spacelike | CausalCharacter::Timelike) {
        let unit = UnitDirector {
            director: Arc::clone(&spec.director),
            normalization: Normalization::Minkowski,
        }
        .taylor(s, 2)?;
        let (u, up, upp) = (vec_at(&unit, 0), vec_at(&unit, 1), vec_at(&unit, 2));
        let speed = up.euclid_norm();
        // w_hat' is zero exactly when the direction is stationary
        out.eta = if out.variation <= CYLINDER_TOL {
            CausalCharacter::ZeroVector
        } else {
            causal_character(up, LIGHTLIKE_TOL * speed.max(1.0))
        };
        if speed > 0.0 && out.variation > CYLINDER_TOL {
            out.curvature = Some(up.euclid_cross(upp).euclid_norm() / speed.powi(3));
            let c = u.cross(up);
            out.cross_defect = Some((c - up).euclid_norm().min((c + up).euclid_norm()) / speed);
            out.direction = Some(up / speed);
        }
    }
    Ok(out)
}

/// Invariants on `samples` equally spaced values of `s` (ends included).
pub fn ruled_invariants(spec: &RuledSurfaceSpec, samples: usize) -> Result<RuledInvariants, ClassifyError> {
    if samples < 3 {
        return Err(ClassifyError::TooFewSamples {
            needed: 3,
            got: samples,
        });
    }
    let s = spec.s_samples(samples);
    let rows = s
        .par_iter()
        .map(|&si| sample_invariants(spec, si))
        .collect::<Result<Vec<_>, _>>()?;
    let direction_variation: Vec<f64> = rows.iter().map(|r| r.variation).collect();
    let cylindrical = direction_variation.iter().all(|&x| x <= CYLINDER_TOL);
    Ok(RuledInvariants {
        delta_samples: rows.iter().map(|r| r.delta).collect(),
        eta_samples: rows.iter().map(|r| r.eta).collect(),
        q: rows.iter().map(|r| r.q).collect(),
        r: rows.iter().map(|r| r.r).collect(),
        f_ruling: rows.iter().map(|r| r.f).collect(),
        direction_variation,
        director_curvature: rows.iter().map(|r| r.curvature).collect(),
        cross_identity_defect: rows.iter().map(|r| r.cross_defect).collect(),
        derivative_direction: rows.iter().map(|r| r.direction).collect(),
        cylindrical,
        s,
    })
}

/// The same surface based on its striction curve, with the Minkowski-unit
/// director. `s` keeps its meaning; `t` now measures Minkowski length along
/// the rulings from the striction curve, so the `t`-range covers a different
/// patch of the same surface.
pub fn striction_reparametrize(spec: &RuledSurfaceSpec, samples: usize) -> Result<RuledSurfaceSpec, ClassifyError> {
    let inv = ruled_invariants(spec, samples.max(3))?;
    for (i, &s) in inv.s.iter().enumerate() {
        match (inv.delta_samples[i], inv.eta_samples[i]) {
            (CausalCharacter::Lightlike | CausalCharacter::ZeroVector, _) => {
                return Err(ClassifyError::LightlikeDirector { s })
            }
            (_, CausalCharacter::Lightlike) => return Err(ClassifyError::LightlikeDirectorDerivative { s }),
            (_, CausalCharacter::ZeroVector) => return Err(ClassifyError::StationaryDirector { s }),
            _ => {}
        }
    }
    let unit = UnitDirector {
        director: Arc::clone(&spec.director),
        normalization: Normalization::Minkowski,
    };
    Ok(RuledSurfaceSpec {
        gamma: StrictionCurve {
            gamma: Arc::clone(&spec.gamma),
            unit: unit.clone(),
        }
        .into_shared(),
        director: unit.into_shared(),
        domain: spec.domain,
    })
}

/// Coefficients of the soliton residual `H1 - eps (EG - F^2)(Xs, Xt, v)` as
/// a polynomial in `t` at fixed `s`, lowest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct TPolynomial {
    pub s: f64,
    pub eps: Sign,
    pub coeffs: Vec<f64>,
    /// Largest `|H1| + |(EG - F^2)(Xs, Xt, v)|` over the samples.
    pub scale: f64,
}

/// Extracts coefficients from `degree + 1` Chebyshev-spaced samples of the
/// `t`-range.
pub fn t_polynomial_coeffs(
    spec: &RuledSurfaceSpec,
    v: Vec3,
    s: f64,
    degree: usize,
    eps: Sign,
) -> Result<TPolynomial, ClassifyError> {
    let (a, b) = spec.domain.t;
    let n = degree + 1;
    let ts: Vec<f64> = (0..n)
        .map(|k| {
            let tau = (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * tau
        })
        .collect();
    t_polynomial_coeffs_at(spec, v, s, eps, &ts)
}

/// As [`t_polynomial_coeffs`] on explicit samples; the degree is `ts.len() - 1`.
pub fn t_polynomial_coeffs_at(
    spec: &RuledSurfaceSpec,
    v: Vec3,
    s: f64,
    eps: Sign,
    ts: &[f64],
) -> Result<TPolynomial, ClassifyError> {
    let n = ts.len();
    let degenerate = |reason: String| ClassifyError::DegenerateSampleSet {
        degree: n.saturating_sub(1),
        reason,
    };
    if n == 0 {
        return Err(degenerate("no samples".into()));
    }
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) || (n > 1 && hi <= lo) {
        return Err(degenerate(format!("samples span [{lo}, {hi}]")));
    }
    let g = spec.gamma.jet(s)?;
    let w = spec.director.jet(s)?;
    let e = eps.value::<f64>();
    let mut values = Vec::with_capacity(n);
    let mut scale = 0.0_f64;
    for &t in ts {
        let jet = SurfaceJet2::ruled(&g, &w, t);
        let h1 = jet.h1();
        let rhs = jet.metric_det() * triple(jet.ps, jet.pt, v);
        scale = scale.max(h1.abs() + rhs.abs());
        values.push(h1 - e * rhs);
    }
    let c = 0.5 * (lo + hi);
    let h = if n > 1 { 0.5 * (hi - lo) } else { 1.0 };
    let m = DMatrix::from_fn(n, n, |i, j| ((ts[i] - c) / h).powi(j as i32));
    let a = m
        .lu()
        .solve(&DVector::from_vec(values))
        .ok_or_else(|| degenerate("Vandermonde matrix is singular (repeated samples)".into()))?;
    // sum_k a_k ((t - c)/h)^k expanded in powers of t
    let mut coeffs = vec![0.0; n];
    for k in 0..n {
        let ak = a[k] / h.powi(k as i32);
        let mut binom = 1.0;
        for (j, slot) in coeffs.iter_mut().enumerate().take(k + 1) {
            *slot += ak * binom * (-c).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    Ok(TPolynomial { s, eps, coeffs, scale })
}

/// Best-fit plane through sampled surface points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Planarity {
    pub planar: bool,
    /// Euclidean unit normal of the least-squares plane.
    pub normal: Vec3,
    pub max_distance: f64,
    /// Largest distance of a sample from the centroid.
    pub scale: f64,
}

/// Least-squares plane through a `samples x samples` node grid.
pub fn planarity_test(spec: &RuledSurfaceSpec, samples: usize) -> Result<Planarity, ClassifyError> {
    if samples < 4 {
        return Err(ClassifyError::TooFewSamples {
            needed: 4,
            got: samples,
        });
    }
    let grid = Grid::new(samples, samples);
    let points = spec
        .domain
        .node_grid(grid)
        .par_iter()
        .map(|&(s, t)| Ok(spec.gamma.point(s)? + spec.director.point(s)? * t))
        .collect::<Result<Vec<Vec3>, EvalError>>()?;
    let centroid = points.iter().fold(Vec3::zero(), |acc, p| acc + *p) / points.len() as f64;
    let m = DMatrix::from_fn(points.len(), 3, |i, j| (points[i] - centroid).to_array()[j]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let k = svd.singular_values.imin();
    let normal = Vec3::new(vt[(k, 0)], vt[(k, 1)], vt[(k, 2)]);
    let max_distance = points
        .iter()
        .map(|p| (*p - centroid).euclid_dot(normal).abs())
        .fold(0.0, f64::max);
    let scale = points.iter().map(|p| (*p - centroid).euclid_norm()).fold(0.0, f64::max);
    Ok(Planarity {
        planar: max_distance <= PLANARITY_TOL * scale,
        normal,
        max_distance,
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    SpacelikeCylinder,
    TimelikeCylinder,
    NullScroll,
    CylindricalPlane,
    LightlikeExcluded,
    NonCylindricalPlane,
    MustBeCylindrical,
    LightlikeDerivativeCandidate,
    NotASoliton,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::SpacelikeCylinder => "Thm1-SpacelikeCylinder",
            CaseLabel::TimelikeCylinder => "Thm1-TimelikeCylinder",
            CaseLabel::NullScroll => "Thm1-NullScroll",
            CaseLabel::CylindricalPlane => "Thm1-Plane",
            CaseLabel::LightlikeExcluded => "Thm2-Excluded",
            CaseLabel::NonCylindricalPlane => "Thm3-Plane",
            CaseLabel::MustBeCylindrical => "Thm3-MustBeCylindrical",
            CaseLabel::LightlikeDerivativeCandidate => "Thm4-Candidate",
            CaseLabel::NotASoliton => "NotASoliton",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tested condition; `passed` means `value <= threshold` unless the
/// condition says otherwise in its name.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Condition {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Condition {
            name,
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    fn above(name: &'static str, value: f64, threshold: f64) -> Self {
        Condition {
            name,
            value,
            threshold,
            passed: value > threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Bound on `max |2H - <N,v>|` for a verified soliton.
    pub tol: f64,
    /// `s`-samples for the invariants.
    pub samples: usize,
    /// Interior grid for fitting and residual checks.
    pub grid: Grid,
    /// Per-axis samples for the planarity test.
    pub plane_samples: usize,
    /// `s`-samples in the coefficient table.
    pub table_rows: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-8,
            samples: 101,
            grid: Grid::new(20, 20),
            plane_samples: 12,
            table_rows: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub label: CaseLabel,
    pub delta: CausalCharacter,
    pub eta: CausalCharacter,
    pub cylindrical: bool,
    pub conditions: Vec<Condition>,
    /// Velocity used for verification: the supplied one, or a representative
    /// of the fitted solution set.
    pub velocity: Option<Vec3>,
    pub velocity_supplied: bool,
    pub fit: Option<VelocityFit>,
    pub residual: Option<ResidualReport<f64>>,
    pub planarity: Option<Planarity>,
    /// Rows of `A_0..A_3` (or `B_0..B_2` for lightlike `w_hat'`).
    pub coefficients: Vec<TPolynomial>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failed_conditions(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.passed)
    }

    /// CSV with columns `s,eps,scale,c0,..,cN`.
    pub fn write_coefficients_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let n = self.coefficients.iter().map(|c| c.coeffs.len()).max().unwrap_or(0);
        let names: Vec<String> = (0..n).map(|k| format!("c{k}")).collect();
        let mut header = vec!["s", "eps", "scale"];
        header.extend(names.iter().map(String::as_str));
        write_csv(
            out,
            &header,
            self.coefficients.iter().map(|c| {
                let mut row = vec![c.s, c.eps.value(), c.scale];
                row.extend(c.coeffs.iter().copied());
                row.resize(3 + n, 0.0);
                row
            }),
        )
    }
}

fn fmt_vec(v: Vec3) -> String {
    format!("{:.12}, {:.12}, {:.12}", v.x, v.y, v.z)
}

fn character_name(c: CausalCharacter) -> &'static str {
    match c {
        CausalCharacter::Spacelike => "spacelike",
        CausalCharacter::Timelike => "timelike",
        CausalCharacter::Lightlike => "lightlike",
        CausalCharacter::ZeroVector => "zero",
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case: {}", self.label)?;
        writeln!(f, "cylindrical: {}", self.cylindrical)?;
        writeln!(f, "director: {}", character_name(self.delta))?;
        writeln!(f, "director_derivative: {}", character_name(self.eta))?;
        if let Some(v) = self.velocity {
            let source = if self.velocity_supplied { "supplied" } else { "fitted" };
            writeln!(f, "velocity: {}", fmt_vec(v))?;
            writeln!(f, "velocity_source: {source}")?;
        }
        if let Some(fit) = &self.fit {
            writeln!(f, "fit_rank: {}", fit.rank)?;
            writeln!(f, "fit_nullspace_dim: {}", fit.nullspace_dim())?;
            for (i, n) in fit.nullspace.iter().enumerate() {
                writeln!(f, "fit_nullspace_{i}: {}", fmt_vec(*n))?;
            }
            writeln!(f, "fit_rms: {:e}", fit.rms)?;
        }
        if let Some(r) = &self.residual {
            writeln!(f, "residual_max: {:e}", r.max_abs)?;
            writeln!(f, "residual_mean: {:e}", r.mean_abs)?;
            writeln!(f, "residual_worst: {}, {}", r.worst.0, r.worst.1)?;
            writeln!(f, "degenerate_points: {}", r.degenerate)?;
        }
        if let Some(p) = &self.planarity {
            writeln!(f, "planar: {}", p.planar)?;
            writeln!(f, "plane_normal: {}", fmt_vec(p.normal))?;
            writeln!(f, "plane_max_distance: {:e}", p.max_distance)?;
        }
        for c in &self.conditions {
            writeln!(
                f,
                "condition: {} = {:e} (threshold {:e}) {}",
                c.name,
                c.value,
                c.threshold,
                if c.passed { "pass" } else { "fail" }
            )?;
        }
        for row in &self.coefficients {
            let cs: Vec<String> = row.coeffs.iter().map(|c| format!("{c:e}")).collect();
            writeln!(
                f,
                "coefficients: s = {} eps = {} scale = {:e} [{}]",
                row.s,
                row.eps,
                row.scale,
                cs.join(", ")
            )?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Representative of the fitted solution set: the minimum-norm solution, or
/// a nullspace direction when the system is homogeneous.
pub fn representative_velocity(fit: &VelocityFit) -> Option<Vec3> {
    let scale = fit.singular_values.iter().fold(0.0_f64, |m, &x| m.max(x));
    if fit.v.euclid_norm() > 1e-9 * scale.max(1.0) {
        Some(fit.v)
    } else {
        fit.nullspace.first().copied()
    }
}

struct Builder<'a> {
    spec: &'a RuledSurfaceSpec,
    surface: ParametricSurface<f64>,
    opts: ClassifyOptions,
    report: ClassificationReport,
}

impl Builder<'_> {
    /// Supplied velocity, or a fit under the given constraints.
    fn velocity(&mut self, v: Option<Vec3>, constraints: &[Vec3]) -> Result<Option<Vec3>, ClassifyError> {
        if let Some(v) = v {
            self.report.velocity = Some(v);
            self.report.velocity_supplied = true;
            return Ok(Some(v));
        }
        match solve_velocity_constrained(&self.surface, self.opts.grid, constraints) {
            Ok(fit) => {
                let rep = representative_velocity(&fit);
                if rep.is_none() {
                    self.report.notes.push("only v = 0 satisfies the fitted system".into());
                }
                self.report.velocity = rep;
                self.report.fit = Some(fit);
                Ok(rep)
            }
            Err(FitError::TooFewPoints { usable }) => Err(ClassifyError::InconclusiveSampling {
                reason: format!("only {usable} non-degenerate grid points"),
                s: None,
            }),
            Err(FitError::RankDeficient { .. }) => {
                self.report.notes.push("velocity system has rank 0".into());
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    /// Residual check at `v`; `true` when it passes.
    fn verify(&mut self, v: Option<Vec3>) -> Result<bool, ClassifyError> {
        let Some(v) = v else {
            self.report.conditions.push(Condition::above("velocity_norm", 0.0, 0.0));
            return Ok(false);
        };
        let rep = max_residual(&self.surface, v, self.opts.grid)?;
        if rep.evaluated == 0 {
            return Err(ClassifyError::InconclusiveSampling {
                reason: "all grid points are degenerate".into(),
                s: None,
            });
        }
        let ok = rep.max_abs <= self.opts.tol;
        self.report
            .conditions
            .push(Condition::at_most("soliton_residual", rep.max_abs, self.opts.tol));
        self.report.residual = Some(rep);
        Ok(ok)
    }

    fn coefficient_table(&mut self, v: Option<Vec3>, degree: usize) -> Result<(), ClassifyError> {
        let Some(v) = v else { return Ok(()) };
        let n = self.opts.table_rows.max(1);
        let (a, b) = self.spec.domain.s;
        let t_mid = 0.5 * (self.spec.domain.t.0 + self.spec.domain.t.1);
        let mut first: Option<Sign> = None;
        for k in 0..n {
            let s = a + (b - a) * (k as f64 + 0.5) / n as f64;
            let Some(eps) = self.surface.eps_near(s, t_mid) else {
                self.report
                    .notes
                    .push(format!("no non-degenerate point on the ruling at s = {s}"));
                continue;
            };
            match first {
                None => first = Some(eps),
                Some(e) if e != eps => {
                    self.report.notes.push(format!(
                        "<N,N> changes sign near s = {s}; coefficients use the local sign"
                    ));
                    first = Some(eps);
                }
                _ => {}
            }
            self.report
                .coefficients
                .push(t_polynomial_coeffs(self.spec, v, s, degree, eps)?);
        }
        Ok(())
    }
}

/// Classifies `spec`; with `v` the soliton equation is checked at `v`,
/// otherwise `v` is fitted.
pub fn classify(
    spec: &RuledSurfaceSpec,
    v: Option<Vec3>,
    opts: ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let inv = ruled_invariants(spec, opts.samples)?;
    let delta = inv.delta().ok_or_else(|| ClassifyError::InconclusiveSampling {
        reason: "the director changes causal character".into(),
        s: RuledInvariants::first_change(&inv.delta_samples, &inv.s),
    })?;
    if delta == CausalCharacter::ZeroVector {
        return Err(ClassifyError::DirectorVanishes { s: inv.s[0] });
    }
    let mut b = Builder {
        spec,
        surface: spec.surface(),
        opts,
        report: ClassificationReport {
            label: CaseLabel::NotASoliton,
            delta,
            eta: inv.eta_samples[0],
            cylindrical: inv.cylindrical,
            conditions: vec![],
            velocity: None,
            velocity_supplied: false,
            fit: None,
            residual: None,
            planarity: None,
            coefficients: vec![],
            notes: vec![],
        },
    };
    let variation = inv.max_direction_variation();

    if inv.cylindrical {
        b.report.eta = CausalCharacter::ZeroVector;
        b.report.conditions.push(Condition::at_most(
            "ruling_direction_variation",
            variation,
            CYLINDER_TOL,
        ));
        let plane = planarity_test(spec, opts.plane_samples)?;
        b.report.planarity = Some(plane);
        let vel = b.velocity(v, &[])?;
        let mut ok = b.verify(vel)?;
        let w = spec.director.point(inv.s[inv.s.len() / 2])?;
        let w = w / w.euclid_norm();
        if delta == CausalCharacter::Lightlike && !plane.planar {
            if let Some(v) = vel {
                let sine = v.euclid_cross(w).euclid_norm() / v.euclid_norm();
                b.report
                    .conditions
                    .push(Condition::at_most("velocity_parallel_to_rulings", sine, PARALLEL_TOL));
                ok &= sine <= PARALLEL_TOL;
            }
        }
        b.coefficient_table(vel, 3)?;
        b.report.label = if !ok {
            b.report.notes.push(format!(
                "cylinder with {} rulings that fails the soliton equation",
                character_name(delta)
            ));
            CaseLabel::NotASoliton
        } else if plane.planar {
            b.report.notes.push("the surface is both cylindrical and planar".into());
            CaseLabel::CylindricalPlane
        } else {
            match delta {
                CausalCharacter::Spacelike => CaseLabel::SpacelikeCylinder,
                CausalCharacter::Timelike => CaseLabel::TimelikeCylinder,
                _ => CaseLabel::NullScroll,
            }
        };
        return Ok(b.report);
    }

    b.report.conditions.push(Condition::at_most(
        "ruling_direction_variation",
        variation,
        CYLINDER_TOL,
    ));

    if delta == CausalCharacter::Lightlike {
        b.report.eta = inv.eta().unwrap_or(inv.eta_samples[0]);
        let vel = b.velocity(v, &[])?;
        b.verify(vel)?;
        b.coefficient_table(vel, 3)?;
        if b.report.residual.is_some_and(|r| r.max_abs <= opts.tol) {
            b.report
                .notes
                .push("residual unexpectedly within tolerance; check sampling of the director".into());
        }
        b.report.label = CaseLabel::LightlikeExcluded;
        return Ok(b.report);
    }

    let eta = inv.eta().ok_or_else(|| ClassifyError::InconclusiveSampling {
        reason: "the director derivative changes causal character".into(),
        s: RuledInvariants::first_change(&inv.eta_samples, &inv.s),
    })?;
    b.report.eta = eta;

    match eta {
        CausalCharacter::Lightlike => {
            let curvature = inv.max_director_curvature();
            b.report
                .conditions
                .push(Condition::at_most("director_curvature", curvature, STRAIGHT_TOL));
            b.report.conditions.push(Condition::at_most(
                "director_cross_identity",
                inv.max_cross_identity_defect(),
                CROSS_IDENTITY_TOL,
            ));
            let mid = inv.s.len() / 2;
            let wp = inv.derivative_direction[mid].ok_or_else(|| ClassifyError::InconclusiveSampling {
                reason: "director derivative unavailable".into(),
                s: Some(inv.s[mid]),
            })?;
            let vel = b.velocity(v, &[wp])?;
            if let Some(v) = vel {
                let orth = wp.dot(v).abs() / v.euclid_norm();
                b.report
                    .conditions
                    .push(Condition::at_most("derivative_velocity_product", orth, opts.tol));
            }
            b.verify(vel)?;
            b.coefficient_table(vel, 2)?;
            let all = b
                .report
                .conditions
                .iter()
                .all(|c| c.name == "ruling_direction_variation" || c.passed);
            b.report.label = if all {
                CaseLabel::LightlikeDerivativeCandidate
            } else {
                CaseLabel::NotASoliton
            };
        }
        CausalCharacter::Spacelike | CausalCharacter::Timelike => {
            let plane = planarity_test(spec, opts.plane_samples)?;
            b.report.planarity = Some(plane);
            b.report.conditions.push(Condition::at_most(
                "plane_distance",
                plane.max_distance,
                PLANARITY_TOL * plane.scale,
            ));
            let vel = b.velocity(v, &[])?;
            let ok = b.verify(vel)?;
            b.coefficient_table(vel, 3)?;
            b.report.label = match (plane.planar, ok) {
                (true, true) => CaseLabel::NonCylindricalPlane,
                (true, false) => CaseLabel::NotASoliton,
                (false, _) => CaseLabel::MustBeCylindrical,
            };
        }
        CausalCharacter::ZeroVector => {
            return Err(ClassifyError::InconclusiveSampling {
                reason: "the director direction is stationary on part of the domain".into(),
                s: inv
                    .direction_variation
                    .iter()
                    .position(|&x| x <= CYLINDER_TOL)
                    .map(|i| inv.s[i]),
            })
        }
    }
    Ok(b.report)
}

/// Classifies independent specs in parallel.
pub fn classify_all(
    specs: &[RuledSurfaceSpec],
    v: Option<Vec3>,
    opts: ClassifyOptions,
) -> Vec<Result<ClassificationReport, ClassifyError>> {
    specs.par_iter().map(|s| classify(s, v, opts)).collect()
}
