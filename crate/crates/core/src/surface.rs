//! Second-order surface jets, fundamental data and the soliton residuals.
//!
//! For a parametrization `X(s,t)` with `N = X_s x X_t / |X_s x X_t|`,
//!
//! ```text
//! 2H = -(E (X_s,X_t,X_tt) - 2F (X_s,X_t,X_st) + G (X_s,X_t,X_ss)) / |EG - F^2|^(3/2)
//! ```
//!
//! The numerator without its leading minus is `H1`. Two residuals are
//! exposed:
//!
//! * `r1 = 2H - <N, v>` (intrinsic form, needs a non-degenerate point);
//! * `r2 = H1 - eps (EG - F^2) (X_s, X_t, v)` (polynomial form).
//!
//! Since `|EG - F^2| = -eps (EG - F^2)`, the two are tied by
//! `r2 = -|EG - F^2|^(3/2) r1` wherever both are defined.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{CurveJet, EvalError, SharedCurve};
use crate::minkowski::{triple, LinearMap3, MVec3};
use crate::series::Series;
use crate::{Real, Sign};

/// Relative threshold on `|<X_s x X_t, X_s x X_t>|` below which a point is
/// treated as degenerate.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("degenerate point: |<Xs x Xt, Xs x Xt>| = {cross_norm_sq:e} <= {threshold:e} (EG - F^2 ~ 0)")]
    DegeneratePoint { cross_norm_sq: f64, threshold: f64 },
    #[error("eps = <N,N> unavailable at a degenerate point and none supplied")]
    EpsUnavailable,
    #[error("all {points} grid points are degenerate")]
    AllPointsDegenerate { points: usize },
    #[error("grid {ns}x{nt} is too small (need at least 2x2)")]
    InvalidGrid { ns: usize, nt: usize },
    #[error("({s}, {t}) lies outside the surface domain")]
    OutOfDomain { s: f64, t: f64 },
    #[error("non-finite jet at ({s}, {t})")]
    NonFinite { s: f64, t: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Position and first/second partial derivatives of `X(s,t)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet2<T> {
    pub p: MVec3<T>,
    pub ps: MVec3<T>,
    pub pt: MVec3<T>,
    pub pss: MVec3<T>,
    pub pst: MVec3<T>,
    pub ptt: MVec3<T>,
}

impl<T: Real> SurfaceJet2<T> {
    /// Jet of the ruled surface `gamma(s) + t w(s)`.
    pub fn ruled(gamma: &CurveJet<T>, w: &CurveJet<T>, t: T) -> Self {
        SurfaceJet2 {
            p: gamma.p + w.p * t,
            ps: gamma.d1 + w.d1 * t,
            pt: w.p,
            pss: gamma.d2 + w.d2 * t,
            pst: w.d1,
            ptt: MVec3::zero(),
        }
    }

    /// Jet of a bivariate closure over Taylor series, with the mixed partial
    /// recovered by polarization along `(1,1)`.
    pub fn from_series_fn<F>(f: F, s: T, t: T) -> Result<Self, EvalError>
    where
        F: Fn(&Series<T>, &Series<T>) -> Result<[Series<T>; 3], EvalError>,
    {
        let vec = |c: &[Series<T>; 3], k: usize| MVec3::new(c[0].derivative(k), c[1].derivative(k), c[2].derivative(k));
        let along_s = f(&Series::variable(s, 2), &Series::constant(t, 2))?;
        let along_t = f(&Series::constant(s, 2), &Series::variable(t, 2))?;
        let diag = f(&Series::variable(s, 2), &Series::variable(t, 2))?;
        let pss = vec(&along_s, 2);
        let ptt = vec(&along_t, 2);
        let half = T::lit(0.5);
        Ok(SurfaceJet2 {
            p: vec(&along_s, 0),
            ps: vec(&along_s, 1),
            pt: vec(&along_t, 1),
            pss,
            pst: (vec(&diag, 2) - pss - ptt) * half,
            ptt,
        })
    }

    /// Jet of `X~(s,t) = X(t,s)` at the swapped point.
    pub fn swap_st(&self) -> Self {
        SurfaceJet2 {
            p: self.p,
            ps: self.pt,
            pt: self.ps,
            pss: self.ptt,
            pst: self.pst,
            ptt: self.pss,
        }
    }

    /// Jet of `A X + b` (the translation only moves `p`).
    pub fn transformed(&self, map: &LinearMap3<T>, translation: MVec3<T>) -> Self {
        SurfaceJet2 {
            p: map.apply(self.p) + translation,
            ps: map.apply(self.ps),
            pt: map.apply(self.pt),
            pss: map.apply(self.pss),
            pst: map.apply(self.pst),
            ptt: map.apply(self.ptt),
        }
    }

    pub fn scaled(&self, lambda: T) -> Self {
        self.transformed(&LinearMap3::scaling(lambda), MVec3::zero())
    }

    pub fn is_finite(&self) -> bool {
        [self.p, self.ps, self.pt, self.pss, self.pst, self.ptt]
            .iter()
            .all(|v| v.is_finite())
    }

    /// Largest Euclidean norm among the derivative vectors; the scale used
    /// by relative tolerances.
    pub fn scale(&self) -> T {
        [self.ps, self.pt, self.pss, self.pst, self.ptt]
            .iter()
            .fold(T::zero(), |m, v| m.max(v.euclid_norm()))
    }

    /// `X_s x X_t` (not normalized).
    pub fn cross(&self) -> MVec3<T> {
        self.ps.cross(self.pt)
    }

    /// First fundamental form `(E, F, G)`.
    pub fn first_form(&self) -> (T, T, T) {
        (self.ps.dot(self.ps), self.ps.dot(self.pt), self.pt.dot(self.pt))
    }

    /// `EG - F^2`.
    pub fn metric_det(&self) -> T {
        let (e, f, g) = self.first_form();
        e * g - f * f
    }

    /// `H1 = E (Xs,Xt,Xtt) - 2F (Xs,Xt,Xst) + G (Xs,Xt,Xss)`.
    pub fn h1(&self) -> T {
        let (e, f, g) = self.first_form();
        let (a, b) = (self.ps, self.pt);
        e * triple(a, b, self.ptt) - (f + f) * triple(a, b, self.pst) + g * triple(a, b, self.pss)
    }

    /// `true` when `|<Xs x Xt, Xs x Xt>| <= tol |Xs|^2 |Xt|^2` (Euclidean norms).
    pub fn is_degenerate(&self, tol: T) -> bool {
        let n = self.cross();
        n.dot(n).abs() <= tol * self.ps.euclid_norm_sq() * self.pt.euclid_norm_sq()
    }
}

/// First-order geometry of a surface at a non-degenerate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalData<T> {
    pub e: T,
    pub f: T,
    pub g: T,
    /// `EG - F^2`.
    pub w2: T,
    /// `<N, N>`: `-1` on spacelike surfaces, `+1` on timelike ones.
    pub eps: Sign,
    pub normal: MVec3<T>,
    pub mean_curvature: T,
    pub gauss_curvature: T,
}

/// `E, F, G, eps, N, H, K` at a point.
pub fn fundamental_data<T: Real>(jet: &SurfaceJet2<T>, tol: T) -> Result<FundamentalData<T>, SurfaceError> {
    let n = jet.cross();
    let nn = n.dot(n);
    let threshold = tol * jet.ps.euclid_norm_sq() * jet.pt.euclid_norm_sq();
    if nn.abs() <= threshold || !nn.is_finite() {
        return Err(SurfaceError::DegeneratePoint {
            cross_norm_sq: nn.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    let (e, f, g) = jet.first_form();
    let w2 = e * g - f * f;
    let eps = Sign::of(nn);
    let len = nn.abs().sqrt();
    let (a, b) = (jet.ps, jet.pt);
    let (tss, tst, ttt) = (triple(a, b, jet.pss), triple(a, b, jet.pst), triple(a, b, jet.ptt));
    let h1 = e * ttt - (f + f) * tst + g * tss;
    let two_h = -h1 / w2.abs().powf(T::lit(1.5));
    let (l, m, nc) = (tss / len, tst / len, ttt / len);
    Ok(FundamentalData {
        e,
        f,
        g,
        w2,
        eps,
        normal: n / len,
        mean_curvature: two_h * T::lit(0.5),
        gauss_curvature: eps.value::<T>() * (l * nc - m * m) / w2,
    })
}

/// `2H - <N, v>`.
pub fn residual_intrinsic<T: Real>(jet: &SurfaceJet2<T>, v: MVec3<T>) -> Result<T, SurfaceError> {
    let fd = fundamental_data(jet, T::lit(DEFAULT_DEGENERACY_TOL))?;
    Ok(fd.mean_curvature * T::lit(2.0) - fd.normal.dot(v))
}

/// `H1 - eps (EG - F^2) (Xs, Xt, v)`. When `eps` is `None` it is computed
/// from the jet, which fails at degenerate points.
pub fn residual_polynomial<T: Real>(jet: &SurfaceJet2<T>, v: MVec3<T>, eps: Option<Sign>) -> Result<T, SurfaceError> {
    let eps = match eps {
        Some(e) => e,
        None => {
            fundamental_data(jet, T::lit(DEFAULT_DEGENERACY_TOL))
                .map_err(|_| SurfaceError::EpsUnavailable)?
                .eps
        }
    };
    Ok(jet.h1() - eps.value::<T>() * jet.metric_det() * triple(jet.ps, jet.pt, v))
}

/// Both residual forms at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonResidual<T> {
    /// `2H - <N,v>`; `None` at degenerate points.
    pub r1: Option<T>,
    /// `H1 - eps (EG-F^2) (Xs,Xt,v)`.
    pub r2: T,
    pub degenerate: bool,
}

/// Evaluates both residuals; `eps_hint` is used only when the point is
/// degenerate.
pub fn soliton_residual<T: Real>(
    jet: &SurfaceJet2<T>,
    v: MVec3<T>,
    eps_hint: Option<Sign>,
) -> Result<SolitonResidual<T>, SurfaceError> {
    match fundamental_data(jet, T::lit(DEFAULT_DEGENERACY_TOL)) {
        Ok(fd) => Ok(SolitonResidual {
            r1: Some(fd.mean_curvature * T::lit(2.0) - fd.normal.dot(v)),
            r2: residual_polynomial(jet, v, Some(fd.eps))?,
            degenerate: false,
        }),
        Err(SurfaceError::DegeneratePoint { .. }) => {
            let eps = eps_hint.ok_or(SurfaceError::EpsUnavailable)?;
            Ok(SolitonResidual {
                r1: None,
                r2: residual_polynomial(jet, v, Some(eps))?,
                degenerate: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Central-difference jet of a position map; second order in `h`.
pub fn fd_jet<T: Real>(position: impl Fn(T, T) -> MVec3<T>, s: T, t: T, h: T) -> SurfaceJet2<T> {
    let two = T::lit(2.0);
    let p = position(s, t);
    let (sp, sm) = (position(s + h, t), position(s - h, t));
    let (tp, tm) = (position(s, t + h), position(s, t - h));
    let pst = (position(s + h, t + h) - position(s + h, t - h) - position(s - h, t + h) + position(s - h, t - h))
        / (T::lit(4.0) * h * h);
    SurfaceJet2 {
        p,
        ps: (sp - sm) / (two * h),
        pt: (tp - tm) / (two * h),
        pss: (sp - p * two + sm) / (h * h),
        pst,
        ptt: (tp - p * two + tm) / (h * h),
    }
}

/// Parameter rectangle `[s0,s1] x [t0,t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub s: (T, T),
    pub t: (T, T),
}

impl<T: Real> Domain<T> {
    pub fn new(s: (T, T), t: (T, T)) -> Self {
        Domain { s, t }
    }

    pub fn contains(&self, s: T, t: T) -> bool {
        s >= self.s.0 && s <= self.s.1 && t >= self.t.0 && t <= self.t.1
    }

    pub fn swapped(&self) -> Self {
        Domain { s: self.t, t: self.s }
    }

    /// Cell-centred `ns x nt` points, strictly inside the rectangle.
    pub fn interior_grid(&self, grid: Grid) -> Vec<(T, T)> {
        let ss = centred(self.s, grid.ns);
        let ts = centred(self.t, grid.nt);
        ss.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect()
    }

    /// Inclusive `ns x nt` lattice (row-major in `s`), for meshes.
    pub fn node_grid(&self, grid: Grid) -> Vec<(T, T)> {
        let ss = linspace(self.s, grid.ns);
        let ts = linspace(self.t, grid.nt);
        ss.iter().flat_map(|&s| ts.iter().map(move |&t| (s, t))).collect()
    }
}

fn centred<T: Real>((a, b): (T, T), n: usize) -> Vec<T> {
    let step = (b - a) / T::lit(n as f64);
    (0..n).map(|i| a + step * (T::lit(i as f64) + T::lit(0.5))).collect()
}

pub(crate) fn linspace<T: Real>((a, b): (T, T), n: usize) -> Vec<T> {
    if n == 1 {
        return vec![(a + b) * T::lit(0.5)];
    }
    let step = (b - a) / T::lit((n - 1) as f64);
    (0..n).map(|i| a + step * T::lit(i as f64)).collect()
}

/// Sampling resolution `ns x nt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
}

impl Grid {
    pub const fn new(ns: usize, nt: usize) -> Self {
        Grid { ns, nt }
    }

    pub fn validate(self) -> Result<Self, SurfaceError> {
        if self.ns < 2 || self.nt < 2 {
            Err(SurfaceError::InvalidGrid {
                ns: self.ns,
                nt: self.nt,
            })
        } else {
            Ok(self)
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.ns, self.nt)
    }
}

/// How a surface produces its jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    TaylorJet,
    FiniteDifference,
}

type JetFn<T> = dyn Fn(T, T) -> Result<SurfaceJet2<T>, SurfaceError> + Send + Sync;

/// A parametric surface over a rectangle, evaluated through jets.
#[derive(Clone)]
pub struct ParametricSurface<T> {
    pub domain: Domain<T>,
    pub provenance: Provenance,
    jet_fn: Arc<JetFn<T>>,
}

impl<T: Real> fmt::Debug for ParametricSurface<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricSurface")
            .field("domain", &self.domain)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ParametricSurface<T> {
    pub fn new(
        domain: Domain<T>,
        provenance: Provenance,
        jet_fn: impl Fn(T, T) -> Result<SurfaceJet2<T>, SurfaceError> + Send + Sync + 'static,
    ) -> Self {
        ParametricSurface {
            domain,
            provenance,
            jet_fn: Arc::new(jet_fn),
        }
    }

    /// Surface from a bivariate closure over Taylor series.
    pub fn from_series_fn(
        domain: Domain<T>,
        f: impl Fn(&Series<T>, &Series<T>) -> Result<[Series<T>; 3], EvalError> + Send + Sync + 'static,
    ) -> Self {
        Self::new(domain, Provenance::TaylorJet, move |s, t| {
            Ok(SurfaceJet2::from_series_fn(&f, s, t)?)
        })
    }

    /// The ruled surface `gamma(s) + t w(s)`.
    pub fn ruled(gamma: SharedCurve<T>, director: SharedCurve<T>, domain: Domain<T>) -> Self {
        Self::new(domain, Provenance::TaylorJet, move |s, t| {
            let g = gamma.jet(s)?;
            let w = director.jet(s)?;
            Ok(SurfaceJet2::ruled(&g, &w, t))
        })
    }

    /// Jet at `(s,t)`; the domain is not enforced here (see [`Self::jet_checked`]).
    pub fn jet(&self, s: T, t: T) -> Result<SurfaceJet2<T>, SurfaceError> {
        let j = (self.jet_fn)(s, t)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(SurfaceError::NonFinite {
                s: s.to_f64_lossy(),
                t: t.to_f64_lossy(),
            })
        }
    }

    pub fn jet_checked(&self, s: T, t: T) -> Result<SurfaceJet2<T>, SurfaceError> {
        if !self.domain.contains(s, t) {
            return Err(SurfaceError::OutOfDomain {
                s: s.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        self.jet(s, t)
    }

    pub fn point(&self, s: T, t: T) -> Result<MVec3<T>, SurfaceError> {
        Ok(self.jet(s, t)?.p)
    }

    pub fn with_domain(&self, domain: Domain<T>) -> Self {
        ParametricSurface {
            domain,
            provenance: self.provenance,
            jet_fn: Arc::clone(&self.jet_fn),
        }
    }

    /// `A X + b`.
    pub fn transformed(&self, map: LinearMap3<T>, translation: MVec3<T>) -> Self {
        let inner = Arc::clone(&self.jet_fn);
        Self::new(self.domain, self.provenance, move |s, t| {
            Ok(inner(s, t)?.transformed(&map, translation))
        })
    }

    /// `lambda X`.
    pub fn scaled(&self, lambda: T) -> Self {
        self.transformed(LinearMap3::scaling(lambda), MVec3::zero())
    }

    /// `X~(s,t) = X(t,s)`, which reverses the induced normal.
    pub fn swapped(&self) -> Self {
        let inner = Arc::clone(&self.jet_fn);
        Self::new(self.domain.swapped(), self.provenance, move |s, t| {
            Ok(inner(t, s)?.swap_st())
        })
    }

    /// Sign of `<N,N>` at the non-degenerate point closest to `(s, t)` on
    /// the ruling through `s`, scanning outwards in `t`.
    pub fn eps_near(&self, s: T, t: T) -> Option<Sign> {
        let tol = T::lit(DEFAULT_DEGENERACY_TOL);
        let width = self.domain.t.1 - self.domain.t.0;
        let step = if width > T::zero() {
            width / T::lit(256.0)
        } else {
            T::lit(1e-3)
        };
        for k in 0..=256 {
            let dt = step * T::lit(k as f64);
            for cand in [t + dt, t - dt] {
                if let Ok(j) = self.jet(s, cand) {
                    if let Ok(fd) = fundamental_data(&j, tol) {
                        return Some(fd.eps);
                    }
                }
            }
        }
        None
    }

    /// Both residuals at `(s,t)`, borrowing `eps` along the ruling when the
    /// point is degenerate.
    pub fn soliton_residual(&self, s: T, t: T, v: MVec3<T>) -> Result<SolitonResidual<T>, SurfaceError> {
        let jet = self.jet(s, t)?;
        if jet.is_degenerate(T::lit(DEFAULT_DEGENERACY_TOL)) {
            soliton_residual(&jet, v, self.eps_near(s, t))
        } else {
            soliton_residual(&jet, v, None)
        }
    }
}

/// Outcome of a residual sweep over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport<T> {
    pub max_abs: T,
    pub mean_abs: T,
    /// Parameter point where `|r1|` is largest.
    pub worst: (T, T),
    pub evaluated: usize,
    pub degenerate: usize,
}

/// Max `|r1|` over the interior grid, skipping and counting degenerate
/// points.
pub fn max_residual<T: Real>(
    surface: &ParametricSurface<T>,
    v: MVec3<T>,
    grid: Grid,
) -> Result<ResidualReport<T>, SurfaceError> {
    max_residual_tol(surface, v, grid, T::lit(DEFAULT_DEGENERACY_TOL))
}

pub fn max_residual_tol<T: Real>(
    surface: &ParametricSurface<T>,
    v: MVec3<T>,
    grid: Grid,
    degeneracy_tol: T,
) -> Result<ResidualReport<T>, SurfaceError> {
    let grid = grid.validate()?;
    let points = surface.domain.interior_grid(grid);
    residual_over_points(surface, v, &points, degeneracy_tol)
}

/// Max `|r1|` over an explicit point list.
pub fn residual_over_points<T: Real>(
    surface: &ParametricSurface<T>,
    v: MVec3<T>,
    points: &[(T, T)],
    degeneracy_tol: T,
) -> Result<ResidualReport<T>, SurfaceError> {
    let values: Vec<Option<(T, T, T)>> = points
        .par_iter()
        .map(|&(s, t)| {
            let jet = surface.jet(s, t)?;
            Ok(match fundamental_data(&jet, degeneracy_tol) {
                Ok(fd) => Some(((fd.mean_curvature * T::lit(2.0) - fd.normal.dot(v)).abs(), s, t)),
                Err(SurfaceError::DegeneratePoint { .. }) => None,
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_, SurfaceError>>()?;
    let mut report = ResidualReport {
        max_abs: T::zero(),
        mean_abs: T::zero(),
        worst: points.first().copied().unwrap_or((T::zero(), T::zero())),
        evaluated: 0,
        degenerate: 0,
    };
    let mut sum = T::zero();
    for v in values {
        match v {
            Some((r, s, t)) => {
                report.evaluated += 1;
                sum += r;
                if r > report.max_abs || !r.is_finite() {
                    report.max_abs = r;
                    report.worst = (s, t);
                }
            }
            None => report.degenerate += 1,
        }
    }
    if report.evaluated == 0 {
        return Err(SurfaceError::AllPointsDegenerate { points: points.len() });
    }
    report.mean_abs = sum / T::lit(report.evaluated as f64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;

    type V = MVec3<f64>;

    fn plane() -> ParametricSurface<f64> {
        ParametricSurface::from_series_fn(Domain::new((-1.0, 1.0), (-1.0, 1.0)), |s, t| {
            Ok([s.clone(), t.clone(), Series::constant(0.0, s.order())])
        })
    }

    #[test]
    fn flat_spacelike_plane() {
        let j = plane().jet(0.3, -0.2).unwrap();
        let fd = fundamental_data(&j, 1e-10).unwrap();
        assert_eq!((fd.e, fd.f, fd.g), (1.0, 0.0, 1.0));
        assert_eq!(fd.eps, Sign::Negative);
        assert_eq!(fd.mean_curvature, 0.0);
        assert_eq!(fd.gauss_curvature, 0.0);
        assert_eq!(residual_intrinsic(&j, V::e1()).unwrap(), 0.0);
    }

    #[test]
    fn plane_with_orthogonal_timelike_velocity() {
        let j = plane().jet(0.0, 0.0).unwrap();
        // H1 = 0, triple(e1, e2, e3) = 1, eps = -1, EG - F^2 = 1  =>  r2 = 1
        assert_eq!(triple(V::e1(), V::e2(), V::e3()), 1.0);
        assert_eq!(residual_polynomial(&j, V::e3(), None).unwrap(), 1.0);
    }

    #[test]
    fn null_scroll_cylinder_is_flat_and_minimal() {
        let s = ParametricSurface::ruled(
            crate::curve::LineCurve {
                base: V::zero(),
                slope: V::new(1.0, 1.0, -1.0),
            }
            .into_shared(),
            crate::curve::ConstantCurve(V::new(1.0, 0.0, 1.0)).into_shared(),
            Domain::new((-1.0, 1.0), (-1.0, 1.0)),
        );
        let fd = fundamental_data(&s.jet(0.2, 0.4).unwrap(), 1e-10).unwrap();
        assert_eq!(fd.mean_curvature, 0.0);
        assert_eq!(fd.gauss_curvature, 0.0);
    }

    #[test]
    fn timelike_cylinder_over_grim_reaper() {
        // X(s,t) = (s, -log cos s, 0) + t (0,0,1), EG - F^2 = -1 - u'^2
        let surf = ParametricSurface::<f64>::from_series_fn(Domain::new((-1.0, 1.0), (-1.0, 1.0)), |s, t| {
            Ok([s.clone(), -s.cos().ln(), t.clone()])
        });
        let j = surf.jet(0.4, 0.0).unwrap();
        let fd = fundamental_data(&j, 1e-10).unwrap();
        assert_eq!(fd.eps, Sign::Positive);
        let up = 0.4_f64.tan();
        assert!((fd.w2 - (-1.0 - up * up)).abs() < 1e-14);
        assert!(fd.gauss_curvature.abs() < 1e-14);
        assert!(residual_intrinsic(&j, V::e2()).unwrap().abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_plane_and_de_sitter_curvatures() {
        // spacelike hyperboloid x^2 + y^2 - z^2 = -1: K = -1, |H| = 1
        let h2 = ParametricSurface::<f64>::from_series_fn(Domain::new((0.1, 2.0), (0.0, 6.0)), |r, th| {
            Ok([r.sinh() * th.cos(), r.sinh() * th.sin(), r.cosh()])
        });
        let fd = fundamental_data(&h2.jet(0.7, 1.1).unwrap(), 1e-10).unwrap();
        assert_eq!(fd.eps, Sign::Negative);
        assert!((fd.gauss_curvature + 1.0).abs() < 1e-12);
        assert!((fd.mean_curvature.abs() - 1.0).abs() < 1e-12);
        // de Sitter x^2 + y^2 - z^2 = 1 (timelike): K = 1, |H| = 1
        let ds = ParametricSurface::<f64>::from_series_fn(Domain::new((-1.0, 1.0), (0.0, 6.0)), |r, th| {
            Ok([r.cosh() * th.cos(), r.cosh() * th.sin(), r.sinh()])
        });
        let fd = fundamental_data(&ds.jet(0.3, 2.0).unwrap(), 1e-10).unwrap();
        assert_eq!(fd.eps, Sign::Positive);
        assert!((fd.gauss_curvature - 1.0).abs() < 1e-12);
        assert!((fd.mean_curvature.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_point_is_reported() {
        // lightlike plane spanned by (1,0,1) and (0,1,0)
        let surf = ParametricSurface::<f64>::from_series_fn(Domain::new((-1.0, 1.0), (-1.0, 1.0)), |s, t| {
            Ok([s.clone(), t.clone(), s.clone()])
        });
        let j = surf.jet(0.0, 0.0).unwrap();
        assert!(matches!(
            fundamental_data(&j, 1e-10),
            Err(SurfaceError::DegeneratePoint { .. })
        ));
        assert!(matches!(
            residual_intrinsic(&j, V::e1()),
            Err(SurfaceError::DegeneratePoint { .. })
        ));
        assert_eq!(
            residual_polynomial(&j, V::e1(), None),
            Err(SurfaceError::EpsUnavailable)
        );
        assert!(residual_polynomial(&j, V::e1(), Some(Sign::Positive)).is_ok());
        assert!(matches!(
            max_residual(&surf, V::e1(), Grid::new(4, 4)),
            Err(SurfaceError::AllPointsDegenerate { points: 16 })
        ));
    }

    #[test]
    fn fd_jet_of_plane() {
        let j = fd_jet(|s, t| V::new(s, t, 0.0), 0.2, 0.3, 1e-3);
        assert!((j.ps - V::e1()).max_abs() < 1e-12);
        assert!((j.pt - V::e2()).max_abs() < 1e-12);
        for d in [j.pss, j.pst, j.ptt] {
            assert!(d.max_abs() < 1e-8);
        }
    }

    #[test]
    fn fd_mixed_partials_commute() {
        let f = |s: f64, t: f64| V::new((s * t).sin(), s.exp() * t, s * s - t.cosh());
        let h = 1e-4;
        let j = fd_jet(f, 0.3, 0.6, h);
        // t-derivative first, then s
        let pt = |s: f64| (f(s, 0.6 + h) - f(s, 0.6 - h)) / (2.0 * h);
        let pts = (pt(0.3 + h) - pt(0.3 - h)) / (2.0 * h);
        assert!((j.pst - pts).max_abs() < 1e-8);
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            max_residual(&plane(), V::e1(), Grid::new(1, 5)),
            Err(SurfaceError::InvalidGrid { .. })
        ));
        let rep = max_residual(&plane(), V::e1(), Grid::new(5, 5)).unwrap();
        assert_eq!(rep.max_abs, 0.0);
        assert_eq!(rep.evaluated, 25);
    }

    #[test]
    fn interior_grid_avoids_boundary() {
        let d = Domain::new((0.0, 1.0), (2.0, 3.0));
        let pts = d.interior_grid(Grid::new(2, 2));
        assert_eq!(pts, vec![(0.25, 2.25), (0.25, 2.75), (0.75, 2.25), (0.75, 2.75)]);
        let nodes = d.node_grid(Grid::new(2, 3));
        assert_eq!(nodes.len(), 6);
        assert_eq!(nodes[0], (0.0, 2.0));
        assert_eq!(nodes[5], (1.0, 3.0));
    }
}
