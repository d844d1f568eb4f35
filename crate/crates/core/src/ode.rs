//! Profile ODEs of cylindrical solitons and their RK4 integration.
//!
//! With `f = 1 - u'^2`:
//!
//! ```text
//! Eq31Spacelike  u'' =  f (v2 u' - v3)         needs f > 0
//! Eq31Timelike   u'' = -f (v2 u' - v3)         needs f < 0
//! Eq32           u'' = (1 + u'^2)(v2 - v1 u')
//! Gr0Spacelike   u'' =  f (1 - u')             needs f > 0
//! Gr0Timelike    u'' = -f (1 - u')             needs f < 0
//! ```
//!
//! The `Eq31*` and `Gr0*` profiles lift to `(0, s, u) + t (1,0,0)`, `Eq32`
//! to `(s, u, 0) + t (0,0,1)`. The `Gr0*` right-hand sides are the `Eq31*`
//! ones at `v2 = v3 = -1`, so their lifts translate along `(v1, -1, -1)`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{RulingCase, SolitonFamily};
use crate::export::write_csv;
use crate::minkowski::MVec3;
use crate::surface::{Domain, ParametricSurface, Provenance, SurfaceError, SurfaceJet2};
use crate::{Real, Sign};

/// Largest step the adaptive integrator takes.
pub const MAX_STEP: f64 = 0.05;
/// Smallest step before the integration is declared stuck.
pub const MIN_STEP: f64 = 1e-12;
/// `|u'|` above this ends the integration as a blow-up.
pub const BLOW_UP: f64 = 1e6;
/// `|1 - u'^2|` at or below this leaves the regime.
pub const REGIME_BAND: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("initial slope u' = {up0} is outside the regime of {kind} (1 - u'^2 = {factor})")]
    RegimeViolationAtStart { kind: OdeKind, up0: f64, factor: f64 },
    #[error("step size underflow at s = {s} before any step was accepted")]
    StepUnderflow { s: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid integration range [{s0}, {s_end}]")]
    InvalidRange { s0: f64, s_end: f64 },
    #[error("s-range [{s0}, {s1}] not covered by the solution on [{lo}, {hi}]")]
    OutOfRange { s0: f64, s1: f64, lo: f64, hi: f64 },
    #[error("incompatible solution/family pair: {0}")]
    IncompatiblePair(String),
    #[error("unknown ODE `{0}` (expected eq31-spacelike, eq31-timelike, eq32, gr0-spacelike or gr0-timelike)")]
    UnknownOde(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OdeKind {
    Eq31Spacelike,
    Eq31Timelike,
    Eq32,
    Gr0Spacelike,
    Gr0Timelike,
}

impl OdeKind {
    pub const ALL: [OdeKind; 5] = [
        OdeKind::Eq31Spacelike,
        OdeKind::Eq31Timelike,
        OdeKind::Eq32,
        OdeKind::Gr0Spacelike,
        OdeKind::Gr0Timelike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OdeKind::Eq31Spacelike => "eq31-spacelike",
            OdeKind::Eq31Timelike => "eq31-timelike",
            OdeKind::Eq32 => "eq32",
            OdeKind::Gr0Spacelike => "gr0-spacelike",
            OdeKind::Gr0Timelike => "gr0-timelike",
        }
    }

    pub fn ruling_case(self) -> RulingCase {
        match self {
            OdeKind::Eq32 => RulingCase::TimelikeW,
            _ => RulingCase::SpacelikeW,
        }
    }

    /// Required sign of `1 - u'^2`, if any.
    pub fn regime(self) -> Option<Sign> {
        match self {
            OdeKind::Eq31Spacelike | OdeKind::Gr0Spacelike => Some(Sign::Positive),
            OdeKind::Eq31Timelike | OdeKind::Gr0Timelike => Some(Sign::Negative),
            OdeKind::Eq32 => None,
        }
    }

    /// Causal sign `<N,N>` of the lifted cylinder.
    pub fn surface_eps(self) -> Sign {
        match self {
            OdeKind::Eq31Spacelike | OdeKind::Gr0Spacelike => Sign::Negative,
            _ => Sign::Positive,
        }
    }
}

impl fmt::Display for OdeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OdeKind {
    type Err = OdeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        OdeKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| OdeError::UnknownOde(s.to_string()))
    }
}

/// One profile ODE with its velocity parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReaperOde<T> {
    pub kind: OdeKind,
    pub v1: T,
    pub v2: T,
    pub v3: T,
}

impl<T: Real> ReaperOde<T> {
    /// `Gr0*` kinds ignore `v2`, `v3` (they are fixed at `-1`).
    pub fn new(kind: OdeKind, v: MVec3<T>) -> Self {
        match kind {
            OdeKind::Gr0Spacelike | OdeKind::Gr0Timelike => ReaperOde {
                kind,
                v1: v.x,
                v2: -T::one(),
                v3: -T::one(),
            },
            _ => ReaperOde {
                kind,
                v1: v.x,
                v2: v.y,
                v3: v.z,
            },
        }
    }

    /// Velocity the lifted cylinder translates along.
    pub fn velocity(&self) -> MVec3<T> {
        MVec3::new(self.v1, self.v2, self.v3)
    }

    pub fn rhs(&self, _s: T, _u: T, up: T) -> T {
        let one = T::one();
        let f = one - up * up;
        match self.kind {
            OdeKind::Eq31Spacelike => f * (self.v2 * up - self.v3),
            OdeKind::Eq31Timelike => -f * (self.v2 * up - self.v3),
            OdeKind::Eq32 => (one + up * up) * (self.v2 - self.v1 * up),
            OdeKind::Gr0Spacelike => f * (one - up),
            OdeKind::Gr0Timelike => -f * (one - up),
        }
    }

    /// `true` when `u'` is strictly inside the regime band.
    pub fn in_regime(&self, up: T) -> bool {
        let f = T::one() - up * up;
        match self.kind.regime() {
            None => true,
            Some(Sign::Positive) => f > T::lit(REGIME_BAND),
            Some(Sign::Negative) => f < -T::lit(REGIME_BAND),
        }
    }

    fn deriv(&self, s: T, y: [T; 2]) -> [T; 2] {
        [y[1], self.rhs(s, y[0], y[1])]
    }

    fn rk4(&self, s: T, y: [T; 2], h: T) -> [T; 2] {
        let half = T::lit(0.5);
        let six = T::lit(6.0);
        let two = T::lit(2.0);
        let add = |y: [T; 2], k: [T; 2], c: T| [y[0] + k[0] * c, y[1] + k[1] * c];
        let k1 = self.deriv(s, y);
        let k2 = self.deriv(s + h * half, add(y, k1, h * half));
        let k3 = self.deriv(s + h * half, add(y, k2, h * half));
        let k4 = self.deriv(s + h, add(y, k3, h));
        [
            y[0] + h / six * (k1[0] + two * k2[0] + two * k3[0] + k4[0]),
            y[1] + h / six * (k1[1] + two * k2[1] + two * k3[1] + k4[1]),
        ]
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination<T> {
    Completed,
    /// `1 - u'^2` reached the regime boundary after the last node at `s`.
    RegimeExit {
        s: T,
    },
    /// `|u'|` exceeded the blow-up bound or the step underflowed after `s`.
    BlowUp {
        s: T,
    },
}

/// Nodes of a computed profile; `nodes` are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution<T> {
    pub ode: ReaperOde<T>,
    pub nodes: Vec<T>,
    pub u: Vec<T>,
    pub up: Vec<T>,
    /// `u''` at each node, defined as the right-hand side there.
    pub upp: Vec<T>,
    pub termination: Termination<T>,
    /// Largest accepted Richardson estimate per unit length.
    pub max_error_estimate: T,
}

impl<T: Real> ProfileSolution<T> {
    pub fn regime_exit(&self) -> Option<T> {
        match self.termination {
            Termination::RegimeExit { s } => Some(s),
            _ => None,
        }
    }

    pub fn range(&self) -> (T, T) {
        (self.nodes[0], *self.nodes.last().expect("at least one node"))
    }

    /// `max |u''_node - rhs(s, u, u')|`.
    pub fn ode_residual(&self) -> T {
        (0..self.nodes.len()).fold(T::zero(), |m, i| {
            m.max((self.upp[i] - self.ode.rhs(self.nodes[i], self.u[i], self.up[i])).abs())
        })
    }

    fn locate(&self, s: T) -> usize {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&x| x <= s);
        i.clamp(1, n - 1) - 1
    }

    /// `(u, u')` by cubic Hermite interpolation: `u` from the node values and
    /// slopes, `u'` from the slopes and the node `u''`.
    pub fn interpolate(&self, s: T) -> (T, T) {
        if self.nodes.len() == 1 {
            return (self.u[0], self.up[0]);
        }
        let i = self.locate(s);
        let h = self.nodes[i + 1] - self.nodes[i];
        let x = (s - self.nodes[i]) / h;
        let (h00, h10, h01, h11) = hermite(x);
        let u = h00 * self.u[i] + h10 * h * self.up[i] + h01 * self.u[i + 1] + h11 * h * self.up[i + 1];
        let up = h00 * self.up[i] + h10 * h * self.upp[i] + h01 * self.up[i + 1] + h11 * h * self.upp[i + 1];
        (u, up)
    }

    /// Derivative of the `u'` interpolant, i.e. `u''` without consulting the ODE.
    pub fn interpolated_second(&self, s: T) -> T {
        if self.nodes.len() == 1 {
            return self.upp[0];
        }
        let i = self.locate(s);
        let h = self.nodes[i + 1] - self.nodes[i];
        let x = (s - self.nodes[i]) / h;
        let (d00, d10, d01, d11) = hermite_derivative(x);
        (d00 * self.up[i] + d01 * self.up[i + 1]) / h + d10 * self.upp[i] + d11 * self.upp[i + 1]
    }

    /// CSV with columns `s,u,u_prime,u_second`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        write_csv(
            out,
            &["s", "u", "u_prime", "u_second"],
            (0..self.nodes.len()).map(|i| {
                vec![
                    self.nodes[i].to_f64_lossy(),
                    self.u[i].to_f64_lossy(),
                    self.up[i].to_f64_lossy(),
                    self.upp[i].to_f64_lossy(),
                ]
            }),
        )
    }
}

fn hermite<T: Real>(x: T) -> (T, T, T, T) {
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let x2 = x * x;
    let x3 = x2 * x;
    (
        two * x3 - three * x2 + one,
        x3 - two * x2 + x,
        -two * x3 + three * x2,
        x3 - x2,
    )
}

fn hermite_derivative<T: Real>(x: T) -> (T, T, T, T) {
    let (one, two, three, four, six) = (T::one(), T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
    let x2 = x * x;
    (
        six * x2 - six * x,
        three * x2 - four * x + one,
        -six * x2 + six * x,
        three * x2 - two * x,
    )
}

fn check_start<T: Real>(ode: &ReaperOde<T>, up0: T) -> Result<(), OdeError> {
    if ode.in_regime(up0) {
        Ok(())
    } else {
        Err(OdeError::RegimeViolationAtStart {
            kind: ode.kind,
            up0: up0.to_f64_lossy(),
            factor: (T::one() - up0 * up0).to_f64_lossy(),
        })
    }
}

fn finish<T: Real>(
    ode: ReaperOde<T>,
    mut pts: Vec<(T, T, T)>,
    termination: Termination<T>,
    max_error_estimate: T,
) -> ProfileSolution<T> {
    if pts.len() > 1 && pts[0].0 > pts[pts.len() - 1].0 {
        pts.reverse();
    }
    let nodes = pts.iter().map(|p| p.0).collect();
    let u = pts.iter().map(|p| p.1).collect();
    let up: Vec<T> = pts.iter().map(|p| p.2).collect();
    let upp = pts.iter().map(|p| ode.rhs(p.0, p.1, p.2)).collect();
    ProfileSolution {
        ode,
        nodes,
        u,
        up,
        upp,
        termination,
        max_error_estimate,
    }
}

/// Adaptive RK4 with step halving: a step of size `h` is accepted when the
/// Richardson estimate `|y_{h/2,h/2} - y_h| / 15` is at most `tol * |h|`;
/// the two-half-step value is kept. `s_end` may lie on either side of `s0`.
pub fn integrate<T: Real>(
    ode: ReaperOde<T>,
    s0: T,
    u0: T,
    up0: T,
    s_end: T,
    tol: T,
) -> Result<ProfileSolution<T>, OdeError> {
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(OdeError::InvalidTolerance(tol.to_f64_lossy()));
    }
    if !(s0.is_finite() && s_end.is_finite()) || s0 == s_end {
        return Err(OdeError::InvalidRange {
            s0: s0.to_f64_lossy(),
            s_end: s_end.to_f64_lossy(),
        });
    }
    check_start(&ode, up0)?;
    let dir = if s_end > s0 { T::one() } else { -T::one() };
    let (max_step, min_step) = (T::lit(MAX_STEP), T::lit(MIN_STEP));
    let fifteen = T::lit(15.0);
    let half = T::lit(0.5);
    let mut pts = vec![(s0, u0, up0)];
    let mut s = s0;
    let mut y = [u0, up0];
    let mut h = max_step.min((s_end - s0).abs());
    let mut max_est = T::zero();
    let mut termination = Termination::Completed;
    // set once a step would leave the regime; the step then never grows again
    let mut near_boundary = false;
    while (s_end - s) * dir > T::zero() {
        let remaining = (s_end - s).abs();
        // never leave a remainder too short to carry a meaningful error estimate
        let hs = if remaining <= h * T::lit(1.001) { remaining } else { h } * dir;
        let y1 = ode.rk4(s, y, hs);
        let mid = ode.rk4(s, y, hs * half);
        let y2 = ode.rk4(s + hs * half, mid, hs * half);
        let est = (y2[0] - y1[0]).abs().max((y2[1] - y1[1]).abs()) / fifteen;
        let finite = y2[0].is_finite() && y2[1].is_finite() && est.is_finite();
        let blown = finite && y2[1].abs() > T::lit(BLOW_UP);
        let floor = T::epsilon() * T::lit(16.0) * (y2[0].abs() + y2[1].abs() + T::one());
        let accurate = finite && (est <= tol * hs.abs() || est <= floor);
        let regime_ok = finite && ode.in_regime(y2[1]);
        if near_boundary && accurate && regime_ok && y2[1] == y[1] {
            // the remaining approach to the boundary is below float resolution
            termination = Termination::RegimeExit { s };
            break;
        }
        if accurate && regime_ok && !blown {
            s = if hs.abs() == remaining { s_end } else { s + hs };
            y = y2;
            pts.push((s, y[0], y[1]));
            max_est = max_est.max(est / hs.abs());
            if !near_boundary && est * T::lit(32.0) < tol * hs.abs() {
                h = (h * T::lit(2.0)).min(max_step);
            }
            continue;
        }
        if blown {
            termination = Termination::BlowUp { s };
            break;
        }
        near_boundary |= accurate && !regime_ok;
        h *= half;
        if h < min_step {
            if pts.len() == 1 {
                return Err(OdeError::StepUnderflow { s: s.to_f64_lossy() });
            }
            termination = if accurate && !regime_ok {
                Termination::RegimeExit { s }
            } else {
                Termination::BlowUp { s }
            };
            break;
        }
    }
    Ok(finish(ode, pts, termination, max_est))
}

/// Classical RK4 with `steps` equal steps and no error control.
pub fn integrate_fixed<T: Real>(
    ode: ReaperOde<T>,
    s0: T,
    u0: T,
    up0: T,
    s_end: T,
    steps: usize,
) -> Result<ProfileSolution<T>, OdeError> {
    if steps == 0 || !(s0.is_finite() && s_end.is_finite()) || s0 == s_end {
        return Err(OdeError::InvalidRange {
            s0: s0.to_f64_lossy(),
            s_end: s_end.to_f64_lossy(),
        });
    }
    check_start(&ode, up0)?;
    let h = (s_end - s0) / T::lit(steps as f64);
    let mut pts = vec![(s0, u0, up0)];
    let mut y = [u0, up0];
    for i in 0..steps {
        let s = s0 + h * T::lit(i as f64);
        y = ode.rk4(s, y, h);
        let next = if i + 1 == steps {
            s_end
        } else {
            s0 + h * T::lit((i + 1) as f64)
        };
        pts.push((next, y[0], y[1]));
    }
    Ok(finish(ode, pts, Termination::Completed, T::zero()))
}

/// One integration job of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job<T> {
    pub ode: ReaperOde<T>,
    pub s0: T,
    pub u0: T,
    pub up0: T,
    pub s_end: T,
    pub tol: T,
}

/// Runs independent jobs in parallel; results keep the input order.
pub fn integrate_all<T: Real>(jobs: &[Job<T>]) -> Vec<Result<ProfileSolution<T>, OdeError>> {
    jobs.par_iter()
        .map(|j| integrate(j.ode, j.s0, j.u0, j.up0, j.s_end, j.tol))
        .collect()
}

/// How the lifted cylinder obtains `u''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondDerivative {
    /// `u'' = rhs(s, u, u')` at the interpolated point.
    OdeRhs,
    /// Derivative of the `u'` interpolant (exposes broken node data).
    Interpolated,
}

/// Cylinder over the profile on its full node range, `t` in `[-1, 1]`.
pub fn lift_cylinder<T: Real>(sol: &ProfileSolution<T>) -> Result<ParametricSurface<T>, OdeError> {
    let (lo, hi) = sol.range();
    lift_cylinder_on(sol, (lo, hi), SecondDerivative::OdeRhs)
}

/// Cylinder over the profile restricted to `s_range`.
pub fn lift_cylinder_on<T: Real>(
    sol: &ProfileSolution<T>,
    s_range: (T, T),
    mode: SecondDerivative,
) -> Result<ParametricSurface<T>, OdeError> {
    let (lo, hi) = sol.range();
    if sol.nodes.len() < 2 || s_range.0 < lo || s_range.1 > hi || s_range.0 >= s_range.1 {
        return Err(OdeError::OutOfRange {
            s0: s_range.0.to_f64_lossy(),
            s1: s_range.1.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let sol = sol.clone();
    let case = sol.ode.kind.ruling_case();
    let domain = Domain::new(s_range, (-T::one(), T::one()));
    Ok(ParametricSurface::new(domain, Provenance::Analytic, move |s, t| {
        if s < lo || s > hi {
            return Err(SurfaceError::OutOfDomain {
                s: s.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        let (u, up) = sol.interpolate(s);
        let upp = match mode {
            SecondDerivative::OdeRhs => sol.ode.rhs(s, u, up),
            SecondDerivative::Interpolated => sol.interpolated_second(s),
        };
        let (z, o) = (T::zero(), T::one());
        let zero = MVec3::zero();
        Ok(match case {
            RulingCase::SpacelikeW => SurfaceJet2 {
                p: MVec3::new(t, s, u),
                ps: MVec3::new(z, o, up),
                pt: MVec3::new(o, z, z),
                pss: MVec3::new(z, z, upp),
                pst: zero,
                ptt: zero,
            },
            RulingCase::TimelikeW => SurfaceJet2 {
                p: MVec3::new(s, u, t),
                ps: MVec3::new(o, up, z),
                pt: MVec3::new(z, z, o),
                pss: MVec3::new(z, upp, z),
                pst: zero,
                ptt: zero,
            },
        })
    }))
}

/// `max |u_numeric - u_closed|` over the nodes.
pub fn compare_closed_form(sol: &ProfileSolution<f64>, family: &SolitonFamily) -> Result<f64, OdeError> {
    let incompatible = |why: String| OdeError::IncompatiblePair(why);
    let cyl = family
        .cylinder
        .as_ref()
        .ok_or_else(|| incompatible(format!("{} is not a cylinder over a profile", family.id)))?;
    let kind = sol.ode.kind;
    if cyl.case != kind.ruling_case() {
        return Err(incompatible(format!(
            "{} has {:?} rulings, {} lifts to {:?}",
            family.id,
            cyl.case,
            kind,
            kind.ruling_case()
        )));
    }
    if family.eps != kind.surface_eps() {
        return Err(incompatible(format!(
            "{} has <N,N> = {}, {} describes <N,N> = {}",
            family.id,
            family.eps,
            kind,
            kind.surface_eps()
        )));
    }
    let (fv, ov) = (family.velocity, sol.ode.velocity());
    let matters = match kind {
        OdeKind::Eq32 => [(fv.x, ov.x), (fv.y, ov.y)],
        _ => [(fv.y, ov.y), (fv.z, ov.z)],
    };
    if matters.iter().any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(incompatible(format!(
            "velocity {fv:?} does not solve {kind} with velocity {ov:?}"
        )));
    }
    let mut dev = 0.0_f64;
    for (i, &s) in sol.nodes.iter().enumerate() {
        let (u, _, _) = cyl
            .profile_jet(s)
            .map_err(|e| incompatible(format!("closed form fails at s = {s}: {e}")))?;
        dev = dev.max((sol.u[i] - u).abs());
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_gr1, make_gr3, Gr1Branch, Window};
    use crate::surface::{max_residual, Grid};

    type V = MVec3<f64>;

    fn eq32() -> ReaperOde<f64> {
        ReaperOde::new(OdeKind::Eq32, V::new(0.0, 1.0, 0.0))
    }

    #[test]
    fn eq32_matches_log_cos() {
        let sol = integrate(eq32(), 0.0, 0.0, 0.0, 1.0, DEFAULT_TOL).unwrap();
        let u1 = *sol.u.last().unwrap();
        assert!((u1 - 0.6156264703860141).abs() <= 1e-8, "{u1}");
        assert_eq!(sol.termination, Termination::Completed);
        assert_eq!(sol.ode_residual(), 0.0);
    }

    #[test]
    fn eq31_spacelike_matches_log_cosh() {
        let ode = ReaperOde::new(OdeKind::Eq31Spacelike, V::new(0.0, 0.0, 1.0));
        let sol = integrate(ode, 0.0, 0.0, 0.0, 2.0, DEFAULT_TOL).unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        assert_eq!(sol.range(), (0.0, 2.0));
        for (s, u) in sol.nodes.iter().zip(&sol.u) {
            assert!((u + s.cosh().ln()).abs() <= 1e-8);
        }
    }

    #[test]
    fn backward_integration_is_sorted() {
        let sol = integrate(eq32(), 0.0, 0.0, 0.0, -1.0, DEFAULT_TOL).unwrap();
        assert!(sol.nodes.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sol.range(), (-1.0, 0.0));
        assert!((sol.u[0] - 0.6156264703860141).abs() <= 1e-8);
    }

    #[test]
    fn regime_violation_at_start() {
        let ode = ReaperOde::new(OdeKind::Eq31Spacelike, V::new(0.0, 0.0, 1.0));
        assert!(matches!(
            integrate(ode, 0.0, 0.0, 2.0, 1.0, DEFAULT_TOL),
            Err(OdeError::RegimeViolationAtStart { .. })
        ));
        let ode = ReaperOde::new(OdeKind::Eq31Timelike, V::new(0.0, 0.0, 1.0));
        assert!(integrate(ode, 0.0, 0.0, 0.5, 1.0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn regime_exit_is_reported_inside_the_regime() {
        // u'' = (1 - u'^2) u' > 0 drives u' towards 1
        let ode = ReaperOde::new(OdeKind::Eq31Spacelike, V::new(0.0, 1.0, 0.0));
        let sol = integrate(ode, 0.0, 0.0, 0.999, 50.0, DEFAULT_TOL).unwrap();
        let exit = sol.regime_exit().expect("regime exit");
        assert!(exit < 50.0);
        assert!(sol.up.iter().all(|&up| 1.0 - up * up > 0.0));
    }

    #[test]
    fn grim_reaper_blows_up_before_half_pi() {
        let sol = integrate(eq32(), 0.0, 0.0, 0.0, 2.0, DEFAULT_TOL).unwrap();
        match sol.termination {
            Termination::BlowUp { s } => assert!(s < std::f64::consts::FRAC_PI_2 && s > 1.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gr0_starts_with_unit_curvature() {
        let ode = ReaperOde::new(OdeKind::Gr0Spacelike, V::zero());
        assert_eq!(ode.rhs(0.0, 0.0, 0.0), 1.0);
        assert_eq!(ode.velocity(), V::new(0.0, -1.0, -1.0));
        let sol = integrate(ode, 0.0, 0.0, 0.0, 2.0, DEFAULT_TOL).unwrap();
        assert_eq!(sol.termination, Termination::Completed);
        for i in 0..sol.nodes.len() {
            assert!(sol.upp[i] > 0.0 && sol.up[i] < 1.0);
        }
    }

    #[test]
    fn fixed_step_order_four() {
        let exact = -(1.2_f64.cos().ln());
        let err = |n| {
            (integrate_fixed(eq32(), 0.0, 0.0, 0.0, 1.2, n)
                .unwrap()
                .u
                .last()
                .unwrap()
                - exact)
                .abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!((order - 4.0).abs() < 0.2, "{order}");
    }

    #[test]
    fn lift_is_a_soliton_and_broken_lift_is_not() {
        let sol = integrate(eq32(), 0.0, 0.0, 0.0, 1.0, DEFAULT_TOL).unwrap();
        let surf = lift_cylinder(&sol).unwrap();
        let rep = max_residual(&surf, V::e2(), Grid::new(20, 5)).unwrap();
        assert!(rep.max_abs <= 1e-6);
        let mut broken = sol.clone();
        broken.upp.iter_mut().for_each(|x| *x = 0.0);
        let bad = lift_cylinder_on(&broken, broken.range(), SecondDerivative::Interpolated).unwrap();
        assert!(max_residual(&bad, V::e2(), Grid::new(20, 5)).unwrap().max_abs > 1e-3);
        assert!(matches!(
            lift_cylinder_on(&sol, (0.0, 2.0), SecondDerivative::OdeRhs),
            Err(OdeError::OutOfRange { .. })
        ));
    }

    #[test]
    fn closed_form_comparison() {
        let sol = integrate(eq32(), 0.0, 0.0, 0.0, 1.2, DEFAULT_TOL).unwrap();
        let gr3 = make_gr3(0.0, 0.0, 0.0, Window::default()).unwrap();
        assert!(compare_closed_form(&sol, &gr3).unwrap() <= 1e-8);
        let cosh = make_gr1(Gr1Branch::Cosh, 0.0, 0.0, 0.0, Window::default()).unwrap();
        assert!(matches!(
            compare_closed_form(&sol, &cosh),
            Err(OdeError::IncompatiblePair(_))
        ));
    }

    #[test]
    fn sinh_branch_from_initial_data_at_one() {
        let ode = ReaperOde::new(OdeKind::Eq31Timelike, V::new(0.0, 0.0, 1.0));
        let s0 = 1.0_f64;
        let sol = integrate(ode, s0, s0.sinh().ln(), 1.0 / s0.tanh(), 2.0, DEFAULT_TOL).unwrap();
        let fam = make_gr1(Gr1Branch::Sinh, 0.0, 0.0, 0.0, Window::s(0.5, 2.0)).unwrap();
        assert!(compare_closed_form(&sol, &fam).unwrap() <= 1e-8);
    }

    #[test]
    fn parallel_jobs_keep_order() {
        let jobs: Vec<Job<f64>> = [0.0, 0.2, -0.2]
            .iter()
            .map(|&up0| Job {
                ode: ReaperOde::new(OdeKind::Gr0Spacelike, V::zero()),
                s0: 0.0,
                u0: 0.0,
                up0,
                s_end: 1.0,
                tol: 1e-8,
            })
            .collect();
        let out = integrate_all(&jobs);
        for (job, res) in jobs.iter().zip(out) {
            assert_eq!(res.unwrap().up[0], job.up0);
        }
    }

    #[test]
    fn csv_columns() {
        let sol = integrate_fixed(eq32(), 0.0, 0.0, 0.0, 0.5, 2).unwrap();
        let mut buf = Vec::new();
        sol.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,u,u_prime,u_second"));
        assert_eq!(lines.next(), Some("0,0,0,1"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn single_precision_integration() {
        let ode = ReaperOde::<f32>::new(OdeKind::Eq32, MVec3::new(0.0, 1.0, 0.0));
        let sol = integrate(ode, 0.0f32, 0.0, 0.0, 1.0, 1e-5).unwrap();
        assert!((sol.u.last().unwrap() - 0.615_626_5).abs() < 1e-4);
    }
}
