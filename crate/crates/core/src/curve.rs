//! Space curves evaluated through Taylor arithmetic.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::minkowski::MVec3;
use crate::series::Series;
use crate::Real;

/// Failure to evaluate a curve or surface expression at a parameter value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{func} is undefined for argument {arg} (at s = {s})")]
    Domain { func: String, arg: f64, s: f64 },
    #[error("division by zero at s = {s}")]
    DivisionByZero { s: f64 },
    #[error("non-finite value at s = {s}")]
    NonFinite { s: f64 },
}

/// Value and first two derivatives of a curve at one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet<T> {
    pub p: MVec3<T>,
    pub d1: MVec3<T>,
    pub d2: MVec3<T>,
}

/// A parametrized curve `s -> R^3` that can report Taylor coefficients of
/// any order at a point.
pub trait Curve<T: Real>: Send + Sync {
    /// Component series in the variable `s + h`, truncated at `order`.
    fn taylor(&self, s: T, order: usize) -> Result<[Series<T>; 3], EvalError>;

    fn jet(&self, s: T) -> Result<CurveJet<T>, EvalError> {
        let c = self.taylor(s, 2)?;
        Ok(CurveJet {
            p: derivative_vec(&c, 0),
            d1: derivative_vec(&c, 1),
            d2: derivative_vec(&c, 2),
        })
    }

    fn point(&self, s: T) -> Result<MVec3<T>, EvalError> {
        Ok(derivative_vec(&self.taylor(s, 0)?, 0))
    }

    /// Derivatives `0..=order` as vectors.
    fn derivatives(&self, s: T, order: usize) -> Result<Vec<MVec3<T>>, EvalError> {
        let c = self.taylor(s, order)?;
        Ok((0..=order).map(|k| derivative_vec(&c, k)).collect())
    }

    fn into_shared(self) -> SharedCurve<T>
    where
        Self: Sized + 'static,
    {
        Arc::new(self)
    }
}

pub type SharedCurve<T> = Arc<dyn Curve<T>>;

/// `k`-th derivative of a vector of component series.
pub fn derivative_vec<T: Real>(c: &[Series<T>; 3], k: usize) -> MVec3<T> {
    MVec3::new(c[0].derivative(k), c[1].derivative(k), c[2].derivative(k))
}

type CurveFnBox<T> = dyn Fn(&Series<T>) -> Result<[Series<T>; 3], EvalError> + Send + Sync;

/// A curve given by a closure over Taylor series.
pub struct FnCurve<T> {
    f: Box<CurveFnBox<T>>,
}

impl<T: Real> FnCurve<T> {
    pub fn new(f: impl Fn(&Series<T>) -> Result<[Series<T>; 3], EvalError> + Send + Sync + 'static) -> Self {
        FnCurve { f: Box::new(f) }
    }

    /// Wraps an infallible closure.
    pub fn infallible(f: impl Fn(&Series<T>) -> [Series<T>; 3] + Send + Sync + 'static) -> Self {
        Self::new(move |s| Ok(f(s)))
    }

    pub fn shared(self) -> SharedCurve<T> {
        Arc::new(self)
    }
}

impl<T: Real> fmt::Debug for FnCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnCurve")
    }
}

impl<T: Real> Curve<T> for FnCurve<T> {
    fn taylor(&self, s: T, order: usize) -> Result<[Series<T>; 3], EvalError> {
        let out = (self.f)(&Series::variable(s, order))?;
        if out.iter().all(Series::is_finite) {
            Ok(out)
        } else {
            Err(EvalError::NonFinite { s: s.to_f64_lossy() })
        }
    }
}

/// The constant curve `s -> c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCurve<T>(pub MVec3<T>);

impl<T: Real> Curve<T> for ConstantCurve<T> {
    fn taylor(&self, _s: T, order: usize) -> Result<[Series<T>; 3], EvalError> {
        Ok([
            Series::constant(self.0.x, order),
            Series::constant(self.0.y, order),
            Series::constant(self.0.z, order),
        ])
    }
}

/// The affine curve `s -> base + s * slope`.
#[derive(Debug, Clone, Copy)]
pub struct LineCurve<T> {
    pub base: MVec3<T>,
    pub slope: MVec3<T>,
}

impl<T: Real> Curve<T> for LineCurve<T> {
    fn taylor(&self, s: T, order: usize) -> Result<[Series<T>; 3], EvalError> {
        let comp = |b: T, m: T| Series::directional(b + m * s, m, order);
        Ok([
            comp(self.base.x, self.slope.x),
            comp(self.base.y, self.slope.y),
            comp(self.base.z, self.slope.z),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_director_jet() {
        // w(s) = (1, s, s) = s (0,1,1) + (1,0,0)
        let w = LineCurve {
            base: MVec3::new(1.0, 0.0, 0.0),
            slope: MVec3::new(0.0, 1.0, 1.0),
        };
        let j = w.jet(2.0).unwrap();
        assert_eq!(j.p, MVec3::new(1.0, 2.0, 2.0));
        assert_eq!(j.d1, MVec3::new(0.0, 1.0, 1.0));
        assert_eq!(j.d2, MVec3::zero());
    }

    #[test]
    fn closure_curve_reports_non_finite() {
        let c = FnCurve::infallible(|s: &Series<f64>| [s.ln(), s.clone(), s.clone()]);
        assert!(c.jet(1.0).is_ok());
        assert!(matches!(c.jet(-1.0), Err(EvalError::NonFinite { .. })));
    }

    #[test]
    fn higher_derivatives() {
        let c = FnCurve::infallible(|s: &Series<f64>| [s.sin(), s.cos(), s.clone()]);
        let d = c.derivatives(0.0, 3).unwrap();
        assert_eq!(d[3], MVec3::new(-1.0, 0.0, 0.0));
    }
}
