//! Ruled translating solitons in Minkowski 3-space.
//!
//! The crate evaluates the translating-soliton equation `2H = <N, v>` on
//! parametric surfaces of `E^3_1 = (R^3, dx^2 + dy^2 - dz^2)`, builds every
//! closed-form ruled soliton family with exact jets, integrates the grim-reaper
//! ODEs, and classifies user-supplied ruled surfaces `X(s,t) = gamma(s) + t w(s)`.
//!
//! Geometry kernels ([`minkowski`], [`series`], [`curve`], [`surface`],
//! [`ode`]) are generic over the scalar type through [`Real`]; the catalog,
//! velocity fitting and classifier work in `f64`. The aliases at the crate
//! root ([`Vec3`], [`Jet`], ...) name the `f64` instantiations.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod classify;
pub mod curve;
pub mod export;
pub mod expr;
pub mod fit;
pub mod keyvalue;
pub mod minkowski;
pub mod ode;
pub mod series;
pub mod surface;

use std::fmt;

pub use minkowski::{CausalCharacter, LinearMap3, MVec3};
pub use series::Series;
pub use surface::{FundamentalData, ParametricSurface, SolitonResidual, SurfaceJet2};

/// Floating point scalar accepted by the geometry kernels: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A sign in `{-1, +1}`: the causal sign `eps = <N,N>` of a surface, or a
/// branch choice in the closed-form families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Sign {
        if x < T::zero() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    /// Parses `-1`/`1` (also `+1`, `-`, `+`).
    pub fn from_f64(x: f64) -> Option<Sign> {
        if x == 1.0 {
            Some(Sign::Positive)
        } else if x == -1.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Negative => -T::one(),
            Sign::Positive => T::one(),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Negative => write!(f, "-1"),
            Sign::Positive => write!(f, "+1"),
        }
    }
}

pub type Vec3 = MVec3<f64>;
pub type Jet = SurfaceJet2<f64>;
pub type Fundamentals = FundamentalData<f64>;
pub type Surface = ParametricSurface<f64>;
pub type Taylor = Series<f64>;
