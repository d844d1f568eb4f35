//! Linear algebra of Minkowski 3-space with signature `(+, +, -)`.
//!
//! The Lorentzian cross product is defined by `<a x b, c> = det(a, b, c)` for
//! every `c`. Note the sign this forces on the standard basis:
//!
//! ```text
//! e1 x e2 = -e3,   e2 x e3 = e1,   e3 x e1 = e2
//! ```
//!
//! which differs from the Euclidean `e1 x e2 = e3`.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::Real;

/// Relative band used to call a vector lightlike.
pub const DEFAULT_LIGHTLIKE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinkowskiError {
    #[error("cannot normalize a {character:?} vector ({x}, {y}, {z})")]
    LightlikeNormalization {
        character: CausalCharacter,
        x: f64,
        y: f64,
        z: f64,
    },
}

/// A vector of `E^3_1` in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MVec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Causal character of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
    ZeroVector,
}

impl<T> MVec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        MVec3 { x, y, z }
    }
}

impl<T: Real> MVec3<T> {
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn e1() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn e2() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn e3() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Minkowski inner product `a.x b.x + a.y b.y - a.z b.z`.
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y - self.z * other.z
    }

    /// Lorentzian cross product.
    pub fn cross(self, b: Self) -> Self {
        let a = self;
        Self::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, -(a.x * b.y - a.y * b.x))
    }

    /// Euclidean inner product, used only for scales and tolerances.
    pub fn euclid_dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn euclid_norm_sq(self) -> T {
        self.euclid_dot(self)
    }

    pub fn euclid_norm(self) -> T {
        self.euclid_norm_sq().sqrt()
    }

    /// Euclidean cross product, for parallelism tests.
    pub fn euclid_cross(self, b: Self) -> Self {
        let a = self;
        Self::new(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Metric dual: the vector `u` with `<u, c> = self . c` (Euclidean).
    pub fn lower(self) -> Self {
        Self::new(self.x, self.y, -self.z)
    }

    pub fn causal_character(self, tol: T) -> CausalCharacter {
        causal_character(self, tol)
    }

    pub fn normalize(self) -> Result<Self, MinkowskiError> {
        normalize(self, T::lit(DEFAULT_LIGHTLIKE_TOL))
    }

    pub fn map<U>(self, f: impl Fn(T) -> U) -> MVec3<U> {
        MVec3::new(f(self.x), f(self.y), f(self.z))
    }
}

/// `mink_dot`.
pub fn dot<T: Real>(a: MVec3<T>, b: MVec3<T>) -> T {
    a.dot(b)
}

/// `mink_cross`.
pub fn cross<T: Real>(a: MVec3<T>, b: MVec3<T>) -> MVec3<T> {
    a.cross(b)
}

/// Determinant of the matrix with rows `a`, `b`, `c`.
pub fn triple<T: Real>(a: MVec3<T>, b: MVec3<T>, c: MVec3<T>) -> T {
    a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)
}

/// Sign of `<a,a>` with a relative lightlike band `|<a,a>| <= tol |a|_E^2`.
/// A vector whose components are all within `tol` of zero is `ZeroVector`.
pub fn causal_character<T: Real>(a: MVec3<T>, tol: T) -> CausalCharacter {
    if a.max_abs() <= tol {
        return CausalCharacter::ZeroVector;
    }
    let q = a.dot(a);
    if q.abs() <= tol * a.euclid_norm_sq() {
        CausalCharacter::Lightlike
    } else if q > T::zero() {
        CausalCharacter::Spacelike
    } else {
        CausalCharacter::Timelike
    }
}

/// `a / sqrt|<a,a>|`, so that the result has `|<u,u>| = 1`.
pub fn normalize<T: Real>(a: MVec3<T>, tol: T) -> Result<MVec3<T>, MinkowskiError> {
    match causal_character(a, tol) {
        c @ (CausalCharacter::Lightlike | CausalCharacter::ZeroVector) => Err(MinkowskiError::LightlikeNormalization {
            character: c,
            x: a.x.to_f64_lossy(),
            y: a.y.to_f64_lossy(),
            z: a.z.to_f64_lossy(),
        }),
        _ => Ok(a / a.dot(a).abs().sqrt()),
    }
}

impl<T: Real> Add for MVec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for MVec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> AddAssign for MVec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for MVec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for MVec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for MVec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<T: Real> Div<T> for MVec3<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl Mul<MVec3<f64>> for f64 {
    type Output = MVec3<f64>;
    fn mul(self, v: MVec3<f64>) -> MVec3<f64> {
        v * self
    }
}

/// A linear map of `R^3` stored as a row-major matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap3<T> {
    pub rows: [[T; 3]; 3],
}

impl<T: Real> LinearMap3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            rows: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// Uniform dilation by `lambda`.
    pub fn scaling(lambda: T) -> Self {
        let z = T::zero();
        Self {
            rows: [[lambda, z, z], [z, lambda, z], [z, z, lambda]],
        }
    }

    /// Hyperbolic rotation fixing `e1`:
    /// rows `(1,0,0)`, `(0,cosh phi,sinh phi)`, `(0,sinh phi,cosh phi)`.
    pub fn boost_x(phi: T) -> Self {
        let (o, z) = (T::one(), T::zero());
        let (c, s) = (phi.cosh(), phi.sinh());
        Self {
            rows: [[o, z, z], [z, c, s], [z, s, c]],
        }
    }

    /// Euclidean rotation of the `xy`-plane fixing `e3`.
    pub fn rot_z(theta: T) -> Self {
        let (o, z) = (T::one(), T::zero());
        let (c, s) = (theta.cos(), theta.sin());
        Self {
            rows: [[c, -s, z], [s, c, z], [z, z, o]],
        }
    }

    pub fn apply(&self, v: MVec3<T>) -> MVec3<T> {
        let r = &self.rows;
        MVec3::new(
            r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
            r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
            r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut rows = [[T::zero(); 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).fold(T::zero(), |acc, k| acc + self.rows[i][k] * other.rows[k][j]);
            }
        }
        Self { rows }
    }

    pub fn determinant(&self) -> T {
        let r = &self.rows;
        triple(
            MVec3::from_array(r[0]),
            MVec3::from_array(r[1]),
            MVec3::from_array(r[2]),
        )
    }
}

/// `boost_x(phi)` as a map.
pub fn boost_x<T: Real>(phi: T) -> LinearMap3<T> {
    LinearMap3::boost_x(phi)
}

/// `rot_z(theta)` as a map.
pub fn rot_z<T: Real>(theta: T) -> LinearMap3<T> {
    LinearMap3::rot_z(theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    type V = MVec3<f64>;

    #[test]
    fn dot_examples() {
        assert_eq!(V::new(1.0, 2.0, 2.0).dot(V::new(1.0, 2.0, 2.0)), 1.0);
        assert_eq!(V::new(1.0, 0.0, 1.0).dot(V::new(1.0, 0.0, 1.0)), 0.0);
        assert_eq!(V::e3().dot(V::e3()), -1.0);
    }

    #[test]
    fn cross_examples() {
        assert_eq!(V::e1().cross(V::e2()), V::new(0.0, 0.0, -1.0));
        assert_eq!(
            V::new(1.0, 2.0, 2.0).cross(V::new(0.0, 1.0, 1.0)),
            V::new(0.0, -1.0, -1.0)
        );
        let a = V::new(0.3, -1.2, 4.0);
        assert_eq!(a.cross(a), V::zero());
    }

    #[test]
    fn cross_solves_defining_identity_on_basis() {
        let (a, b) = (V::e1(), V::e2());
        let u = a.cross(b);
        for c in [V::e1(), V::e2(), V::e3()] {
            assert_eq!(u.dot(c), triple(a, b, c));
        }
    }

    #[test]
    fn triple_examples() {
        assert_eq!(triple(V::e1(), V::e2(), V::e3()), 1.0);
        let (a, b) = (V::new(1.0, 2.0, 3.0), V::new(-1.0, 0.5, 2.0));
        assert_eq!(triple(a, a, b), 0.0);
        assert_eq!(triple(V::e1(), V::new(0.0, 1.0, 1.0), V::e1()), 0.0);
    }

    #[test]
    fn causal_examples() {
        let tol = DEFAULT_LIGHTLIKE_TOL;
        assert_eq!(V::e1().causal_character(tol), CausalCharacter::Spacelike);
        assert_eq!(V::e3().causal_character(tol), CausalCharacter::Timelike);
        assert_eq!(V::new(1.0, 0.0, 1.0).causal_character(tol), CausalCharacter::Lightlike);
        assert_eq!(V::zero().causal_character(tol), CausalCharacter::ZeroVector);
        for s in [-3.0, 0.0, 0.5, 2.0, 100.0] {
            assert_eq!(V::new(1.0, s, s).causal_character(tol), CausalCharacter::Spacelike);
        }
        // The band is relative, so dilations keep the class.
        assert_eq!(V::new(1e6, 0.0, 1e6).causal_character(tol), CausalCharacter::Lightlike);
        assert_eq!(
            V::new(1e-6, 0.0, 1e-6).causal_character(1e-12),
            CausalCharacter::Lightlike
        );
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(V::new(2.0, 0.0, 0.0).normalize().unwrap(), V::e1());
        let u = V::new(0.0, 0.0, 3.0).normalize().unwrap();
        assert_eq!(u, V::e3());
        assert_eq!(u.dot(u), -1.0);
        assert!(matches!(
            V::new(1.0, 0.0, 1.0).normalize(),
            Err(MinkowskiError::LightlikeNormalization {
                character: CausalCharacter::Lightlike,
                ..
            })
        ));
    }

    #[test]
    fn boost_aligns_velocity() {
        assert_eq!(LinearMap3::boost_x(0.0), LinearMap3::identity());
        let (v2, v3) = (0.4_f64, -1.3_f64);
        let phi = (-v2 / v3).atanh();
        let out = boost_x(phi).apply(V::new(0.0, v2, v3));
        assert!(out.y.abs() < 1e-15);
        assert!((out.z * out.z - (v3 * v3 - v2 * v2)).abs() < 1e-14);
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(LinearMap3::rot_z(0.0), LinearMap3::identity());
        let r = rot_z(std::f64::consts::FRAC_PI_2).apply(V::e1());
        assert!((r - V::e2()).max_abs() < 1e-15);
        // a unit horizontal vector is rotated onto e2
        let (v1, v2) = (0.6_f64, 0.8_f64);
        let theta = v1.atan2(v2);
        let r = rot_z(theta).apply(V::new(v1, v2, 0.0));
        assert!((r - V::e2()).max_abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let a = MVec3::<f32>::new(1.0, 2.0, 2.0);
        assert_eq!(a.dot(a), 1.0f32);
        assert_eq!(MVec3::<f32>::e1().cross(MVec3::e2()), MVec3::new(0.0, 0.0, -1.0));
        assert_eq!(a.causal_character(1e-5), CausalCharacter::Spacelike);
    }

    #[test]
    fn isometries_have_unit_determinant() {
        assert!((boost_x(0.7_f64).determinant() - 1.0).abs() < 1e-14);
        assert!((rot_z(2.1_f64).determinant() - 1.0).abs() < 1e-14);
    }
}
