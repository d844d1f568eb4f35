//! Truncated univariate Taylor arithmetic.
//!
//! A [`Series`] of length `n + 1` holds the normalized Taylor coefficients
//! `c_k = f^(k)(s0) / k!` of a function at a point, up to order `n`. Arithmetic
//! and the elementary functions propagate the coefficients with the usual
//! recurrences, so evaluating a closure on `Series::variable(s0, 2)` yields
//! the value and the first two derivatives exactly (up to rounding).
//!
//! Mixed partials of bivariate closures are recovered by polarization along
//! the directions `(1,0)`, `(0,1)` and `(1,1)`; see [`crate::surface`].

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Real> Series<T> {
    /// Constant `value` truncated at `order`.
    pub fn constant(value: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = value;
        Series { coeffs }
    }

    /// The independent variable `s0 + h`.
    pub fn variable(s0: T, order: usize) -> Self {
        Self::directional(s0, T::one(), order)
    }

    /// The affine function `s0 + slope * h`.
    pub fn directional(s0: T, slope: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = s0;
        if order >= 1 {
            coeffs[1] = slope;
        }
        Series { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the value coefficient");
        Series { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point (zero beyond the order).
    pub fn derivative(&self, k: usize) -> T {
        match self.coeffs.get(k) {
            Some(&c) => c * factorial::<T>(k),
            None => T::zero(),
        }
    }

    /// Series of `f'`, one order shorter.
    pub fn differentiate(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Series::constant(T::zero(), 0);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::lit(k as f64))
            .collect();
        Series { coeffs }
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        Series { coeffs }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn like(&self, value: T) -> Self {
        Self::constant(value, self.order())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| f(self.coeffs[k], other.coeffs[k])).collect();
        Series { coeffs }
    }

    pub fn scale(&self, k: T) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).fold(T::zero(), |acc, j| acc + self.coeffs[j] * other.coeffs[k - j]))
            .collect();
        Series { coeffs }
    }

    pub fn div_series(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let b0 = other.coeffs[0];
        let mut q: Vec<T> = Vec::with_capacity(n);
        for k in 0..n {
            let acc = (1..=k).fold(self.coeffs[k], |acc, j| acc - other.coeffs[j] * q[k - j]);
            q.push(acc / b0);
        }
        Series { coeffs: q }
    }

    pub fn recip(&self) -> Self {
        self.like(T::one()).div_series(self)
    }

    pub fn square(&self) -> Self {
        self.mul_series(self)
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut e: Vec<T> = Vec::with_capacity(a.len());
        e.push(a[0].exp());
        for k in 1..a.len() {
            let s = (1..=k).fold(T::zero(), |acc, j| acc + T::lit(j as f64) * a[j] * e[k - j]);
            e.push(s / T::lit(k as f64));
        }
        Series { coeffs: e }
    }

    pub fn ln(&self) -> Self {
        let a = &self.coeffs;
        let mut l: Vec<T> = Vec::with_capacity(a.len());
        l.push(a[0].ln());
        for k in 1..a.len() {
            let s = (1..k).fold(T::zero(), |acc, j| acc + T::lit(j as f64) * l[j] * a[k - j]);
            l.push((a[k] - s / T::lit(k as f64)) / a[0]);
        }
        Series { coeffs: l }
    }

    /// `(sin, cos)` computed together.
    pub fn sin_cos(&self) -> (Self, Self) {
        self.trig_pair(false)
    }

    /// `(sinh, cosh)` computed together.
    pub fn sinh_cosh(&self) -> (Self, Self) {
        self.trig_pair(true)
    }

    fn trig_pair(&self, hyperbolic: bool) -> (Self, Self) {
        let a = &self.coeffs;
        let n = a.len();
        let (mut s, mut c) = (Vec::with_capacity(n), Vec::with_capacity(n));
        if hyperbolic {
            s.push(a[0].sinh());
            c.push(a[0].cosh());
        } else {
            s.push(a[0].sin());
            c.push(a[0].cos());
        }
        for k in 1..n {
            let kk = T::lit(k as f64);
            let mut ss = T::zero();
            let mut cc = T::zero();
            for j in 1..=k {
                let ja = T::lit(j as f64) * a[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s.push(ss / kk);
            c.push(if hyperbolic { cc / kk } else { -cc / kk });
        }
        (Series { coeffs: s }, Series { coeffs: c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Self {
        let (s, c) = self.sin_cos();
        s.div_series(&c)
    }

    pub fn sinh(&self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Self {
        self.sinh_cosh().1
    }

    pub fn tanh(&self) -> Self {
        let (s, c) = self.sinh_cosh();
        s.div_series(&c)
    }

    pub fn sqrt(&self) -> Self {
        let a = &self.coeffs;
        let mut r: Vec<T> = Vec::with_capacity(a.len());
        r.push(a[0].sqrt());
        let two_r0 = r[0] + r[0];
        for k in 1..a.len() {
            let s = (1..k).fold(T::zero(), |acc, j| acc + r[j] * r[k - j]);
            r.push((a[k] - s) / two_r0);
        }
        Series { coeffs: r }
    }

    /// `self^alpha` for a real exponent; needs a positive value coefficient
    /// unless `alpha` is an integer (then prefer [`Series::powi`]).
    pub fn powf(&self, alpha: T) -> Self {
        let a = &self.coeffs;
        let mut p: Vec<T> = Vec::with_capacity(a.len());
        p.push(a[0].powf(alpha));
        for k in 1..a.len() {
            let kk = T::lit(k as f64);
            let s = (1..=k).fold(T::zero(), |acc, j| {
                let jj = T::lit(j as f64);
                acc + ((alpha + T::one()) * jj - kk) * a[j] * p[k - j]
            });
            p.push(s / (kk * a[0]));
        }
        Series { coeffs: p }
    }

    pub fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.like(T::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_series(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Builds `f(self)` from the value `f(a0)` and the series of `f'(self)`
    /// (one order shorter), integrating term by term.
    fn integrate_derivative(value: T, derivative: &Self, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(value);
        for k in 1..=order {
            coeffs.push(derivative.coeffs[k - 1] / T::lit(k as f64));
        }
        Series { coeffs }
    }

    pub fn atan(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return self.like(self.value().atan());
        }
        let inner = self.truncate(n - 1);
        let d = self.differentiate().div_series(&inner.square().add_scalar(T::one()));
        Self::integrate_derivative(self.value().atan(), &d, n)
    }

    pub fn atanh(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return self.like(self.value().atanh());
        }
        let inner = self.truncate(n - 1);
        let one_minus_sq = -inner.square().add_scalar(-T::one());
        let d = self.differentiate().div_series(&one_minus_sq);
        Self::integrate_derivative(self.value().atanh(), &d, n)
    }
}

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, j| acc * T::lit(j as f64))
}

impl<T: Real> Add for Series<T> {
    type Output = Series<T>;
    fn add(self, o: Self) -> Self {
        self.zip_with(&o, |a, b| a + b)
    }
}

impl<T: Real> Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, o: Self) -> Series<T> {
        self.zip_with(o, |a, b| a + b)
    }
}

impl<T: Real> Sub for Series<T> {
    type Output = Series<T>;
    fn sub(self, o: Self) -> Self {
        self.zip_with(&o, |a, b| a - b)
    }
}

impl<T: Real> Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, o: Self) -> Series<T> {
        self.zip_with(o, |a, b| a - b)
    }
}

impl<T: Real> Mul for Series<T> {
    type Output = Series<T>;
    fn mul(self, o: Self) -> Self {
        self.mul_series(&o)
    }
}

impl<T: Real> Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, o: Self) -> Series<T> {
        self.mul_series(o)
    }
}

impl<T: Real> Div for Series<T> {
    type Output = Series<T>;
    fn div(self, o: Self) -> Self {
        self.div_series(&o)
    }
}

impl<T: Real> Div for &Series<T> {
    type Output = Series<T>;
    fn div(self, o: Self) -> Series<T> {
        self.div_series(o)
    }
}

impl<T: Real> Neg for Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Add<T> for Series<T> {
    type Output = Series<T>;
    fn add(self, k: T) -> Self {
        self.add_scalar(k)
    }
}

impl<T: Real> Sub<T> for Series<T> {
    type Output = Series<T>;
    fn sub(self, k: T) -> Self {
        self.add_scalar(-k)
    }
}

impl<T: Real> Mul<T> for Series<T> {
    type Output = Series<T>;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Div<T> for Series<T> {
    type Output = Series<T>;
    fn div(self, k: T) -> Self {
        self.scale(T::one() / k)
    }
}

impl<T: Real> Add<T> for &Series<T> {
    type Output = Series<T>;
    fn add(self, k: T) -> Series<T> {
        self.add_scalar(k)
    }
}

impl<T: Real> Sub<T> for &Series<T> {
    type Output = Series<T>;
    fn sub(self, k: T) -> Series<T> {
        self.add_scalar(-k)
    }
}

impl<T: Real> Mul<T> for &Series<T> {
    type Output = Series<T>;
    fn mul(self, k: T) -> Series<T> {
        self.scale(k)
    }
}

impl<T: Real> Div<T> for &Series<T> {
    type Output = Series<T>;
    fn div(self, k: T) -> Series<T> {
        self.scale(T::one() / k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    fn check(series: &Series<f64>, expected: [f64; 4]) {
        for (k, e) in expected.iter().enumerate() {
            let got = series.derivative(k);
            assert!(close(got, *e, 1e-12), "derivative {k}: got {got}, expected {e}");
        }
    }

    #[test]
    fn elementary_derivatives_match_closed_forms() {
        let x = 0.37_f64;
        let s = Series::variable(x, 3);
        check(&s.exp(), [x.exp(); 4]);
        check(&s.ln(), [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)]);
        check(&s.sin(), [x.sin(), x.cos(), -x.sin(), -x.cos()]);
        check(&s.cos(), [x.cos(), -x.sin(), -x.cos(), x.sin()]);
        check(&s.sinh(), [x.sinh(), x.cosh(), x.sinh(), x.cosh()]);
        let t = x.tan();
        check(
            &s.tan(),
            [
                t,
                1.0 + t * t,
                2.0 * t * (1.0 + t * t),
                2.0 * (1.0 + t * t) * (1.0 + 3.0 * t * t),
            ],
        );
        let h = x.tanh();
        check(
            &s.tanh(),
            [
                h,
                1.0 - h * h,
                -2.0 * h * (1.0 - h * h),
                -2.0 * (1.0 - h * h) * (1.0 - 3.0 * h * h),
            ],
        );
        let q = 1.0 + x * x;
        check(
            &s.atan(),
            [x.atan(), 1.0 / q, -2.0 * x / (q * q), (6.0 * x * x - 2.0) / (q * q * q)],
        );
        let r = 1.0 - x * x;
        check(
            &s.atanh(),
            [x.atanh(), 1.0 / r, 2.0 * x / (r * r), (6.0 * x * x + 2.0) / (r * r * r)],
        );
        check(
            &s.sqrt(),
            [x.sqrt(), 0.5 / x.sqrt(), -0.25 * x.powf(-1.5), 0.375 * x.powf(-2.5)],
        );
        check(
            &s.powf(2.5),
            [x.powf(2.5), 2.5 * x.powf(1.5), 3.75 * x.sqrt(), 1.875 / x.sqrt()],
        );
        check(
            &s.powi(-2),
            [x.powi(-2), -2.0 * x.powi(-3), 6.0 * x.powi(-4), -24.0 * x.powi(-5)],
        );
        check(&s.recip(), [1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4)]);
    }

    #[test]
    fn grim_reaper_profile_jet() {
        // -log(cos s) at 0: value 0, slope 0, curvature sec^2(0) = 1
        let s = Series::variable(0.0_f64, 2);
        let u = -s.cos().ln();
        assert_eq!(u.value(), 0.0);
        assert_eq!(u.derivative(1), 0.0);
        assert!((u.derivative(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composition_uses_chain_rule() {
        // d/ds exp(sin(s^2)) = 2s cos(s^2) exp(sin(s^2))
        let x = 0.8_f64;
        let s = Series::variable(x, 2);
        let f = s.square().sin().exp();
        let expected = 2.0 * x * (x * x).cos() * (x * x).sin().exp();
        assert!(close(f.derivative(1), expected, 1e-14));
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        let s = Series::variable(1.5_f64, 4);
        let f = s.powi(4);
        let d = f.differentiate();
        assert_eq!(d.order(), 3);
        assert!(close(d.derivative(0), 4.0 * 1.5_f64.powi(3), 1e-14));
        assert!(close(d.derivative(3), 24.0, 1e-14));
    }

    #[test]
    fn single_precision_series() {
        let s = Series::variable(0.5_f32, 2);
        let f = s.exp();
        assert!((f.derivative(2) - 0.5_f32.exp()).abs() < 1e-6);
    }
}
