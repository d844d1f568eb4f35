//! Random surfaces and determinant-based oracles shared by the test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use soliton_core::classify::RuledSurfaceSpec;
use soliton_core::curve::FnCurve;
use soliton_core::surface::Domain;
use soliton_core::{Jet, Surface, Taylor, Vec3};

/// `<a x b, c>` in the Lorentzian product equals the Euclidean determinant.
pub fn det(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)
}

pub fn mdot(a: Vec3, b: Vec3) -> f64 {
    a.x * b.x + a.y * b.y - a.z * b.z
}

/// `H1 - eps W (Xs, Xt, v)` from the jet, independent of the kernel.
pub fn oracle_r2(j: &Jet, v: Vec3, eps: f64) -> f64 {
    let (e, f, g) = (mdot(j.ps, j.ps), mdot(j.ps, j.pt), mdot(j.pt, j.pt));
    let h1 = e * det(j.ps, j.pt, j.ptt) - 2.0 * f * det(j.ps, j.pt, j.pst) + g * det(j.ps, j.pt, j.pss);
    h1 - eps * (e * g - f * f) * det(j.ps, j.pt, v)
}

/// `EG - F^2`.
pub fn oracle_w(j: &Jet) -> f64 {
    let (e, f, g) = (mdot(j.ps, j.ps), mdot(j.ps, j.pt), mdot(j.pt, j.pt));
    e * g - f * f
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

pub fn random_vec(rng: &mut ChaCha8Rng, r: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Five shapes of smooth non-ruled surfaces with random coefficients.
pub fn random_surface(kind: usize, rng: &mut ChaCha8Rng) -> Surface {
    let c: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dom = Domain::new((0.5, 1.5), (-1.0, 1.0));
    match kind % 5 {
        0 => Surface::from_series_fn(dom, move |s, t| {
            let z = s.square() * c[0]
                + t.square() * c[1]
                + (s * t) * c[2]
                + (s.clone() + t * 2.0).sin() * c[3]
                + (s * t * 0.3).exp() * c[4];
            Ok([s.clone(), t.clone(), z])
        }),
        1 => Surface::from_series_fn(dom, move |s, t| {
            let x = (s.square() * t.clone()) * c[0] + t.powi(3) * c[1] + s.cos() * (2.0 + c[2]) + (s * t).sin() * c[3];
            Ok([x, s.clone(), t.clone()])
        }),
        2 => Surface::from_series_fn(dom, move |s, t| {
            let (sin_t, cos_t) = (t.sin(), t.cos());
            Ok([
                s * &cos_t,
                s * &sin_t,
                s.square() * (0.5 + c[0]) + s.sin() * c[1] + t.square() * c[2],
            ])
        }),
        3 => Surface::from_series_fn(dom, move |s, t| {
            Ok([
                s + &(t.square() * c[0]),
                t + &(s.square() * c[1]),
                (s * t) * (1.0 + c[2]) + s.cos() * c[3] + t.powi(3) * c[4],
            ])
        }),
        _ => Surface::from_series_fn(dom, move |s, t| {
            Ok([
                (s * 0.5).exp() * t.cos(),
                s.sin() + t.square() * c[0],
                t.clone() + s.powi(3) * c[1] + (s * t).square() * c[2],
            ])
        }),
    }
}

/// Random ruled spec with a general director.
pub fn random_ruled(rng: &mut ChaCha8Rng) -> RuledSurfaceSpec {
    let g: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let d: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    RuledSurfaceSpec::new(
        random_base(g),
        FnCurve::infallible(move |s: &Taylor| {
            [
                s.cos() * d[0] + 1.0,
                s.square() * d[1] + s * d[2],
                s.sin() * d[3] + (s * d[4]).exp() * d[5],
            ]
        })
        .shared(),
        (0.2, 1.2),
        (-1.0, 1.0),
    )
}

/// Random ruled spec with director `(1, s, s)`.
pub fn random_lightlike_derivative(rng: &mut ChaCha8Rng) -> RuledSurfaceSpec {
    let g: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let director = FnCurve::infallible(|s: &Taylor| [Taylor::constant(1.0, s.order()), s.clone(), s.clone()]).shared();
    RuledSurfaceSpec::new(random_base(g), director, (0.2, 1.2), (-1.0, 1.0))
}

fn random_base(g: Vec<f64>) -> soliton_core::curve::SharedCurve<f64> {
    FnCurve::infallible(move |s: &Taylor| {
        [
            s.sin() * g[0] + s * 2.0,
            s.square() * g[1] + s.cos() * g[2],
            s.powi(3) * g[3] + (s * g[4]).exp() + s * g[5],
        ]
    })
    .shared()
}

/// Non-cylindrical director `lambda(s) (cos phi, sin phi, 1)` with
/// `phi' > 0`, over a base whose tangent keeps `<gamma', w> != 0`.
pub fn random_lightlike_director(rng: &mut ChaCha8Rng) -> RuledSurfaceSpec {
    let (p1, p2, q) = (
        rng.gen_range(0.5..2.0),
        rng.gen_range(-0.3..0.3),
        rng.gen_range(-0.5..0.5),
    );
    let (a, b, c) = (
        rng.gen_range(-0.4..0.4),
        rng.gen_range(-0.4..0.4),
        rng.gen_range(2.0..4.0),
    );
    let gamma = FnCurve::infallible(move |s: &Taylor| [s.sin() * a, s.cos() * b, s * c + s.square() * 0.1]).shared();
    let director = FnCurve::infallible(move |s: &Taylor| {
        let phi = s * p1 + s.square() * p2;
        let lambda = (s * q).exp();
        [&lambda * &phi.cos(), &lambda * &phi.sin(), lambda.clone()]
    })
    .shared();
    RuledSurfaceSpec::new(gamma, director, (0.0, 1.0), (-0.5, 0.5))
}
