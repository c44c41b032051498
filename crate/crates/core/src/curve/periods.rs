//! Periods `w1, w2, w3` as integrals of `dx / sqrt(D_1(x))` on `P^1(R)`.
//!
//! With `x = tan(theta)`, `dx / sqrt|D(x)| = d theta / sqrt|Delta(sin, cos)|`
//! and `Delta(sin theta, cos theta) = lambda prod_i sin(theta - theta_i)`
//! over the branch-point angles. Arcs are traversed in the direction of
//! increasing `x` (increasing `theta`), passing through `[1:0]` at
//! `theta = pi/2` where needed, so no separate treatment of the unbounded
//! part of a contour is required.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::projective::ProjectivePoint;
use super::quadrature::{tanh_sinh, QuadratureResult};
use super::roots::BranchPoint;
use super::CurveError;
use crate::kernel::QuarticDiscriminant;

const MAX_LEVELS: u32 = 12;

/// Largest acceptable relative change under step halving.
pub const HALVING_ACCEPT: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Periods {
    /// `i * int_{a3}^{a4} dx / sqrt|D_1|`, purely imaginary.
    pub omega1: Complex64,
    /// `int_{a4}^{a1} dx / sqrt(D_1)` through `[1:0]`, positive.
    pub omega2: f64,
    /// `int_{a4}^{X(b4)} dx / sqrt(D_1)`, in `(0, omega2)`.
    pub omega3: f64,
    /// Quadrature error estimates for `(|omega1|, omega2, omega3)`.
    pub errors: [f64; 3],
    /// Relative changes under the last step halving.
    pub halving_change: [f64; 3],
    /// The double root `X(b4)` of `x -> K̄(x, b4)` ending the `omega3` path.
    pub omega3_endpoint: Option<f64>,
}

impl Periods {
    pub fn ratio(&self) -> f64 {
        self.omega3 / self.omega2
    }
}

fn delta_trig(alpha: &[f64; 5], theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let mut acc = 0.0;
    for (i, a) in alpha.iter().enumerate() {
        acc += a * s.powi(i as i32) * c.powi(4 - i as i32);
    }
    acc
}

/// End of an integration arc.
#[derive(Debug, Clone, Copy)]
pub enum ArcEnd {
    Root(usize),
    /// A regular point given by its angle.
    Angle(f64),
}

/// `1/sqrt|Delta|` in factored angular form for one discriminant.
#[derive(Debug, Clone)]
pub struct ArcIntegrand {
    alpha: [f64; 5],
    angles: [f64; 4],
    lambda: f64,
}

impl ArcIntegrand {
    pub fn new(disc: &QuarticDiscriminant, roots: &[BranchPoint; 4]) -> Self {
        let alpha = disc.values_f64();
        let angles = roots.clone().map(|r| r.angle);
        let mut sorted = angles;
        sorted.sort_by(f64::total_cmp);
        let mut best = (0.0, 0.0);
        for k in 0..4 {
            let lo = sorted[k];
            let hi = if k == 3 { sorted[0] + PI } else { sorted[k + 1] };
            if hi - lo > best.0 {
                best = (hi - lo, 0.5 * (lo + hi));
            }
        }
        let m = best.1;
        let prod: f64 = angles.iter().map(|t| (m - t).sin()).product();
        Self {
            alpha,
            angles,
            lambda: delta_trig(&alpha, m) / prod,
        }
    }

    /// `Delta(sin theta, cos theta)`, whose sign is that of `D(tan theta)`.
    pub fn delta(&self, theta: f64) -> f64 {
        delta_trig(&self.alpha, theta)
    }

    fn end_angle(&self, start: f64, end: ArcEnd) -> f64 {
        let raw = match end {
            ArcEnd::Root(k) => self.angles[k],
            ArcEnd::Angle(a) => a,
        };
        if raw > start {
            raw
        } else {
            raw + PI
        }
    }

    /// `int d theta / sqrt|Delta|` from root `start` to `end`, increasing
    /// `theta`, with the sign of `Delta` required to be `expected_sign`
    /// along the arc.
    pub fn integrate(
        &self,
        start: usize,
        end: ArcEnd,
        expected_sign: f64,
        tol: f64,
    ) -> Result<QuadratureResult, CurveError> {
        let a = self.angles[start];
        let b = self.end_angle(a, end);
        for frac in [0.25, 0.5, 0.75] {
            let v = self.delta(a + frac * (b - a));
            if v * expected_sign <= 0.0 {
                return Err(CurveError::ContourSign {
                    from: a.tan(),
                    to: b.tan(),
                });
            }
        }
        let end_root = match end {
            ArcEnd::Root(k) => Some(k),
            ArcEnd::Angle(_) => None,
        };
        let lambda = self.lambda.abs();
        let f = |theta: f64, da: f64, db: f64| {
            let mut prod = lambda;
            for (k, t) in self.angles.iter().enumerate() {
                prod *= if k == start {
                    da.sin()
                } else if Some(k) == end_root {
                    db.sin()
                } else {
                    (theta - t).sin().abs()
                };
            }
            1.0 / prod.sqrt()
        };
        let r = tanh_sinh(&f, a, b, tol, MAX_LEVELS);
        if !(r.relative_halving_change() <= HALVING_ACCEPT) || !r.value.is_finite() {
            return Err(CurveError::Quadrature {
                change: r.relative_halving_change(),
            });
        }
        Ok(r)
    }
}

/// Double root of `x -> K̄(x, b4)` as a real projective point.
///
/// Both Vieta representatives `[-P1 : 2 P2]` and `[2 P0 : -P1]` are formed
/// and the larger (better conditioned) one is returned.
pub fn double_root(coeffs: &[[f64; 3]; 3], b4: &BranchPoint) -> ProjectivePoint {
    let p: [f64; 3] = std::array::from_fn(|a| match b4.value {
        Some(b) => coeffs[a][0] + coeffs[a][1] * b + coeffs[a][2] * b * b,
        None => coeffs[a][2],
    });
    let u = (-p[1], 2.0 * p[2]);
    let v = (2.0 * p[0], -p[1]);
    let size = |w: (f64, f64)| w.0.abs().max(w.1.abs());
    let w = if size(u) >= size(v) { u } else { v };
    ProjectivePoint::new(Complex64::new(w.0, 0.0), Complex64::new(w.1, 0.0))
}

/// Angle in `(-pi/2, pi/2]` of a real projective point.
pub fn angle_of(p: &ProjectivePoint) -> f64 {
    let mut a = p.p0.re.atan2(p.p1.re);
    while a > PI / 2.0 {
        a -= PI;
    }
    while a <= -PI / 2.0 {
        a += PI;
    }
    a
}

pub fn compute_periods(
    delta1: &QuarticDiscriminant,
    a: &[BranchPoint; 4],
    b: &[BranchPoint; 4],
    coeffs: &[[f64; 3]; 3],
    tol: f64,
) -> Result<Periods, CurveError> {
    let integrand = ArcIntegrand::new(delta1, a);
    let w1 = integrand.integrate(2, ArcEnd::Root(3), -1.0, tol)?;
    let w2 = integrand.integrate(3, ArcEnd::Root(0), 1.0, tol)?;

    let x = double_root(coeffs, &b[3]);
    let theta_x = angle_of(&x);
    let start = a[3].angle;
    let stop = integrand.end_angle(start, ArcEnd::Root(0));
    let target = integrand.end_angle(start, ArcEnd::Angle(theta_x));
    if !(target < stop) {
        return Err(CurveError::Omega3 {
            reason: format!("X(b4) = {} does not lie on the arc from a4 to a1", x.canonical()),
        });
    }
    let w3 = integrand.integrate(3, ArcEnd::Angle(theta_x), 1.0, tol)?;
    if !(w3.value > 0.0 && w3.value < w2.value) {
        return Err(CurveError::Omega3 {
            reason: format!("omega3 = {} outside (0, omega2 = {})", w3.value, w2.value),
        });
    }
    Ok(Periods {
        omega1: Complex64::new(0.0, w1.value),
        omega2: w2.value,
        omega3: w3.value,
        errors: [w1, w2, w3].map(|w| w.error_estimate().max(4.0 * f64::EPSILON * w.value.abs())),
        halving_change: [
            w1.relative_halving_change(),
            w2.relative_halving_change(),
            w3.relative_halving_change(),
        ],
        omega3_endpoint: x.canonical().affine().map(|z| z.re),
    })
}
