//! Points of the complex projective line and of `P^1 x P^1`.

use std::fmt;

use num_complex::Complex64;

/// A point `[p0 : p1]` of the complex projective line.
///
/// Affine points are `[z : 1]`; `[1 : 0]` is infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    pub p0: Complex64,
    pub p1: Complex64,
}

impl ProjectivePoint {
    pub fn new(p0: Complex64, p1: Complex64) -> Self {
        Self { p0, p1 }
    }

    pub fn finite(z: Complex64) -> Self {
        Self::new(z, Complex64::new(1.0, 0.0))
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    pub fn infinity() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    fn norm(&self) -> f64 {
        (self.p0.norm_sqr() + self.p1.norm_sqr()).sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.norm() > 0.0) || !self.norm().is_finite()
    }

    /// Representative of unit norm, with the larger coordinate made real
    /// and positive (so that equal points get equal representatives).
    pub fn normalized(&self) -> Self {
        let big = if self.p0.norm() >= self.p1.norm() {
            self.p0
        } else {
            self.p1
        };
        let phase = big / big.norm();
        let n = self.norm();
        Self::new(self.p0 / (phase * n), self.p1 / (phase * n))
    }

    /// Representative `[z : 1]`, or `[1 : 0]` for infinity.
    pub fn canonical(&self) -> Self {
        match self.affine() {
            Some(z) => Self::finite(z),
            None => Self::infinity(),
        }
    }

    /// Affine coordinate `p0/p1`; `None` at infinity.
    pub fn affine(&self) -> Option<Complex64> {
        if self.p1 == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.p0 / self.p1)
        }
    }

    /// Affine coordinate with infinity mapped to a complex infinity.
    pub fn affine_or_inf(&self) -> Complex64 {
        self.affine().unwrap_or(Complex64::new(f64::INFINITY, 0.0))
    }

    /// Modulus of the affine coordinate (`inf` at infinity).
    pub fn modulus(&self) -> f64 {
        let d = self.p1.norm();
        if d == 0.0 {
            f64::INFINITY
        } else {
            self.p0.norm() / d
        }
    }

    /// Chordal distance `|p0 q1 - p1 q0| / (|p| |q|)`, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        (a.p0 * b.p1 - a.p1 * b.p0).norm()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.affine() {
            None => write!(f, "[1:0]"),
            Some(z) if z.im == 0.0 => write!(f, "[{}:1]", z.re),
            Some(z) => write!(f, "[{}{:+}i:1]", z.re, z.im),
        }
    }
}

/// A point `(x, y)` of `P^1 x P^1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: ProjectivePoint,
    pub y: ProjectivePoint,
}

impl CurvePoint {
    pub fn new(x: ProjectivePoint, y: ProjectivePoint) -> Self {
        Self { x, y }
    }

    /// Product chordal distance: the larger of the coordinate distances.
    pub fn distance(&self, other: &Self) -> f64 {
        self.x.chordal_distance(&other.x).max(self.y.chordal_distance(&other.y))
    }
}
