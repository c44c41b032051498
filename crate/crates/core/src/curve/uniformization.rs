//! The uniformization `Lambda(w) = (x(w), y(w))` of the kernel curve.
//!
//! With `D` the discriminant on one axis and `e` its branch point `a4`
//! (resp. `b4`), write `D(z) = c1 (z-e) + c2 (z-e)^2 + c3 (z-e)^3 + c4 (z-e)^4`
//! for finite `e`. Then `z(w) = e + c1 / (wp(w) - c2/3)` satisfies
//! `(dz/dw)^2 = 4 D(z)` exactly when the lattice invariants are
//! `g2 = 4 c2^2/3 - 4 c1 c3` and `g3 = -8 c2^3/27 + 4 c1 c2 c3/3 - 4 c1^2 c4`.
//! For `e = [1:0]` the cubic `D = a3 z^3 + a2 z^2 + a1 z + a0` gives
//! `z(w) = (wp(w) - a2/3) / a3` with the same invariants for
//! `(c1, c2, c3, c4) = (a3, a2, a1, a0)`.
//!
//! The `y` coordinate uses `wp(w - w3/2)`: this places the fixed points of
//! `i1` at `w = 0` and those of `i2` at `w = w3/2`, so that the involutions
//! lift to `w -> -w` and `w -> w3 - w`.

use num_complex::Complex64;

use super::projective::{CurvePoint, ProjectivePoint};
use super::roots::BranchPoint;
use super::weierstrass::LatticeContext;
use crate::kernel::QuarticDiscriminant;

/// Active formula for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum AxisUniformization {
    /// Branch point `e` finite; `d1 = D'(e)`, `d2 = D''(e)`.
    Finite { root: f64, d1: f64, d2: f64 },
    /// Branch point at infinity; `alpha2`, `alpha3` coefficients of `D`.
    Infinite { alpha2: f64, alpha3: f64 },
}

impl AxisUniformization {
    pub fn new(disc: &QuarticDiscriminant, root: &BranchPoint) -> Self {
        let a = disc.values_f64();
        match root.value {
            Some(e) => {
                let p = disc.affine();
                let d = p.derivative();
                Self::Finite {
                    root: e,
                    d1: d.eval_f64(e),
                    d2: d.derivative().eval_f64(e),
                }
            }
            None => Self::Infinite {
                alpha2: a[2],
                alpha3: a[3],
            },
        }
    }

    /// Expansion coefficients `(c1, c2, c3, c4)` of `D` at the branch point.
    pub fn expansion(disc: &QuarticDiscriminant, root: &BranchPoint) -> [f64; 4] {
        let a = disc.values_f64();
        match root.value {
            Some(e) => {
                let mut p = disc.affine();
                let mut out = [0.0; 4];
                let mut fact = 1.0;
                for (k, slot) in out.iter_mut().enumerate() {
                    p = p.derivative();
                    fact *= (k + 1) as f64;
                    *slot = p.eval_f64(e) / fact;
                }
                out
            }
            None => [a[3], a[2], a[1], a[0]],
        }
    }

    /// Coordinate at a point where `wp = num/den`.
    pub fn apply(&self, num: Complex64, den: Complex64) -> ProjectivePoint {
        match *self {
            Self::Finite { root, d1, d2 } => {
                let shifted = num - d2 / 6.0 * den;
                ProjectivePoint::new(root * shifted + d1 * den, shifted)
            }
            Self::Infinite { alpha2, alpha3 } => ProjectivePoint::new(num - alpha2 / 3.0 * den, alpha3 * den),
        }
    }
}

/// Lattice invariants `(g2, g3)` predicted by an expansion `(c1..c4)`.
pub fn invariants_from_expansion(c: [f64; 4]) -> (f64, f64) {
    let [c1, c2, c3, c4] = c;
    let g2 = 4.0 * c2 * c2 / 3.0 - 4.0 * c1 * c3;
    let g3 = -8.0 * c2 * c2 * c2 / 27.0 + 4.0 * c1 * c2 * c3 / 3.0 - 4.0 * c1 * c1 * c4;
    (g2, g3)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct UniformizationData {
    pub x: AxisUniformization,
    pub y: AxisUniformization,
    /// Offset applied to the argument of `wp` in the `y` formula.
    pub y_shift: f64,
}

impl UniformizationData {
    pub fn x_infinite_case(&self) -> bool {
        matches!(self.x, AxisUniformization::Infinite { .. })
    }

    pub fn y_infinite_case(&self) -> bool {
        matches!(self.y, AxisUniformization::Infinite { .. })
    }
}

pub fn uniformize_x(w: Complex64, data: &UniformizationData, ctx: &LatticeContext) -> ProjectivePoint {
    let (num, den) = ctx.wp_projective(w);
    data.x.apply(num, den).normalized()
}

pub fn uniformize_y(w: Complex64, data: &UniformizationData, ctx: &LatticeContext) -> ProjectivePoint {
    let (num, den) = ctx.wp_projective(w - data.y_shift);
    data.y.apply(num, den).normalized()
}

pub fn uniformize(w: Complex64, data: &UniformizationData, ctx: &LatticeContext) -> CurvePoint {
    CurvePoint::new(uniformize_x(w, data, ctx), uniformize_y(w, data, ctx))
}
