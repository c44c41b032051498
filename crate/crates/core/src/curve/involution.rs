//! The involutions `i1`, `i2` of the kernel curve and the QRT map.
//!
//! On `K̄ = sum_{a,b} c_{ab} x0^a x1^{2-a} y0^b y1^{2-b}` the involution
//! `i1` keeps `x` and exchanges the two roots of the quadratic form in
//! `y`; `i2` does the same with the roles swapped.

use num_complex::Complex64;

use super::projective::{CurvePoint, ProjectivePoint};
use super::CurveError;

/// Normalized residual above which a point is treated as off the curve.
pub const OFF_CURVE_THRESHOLD: f64 = 1e-6;

pub type KernelCoeffs = [[f64; 3]; 3];

fn powers(p: &ProjectivePoint) -> [Complex64; 3] {
    [p.p1 * p.p1, p.p0 * p.p1, p.p0 * p.p0]
}

/// `K̄` at unit-norm representatives, divided by the largest coefficient.
pub fn residual(c: &KernelCoeffs, p: &CurvePoint) -> f64 {
    let xp = powers(&p.x.normalized());
    let yp = powers(&p.y.normalized());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            acc += c[a][b] * xp[a] * yp[b];
            scale = scale.max(c[a][b].abs());
        }
    }
    acc.norm() / scale
}

/// Second root of `lo z1^2 + mid z0 z1 + hi z0^2` given the root `z`.
///
/// Vieta gives the root twice, from the product and from the sum of the
/// roots; the representative with the larger norm is the better
/// conditioned one (both vanish only where the quadratic degenerates).
fn other_root(lo: Complex64, mid: Complex64, hi: Complex64, z: ProjectivePoint) -> ProjectivePoint {
    let z = z.normalized();
    let product = ProjectivePoint::new(lo * z.p1, hi * z.p0);
    let sum = ProjectivePoint::new(-mid * z.p1 - hi * z.p0, hi * z.p1);
    let size = |p: &ProjectivePoint| p.p0.norm().max(p.p1.norm());
    if size(&product) >= size(&sum) {
        product
    } else {
        sum
    }
}

fn check_on_curve(c: &KernelCoeffs, p: &CurvePoint) -> Result<(), CurveError> {
    let r = residual(c, p);
    if r.is_finite() && r <= OFF_CURVE_THRESHOLD {
        Ok(())
    } else {
        Err(CurveError::OffCurve { residual: r })
    }
}

/// `i1(x, y) = (x, y')` with `y y' = A_{-1}(x) / A_1(x)`.
pub fn involution1(c: &KernelCoeffs, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    check_on_curve(c, p)?;
    let xp = powers(&p.x.normalized());
    let coef = |b: usize| (0..3).map(|a| c[a][b] * xp[a]).sum::<Complex64>();
    let y = other_root(coef(0), coef(1), coef(2), p.y);
    Ok(CurvePoint::new(p.x, y.normalized()))
}

/// `i2(x, y) = (x', y)` with `x x' = B_{-1}(y) / B_1(y)`.
pub fn involution2(c: &KernelCoeffs, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    check_on_curve(c, p)?;
    let yp = powers(&p.y.normalized());
    let coef = |a: usize| (0..3).map(|b| c[a][b] * yp[b]).sum::<Complex64>();
    let x = other_root(coef(0), coef(1), coef(2), p.x);
    Ok(CurvePoint::new(x.normalized(), p.y))
}

/// The QRT map `sigma = i2 o i1`.
pub fn sigma(c: &KernelCoeffs, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    involution2(c, &involution1(c, p)?)
}

/// Moves `p` back onto the curve by keeping `x` and taking the root in `y`
/// nearest to the current `y`.
pub fn reproject(c: &KernelCoeffs, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
    let xp = powers(&p.x.normalized());
    let coef = |b: usize| (0..3).map(|a| c[a][b] * xp[a]).sum::<Complex64>();
    let (lo, mid, hi) = (coef(0), coef(1), coef(2));
    let roots = if hi.norm() > 1e-300 {
        let disc = (mid * mid - 4.0 * hi * lo).sqrt();
        // Stable pair: q = -(mid + sign disc)/2, roots q/hi and lo/q.
        let s = if (mid.conj() * disc).re >= 0.0 { disc } else { -disc };
        let q = -(mid + s) / 2.0;
        [ProjectivePoint::new(q, hi), ProjectivePoint::new(lo, q)]
    } else {
        [ProjectivePoint::infinity(), ProjectivePoint::new(-lo, mid)]
    };
    let best = roots
        .into_iter()
        .filter(|r| !r.is_degenerate())
        .min_by(|u, v| u.chordal_distance(&p.y).total_cmp(&v.chordal_distance(&p.y)))
        .ok_or(CurveError::OffCurve {
            residual: f64::INFINITY,
        })?;
    let q = CurvePoint::new(p.x, best.normalized());
    check_on_curve(c, &q)?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Simple walk at t = 1/2: xy - (x^2 y + y + x y^2 + x)/8.
    fn simple() -> KernelCoeffs {
        let e = -1.0 / 8.0;
        [[0.0, e, 0.0], [e, 1.0, e], [0.0, e, 0.0]]
    }

    fn on_curve_point(c: &KernelCoeffs, x: f64) -> CurvePoint {
        let p = CurvePoint::new(ProjectivePoint::real(x), ProjectivePoint::real(0.0));
        reproject(
            c,
            &CurvePoint::new(p.x, ProjectivePoint::finite(Complex64::new(0.3, 0.1))),
        )
        .unwrap()
    }

    #[test]
    fn involutions_are_involutive() {
        let c = simple();
        for x in [0.3, 2.0, -4.0, 7.5] {
            let p = on_curve_point(&c, x);
            let q = involution1(&c, &p).unwrap();
            assert!(residual(&c, &q) < 1e-14);
            assert!(q.x.chordal_distance(&p.x) == 0.0);
            assert!(involution1(&c, &q).unwrap().distance(&p) < 1e-14);
            let r = involution2(&c, &p).unwrap();
            assert!(involution2(&c, &r).unwrap().distance(&p) < 1e-14);
        }
    }

    #[test]
    fn simple_walk_vieta_product() {
        // y y' = A_{-1}(x)/A_1(x) = 1 for the simple walk.
        let c = simple();
        let p = on_curve_point(&c, 2.0);
        let q = involution1(&c, &p).unwrap();
        let prod = p.y.affine().unwrap() * q.y.affine().unwrap();
        assert!((prod - 1.0).norm() < 1e-14);
        // sigma has order two for the simple walk.
        let s2 = sigma(&c, &sigma(&c, &p).unwrap()).unwrap();
        assert!(s2.distance(&p) < 1e-13);
    }

    #[test]
    fn off_curve_points_are_rejected() {
        let c = simple();
        let p = CurvePoint::new(ProjectivePoint::real(2.0), ProjectivePoint::real(5.0));
        assert!(matches!(involution1(&c, &p), Err(CurveError::OffCurve { .. })));
    }
}
