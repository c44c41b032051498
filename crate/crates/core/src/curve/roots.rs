//! Certified real roots of the discriminant quartics and their ordering.

use num_traits::{One, Signed, Zero};

use super::projective::ProjectivePoint;
use super::CurveError;
use crate::kernel::{Axis, QuarticDiscriminant};
use crate::poly::{rat_to_f64, sign_variations, RatPoly};
use crate::Rational;

/// One real branch point, certified by an exact rational bracket.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BranchPoint {
    /// Affine value; `None` for the point `[1:0]`.
    pub value: Option<f64>,
    /// Radius of the certified enclosure of `value`.
    pub error_radius: f64,
    /// Angle `theta` with `x = tan(theta)`, in `(-pi/2, pi/2]`.
    pub angle: f64,
}

impl BranchPoint {
    pub fn infinity() -> Self {
        Self {
            value: None,
            error_radius: 0.0,
            angle: std::f64::consts::FRAC_PI_2,
        }
    }

    fn finite(value: f64, error_radius: f64) -> Self {
        Self {
            value: Some(value),
            error_radius,
            angle: value.atan(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }

    pub fn point(&self) -> ProjectivePoint {
        match self.value {
            Some(v) => ProjectivePoint::real(v),
            None => ProjectivePoint::infinity(),
        }
    }

    /// Position along the cycle of `P^1(R)` that starts just above `-1`,
    /// runs up through `+inf` and wraps around from `-inf` back to `-1`.
    fn cycle_key(&self) -> (u8, f64) {
        match self.value {
            Some(v) if v > -1.0 => (0, v),
            None => (1, 0.0),
            Some(v) => (2, v),
        }
    }
}

/// Branch points `a_1..a_4` (roots of `Delta_1`) and `b_1..b_4` (of `Delta_2`).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BranchPoints {
    pub a: [BranchPoint; 4],
    pub b: [BranchPoint; 4],
}

/// Roots of `Delta` on `P^1(R)` in cycle order.
///
/// Distinctness and reality are certified exactly: the affine quartic must
/// be squarefree with as many real roots (Sturm count) as its degree, and a
/// degree drop of exactly one contributes `[1:0]`.
pub fn real_projective_roots(disc: &QuarticDiscriminant, bits: u32) -> Result<[BranchPoint; 4], CurveError> {
    let p = disc.affine();
    let degree = p.degree().unwrap_or(0);
    let at_infinity = 4 - degree.min(4);
    if p.is_zero() || at_infinity > 1 {
        return Err(CurveError::BranchPoints {
            axis: disc.axis,
            reason: format!("[1:0] is a root of multiplicity {at_infinity}"),
        });
    }
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Err(CurveError::BranchPoints {
            axis: disc.axis,
            reason: "discriminant has a repeated root".into(),
        });
    }
    let sturm = p.sturm_sequence();
    let bound = p.root_bound();
    let lo = -bound.clone();
    let count = sign_variations(&sturm, &lo) - sign_variations(&sturm, &bound);
    if count != degree {
        return Err(CurveError::BranchPoints {
            axis: disc.axis,
            reason: format!("only {count} of {degree} finite roots are real"),
        });
    }
    let width = Rational::new(1.into(), num_bigint::BigInt::one() << bits);
    let mut brackets = Vec::new();
    isolate(&sturm, lo, bound, count, &mut brackets);
    let mut roots: Vec<BranchPoint> = brackets.into_iter().map(|(a, b)| refine(&p, a, b, &width)).collect();
    if at_infinity == 1 {
        roots.push(BranchPoint::infinity());
    }
    roots.sort_by(|u, v| u.cycle_key().partial_cmp(&v.cycle_key()).unwrap());
    let roots: [BranchPoint; 4] = roots.try_into().expect("four roots");
    check_cycle_property(disc.axis, &roots)?;
    Ok(roots)
}

/// Splits `(lo, hi]` until every piece holds exactly one root.
fn isolate(sturm: &[RatPoly], lo: Rational, hi: Rational, count: usize, out: &mut Vec<(Rational, Rational)>) {
    match count {
        0 => {}
        1 => out.push((lo, hi)),
        _ => {
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            let left = sign_variations(sturm, &lo) - sign_variations(sturm, &mid);
            isolate(sturm, lo, mid.clone(), left, out);
            isolate(sturm, mid, hi, count - left, out);
        }
    }
}

/// Bisects a bracket `(a, b]` holding one simple root down to `width`,
/// then polishes the f64 value by Newton steps kept inside the bracket.
fn refine(p: &RatPoly, mut a: Rational, mut b: Rational, width: &Rational) -> BranchPoint {
    if p.eval(&b).is_zero() {
        return BranchPoint::finite(rat_to_f64(&b), 0.0);
    }
    let two = Rational::from_integer(2.into());
    let sign_b = p.eval(&b).is_positive();
    while &(&b - &a) > width {
        let m = (&a + &b) / &two;
        let v = p.eval(&m);
        if v.is_zero() {
            return BranchPoint::finite(rat_to_f64(&m), 0.0);
        }
        if v.is_positive() == sign_b {
            b = m;
        } else {
            a = m;
        }
    }
    let (fa, fb) = (rat_to_f64(&a), rat_to_f64(&b));
    let dp = p.derivative();
    let mut x = rat_to_f64(&((&a + &b) / &two));
    for _ in 0..4 {
        let step = p.eval_f64(x) / dp.eval_f64(x);
        let next = x - step;
        if !(next >= fa && next <= fb) || next == x {
            break;
        }
        x = next;
    }
    let radius = (fb - fa).max(f64::EPSILON * x.abs());
    BranchPoint::finite(x, radius)
}

/// Expected position of the branch points on the cycle: `a_1, a_2` in
/// `(-1, 1)`, `a_3, a_4` outside `[-1, 1]`.
fn check_cycle_property(axis: Axis, roots: &[BranchPoint; 4]) -> Result<(), CurveError> {
    let inside = |r: &BranchPoint| r.value.is_some_and(|v| v.abs() < 1.0);
    let outside = |r: &BranchPoint| r.value.is_none_or(|v| v.abs() > 1.0);
    if inside(&roots[0]) && inside(&roots[1]) && outside(&roots[2]) && outside(&roots[3]) {
        Ok(())
    } else {
        Err(CurveError::BranchPoints {
            axis,
            reason: "branch points not separated by the unit circle".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_kernel, discriminant};
    use crate::model::parse_model;

    #[test]
    fn simple_walk_roots() {
        let m = parse_model("d 1 0 = 1/4\nd -1 0 = 1/4\nd 0 1 = 1/4\nd 0 -1 = 1/4\nt = 1/2").unwrap();
        let d = discriminant(&build_kernel(&m), Axis::X).unwrap();
        let roots = real_projective_roots(&d, 64).unwrap();
        let s6 = 6f64.sqrt();
        let s2 = 2f64.sqrt();
        let expect = [5.0 - 2.0 * s6, 3.0 - 2.0 * s2, 3.0 + 2.0 * s2, 5.0 + 2.0 * s6];
        for (r, e) in roots.iter().zip(expect) {
            assert!((r.value.unwrap() - e).abs() < 1e-13, "{r:?} vs {e}");
            assert!(r.error_radius < 1e-14);
        }
    }

    #[test]
    fn infinity_is_a_root_when_alpha4_vanishes() {
        // Tandem: d_{1,0} = 1/3, d_{1,+-1} = 0 gives alpha_4 = t^2/9 != 0 in x;
        // in y the discriminant loses degree since d_{-1,1} is the only step with j=1.
        let m = parse_model("d 1 0 = 1/3\nd -1 1 = 1/3\nd 0 -1 = 1/3\nt = 1/3").unwrap();
        let k = build_kernel(&m);
        let db = discriminant(&k, Axis::Y).unwrap();
        assert!(db.values[4].is_zero());
        let roots = real_projective_roots(&db, 64).unwrap();
        assert!(roots.iter().filter(|r| r.is_infinite()).count() == 1);
    }

    #[test]
    fn coarse_and_fine_isolation_agree() {
        let m = parse_model("d 1 1 = 1/7\nd -1 0 = 3/7\nd 0 -1 = 3/7\nt = 1/2").unwrap();
        let d = discriminant(&build_kernel(&m), Axis::X).unwrap();
        let coarse = real_projective_roots(&d, 30).unwrap();
        let fine = real_projective_roots(&d, 80).unwrap();
        for (c, f) in coarse.iter().zip(&fine) {
            assert_eq!(c.is_infinite(), f.is_infinite());
            if let (Some(a), Some(b)) = (c.value, f.value) {
                assert!((a - b).abs() <= c.error_radius + 1e-15);
            }
        }
    }
}
