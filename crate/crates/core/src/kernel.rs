//! Kernel polynomial `K(x,y;t) = xy(1 - t S(x,y))` and its algebra.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{Step, StepSet, WeightedModel};
use crate::poly::{rat_to_f64, RatPoly};
use crate::Rational;

/// Coordinate eliminated when forming a discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// `Delta_1` on the x-line: discriminant of `y -> K(x,y)`.
    X,
    /// `Delta_2` on the y-line: discriminant of `x -> K(x,y)`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("kernel has degree {degree} < 2 in the eliminated variable; model is degenerate")]
    Degenerate { degree: usize },
}

/// `K(x,y;t)` as a polynomial of bidegree at most `(2,2)`.
///
/// `coeffs[a][b]` is the coefficient of `x^a y^b`, a polynomial in `t` of
/// degree at most one: `[a=b=1] - t d_{a-1,b-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelPolynomial {
    coeffs: [[RatPoly; 3]; 3],
    values: [[Rational; 3]; 3],
    t: Rational,
    weights: [[Rational; 3]; 3],
}

/// Laurent polynomial `c_{-1}/z + c_0 + c_1 z`, stored as `[c_{-1}, c_0, c_1]`.
pub type Laurent = [Rational; 3];

impl KernelPolynomial {
    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// Coefficient of `x^a y^b` as a polynomial in `t`.
    pub fn coeff_poly(&self, a: usize, b: usize) -> &RatPoly {
        &self.coeffs[a][b]
    }

    /// Coefficient of `x^a y^b` at the model's `t`.
    pub fn coeff(&self, a: usize, b: usize) -> &Rational {
        &self.values[a][b]
    }

    /// All coefficients at the model's `t`, as f64.
    pub fn coeffs_f64(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (a, row) in self.values.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                out[a][b] = rat_to_f64(c);
            }
        }
        out
    }

    /// Coefficients of `S` in `y`: `S = A_{-1}(x)/y + A_0(x) + A_1(x) y`,
    /// each `A_j(x) = sum_i d_{i,j} x^i` a Laurent polynomial in `x`.
    pub fn a_decomposition(&self) -> [Laurent; 3] {
        std::array::from_fn(|j| std::array::from_fn(|i| self.weights[i][j].clone()))
    }

    /// Coefficients of `S` in `x`: `S = B_{-1}(y)/x + B_0(y) + B_1(y) x`.
    pub fn b_decomposition(&self) -> [Laurent; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.weights[i][j].clone()))
    }

    /// Jump polynomial `S(x,y)` at nonzero rational `x, y`.
    pub fn jump(&self, x: &Rational, y: &Rational) -> Rational {
        let mut s = Rational::zero();
        for i in 0..3 {
            for j in 0..3 {
                let w = &self.weights[i][j];
                if !w.is_zero() {
                    s += w * pow_i(x, i as i32 - 1) * pow_i(y, j as i32 - 1);
                }
            }
        }
        s
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for a in (0..3).rev() {
            let mut row = Rational::zero();
            for b in (0..3).rev() {
                row = row * y + &self.values[a][b];
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Degree in `x` at the model's `t` (`None` for the zero polynomial).
    pub fn degree_x(&self) -> Option<usize> {
        (0..3).rev().find(|&a| (0..3).any(|b| !self.values[a][b].is_zero()))
    }

    pub fn degree_y(&self) -> Option<usize> {
        (0..3).rev().find(|&b| (0..3).any(|a| !self.values[a][b].is_zero()))
    }

    /// Coefficients of `K` as a polynomial in the kept variable, grouped by
    /// the power of the eliminated one: for `Axis::X` returns
    /// `[C(x), B(x), A(x)]` with `K = A y^2 + B y + C`.
    pub fn quadratic_parts(&self, axis: Axis) -> [RatPoly; 3] {
        std::array::from_fn(|e| {
            RatPoly::new(
                (0..3)
                    .map(|k| match axis {
                        Axis::X => self.values[k][e].clone(),
                        Axis::Y => self.values[e][k].clone(),
                    })
                    .collect(),
            )
        })
    }

    pub fn homogenize(&self) -> HomogeneousKernel {
        HomogeneousKernel {
            coeffs: self.values.clone(),
        }
    }
}

fn pow_i(x: &Rational, e: i32) -> Rational {
    match e {
        -1 => x.recip(),
        0 => Rational::one(),
        _ => x.clone(),
    }
}

/// Builds `K` from the model weights.
pub fn build_kernel(model: &WeightedModel) -> KernelPolynomial {
    let weights: [[Rational; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| model.weight(i as i8 - 1, j as i8 - 1).clone()));
    let coeffs: [[RatPoly; 3]; 3] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let constant = if a == 1 && b == 1 {
                Rational::one()
            } else {
                Rational::zero()
            };
            RatPoly::linear(constant, -weights[a][b].clone())
        })
    });
    let values = std::array::from_fn(|a| std::array::from_fn(|b| coeffs[a][b].eval(model.t())));
    KernelPolynomial {
        coeffs,
        values,
        t: model.t().clone(),
        weights,
    }
}

impl fmt::Display for KernelPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in (0..3).rev() {
            for b in (0..3).rev() {
                let c = &self.values[a][b];
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})")?;
                match a {
                    0 => {}
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^2")?,
                }
                match b {
                    0 => {}
                    1 => write!(f, "y")?,
                    _ => write!(f, "y^2")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `K̄(x0,x1,y0,y1) = sum c_{ab} x0^a x1^{2-a} y0^b y1^{2-b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousKernel {
    coeffs: [[Rational; 3]; 3],
}

impl HomogeneousKernel {
    /// Coefficient of `x0^a x1^{2-a} y0^b y1^{2-b}`.
    pub fn coeff(&self, a: usize, b: usize) -> &Rational {
        &self.coeffs[a][b]
    }

    pub fn eval(&self, x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational) -> Rational {
        let xp = [x1 * x1, x0 * x1, x0 * x0];
        let yp = [y1 * y1, y0 * y1, y0 * y0];
        let mut acc = Rational::zero();
        for (row, xa) in self.coeffs.iter().zip(&xp) {
            for (c, yb) in row.iter().zip(&yp) {
                acc += c * xa * yb;
            }
        }
        acc
    }
}

/// Quartic discriminant `Delta(z0,z1) = sum_i alpha_i z0^i z1^{4-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticDiscriminant {
    pub axis: Axis,
    /// `alpha_i(t)`, each of degree at most 2 in `t`.
    pub coeffs_t: [RatPoly; 5],
    /// `alpha_i` at the model's `t`.
    pub values: [Rational; 5],
}

impl QuarticDiscriminant {
    /// Affine polynomial `D(z) = Delta([z:1])`.
    pub fn affine(&self) -> RatPoly {
        RatPoly::new(self.values.to_vec())
    }

    pub fn values_f64(&self) -> [f64; 5] {
        std::array::from_fn(|i| rat_to_f64(&self.values[i]))
    }
}

/// Discriminant of the kernel as a quadratic in the eliminated variable.
pub fn discriminant(kernel: &KernelPolynomial, axis: Axis) -> Result<QuarticDiscriminant, KernelError> {
    let degree = match axis {
        Axis::X => kernel.degree_y(),
        Axis::Y => kernel.degree_x(),
    }
    .unwrap_or(0);
    if degree < 2 {
        return Err(KernelError::Degenerate { degree });
    }
    // part[e][k]: coefficient of (eliminated)^e (kept)^k, polynomial in t.
    let part = |e: usize, k: usize| -> &RatPoly {
        match axis {
            Axis::X => kernel.coeff_poly(k, e),
            Axis::Y => kernel.coeff_poly(e, k),
        }
    };
    let four = RatPoly::constant(Rational::from_integer(4.into()));
    let coeffs_t: [RatPoly; 5] = std::array::from_fn(|n| {
        let mut acc = RatPoly::zero();
        for k in 0..3 {
            if n < k || n - k > 2 {
                continue;
            }
            let l = n - k;
            let bb = part(1, k) * part(1, l);
            let ac = &(part(2, k) * part(0, l)) * &four;
            acc = &(&acc + &bb) - &ac;
        }
        acc
    });
    let values = std::array::from_fn(|i| coeffs_t[i].eval(kernel.t()));
    Ok(QuarticDiscriminant { axis, coeffs_t, values })
}

/// Which weight pattern makes a model degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DegeneracyCase {
    /// Column `i` in `{-1,1}` carries no weight.
    EmptyColumn {
        i: i8,
    },
    /// Row `j` in `{-1,1}` carries no weight.
    EmptyRow {
        j: i8,
    },
    /// Support inside `{(-1,-1),(0,0),(1,1)}`.
    Diagonal,
    /// Support inside `{(-1,1),(0,0),(1,-1)}`.
    AntiDiagonal,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DegeneracyReport {
    pub degenerate: bool,
    pub matched_case: DegeneracyCase,
}

/// Weight-pattern degeneracy criterion (independent of `t`).
pub fn degeneracy_test(model: &WeightedModel) -> DegeneracyReport {
    degeneracy_of_support(model.step_set())
}

pub fn degeneracy_of_support(steps: StepSet) -> DegeneracyReport {
    let case = (|| {
        for i in [-1i8, 1] {
            if (-1..=1).all(|j| !steps.contains(Step::new(i, j))) {
                return DegeneracyCase::EmptyColumn { i };
            }
        }
        for j in [-1i8, 1] {
            if (-1..=1).all(|i| !steps.contains(Step::new(i, j))) {
                return DegeneracyCase::EmptyRow { j };
            }
        }
        let inside = |allowed: &[(i8, i8)]| steps.iter().all(|s| allowed.contains(&(s.i, s.j)));
        if inside(&[(-1, -1), (0, 0), (1, 1)]) {
            return DegeneracyCase::Diagonal;
        }
        if inside(&[(-1, 1), (0, 0), (1, -1)]) {
            return DegeneracyCase::AntiDiagonal;
        }
        DegeneracyCase::None
    })();
    DegeneracyReport {
        degenerate: case != DegeneracyCase::None,
        matched_case: case,
    }
}

/// Definitional check of degeneracy at a rational `t`: `K` has degree at
/// most one in `x` or `y`, or factors over the complex numbers.
///
/// Factor shapes of a bidegree-(2,2) polynomial: a factor in `x` alone, a
/// factor in `y` alone, or two factors of bidegree (1,1). The first two are
/// detected by the gcd of the coefficient polynomials; the last one exists
/// exactly when the roots in `y` are rational functions of `x`, i.e. when
/// the discriminant is a square in `C[x]`.
pub fn degeneracy_oracle(kernel: &KernelPolynomial) -> bool {
    let (Some(dx), Some(dy)) = (kernel.degree_x(), kernel.degree_y()) else {
        return true;
    };
    if dx <= 1 || dy <= 1 {
        return true;
    }
    let has_pure_factor = |axis: Axis| {
        let [c, b, a] = kernel.quadratic_parts(axis);
        let g = c.gcd(&b).gcd(&a);
        g.degree().unwrap_or(0) >= 1
    };
    if has_pure_factor(Axis::X) || has_pure_factor(Axis::Y) {
        return true;
    }
    let [c, b, a] = kernel.quadratic_parts(Axis::X);
    let disc = &(&b * &b) - &(&(&a * &c) * &RatPoly::constant(Rational::from_integer(4.into())));
    disc.is_square_over_complex()
}

/// Position of the kernel curve in the genus classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlaneClass {
    /// No closed half-plane through the origin contains the steps.
    Elliptic,
    /// Steps in `{i + j >= 0}`.
    Genus0Family1,
    /// Steps in `{j >= i}`.
    Genus0Family2,
    /// Steps in `{i + j <= 0}`.
    Genus0Family3,
    /// Steps in `{j <= i}`.
    Genus0Family4,
    /// Steps in an axis-aligned half-plane (degenerate models).
    DegenerateHalfPlane,
}

/// Classification together with the separating normal, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GenusReport {
    pub class: HalfPlaneClass,
    pub normal: Option<(i8, i8)>,
}

/// Axis normals first, then the four diagonal families in order.
const NORMALS: [((i8, i8), HalfPlaneClass); 8] = [
    ((1, 0), HalfPlaneClass::DegenerateHalfPlane),
    ((0, 1), HalfPlaneClass::DegenerateHalfPlane),
    ((-1, 0), HalfPlaneClass::DegenerateHalfPlane),
    ((0, -1), HalfPlaneClass::DegenerateHalfPlane),
    ((1, 1), HalfPlaneClass::Genus0Family1),
    ((-1, 1), HalfPlaneClass::Genus0Family2),
    ((-1, -1), HalfPlaneClass::Genus0Family3),
    ((1, -1), HalfPlaneClass::Genus0Family4),
];

/// All compass normals `n` with `n . s >= 0` for every step.
///
/// A closed half-plane containing the steps can be rotated until its
/// boundary meets a step, and normals orthogonal to a small step are compass
/// directions, so these eight normals decide containment exactly.
pub fn containing_half_planes(steps: StepSet) -> Vec<(i8, i8)> {
    let steps = steps.without_origin();
    NORMALS
        .iter()
        .map(|(n, _)| *n)
        .filter(|(u, v)| steps.iter().all(|s| u * s.i + v * s.j >= 0))
        .collect()
}

pub fn genus_classify(steps: StepSet) -> GenusReport {
    let normals = containing_half_planes(steps);
    match normals.first() {
        None => GenusReport {
            class: HalfPlaneClass::Elliptic,
            normal: None,
        },
        Some(n) => GenusReport {
            class: NORMALS.iter().find(|(m, _)| m == n).unwrap().1,
            normal: Some(*n),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{nonzero_steps, parse_model};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn simple() -> WeightedModel {
        parse_model("d 1 0 = 1/4\nd -1 0 = 1/4\nd 0 1 = 1/4\nd 0 -1 = 1/4\nt = 1/2").unwrap()
    }

    fn steps(list: &[(i8, i8)]) -> StepSet {
        StepSet::from_steps(list.iter().map(|&(i, j)| Step::new(i, j)))
    }

    #[test]
    fn simple_walk_kernel() {
        // xy - (t/4)(x^2 y + y + x y^2 + x) at t = 1/2.
        let k = build_kernel(&simple());
        let expect = |a: usize, b: usize| match (a, b) {
            (1, 1) => r(1, 1),
            (2, 1) | (0, 1) | (1, 2) | (1, 0) => r(-1, 8),
            _ => r(0, 1),
        };
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(k.coeff(a, b), &expect(a, b), "x^{a} y^{b}");
            }
        }
        assert_eq!(k.coeff_poly(2, 1), &RatPoly::linear(r(0, 1), r(-1, 4)));
    }

    #[test]
    fn origin_and_tandem_kernel() {
        let m = parse_model("d 0 0 = 1\nt = 1/2").unwrap();
        let k = build_kernel(&m);
        assert_eq!(k.coeff(1, 1), &r(1, 2));
        assert_eq!(k.to_string(), "(1/2)xy");

        let m = parse_model("d 1 0 = 1/3\nd -1 1 = 1/3\nd 0 -1 = 1/3\nt = 1/3").unwrap();
        let k = build_kernel(&m);
        // xy - (t/3)(x^2 y + y^2 + x)
        assert_eq!(k.coeff(2, 1), &r(-1, 9));
        assert_eq!(k.coeff(0, 2), &r(-1, 9));
        assert_eq!(k.coeff(1, 0), &r(-1, 9));
        assert_eq!(k.coeff(1, 1), &r(1, 1));
    }

    #[test]
    fn jump_decompositions_agree() {
        let m = parse_model("d 1 1 = 1/7\nd -1 0 = 2/7\nd 0 -1 = 3/7\nd 0 0 = 1/7\nt = 1/2").unwrap();
        let k = build_kernel(&m);
        let (x, y) = (r(3, 5), r(-7, 2));
        let a = k.a_decomposition();
        let b = k.b_decomposition();
        let lp = |l: &Laurent, z: &Rational| &l[0] / z + &l[1] + &l[2] * z;
        let via_a = lp(&a[0], &x) / &y + lp(&a[1], &x) + lp(&a[2], &x) * &y;
        let via_b = lp(&b[0], &y) / &x + lp(&b[1], &y) + lp(&b[2], &y) * &x;
        let s = k.jump(&x, &y);
        assert_eq!(via_a, s);
        assert_eq!(via_b, s);
        // K = xy (1 - t S)
        assert_eq!(k.eval(&x, &y), &x * &y * (Rational::one() - m.t() * &s));
        assert_eq!(k.eval(&r(0, 1), &r(0, 1)), -m.t() * m.weight(-1, -1));
    }

    #[test]
    fn homogenization() {
        let m = simple();
        let k = build_kernel(&m);
        let h = k.homogenize();
        let one = r(1, 1);
        for (x, y) in [(r(2, 3), r(-5, 4)), (r(7, 1), r(1, 9))] {
            assert_eq!(h.eval(&x, &one, &y, &one), k.eval(&x, &y));
        }
        let m = parse_model("d 1 1 = 1/5\nd 0 0 = 2/5\nd -1 -1 = 2/5\nt = 1/3").unwrap();
        let h = build_kernel(&m).homogenize();
        assert_eq!(h.coeff(2, 2), &(-m.t() * m.weight(1, 1)));
        assert_eq!(h.coeff(1, 1), &(Rational::one() - m.t() * m.weight(0, 0)));
    }

    #[test]
    fn simple_walk_discriminant() {
        let k = build_kernel(&simple());
        let d = discriminant(&k, Axis::X).unwrap();
        // (x - t(x^2+1)/4)^2 - t^2 x^2 / 4 at t = 1/2, times 64:
        // (x^2 - 10x + 1)(x^2 - 6x + 1) = x^4 - 16x^3 + 62x^2 - 16x + 1.
        let expect = [1, -16, 62, -16, 1].map(|c| r(c, 64));
        assert_eq!(d.values, expect);
        assert_eq!(d.values[4], r(1, 16) * r(1, 4));
        assert_eq!(d.coeffs_t[4], RatPoly::new(vec![r(0, 1), r(0, 1), r(1, 16)]));
        let dy = discriminant(&k, Axis::Y).unwrap();
        assert_eq!(dy.values, d.values);
    }

    #[test]
    fn alpha4_vanishes_with_leading_pattern() {
        // d_{1,0}^2 = 4 d_{1,-1} d_{1,1}: 1/4 = 4 (1/8)(1/2)... use 2/8,1/8,1/8
        let m = parse_model("d 1 0 = 2/8\nd 1 -1 = 1/8\nd 1 1 = 1/8\nd -1 0 = 2/8\nd 0 1 = 1/8\nd 0 -1 = 1/8\nt = 1/2")
            .unwrap();
        let d = discriminant(&build_kernel(&m), Axis::X).unwrap();
        assert!(d.values[4].is_zero());
        assert!(d.coeffs_t[4].is_zero());
    }

    #[test]
    fn degenerate_discriminant_rejected() {
        let m = parse_model("d 1 0 = 1/2\nd -1 0 = 1/2\nt = 1/2").unwrap();
        assert_eq!(
            discriminant(&build_kernel(&m), Axis::X),
            Err(KernelError::Degenerate { degree: 1 })
        );
    }

    #[test]
    fn degeneracy_cases() {
        let sixth = r(1, 6);
        let m = WeightedModel::new(
            [(0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)].map(|(i, j)| (Step::new(i, j), sixth.clone())),
            r(1, 2),
        )
        .unwrap();
        let rep = degeneracy_test(&m);
        assert!(rep.degenerate);
        assert_eq!(rep.matched_case, DegeneracyCase::EmptyColumn { i: -1 });
        assert!(degeneracy_oracle(&build_kernel(&m)));

        assert_eq!(degeneracy_test(&simple()).matched_case, DegeneracyCase::None);
        assert!(!degeneracy_oracle(&build_kernel(&simple())));

        let anti = parse_model("d -1 1 = 1/2\nd 1 -1 = 1/2\nt = 1/2").unwrap();
        assert_eq!(degeneracy_test(&anti).matched_case, DegeneracyCase::AntiDiagonal);
        assert!(degeneracy_oracle(&build_kernel(&anti)));

        let origin = parse_model("d 0 0 = 1\nt = 1/2").unwrap();
        assert!(degeneracy_oracle(&build_kernel(&origin)));
    }

    #[test]
    fn genus_examples() {
        let sw = steps(&[(1, 0), (-1, 0), (0, 1), (0, -1)]);
        assert_eq!(genus_classify(sw).class, HalfPlaneClass::Elliptic);
        let f1 = steps(&[(-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]);
        assert_eq!(genus_classify(f1).class, HalfPlaneClass::Genus0Family1);
        assert_eq!(genus_classify(f1).normal, Some((1, 1)));
        let ne = steps(&[(1, 0), (0, 1)]);
        assert_eq!(genus_classify(ne).class, HalfPlaneClass::DegenerateHalfPlane);
        assert!(containing_half_planes(ne).contains(&(1, 1)));
        let f2 = steps(&[(-1, 1), (1, 1), (-1, 0), (0, 1), (-1, -1)]);
        assert_eq!(genus_classify(f2).class, HalfPlaneClass::Genus0Family2);
        let f3 = steps(&[(-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]);
        assert_eq!(genus_classify(f3).class, HalfPlaneClass::Genus0Family3);
        let f4 = steps(&[(1, 1), (1, 0), (-1, -1), (0, -1), (1, -1)]);
        assert_eq!(genus_classify(f4).class, HalfPlaneClass::Genus0Family4);
    }

    #[test]
    fn pattern_matches_oracle_on_all_unweighted_supports() {
        for mask in 0u16..256 {
            let set = StepSet::from_steps(
                nonzero_steps()
                    .enumerate()
                    .filter(|(n, _)| mask & (1 << n) != 0)
                    .map(|(_, s)| s),
            );
            for with_origin in [false, true] {
                let mut set = set;
                if with_origin {
                    set.insert(Step::new(0, 0));
                }
                if set.is_empty() {
                    continue;
                }
                let m = WeightedModel::uniform(set, r(1, 2)).unwrap();
                assert_eq!(
                    degeneracy_test(&m).degenerate,
                    degeneracy_oracle(&build_kernel(&m)),
                    "support {set}"
                );
            }
        }
    }
}
