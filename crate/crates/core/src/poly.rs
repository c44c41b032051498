//! Dense univariate polynomials with exact rational coefficients.
//!
//! Used for polynomials in `t` (kernel coefficients, discriminant
//! coefficients) and in `x` (specialised discriminants, degeneracy oracle,
//! Sturm root isolation).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Polynomial `c_0 + c_1 z + ... + c_n z^n`, stored ascending and trimmed
/// so that the leading coefficient is nonzero (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `a + b z`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + rat_to_f64(c))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + rat_to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Monic associate; the zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = &rem[k + dd] / &lc;
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's squarefree decomposition: returns `(c, [f_1, f_2, ...])` with
    /// `self = c * prod f_i^i`, each `f_i` monic, squarefree and pairwise
    /// coprime. Empty list for constants.
    pub fn squarefree_decomposition(&self) -> (Rational, Vec<RatPoly>) {
        let Some(lc) = self.leading().cloned() else {
            return (Rational::zero(), Vec::new());
        };
        let f = self.monic();
        if f.degree() == Some(0) {
            return (lc, Vec::new());
        }
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = &c - &b.derivative();
        let mut factors = Vec::new();
        loop {
            let g = b.gcd(&d);
            factors.push(g.clone());
            b = b.div_rem(&g).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = &c - &b.derivative();
        }
        while factors.last().is_some_and(|f| f.degree() == Some(0)) {
            factors.pop();
        }
        (lc, factors)
    }

    /// True when the polynomial is the square of a polynomial over the
    /// complex numbers (the zero polynomial and nonzero constants count).
    pub fn is_square_over_complex(&self) -> bool {
        if self.degree().unwrap_or(0) == 0 {
            return true;
        }
        let (_, factors) = self.squarefree_decomposition();
        factors
            .iter()
            .enumerate()
            .all(|(i, f)| (i + 1) % 2 == 0 || f.degree() == Some(0))
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<RatPoly> {
        let mut seq = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }

    /// Cauchy bound: every complex root has modulus strictly below it.
    pub fn root_bound(&self) -> Rational {
        let Some(lc) = self.leading() else {
            return Rational::one();
        };
        let lc = lc.abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| c.abs() / &lc)
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        m + Rational::one()
    }
}

/// Number of sign variations of a Sturm sequence at `z`.
pub fn sign_variations(seq: &[RatPoly], z: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(z);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Magnitudes outside f64 range: scale through the integer parts.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational value of a finite f64 (zero for non-finite input).
pub fn f64_to_rat(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn division_and_gcd() {
        // (z-1)(z-2) and (z-1)(z+3)
        let a = RatPoly::from_i64(&[2, -3, 1]);
        let b = RatPoly::from_i64(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), RatPoly::from_i64(&[-1, 1]));
        let (q, rem) = a.div_rem(&RatPoly::from_i64(&[-1, 1]));
        assert_eq!(q, RatPoly::from_i64(&[-2, 1]));
        assert!(rem.is_zero());
    }

    #[test]
    fn squarefree_parts() {
        // (z-1)^2 (z+2)
        let p = &(&RatPoly::from_i64(&[-1, 1]) * &RatPoly::from_i64(&[-1, 1])) * &RatPoly::from_i64(&[2, 1]);
        let (c, f) = p.squarefree_decomposition();
        assert_eq!(c, r(1, 1));
        assert_eq!(f.len(), 2);
        assert_eq!(f[0], RatPoly::from_i64(&[2, 1]));
        assert_eq!(f[1], RatPoly::from_i64(&[-1, 1]));
        assert!(!p.is_square_over_complex());
        let sq = &RatPoly::from_i64(&[1, 0, 1]) * &RatPoly::from_i64(&[1, 0, 1]);
        assert!(sq.scale(&r(-3, 7)).is_square_over_complex());
        assert!(RatPoly::from_i64(&[5]).is_square_over_complex());
        assert!(!RatPoly::from_i64(&[1, 0, 1]).is_square_over_complex());
    }

    #[test]
    fn sturm_counts_roots() {
        // z^4 - 10z^3 + ... : (z^2-10z+1)(z^2-6z+1) has four real roots in (0,10)
        let p = &RatPoly::from_i64(&[1, -10, 1]) * &RatPoly::from_i64(&[1, -6, 1]);
        let s = p.sturm_sequence();
        let b = p.root_bound();
        assert_eq!(sign_variations(&s, &-b.clone()) - sign_variations(&s, &b), 4);
        assert_eq!(sign_variations(&s, &r(0, 1)) - sign_variations(&s, &r(1, 1)), 2);
    }
}
