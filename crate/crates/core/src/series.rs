//! Exact walk counts `q_{i,j,k}` and truncated evaluation of `Q`, `F^1`, `F^2`.
//!
//! `q_{i,j,k}` is the total weight of the walks of length `k` from the
//! origin to `(i,j)` that never leave the quadrant. Since `sum_{i,j} q_{i,j,k}`
//! is at most 1, truncating after `K` steps leaves a tail of modulus at most
//! `t^{K+1}/(1-t)` on the closed unit polydisk.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

use crate::model::{Step, WeightedModel, ALL_STEPS};
use crate::par::{self, Execution};
use crate::poly::rat_to_f64;
use crate::Rational;

/// Hard bound on the length for brute-force enumeration.
pub const ORACLE_MAX_STEPS: usize = 12;

/// Default truncation order for the functional-equation check.
pub const DEFAULT_FEQ_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("enumeration length {0} exceeds the hard bound {ORACLE_MAX_STEPS}")]
    OracleBound(usize),
    #[error("evaluation point outside the convergence polydisk: {0}")]
    OutsidePolydisk(String),
}

/// Exact coefficients `q_{i,j,k}` for `0 <= i,j <= k <= K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    max_steps: usize,
    /// `layers[k][i * (k+1) + j]`.
    layers: Vec<Vec<Rational>>,
}

impl SeriesTable {
    fn empty(max_steps: usize) -> Self {
        SeriesTable {
            max_steps,
            layers: (0..=max_steps)
                .map(|k| vec![Rational::zero(); (k + 1) * (k + 1)])
                .collect(),
        }
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    /// `q_{i,j,k}`; zero outside the stored range.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Rational {
        self.get_ref(i, j, k).cloned().unwrap_or_else(Rational::zero)
    }

    fn get_ref(&self, i: usize, j: usize, k: usize) -> Option<&Rational> {
        if k > self.max_steps || i > k || j > k {
            return None;
        }
        Some(&self.layers[k][i * (k + 1) + j])
    }

    /// Mutable access, for tests that corrupt a table on purpose.
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> Option<&mut Rational> {
        if k > self.max_steps || i > k || j > k {
            return None;
        }
        Some(&mut self.layers[k][i * (k + 1) + j])
    }

    /// `sum_{i,j} q_{i,j,k}`: probability of surviving `k` steps.
    pub fn layer_mass(&self, k: usize) -> Rational {
        self.layers[k].iter().sum()
    }

    /// Nonzero entries `(i, j, k, q)` sorted by `(k, i, j)`.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        self.layers.iter().enumerate().flat_map(|(k, layer)| {
            layer
                .iter()
                .enumerate()
                .filter(|(_, q)| !q.is_zero())
                .map(move |(idx, q)| (idx / (k + 1), idx % (k + 1), k, q))
        })
    }

    /// Text export: one line `q <i> <j> <k> = <p>/<q>` per nonzero entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, j, k, q) in self.nonzero_entries() {
            let _ = writeln!(out, "q {i} {j} {k} = {}", fmt_fraction(q));
        }
        out
    }

    /// Coefficients `c_i = sum_k q_{i,0,k} t^k` of the section `Q(x,0;t)`.
    pub fn x_section(&self, t: f64) -> SectionSeries {
        self.section(t, |k, i| self.get_ref(i, 0, k))
    }

    /// Coefficients of the section `Q(0,y;t)`.
    pub fn y_section(&self, t: f64) -> SectionSeries {
        self.section(t, |k, j| self.get_ref(0, j, k))
    }

    fn section<'a>(&'a self, t: f64, entry: impl Fn(usize, usize) -> Option<&'a Rational>) -> SectionSeries {
        let mut coeffs = vec![0.0; self.max_steps + 1];
        let mut tk = 1.0;
        for k in 0..=self.max_steps {
            for (i, c) in coeffs.iter_mut().enumerate().take(k + 1) {
                if let Some(q) = entry(k, i) {
                    if !q.is_zero() {
                        *c += rat_to_f64(q) * tk;
                    }
                }
            }
            tk *= t;
        }
        SectionSeries {
            coeffs,
            tail_bound: tail_bound(t, self.max_steps),
        }
    }
}

/// `p/q` with a `/1` denominator kept for integers.
pub fn fmt_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// `t^{K+1}/(1-t)`.
pub fn tail_bound(t: f64, max_steps: usize) -> f64 {
    t.powi(max_steps as i32 + 1) / (1.0 - t)
}

/// Truncated one-variable section of `Q` as an f64 power series.
#[derive(Debug, Clone)]
pub struct SectionSeries {
    coeffs: Vec<f64>,
    tail_bound: f64,
}

impl SectionSeries {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }
}

/// Dynamic programming over the number of steps.
pub fn count_walks(model: &WeightedModel, max_steps: usize) -> SeriesTable {
    count_walks_with(model, max_steps, Execution::default())
}

/// [`count_walks`] with an explicit schedule for the per-layer sweep.
pub fn count_walks_with(model: &WeightedModel, max_steps: usize, exec: Execution) -> SeriesTable {
    let support: Vec<(Step, Rational)> = model.weights().map(|(s, w)| (s, w.clone())).collect();
    let mut table = SeriesTable::empty(max_steps);
    table.layers[0][0] = Rational::one();
    for k in 0..max_steps {
        let prev = &table.layers[k];
        let width = k + 2;
        let row = |i: usize| -> Vec<Rational> {
            (0..width)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for (s, w) in &support {
                        let (pi, pj) = (i as i64 - s.i as i64, j as i64 - s.j as i64);
                        if pi < 0 || pj < 0 || pi > k as i64 || pj > k as i64 {
                            continue;
                        }
                        let q = &prev[pi as usize * (k + 1) + pj as usize];
                        if !q.is_zero() {
                            acc += w * q;
                        }
                    }
                    acc
                })
                .collect()
        };
        let rows = par::map_range(exec, width, row);
        table.layers[k + 1] = rows.into_iter().flatten().collect();
    }
    table
}

/// Independent oracle: explicit enumeration of every step sequence of
/// length at most `max_steps`, discarding those that leave the quadrant.
///
/// Sequences are grouped by endpoint and step multiplicities, counted with
/// integers, and only then weighted, so the oracle shares no arithmetic with
/// [`count_walks`].
pub fn enumerate_walks_oracle(model: &WeightedModel, max_steps: usize) -> Result<SeriesTable, SeriesError> {
    if max_steps > ORACLE_MAX_STEPS {
        return Err(SeriesError::OracleBound(max_steps));
    }
    let steps: Vec<Step> = model.step_set().iter().collect();
    type Key = (usize, i64, i64, [u8; 9]);
    let mut counts: HashMap<Key, u64> = HashMap::new();

    fn dfs(steps: &[Step], max: usize, k: usize, pos: (i64, i64), used: &mut [u8; 9], counts: &mut HashMap<Key, u64>) {
        *counts.entry((k, pos.0, pos.1, *used)).or_insert(0) += 1;
        if k == max {
            return;
        }
        for s in steps {
            let next = (pos.0 + s.i as i64, pos.1 + s.j as i64);
            if next.0 < 0 || next.1 < 0 {
                continue;
            }
            used[s.index()] += 1;
            dfs(steps, max, k + 1, next, used, counts);
            used[s.index()] -= 1;
        }
    }
    dfs(&steps, max_steps, 0, (0, 0), &mut [0; 9], &mut counts);

    let mut table = SeriesTable::empty(max_steps);
    for ((k, i, j, used), n) in counts {
        let mut w = Rational::from_integer(BigInt::from(n));
        for s in ALL_STEPS {
            let e = used[s.index()];
            if e > 0 {
                w *= Pow::pow(model.weight_of(s), e as u32);
            }
        }
        *table.get_mut(i as usize, j as usize, k).expect("endpoint within range") += w;
    }
    Ok(table)
}

/// Truncated `Q(x,y;t) = sum_{k<=K} t^k sum q_{i,j,k} x^i y^j` with the
/// rigorous tail bound `t^{K+1}/(1-t)`.
pub fn eval_q(table: &SeriesTable, x: Complex64, y: Complex64, t: f64) -> Result<(Complex64, f64), SeriesError> {
    if x.norm() > 1.0 || y.norm() > 1.0 || !(t > 0.0 && t < 1.0) {
        return Err(SeriesError::OutsidePolydisk(format!("x={x}, y={y}, t={t}")));
    }
    let mut total = Complex64::zero();
    let mut tk = 1.0;
    for k in 0..=table.max_steps {
        let layer = &table.layers[k];
        let mut layer_sum = Complex64::zero();
        let mut xi = Complex64::one();
        for i in 0..=k {
            let mut row = Complex64::zero();
            for j in (0..=k).rev() {
                row = row * y + rat_to_f64(&layer[i * (k + 1) + j]);
            }
            layer_sum += row * xi;
            xi *= x;
        }
        total += layer_sum * tk;
        tk *= t;
    }
    Ok((total, tail_bound(t, table.max_steps)))
}

/// `K(x,0;t) = -t (d_{-1,-1} + d_{0,-1} x + d_{1,-1} x^2)`.
pub fn kernel_at_y0(model: &WeightedModel, x: Complex64) -> Complex64 {
    let t = model.t_f64();
    let p = model.weight_f64(-1, -1) + x * (model.weight_f64(0, -1) + x * model.weight_f64(1, -1));
    -t * p
}

/// `K(0,y;t) = -t (d_{-1,-1} + d_{-1,0} y + d_{-1,1} y^2)`.
pub fn kernel_at_x0(model: &WeightedModel, y: Complex64) -> Complex64 {
    kernel_at_y0(&model.transpose(), y)
}

/// `F^1(x;t) = K(x,0;t) Q(x,0;t)` truncated, with its propagated tail bound.
pub fn eval_f1(table: &SeriesTable, model: &WeightedModel, x: Complex64) -> Result<(Complex64, f64), SeriesError> {
    let (q, tail) = eval_q(table, x, Complex64::zero(), model.t_f64())?;
    let k = kernel_at_y0(model, x);
    Ok((k * q, k.norm() * tail))
}

/// `F^2(y;t) = K(0,y;t) Q(0,y;t)` truncated, with its propagated tail bound.
pub fn eval_f2(table: &SeriesTable, model: &WeightedModel, y: Complex64) -> Result<(Complex64, f64), SeriesError> {
    let (q, tail) = eval_q(table, Complex64::zero(), y, model.t_f64())?;
    let k = kernel_at_x0(model, y);
    Ok((k * q, k.norm() * tail))
}

/// Checks `K Q = F^1 + F^2 - K(0,0) Q(0,0) + xy` coefficientwise in
/// `Q[x,y]`, modulo `t^{order+1}`.
pub fn check_functional_equation(model: &WeightedModel, order: usize) -> bool {
    let table = count_walks(model, order);
    check_functional_equation_with(model, &table, order)
}

/// Functional-equation check against a given table (which must reach `order`).
pub fn check_functional_equation_with(model: &WeightedModel, table: &SeriesTable, order: usize) -> bool {
    assert!(table.max_steps >= order, "table shorter than the requested order");
    let q = |i: i64, j: i64, k: i64| -> Rational {
        if i < 0 || j < 0 || k < 0 {
            Rational::zero()
        } else {
            table.get(i as usize, j as usize, k as usize)
        }
    };
    let d = |i: i64, j: i64| model.weight(i as i8, j as i8).clone();
    for k in 0..=order as i64 {
        let span = k + 2;
        for a in 0..=span {
            for b in 0..=span {
                // [x^a y^b t^k] of K Q, with K = xy - t sum d_{i,j} x^{i+1} y^{j+1}.
                let mut lhs = q(a - 1, b - 1, k);
                for i in -1..=1 {
                    for j in -1..=1 {
                        let w = d(i, j);
                        if !w.is_zero() {
                            lhs -= w * q(a - i - 1, b - j - 1, k - 1);
                        }
                    }
                }
                let mut rhs = Rational::zero();
                if b == 0 {
                    // F^1 = K(x,0) Q(x,0), K(x,0) = -t sum_i d_{i,-1} x^{i+1}.
                    for i in -1..=1 {
                        rhs -= d(i, -1) * q(a - i - 1, 0, k - 1);
                    }
                }
                if a == 0 {
                    for j in -1..=1 {
                        rhs -= d(-1, j) * q(0, b - j - 1, k - 1);
                    }
                }
                if a == 0 && b == 0 {
                    rhs += d(-1, -1) * q(0, 0, k - 1);
                }
                if a == 1 && b == 1 && k == 0 {
                    rhs += Rational::one();
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn simple() -> WeightedModel {
        parse_model("d 1 0 = 1/4\nd -1 0 = 1/4\nd 0 1 = 1/4\nd 0 -1 = 1/4\nt = 1/2").unwrap()
    }

    fn origin() -> WeightedModel {
        parse_model("d 0 0 = 1\nt = 1/2").unwrap()
    }

    #[test]
    fn simple_walk_two_steps() {
        // Hand enumeration of the 16 two-step words: EW, NS return to the
        // origin; EN, NE reach (1,1); EE reaches (2,0); NN reaches (0,2).
        let table = count_walks(&simple(), 2);
        assert_eq!(table.get(0, 0, 0), r(1, 1));
        assert_eq!(table.get(1, 0, 1), r(1, 4));
        assert_eq!(table.get(0, 1, 1), r(1, 4));
        assert_eq!(table.get(0, 0, 2), r(1, 8));
        assert_eq!(table.get(1, 1, 2), r(1, 8));
        assert_eq!(table.get(2, 0, 2), r(1, 16));
        assert_eq!(table.get(0, 2, 2), r(1, 16));
        assert_eq!(table.nonzero_entries().count(), 7);
        assert_eq!(enumerate_walks_oracle(&simple(), 2).unwrap(), table);
    }

    #[test]
    fn origin_model_stays() {
        let table = count_walks(&origin(), 6);
        for k in 0..=6 {
            assert_eq!(table.get(0, 0, k), r(1, 1));
            assert_eq!(table.layer_mass(k), r(1, 1));
        }
        let half = parse_model("d 0 0 = 1/3\nd -1 1 = 1/3\nd 1 -1 = 1/3\nt = 1/2").unwrap();
        let table = enumerate_walks_oracle(&half, 5).unwrap();
        for k in 0..=5 {
            assert_eq!(table.get(0, 0, k), Pow::pow(r(1, 3), k as u32));
        }
    }

    #[test]
    fn oracle_bound_and_zero_length() {
        assert_eq!(enumerate_walks_oracle(&simple(), 13), Err(SeriesError::OracleBound(13)));
        let t0 = enumerate_walks_oracle(&simple(), 0).unwrap();
        assert_eq!(t0.nonzero_entries().count(), 1);
        assert_eq!(t0.get(0, 0, 0), r(1, 1));
    }

    #[test]
    fn text_export_sorted() {
        let text = count_walks(&simple(), 1).to_text();
        assert_eq!(text, "q 0 0 0 = 1/1\nq 0 1 1 = 1/4\nq 1 0 1 = 1/4\n");
    }

    #[test]
    fn q_evaluation() {
        let table = count_walks(&origin(), 60);
        let (v, tail) = eval_q(&table, Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.0), 0.5).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() <= tail + 1e-15);
        let (v0, _) = eval_q(
            &count_walks(&simple(), 3),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            1e-12,
        )
        .unwrap();
        assert!((v0.re - 1.0).abs() < 1e-11);
        assert!(eval_q(&table, Complex64::new(1.5, 0.0), Complex64::zero(), 0.5).is_err());

        // Oracle partial sum sum_k q_{0,0,k} 2^{-k} for the simple walk.
        let sw = simple();
        let oracle = enumerate_walks_oracle(&sw, 8).unwrap();
        let expected: Rational = (0..=8usize)
            .map(|k| oracle.get(0, 0, k) * Pow::pow(r(1, 2), k as u32))
            .sum();
        let (v, _) = eval_q(&count_walks(&sw, 8), Complex64::zero(), Complex64::zero(), 0.5).unwrap();
        assert!((v.re - rat_to_f64(&expected)).abs() < 1e-15);
    }

    #[test]
    fn truncation_error_within_bound() {
        let sw = simple();
        let big = count_walks(&sw, 25);
        let small = count_walks(&sw, 20);
        let x = Complex64::new(0.6, -0.7);
        let y = Complex64::new(-0.9, 0.1);
        let (a, tail) = eval_q(&small, x, y, 0.5).unwrap();
        let (b, _) = eval_q(&big, x, y, 0.5).unwrap();
        assert!((a - b).norm() <= tail);
    }

    #[test]
    fn f1_values() {
        let sw = simple();
        let table = count_walks(&sw, 20);
        let (f0, _) = eval_f1(&table, &sw, Complex64::zero()).unwrap();
        assert_eq!(f0, Complex64::zero()); // K(0,0) = -t d_{-1,-1} = 0
        let x = Complex64::new(0.5, 0.0);
        let (f, tail) = eval_f1(&table, &sw, x).unwrap();
        // Direct summation oracle: K(x,0) * sum_{i,k} q_{i,0,k} x^i t^k.
        let oracle = enumerate_walks_oracle(&sw, 12).unwrap();
        let mut direct = 0.0;
        for k in 0..=12 {
            for i in 0..=k {
                direct += rat_to_f64(&oracle.get(i, 0, k)) * 0.5f64.powi(i as i32) * 0.5f64.powi(k as i32);
            }
        }
        let direct = direct * (-0.5 * 0.25 * 0.5);
        assert!((f.re - direct).abs() <= tail + 0.125 * tail_bound(0.5, 12));

        let om = origin();
        let (f, _) = eval_f1(&count_walks(&om, 60), &om, Complex64::new(0.4, 0.0)).unwrap();
        assert!(f.norm() < 1e-15); // K(x,0) vanishes identically
    }

    #[test]
    fn functional_equation_exact() {
        assert!(check_functional_equation(&simple(), DEFAULT_FEQ_ORDER));
        let tandem = parse_model("d 1 0 = 1/3\nd -1 1 = 1/3\nd 0 -1 = 1/3\nt = 1/3").unwrap();
        assert!(check_functional_equation(&tandem, DEFAULT_FEQ_ORDER));
        let full = WeightedModel::uniform(crate::model::StepSet::from_mask(0x1ff), r(1, 2)).unwrap();
        assert!(check_functional_equation(&full, 6));

        let mut table = count_walks(&simple(), 10);
        *table.get_mut(0, 0, 2).unwrap() += r(1, 1);
        assert!(!check_functional_equation_with(&simple(), &table, 10));
    }

    #[test]
    fn sequential_matches_parallel() {
        let full = WeightedModel::uniform(crate::model::StepSet::from_mask(0x1ff), r(1, 2)).unwrap();
        assert_eq!(
            count_walks_with(&full, 12, Execution::Sequential),
            count_walks_with(&full, 12, Execution::Parallel)
        );
    }
}
