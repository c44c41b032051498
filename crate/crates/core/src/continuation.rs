//! Meromorphic continuation of `r_x`, `r_y` over the uniformization plane.
//!
//! On the curve the functional equation reads
//! `0 = F^1(x) + F^2(y) - K(0,0)Q(0,0) + xy`. Pulled back by `Lambda`,
//! `r_x = F^1 o x` and `r_y = F^2 o y` are defined on the base domain
//! `O = B_x u B_y` with
//!
//! * `B_x = {0 < Re w < w2, |x(w)| < 1 - margin}`,
//! * `B_y = {w3/2 < Re w < w3/2 + w2, |y(w)| < 1 - margin}`,
//!
//! each function being extended from its own band to the other one through
//! the functional equation. The strips select the lift of the unit disc
//! whose reflections `w -> w2 - w` and `w -> w2 + w3 - w` realise the
//! involutions; a bare `|x| < 1` test would also accept every `w2`-translate
//! of the band, where `r_x` takes different values.
//!
//! Beyond `O` the continuation uses `r_x(w + w3) = r_x(w) + b_x(w)` and
//! `r_x(w + w1) = r_x(w)` (and the same for `r_y` with `b_y`).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curve::{CurveAnalytics, LatticeContext};
use crate::kernel::Axis;
use crate::series::{count_walks, kernel_at_x0, kernel_at_y0, tail_bound, SectionSeries, SeriesTable};

pub const DEFAULT_TRUNCATION: usize = 40;
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_SHIFT_BUDGET: i64 = 64;
/// Largest truncation picked automatically to meet a tail tolerance.
pub const MAX_AUTO_TRUNCATION: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuationError {
    #[error("tail bound {bound:e} at truncation {truncation} exceeds the tolerance {tolerance:e}")]
    TailTolerance {
        truncation: usize,
        bound: f64,
        tolerance: f64,
    },
    #[error("w = {omega} is outside the base domain (|x| = {x_modulus}, |y| = {y_modulus})")]
    OutsideBase {
        omega: Complex64,
        x_modulus: f64,
        y_modulus: f64,
    },
    #[error("no base-domain representative of w = {omega} within {budget} shifts by w3")]
    ShiftBudget { omega: Complex64, budget: i64 },
    #[error("w = {omega} is within the pole threshold (|{coordinate}| = {modulus:e})")]
    PoleProximity {
        omega: Complex64,
        coordinate: &'static str,
        modulus: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationConfig {
    pub truncation: usize,
    pub tail_tolerance: f64,
    /// Distance to a pole, in `w` units, below which evaluation refuses.
    pub pole_threshold: f64,
    pub margin: f64,
    pub shift_budget: i64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            pole_threshold: DEFAULT_POLE_THRESHOLD,
            margin: DEFAULT_MARGIN,
            shift_budget: DEFAULT_SHIFT_BUDGET,
        }
    }
}

impl ContinuationConfig {
    /// Smallest truncation, at least the default, meeting the tolerance.
    pub fn auto_truncation(t: f64, tail_tolerance: f64) -> usize {
        (DEFAULT_TRUNCATION..=MAX_AUTO_TRUNCATION)
            .find(|&n| tail_bound(t, n) <= tail_tolerance)
            .unwrap_or(MAX_AUTO_TRUNCATION)
    }
}

/// Which base condition holds at a sampled point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseCondition {
    X,
    Y,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BaseDomainSample {
    pub omega: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub condition: BaseCondition,
}

/// Axis-aligned rectangle of the `w`-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Window {
    pub fn contains(&self, w: Complex64) -> bool {
        w.re >= self.re.0 && w.re <= self.re.1 && w.im >= self.im.0 && w.im <= self.im.1
    }
}

/// Origin of a pole candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleSource {
    /// Pole of `x` (resp. `y`) in the band where `|y| < 1` (resp. `|x| < 1`).
    Coordinate,
    /// Pole of a constituent of `b_x` (resp. `b_y`).
    Shift,
}

/// Candidate pole of the continued function (superset of the true poles).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PoleCandidate {
    pub omega: Complex64,
    pub source: PoleSource,
    /// Number of `w3` translations applied to the base pole.
    pub shift: i64,
}

pub struct Continuation<'a> {
    curve: &'a CurveAnalytics,
    config: ContinuationConfig,
    x_section: SectionSeries,
    y_section: SectionSeries,
    /// `K(0,0) Q(0,0)`.
    c00: Complex64,
    table: SeriesTable,
}

impl<'a> Continuation<'a> {
    pub fn new(curve: &'a CurveAnalytics, config: ContinuationConfig) -> Result<Self, ContinuationError> {
        let t = curve.model.t_f64();
        let bound = tail_bound(t, config.truncation);
        if !(bound <= config.tail_tolerance) {
            return Err(ContinuationError::TailTolerance {
                truncation: config.truncation,
                bound,
                tolerance: config.tail_tolerance,
            });
        }
        let table = count_walks(&curve.model, config.truncation);
        let x_section = table.x_section(t);
        let y_section = table.y_section(t);
        let c00 = kernel_at_y0(&curve.model, Complex64::new(0.0, 0.0)) * x_section.eval(Complex64::new(0.0, 0.0));
        Ok(Self {
            curve,
            config,
            x_section,
            y_section,
            c00,
            table,
        })
    }

    pub fn curve(&self) -> &CurveAnalytics {
        self.curve
    }

    pub fn config(&self) -> &ContinuationConfig {
        &self.config
    }

    pub fn table(&self) -> &SeriesTable {
        &self.table
    }

    /// `K(0,0;t) Q(0,0;t)`.
    pub fn c00(&self) -> Complex64 {
        self.c00
    }

    /// Tail bound of the truncated `F^1`, `F^2` at modulus below one.
    pub fn tail_bound(&self) -> f64 {
        self.x_section.tail_bound()
    }

    fn lattice(&self) -> &LatticeContext {
        &self.curve.lattice
    }

    fn coordinate(&self, axis: Axis, omega: Complex64) -> Result<Complex64, ContinuationError> {
        let (p, name) = match axis {
            Axis::X => (self.curve.x_at(omega), "x"),
            Axis::Y => (self.curve.y_at(omega), "y"),
        };
        let modulus = p.modulus();
        if !(modulus < 1.0 / self.config.pole_threshold) {
            return Err(ContinuationError::PoleProximity {
                omega,
                coordinate: name,
                modulus,
            });
        }
        Ok(p.affine().expect("finite below the pole threshold"))
    }

    pub fn x(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        self.coordinate(Axis::X, omega)
    }

    pub fn y(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        self.coordinate(Axis::Y, omega)
    }

    fn in_strip(&self, axis: Axis, omega: Complex64) -> bool {
        let lo = match axis {
            Axis::X => 0.0,
            Axis::Y => self.curve.omega3() / 2.0,
        };
        omega.re > lo && omega.re < lo + self.curve.omega2()
    }

    fn in_band(&self, axis: Axis, omega: Complex64) -> bool {
        let p = match axis {
            Axis::X => self.curve.x_at(omega),
            Axis::Y => self.curve.y_at(omega),
        };
        self.in_strip(axis, omega) && p.modulus() < 1.0 - self.config.margin
    }

    pub fn in_bx(&self, omega: Complex64) -> bool {
        self.in_band(Axis::X, omega)
    }

    pub fn in_by(&self, omega: Complex64) -> bool {
        self.in_band(Axis::Y, omega)
    }

    pub fn in_base(&self, omega: Complex64) -> bool {
        self.in_bx(omega) || self.in_by(omega)
    }

    pub fn base_sample(&self, omega: Complex64) -> Option<BaseDomainSample> {
        let condition = match (self.in_bx(omega), self.in_by(omega)) {
            (true, true) => BaseCondition::Both,
            (true, false) => BaseCondition::X,
            (false, true) => BaseCondition::Y,
            (false, false) => return None,
        };
        Some(BaseDomainSample {
            omega,
            x: self.curve.x_at(omega).affine_or_inf(),
            y: self.curve.y_at(omega).affine_or_inf(),
            condition,
        })
    }

    /// Truncated `F^1(x)`.
    pub fn f1(&self, x: Complex64) -> Complex64 {
        kernel_at_y0(&self.curve.model, x) * self.x_section.eval(x)
    }

    /// Truncated `F^2(y)`.
    pub fn f2(&self, y: Complex64) -> Complex64 {
        kernel_at_x0(&self.curve.model, y) * self.y_section.eval(y)
    }

    fn outside(&self, omega: Complex64) -> ContinuationError {
        ContinuationError::OutsideBase {
            omega,
            x_modulus: self.curve.x_at(omega).modulus(),
            y_modulus: self.curve.y_at(omega).modulus(),
        }
    }

    /// `r_x = F^1(x(w))` on `B_x`.
    pub fn rx_base(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        if !self.in_bx(omega) {
            return Err(self.outside(omega));
        }
        Ok(self.f1(self.x(omega)?))
    }

    /// `r_y = F^2(y(w))` on `B_y`.
    pub fn ry_base(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        if !self.in_by(omega) {
            return Err(self.outside(omega));
        }
        Ok(self.f2(self.y(omega)?))
    }

    /// `r_x` on all of `O`, through the functional equation on `B_y`.
    fn rx_on_base(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        if self.in_bx(omega) {
            return self.rx_base(omega);
        }
        let ry = self.ry_base(omega)?;
        Ok(self.c00 - self.x(omega)? * self.y(omega)? - ry)
    }

    fn ry_on_base(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        if self.in_by(omega) {
            return self.ry_base(omega);
        }
        let rx = self.rx_base(omega)?;
        Ok(self.c00 - self.x(omega)? * self.y(omega)? - rx)
    }

    /// `b_x(w) = y(-w) (x(w) - x(w + w3))`.
    pub fn bx(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        let w3 = self.curve.omega3();
        Ok(self.y(-omega)? * (self.x(omega)? - self.x(omega + w3)?))
    }

    /// `b_y(w) = x(w) (y(w) - y(-w))`.
    pub fn by(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        Ok(self.x(omega)? * (self.y(omega)? - self.y(-omega)?))
    }

    /// Representative of `w` modulo `w1` with imaginary part in `[0, |w1|)`.
    pub fn reduce_mod_omega1(&self, omega: Complex64) -> Complex64 {
        let h = self.curve.omega1().im;
        let n = (omega.im / h).floor();
        omega - self.curve.omega1() * n
    }

    /// Smallest `|n|` (positive first) with `w - n w3` in `O`.
    pub fn base_shift(&self, omega: Complex64) -> Result<i64, ContinuationError> {
        let w3 = self.curve.omega3();
        for k in 0..=self.config.shift_budget {
            for n in if k == 0 { vec![0] } else { vec![k, -k] } {
                if self.in_base(omega - w3 * n as f64) {
                    return Ok(n);
                }
            }
        }
        Err(ContinuationError::ShiftBudget {
            omega,
            budget: self.config.shift_budget,
        })
    }

    fn continue_with(
        &self,
        omega: Complex64,
        base: impl Fn(Complex64) -> Result<Complex64, ContinuationError>,
        shift: impl Fn(Complex64) -> Result<Complex64, ContinuationError>,
    ) -> Result<Complex64, ContinuationError> {
        let w = self.reduce_mod_omega1(omega);
        let w3 = self.curve.omega3();
        let n = self.base_shift(w)?;
        let mut value = base(w - w3 * n as f64)?;
        if n > 0 {
            for m in 1..=n {
                value += shift(w - w3 * m as f64)?;
            }
        } else {
            for m in 0..-n {
                value -= shift(w + w3 * m as f64)?;
            }
        }
        Ok(value)
    }

    pub fn continue_rx(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        self.continue_with(omega, |w| self.rx_on_base(w), |w| self.bx(w))
    }

    pub fn continue_ry(&self, omega: Complex64) -> Result<Complex64, ContinuationError> {
        self.continue_with(omega, |w| self.ry_on_base(w), |w| self.by(w))
    }

    /// `|r_x + r_y - K(0,0)Q(0,0) + x y|` at `w`.
    pub fn identity_check(&self, omega: Complex64) -> Result<f64, ContinuationError> {
        let rx = self.continue_rx(omega)?;
        let ry = self.continue_ry(omega)?;
        let w = self.reduce_mod_omega1(omega);
        Ok((rx + ry - self.c00 + self.x(w)? * self.y(w)?).norm())
    }

    /// Seeded points of `B_x n B_y` by rejection sampling over the strip
    /// intersection.
    pub fn sample_overlap(&self, n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w2, w3, h) = (self.curve.omega2(), self.curve.omega3(), self.curve.omega1().im);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n * 2000 {
            if out.len() == n {
                break;
            }
            let w = Complex64::new(rng.random_range(w3 / 2.0..w2), rng.random_range(0.0..h));
            if self.in_bx(w) && self.in_by(w) {
                out.push(w);
            }
        }
        out
    }

    /// Seeded points of `O`.
    pub fn sample_base(&self, n: usize, seed: u64) -> Vec<BaseDomainSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w2, w3, h) = (self.curve.omega2(), self.curve.omega3(), self.curve.omega1().im);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n * 2000 {
            if out.len() == n {
                break;
            }
            let w = Complex64::new(rng.random_range(0.0..w2 + w3 / 2.0), rng.random_range(0.0..h));
            if let Some(s) = self.base_sample(w) {
                out.push(s);
            }
        }
        out
    }

    /// Distance from `w` to the nearest candidate pole in `candidates`.
    pub fn pole_distance(candidates: &[PoleCandidate], omega: Complex64) -> f64 {
        candidates
            .iter()
            .map(|p| (p.omega - omega).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Candidate poles of `continue_rx` (`Axis::X`) or `continue_ry`
    /// (`Axis::Y`) inside `window`: poles of the coordinate inside the other
    /// band, plus poles of the shift terms, translated by `w3 Z` (with
    /// `|m|` limited by the window width) and by the lattice.
    pub fn predicted_poles(&self, axis: Axis, window: &Window) -> Vec<PoleCandidate> {
        let curve = self.curve;
        let (w1, w2, w3) = (curve.omega1(), curve.omega2(), curve.omega3());
        let x_poles = self.coordinate_poles(Axis::X);
        let y_poles = self.coordinate_poles(Axis::Y);
        let (own, shift_sources): (Vec<Complex64>, Vec<Complex64>) = match axis {
            Axis::X => (
                x_poles.clone(),
                y_poles
                    .iter()
                    .map(|p| -(*p))
                    .chain(x_poles.iter().copied())
                    .chain(x_poles.iter().map(|p| *p - w3))
                    .collect(),
            ),
            Axis::Y => (
                y_poles.clone(),
                x_poles
                    .iter()
                    .copied()
                    .chain(y_poles.iter().copied())
                    .chain(y_poles.iter().map(|p| -(*p)))
                    .collect(),
            ),
        };
        let other = match axis {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        };
        let width = (window.re.0.abs()).max(window.re.1.abs()) + w2;
        let n_max = (width / w3).ceil() as i64 + 1;
        let mut out: Vec<PoleCandidate> = Vec::new();
        let push = |w: Complex64, source: PoleSource, shift: i64, out: &mut Vec<PoleCandidate>| {
            if window.contains(w) && !out.iter().any(|p| (p.omega - w).norm() < 1e-9) {
                out.push(PoleCandidate {
                    omega: w,
                    source,
                    shift,
                });
            }
        };
        let h = w1.im;
        let a_range = ((window.im.0 / h).floor() as i64 - 1)..=((window.im.1 / h).ceil() as i64 + 1);
        // Poles of the coordinate inside the other band, one lift per w1 class.
        for p in &own {
            for b in -2..=2 {
                let base = *p + w2 * b as f64;
                let rep = self.reduce_mod_omega1(base);
                if !(self.in_strip(other, rep) && self.band_modulus(other, rep) < 1.0) {
                    continue;
                }
                for m in -n_max..=n_max {
                    for a in a_range.clone() {
                        push(rep + w3 * m as f64 + w1 * a as f64, PoleSource::Coordinate, m, &mut out);
                    }
                }
            }
        }
        // Poles of the shift terms: lattice-periodic, then w3-translated.
        let b_range = ((window.re.0 - n_max as f64 * w3) / w2).floor() as i64 - 1
            ..=((window.re.1 + n_max as f64 * w3) / w2).ceil() as i64 + 1;
        for p in &shift_sources {
            for m in -n_max..=n_max {
                for b in b_range.clone() {
                    for a in a_range.clone() {
                        push(
                            *p + w3 * m as f64 + w2 * b as f64 + w1 * a as f64,
                            PoleSource::Shift,
                            m,
                            &mut out,
                        );
                    }
                }
            }
        }
        out
    }

    fn band_modulus(&self, axis: Axis, omega: Complex64) -> f64 {
        match axis {
            Axis::X => self.curve.x_at(omega).modulus(),
            Axis::Y => self.curve.y_at(omega).modulus(),
        }
    }

    /// Poles of `x(w)` (resp. `y(w)`) in the period parallelogram.
    pub fn coordinate_poles(&self, axis: Axis) -> Vec<Complex64> {
        use crate::curve::AxisUniformization as U;
        let u = &self.curve.uniformization;
        let (formula, offset) = match axis {
            Axis::X => (u.x, 0.0),
            Axis::Y => (u.y, u.y_shift),
        };
        let solutions = match formula {
            U::Finite { d2, .. } => solve_wp(self.lattice(), Complex64::new(d2 / 6.0, 0.0)),
            U::Infinite { .. } => vec![Complex64::new(0.0, 0.0)],
        };
        solutions.into_iter().map(|w| w + offset).collect()
    }
}

/// Solutions of `wp(w) = v` in the parallelogram `[0,1) w2 + [0,1) w1`,
/// by Newton iteration from a grid of starting points.
pub fn solve_wp(ctx: &LatticeContext, v: Complex64) -> Vec<Complex64> {
    let (w1, w2) = ctx.generators;
    let mut found: Vec<Complex64> = Vec::new();
    let canon = |z: Complex64| {
        let b = z.im / w1.im;
        let b = b - b.floor();
        let zr = z - w1 * (z.im / w1.im).floor();
        let a = zr.re / w2.re;
        Complex64::new((a - a.floor()) * w2.re, b * w1.im)
    };
    let n = 8;
    for i in 0..n {
        for j in 0..n {
            let mut z = w2 * ((i as f64 + 0.5) / n as f64) + w1 * ((j as f64 + 0.5) / n as f64);
            let mut ok = false;
            for _ in 0..60 {
                let (Ok(p), Ok(dp)) = (ctx.wp(z), ctx.wp_prime(z)) else {
                    break;
                };
                let f = p - v;
                if f.norm() <= 1e-13 * v.norm().max(1.0) {
                    ok = true;
                    break;
                }
                if dp.norm() == 0.0 {
                    break;
                }
                let step = f / dp;
                let limit = 0.25 * w2.norm().min(w1.norm());
                z -= if step.norm() > limit {
                    step * (limit / step.norm())
                } else {
                    step
                };
            }
            if ok {
                let c = canon(z);
                let near = |a: Complex64, b: Complex64| {
                    let d = ctx.reduce(a - b);
                    d.norm() < 1e-7
                };
                if !found.iter().any(|f| near(*f, c)) {
                    found.push(c);
                }
            }
        }
    }
    found
}
