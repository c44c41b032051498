//! Finiteness of the group of the walk at the model's `t`.
//!
//! `sigma` acts on the uniformization plane as translation by `w3`, so it
//! has finite order `l` exactly when `l w3` lies in the period lattice,
//! i.e. `w3 / w2 = k / l`. The ratio is reconstructed by continued
//! fractions and then confirmed twice: on the lattice, and by iterating
//! `sigma` on curve points directly.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curve::{CurveAnalytics, CurveConfig, CurveError, CurvePoint};
use crate::model::WeightedModel;
use crate::par::{map_slice, Execution};

pub const DEFAULT_MAX_DENOMINATOR: u64 = 200;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Chordal distance at which an orbit is considered to have returned.
pub const ORBIT_TOLERANCE: f64 = 1e-8;
pub const ORBIT_SAMPLES: usize = 20;
pub const MAX_ORBIT_BOUND: usize = 1_000_000;

pub const T_SPECIFIC_CAVEAT: &str =
    "finiteness is decided for the group specialized at this t; the generic group may be infinite";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("curve: {0}")]
    Curve(#[from] CurveError),
    #[error("order {ell}: lattice check says {lattice} but orbit check says {orbit}")]
    Inconsistent { ell: u64, lattice: bool, orbit: bool },
    #[error("orbit returned after {steps} steps although no ratio with denominator <= {bound} was found")]
    UnexplainedReturn { steps: usize, bound: u64 },
    #[error("orbit bound {0} exceeds the limit {MAX_ORBIT_BOUND}")]
    OrbitBound(usize),
}

/// Smallest-denominator continued-fraction convergent `k/l` of `ratio`
/// with `l <= max_denominator` and `|ratio - k/l| < tol`.
pub fn reconstruct_rational(ratio: f64, max_denominator: u64, tol: f64) -> Option<(u64, u64)> {
    if !ratio.is_finite() || ratio < 0.0 {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut x = ratio;
    for _ in 0..64 {
        let a = x.floor();
        if a > u32::MAX as f64 {
            return None;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > max_denominator {
            return None;
        }
        if (ratio - h as f64 / k as f64).abs() < tol {
            return Some((h, k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = x - a as f64;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OrderCheck {
    pub ell: u64,
    /// `|l w3 - k w2| / w2` for the nearest integer `k`.
    pub lattice_residual: f64,
    /// Largest distance `d(sigma^l(P), P)` over the sampled points.
    pub orbit_residual: f64,
    pub confirmed: bool,
}

/// Seeded generic points `Lambda(w)`, away from the real and imaginary
/// axes where the fixed points of the involutions lie.
pub fn sample_points(curve: &CurveAnalytics, n: usize, seed: u64) -> Vec<(Complex64, CurvePoint)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(0.05..0.95);
            let v: f64 = rng.random_range(0.1..0.9);
            let w = curve.omega2() * u + curve.omega1() * v;
            (w, curve.point(w))
        })
        .collect()
}

fn iterate_sigma(curve: &CurveAnalytics, p: &CurvePoint, n: u64) -> Result<CurvePoint, CurveError> {
    let mut q = *p;
    for _ in 0..n {
        q = curve.sigma(&q)?;
    }
    Ok(q)
}

/// Checks `l w3 in Lambda` and `sigma^l = id` on sampled points; the two
/// checks must agree.
pub fn confirm_order(
    curve: &CurveAnalytics,
    ell: u64,
    tol: f64,
    seed: u64,
    exec: Execution,
) -> Result<OrderCheck, GroupError> {
    let (w2, w3) = (curve.omega2(), curve.omega3());
    let k = (ell as f64 * w3 / w2).round();
    let lattice_residual = (ell as f64 * w3 - k * w2).abs() / w2;
    let lattice_ok = ell > 0 && lattice_residual < tol;
    let points = sample_points(curve, ORBIT_SAMPLES, seed);
    let distances = map_slice(exec, &points, |(_, p)| {
        iterate_sigma(curve, p, ell).map(|q| q.distance(p))
    });
    let mut orbit_residual: f64 = 0.0;
    for d in distances {
        orbit_residual = orbit_residual.max(d?);
    }
    let orbit_ok = orbit_residual < ORBIT_TOLERANCE;
    if lattice_ok != orbit_ok {
        return Err(GroupError::Inconsistent {
            ell,
            lattice: lattice_ok,
            orbit: orbit_ok,
        });
    }
    Ok(OrderCheck {
        ell,
        lattice_residual,
        orbit_residual,
        confirmed: lattice_ok,
    })
}

/// Smallest `n <= bound` with `sigma^n(p)` within [`ORBIT_TOLERANCE`] of
/// `p`. Each iterate is re-projected onto the curve to stop drift.
pub fn orbit_probe(curve: &CurveAnalytics, p: &CurvePoint, bound: usize) -> Result<Option<usize>, GroupError> {
    if bound > MAX_ORBIT_BOUND {
        return Err(GroupError::OrbitBound(bound));
    }
    let mut q = *p;
    for n in 1..=bound {
        q = curve.reproject(&curve.sigma(&q)?)?;
        if q.distance(p) < ORBIT_TOLERANCE {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupVerdict {
    Finite {
        k: u64,
        ell: u64,
        order_sigma: u64,
        order_group: u64,
    },
    InfinitePresumed {
        bound_checked: u64,
    },
}

impl GroupVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GroupReport {
    pub verdict: GroupVerdict,
    pub ratio: f64,
    /// Lattice residual of the confirmed order (0 when none was tried).
    pub residual: f64,
    pub order_check: Option<OrderCheck>,
    /// First return times of the orbit probe on the sampled points.
    pub orbit_returns: Vec<Option<usize>>,
    pub max_denominator: u64,
    pub tolerance: f64,
    pub caveat: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupConfig {
    pub max_denominator: u64,
    pub tolerance: f64,
    pub seed: u64,
    pub probe_samples: usize,
    pub curve: CurveConfig,
    pub exec: Execution,
}

impl Default for GroupConfig {
    fn default() -> Self {
        Self {
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            tolerance: DEFAULT_TOLERANCE,
            seed: 0,
            probe_samples: 4,
            curve: CurveConfig::default(),
            exec: Execution::default(),
        }
    }
}

pub fn group_report(model: &WeightedModel, config: &GroupConfig) -> Result<GroupReport, GroupError> {
    let curve = CurveAnalytics::new(model, &config.curve)?;
    group_report_for(&curve, config)
}

/// Reconstruction, lattice/orbit confirmation and orbit probe; the verdict
/// is Finite only when all three agree.
pub fn group_report_for(curve: &CurveAnalytics, config: &GroupConfig) -> Result<GroupReport, GroupError> {
    let ratio = curve.periods.ratio();
    let bound = config.max_denominator;
    let points = sample_points(curve, config.probe_samples, config.seed ^ 0x5eed);
    let probe = |m: usize| -> Result<Vec<Option<usize>>, GroupError> {
        map_slice(config.exec, &points, |(_, p)| orbit_probe(curve, p, m))
            .into_iter()
            .collect()
    };
    let presumed = GroupVerdict::InfinitePresumed { bound_checked: bound };
    let report = |verdict, residual, order_check, orbit_returns| GroupReport {
        verdict,
        ratio,
        residual,
        order_check,
        orbit_returns,
        max_denominator: bound,
        tolerance: config.tolerance,
        caveat: T_SPECIFIC_CAVEAT,
    };
    match reconstruct_rational(ratio, bound, config.tolerance) {
        Some((k, ell)) => {
            let check = confirm_order(curve, ell, config.tolerance, config.seed, config.exec)?;
            let returns = probe(ell as usize)?;
            let all_return = returns.iter().all(|r| *r == Some(ell as usize));
            let verdict = if check.confirmed && all_return {
                GroupVerdict::Finite {
                    k,
                    ell,
                    order_sigma: ell,
                    order_group: 2 * ell,
                }
            } else {
                presumed
            };
            Ok(report(verdict, check.lattice_residual, Some(check), returns))
        }
        None => {
            let returns = probe(bound as usize)?;
            if let Some(steps) = returns.iter().flatten().min() {
                return Err(GroupError::UnexplainedReturn { steps: *steps, bound });
            }
            Ok(report(presumed, 0.0, None, returns))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    #[test]
    fn reconstruction_examples() {
        assert_eq!(reconstruct_rational(0.499999999, 100, 1e-6), Some((1, 2)));
        assert_eq!(reconstruct_rational(0.6180339887, 50, 1e-10), None);
        assert_eq!(reconstruct_rational(0.3333333331, 100, 1e-8), Some((1, 3)));
        assert_eq!(reconstruct_rational(2.0 / 7.0, 200, 1e-12), Some((2, 7)));
        assert_eq!(reconstruct_rational(0.75, 3, 1e-12), None);
    }

    #[test]
    fn simple_walk_has_order_two() {
        let m = parse_model("d 1 0 = 1/4\nd -1 0 = 1/4\nd 0 1 = 1/4\nd 0 -1 = 1/4\nt = 1/2").unwrap();
        let curve = CurveAnalytics::new(&m, &CurveConfig::default()).unwrap();
        let exec = Execution::default();
        assert!(confirm_order(&curve, 2, 1e-9, 0, exec).unwrap().confirmed);
        assert!(!confirm_order(&curve, 3, 1e-9, 0, exec).unwrap().confirmed);
        let r = group_report_for(&curve, &GroupConfig::default()).unwrap();
        assert_eq!(
            r.verdict,
            GroupVerdict::Finite {
                k: 1,
                ell: 2,
                order_sigma: 2,
                order_group: 4
            }
        );
    }

    #[test]
    fn irrational_ratio_is_presumed_infinite() {
        let m = parse_model("d 1 0 = 1/5\nd -1 0 = 1/5\nd 0 1 = 1/5\nd 0 -1 = 1/5\nd 1 1 = 1/5\nt = 1/2").unwrap();
        let r = group_report(&m, &GroupConfig::default()).unwrap();
        assert_eq!(r.verdict, GroupVerdict::InfinitePresumed { bound_checked: 200 });
        assert!(r.orbit_returns.iter().all(Option::is_none));
    }
}
