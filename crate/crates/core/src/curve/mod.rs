//! Analytic geometry of the elliptic kernel curve.
//!
//! [`CurveAnalytics::new`] runs the whole construction for a nondegenerate
//! elliptic model: certified branch points of both discriminants, the
//! periods `w1, w2, w3`, the period lattice with its Weierstrass function,
//! and the uniformization `Lambda`. The QRT map and the involutions act on
//! curve points directly and, through the lifts `-w`, `w3 - w`, `w + w3`,
//! on the uniformization plane.

pub mod involution;
pub mod periods;
pub mod projective;
pub mod quadrature;
pub mod roots;
pub mod uniformization;
pub mod weierstrass;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::kernel::{
    build_kernel, degeneracy_test, discriminant, genus_classify, Axis, HalfPlaneClass, KernelError, KernelPolynomial,
    QuarticDiscriminant,
};
use crate::model::WeightedModel;

pub use involution::KernelCoeffs;
pub use periods::Periods;
pub use projective::{CurvePoint, ProjectivePoint};
pub use roots::{BranchPoint, BranchPoints};
pub use uniformization::{AxisUniformization, UniformizationData};
pub use weierstrass::{LatticeContext, WeierstrassError};

/// Default working precision, in bits, for exact root bisection.
pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// Largest accepted relative mismatch between the nome-series invariants
/// and those predicted by the discriminant expansions.
pub const INVARIANT_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("kernel: {0}")]
    Kernel(#[from] KernelError),
    #[error("model is degenerate; the kernel curve is not elliptic")]
    Degenerate,
    #[error("step set lies in a half-plane ({class:?}); the kernel curve has genus zero")]
    NotElliptic { class: HalfPlaneClass },
    #[error("branch points of Delta_{}: {reason}", axis_index(*.axis))]
    BranchPoints { axis: Axis, reason: String },
    #[error("discriminant has the wrong sign on the arc from {from} to {to}")]
    ContourSign { from: f64, to: f64 },
    #[error("period quadrature did not converge (relative change {change:e} under step halving)")]
    Quadrature { change: f64 },
    #[error("omega3: {reason}")]
    Omega3 { reason: String },
    #[error("lattice: {0}")]
    Lattice(#[from] WeierstrassError),
    #[error("lattice invariants disagree with the discriminant expansion (relative mismatch {mismatch:e})")]
    Invariants { mismatch: f64 },
    #[error("point is off the kernel curve (normalized residual {residual:e})")]
    OffCurve { residual: f64 },
}

fn axis_index(axis: Axis) -> u8 {
    match axis {
        Axis::X => 1,
        Axis::Y => 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveConfig {
    /// Width `2^-bits` of the exact root brackets; also sets the
    /// quadrature tolerance (clamped to what f64 can resolve).
    pub precision_bits: u32,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl CurveConfig {
    pub fn with_precision(bits: u32) -> Self {
        Self {
            precision_bits: bits.clamp(16, 1024),
        }
    }

    pub fn quadrature_tolerance(&self) -> f64 {
        (2f64).powi(-(self.precision_bits.min(50) as i32))
    }
}

/// Everything computed about the kernel curve of one model.
#[derive(Debug, Clone)]
pub struct CurveAnalytics {
    pub model: WeightedModel,
    pub kernel: KernelPolynomial,
    pub delta1: QuarticDiscriminant,
    pub delta2: QuarticDiscriminant,
    pub branch: BranchPoints,
    pub periods: Periods,
    pub lattice: LatticeContext,
    pub uniformization: UniformizationData,
    /// Relative mismatch of `(g2, g3)` between the nome series and both
    /// discriminant expansions.
    pub invariant_mismatch: f64,
    pub config: CurveConfig,
    coeffs: KernelCoeffs,
}

impl CurveAnalytics {
    pub fn new(model: &WeightedModel, config: &CurveConfig) -> Result<Self, CurveError> {
        if degeneracy_test(model).degenerate {
            return Err(CurveError::Degenerate);
        }
        let genus = genus_classify(model.step_set());
        if genus.class != HalfPlaneClass::Elliptic {
            return Err(CurveError::NotElliptic { class: genus.class });
        }
        let kernel = build_kernel(model);
        let delta1 = discriminant(&kernel, Axis::X)?;
        let delta2 = discriminant(&kernel, Axis::Y)?;
        let branch = BranchPoints {
            a: roots::real_projective_roots(&delta1, config.precision_bits)?,
            b: roots::real_projective_roots(&delta2, config.precision_bits)?,
        };
        let coeffs = kernel.coeffs_f64();
        let periods = periods::compute_periods(&delta1, &branch.a, &branch.b, &coeffs, config.quadrature_tolerance())?;
        let lattice = LatticeContext::new(periods.omega1, Complex64::new(periods.omega2, 0.0), 1)?;
        let uniformization = UniformizationData {
            x: AxisUniformization::new(&delta1, &branch.a[3]),
            y: AxisUniformization::new(&delta2, &branch.b[3]),
            y_shift: periods.omega3 / 2.0,
        };
        let invariant_mismatch = [(&delta1, &branch.a[3]), (&delta2, &branch.b[3])]
            .into_iter()
            .map(|(d, r)| {
                let (g2, g3) = uniformization::invariants_from_expansion(AxisUniformization::expansion(d, r));
                // Compare at the natural scale of the lattice: g2 ~ s^2, g3 ~ s^3.
                let s = g2.abs().sqrt().max(g3.abs().cbrt()).max(f64::MIN_POSITIVE);
                let e2 = (lattice.g2() - g2).norm() / (s * s);
                let e3 = (lattice.g3() - g3).norm() / (s * s * s);
                e2.max(e3)
            })
            .fold(0.0, f64::max);
        if !(invariant_mismatch <= INVARIANT_TOLERANCE) {
            return Err(CurveError::Invariants {
                mismatch: invariant_mismatch,
            });
        }
        Ok(Self {
            model: model.clone(),
            kernel,
            delta1,
            delta2,
            branch,
            periods,
            lattice,
            uniformization,
            invariant_mismatch,
            config: *config,
            coeffs,
        })
    }

    pub fn kernel_coeffs(&self) -> &KernelCoeffs {
        &self.coeffs
    }

    pub fn omega1(&self) -> Complex64 {
        self.periods.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.periods.omega2
    }

    pub fn omega3(&self) -> f64 {
        self.periods.omega3
    }

    pub fn x_at(&self, w: Complex64) -> ProjectivePoint {
        uniformization::uniformize_x(w, &self.uniformization, &self.lattice)
    }

    pub fn y_at(&self, w: Complex64) -> ProjectivePoint {
        uniformization::uniformize_y(w, &self.uniformization, &self.lattice)
    }

    /// `Lambda(w) = (x(w), y(w))`.
    pub fn point(&self, w: Complex64) -> CurvePoint {
        uniformization::uniformize(w, &self.uniformization, &self.lattice)
    }

    /// Normalized `|K̄|` at a point of `P^1 x P^1`.
    pub fn residual(&self, p: &CurvePoint) -> f64 {
        involution::residual(&self.coeffs, p)
    }

    pub fn involution1(&self, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
        involution::involution1(&self.coeffs, p)
    }

    pub fn involution2(&self, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
        involution::involution2(&self.coeffs, p)
    }

    pub fn sigma(&self, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
        involution::sigma(&self.coeffs, p)
    }

    pub fn reproject(&self, p: &CurvePoint) -> Result<CurvePoint, CurveError> {
        involution::reproject(&self.coeffs, p)
    }

    /// Lift of `i1`: `w -> -w`.
    pub fn lift_iota1(&self, w: Complex64) -> Complex64 {
        -w
    }

    /// Lift of `i2`: `w -> w3 - w`.
    pub fn lift_iota2(&self, w: Complex64) -> Complex64 {
        self.omega3() - w
    }

    /// Lift of `sigma`: `w -> w + w3`.
    pub fn lift_sigma(&self, w: Complex64) -> Complex64 {
        w + self.omega3()
    }

    /// Uniform point of the fundamental parallelogram `[0,1) w2 + [0,1) w1`.
    pub fn sample_omega<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        self.omega2() * u + self.omega1() * v
    }
}
