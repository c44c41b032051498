//! The Weierstrass function of a period lattice, via nome series.
//!
//! For a basis `(w, w tau)` with `tau` in the fundamental domain of the
//! modular group, `q = e^{2 pi i tau}` has `|q| <= e^{-pi sqrt 3} < 0.005`
//! and, after reducing the argument into the period parallelogram centred
//! at the origin, every series below converges like `|q|^{n/2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("periods do not span a lattice (tau = {tau})")]
    DegenerateLattice { tau: Complex64 },
    #[error("argument {z} lies within {distance:e} of a lattice point")]
    Pole { z: Complex64, distance: f64 },
}

/// Relative distance to a lattice point below which `wp` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

const SERIES_EPS: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeContext {
    /// Generators as given: `(omega1, L * omega2)`.
    pub generators: (Complex64, Complex64),
    pub multiplier: u32,
    /// Reduced basis `(w, w tau)`.
    w: Complex64,
    wt: Complex64,
    tau: Complex64,
    q: Complex64,
    g2: Complex64,
    g3: Complex64,
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl LatticeContext {
    /// Lattice generated by `omega1` and `multiplier * omega2`.
    pub fn new(omega1: Complex64, omega2: Complex64, multiplier: u32) -> Result<Self, WeierstrassError> {
        let (g1, g2) = (omega1, omega2 * multiplier.max(1) as f64);
        let mut w = g2;
        let mut wt = g1;
        let tau = wt / w;
        if !(tau.im.abs() > 1e-14) || !tau.is_finite() {
            return Err(WeierstrassError::DegenerateLattice { tau });
        }
        if tau.im < 0.0 {
            wt = -wt;
        }
        for _ in 0..200 {
            let tau = wt / w;
            let n = tau.re.round();
            wt -= w * n;
            let tau = wt / w;
            if tau.norm() < 1.0 - 1e-15 {
                let old = w;
                w = wt;
                wt = -old;
            } else {
                break;
            }
        }
        let tau = wt / w;
        let q = (2.0 * PI * i() * tau).exp();
        let (e4, e6) = eisenstein(q);
        let k = 2.0 * PI / w;
        let g2_val = k.powi(4) / 12.0 * e4;
        let g3_val = k.powi(6) / 216.0 * e6;
        Ok(Self {
            generators: (g1, g2),
            multiplier: multiplier.max(1),
            w,
            wt,
            tau,
            q,
            g2: g2_val,
            g3: g3_val,
        })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        self.q
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    /// Representative of `z` modulo the lattice in the parallelogram
    /// `{a w + b w tau : |a|, |b| <= 1/2}`.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let r = z / self.w;
        let b = r.im / self.tau.im;
        let a = r.re - b * self.tau.re;
        let (a, b) = (a - a.round(), b - b.round());
        self.w * a + self.wt * b
    }

    /// Shared nome sums: returns `(v, regular part of wp, wp' series part)`.
    fn parts(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let zr = self.reduce(z);
        let v = PI * zr / self.w;
        let u = (2.0 * i() * v).exp();
        let ui = u.inv();
        let f = |x: Complex64| x / ((1.0 - x) * (1.0 - x));
        let g = |x: Complex64| x * (1.0 + x) / ((1.0 - x) * (1.0 - x) * (1.0 - x));
        let mut reg = Complex64::new(1.0 / 12.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        let mut qn = self.q;
        let mut n = 1.0;
        let spread = u.norm().max(ui.norm());
        loop {
            let (a, b) = (qn * u, qn * ui);
            reg += f(a) + f(b) - 2.0 * n * qn / (1.0 - qn);
            der += g(a) - g(b);
            if qn.norm() * spread.max(n) < SERIES_EPS || n > 200.0 {
                break;
            }
            qn *= self.q;
            n += 1.0;
        }
        let k = 2.0 * PI * i() / self.w;
        (v, k * k * reg, k * k * k * der)
    }

    /// `wp(z) = num / den` without overflow near the poles.
    pub fn wp_projective(&self, z: Complex64) -> (Complex64, Complex64) {
        let (v, reg, _) = self.parts(z);
        let s2 = v.sin() * v.sin();
        let c = PI / self.w;
        (c * c + reg * s2, s2)
    }

    fn check_pole(&self, z: Complex64) -> Result<(), WeierstrassError> {
        let distance = self.reduce(z).norm() / self.w.norm();
        if distance < POLE_TOLERANCE {
            Err(WeierstrassError::Pole { z, distance })
        } else {
            Ok(())
        }
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64, WeierstrassError> {
        self.check_pole(z)?;
        let (num, den) = self.wp_projective(z);
        Ok(num / den)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64, WeierstrassError> {
        self.check_pole(z)?;
        let (v, _, der) = self.parts(z);
        let c = PI / self.w;
        let s = v.sin();
        Ok(-2.0 * c * c * c * v.cos() / (s * s * s) + der)
    }

    /// Relative residual of `wp'^2 = 4 wp^3 - g2 wp - g3` at `z`.
    pub fn ode_residual(&self, z: Complex64) -> Result<f64, WeierstrassError> {
        let p = self.wp(z)?;
        let dp = self.wp_prime(z)?;
        let rhs = 4.0 * p * p * p - self.g2 * p - self.g3;
        let scale = (dp * dp).norm().max((4.0 * p * p * p).norm()).max(1.0);
        Ok((dp * dp - rhs).norm() / scale)
    }
}

/// `(E4(q), E6(q))` by their divisor-sum series.
fn eisenstein(q: Complex64) -> (Complex64, Complex64) {
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = q;
    let mut n = 1.0f64;
    while qn.norm() * n.powi(5) > SERIES_EPS {
        let r = qn / (1.0 - qn);
        e4 += 240.0 * n.powi(3) * r;
        e6 -= 504.0 * n.powi(5) * r;
        qn *= q;
        n += 1.0;
    }
    (e4, e6)
}
