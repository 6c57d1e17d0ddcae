//! Zolotarev's integral representation of the stable law on a finite
//! angular interval.
//!
//! With `theta0 = atan(beta * tan(pi alpha / 2)) / alpha` and the angle
//! measured from the right end, `phi = pi/2 - theta`, the survival function
//! and density of `Z` at `z > 0` are
//!
//! ```text
//! P(Z > z) = 1/pi * int_0^phi_max exp(-g(phi)) dphi
//! f(z)     = alpha / (pi (alpha - 1) z) * int_0^phi_max g(phi) exp(-g(phi)) dphi
//! g(phi)   = z^(alpha/(alpha-1)) V(phi),  phi_max = pi/2 + theta0
//! ```
//!
//! `g` increases monotonically from 0 to infinity, so both integrands are
//! concentrated around the point where `g = 1`; the quadrature is split there.
//! Negative arguments use `Z(beta) = -Z(-beta)`.

use core::f64::consts::{FRAC_PI_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::quad::{integrate_points, QuadConfig};
use crate::roots::brent;

pub(crate) const INNER: QuadConfig = QuadConfig {
    abs_tol: 1e-300,
    rel_tol: 1e-13,
    max_intervals: 400,
};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Zolotarev {
    alpha: f64,
    theta0: f64,
    phi_max: f64,
    /// `alpha / (alpha - 1)`
    expo: f64,
    ln_cos_base: f64,
}

impl Zolotarev {
    pub(crate) fn new(alpha: f64, beta: f64) -> Self {
        let beta = if alpha == 2.0 { 0.0 } else { beta };
        let zeta = beta * (PI * alpha / 2.0).tan();
        let theta0 = zeta.atan() / alpha;
        Self {
            alpha,
            theta0,
            phi_max: FRAC_PI_2 + theta0,
            expo: alpha / (alpha - 1.0),
            ln_cos_base: (alpha * theta0).cos().ln() / (alpha - 1.0),
        }
    }

    pub(crate) fn theta0(&self) -> f64 {
        self.theta0
    }

    /// `ln V` at angle `phi`, with `phi_c = phi_max - phi` supplied separately
    /// so that both ends keep full relative precision.
    fn ln_v(&self, phi: f64, phi_c: f64) -> f64 {
        let a = self.alpha;
        self.ln_cos_base + phi.sin().ln() / (a - 1.0) - self.expo * (a * phi_c).sin().ln()
            + (a * self.theta0 + (a - 1.0) * (FRAC_PI_2 - phi)).cos().ln()
    }

    fn ln_g(&self, ln_z: f64, phi: f64) -> f64 {
        self.expo * ln_z + self.ln_v(phi, self.phi_max - phi)
    }

    /// Angle where `g = 1`, or `None` when `g` stays on one side of 1.
    fn peak(&self, ln_z: f64) -> Option<f64> {
        // Logistic coordinate: phi = phi_max / (1 + e^-s), phi_c = phi_max / (1 + e^s).
        let h = |s: f64| {
            let phi = self.phi_max / (1.0 + (-s).exp());
            let phi_c = self.phi_max / (1.0 + s.exp());
            self.expo * ln_z + self.ln_v(phi, phi_c)
        };
        let (lo, hi) = (-600.0, 36.0);
        let (h_lo, h_hi) = (h(lo), h(hi));
        if !(h_lo < 0.0 && h_hi > 0.0) {
            return None;
        }
        let s = brent(h, lo, hi, 1e-12, "zolotarev peak").ok()?;
        Some(self.phi_max / (1.0 + (-s).exp()))
    }

    fn breakpoints(&self, ln_z: f64) -> ([f64; 10], usize) {
        let mut pts = [0.0; 10];
        let mut n = 0;
        pts[n] = 0.0;
        n += 1;
        if let Some(p) = self.peak(ln_z) {
            for &m in &[0.25, 0.5, 1.0, 2.0, 4.0, 16.0, 64.0] {
                let x = p * m;
                if x > pts[n - 1] && x < self.phi_max {
                    pts[n] = x;
                    n += 1;
                }
            }
        }
        pts[n] = self.phi_max;
        n += 1;
        (pts, n)
    }

    /// `P(Z > z)` for `z > 0`.
    pub(crate) fn survival(&self, z: f64) -> f64 {
        debug_assert!(z > 0.0);
        let ln_z = z.ln();
        let (pts, n) = self.breakpoints(ln_z);
        let r = integrate_points(
            |phi| {
                if phi <= 0.0 || phi >= self.phi_max {
                    return if phi <= 0.0 && self.alpha < 2.0 { 1.0 } else { 0.0 };
                }
                let lg = self.ln_g(ln_z, phi);
                (-lg.exp()).exp()
            },
            &pts[..n],
            &INNER,
        );
        (r.value / PI).clamp(0.0, 1.0)
    }

    /// Density at `z > 0`.
    pub(crate) fn density(&self, z: f64) -> f64 {
        debug_assert!(z > 0.0);
        let ln_z = z.ln();
        let (pts, n) = self.breakpoints(ln_z);
        let r = integrate_points(
            |phi| {
                if phi <= 0.0 || phi >= self.phi_max {
                    return 0.0;
                }
                let lg = self.ln_g(ln_z, phi);
                (lg - lg.exp()).exp()
            },
            &pts[..n],
            &INNER,
        );
        (self.alpha / (PI * (self.alpha - 1.0) * z) * r.value).max(0.0)
    }
}
