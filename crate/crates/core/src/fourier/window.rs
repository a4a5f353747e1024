//! Truncated Gaussian window w(x) = exp(-eta x^2/w^2) on |x| <= w = p h/2,
//! applied as a tensor product in two dimensions.

use std::f64::consts::PI;

use crate::error::{param, Result};
use crate::vec2::Vec2;

/// Default shape: 0.95^2 pi p / 2.
pub fn default_eta(p: usize) -> f64 {
    0.95 * 0.95 * PI * p as f64 / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowConfig {
    pub p: usize,
    pub eta: f64,
    pub h: f64,
}

impl WindowConfig {
    pub fn new(p: usize, h: f64) -> Result<Self> {
        Self::with_eta(p, default_eta(p), h)
    }

    pub fn with_eta(p: usize, eta: f64, h: f64) -> Result<Self> {
        if p < 2 || !p.is_multiple_of(2) {
            return param(format!("window support p must be even and >= 2, got {p}"));
        }
        if !(eta > 0.0 && eta.is_finite()) || !(h > 0.0 && h.is_finite()) {
            return param(format!("window needs eta > 0 and h > 0 (eta {eta}, h {h})"));
        }
        Ok(WindowConfig { p, eta, h })
    }

    /// Half-width p h / 2.
    #[inline]
    pub fn half_width(&self) -> f64 {
        0.5 * self.p as f64 * self.h
    }

    pub fn eval_1d(&self, x: f64) -> f64 {
        let w = self.half_width();
        if x.abs() > w {
            0.0
        } else {
            (-self.eta * (x / w) * (x / w)).exp()
        }
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        self.eval_1d(x.x) * self.eval_1d(x.y)
    }

    /// Transform of the untruncated Gaussian, sqrt(pi w^2/eta) e^{-w^2 k^2/(4 eta)}.
    pub fn hat_1d(&self, k: f64) -> f64 {
        let w = self.half_width();
        (PI * w * w / self.eta).sqrt() * (-w * w * k * k / (4.0 * self.eta)).exp()
    }

    pub fn hat(&self, k: Vec2) -> f64 {
        self.hat_1d(k.x) * self.hat_1d(k.y)
    }

    /// First stencil index and the p weights for a coordinate `u` measured
    /// in grid units from the grid origin.
    #[inline]
    pub(crate) fn stencil(&self, u: f64, weights: &mut [f64]) -> i64 {
        let half = (self.p / 2) as i64;
        let i0 = u.floor() as i64 - half + 1;
        let c = self.eta / (half * half) as f64;
        for (j, w) in weights.iter_mut().enumerate() {
            let d = u - (i0 + j as i64) as f64;
            *w = if d.abs() > half as f64 {
                0.0
            } else {
                (-c * d * d).exp()
            };
        }
        i0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_boundary_symmetry() {
        let w = WindowConfig::new(24, 0.1).unwrap();
        assert_eq!(w.eval(Vec2::ZERO), 1.0);
        let om = w.half_width();
        assert!((w.eval_1d(om) - (-w.eta).exp()).abs() < 1e-30);
        assert_eq!(w.eval_1d(om * (1.0 + 1e-12)), 0.0);
        let x = Vec2::new(0.3, -0.77);
        assert_eq!(w.eval(x), w.eval(-x));
    }

    #[test]
    fn hat_values() {
        let w = WindowConfig::new(16, 0.2).unwrap();
        let om = w.half_width();
        assert!((w.hat_1d(0.0) - (PI * om * om / w.eta).sqrt()).abs() < 1e-15);
        let k = 3.3;
        assert!(
            (w.hat_1d(k) / w.hat_1d(0.0) - (-om * om * k * k / (4.0 * w.eta)).exp()).abs() < 1e-15
        );
    }

    #[test]
    fn sampled_transform_matches_analytic() {
        // fine trapezoidal transform of the truncated window
        let w = WindowConfig::new(24, 0.05).unwrap();
        let om = w.half_width();
        let n = 20_000;
        let dx = 2.0 * om / n as f64;
        for &k in &[0.0, 5.0, 20.0, 40.0] {
            let s: f64 = (0..=n)
                .map(|i| {
                    let x = -om + i as f64 * dx;
                    let c = if i == 0 || i == n { 0.5 } else { 1.0 };
                    c * w.eval_1d(x) * (k * x).cos()
                })
                .sum::<f64>()
                * dx;
            let a = w.hat_1d(k);
            assert!(((s - a) / a).abs() < 1e-9, "k={k}: {s} vs {a}");
        }
    }

    #[test]
    fn stencil_matches_eval() {
        let w = WindowConfig::new(8, 0.25).unwrap();
        let mut wt = [0.0; 8];
        let u = 13.37;
        let i0 = w.stencil(u, &mut wt);
        assert_eq!(i0, 13 - 4 + 1);
        for (j, v) in wt.iter().enumerate() {
            let x = (u - (i0 + j as i64) as f64) * w.h;
            assert!((v - w.eval_1d(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_odd_support() {
        assert!(WindowConfig::new(7, 0.1).is_err());
        assert!(WindowConfig::new(0, 0.1).is_err());
    }
}
