//! Yukawa kernels G(r) = K0(a|r|) and H(r) = K1(a|r|) r/|r|, their Ewald
//! real-space parts, Fourier multipliers and self-interaction terms.
//!
//! Separations are always `r = x - y` (target minus source). Fourier
//! multipliers follow the transform convention `A(k) = int A(r) e^{-ik.r} dr`;
//! vector multipliers of H are purely imaginary and are returned as the real
//! vector of their imaginary parts.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{param, Error, Result};
use crate::specfun::{en, inc_k, j1, k0, k01, k1, one_minus_j0, one_minus_x_k1};
use crate::vec2::Vec2;

/// The two summed kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// K0(a r), scalar strengths.
    G,
    /// K1(a r) r/|r|, vector strengths contracted with the kernel.
    H,
}

/// Boundary conditions of the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Setting {
    Periodic,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub alpha: f64,
    pub xi: f64,
    pub box_length: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, xi: f64, box_length: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("xi", xi), ("box length", box_length)] {
            if !(v > 0.0 && v.is_finite()) {
                return param(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(KernelParams {
            alpha,
            xi,
            box_length,
        })
    }

    /// alpha^2 / (4 xi^2), the second argument of the incomplete Bessel
    /// functions.
    #[inline]
    pub fn omega(&self) -> f64 {
        self.alpha * self.alpha / (4.0 * self.xi * self.xi)
    }
}

/// Truncation of the free-space Green's function at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollification {
    pub radius: f64,
    pub extended_side: f64,
}

impl Mollification {
    /// R = sqrt(2) * L~.
    pub fn from_extended_side(extended_side: f64) -> Result<Self> {
        if !(extended_side > 0.0 && extended_side.is_finite()) {
            return param(format!(
                "extended side must be positive, got {extended_side}"
            ));
        }
        Ok(Mollification {
            radius: SQRT_2 * extended_side,
            extended_side,
        })
    }
}

fn singular(what: &str) -> Error {
    Error::Singularity(format!("{what} evaluated at zero separation"))
}

pub fn g_direct(r: f64, p: &KernelParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(singular("G"));
    }
    Ok(k0(p.alpha * r))
}

pub fn h_direct(r: Vec2, p: &KernelParams) -> Result<Vec2> {
    let n = r.norm();
    if !(n > 0.0) {
        return Err(singular("H"));
    }
    Ok(r * (k1(p.alpha * n) / n))
}

pub fn g_real(r: f64, p: &KernelParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(singular("G real part"));
    }
    Ok(g_real_raw(r * r, p))
}

pub fn h_real(r: Vec2, p: &KernelParams) -> Result<Vec2> {
    let r2 = r.norm2();
    if !(r2 > 0.0) {
        return Err(singular("H real part"));
    }
    Ok(r * h_real_factor(r2, p))
}

/// G^R as a function of r^2.
#[inline]
pub(crate) fn g_real_raw(r2: f64, p: &KernelParams) -> f64 {
    0.5 * inc_k(0, r2 * p.xi * p.xi, p.omega())
}

/// H^R(r) = r * h_real_factor(|r|^2).
#[inline]
pub(crate) fn h_real_factor(r2: f64, p: &KernelParams) -> f64 {
    let xi2 = p.xi * p.xi;
    xi2 / p.alpha * inc_k(-1, r2 * xi2, p.omega())
}

/// lim_{r->0} (G^R(r) - G(r)) = -E1(a^2/4xi^2)/2.
pub fn g_self(p: &KernelParams) -> f64 {
    -0.5 * en(1, p.omega())
}

pub fn h_self(_p: &KernelParams) -> Vec2 {
    Vec2::ZERO
}

/// Screening factor e^{-(a^2+k^2)/4xi^2}.
#[inline]
fn screen(k2: f64, p: &KernelParams) -> f64 {
    (-(p.alpha * p.alpha + k2) / (4.0 * p.xi * p.xi)).exp()
}

pub fn g_fourier_periodic(k: f64, p: &KernelParams) -> Result<f64> {
    if !(k >= 0.0) {
        return param(format!("wavenumber must be >= 0, got {k}"));
    }
    Ok(g_fourier_periodic_raw(k, p))
}

#[inline]
pub(crate) fn g_fourier_periodic_raw(k: f64, p: &KernelParams) -> f64 {
    let s = p.alpha * p.alpha + k * k;
    2.0 * PI / s * screen(k * k, p)
}

/// Imaginary parts of H^F(k) = (-i k/a) G^F(k).
pub fn h_fourier_periodic(k: Vec2, p: &KernelParams) -> Vec2 {
    k * (-g_fourier_periodic_raw(k.norm(), p) / p.alpha)
}

/// Bracket 1 + a k J1(kR) K0(aR) - aR J0(kR) K1(aR), regrouped as
/// (1 - aR K1) + aR K1 (1 - J0) + a k J1 K0 so small k and small a do not
/// cancel.
pub(crate) fn mollified_bracket(k: f64, alpha: f64, radius: f64) -> f64 {
    let ar = alpha * radius;
    let (k0r, k1r) = k01(ar);
    let kr = k * radius;
    one_minus_x_k1(ar) + ar * k1r * one_minus_j0(kr) + kr * j1(kr) * k0r
}

pub fn g_fourier_freespace(k: f64, p: &KernelParams, m: Mollification) -> Result<f64> {
    if !(k >= 0.0) {
        return param(format!("wavenumber must be >= 0, got {k}"));
    }
    Ok(g_fourier_freespace_raw(k, p, m))
}

#[inline]
pub(crate) fn g_fourier_freespace_raw(k: f64, p: &KernelParams, m: Mollification) -> f64 {
    g_fourier_periodic_raw(k, p) * mollified_bracket(k, p.alpha, m.radius)
}

/// Imaginary parts of (-i k/a) G^{F,R}(k).
pub fn h_fourier_freespace(k: Vec2, p: &KernelParams, m: Mollification) -> Vec2 {
    k * (-g_fourier_freespace_raw(k.norm(), p, m) / p.alpha)
}
