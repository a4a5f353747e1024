//! RMS truncation-error estimates and parameter selection.

use std::f64::consts::PI;

use crate::error::{param, Error, Result};
use crate::fourier::fft::fft_size;
use crate::fourier::{plan_freespace, screening_pad, FreeSpaceOptions};
use crate::geometry::{PointCloud, Strengths};
use crate::kernels::{KernelParams, Setting};
use crate::specfun::{k0, k1};

/// Sums of squared strengths entering the estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SystemMoments {
    pub q_g: f64,
    pub q_h: f64,
    pub n: usize,
    pub box_length: f64,
}

impl SystemMoments {
    pub fn from_cloud(cloud: &PointCloud, box_length: f64) -> Self {
        let (q_g, q_h) = match &cloud.strengths {
            Strengths::Scalar(_) => (cloud.strengths.sum_of_squares(), 0.0),
            Strengths::Vector(_) => (0.0, cloud.strengths.sum_of_squares()),
        };
        SystemMoments {
            q_g,
            q_h,
            n: cloud.len(),
            box_length,
        }
    }
}

pub fn est_real_g(rc: f64, xi: f64, l: f64, q: f64) -> f64 {
    (PI * q * (-2.0 * rc * rc * xi * xi).exp() / (4.0 * l * l * xi.powi(6) * rc.powi(4))).sqrt()
}

pub fn est_real_h(rc: f64, xi: f64, alpha: f64, l: f64, q: f64) -> f64 {
    (PI * q * (-2.0 * rc * rc * xi * xi).exp() / (l * l * alpha * alpha * rc * rc * xi * xi)).sqrt()
}

#[inline]
fn k_screen(k: f64, xi: f64, alpha: f64) -> f64 {
    (-2.0 * (alpha * alpha + k * k) / (4.0 * xi * xi)).exp()
}

pub fn est_k_g(k: f64, xi: f64, alpha: f64, l: f64, q: f64) -> f64 {
    let s = alpha * alpha + k * k;
    (512.0 * q * PI.powi(3) * xi.powi(4) * k_screen(k, xi, alpha) / (l.powi(5) * s * s * k)).sqrt()
}

/// The constant is 256 pi^3: the H error integrand is the G one times
/// k khat_j / alpha, with khat_j ~ 1/sqrt(2), averaged over the same disc.
pub fn est_k_h(k: f64, xi: f64, alpha: f64, l: f64, q: f64) -> f64 {
    let s = alpha * alpha + k * k;
    (256.0 * PI.powi(3) * q * k * xi.powi(4) * k_screen(k, xi, alpha)
        / (l.powi(5) * alpha * alpha * s * s))
        .sqrt()
}

pub fn est_k_g_free(k: f64, xi: f64, alpha: f64, l: f64, radius: f64, q: f64) -> f64 {
    let s = alpha * alpha + k * k;
    let ar = alpha * radius;
    let bracket = 1.0 / (2.0 * PI * k).sqrt()
        - alpha * k0(ar) / (radius.sqrt() * PI)
        - alpha * radius.sqrt() * k1(ar) / (PI * k);
    (64.0 * q * xi.powi(4) / (l * s * s) * k_screen(k, xi, alpha) * bracket * bracket).sqrt()
}

pub fn est_k_h_free(k: f64, xi: f64, alpha: f64, l: f64, radius: f64, q: f64) -> f64 {
    let s = alpha * alpha + k * k;
    let ar = alpha * radius;
    let bracket = (2.0 * PI * k).sqrt()
        - 8.0 * alpha * k0(ar) * k / radius.sqrt()
        - 2.0 * alpha * radius.sqrt() * k1(ar);
    (8.0 * q * xi * xi / (l * PI * PI * alpha * alpha) * k_screen(k, xi, alpha) / (s * s)
        * bracket
        * bracket)
        .sqrt()
}

/// The real-space estimates assume r_c xi >= 1.
pub fn real_regime_ok(rc: f64, xi: f64) -> bool {
    rc * xi >= 1.0
}

/// The k-space estimates assume k_inf >= 2 xi.
pub fn k_regime_ok(k: f64, xi: f64) -> bool {
    k >= 2.0 * xi
}

/// Largest real-space estimate over the kernels present in `m`.
pub fn real_estimate(rc: f64, xi: f64, alpha: f64, m: &SystemMoments) -> f64 {
    est_real_g(rc, xi, m.box_length, m.q_g).max(est_real_h(rc, xi, alpha, m.box_length, m.q_h))
}

/// Largest k-space estimate; `radius` selects the free-space forms.
pub fn k_estimate(k: f64, xi: f64, alpha: f64, m: &SystemMoments, radius: Option<f64>) -> f64 {
    let l = m.box_length;
    match radius {
        None => est_k_g(k, xi, alpha, l, m.q_g).max(est_k_h(k, xi, alpha, l, m.q_h)),
        Some(r) => {
            est_k_g_free(k, xi, alpha, l, r, m.q_g).max(est_k_h_free(k, xi, alpha, l, r, m.q_h))
        }
    }
}

/// Smallest x in [lo, hi] with f(x) <= 0 for f decreasing, by bisection in
/// log x. Returns None if f(hi) > 0.
fn bisect_log(lo: f64, hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> Option<f64> {
    if f(lo) <= 0.0 {
        return Some(lo);
    }
    if f(hi) > 0.0 {
        return None;
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..iters {
        let mid = 0.5 * (a + b);
        if f(mid.exp()) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(b.exp())
}

fn log_excess(v: f64, tol: f64) -> f64 {
    if v <= 0.0 {
        f64::NEG_INFINITY
    } else {
        v.ln() - tol.ln()
    }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if !(tol > 1e-14 && tol < 1e-1) {
        return param(format!("tolerance {tol} outside (1e-14, 1e-1)"));
    }
    Ok(())
}

/// Smallest xi in [0.1/r_c, 100/r_c] meeting `tol` in real space.
pub fn xi_for_rc(tol: f64, rc: f64, alpha: f64, m: &SystemMoments) -> Result<f64> {
    bisect_log(0.1 / rc, 100.0 / rc, 60, |xi| {
        log_excess(real_estimate(rc, xi, alpha, m), tol)
    })
    .ok_or_else(|| {
        Error::Tuning(format!(
            "no xi in [{}, {}] meets tolerance {tol} at r_c = {rc}",
            0.1 / rc,
            100.0 / rc
        ))
    })
}

/// Smallest r_c in [0.1/xi, 30/xi] meeting `tol` in real space.
pub fn rc_for_xi(tol: f64, xi: f64, alpha: f64, m: &SystemMoments) -> Result<f64> {
    bisect_log(0.1 / xi, 30.0 / xi, 60, |rc| {
        log_excess(real_estimate(rc, xi, alpha, m), tol)
    })
    .ok_or_else(|| Error::Tuning(format!("no cutoff meets tolerance {tol} at xi = {xi}")))
}

/// Mollification radius assumed by the free-space estimates before the
/// grid is known.
pub fn nominal_radius(alpha: f64, xi: f64, l: f64, tol: f64) -> f64 {
    let p = KernelParams {
        alpha,
        xi,
        box_length: l,
    };
    std::f64::consts::SQRT_2 * (l + screening_pad(&p, tol))
}

/// Smallest k_inf meeting `tol` in k-space at `xi`.
pub fn k_inf_for_xi(
    tol: f64,
    xi: f64,
    alpha: f64,
    m: &SystemMoments,
    setting: Setting,
) -> Result<f64> {
    let radius = match setting {
        Setting::Periodic => None,
        Setting::Free => Some(nominal_radius(alpha, xi, m.box_length, tol)),
    };
    let lo = (0.5 * xi).max(alpha).max(2.0 * PI / m.box_length);
    bisect_log(lo, 200.0 * xi.max(alpha), 60, |k| {
        log_excess(k_estimate(k, xi, alpha, m, radius), tol)
    })
    .ok_or_else(|| Error::Tuning(format!("no k_inf meets tolerance {tol} at xi = {xi}")))
}

/// Periodic grid size for a physical k_inf on a box of side `side`.
pub fn grid_size_for(k_inf: f64, side: f64) -> usize {
    // Nyquist is zeroed, so |kappa| <= M/2 - 1 must cover k_inf L / 2 pi
    let kmax = (k_inf * side / (2.0 * PI) + 1e-9).floor() as usize;
    fft_size(2 * kmax + 2)
}

/// Cutoff enclosing on average `neighbors` points of a uniform density.
pub fn rc_for_neighbors(neighbors: f64, n: usize, side: f64) -> f64 {
    side * (neighbors / (PI * n.max(1) as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tuned {
    pub xi: f64,
    pub rc: f64,
    pub k_inf: f64,
    /// Periodic: the FFT grid. Free space: the data grid of the plan.
    pub grid: usize,
    /// Estimates at the chosen parameters.
    pub real_estimate: f64,
    pub k_estimate: f64,
    pub diagnostics: Vec<String>,
}

/// Picks xi from the real-space estimates at `rc`, then k_inf and the grid.
pub fn tune(
    tol: f64,
    rc: f64,
    alpha: f64,
    m: &SystemMoments,
    setting: Setting,
    p: usize,
) -> Result<Tuned> {
    check_tolerance(tol)?;
    if !(rc > 0.0) {
        return param(format!("cutoff must be positive, got {rc}"));
    }
    let xi = xi_for_rc(tol, rc, alpha, m)?;
    finish(tol, xi, rc, alpha, m, setting, p)
}

/// Like [`tune`] with xi fixed and r_c chosen from it.
pub fn tune_for_xi(
    tol: f64,
    xi: f64,
    alpha: f64,
    m: &SystemMoments,
    setting: Setting,
    p: usize,
) -> Result<Tuned> {
    check_tolerance(tol)?;
    let rc = rc_for_xi(tol, xi, alpha, m)?;
    finish(tol, xi, rc, alpha, m, setting, p)
}

fn finish(
    tol: f64,
    xi: f64,
    rc: f64,
    alpha: f64,
    m: &SystemMoments,
    setting: Setting,
    p: usize,
) -> Result<Tuned> {
    let k_inf = k_inf_for_xi(tol, xi, alpha, m, setting)?;
    let l = m.box_length;
    let (grid, radius) = match setting {
        Setting::Periodic => (grid_size_for(k_inf, l), None),
        Setting::Free => {
            let params = KernelParams::new(alpha, xi, l)?;
            let opts = FreeSpaceOptions {
                tolerance: tol,
                ..Default::default()
            };
            let plan = plan_freespace(&params, k_inf, p, &opts)?;
            (plan.m, Some(plan.moll.radius))
        }
    };
    let mut diagnostics = Vec::new();
    if !real_regime_ok(rc, xi) {
        diagnostics.push(format!(
            "real-space estimate out of regime: r_c xi = {:.3} < 1",
            rc * xi
        ));
    }
    if !k_regime_ok(k_inf, xi) {
        diagnostics.push(format!(
            "k-space estimate out of regime: k_inf = {k_inf:.3} < 2 xi"
        ));
    }
    Ok(Tuned {
        xi,
        rc,
        k_inf,
        grid,
        real_estimate: real_estimate(rc, xi, alpha, m),
        k_estimate: k_estimate(k_inf, xi, alpha, m, radius),
        diagnostics,
    })
}
