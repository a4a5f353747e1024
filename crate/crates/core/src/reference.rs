//! Slow, independent oracles used to validate the production paths.
//!
//! Nothing here shares code with the production evaluation of the incomplete
//! Bessel functions, the exponential integrals or the spectral engine. The
//! k-space sums use the ordinary Bessel functions from `specfun` only for the
//! free-space multiplier bracket.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Strengths};
use crate::kernels::{self, Kernel, KernelParams, Mollification};
use crate::vec2::Vec2;

/// Result of an oracle computation.
#[derive(Clone, Copy, Debug)]
pub struct OracleReport {
    pub value: f64,
    /// Sum of the local Richardson error estimates.
    pub error: f64,
    pub converged: bool,
}

const MAX_DEPTH: u32 = 48;

struct Simpson<'a> {
    f: &'a mut dyn FnMut(f64) -> f64,
    // absolute sample noise of the integrand
    noise: f64,
    error: f64,
    converged: bool,
}

impl Simpson<'_> {
    // The width `h` is carried separately and halved exactly; the sample
    // positions are the only rounded quantities.
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        h: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let half = 0.5 * h;
        let flm = (self.f)(a + 0.5 * half);
        let frm = (self.f)(a + 1.5 * half);
        let left = half / 6.0 * (fa + 4.0 * flm + fm);
        let right = half / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        // rounding floor relative to the magnitude of the panel
        let scale = h / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs());
        if diff.abs() <= 15.0 * tol.max(8.0 * f64::EPSILON * scale).max(self.noise * h) {
            self.error += diff.abs() / 15.0;
            return left + right + diff / 15.0;
        }
        if depth >= MAX_DEPTH {
            self.converged = false;
            self.error += diff.abs() / 15.0;
            return left + right + diff / 15.0;
        }
        self.recurse(a, half, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.recurse(a + half, half, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive Simpson quadrature with Richardson acceptance over consecutive
/// panels `breaks`. `tol` is the absolute tolerance for the whole range.
pub fn adaptive_simpson(f: &mut dyn FnMut(f64) -> f64, breaks: &[f64], tol: f64) -> OracleReport {
    simpson_with_noise(f, breaks, tol, 0.0)
}

// Panels are also accepted once the Richardson difference is below
// `noise` times their width.
fn simpson_with_noise(
    f: &mut dyn FnMut(f64) -> f64,
    breaks: &[f64],
    tol: f64,
    noise: f64,
) -> OracleReport {
    let total: f64 = breaks.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let mut s = Simpson {
        f,
        noise,
        error: 0.0,
        converged: true,
    };
    let mut value = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let fa = (s.f)(a);
        let fb = (s.f)(b);
        let fm = (s.f)(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let local = tol * (b - a) / total;
        value += s.recurse(a, b - a, fa, fm, fb, whole, local, 0);
    }
    OracleReport {
        value,
        error: s.error,
        converged: s.converged,
    }
}

// Two passes: a rough one fixes the scale for a relative tolerance.
fn relative_quad(
    f: &mut dyn FnMut(f64) -> f64,
    breaks: &[f64],
    rel: f64,
    abs_floor: f64,
) -> OracleReport {
    let crude: f64 = breaks
        .windows(2)
        .map(|w| {
            (w[1] - w[0]) / 6.0
                * (f(w[0]).abs() + 4.0 * f(0.5 * (w[0] + w[1])).abs() + f(w[1]).abs())
        })
        .sum();
    let rough = adaptive_simpson(f, breaks, (1e-6 * crude).max(abs_floor));
    let tol = (rel * rough.value.abs()).max(abs_floor);
    adaptive_simpson(f, breaks, tol)
}

fn check(report: OracleReport, what: &str) -> Result<OracleReport> {
    if report.converged && report.value.is_finite() {
        Ok(report)
    } else {
        Err(Error::Oracle(format!(
            "{what}: quadrature did not converge (value {}, error {})",
            report.value, report.error
        )))
    }
}

/// K_n(x) from int_0^inf e^{-x cosh t} cosh(n t) dt.
pub fn quad_bessel_k(order: u32, x: f64, rel_tol: f64) -> Result<OracleReport> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("oracle K_{order}({x})")));
    }
    let top = (1.0 + 45.0 / x).acosh();
    let breaks: Vec<f64> = (0..=256).map(|i| top * i as f64 / 256.0).collect();
    let n = order as f64;
    let mut f = |t: f64| (-x * t.cosh()).exp() * (n * t).cosh();
    check(relative_quad(&mut f, &breaks, rel_tol, 1e-300), "K_n")
}

/// J_n(x) from (1/pi) int_0^pi cos(n tau - x sin tau) d tau, absolute
/// tolerance 1e-15 or the phase rounding noise of order eps x, whichever is
/// larger.
pub fn quad_bessel_j(order: u32, x: f64) -> OracleReport {
    let panels = (x.abs().ceil() as usize + 8) * 2;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| PI * i as f64 / panels as f64)
        .collect();
    let n = order as f64;
    let mut f = |t: f64| (n * t - x * t.sin()).cos() / PI;
    let noise = 4.0 * f64::EPSILON * (x.abs() + n);
    simpson_with_noise(&mut f, &breaks, 1e-15, noise)
}

// Panels [2^{-j-1}, 2^{-j}] covering (0, 1].
fn dyadic_breaks() -> Vec<f64> {
    let mut b: Vec<f64> = (0..=80).rev().map(|j| 0.5f64.powi(j)).collect();
    b.insert(0, 0.0);
    b
}

/// E_n(x) from int_0^1 e^{-x/s} s^{n-2} ds (the substitution t = 1/s).
pub fn quad_expint(n: u32, x: f64) -> OracleReport {
    let p = n as i32 - 2;
    let mut f = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            (-x / s).exp() * s.powi(p)
        }
    };
    relative_quad(&mut f, &dyadic_breaks(), 1e-15, 1e-300)
}

/// K_nu(z, w) from int_0^1 exp(-z/s - w s) s^{nu-1} ds.
pub fn quad_inc_bessel_k(nu: i32, z: f64, omega: f64, rel_tol: f64) -> Result<OracleReport> {
    if !(-1..=1).contains(&nu) || !(z >= 0.0 && omega >= 0.0) || (z == 0.0 && nu <= 0) {
        return Err(Error::Domain(format!(
            "oracle K_{nu}({z}, {omega}) diverges or is invalid"
        )));
    }
    let p = nu - 1;
    let mut f = |s: f64| {
        if s == 0.0 {
            if z > 0.0 || p < 0 {
                0.0
            } else {
                1.0
            }
        } else {
            (-z / s - omega * s).exp() * s.powi(p)
        }
    };
    let mut breaks = dyadic_breaks();
    // the integrand peaks near sqrt(z/w)
    if omega > 0.0 && z > 0.0 {
        let peak = (z / omega).sqrt();
        for c in [0.5, 0.8, 0.9, 1.0, 1.1, 1.25, 2.0] {
            let s = c * peak;
            if s > 0.0 && s < 1.0 {
                breaks.push(s);
            }
        }
        breaks.sort_by(f64::total_cmp);
    }
    check(
        relative_quad(&mut f, &breaks, rel_tol, 1e-300),
        "K_nu(z, w)",
    )
}

/// Which wavevectors a direct k-space sum includes.
#[derive(Clone, Copy, Debug)]
pub enum ModeSet {
    /// Integer indices with |kappa_1|, |kappa_2| <= half (periodic box).
    Box { half: i64 },
    /// All lattice vectors with |k| <= k_inf.
    Sphere { k_inf: f64 },
}

/// Per-point table of e^{i kappa 2 pi x / period} for kappa in [-n, n].
struct Phases {
    n: i64,
    // [point][axis][kappa + n] as (cos, sin)
    table: Vec<(f64, f64)>,
}

impl Phases {
    fn new(points: &[Vec2], n: i64, dk: f64) -> Self {
        let width = (2 * n + 1) as usize;
        let mut table = vec![(0.0, 0.0); points.len() * 2 * width];
        for (i, p) in points.iter().enumerate() {
            for (axis, c) in [p.x, p.y].into_iter().enumerate() {
                let base = (i * 2 + axis) * width;
                for kappa in -n..=n {
                    let (s, co) = (kappa as f64 * dk * c).sin_cos();
                    table[base + (kappa + n) as usize] = (co, s);
                }
            }
        }
        Phases { n, table }
    }

    #[inline]
    fn get(&self, point: usize, k1: i64, k2: i64) -> (f64, f64) {
        let width = (2 * self.n + 1) as usize;
        let a = self.table[(point * 2) * width + (k1 + self.n) as usize];
        let b = self.table[(point * 2 + 1) * width + (k2 + self.n) as usize];
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
}

/// The (real) multiplier and (imaginary) vector multiplier used by the
/// direct k-space sums. Written out here rather than shared with the
/// spectral engine.
fn multiplier(
    kernel: Kernel,
    params: &KernelParams,
    moll: Option<Mollification>,
    k: Vec2,
) -> (f64, Vec2) {
    let kk = k.norm();
    let g = match moll {
        None => kernels::g_fourier_periodic_raw(kk, params),
        Some(m) => kernels::g_fourier_freespace_raw(kk, params, m),
    };
    match kernel {
        Kernel::G => (g, Vec2::ZERO),
        Kernel::H => (0.0, k * (-g / params.alpha)),
    }
}

/// Visits the modes of `set` on the lattice with spacing `dk`, passing the
/// contribution of each mode to each target, already including the
/// normalisation `weight` (1/L^2 periodic, dk^2/(2 pi)^2 free space).
#[allow(clippy::too_many_arguments)]
fn for_each_mode(
    sources: &PointCloud,
    targets: &[Vec2],
    kernel: Kernel,
    params: &KernelParams,
    moll: Option<Mollification>,
    dk: f64,
    set: ModeSet,
    weight: f64,
    mut visit: impl FnMut(f64, usize, f64),
) {
    let half = match set {
        ModeSet::Box { half } => half,
        ModeSet::Sphere { k_inf } => (k_inf / dk).floor() as i64,
    };
    let src = Phases::new(&sources.positions, half, dk);
    let tgt = Phases::new(targets, half, dk);
    for k1 in -half..=half {
        for k2 in -half..=half {
            let k = Vec2::new(k1 as f64 * dk, k2 as f64 * dk);
            let kn = k.norm();
            if let ModeSet::Sphere { k_inf } = set {
                if kn > k_inf {
                    continue;
                }
            }
            let (g, hv) = multiplier(kernel, params, moll, k);
            // S(k) = sum f e^{-i k.y}; for H the contraction gives
            // i hv . S_vec(k).
            let (mut sr, mut si) = (0.0, 0.0);
            for n in 0..sources.len() {
                let (c, s) = src.get(n, k1, k2);
                let amp = match &sources.strengths {
                    Strengths::Scalar(f) => f[n] * g,
                    Strengths::Vector(f) => f[n].dot(hv),
                };
                sr += amp * c;
                si -= amp * s;
            }
            if let Kernel::H = kernel {
                // multiply by i
                let t = sr;
                sr = -si;
                si = t;
            }
            for t in 0..targets.len() {
                let (c, s) = tgt.get(t, k1, k2);
                visit(kn, t, weight * (sr * c - si * s));
            }
        }
    }
}

/// Direct evaluation of the periodic k-space sum
/// (1/L^2) sum_k A(k) sum_n f_n e^{i k.(x - y_n)} over `set`.
pub fn direct_ksum_periodic(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    kernel: Kernel,
    set: ModeSet,
) -> Vec<f64> {
    let l = params.box_length;
    let mut out = vec![0.0; targets.len()];
    for_each_mode(
        sources,
        targets,
        kernel,
        params,
        None,
        2.0 * PI / l,
        set,
        1.0 / (l * l),
        |_, t, v| out[t] += v,
    );
    out
}

/// Trapezoidal approximation of the free-space k-space integral
/// (2 pi)^{-2} int A_R(k) S(k) e^{i k.x} dk with lattice period `period`
/// (spacing 2 pi/period), truncated at |k| <= k_inf. Exact up to the tails
/// once `period` exceeds twice the support of the mollified kernel.
pub fn direct_ksum_freespace(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    moll: Mollification,
    kernel: Kernel,
    k_inf: f64,
    period: f64,
) -> Vec<f64> {
    let dk = 2.0 * PI / period;
    let w = dk * dk / (4.0 * PI * PI);
    let mut out = vec![0.0; targets.len()];
    for_each_mode(
        sources,
        targets,
        kernel,
        params,
        Some(moll),
        dk,
        ModeSet::Sphere { k_inf },
        w,
        |_, t, v| out[t] += v,
    );
    out
}

/// Periodic k-space truncation tails: `out[j][t]` is the part of the
/// k-space sum at target `t` coming from modes with |k| > `k_cuts[j]`
/// (and |k| <= `k_max`, beyond which the sum is treated as negligible).
pub fn ksum_tails_periodic(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    kernel: Kernel,
    k_cuts: &[f64],
    k_max: f64,
) -> Vec<Vec<f64>> {
    let l = params.box_length;
    let mut cuts: Vec<f64> = k_cuts.to_vec();
    cuts.sort_by(f64::total_cmp);
    // bins[b][t]: modes with cuts[b-1] < |k| <= cuts[b]; bin cuts.len() is above all
    let nb = cuts.len() + 1;
    let mut bins = vec![vec![0.0; targets.len()]; nb];
    for_each_mode(
        sources,
        targets,
        kernel,
        params,
        None,
        2.0 * PI / l,
        ModeSet::Sphere { k_inf: k_max },
        1.0 / (l * l),
        |kn, t, v| {
            let b = cuts.partition_point(|&c| c < kn);
            bins[b][t] += v;
        },
    );
    // tail above cuts[j] = sum of bins j+1..
    let mut tails_sorted = vec![vec![0.0; targets.len()]; cuts.len()];
    let mut acc = vec![0.0; targets.len()];
    for j in (0..cuts.len()).rev() {
        for t in 0..targets.len() {
            acc[t] += bins[j + 1][t];
        }
        tails_sorted[j].clone_from(&acc);
    }
    k_cuts
        .iter()
        .map(|c| {
            let j = cuts.partition_point(|x| x < c);
            tails_sorted[j].clone()
        })
        .collect()
}

/// Max over targets of |u(xi_1) - u(xi_2)| for two full evaluations.
pub fn cross_xi_check(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Root-mean-square of the differences.
pub fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let mut f = |x: f64| x.exp();
        let r = adaptive_simpson(&mut f, &[0.0, 1.0], 1e-14);
        assert!(r.converged);
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn k_half_order_closed_form() {
        // sanity of the cosh representation on a case with known answer:
        // int_0^inf e^{-x cosh t} cosh(t/2) dt = sqrt(pi/(2x)) e^{-x}
        let x: f64 = 1.7;
        let top = (1.0 + 45.0 / x).acosh();
        let breaks: Vec<f64> = (0..=64).map(|i| top * i as f64 / 64.0).collect();
        let mut f = |t: f64| (-x * t.cosh()).exp() * (0.5 * t).cosh();
        let r = adaptive_simpson(&mut f, &breaks, 1e-16);
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!((r.value - exact).abs() < 1e-15);
    }

    #[test]
    fn incomplete_at_zero_omega_is_expint_integral() {
        for &z in &[0.3, 2.0, 9.0] {
            let a = quad_inc_bessel_k(0, z, 0.0, 1e-14).unwrap().value;
            let b = quad_expint(1, z).value;
            assert!((a - b).abs() < 1e-14 * b);
        }
    }

    #[test]
    fn k1_zero_z_closed_form() {
        let w = 0.8;
        let v = quad_inc_bessel_k(1, 0.0, w, 1e-14).unwrap().value;
        assert!((v - (1.0 - (-w).exp()) / w).abs() < 1e-14);
    }

    #[test]
    fn zero_strengths_give_zero_ksum() {
        let params = KernelParams::new(1.0, 3.0, 2.0 * PI).unwrap();
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 2.0)], vec![0.0]).unwrap();
        let out = direct_ksum_periodic(
            &src,
            &[Vec2::new(0.5, 0.5)],
            &params,
            Kernel::G,
            ModeSet::Box { half: 8 },
        );
        assert_eq!(out, vec![0.0]);
    }
}
