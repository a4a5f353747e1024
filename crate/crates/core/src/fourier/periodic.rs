//! Periodic k-space sums on an M x M grid over the box [0, L)^2.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::engine::{Convolver, GridGeometry, StageTimings, Transfer};
use super::fft::{freq_index, Fft2};
use super::window::WindowConfig;
use crate::error::{param, Result};
use crate::geometry::{check_points_in_box, PointCloud, Strengths};
use crate::kernels::{g_fourier_periodic_raw, Kernel, KernelParams};
use crate::vec2::Vec2;

/// k-space output with per-stage timings.
#[derive(Clone, Debug, Default)]
pub struct KspaceOutput {
    pub values: Vec<f64>,
    pub timings: StageTimings,
}

pub(crate) fn kernel_of(s: &Strengths) -> Kernel {
    match s {
        Strengths::Scalar(_) => Kernel::G,
        Strengths::Vector(_) => Kernel::H,
    }
}

/// Discrete transfer function A(k)/w^(q)(k)/h^2 on an n x n grid of side
/// `side`, with `A` evaluated by `g_of_k` (scalar part of the multiplier).
/// Nyquist modes are zeroed.
pub(crate) fn sampled_transfer(
    kernel: Kernel,
    n: usize,
    side: f64,
    win: &WindowConfig,
    window_power: i32,
    alpha: f64,
    g_of_k: impl Fn(f64) -> f64 + Sync,
) -> Transfer {
    let dk = 2.0 * PI / side;
    let h2 = win.h * win.h;
    let nyq = -(n as i64) / 2;
    // the scaled multiplier depends on (|k1|, |k2|) only and is symmetric
    // in the pair, so it is tabulated on one octant
    let half = n / 2 + 1;
    let mut table = vec![0.0; half * half];
    table
        .par_chunks_mut(half)
        .enumerate()
        .for_each(|(j2, row)| {
            for (j1, v) in row.iter_mut().enumerate().take(j2 + 1) {
                let k = Vec2::new(j1 as f64 * dk, j2 as f64 * dk);
                *v = g_of_k(k.norm()) / (win.hat(k).powi(window_power) * h2);
            }
        });
    let scaled = |j1: usize, j2: usize| {
        if j1 <= j2 {
            table[j2 * half + j1]
        } else {
            table[j1 * half + j2]
        }
    };
    let mut a = vec![Complex64::default(); n * n];
    let mut b = if kernel == Kernel::H {
        vec![Complex64::default(); n * n]
    } else {
        Vec::new()
    };
    for i2 in 0..n {
        let k2i = freq_index(i2, n);
        for i1 in 0..n {
            let k1i = freq_index(i1, n);
            if n.is_multiple_of(2) && (k1i == nyq || k2i == nyq) {
                continue;
            }
            let g = scaled(k1i.unsigned_abs() as usize, k2i.unsigned_abs() as usize);
            match kernel {
                Kernel::G => a[i2 * n + i1] = Complex64::new(g, 0.0),
                Kernel::H => {
                    // i * (-k/alpha) g, one array per strength component
                    a[i2 * n + i1] = Complex64::new(0.0, -(k1i as f64 * dk) / alpha * g);
                    b[i2 * n + i1] = Complex64::new(0.0, -(k2i as f64 * dk) / alpha * g);
                }
            }
        }
    }
    match kernel {
        Kernel::G => Transfer::Scalar(a),
        Kernel::H => Transfer::Vector([a, b]),
    }
}

fn periodic_convolver(
    kernel: Kernel,
    params: &KernelParams,
    m: usize,
    win: &WindowConfig,
    window_power: i32,
) -> Convolver {
    let l = params.box_length;
    let geom = GridGeometry {
        n: m,
        h: l / m as f64,
        origin: Vec2::ZERO,
        periodic: true,
    };
    let p = *params;
    let transfer = sampled_transfer(kernel, m, l, win, window_power, params.alpha, |k| {
        g_fourier_periodic_raw(k, &p)
    });
    Convolver::new(geom, m, transfer)
}

fn check_grid(m: usize, p: usize) -> Result<()> {
    if m < 2 || !m.is_multiple_of(2) {
        return param(format!("grid size must be even and >= 2, got {m}"));
    }
    if p > m {
        return param(format!("window support {p} exceeds grid size {m}"));
    }
    Ok(())
}

/// Periodic k-space sum at arbitrary targets through spread, FFT, scaling,
/// inverse FFT and gather. The kernel follows the strength type.
pub fn kspace_sum_periodic(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    m: usize,
    p: usize,
    eta: Option<f64>,
) -> Result<KspaceOutput> {
    check_grid(m, p)?;
    let l = params.box_length;
    sources.check_in_box(l)?;
    check_points_in_box(targets, l, false)?;
    let h = l / m as f64;
    let win = match eta {
        Some(e) => WindowConfig::with_eta(p, e, h)?,
        None => WindowConfig::new(p, h)?,
    };
    let mut timings = StageTimings::default();
    let start = Instant::now();
    let conv = periodic_convolver(kernel_of(&sources.strengths), params, m, &win, 2);
    timings.precompute = start.elapsed();
    let values = conv.evaluate(sources, targets, &win, &mut timings)?;
    Ok(KspaceOutput { values, timings })
}

/// Smallest even grid size >= `m_min` commensurate with an `mt`-point target
/// grid (one divides the other).
pub fn commensurate_grid_size(m_min: usize, mt: usize) -> usize {
    let m_min = m_min.max(2);
    let mut best = None;
    for d in 1..=mt {
        if mt.is_multiple_of(d) && d % 2 == 0 && d >= m_min {
            best = Some(d);
            break;
        }
    }
    best.unwrap_or_else(|| {
        // multiples of mt
        let base = if mt.is_multiple_of(2) { mt } else { 2 * mt };
        base * m_min.div_ceil(base)
    })
}

/// Periodic k-space sum on the target grid `(i L/mt, j L/mt)` using a
/// single power of the window and no gather. `m` and `mt` must be
/// commensurate.
pub fn kspace_sum_periodic_ongrid(
    sources: &PointCloud,
    mt: usize,
    params: &KernelParams,
    m: usize,
    p: usize,
    eta: Option<f64>,
) -> Result<KspaceOutput> {
    check_grid(m, p)?;
    if mt == 0 || (!m.is_multiple_of(mt) && !mt.is_multiple_of(m)) {
        return param(format!(
            "target grid {mt} is not commensurate with grid size {m}"
        ));
    }
    let l = params.box_length;
    sources.check_in_box(l)?;
    let h = l / m as f64;
    let win = match eta {
        Some(e) => WindowConfig::with_eta(p, e, h)?,
        None => WindowConfig::new(p, h)?,
    };
    let mut timings = StageTimings::default();
    let start = Instant::now();
    let conv = periodic_convolver(kernel_of(&sources.strengths), params, m, &win, 1);
    timings.precompute = start.elapsed();
    let values = if m >= mt {
        let field = conv.field(sources, &win, &mut timings)?;
        let start = Instant::now();
        let r = m / mt;
        let mut out = Vec::with_capacity(mt * mt);
        for j in 0..mt {
            for i in 0..mt {
                out.push(field[j * r * m + i * r]);
            }
        }
        timings.gather += start.elapsed();
        out
    } else {
        let spec = conv.spectrum(sources, &win, &mut timings)?;
        let start = Instant::now();
        // zero-pad the spectrum onto the finer grid (Nyquist already zero)
        let mut fine = vec![Complex64::default(); mt * mt];
        for i2 in 0..m {
            let k2 = freq_index(i2, m).rem_euclid(mt as i64) as usize;
            for i1 in 0..m {
                let k1 = freq_index(i1, m).rem_euclid(mt as i64) as usize;
                fine[k2 * mt + k1] = spec[i2 * m + i1];
            }
        }
        Fft2::new(mt).inverse(&mut fine);
        let s = h * h / (m * m) as f64;
        let out = fine.iter().map(|c| c.re * s).collect();
        timings.ifft += start.elapsed();
        out
    };
    Ok(KspaceOutput { values, timings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commensurate_sizes() {
        assert_eq!(commensurate_grid_size(60, 100), 100);
        assert_eq!(commensurate_grid_size(40, 100), 50);
        assert_eq!(commensurate_grid_size(120, 100), 200);
        assert_eq!(commensurate_grid_size(10, 7), 14);
        assert_eq!(commensurate_grid_size(2, 100), 2);
    }

    #[test]
    fn zero_strengths_give_zero() {
        let params = KernelParams::new(1.0, 3.0, 2.0 * PI).unwrap();
        let src = PointCloud::scalar(
            vec![Vec2::new(1.0, 1.0), Vec2::new(4.0, 2.0)],
            vec![0.0, 0.0],
        )
        .unwrap();
        let out = kspace_sum_periodic(&src, &[Vec2::new(0.5, 0.5)], &params, 32, 16, None).unwrap();
        assert_eq!(out.values, vec![0.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        let params = KernelParams::new(1.0, 3.0, 2.0 * PI).unwrap();
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 1.0)], vec![1.0]).unwrap();
        assert!(kspace_sum_periodic(&src, &[], &params, 31, 16, None).is_err());
        assert!(kspace_sum_periodic(&src, &[], &params, 16, 24, None).is_err());
        assert!(kspace_sum_periodic_ongrid(&src, 30, &params, 64, 16, None).is_err());
    }
}
