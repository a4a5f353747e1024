//! Free-space k-space sums with the truncated (mollified) Green's function.
//!
//! The data grid covers [-pad, L + pad]^2 with M points per dimension and
//! spacing h. Convolutions run on a 2M grid; the transfer function there is
//! the FFT of the real-space kernel samples, which are obtained once from an
//! inverse FFT of the multiplier on an upsampled grid.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rustfft::num_complex::Complex64;

use super::engine::{Convolver, GridGeometry, StageTimings, Transfer};
use super::fft::{fft_size, Fft2};
use super::periodic::{kernel_of, sampled_transfer, KspaceOutput};
use super::window::WindowConfig;
use crate::error::{param, Result};
use crate::geometry::{check_points_in_box, PointCloud};
use crate::kernels::{
    g_fourier_freespace_raw, g_fourier_periodic_raw, Kernel, KernelParams, Mollification,
};
use crate::vec2::Vec2;

/// Smallest admissible upsampling factor, 1 + sqrt(2).
pub const MIN_UPSAMPLING: f64 = 1.0 + SQRT_2;

/// Which multiplier the free-space convolution uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeMultiplier {
    /// G^{F,R}, the transform of the kernel truncated at R.
    Mollified,
    /// The unmodified multiplier G^F, put through the same upsampled
    /// precomputation. Accurate only when alpha is large enough for the
    /// kernel to decay within the upsampled period.
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeSpaceOptions {
    /// Truncation level for the screening pad.
    pub tolerance: f64,
    pub upsampling: f64,
    pub multiplier: FreeMultiplier,
    /// Spacing of an on-grid target grid; h is then chosen to divide it.
    pub target_spacing: Option<f64>,
    pub eta: Option<f64>,
}

impl Default for FreeSpaceOptions {
    fn default() -> Self {
        FreeSpaceOptions {
            tolerance: 1e-12,
            upsampling: 3.0,
            multiplier: FreeMultiplier::Mollified,
            target_spacing: None,
            eta: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeSpacePlan {
    pub h: f64,
    pub p: usize,
    pub eta: f64,
    /// Grid points between the origin of the grid and x = 0.
    pub n_pad: usize,
    /// Data grid points per dimension.
    pub m: usize,
    /// Upsampled grid used by the precomputation.
    pub n_up: usize,
    pub delta1: f64,
    pub delta2: f64,
    pub moll: Mollification,
    pub multiplier: FreeMultiplier,
    pub box_length: f64,
    /// On-grid target stride in units of h.
    pub target_stride: Option<usize>,
}

impl FreeSpacePlan {
    pub fn delta(&self) -> f64 {
        self.delta1.max(self.delta2)
    }

    pub fn origin(&self) -> Vec2 {
        let o = -(self.n_pad as f64) * self.h;
        Vec2::new(o, o)
    }

    pub fn window(&self) -> Result<WindowConfig> {
        WindowConfig::with_eta(self.p, self.eta, self.h)
    }
}

/// Screening pad: the Gaussian screening falls below `eps` beyond
/// |x| = delta1/2.
pub fn screening_pad(params: &KernelParams, eps: f64) -> f64 {
    let xi2 = params.xi * params.xi;
    let arg = (xi2 / (PI * eps)).ln() - params.omega();
    if arg > 0.0 {
        2.0 * (arg / xi2).sqrt()
    } else {
        0.0
    }
}

/// Grid and padding for k-space truncation `k_inf` (Nyquist at k_inf).
pub fn plan_freespace(
    params: &KernelParams,
    k_inf: f64,
    p: usize,
    opts: &FreeSpaceOptions,
) -> Result<FreeSpacePlan> {
    if !(k_inf > 0.0 && k_inf.is_finite()) {
        return param(format!("k_inf must be positive, got {k_inf}"));
    }
    if !(opts.upsampling >= MIN_UPSAMPLING) {
        return param(format!(
            "upsampling factor {} is below 1 + sqrt(2)",
            opts.upsampling
        ));
    }
    if !(opts.tolerance > 0.0 && opts.tolerance < 1.0) {
        return param(format!(
            "tolerance must lie in (0, 1), got {}",
            opts.tolerance
        ));
    }
    let l = params.box_length;
    let mut h = PI / k_inf;
    let mut stride = None;
    if let Some(ht) = opts.target_spacing {
        if !(ht > 0.0) {
            return param(format!("target spacing must be positive, got {ht}"));
        }
        let r = (ht / h).ceil().max(1.0) as usize;
        h = ht / r as f64;
        stride = Some(r);
    }
    let win = match opts.eta {
        Some(e) => WindowConfig::with_eta(p, e, h)?,
        None => WindowConfig::new(p, h)?,
    };
    let delta1 = screening_pad(params, opts.tolerance);
    // the full window support p h must fit on either side
    let delta2 = p as f64 * h;
    let delta = delta1.max(delta2);
    let n_pad = ((0.5 * delta / h).ceil() as usize).max(p / 2);
    let m = fft_size(2 * n_pad + (l / h).ceil() as usize + 1);
    let extended = m as f64 * h;
    let n_up = fft_size((opts.upsampling * m as f64).ceil() as usize);
    Ok(FreeSpacePlan {
        h,
        p,
        eta: win.eta,
        n_pad,
        m,
        n_up,
        delta1,
        delta2,
        moll: Mollification::from_extended_side(extended)?,
        multiplier: opts.multiplier,
        box_length: l,
        target_stride: stride,
    })
}

/// Transfer function on the 2M convolution grid for the plan's multiplier
/// divided by `window_power` powers of the window transform.
pub fn precompute_mollified(
    kernel: Kernel,
    params: &KernelParams,
    plan: &FreeSpacePlan,
    window_power: i32,
) -> Result<Transfer> {
    let win = plan.window()?;
    let n_up = plan.n_up;
    let side_up = n_up as f64 * plan.h;
    let p = *params;
    let moll = plan.moll;
    let sampled = match plan.multiplier {
        FreeMultiplier::Mollified => sampled_transfer(
            kernel,
            n_up,
            side_up,
            &win,
            window_power,
            params.alpha,
            |k| g_fourier_freespace_raw(k, &p, moll),
        ),
        FreeMultiplier::Plain => sampled_transfer(
            kernel,
            n_up,
            side_up,
            &win,
            window_power,
            params.alpha,
            |k| g_fourier_periodic_raw(k, &p),
        ),
    };
    // `sampled` holds B/h^2; its unnormalised inverse FFT times
    // h^2/(n_up h)^2 gives the kernel samples P(j h).
    let big = Fft2::new(n_up);
    let conv = Fft2::new(2 * plan.m);
    let scale = 1.0 / (n_up * n_up) as f64;
    let truncate = |mut arr: Vec<Complex64>| -> Vec<Complex64> {
        big.inverse(&mut arr);
        let m = plan.m;
        let nc = 2 * m;
        let src = |j: usize| -> Option<usize> {
            if j < m {
                Some(j)
            } else if j == m {
                None
            } else {
                Some(n_up - (nc - j))
            }
        };
        let mut out = vec![Complex64::default(); nc * nc];
        for j2 in 0..nc {
            let Some(s2) = src(j2) else { continue };
            for j1 in 0..nc {
                let Some(s1) = src(j1) else { continue };
                out[j2 * nc + j1] = arr[s2 * n_up + s1] * scale;
            }
        }
        conv.forward(&mut out);
        out
    };
    Ok(match sampled {
        Transfer::Scalar(a) => Transfer::Scalar(truncate(a)),
        Transfer::Vector([a, b]) => Transfer::Vector([truncate(a), truncate(b)]),
    })
}

/// A free-space k-space operator with its precomputed transfer function,
/// reusable across source sets of the same kernel.
pub struct FreeSpaceOperator {
    pub plan: FreeSpacePlan,
    pub kernel: Kernel,
    window_power: i32,
    win: WindowConfig,
    conv: Convolver,
    pub precompute_time: std::time::Duration,
}

impl FreeSpaceOperator {
    /// `on_grid` selects the single-window-power transfer for on-grid output.
    pub fn new(
        kernel: Kernel,
        params: &KernelParams,
        plan: FreeSpacePlan,
        on_grid: bool,
    ) -> Result<Self> {
        let start = Instant::now();
        let window_power = if on_grid { 1 } else { 2 };
        let transfer = precompute_mollified(kernel, params, &plan, window_power)?;
        let geom = GridGeometry {
            n: plan.m,
            h: plan.h,
            origin: plan.origin(),
            periodic: false,
        };
        let conv = Convolver::new(geom, 2 * plan.m, transfer);
        Ok(FreeSpaceOperator {
            plan,
            kernel,
            window_power,
            win: plan.window()?,
            conv,
            precompute_time: start.elapsed(),
        })
    }

    fn check_sources(&self, sources: &PointCloud) -> Result<()> {
        if kernel_of(&sources.strengths) != self.kernel {
            return param("strength type does not match the operator's kernel");
        }
        check_points_in_box(&sources.positions, self.plan.box_length, true)
    }

    pub fn evaluate(&self, sources: &PointCloud, targets: &[Vec2]) -> Result<KspaceOutput> {
        if self.window_power != 2 {
            return param("operator was built for on-grid evaluation");
        }
        self.check_sources(sources)?;
        check_points_in_box(targets, self.plan.box_length, true)?;
        let mut timings = StageTimings {
            precompute: self.precompute_time,
            ..Default::default()
        };
        let values = self
            .conv
            .evaluate(sources, targets, &self.win, &mut timings)?;
        Ok(KspaceOutput { values, timings })
    }

    /// Values on the target grid `(i s, j s)`, `i, j < mt`, where `s` is the
    /// plan's target spacing.
    pub fn evaluate_ongrid(&self, sources: &PointCloud, mt: usize) -> Result<KspaceOutput> {
        let Some(stride) = self.plan.target_stride else {
            return param("plan has no on-grid target spacing");
        };
        if self.window_power != 1 {
            return param("operator was built for gathered evaluation");
        }
        self.check_sources(sources)?;
        let last = self.plan.n_pad + (mt.saturating_sub(1)) * stride;
        if last >= self.plan.m {
            return param(format!("target grid of {mt} points does not fit the plan"));
        }
        let mut timings = StageTimings {
            precompute: self.precompute_time,
            ..Default::default()
        };
        let field = self.conv.field(sources, &self.win, &mut timings)?;
        let start = Instant::now();
        let m = self.plan.m;
        let o = self.plan.n_pad;
        let mut values = Vec::with_capacity(mt * mt);
        for j in 0..mt {
            for i in 0..mt {
                values.push(field[(o + j * stride) * m + o + i * stride]);
            }
        }
        timings.gather += start.elapsed();
        Ok(KspaceOutput { values, timings })
    }
}

/// One-shot free-space k-space sum at arbitrary targets.
pub fn kspace_sum_freespace(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    plan: &FreeSpacePlan,
) -> Result<KspaceOutput> {
    FreeSpaceOperator::new(kernel_of(&sources.strengths), params, *plan, false)?
        .evaluate(sources, targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> KernelParams {
        KernelParams::new(1.0, 4.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn plan_geometry() {
        let plan = plan_freespace(&params(), 30.0, 24, &FreeSpaceOptions::default()).unwrap();
        assert!((plan.h - PI / 30.0).abs() < 1e-15);
        assert!(plan.n_pad as f64 * plan.h >= 0.5 * plan.delta() - 1e-12);
        assert!(plan.m > 2 * plan.n_pad + (2.0 * PI / plan.h).ceil() as usize);
        assert!((plan.moll.radius - SQRT_2 * plan.m as f64 * plan.h).abs() < 1e-12);
        assert!(plan.n_up as f64 >= 3.0 * plan.m as f64);
        // screening below eps at delta1/2
        let p = params();
        let d = plan.delta1 / 2.0;
        let gamma = p.xi * p.xi / PI * (-p.omega() - d * d * p.xi * p.xi).exp();
        assert!(gamma <= 1e-12 * (1.0 + 1e-9));
    }

    #[test]
    fn rejects_small_upsampling() {
        let opts = FreeSpaceOptions {
            upsampling: 2.4,
            ..Default::default()
        };
        assert!(plan_freespace(&params(), 30.0, 24, &opts).is_err());
    }

    #[test]
    fn on_grid_spacing_divides() {
        let ht = 2.0 * PI / 100.0;
        let opts = FreeSpaceOptions {
            target_spacing: Some(ht),
            ..Default::default()
        };
        let plan = plan_freespace(&params(), 30.0, 24, &opts).unwrap();
        let r = plan.target_stride.unwrap();
        assert!((plan.h * r as f64 - ht).abs() < 1e-15);
        assert!(plan.h <= PI / 30.0);
    }

    #[test]
    fn zero_strengths_give_zero() {
        let p = params();
        let plan = plan_freespace(&p, 20.0, 16, &FreeSpaceOptions::default()).unwrap();
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 1.0)], vec![0.0]).unwrap();
        let out = kspace_sum_freespace(&src, &[Vec2::new(2.0, 2.0)], &p, &plan).unwrap();
        assert_eq!(out.values, vec![0.0]);
    }
}
