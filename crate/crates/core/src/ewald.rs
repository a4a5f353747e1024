//! Full Ewald evaluation: real-space sum, k-space sum and self terms.

use std::time::{Duration, Instant};

use crate::error::{param, Result};
use crate::estimate::grid_size_for;
use crate::fourier::periodic::kernel_of;
use crate::fourier::{
    commensurate_grid_size, kspace_sum_periodic, kspace_sum_periodic_ongrid, plan_freespace,
    FreeMultiplier, FreeSpaceOperator, FreeSpaceOptions, FreeSpacePlan, StageTimings,
};
use crate::geometry::PointCloud;
use crate::io::grid_targets;
use crate::kernels::{KernelParams, Setting};
use crate::realspace::{real_sum, RealSumConfig};
use crate::vec2::Vec2;

/// Everything needed for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EwaldParams {
    pub alpha: f64,
    pub xi: f64,
    pub box_length: f64,
    pub rc: f64,
    pub k_inf: f64,
    /// Overrides the grid derived from `k_inf`.
    pub grid: Option<usize>,
    pub window_p: usize,
    pub eta: Option<f64>,
    /// Truncation level for the free-space screening pad.
    pub tolerance: f64,
    pub upsampling: f64,
    pub multiplier: FreeMultiplier,
    pub include_self: bool,
}

impl EwaldParams {
    pub fn new(alpha: f64, xi: f64, box_length: f64, rc: f64, k_inf: f64) -> Self {
        EwaldParams {
            alpha,
            xi,
            box_length,
            rc,
            k_inf,
            grid: None,
            window_p: 24,
            eta: None,
            tolerance: 1e-12,
            upsampling: 3.0,
            multiplier: FreeMultiplier::Mollified,
            include_self: true,
        }
    }

    pub fn kernel_params(&self) -> Result<KernelParams> {
        KernelParams::new(self.alpha, self.xi, self.box_length)
    }

    /// k_inf implied by a grid override.
    fn effective_k_inf(&self, setting: Setting) -> f64 {
        match (self.grid, setting) {
            (Some(m), Setting::Free) => std::f64::consts::PI * m as f64 / self.box_length,
            _ => self.k_inf,
        }
    }

    fn periodic_grid(&self) -> usize {
        self.grid
            .unwrap_or_else(|| grid_size_for(self.k_inf, self.box_length))
    }

    fn free_plan(&self, target_spacing: Option<f64>) -> Result<FreeSpacePlan> {
        let opts = FreeSpaceOptions {
            tolerance: self.tolerance,
            upsampling: self.upsampling,
            multiplier: self.multiplier,
            target_spacing,
            eta: self.eta,
        };
        plan_freespace(
            &self.kernel_params()?,
            self.effective_k_inf(Setting::Free),
            self.window_p,
            &opts,
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EwaldTimings {
    pub real: Duration,
    pub kspace: StageTimings,
    pub total: Duration,
}

#[derive(Clone, Debug)]
pub struct EwaldResult {
    pub values: Vec<f64>,
    pub real: Vec<f64>,
    pub kspace: Vec<f64>,
    /// FFT grid (periodic) or data grid (free space) actually used.
    pub grid: usize,
    pub timings: EwaldTimings,
}

fn combine(
    real: Vec<f64>,
    kspace: Vec<f64>,
    grid: usize,
    real_time: Duration,
    ks: StageTimings,
    start: Instant,
) -> EwaldResult {
    let values = real.iter().zip(&kspace).map(|(a, b)| a + b).collect();
    EwaldResult {
        values,
        real,
        kspace,
        grid,
        timings: EwaldTimings {
            real: real_time,
            kspace: ks,
            total: start.elapsed(),
        },
    }
}

fn real_part(
    sources: &PointCloud,
    targets: &[Vec2],
    setting: Setting,
    p: &EwaldParams,
) -> Result<(Vec<f64>, Duration)> {
    let start = Instant::now();
    let cfg = RealSumConfig {
        cutoff: p.rc,
        include_self: p.include_self,
    };
    let v = real_sum(sources, targets, &p.kernel_params()?, &cfg, setting)?;
    Ok((v, start.elapsed()))
}

/// u(x_t) at arbitrary targets.
pub fn evaluate(
    sources: &PointCloud,
    targets: &[Vec2],
    setting: Setting,
    p: &EwaldParams,
) -> Result<EwaldResult> {
    let start = Instant::now();
    let kp = p.kernel_params()?;
    let (real, real_time) = real_part(sources, targets, setting, p)?;
    let (ks, grid) = match setting {
        Setting::Periodic => {
            let m = p.periodic_grid();
            (
                kspace_sum_periodic(sources, targets, &kp, m, p.window_p, p.eta)?,
                m,
            )
        }
        Setting::Free => {
            let plan = p.free_plan(None)?;
            let op = FreeSpaceOperator::new(kernel_of(&sources.strengths), &kp, plan, false)?;
            (op.evaluate(sources, targets)?, plan.m)
        }
    };
    Ok(combine(real, ks.values, grid, real_time, ks.timings, start))
}

/// Same as [`evaluate`] with the k-space part computed by the gather path
/// on a grid commensurate with an `mt` x `mt` target grid, so the result is
/// directly comparable with [`evaluate_ongrid`].
pub fn evaluate_grid_targets(
    sources: &PointCloud,
    mt: usize,
    setting: Setting,
    p: &EwaldParams,
) -> Result<EwaldResult> {
    let targets = grid_targets(mt, mt, p.box_length);
    match setting {
        Setting::Periodic => {
            let q = EwaldParams {
                grid: Some(commensurate_grid_size(p.periodic_grid(), mt)),
                ..*p
            };
            evaluate(sources, &targets, setting, &q)
        }
        Setting::Free => {
            let start = Instant::now();
            let kp = p.kernel_params()?;
            let (real, real_time) = real_part(sources, &targets, setting, p)?;
            let plan = p.free_plan(Some(p.box_length / mt as f64))?;
            let op = FreeSpaceOperator::new(kernel_of(&sources.strengths), &kp, plan, false)?;
            let ks = op.evaluate(sources, &targets)?;
            Ok(combine(
                real, ks.values, plan.m, real_time, ks.timings, start,
            ))
        }
    }
}

/// u on the grid `(i L/mt, j L/mt)`, x fastest, with the on-grid k-space
/// path (one window power, no gather).
pub fn evaluate_ongrid(
    sources: &PointCloud,
    mt: usize,
    setting: Setting,
    p: &EwaldParams,
) -> Result<EwaldResult> {
    if mt == 0 {
        return param("target grid must have at least one point");
    }
    let start = Instant::now();
    let kp = p.kernel_params()?;
    let targets = grid_targets(mt, mt, p.box_length);
    let (real, real_time) = real_part(sources, &targets, setting, p)?;
    let (ks, grid) = match setting {
        Setting::Periodic => {
            let m = commensurate_grid_size(p.periodic_grid(), mt);
            (
                kspace_sum_periodic_ongrid(sources, mt, &kp, m, p.window_p, p.eta)?,
                m,
            )
        }
        Setting::Free => {
            let plan = p.free_plan(Some(p.box_length / mt as f64))?;
            let op = FreeSpaceOperator::new(kernel_of(&sources.strengths), &kp, plan, true)?;
            (op.evaluate_ongrid(sources, mt)?, plan.m)
        }
    };
    Ok(combine(real, ks.values, grid, real_time, ks.timings, start))
}
