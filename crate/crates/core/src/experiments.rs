//! Drivers for the numerical experiments: truncation-error sweeps, scaling
//! benchmarks and the free-space multiplier study.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::estimate::{
    k_estimate, rc_for_neighbors, real_estimate, tune, tune_for_xi, SystemMoments, Tuned,
};
use crate::ewald::{evaluate, EwaldParams, EwaldResult, EwaldTimings};
use crate::fourier::{plan_freespace, FreeMultiplier, FreeSpaceOptions};
use crate::geometry::{PointCloud, Strengths};
use crate::kernels::{
    g_fourier_freespace, g_fourier_periodic, g_real_raw, h_real_factor, Kernel, KernelParams,
    Setting,
};
use crate::realspace::direct_sum;
use crate::reference::{ksum_tails_periodic, rms_diff};
use crate::synth::random_cloud;
use crate::vec2::Vec2;

/// Tunes for `tol` at fixed `xi` and evaluates at the source positions.
pub fn evaluate_at_xi(
    cloud: &PointCloud,
    box_length: f64,
    setting: Setting,
    alpha: f64,
    xi: f64,
    tol: f64,
    p: usize,
) -> Result<(EwaldResult, Tuned)> {
    let m = SystemMoments::from_cloud(cloud, box_length);
    let tuned = tune_for_xi(tol, xi, alpha, &m, setting, p)?;
    let mut params = EwaldParams::new(alpha, xi, box_length, tuned.rc, tuned.k_inf);
    params.window_p = p;
    params.tolerance = tol;
    Ok((evaluate(cloud, &cloud.positions, setting, &params)?, tuned))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepPart {
    Real,
    Kspace,
}

/// Truncation-error sweep on a random periodic configuration.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kernel: Kernel,
    pub alpha: f64,
    pub box_length: f64,
    pub n: usize,
    pub seed: u64,
    pub xis: Vec<f64>,
    /// Real-space cutoffs r_c.
    pub cutoffs: Vec<f64>,
    /// k-space truncations k_inf.
    pub wavenumbers: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub part: SweepPart,
    pub xi: f64,
    /// r_c or k_inf.
    pub cut: f64,
    /// RMS over the targets of the truncated part of the sum.
    pub measured: f64,
    pub estimate: f64,
}

// Pairs beyond r^2 xi^2 = 45 contribute below 1e-19 relative.
const REAL_TAIL_EXTENT: f64 = 45.0;

/// Per-target real-space tails: `out[j][t]` sums the real-space pair terms
/// with separation above `cuts[j]`, over all periodic images.
fn real_tails(cloud: &PointCloud, params: &KernelParams, cuts: &[f64]) -> Vec<Vec<f64>> {
    let l = params.box_length;
    let r_max = REAL_TAIL_EXTENT.sqrt() / params.xi;
    let images = (r_max / l).ceil() as i64 + 1;
    let mut sorted: Vec<f64> = cuts.to_vec();
    sorted.sort_by(f64::total_cmp);
    let per_target: Vec<Vec<f64>> = cloud
        .positions
        .par_iter()
        .map(|&x| {
            let mut bins = vec![0.0; sorted.len() + 1];
            for (n, &y) in cloud.positions.iter().enumerate() {
                for p1 in -images..=images {
                    for p2 in -images..=images {
                        let sep = x - y - Vec2::new(p1 as f64 * l, p2 as f64 * l);
                        let r2 = sep.norm2();
                        if r2 == 0.0 || r2 > r_max * r_max {
                            continue;
                        }
                        let v = match &cloud.strengths {
                            Strengths::Scalar(f) => f[n] * g_real_raw(r2, params),
                            Strengths::Vector(f) => f[n].dot(sep) * h_real_factor(r2, params),
                        };
                        let r = r2.sqrt();
                        bins[sorted.partition_point(|&c| c < r)] += v;
                    }
                }
            }
            // tail above sorted[j] = bins j+1..
            let mut tails = vec![0.0; sorted.len()];
            let mut acc = 0.0;
            for j in (0..sorted.len()).rev() {
                acc += bins[j + 1];
                tails[j] = acc;
            }
            cuts.iter()
                .map(|c| tails[sorted.partition_point(|x| x < c)])
                .collect()
        })
        .collect();
    (0..cuts.len())
        .map(|j| per_target.iter().map(|t| t[j]).collect())
        .collect()
}

fn rms(v: &[f64]) -> f64 {
    rms_diff(v, &vec![0.0; v.len()])
}

/// Measured RMS truncation errors and their estimates for each xi over the
/// given cutoffs and wavenumbers (periodic setting, targets at the sources).
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.n == 0 {
        return param("sweep needs at least one point");
    }
    let cloud = random_cloud(cfg.seed, cfg.n, cfg.box_length, cfg.kernel);
    let m = SystemMoments::from_cloud(&cloud, cfg.box_length);
    let mut rows = Vec::new();
    for &xi in &cfg.xis {
        let params = KernelParams::new(cfg.alpha, xi, cfg.box_length)?;
        if !cfg.cutoffs.is_empty() {
            let tails = real_tails(&cloud, &params, &cfg.cutoffs);
            for (&rc, t) in cfg.cutoffs.iter().zip(&tails) {
                rows.push(SweepRow {
                    part: SweepPart::Real,
                    xi,
                    cut: rc,
                    measured: rms(t),
                    estimate: real_estimate(rc, xi, cfg.alpha, &m),
                });
            }
        }
        if !cfg.wavenumbers.is_empty() {
            // modes beyond k^2/4xi^2 = 45 are below 1e-19 relative
            let k_max = 2.0 * xi * REAL_TAIL_EXTENT.sqrt();
            let tails = ksum_tails_periodic(
                &cloud,
                &cloud.positions,
                &params,
                cfg.kernel,
                &cfg.wavenumbers,
                k_max,
            );
            for (&k, t) in cfg.wavenumbers.iter().zip(&tails) {
                rows.push(SweepRow {
                    part: SweepPart::Kspace,
                    xi,
                    cut: k,
                    measured: rms(t),
                    estimate: k_estimate(k, xi, cfg.alpha, &m, None),
                });
            }
        }
    }
    Ok(rows)
}

/// Scaling benchmark with a fixed mean neighbour count.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub kernel: Kernel,
    pub setting: Setting,
    pub sizes: Vec<usize>,
    pub alpha: f64,
    pub box_length: f64,
    pub tolerance: f64,
    pub neighbors: f64,
    pub seed: u64,
    pub window_p: usize,
    /// Each size is timed this many times; the fastest run is kept.
    pub repeats: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub rc: f64,
    pub xi: f64,
    pub k_inf: f64,
    pub grid: usize,
    pub timings: EwaldTimings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(total time) against log N.
    pub exponent_n: Option<f64>,
    /// Same against log(N log N).
    pub exponent_n_log_n: Option<f64>,
}

fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for (i, &n) in cfg.sizes.iter().enumerate() {
        if n < 2 {
            return param(format!("benchmark sizes must be at least 2, got {n}"));
        }
        let cloud = random_cloud(
            cfg.seed.wrapping_add(i as u64),
            n,
            cfg.box_length,
            cfg.kernel,
        );
        let m = SystemMoments::from_cloud(&cloud, cfg.box_length);
        let rc = rc_for_neighbors(cfg.neighbors, n, cfg.box_length);
        let tuned = tune(cfg.tolerance, rc, cfg.alpha, &m, cfg.setting, cfg.window_p)?;
        let mut params =
            EwaldParams::new(cfg.alpha, tuned.xi, cfg.box_length, tuned.rc, tuned.k_inf);
        params.window_p = cfg.window_p;
        params.tolerance = cfg.tolerance;
        let mut best: Option<EwaldResult> = None;
        for _ in 0..cfg.repeats.max(1) {
            let r = evaluate(&cloud, &cloud.positions, cfg.setting, &params)?;
            if best
                .as_ref()
                .is_none_or(|b| r.timings.total < b.timings.total)
            {
                best = Some(r);
            }
        }
        let best = best.expect("at least one repeat");
        log::info!("bench N = {n}: {:?}", best.timings.total);
        rows.push(BenchRow {
            n,
            rc: tuned.rc,
            xi: tuned.xi,
            k_inf: tuned.k_inf,
            grid: best.grid,
            timings: best.timings,
        });
    }
    let ln: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let lnl: Vec<f64> = rows
        .iter()
        .map(|r| (r.n as f64 * (r.n as f64).ln()).ln())
        .collect();
    let lt: Vec<f64> = rows
        .iter()
        .map(|r| r.timings.total.as_secs_f64().ln())
        .collect();
    Ok(BenchReport {
        exponent_n: slope(&ln, &lt),
        exponent_n_log_n: slope(&lnl, &lt),
        rows,
    })
}

/// Free-space comparison of the plain and mollified multipliers.
#[derive(Clone, Debug)]
pub struct AlphaStudyConfig {
    pub kernel: Kernel,
    pub box_length: f64,
    pub n: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Values of alpha L / 2 pi.
    pub scaled_alphas: Vec<f64>,
    /// Fixed xi; tuned from the tolerance at `rc` otherwise.
    pub xi: Option<f64>,
    pub rc: f64,
    pub window_p: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaRow {
    pub scaled_alpha: f64,
    pub alpha: f64,
    pub xi: f64,
    /// Max abs error against the direct sum.
    pub error_plain: f64,
    pub error_mollified: f64,
    /// Max abs difference between the two variants.
    pub difference: f64,
    /// G^F(0) - G^{F,R}(0).
    pub zero_mode_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaReport {
    pub rows: Vec<AlphaRow>,
    /// Largest swept alpha L / 2 pi at which the plain multiplier is more
    /// than ten times less accurate than the mollified one.
    pub threshold: Option<f64>,
}

pub fn alpha_study(cfg: &AlphaStudyConfig) -> Result<AlphaReport> {
    let l = cfg.box_length;
    let cloud = random_cloud(cfg.seed, cfg.n, l, cfg.kernel);
    let m = SystemMoments::from_cloud(&cloud, l);
    let mut rows = Vec::new();
    for &a in &cfg.scaled_alphas {
        let alpha = a * 2.0 * PI / l;
        let tuned = match cfg.xi {
            Some(xi) => tune_for_xi(cfg.tolerance, xi, alpha, &m, Setting::Free, cfg.window_p)?,
            None => tune(
                cfg.tolerance,
                cfg.rc,
                alpha,
                &m,
                Setting::Free,
                cfg.window_p,
            )?,
        };
        let mut params = EwaldParams::new(alpha, tuned.xi, l, tuned.rc, tuned.k_inf);
        params.window_p = cfg.window_p;
        params.tolerance = cfg.tolerance;
        let kp = params.kernel_params()?;
        let exact = direct_sum(&cloud, &cloud.positions, &kp, Setting::Free)?;
        let moll = evaluate(&cloud, &cloud.positions, Setting::Free, &params)?;
        params.multiplier = FreeMultiplier::Plain;
        let plain = evaluate(&cloud, &cloud.positions, Setting::Free, &params)?;
        let max_err = |v: &[f64], w: &[f64]| {
            v.iter()
                .zip(w)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        let opts = FreeSpaceOptions {
            tolerance: cfg.tolerance,
            ..Default::default()
        };
        let plan = plan_freespace(&kp, tuned.k_inf, cfg.window_p, &opts)?;
        let gap = g_fourier_periodic(0.0, &kp)? - g_fourier_freespace(0.0, &kp, plan.moll)?;
        rows.push(AlphaRow {
            scaled_alpha: a,
            alpha,
            xi: tuned.xi,
            error_plain: max_err(&plain.values, &exact),
            error_mollified: max_err(&moll.values, &exact),
            difference: max_err(&plain.values, &moll.values),
            zero_mode_gap: gap,
        });
    }
    let threshold = rows
        .iter()
        .filter(|r| r.error_plain > 10.0 * r.error_mollified)
        .map(|r| r.scaled_alpha)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    Ok(AlphaReport { rows, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|v| (3.0 * v.powf(1.5)).ln())
            .collect();
        assert!((slope(&x, &y).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(slope(&x[..1], &y[..1]), None);
    }

    #[test]
    fn real_tails_are_cumulative() {
        let cloud = random_cloud(3, 40, 2.0 * PI, Kernel::G);
        let p = KernelParams::new(1.0, 3.0, 2.0 * PI).unwrap();
        let t = real_tails(&cloud, &p, &[0.5, 0.1, 1.0, 10.0]);
        // positive kernel and strengths: tails shrink with the cutoff
        for (((a, b), c), d) in t[1].iter().zip(&t[0]).zip(&t[2]).zip(&t[3]) {
            assert!(a >= b && b >= c && c >= d);
        }
        assert!(t[3].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_sweep_has_no_rows() {
        let cfg = SweepConfig {
            kernel: Kernel::G,
            alpha: 1.0,
            box_length: 2.0 * PI,
            n: 10,
            seed: 1,
            xis: vec![3.0],
            cutoffs: vec![],
            wavenumbers: vec![],
        };
        assert!(sweep(&cfg).unwrap().is_empty());
    }
}
