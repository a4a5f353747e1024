//! Real-space Ewald sums, direct O(N^2) reference sums and the cutoff
//! direct sum for strongly screened kernels.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::geometry::{
    build_cell_list, check_points_in_box, CellList, Domain, PointCloud, Strengths,
};
use crate::kernels::{g_real_raw, g_self, h_real_factor, KernelParams, Setting};
use crate::specfun::{k0, k1};
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealSumConfig {
    pub cutoff: f64,
    /// Add the self-interaction term for a target that coincides with a
    /// source.
    pub include_self: bool,
}

impl RealSumConfig {
    pub fn new(cutoff: f64) -> Self {
        RealSumConfig {
            cutoff,
            include_self: true,
        }
    }
}

fn domain_for(setting: Setting, params: &KernelParams) -> Domain {
    match setting {
        Setting::Periodic => Domain::Periodic {
            side: params.box_length,
        },
        Setting::Free => Domain::Free,
    }
}

fn coincidence(t: usize, target: Vec2) -> Error {
    Error::Singularity(format!(
        "target {t} at ({}, {}) coincides with two sources",
        target.x, target.y
    ))
}

/// Per-target sum over cell-list neighbours with a pair function of
/// (source index, separation, r^2). Coincident pairs go to `on_self`.
fn neighbor_sum<F, S>(list: &CellList, targets: &[Vec2], pair: F, on_self: S) -> Result<Vec<f64>>
where
    F: Fn(usize, Vec2, f64) -> f64 + Sync,
    S: Fn(usize) -> f64 + Sync,
{
    targets
        .par_iter()
        .enumerate()
        .map(|(t, &x)| {
            let mut acc = 0.0;
            let mut hit: Option<usize> = None;
            let mut dup = false;
            list.for_each_neighbor(x, |nb| {
                let r2 = nb.sep.norm2();
                if r2 == 0.0 {
                    dup |= hit.is_some();
                    hit = Some(nb.index);
                } else {
                    acc += pair(nb.index, nb.sep, r2);
                }
            });
            if dup {
                return Err(coincidence(t, x));
            }
            if let Some(n) = hit {
                acc += on_self(n);
            }
            Ok(acc)
        })
        .collect()
}

/// Truncated real-space sum of G^R (scalar strengths).
pub fn real_sum_g(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    cfg: &RealSumConfig,
    setting: Setting,
) -> Result<Vec<f64>> {
    let Strengths::Scalar(f) = &sources.strengths else {
        return param("kernel G needs scalar strengths");
    };
    let list = build_cell_list(&sources.positions, cfg.cutoff, domain_for(setting, params))?;
    let selfv = if cfg.include_self {
        g_self(params)
    } else {
        0.0
    };
    neighbor_sum(
        &list,
        targets,
        |n, _, r2| f[n] * g_real_raw(r2, params),
        |n| f[n] * selfv,
    )
}

/// Truncated real-space sum of H^R contracted with vector strengths.
pub fn real_sum_h(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    cfg: &RealSumConfig,
    setting: Setting,
) -> Result<Vec<f64>> {
    let Strengths::Vector(f) = &sources.strengths else {
        return param("kernel H needs vector strengths");
    };
    let list = build_cell_list(&sources.positions, cfg.cutoff, domain_for(setting, params))?;
    neighbor_sum(
        &list,
        targets,
        |n, sep, r2| f[n].dot(sep) * h_real_factor(r2, params),
        |_| 0.0,
    )
}

/// Dispatches on the strength type.
pub fn real_sum(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    cfg: &RealSumConfig,
    setting: Setting,
) -> Result<Vec<f64>> {
    match sources.strengths {
        Strengths::Scalar(_) => real_sum_g(sources, targets, params, cfg, setting),
        Strengths::Vector(_) => real_sum_h(sources, targets, params, cfg, setting),
    }
}

/// Unsplit kernel contribution of one source at separation `sep`.
#[inline]
fn kernel_term(strengths: &Strengths, n: usize, sep: Vec2, alpha: f64) -> f64 {
    let r = sep.norm();
    match strengths {
        Strengths::Scalar(f) => f[n] * k0(alpha * r),
        Strengths::Vector(f) => f[n].dot(sep) * (k1(alpha * r) / r),
    }
}

/// Image terms are dropped beyond this value of alpha*r.
const IMAGE_DECAY: f64 = 50.0;
const MAX_SHELLS: i64 = 2000;

/// Exact O(N^2) sum of the unsplit kernels; in the periodic setting the
/// image lattice is summed shell by shell, starting with |p| <= 2, until a
/// shell changes no result by more than 1e-14 (relative to max(1, |u|)).
/// A target that coincides with a source skips that term.
pub fn direct_sum(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    setting: Setting,
) -> Result<Vec<f64>> {
    let a = params.alpha;
    let l = params.box_length;
    if setting == Setting::Periodic {
        sources.check_in_box(l)?;
        check_points_in_box(targets, l, false)?;
    }
    targets
        .par_iter()
        .enumerate()
        .map(|(t, &x)| {
            let mut hits = 0;
            let mut visit = |shift: Vec2| -> f64 {
                let mut s = 0.0;
                for (n, &y) in sources.positions.iter().enumerate() {
                    let sep = x - (y + shift);
                    let r2 = sep.norm2();
                    if r2 == 0.0 {
                        hits += 1;
                        continue;
                    }
                    if a * a * r2 > IMAGE_DECAY * IMAGE_DECAY && shift != Vec2::ZERO {
                        continue;
                    }
                    s += kernel_term(&sources.strengths, n, sep, a);
                }
                s
            };
            let mut total = 0.0;
            match setting {
                Setting::Free => total = visit(Vec2::ZERO),
                Setting::Periodic => {
                    let mut shell = 0i64;
                    loop {
                        let mut s = 0.0;
                        for p1 in -shell..=shell {
                            for p2 in -shell..=shell {
                                if p1.abs().max(p2.abs()) == shell {
                                    s += visit(Vec2::new(p1 as f64 * l, p2 as f64 * l));
                                }
                            }
                        }
                        total += s;
                        if shell >= 2 && s.abs() < 1e-14 * total.abs().max(1.0) {
                            break;
                        }
                        shell += 1;
                        if shell > MAX_SHELLS {
                            return Err(Error::Tuning(format!(
                                "periodic image sum did not converge for alpha*L = {}",
                                a * l
                            )));
                        }
                    }
                }
            }
            if hits > 1 {
                return Err(coincidence(t, x));
            }
            Ok(total)
        })
        .collect()
}

/// Cutoff r~ with sqrt(pi/(2 a r)) e^{-a r} = eps.
pub fn truncation_radius(alpha: f64, eps: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(eps > 0.0) {
        return param(format!(
            "truncation radius needs alpha > 0 and eps > 0 (alpha {alpha}, eps {eps})"
        ));
    }
    // in t = a r: 0.5 ln(pi/(2t)) - t - ln(eps) is decreasing
    let g = |t: f64| 0.5 * (std::f64::consts::PI / (2.0 * t)).ln() - t - eps.ln();
    let (mut lo, mut hi) = (1e-300f64, 1.0f64);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = if lo < 1e-12 * hi {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    // hi satisfies the envelope inequality
    Ok(hi / alpha)
}

/// Neighbour-list sum of the unsplit kernel within r~ from
/// [`truncation_radius`]. Falls back to [`direct_sum`] when r~ does not
/// fit the domain.
pub fn truncated_direct_sum(
    sources: &PointCloud,
    targets: &[Vec2],
    params: &KernelParams,
    eps: f64,
    setting: Setting,
) -> Result<Vec<f64>> {
    let r = truncation_radius(params.alpha, eps)?;
    let fits = match setting {
        Setting::Periodic => r <= 0.5 * params.box_length,
        Setting::Free => r <= params.box_length,
    };
    if !fits {
        log::warn!("cutoff radius {r} exceeds the domain; using the full direct sum");
        return direct_sum(sources, targets, params, setting);
    }
    let list = build_cell_list(&sources.positions, r, domain_for(setting, params))?;
    let a = params.alpha;
    neighbor_sum(
        &list,
        targets,
        |n, sep, _| kernel_term(&sources.strengths, n, sep, a),
        |_| 0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{g_real, h_real};
    use std::f64::consts::PI;

    fn p() -> KernelParams {
        KernelParams::new(1.0, 3.0, 2.0 * PI).unwrap()
    }

    #[test]
    fn one_pair_sums() {
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 1.0)], vec![1.0]).unwrap();
        let t = [Vec2::new(1.4, 1.3)];
        let cfg = RealSumConfig::new(1.0);
        let v = real_sum_g(&src, &t, &p(), &cfg, Setting::Periodic).unwrap();
        assert_eq!(
            v[0],
            g_real((t[0] - Vec2::new(1.0, 1.0)).norm(), &p()).unwrap()
        );
        let far = [Vec2::new(4.0, 4.0)];
        assert_eq!(
            real_sum_g(&src, &far, &p(), &cfg, Setting::Free).unwrap()[0],
            0.0
        );

        let srch =
            PointCloud::vector(vec![Vec2::new(1.0, 1.0)], vec![Vec2::new(1.0, 0.0)]).unwrap();
        let vh = real_sum_h(&srch, &t, &p(), &cfg, Setting::Free).unwrap();
        assert!((vh[0] - h_real(Vec2::new(0.4, 0.3), &p()).unwrap().x).abs() < 1e-16);
    }

    #[test]
    fn self_term_added_once() {
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 1.0)], vec![2.0]).unwrap();
        let t = [Vec2::new(1.0, 1.0)];
        let mut cfg = RealSumConfig::new(1.0);
        let v = real_sum_g(&src, &t, &p(), &cfg, Setting::Free).unwrap();
        assert_eq!(v[0], 2.0 * g_self(&p()));
        cfg.include_self = false;
        assert_eq!(
            real_sum_g(&src, &t, &p(), &cfg, Setting::Free).unwrap()[0],
            0.0
        );
    }

    #[test]
    fn coincident_sources_are_an_error() {
        let src = PointCloud::scalar(vec![Vec2::new(1.0, 1.0); 2], vec![1.0; 2]).unwrap();
        let t = [Vec2::new(1.0, 1.0)];
        assert!(real_sum_g(&src, &t, &p(), &RealSumConfig::new(1.0), Setting::Free).is_err());
        assert!(direct_sum(&src, &t, &p(), Setting::Free).is_err());
    }

    #[test]
    fn direct_sum_single_pair() {
        let src =
            PointCloud::vector(vec![Vec2::new(1.0, 1.0)], vec![Vec2::new(0.3, -0.2)]).unwrap();
        let t = [Vec2::new(2.0, 0.5)];
        let v = direct_sum(&src, &t, &p(), Setting::Free).unwrap();
        let sep = Vec2::new(1.0, -0.5);
        let want = crate::kernels::h_direct(sep, &p())
            .unwrap()
            .dot(Vec2::new(0.3, -0.2));
        assert!((v[0] - want).abs() < 1e-16);
    }

    #[test]
    fn truncation_radius_satisfies_envelope() {
        let r = truncation_radius(10.0, 1e-12).unwrap();
        let env = |r: f64| (PI / (2.0 * 10.0 * r)).sqrt() * (-10.0 * r).exp();
        assert!(env(r) <= 1e-12);
        assert!(env(r * (1.0 - 1e-9)) > 1e-12);
        // the envelope crosses 1 between r = 0.05 and r = 0.06
        let tiny = truncation_radius(10.0, 1.0).unwrap();
        assert!(tiny > 0.05 && tiny < 0.06 && env(tiny) <= 1.0);
    }

    #[test]
    fn loose_eps_gives_near_zero_for_separated_points() {
        let src = PointCloud::scalar(
            vec![Vec2::new(1.0, 1.0), Vec2::new(3.0, 3.0)],
            vec![1.0, 1.0],
        )
        .unwrap();
        let params = KernelParams::new(10.0, 1.0, 2.0 * PI).unwrap();
        let v = truncated_direct_sum(&src, &src.positions, &params, 1.0, Setting::Free).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }
}
