use std::path::Path;

use yukawa_ewald::estimate::{
    rc_for_neighbors, real_estimate, tune, tune_for_xi, SystemMoments, Tuned,
};
use yukawa_ewald::ewald::{EwaldResult, EwaldTimings};
use yukawa_ewald::experiments::{
    alpha_study, bench, sweep, AlphaStudyConfig, BenchConfig, SweepConfig, SweepPart,
};
use yukawa_ewald::io::{grid_targets, parse_points, parse_target_spec, TargetSpec};
use yukawa_ewald::synth::random_cloud;
use yukawa_ewald::{
    evaluate, evaluate_ongrid, Error, EwaldParams, Kernel, PointCloud, Result, Setting, Strengths,
    Vec2,
};

use crate::args::{
    AlphaArgs, BenchArgs, Common, EvalArgs, PartArg, SettingArg, SweepArgs, TuneArgs,
};
use crate::report::{num, real, timing_fields, Report};

// Mean neighbour count behind the default cutoff.
const DEFAULT_NEIGHBORS: f64 = 30.0;

fn parameter<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

fn setting_or(common: &Common, default: SettingArg) -> Setting {
    common.setting.unwrap_or(default).into()
}

fn setting_name(s: Setting) -> &'static str {
    match s {
        Setting::Periodic => "per",
        Setting::Free => "free",
    }
}

fn kernel_name(k: Kernel) -> &'static str {
    match k {
        Kernel::G => "g",
        Kernel::H => "h",
    }
}

fn echo_common(r: &mut Report, c: &Common, setting: Setting) {
    r.meta("kernel", kernel_name(c.kernel.into()));
    r.meta("setting", setting_name(setting));
    r.meta("alpha", real(c.alpha));
    r.meta("box", real(c.box_length));
    r.meta("tol", real(c.tol));
    r.meta("window_p", c.window_p);
}

fn list(v: &[f64]) -> String {
    v.iter().map(|&x| real(x)).collect::<Vec<_>>().join(",")
}

fn check_box(c: &Common) -> Result<()> {
    if !(c.box_length.is_finite() && c.box_length > 0.0) {
        return parameter(format!("--box must be positive, got {}", c.box_length));
    }
    Ok(())
}

fn require_seed(c: &Common) -> Result<u64> {
    c.seed
        .ok_or_else(|| Error::Parameter("--seed is required for synthetic points".into()))
}

/// Sources from a CSV file whose strength columns match the kernel.
fn load_sources(path: &Path, kernel: Kernel, side: f64) -> Result<PointCloud> {
    let data = parse_points(&std::fs::read_to_string(path)?)?;
    let strengths = match (kernel, data.strengths) {
        (Kernel::G, Some(s @ Strengths::Scalar(_)))
        | (Kernel::H, Some(s @ Strengths::Vector(_))) => s,
        (Kernel::G, _) => {
            return Err(Error::Input(format!(
                "{}: kernel g needs columns x,y,f",
                path.display()
            )))
        }
        (Kernel::H, _) => {
            return Err(Error::Input(format!(
                "{}: kernel h needs columns x,y,f1,f2",
                path.display()
            )))
        }
    };
    let cloud = PointCloud::new(data.positions, strengths)?;
    in_box(&cloud.positions, side, "source")?;
    Ok(cloud)
}

fn in_box(points: &[Vec2], side: f64, what: &str) -> Result<()> {
    match points
        .iter()
        .position(|p| !(p.x >= 0.0 && p.x < side && p.y >= 0.0 && p.y < side))
    {
        Some(i) => Err(Error::Input(format!(
            "{what} {i} at ({}, {}) outside the box [0, {side})^2",
            points[i].x, points[i].y
        ))),
        None => Ok(()),
    }
}

fn sources(c: &Common, file: Option<&Path>, n: usize, r: &mut Report) -> Result<PointCloud> {
    let kernel = c.kernel.into();
    match file {
        Some(path) => {
            r.meta("sources", format!("{path:?}"));
            load_sources(path, kernel, c.box_length)
        }
        None => {
            let seed = require_seed(c)?;
            if n == 0 {
                return parameter("--n must be positive");
            }
            r.meta("sources", "synthetic");
            r.meta("n", n);
            r.meta("seed", seed);
            Ok(random_cloud(seed, n, c.box_length, kernel))
        }
    }
}

/// Tuner output with explicit --xi / --rc applied on top.
fn resolve(
    c: &Common,
    setting: Setting,
    cloud: &PointCloud,
    xi: Option<f64>,
    rc: Option<f64>,
) -> Result<Tuned> {
    let m = SystemMoments::from_cloud(cloud, c.box_length);
    let tuned = match (xi, rc) {
        (Some(xi), rc) => {
            let mut t = tune_for_xi(c.tol, xi, c.alpha, &m, setting, c.window_p)?;
            if let Some(rc) = rc {
                t.rc = rc;
                t.real_estimate = real_estimate(rc, xi, c.alpha, &m);
            }
            t
        }
        (None, Some(rc)) => tune(c.tol, rc, c.alpha, &m, setting, c.window_p)?,
        (None, None) => {
            let rc = rc_for_neighbors(DEFAULT_NEIGHBORS, cloud.len(), c.box_length)
                .min(0.4 * c.box_length);
            tune(c.tol, rc, c.alpha, &m, setting, c.window_p)?
        }
    };
    for d in &tuned.diagnostics {
        log::warn!("{d}");
    }
    Ok(tuned)
}

fn report_timings(r: &mut Report, c: &Common, t: &EwaldTimings) {
    if c.timings {
        r.timings(t);
    }
    for (k, d) in timing_fields(t) {
        eprintln!("# time_{k}_s: {}", d.as_secs_f64());
    }
}

enum Targets {
    Sources,
    Points(Vec<Vec2>),
    Grid { nx: usize, ny: usize },
}

pub fn eval(a: &EvalArgs) -> Result<Report> {
    let c = &a.common;
    check_box(c)?;
    let setting = setting_or(c, SettingArg::Per);
    let mut r = Report::new("eval", &["x", "y", "u"]);
    echo_common(&mut r, c, setting);
    let cloud = sources(c, a.sources.as_deref(), a.n, &mut r)?;
    let spec =
        parse_target_spec(&a.targets).map_err(|e| Error::Parameter(format!("--targets: {e}")))?;
    r.meta("targets", &a.targets);
    let targets = match spec {
        TargetSpec::Random => Targets::Sources,
        TargetSpec::Grid { nx, ny } => Targets::Grid { nx, ny },
        TargetSpec::File(path) => {
            let pts = parse_points(&std::fs::read_to_string(&path)?)?.positions;
            in_box(&pts, c.box_length, "target")?;
            Targets::Points(pts)
        }
    };
    if a.ongrid && !matches!(targets, Targets::Grid { nx, ny } if nx == ny) {
        return parameter("--ongrid needs square grid targets grid:MxM");
    }
    r.meta("ongrid", a.ongrid);
    r.meta("multiplier", format!("{:?}", a.multiplier).to_lowercase());

    let tuned = resolve(c, setting, &cloud, a.xi, a.rc)?;
    let mut params = EwaldParams::new(c.alpha, tuned.xi, c.box_length, tuned.rc, tuned.k_inf);
    params.window_p = c.window_p;
    params.tolerance = c.tol;
    params.grid = a.grid_size;
    params.multiplier = a.multiplier.into();
    r.meta("xi", real(tuned.xi));
    r.meta("rc", real(tuned.rc));
    r.meta("k_inf", real(tuned.k_inf));
    r.meta(
        "grid_size",
        a.grid_size.map_or("auto".to_string(), |m| m.to_string()),
    );

    let (points, res): (Vec<Vec2>, EwaldResult) = match targets {
        Targets::Sources => {
            let res = evaluate(&cloud, &cloud.positions, setting, &params)?;
            (cloud.positions.clone(), res)
        }
        Targets::Points(pts) => {
            let res = evaluate(&cloud, &pts, setting, &params)?;
            (pts, res)
        }
        Targets::Grid { nx, ny } => {
            let pts = grid_targets(nx, ny, c.box_length);
            let res = if a.ongrid {
                evaluate_ongrid(&cloud, nx, setting, &params)?
            } else {
                evaluate(&cloud, &pts, setting, &params)?
            };
            (pts, res)
        }
    };
    for (p, u) in points.iter().zip(&res.values) {
        r.row(vec![num(p.x), num(p.y), num(*u)]);
    }
    r.footer("grid", res.grid);
    r.footer("real_estimate", real(tuned.real_estimate));
    r.footer("k_estimate", real(tuned.k_estimate));
    for d in &tuned.diagnostics {
        r.footer("warning", d);
    }
    report_timings(&mut r, c, &res.timings);
    Ok(r)
}

pub fn tune_cmd(a: &TuneArgs) -> Result<Report> {
    let c = &a.common;
    check_box(c)?;
    let setting = setting_or(c, SettingArg::Per);
    let mut r = Report::new(
        "tune",
        &["xi", "rc", "k_inf", "grid", "real_estimate", "k_estimate"],
    );
    echo_common(&mut r, c, setting);
    let cloud = sources(c, a.sources.as_deref(), a.n, &mut r)?;
    let t = resolve(c, setting, &cloud, a.xi, a.rc)?;
    r.row(vec![
        num(t.xi),
        num(t.rc),
        num(t.k_inf),
        t.grid.to_string(),
        num(t.real_estimate),
        num(t.k_estimate),
    ]);
    for d in &t.diagnostics {
        r.footer("warning", d);
    }
    Ok(r)
}

pub fn sweep_cmd(a: &SweepArgs) -> Result<Report> {
    let c = &a.common;
    check_box(c)?;
    let setting = setting_or(c, SettingArg::Per);
    if setting != Setting::Periodic {
        return parameter("sweep runs in the periodic setting only");
    }
    let seed = require_seed(c)?;
    let mut r = Report::new("sweep", &["part", "xi", "cut", "measured", "estimate"]);
    echo_common(&mut r, c, setting);
    r.meta("n", a.n);
    r.meta("seed", seed);
    r.meta("xis", list(&a.xis));
    r.meta("part", format!("{:?}", a.part).to_lowercase());
    let want_real = a.part != PartArg::K;
    let want_k = a.part != PartArg::Real;
    let mut rows = Vec::new();
    for &xi in &a.xis {
        let scaled = |step: f64| (1..=a.steps).map(|i| i as f64 * step).collect::<Vec<_>>();
        let cutoffs = match &a.cutoffs {
            Some(v) => v.clone(),
            None => scaled(a.rc_step / xi),
        };
        let wavenumbers = match &a.wavenumbers {
            Some(v) => v.clone(),
            None => scaled(a.k_step * xi),
        };
        let cfg = SweepConfig {
            kernel: c.kernel.into(),
            alpha: c.alpha,
            box_length: c.box_length,
            n: a.n,
            seed,
            xis: vec![xi],
            cutoffs: if want_real { cutoffs } else { Vec::new() },
            wavenumbers: if want_k { wavenumbers } else { Vec::new() },
        };
        if cfg.cutoffs.is_empty() && cfg.wavenumbers.is_empty() {
            continue;
        }
        rows.extend(sweep(&cfg)?);
    }
    match &a.cutoffs {
        Some(v) => r.meta("cutoffs", list(v)),
        None => r.meta("cutoffs", format!("{} steps of {}/xi", a.steps, a.rc_step)),
    }
    match &a.wavenumbers {
        Some(v) => r.meta("wavenumbers", list(v)),
        None => r.meta(
            "wavenumbers",
            format!("{} steps of {} xi", a.steps, a.k_step),
        ),
    }
    for row in rows {
        let part = match row.part {
            SweepPart::Real => "real",
            SweepPart::Kspace => "kspace",
        };
        r.row(vec![
            part.into(),
            num(row.xi),
            num(row.cut),
            num(row.measured),
            num(row.estimate),
        ]);
    }
    Ok(r)
}

pub fn bench_cmd(a: &BenchArgs) -> Result<Report> {
    let c = &a.common;
    check_box(c)?;
    let setting = setting_or(c, SettingArg::Per);
    let seed = require_seed(c)?;
    let header = [
        "n",
        "rc",
        "xi",
        "k_inf",
        "grid",
        "real_s",
        "precompute_s",
        "spread_s",
        "fft_s",
        "scale_s",
        "ifft_s",
        "gather_s",
        "total_s",
    ];
    let mut r = Report::new("bench", &header);
    echo_common(&mut r, c, setting);
    r.meta("seed", seed);
    r.meta(
        "sizes",
        a.sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    r.meta("neighbors", real(a.neighbors));
    r.meta("repeats", a.repeats);
    let report = bench(&BenchConfig {
        kernel: c.kernel.into(),
        setting,
        sizes: a.sizes.clone(),
        alpha: c.alpha,
        box_length: c.box_length,
        tolerance: c.tol,
        neighbors: a.neighbors,
        seed,
        window_p: c.window_p,
        repeats: a.repeats,
    })?;
    for row in &report.rows {
        let mut cells = vec![
            row.n.to_string(),
            num(row.rc),
            num(row.xi),
            num(row.k_inf),
            row.grid.to_string(),
        ];
        cells.extend(
            timing_fields(&row.timings)
                .iter()
                .map(|(_, d)| num(d.as_secs_f64())),
        );
        r.row(cells);
    }
    let fit = |v: Option<f64>| v.map_or("none".to_string(), real);
    r.footer("exponent_n", fit(report.exponent_n));
    r.footer("exponent_n_log_n", fit(report.exponent_n_log_n));
    Ok(r)
}

/// 21 log-spaced values of alpha L / 2 pi in [0.05, 5].
fn default_alphas() -> Vec<f64> {
    (0..21)
        .map(|i| 0.05 * 100f64.powf(i as f64 / 20.0))
        .collect()
}

pub fn alpha_cmd(a: &AlphaArgs) -> Result<Report> {
    let c = &a.common;
    check_box(c)?;
    let setting = setting_or(c, SettingArg::Free);
    if setting != Setting::Free {
        return parameter("alpha-study runs in free space only");
    }
    let seed = require_seed(c)?;
    let header = [
        "alpha_scaled",
        "alpha",
        "xi",
        "error_plain",
        "error_mollified",
        "difference",
        "zero_mode_gap",
    ];
    let mut r = Report::new("alpha-study", &header);
    echo_common(&mut r, c, setting);
    r.meta("n", a.n);
    r.meta("seed", seed);
    let alphas = a.alphas.clone().unwrap_or_else(default_alphas);
    r.meta("alphas", list(&alphas));
    let xi = match (a.xi, a.rc) {
        (None, None) => Some(10.0),
        (xi, _) => xi,
    };
    let rc = a.rc.unwrap_or(f64::NAN);
    match xi {
        Some(xi) => r.meta("xi", real(xi)),
        None => r.meta("rc", real(rc)),
    }
    let report = alpha_study(&AlphaStudyConfig {
        kernel: c.kernel.into(),
        box_length: c.box_length,
        n: a.n,
        seed,
        tolerance: c.tol,
        scaled_alphas: alphas,
        xi,
        rc,
        window_p: c.window_p,
    })?;
    for row in &report.rows {
        r.row(
            [
                row.scaled_alpha,
                row.alpha,
                row.xi,
                row.error_plain,
                row.error_mollified,
                row.difference,
                row.zero_mode_gap,
            ]
            .iter()
            .map(|&v| num(v))
            .collect(),
        );
    }
    r.footer(
        "threshold",
        report.threshold.map_or("none".to_string(), real),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_alpha_grid_spans_the_range() {
        let v = default_alphas();
        assert_eq!(v.len(), 21);
        assert!((v[0] - 0.05).abs() < 1e-15 && (v[20] - 5.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
