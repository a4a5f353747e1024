use std::path::Path;
use std::process::{Command, Output};

const L: f64 = std::f64::consts::TAU;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yukawa-ewald"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn numeric_rows(csv: &str) -> Vec<Vec<f64>> {
    data_rows(csv)
        .iter()
        .map(|r| r.iter().map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by the trapezoidal rule,
// which converges geometrically for this analytic, rapidly decaying integrand
fn bessel_k(nu: f64, x: f64) -> f64 {
    let h = 0.02f64;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            return h * sum;
        }
        t += h;
    }
}

#[test]
fn single_pair_matches_kernel_formula() {
    let dir = tempfile::tempdir().unwrap();
    let (sx, sy, tx, ty): (f64, f64, f64, f64) = (1.0, 1.5, 3.5, 2.25);
    let targets = write(dir.path(), "t.csv", &format!("x,y\n{tx},{ty}\n"));
    let alpha = 1.3;
    let r = ((tx - sx).powi(2) + (ty - sy).powi(2)).sqrt();
    let explicit = [
        "--setting",
        "free",
        "--alpha",
        "1.3",
        "--xi",
        "4",
        "--rc",
        "2.5",
        "--grid-size",
        "96",
    ];

    let sources = write(dir.path(), "g.csv", &format!("x,y,f\n{sx},{sy},0.75\n"));
    let tspec = format!("file:{targets}");
    let mut args = vec![
        "eval",
        "--kernel",
        "g",
        "--sources",
        &sources,
        "--targets",
        &tspec,
    ];
    args.extend(explicit);
    let rows = numeric_rows(&stdout(&run(&args)));
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0][0], rows[0][1]), (tx, ty));
    let want = 0.75 * bessel_k(0.0, alpha * r);
    assert!(
        (rows[0][2] - want).abs() <= 1e-10 * want.abs(),
        "{} vs {want}",
        rows[0][2]
    );

    let sources = write(
        dir.path(),
        "h.csv",
        &format!("x,y,f1,f2\n{sx},{sy},0.2,-0.9\n"),
    );
    let mut args = vec![
        "eval",
        "--kernel",
        "h",
        "--sources",
        &sources,
        "--targets",
        &tspec,
    ];
    args.extend(explicit);
    let rows = numeric_rows(&stdout(&run(&args)));
    let want = bessel_k(1.0, alpha * r) * ((tx - sx) * 0.2 + (ty - sy) * -0.9) / r;
    assert!(
        (rows[0][2] - want).abs() <= 1e-10 * want.abs(),
        "{} vs {want}",
        rows[0][2]
    );
}

#[test]
fn grid_targets_match_direct_sum() {
    let dir = tempfile::tempdir().unwrap();
    // additive recurrence points: deterministic, well spread, no coincidences
    let frac = |v: f64| v - v.floor();
    let src: Vec<(f64, f64, f64)> = (1..=100)
        .map(|i| {
            let i = i as f64;
            (
                L * frac(0.5 + i * 0.754_877_666_2),
                L * frac(0.5 + i * 0.569_840_290_9),
                frac(i * 0.618_033_988_7),
            )
        })
        .collect();
    let mut text = String::from("x,y,f\n");
    for (x, y, f) in &src {
        text.push_str(&format!("{x:.17e},{y:.17e},{f:.17e}\n"));
    }
    let sources = write(dir.path(), "s.csv", &text);
    for ongrid in [false, true] {
        let mut args = vec!["eval", "--setting", "free", "--tol", "1e-12", "--xi", "10"];
        args.extend(["--sources", &sources, "--targets", "grid:100x100"]);
        if ongrid {
            args.push("--ongrid");
        }
        let rows = numeric_rows(&stdout(&run(&args)));
        assert_eq!(rows.len(), 10_000);
        let err = rows
            .iter()
            .map(|row| {
                let exact: f64 = src
                    .iter()
                    .map(|(x, y, f)| {
                        f * bessel_k(0.0, ((row[0] - x).powi(2) + (row[1] - y).powi(2)).sqrt())
                    })
                    .sum();
                (row[2] - exact).abs()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "ongrid={ongrid}: {err:e}");
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    for setting in ["per", "free"] {
        let args = [
            "eval",
            "--kernel",
            "h",
            "--setting",
            setting,
            "--n",
            "200",
            "--seed",
            "7",
            "--tol",
            "1e-10",
        ];
        let a = stdout(&run(&args));
        assert_eq!(a, stdout(&run(&args)));
        assert!(a.contains("# seed: 7") && a.contains(&format!("# setting: {setting}")));
        let other = [
            "eval",
            "--kernel",
            "h",
            "--setting",
            setting,
            "--n",
            "200",
            "--seed",
            "8",
            "--tol",
            "1e-10",
        ];
        assert_ne!(data_rows(&a), data_rows(&stdout(&run(&other))));
    }
}

#[test]
fn malformed_csv_is_an_input_error_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let sources = write(dir.path(), "bad.csv", "x,y,f\n1,2,0.5\n1,abc,0.5\n");
    let o = run(&["eval", "--sources", &sources]);
    assert_eq!(o.status.code(), Some(3));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let outside = write(dir.path(), "out.csv", "x,y,f\n1,7,0.5\n");
    assert_eq!(run(&["eval", "--sources", &outside]).status.code(), Some(3));
    let wrong_layout = write(dir.path(), "h.csv", "x,y,f\n1,2,0.5\n");
    assert_eq!(
        run(&["eval", "--kernel", "h", "--sources", &wrong_layout])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["eval", "--sources", "/nonexistent/points.csv"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn bad_parameters_exit_with_2() {
    let bad: &[&[&str]] = &[
        &["eval", "--seed", "1", "--alpha", "-1"],
        &["eval", "--seed", "1", "--tol", "0.5"],
        &["eval", "--seed", "1", "--targets", "grid:0x4"],
        &["eval", "--seed", "1", "--targets", "grid:4x5", "--ongrid"],
        &["eval", "--n", "10"],
        &["eval", "--seed", "1", "--kernel", "q"],
        &["sweep", "--seed", "1", "--setting", "free"],
        &["alpha-study", "--seed", "1", "--setting", "per"],
    ];
    for args in bad {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let out = stdout(&run(&["sweep", "--seed", "1", "--steps", "0"]));
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["part,xi,cut,measured,estimate"]);
}

#[test]
fn sweep_rows_follow_the_requested_grid() {
    let out = stdout(&run(&[
        "sweep", "--seed", "1", "--n", "60", "--xis", "4", "--steps", "3",
    ]));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 6);
    let cuts: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(cuts, [0.0625, 0.125, 0.1875, 2.0, 4.0, 6.0]);
    assert_eq!(rows.iter().filter(|r| r[0] == "real").count(), 3);
}

#[test]
fn bench_with_one_size_reports_no_fit() {
    let out = stdout(&run(&[
        "bench", "--seed", "1", "--sizes", "300", "--tol", "1e-8",
    ]));
    assert_eq!(data_rows(&out).len(), 1);
    assert!(out.contains("# exponent_n: none"));
}

#[test]
fn tune_reports_one_parameter_set() {
    let out = stdout(&run(&["tune", "--seed", "3", "--n", "100", "--xi", "5"]));
    let rows = numeric_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 5.0);
    assert!(rows[0][4] <= 1e-12 && rows[0][5] <= 1e-12);
}

#[test]
fn alpha_study_writes_one_row_per_alpha() {
    let out = stdout(&run(&[
        "alpha-study",
        "--seed",
        "2",
        "--n",
        "30",
        "--alphas",
        "0.1,3",
    ]));
    let rows = numeric_rows(&out);
    assert_eq!(rows.len(), 2);
    // plain multiplier far off at small alpha, in agreement at large alpha
    assert!(rows[0][3] > 1e-4 && rows[1][5] < 1e-8, "{rows:?}");
    assert!(out.contains("# threshold: 0.1"));
}

#[test]
fn out_flag_writes_the_file_and_timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let p = path.to_str().unwrap();
    let o = run(&["eval", "--seed", "4", "--n", "50", "--out", p]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data_rows(&text).len(), 50);
    assert!(!text.contains("time_"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("# time_total_s"));
    let with = stdout(&run(&["eval", "--seed", "4", "--n", "50", "--timings"]));
    for stage in [
        "real",
        "precompute",
        "spread",
        "fft",
        "scale",
        "ifft",
        "gather",
        "total",
    ] {
        assert!(with.contains(&format!("# time_{stage}_s: ")), "{stage}");
    }
}
