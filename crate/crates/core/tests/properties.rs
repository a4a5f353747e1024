use proptest::prelude::*;

use yukawa_ewald::geometry::{build_cell_list, Domain};
use yukawa_ewald::io::{parse_points, parse_target_spec};
use yukawa_ewald::kernels::{g_real, h_real};
use yukawa_ewald::realspace::{real_sum, RealSumConfig};
use yukawa_ewald::{KernelParams, PointCloud, Setting, Vec2};

fn points(side: f64, max: usize) -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec(
        (0.0..side, 0.0..side).prop_map(|(x, y)| Vec2::new(x, y)),
        1..max,
    )
}

// (source index, image shift in box units) of every pair within the cutoff
fn brute_force(
    points: &[Vec2],
    target: Vec2,
    cutoff: f64,
    side: Option<f64>,
) -> Vec<(usize, i64, i64)> {
    let mut out = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let images: &[i64] = if side.is_some() { &[-1, 0, 1] } else { &[0] };
        for &sx in images {
            for &sy in images {
                let l = side.unwrap_or(0.0);
                let sep = target - (p + Vec2::new(sx as f64 * l, sy as f64 * l));
                if sep.norm2() < cutoff * cutoff {
                    out.push((i, sx, sy));
                }
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn periodic_cell_list_finds_every_image_once(
        pts in points(3.0, 60),
        target in (0.0..3.0f64, 0.0..3.0f64),
        frac in 0.05..0.5f64,
    ) {
        let side = 3.0;
        let cutoff = frac * side;
        let cl = build_cell_list(&pts, cutoff, Domain::Periodic { side }).unwrap();
        let t = Vec2::new(target.0, target.1);
        let mut got: Vec<(usize, i64, i64)> = cl
            .neighbors(t)
            .iter()
            .map(|nb| (nb.index, (nb.shift.x / side).round() as i64, (nb.shift.y / side).round() as i64))
            .collect();
        got.sort();
        prop_assert_eq!(got, brute_force(&pts, t, cutoff, Some(side)));
    }

    #[test]
    fn free_cell_list_matches_brute_force(
        pts in points(5.0, 60),
        target in (-1.0..6.0f64, -1.0..6.0f64),
        cutoff in 0.05..3.0f64,
    ) {
        let cl = build_cell_list(&pts, cutoff, Domain::Free).unwrap();
        let t = Vec2::new(target.0, target.1);
        let mut got: Vec<(usize, i64, i64)> = cl.neighbors(t).iter().map(|nb| (nb.index, 0, 0)).collect();
        got.sort();
        prop_assert_eq!(got, brute_force(&pts, t, cutoff, None));
    }

    #[test]
    fn real_sum_is_symmetric_for_g(a in (0.0..6.0f64, 0.0..6.0f64), b in (0.0..6.0f64, 0.0..6.0f64)) {
        let (a, b) = (Vec2::new(a.0, a.1), Vec2::new(b.0, b.1));
        prop_assume!((a - b).norm2() > 1e-6);
        let p = KernelParams::new(1.0, 3.0, 6.0).unwrap();
        let cfg = RealSumConfig::new(2.5);
        let ab = real_sum(&PointCloud::scalar(vec![a], vec![1.0]).unwrap(), &[b], &p, &cfg, Setting::Free).unwrap();
        let ba = real_sum(&PointCloud::scalar(vec![b], vec![1.0]).unwrap(), &[a], &p, &cfg, Setting::Free).unwrap();
        prop_assert!((ab[0] - ba[0]).abs() <= 1e-15 * ab[0].abs().max(1e-300));
    }

    #[test]
    fn h_real_is_odd_and_radial(x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let r = Vec2::new(x, y);
        prop_assume!(r.norm2() > 1e-8);
        let p = KernelParams::new(0.7, 2.0, 6.0).unwrap();
        let h = h_real(r, &p).unwrap();
        let hm = h_real(-r, &p).unwrap();
        prop_assert!((h.x + hm.x).abs() < 1e-15 && (h.y + hm.y).abs() < 1e-15);
        // parallel to r
        prop_assert!((h.x * r.y - h.y * r.x).abs() <= 1e-14 * (h.x.abs() + h.y.abs()) * r.norm2().sqrt());
        prop_assert!(g_real(r.norm2().sqrt(), &p).unwrap() > 0.0);
    }

    #[test]
    fn point_parser_never_panics(s in ".{0,200}") {
        let _ = parse_points(&s);
    }

    #[test]
    fn point_parser_never_panics_on_csv_like_input(
        rows in prop::collection::vec(prop::collection::vec("[-+0-9.eE]{0,8}|nan|inf|", 0..5), 0..8)
    ) {
        let mut s = String::from("x,y,f\n");
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        let _ = parse_points(&s);
    }

    #[test]
    fn target_spec_parser_never_panics(s in "(grid:|file:|random)?.{0,40}") {
        let _ = parse_target_spec(&s);
    }
}
