#![no_main]

use libfuzzer_sys::fuzz_target;
use yukawa_ewald::io::parse_points;
use yukawa_ewald::Strengths;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(points) = parse_points(text) else {
        return;
    };
    assert!(points.positions.iter().all(|p| p.is_finite()));
    match points.strengths {
        None => {}
        Some(Strengths::Scalar(f)) => {
            assert_eq!(f.len(), points.positions.len());
            assert!(f.iter().all(|v| v.is_finite()));
        }
        Some(Strengths::Vector(f)) => {
            assert_eq!(f.len(), points.positions.len());
            assert!(f.iter().all(|v| v.is_finite()));
        }
    }
});
