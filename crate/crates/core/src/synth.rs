//! Synthetic test configurations: uniform positions in [0, L)^2 and
//! strengths uniform in [0, 1], drawn from a ChaCha20 stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::geometry::{PointCloud, Strengths};
use crate::kernels::Kernel;
use crate::vec2::Vec2;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn uniform_points(rng: &mut ChaCha20Rng, n: usize, side: f64) -> Vec<Vec2> {
    (0..n)
        .map(|_| {
            let x: f64 = rng.random::<f64>() * side;
            let y: f64 = rng.random::<f64>() * side;
            // rounding can land exactly on the upper edge
            Vec2::new(
                x.min(side * (1.0 - f64::EPSILON)),
                y.min(side * (1.0 - f64::EPSILON)),
            )
        })
        .collect()
}

pub fn uniform_strengths(rng: &mut ChaCha20Rng, n: usize, kernel: Kernel) -> Strengths {
    match kernel {
        Kernel::G => Strengths::Scalar((0..n).map(|_| rng.random::<f64>()).collect()),
        Kernel::H => Strengths::Vector(
            (0..n)
                .map(|_| Vec2::new(rng.random(), rng.random()))
                .collect(),
        ),
    }
}

/// `n` sources with positions then strengths drawn from `seed`.
pub fn random_cloud(seed: u64, n: usize, side: f64, kernel: Kernel) -> PointCloud {
    let mut r = rng(seed);
    let positions = uniform_points(&mut r, n, side);
    let strengths = uniform_strengths(&mut r, n, kernel);
    PointCloud {
        positions,
        strengths,
    }
}
