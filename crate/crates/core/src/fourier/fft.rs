//! Square 2D FFTs. Forward applies e^{-i k.x}; the inverse is unnormalised.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Fft2 {
            n,
            fwd,
            inv,
            scratch_len,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, &*self.fwd);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, &*self.inv);
    }

    fn apply(&self, data: &mut [Complex64], f: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.n * self.n, "grid size mismatch");
        let mut scratch = vec![Complex64::default(); self.scratch_len];
        f.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
        f.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
    }
}

fn transpose(a: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + B).min(n) {
                    a.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Smallest even n' >= n whose only prime factors are 2, 3, 5 and 7.
pub fn fft_size(n: usize) -> usize {
    let mut m = n.max(2);
    if m % 2 == 1 {
        m += 1;
    }
    loop {
        let mut r = m;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 2;
    }
}

/// Signed frequency index of position `i` on an `n`-point grid, in
/// [-n/2, n/2 - 1].
#[inline]
pub fn freq_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
