//! Ordinary Bessel functions J0, J1 and modified Bessel functions K0, K1.
//!
//! K0/K1 use the ascending series for `x <= 2` and Steed's evaluation of
//! Temme's continued fraction above. J0/J1 use the ascending series for
//! small arguments, Miller's backward recurrence in the transition range and
//! Hankel's asymptotic expansion for large arguments.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

use crate::error::{Error, Result};

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

const SERIES_MAX: f64 = 2.0;
// Above this K0/K1 underflow to zero.
const K_UNDERFLOW: f64 = 745.0;

/// Modified Bessel function of the second kind, order 0 or 1.
pub fn bessel_k(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K_{order}({x}) requires x > 0")));
    }
    match order {
        0 => Ok(k0(x)),
        1 => Ok(k1(x)),
        _ => Err(Error::Parameter(format!(
            "unsupported Bessel order {order}"
        ))),
    }
}

/// Bessel function of the first kind, order 0 or 1.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "J_{order}({x}) requires finite x >= 0"
        )));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        _ => Err(Error::Parameter(format!(
            "unsupported Bessel order {order}"
        ))),
    }
}

/// K0(x) for x > 0 (no argument checks).
#[inline]
pub fn k0(x: f64) -> f64 {
    k01(x).0
}

/// K1(x) for x > 0 (no argument checks).
#[inline]
pub fn k1(x: f64) -> f64 {
    k01(x).1
}

/// (K0(x), K1(x)).
pub fn k01(x: f64) -> (f64, f64) {
    if x <= SERIES_MAX {
        let s = small_k_series(x);
        (s.k0, s.k1)
    } else if x > K_UNDERFLOW {
        (0.0, 0.0)
    } else {
        let (s0, s1) = scaled_k01_cf(x);
        let e = (-x).exp();
        (s0 * e, s1 * e)
    }
}

/// `1 - x K1(x)`, accurate when x is small and the difference cancels.
pub fn one_minus_x_k1(x: f64) -> f64 {
    if x <= SERIES_MAX {
        small_k_series(x).one_minus_xk1
    } else {
        1.0 - x * k1(x)
    }
}

struct SmallK {
    k0: f64,
    k1: f64,
    one_minus_xk1: f64,
}

fn small_k_series(x: f64) -> SmallK {
    let t = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    // t^k/(k!)^2 and t^k/(k!(k+1)!)
    let mut a = 1.0;
    let mut b = 1.0;
    let mut harmonic = 0.0; // H_k
    let mut i0 = 0.0;
    let mut s0 = 0.0;
    let mut i1 = 0.0;
    let mut s1 = 0.0;
    let mut k = 0usize;
    loop {
        let harmonic_next = harmonic + 1.0 / (k as f64 + 1.0);
        i0 += a;
        s0 += a * harmonic;
        i1 += b;
        s1 += b * (harmonic + harmonic_next - 2.0 * EULER_GAMMA);
        if a < 1e-18 * i0 && k > 2 {
            break;
        }
        k += 1;
        harmonic = harmonic_next;
        let kf = k as f64;
        a *= t / (kf * kf);
        b *= t / (kf * (kf + 1.0));
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let tail = x * i1 * log_half - 0.25 * x * x * s1;
    SmallK {
        k0,
        k1: 1.0 / x + tail / x,
        one_minus_xk1: -tail,
    }
}

/// e^x K0(x), e^x K1(x) for x > 2 via Steed's method on Temme's CF2.
fn scaled_k01_cf(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let sk0 = (PI / (2.0 * x)).sqrt() / s;
    let sk1 = sk0 * (x + 0.5 - h) / x;
    (sk0, sk1)
}

const J_SERIES_MAX: f64 = 5.0;
const J_HANKEL_MIN: f64 = 25.0;

/// J0(x) (even in x).
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= J_SERIES_MAX {
        j_series(ax).0
    } else if ax <= J_HANKEL_MIN {
        j_miller(ax).0
    } else {
        j_hankel(0, ax)
    }
}

/// J1(x) (odd in x).
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= J_SERIES_MAX {
        j_series(ax).1
    } else if ax <= J_HANKEL_MIN {
        j_miller(ax).1
    } else {
        j_hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `1 - J0(x)` without cancellation for small x.
pub fn one_minus_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax >= 1.0 {
        return 1.0 - j0(ax);
    }
    let t = 0.25 * ax * ax;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..40 {
        let kf = k as f64;
        term *= -t / (kf * kf);
        sum -= term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn j_series(x: f64) -> (f64, f64) {
    let t = 0.25 * x * x;
    let mut a = 1.0;
    let mut b = 1.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 1..60 {
        s0 += a;
        s1 += b;
        let kf = k as f64;
        a *= -t / (kf * kf);
        b *= -t / (kf * (kf + 1.0));
        if a.abs() < 1e-18 && b.abs() < 1e-18 {
            break;
        }
    }
    (s0, 0.5 * x * s1)
}

// Backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalised with
// 1 = J0 + 2 sum_{k>=1} J_{2k}.
fn j_miller(x: f64) -> (f64, f64) {
    let start = 2 * (((1.5 * x + 40.0) / 2.0).ceil() as usize);
    let mut jp = 0.0; // J_{k+1}
    let mut j = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1v = 0.0;
    let mut k = start;
    while k > 0 {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        k -= 1;
        // j now holds J_k
        if k.is_multiple_of(2) && k > 0 {
            norm += 2.0 * j;
        }
        if k == 1 {
            j1v = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            j1v *= 1e-250;
        }
    }
    norm += j;
    (j / norm, j1v / norm)
}

fn j_hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k / x^k with a_k = prod_{m=1..k} (mu - (2m-1)^2) / (k! 8^k)
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..80 {
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
        let m = (2 * k + 1) as f64;
        term *= (mu - m * m) / ((k + 1) as f64 * 8.0 * x);
    }
    let (s, c) = x.sin_cos();
    // chi = x - (order/2 + 1/4) pi
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (FRAC_2_PI / x).sqrt() * (p * cos_chi - q * sin_chi)
}
