//! Generalised exponential integrals E_n(x) = int_1^inf e^{-xt} t^{-n} dt.

use super::bessel::EULER_GAMMA;
use crate::error::{Error, Result};

const EPS: f64 = 1e-17;
const FPMIN: f64 = 1e-300;

/// E_n(x) for n >= 1, x > 0.
pub fn expint_en(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("E_n requires n >= 1".into()));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("E_{n}({x}) requires finite x > 0")));
    }
    Ok(en(n, x))
}

/// E_n(x) without argument checks; E_0(x) = e^{-x}/x.
pub fn en(n: u32, x: f64) -> f64 {
    if n == 0 {
        return (-x).exp() / x;
    }
    if x > 700.0 {
        return 0.0;
    }
    let nm1 = (n - 1) as f64;
    if x > 1.0 {
        // modified Lentz on the continued fraction
        let mut b = x + n as f64;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let fi = i as f64;
            let an = -fi * (nm1 + fi);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h * (-x).exp()
    } else {
        let mut ans = if n == 1 {
            -x.ln() - EULER_GAMMA
        } else {
            1.0 / nm1
        };
        let mut fact = 1.0;
        for i in 1..1000 {
            let fi = i as f64;
            fact *= -x / fi;
            let del = if i as u32 != n - 1 {
                -fact / (fi - nm1)
            } else {
                let psi = -EULER_GAMMA + (1..n).map(|k| 1.0 / k as f64).sum::<f64>();
                fact * (-x.ln() + psi)
            };
            ans += del;
            if del.abs() < ans.abs() * EPS {
                break;
            }
        }
        ans
    }
}

/// Fills `out[k] = E_k(x)` for k = 0..out.len(), x > 0.
///
/// Starts from a directly evaluated E_m with m near x and recurses outward
/// with `n E_{n+1} = e^{-x} - x E_n`, which is stable upward for n > x and
/// downward for n < x.
pub(crate) fn en_table(x: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    let ex = (-x).exp();
    out[0] = ex / x;
    if len == 1 {
        return;
    }
    let m = (x.ceil() as usize).clamp(1, len - 1);
    out[m] = en(m as u32, x);
    for n in (1..m).rev() {
        // E_n = (e^{-x} - n E_{n+1}) / x
        out[n] = (ex - n as f64 * out[n + 1]) / x;
    }
    for n in m..len - 1 {
        out[n + 1] = (ex - x * out[n]) / n as f64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(n: u32, x: f64) -> f64 {
        crate::reference::quad_expint(n, x).value
    }

    #[test]
    fn e1_at_one_matches_quadrature() {
        let v = expint_en(1, 1.0).unwrap();
        assert!((v - oracle(1, 1.0)).abs() < 1e-14);
        assert!((v - 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_over_range() {
        for n in 1..6 {
            for &x in &[1e-6, 0.01, 0.5, 0.999, 1.0, 1.001, 2.5, 10.0, 40.0] {
                let v = en(n, x);
                let r = oracle(n, x);
                assert!(
                    (v - r).abs() <= 1e-14f64.max(1e-13 * r),
                    "E{n}({x}): {v} vs {r}"
                );
            }
        }
    }

    #[test]
    fn asymptotic_expansion() {
        for &x in &[50.0f64, 200.0, 500.0] {
            let lead = (-x).exp() / x * (1.0 - 1.0 / x);
            let v = en(1, x);
            assert!(((v - lead) / v).abs() < 3.0 / (x * x));
        }
    }

    #[test]
    fn recurrence_identity() {
        for &x in &[0.1, 0.7, 1.3, 6.0] {
            let lhs = en(2, x);
            let rhs = (-x).exp() - x * en(1, x);
            assert!((lhs - rhs).abs() < 1e-15);
        }
    }

    #[test]
    fn table_matches_direct() {
        for &x in &[1e-3, 0.4, 1.0, 3.7, 12.0, 80.0] {
            let mut t = [0.0; 30];
            en_table(x, &mut t);
            for (n, &v) in t.iter().enumerate() {
                let d = en(n as u32, x);
                assert!(
                    (v - d).abs() <= 1e-15f64.max(1e-13 * d),
                    "E{n}({x}): {v} vs {d}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(expint_en(1, 0.0).is_err());
        assert!(expint_en(0, 1.0).is_err());
        assert!(expint_en(2, f64::NAN).is_err());
    }
}
