//! Globally adaptive Gauss–Kronrod (7/15) integration on finite intervals.

// the rule tables keep the digits they are published with
#![allow(clippy::excessive_precision)]

// Abscissae and weights of the 15-point Kronrod rule and the embedded
// 7-point Gauss rule, positive half, largest node first.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Single G7K15 panel: (Kronrod value, |Kronrod - Gauss|).
pub(crate) fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * hl, ((kron - gauss) * hl).abs())
}

/// Outcome of [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Integrates `f` over the union of consecutive panels given by `breaks`
/// (sorted), bisecting the worst panel until the summed error estimate is
/// below `max(abs_tol, rel_tol * |I|)` or `max_panels` is hit.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Quadrature {
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, error) = gk15(&mut f, w[0], w[1]);
            Panel {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    if panels.is_empty() {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            return Quadrature {
                value,
                error,
                converged: true,
            };
        }
        if panels.len() >= max_panels {
            return Quadrature {
                value,
                error,
                converged: false,
            };
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let p = panels[worst];
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) {
            // Panel too small to split in floating point.
            return Quadrature {
                value,
                error,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, p.a, m);
        let (v2, e2) = gk15(&mut f, m, p.b);
        panels[worst] = Panel {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        for deg in 0..=22 {
            let (v, _) = gk15(&mut |x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((v - exact).abs() < 1e-15, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn embedded_gauss_rule_is_exact_for_degree_13() {
        // error estimate is |K - G|; zero for polynomials both rules integrate exactly
        for deg in 0..=13 {
            let (_, e) = gk15(&mut |x: f64| x.powi(deg), -1.0, 1.0);
            assert!(e < 1e-15, "degree {deg}: {e}");
        }
        let (_, e) = gk15(&mut |x: f64| x.powi(14), -1.0, 1.0);
        assert!(e > 1e-6);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let q = integrate(|x: f64| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], 0.0, 1e-13, 500);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(q.converged);
        assert!(((q.value - exact) / exact).abs() < 1e-12);
    }
}
