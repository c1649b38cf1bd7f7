//! One-dimensional quadrature: Gauss–Legendre rules, adaptive
//! Gauss–Kronrod, and cosine transforms of slowly decaying densities.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Value and error estimate of a numerical integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(x), P_{n-1}(x) by the three-term recurrence
            let (mut p_prev, mut p) = (1.0, x);
            for k in 2..=n {
                let next = ((2 * k - 1) as f64 * x * p - (k - 1) as f64 * p_prev) / k as f64;
                p_prev = p;
                p = next;
            }
            dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive 15-point Gauss–Kronrod integration on `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error is below `abs_tol` or `max_intervals` is reached.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut pieces = vec![(a, b, kronrod15(&f, a, b))];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.2.error).sum();
        if total_err <= abs_tol {
            break;
        }
        if pieces.len() >= max_intervals {
            return Err(Error::Convergence {
                achieved: total_err,
                requested: abs_tol,
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further in floating point
            return Err(Error::Convergence {
                achieved: total_err,
                requested: abs_tol,
            });
        }
        pieces.push((lo, mid, kronrod15(&f, lo, mid)));
        pieces.push((mid, hi, kronrod15(&f, mid, hi)));
    }
    Ok(Estimate {
        value: pieces.iter().map(|p| p.2.value).sum(),
        error: pieces.iter().map(|p| p.2.error).sum(),
    })
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
///
/// Returns the even-column entry that changed least from its predecessor,
/// with that change as the error estimate.
pub fn wynn_epsilon(partials: &[f64]) -> Estimate {
    let n = partials.len();
    match n {
        0 => {
            return Estimate {
                value: 0.0,
                error: f64::INFINITY,
            }
        }
        1 => {
            return Estimate {
                value: partials[0],
                error: f64::INFINITY,
            }
        }
        _ => {}
    }
    let mut best = Estimate {
        value: partials[n - 1],
        error: (partials[n - 1] - partials[n - 2]).abs(),
    };
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partials.to_vec();
    let mut last_even = partials[n - 1];
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        if next.is_empty() {
            break;
        }
        if k % 2 == 0 {
            let candidate = *next.last().expect("non-empty column");
            if !candidate.is_finite() {
                break;
            }
            let change = (candidate - last_even).abs();
            if change < best.error {
                best = Estimate {
                    value: candidate,
                    error: change,
                };
            }
            last_even = candidate;
        }
        prev = cur;
        cur = next;
    }
    best
}

/// `∫₀^∞ f(x) cos(ωx) dx` for a non-negative, decreasing, integrable `f`.
///
/// The half-line is cut at the zeros of the cosine; the resulting
/// alternating series of panel integrals is summed with Wynn's epsilon
/// algorithm.
pub fn cosine_transform_half_line(f: impl Fn(f64) -> f64, omega: f64, tol: f64) -> Result<Estimate> {
    const MIN_PANELS: usize = 8;
    const MAX_PANELS: usize = 400;
    assert!(omega > 0.0, "cosine transform needs a positive frequency");
    let width = PI / omega;
    let g = |x: f64| f(x) * (omega * x).cos();
    let panel_tol = (tol * 1e-2).max(1e-15);
    let mut partials = Vec::with_capacity(64);
    let mut sum = 0.0;
    let mut quad_err = 0.0;
    let mut last = f64::NAN;
    for k in 0..MAX_PANELS {
        // [0, π/2ω], then between consecutive zeros of the cosine
        let (lo, hi) = if k == 0 {
            (0.0, 0.5 * width)
        } else {
            ((k as f64 - 0.5) * width, (k as f64 + 0.5) * width)
        };
        let panel = integrate_adaptive(g, lo, hi, panel_tol, 2000)?;
        sum += panel.value;
        quad_err += panel.error;
        partials.push(sum);
        if partials.len() >= MIN_PANELS {
            let est = wynn_epsilon(&partials);
            let step = (est.value - last).abs();
            if est.error <= tol && step <= tol {
                return Ok(Estimate {
                    value: est.value,
                    error: est.error.max(step) + quad_err,
                });
            }
            last = est.value;
        }
    }
    let est = wynn_epsilon(&partials);
    Err(Error::Convergence {
        achieved: est.error,
        requested: tol,
    })
}

/// `∫₀^b f(x) cos(ωx) dx` on a finite interval, split into half-period panels.
pub fn cosine_transform_finite(
    f: impl Fn(f64) -> f64,
    b: f64,
    omega: f64,
    tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    let panels = if omega == 0.0 {
        1
    } else {
        ((omega * b / PI).ceil() as usize).max(1)
    };
    if panels > max_panels {
        return Err(Error::Convergence {
            achieved: f64::INFINITY,
            requested: tol,
        });
    }
    let g = |x: f64| f(x) * (omega * x).cos();
    let width = b / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for k in 0..panels {
        let lo = k as f64 * width;
        let hi = if k + 1 == panels { b } else { lo + width };
        let e = integrate_adaptive(g, lo, hi, panel_tol, 500)?;
        total.value += e.value;
        total.error += e.error;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // degree 2n-1 is exact
            let deg = 2 * n - 2;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((got - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫_{-50}^{50} (1/π) γ/(x²+γ²) dx = (2/π) atan(50/γ)
        let gamma = 0.01;
        let e = integrate_adaptive(|x| gamma / PI / (x * x + gamma * gamma), -50.0, 50.0, 1e-12, 5000).unwrap();
        let exact = 2.0 / PI * (50.0f64 / gamma).atan();
        assert!((e.value - exact).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let r = integrate_adaptive(|x| (1.0 / x).sin(), 1e-9, 1.0, 1e-14, 8);
        assert!(matches!(r, Err(Error::Convergence { .. })));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 − 1/2 + 1/3 − ...
        let mut s = 0.0;
        let partials: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let e = wynn_epsilon(&partials);
        assert!((e.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cauchy_characteristic_function() {
        // 2∫₀^∞ (1/π) γ/(x²+γ²) cos(ωx) dx = e^{-γω}
        for &(gamma, omega) in &[(0.25, 0.2), (0.5, 2.0), (1.0, 10.0), (0.25, 20.0)] {
            let f = |x: f64| 2.0 / PI * gamma / (x * x + gamma * gamma);
            let e = cosine_transform_half_line(f, omega, 1e-11).unwrap();
            let exact = (-gamma * omega).exp();
            assert!(
                (e.value - exact).abs() < 1e-9,
                "γ={gamma} ω={omega}: {} vs {exact}",
                e.value
            );
        }
    }

    #[test]
    fn finite_transform_of_uniform_density() {
        // ∫₀^1 cos(ωx) dx = sin(ω)/ω
        for omega in [0.0, 0.5, 7.0, 300.0] {
            let e = cosine_transform_finite(|_| 1.0, 1.0, omega, 1e-12, 10_000).unwrap();
            let exact = if omega == 0.0 { 1.0 } else { omega.sin() / omega };
            assert!((e.value - exact).abs() < 1e-11);
        }
        assert!(cosine_transform_finite(|_| 1.0, 1.0, 1e9, 1e-12, 10_000).is_err());
    }
}
