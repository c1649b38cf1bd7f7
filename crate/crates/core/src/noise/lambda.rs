//! Contraction factors `Λᵢ(t) = ⟨rᵢ²/r² + (1 − rᵢ²/r²) cos 2rt⟩` for each
//! noise model: closed forms, numerical quadrature and the `t → ∞` limit.

use std::f64::consts::PI;

use super::quadrature::{cosine_transform_finite, cosine_transform_half_line, gauss_legendre};
use super::{NoiseKind, NoiseModel};
use crate::channel::LambdaVector;
use crate::{Error, Result};

/// Above this many characteristic periods the oscillating part is below
/// double precision and the stationary value is returned directly.
const OSCILLATION_GUARD: f64 = 50.0;

/// Angular resolutions tried in turn by the Gaussian integrator.
const ANGULAR_LEVELS: [usize; 6] = [16, 32, 64, 128, 256, 512];

/// Maximum number of half-period panels for a finite-support radial pdf.
const RADIAL_MAX_PANELS: usize = 1 << 16;

/// How a [`LambdaEval`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    /// Closed-form expression.
    Analytic,
    /// Finite sum with no discretization (`t = 0`, two-point laws).
    Exact,
    /// Numerical integration.
    Quadrature,
    /// Stationary value past the oscillation guard.
    Asymptotic,
}

impl EvalPath {
    pub fn tag(self) -> &'static str {
        match self {
            EvalPath::Analytic => "analytic",
            EvalPath::Exact => "exact",
            EvalPath::Quadrature => "quadrature",
            EvalPath::Asymptotic => "asymptotic",
        }
    }
}

/// A Λ evaluation together with its provenance and error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaEval {
    pub lambda: LambdaVector<f64>,
    pub path: EvalPath,
    pub error: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time must be finite and non-negative, got {t}"
        )))
    }
}

fn clamped(lam: [f64; 3], t: f64) -> Result<LambdaVector<f64>> {
    LambdaVector::new(lam.map(|l| l.clamp(-1.0, 1.0)), t)
}

fn isotropic_gaussian(width: f64, t: f64) -> f64 {
    let x = width * width * t * t;
    1.0 / 3.0 + 2.0 / 3.0 * (1.0 - 2.0 * x) * (-x).exp()
}

fn telegraph(axis: usize, amplitude: f64, t: f64) -> [f64; 3] {
    let c = (2.0 * amplitude * t).cos();
    let mut lam = [c; 3];
    lam[axis] = 1.0;
    lam
}

/// Closed-form Λ for the Lorentzian, telegraph and isotropic Gaussian models.
pub fn lambda_analytic(model: &NoiseModel, t: f64) -> Result<LambdaVector<f64>> {
    check_time(t)?;
    let lam = match model.kind() {
        NoiseKind::Lorentzian3Axis { gamma } => [(1.0 + 2.0 * (-gamma * t).exp()) / 3.0; 3],
        NoiseKind::TelegraphAxis { axis, amplitude } => telegraph(axis.index(), *amplitude, t),
        NoiseKind::GaussianAniso { widths } if model.is_spherically_symmetric() => {
            [isotropic_gaussian(widths[0], t); 3]
        }
        NoiseKind::GaussianAniso { .. } => {
            return Err(Error::NoClosedForm("anisotropic Gaussian".into()));
        }
        NoiseKind::RadialCustom(_) => return Err(Error::NoClosedForm("custom radial pdf".into())),
    };
    clamped(lam, t)
}

/// Angular integral for `p(r) ∝ exp(−Σ rᵢ²/dᵢ²)`.
///
/// The radial integral is done analytically: with `q(n̂) = Σ nᵢ²/dᵢ²`,
/// `Λᵢ = (1/4π d_x d_y d_z) ∮ q^{-3/2} [nᵢ² + (1 − nᵢ²) g(t²/q)] dΩ` where
/// `g(u) = e^{−u}(1 − 2u)`. With `t = None` the oscillating part is dropped.
/// Gauss–Legendre in `cos θ`, trapezoid in `φ`.
fn gaussian_angular(widths: [f64; 3], t: Option<f64>, n: usize) -> [f64; 3] {
    let (nodes, weights) = gauss_legendre(n);
    let n_phi = 2 * n;
    let w_phi = 2.0 * PI / n_phi as f64;
    let inv_d2 = widths.map(|d| 1.0 / (d * d));
    let mut acc = [0.0; 3];
    for (&u, &wu) in nodes.iter().zip(&weights) {
        let s = (1.0 - u * u).sqrt();
        let mut row = [0.0; 3];
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * w_phi;
            let dir = [s * phi.cos(), s * phi.sin(), u];
            let sq = dir.map(|c| c * c);
            let q = sq[0] * inv_d2[0] + sq[1] * inv_d2[1] + sq[2] * inv_d2[2];
            let w = q.powf(-1.5);
            let g = t.map_or(0.0, |t| {
                let x = t * t / q;
                (-x).exp() * (1.0 - 2.0 * x)
            });
            for i in 0..3 {
                row[i] += w * (sq[i] + (1.0 - sq[i]) * g);
            }
        }
        for i in 0..3 {
            acc[i] += wu * w_phi * row[i];
        }
    }
    let norm = 1.0 / (4.0 * PI * widths[0] * widths[1] * widths[2]);
    acc.map(|a| a * norm)
}

fn gaussian_converged(widths: [f64; 3], t: Option<f64>, tol: f64) -> Result<([f64; 3], f64)> {
    let mut prev = gaussian_angular(widths, t, ANGULAR_LEVELS[0]);
    let mut diff = f64::INFINITY;
    for &n in &ANGULAR_LEVELS[1..] {
        let next = gaussian_angular(widths, t, n);
        diff = (0..3).map(|i| (next[i] - prev[i]).abs()).fold(0.0, f64::max);
        prev = next;
        if diff < tol {
            return Ok((prev, diff));
        }
    }
    Err(Error::Convergence {
        achieved: diff,
        requested: tol,
    })
}

/// Numerical Λ for any model, accurate to `tol` where the integral converges.
///
/// The oscillating part is integrated as a cosine transform of the
/// distribution of `|r|` (or of the line pdf for the Lorentzian). Past
/// [`OSCILLATION_GUARD`] decay lengths the stationary value is returned and
/// the path reports [`EvalPath::Asymptotic`].
pub fn lambda_quadrature(model: &NoiseModel, t: f64, tol: f64) -> Result<LambdaEval> {
    check_time(t)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if t == 0.0 {
        return Ok(LambdaEval {
            lambda: LambdaVector::identity(0.0),
            path: EvalPath::Exact,
            error: 0.0,
        });
    }
    let asymptotic = |lambda: LambdaVector<f64>| LambdaEval {
        lambda: LambdaVector::new(lambda.components(), t).expect("stationary values are bounded"),
        path: EvalPath::Asymptotic,
        error: 0.0,
    };
    match model.kind() {
        NoiseKind::Lorentzian3Axis { gamma } => {
            if t * gamma > OSCILLATION_GUARD {
                return Ok(asymptotic(asymptotic_lambda(model)));
            }
            // line density of |x| for a Cauchy law of half-width Γ/2
            let half = 0.5 * gamma;
            let folded = |x: f64| 2.0 / PI * half / (x * x + half * half);
            let c = cosine_transform_half_line(folded, 2.0 * t, 1.5 * tol)?;
            Ok(LambdaEval {
                lambda: clamped([1.0 / 3.0 + 2.0 / 3.0 * c.value; 3], t)?,
                path: EvalPath::Quadrature,
                error: 2.0 / 3.0 * c.error,
            })
        }
        NoiseKind::TelegraphAxis { axis, amplitude } => Ok(LambdaEval {
            lambda: clamped(telegraph(axis.index(), *amplitude, t), t)?,
            path: EvalPath::Exact,
            error: 0.0,
        }),
        NoiseKind::GaussianAniso { widths } => {
            let narrowest = widths.iter().copied().fold(f64::INFINITY, f64::min);
            if t * narrowest > OSCILLATION_GUARD {
                return Ok(asymptotic(asymptotic_lambda(model)));
            }
            let (lam, error) = gaussian_converged(*widths, Some(t), tol)?;
            Ok(LambdaEval {
                lambda: clamped(lam, t)?,
                path: EvalPath::Quadrature,
                error,
            })
        }
        NoiseKind::RadialCustom(density) => {
            let c = cosine_transform_finite(
                |r| density.pdf(r),
                density.r_max(),
                2.0 * t,
                1.5 * tol,
                RADIAL_MAX_PANELS,
            )?;
            Ok(LambdaEval {
                lambda: clamped([1.0 / 3.0 + 2.0 / 3.0 * c.value; 3], t)?,
                path: EvalPath::Quadrature,
                error: 2.0 / 3.0 * c.error,
            })
        }
    }
}

/// Closed form when one exists, quadrature otherwise.
pub fn lambda_best(model: &NoiseModel, t: f64, tol: f64) -> Result<LambdaEval> {
    match lambda_analytic(model, t) {
        Ok(lambda) => Ok(LambdaEval {
            lambda,
            path: if t == 0.0 { EvalPath::Exact } else { EvalPath::Analytic },
            error: 0.0,
        }),
        Err(Error::NoClosedForm(_)) => lambda_quadrature(model, t, tol),
        Err(e) => Err(e),
    }
}

/// Stationary contraction `Λᵢ(∞) = ⟨rᵢ²/r²⟩`, reported with `t = ∞`.
pub fn asymptotic_lambda(model: &NoiseModel) -> LambdaVector<f64> {
    let third = [1.0 / 3.0; 3];
    let lam = match model.kind() {
        NoiseKind::Lorentzian3Axis { .. } | NoiseKind::RadialCustom(_) => third,
        NoiseKind::TelegraphAxis { axis, .. } => {
            let mut lam = [0.0; 3];
            lam[axis.index()] = 1.0;
            lam
        }
        NoiseKind::GaussianAniso { .. } if model.is_spherically_symmetric() => third,
        NoiseKind::GaussianAniso { widths } => {
            // smooth integrand: the finest level is accurate whether or not
            // the successive-difference test is met
            gaussian_converged(*widths, None, 1e-13)
                .map(|(lam, _)| lam)
                .unwrap_or_else(|_| gaussian_angular(*widths, None, ANGULAR_LEVELS[ANGULAR_LEVELS.len() - 1]))
        }
    };
    LambdaVector::new(lam.map(|l| l.clamp(-1.0, 1.0)), f64::INFINITY).expect("angular moments lie in [0, 1]")
}
