//! Zero-bandwidth noise distributions `p(r)`: construction, sampling and the
//! contraction factors `Λᵢ(t)` they induce.

mod lambda;
pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub use lambda::{asymptotic_lambda, lambda_analytic, lambda_best, lambda_quadrature, EvalPath, LambdaEval};

/// Cartesian axis of the noise vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Number of points in the tabulated inverse CDF of a [`RadialDensity`].
pub const RADIAL_TABLE_POINTS: usize = 4096;

/// Density of `|r|` on `[0, r_max]` for an isotropic noise vector.
#[derive(Clone)]
pub struct RadialDensity {
    pdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    r_max: f64,
    radii: Arc<[f64]>,
    cdf: Arc<[f64]>,
}

impl fmt::Debug for RadialDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDensity")
            .field("r_max", &self.r_max)
            .finish_non_exhaustive()
    }
}

impl RadialDensity {
    /// The pdf must be non-negative and integrate to one over `[0, r_max]`
    /// within `1e-6`.
    pub fn new(pdf: impl Fn(f64) -> f64 + Send + Sync + 'static, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidModel(format!("support cutoff {r_max} must be positive")));
        }
        let n = RADIAL_TABLE_POINTS;
        let step = r_max / (n - 1) as f64;
        let radii: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        if let Some(r) = radii.iter().find(|&&r| !(pdf(r) >= 0.0)) {
            return Err(Error::InvalidModel(format!("radial pdf negative or NaN at r={r}")));
        }
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in radii.windows(2) {
            acc += quadrature::integrate_adaptive(&pdf, w[0], w[1], 1e-13, 200)?.value;
            cdf.push(acc);
        }
        if (acc - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidModel(format!(
                "radial pdf integrates to {acc} over [0, {r_max}]"
            )));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            pdf: Arc::new(pdf),
            r_max,
            radii: radii.into(),
            cdf: cdf.into(),
        })
    }

    /// Piecewise-linear pdf through `values` on a uniform grid over `[0, r_max]`.
    pub fn from_table(values: Vec<f64>, r_max: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidModel("tabulated pdf needs at least two points".into()));
        }
        let step = r_max / (values.len() - 1) as f64;
        let table: Arc<[f64]> = values.into();
        Self::new(
            move |r| {
                if !(0.0..=r_max).contains(&r) {
                    return 0.0;
                }
                let x = r / step;
                let i = (x.floor() as usize).min(table.len() - 2);
                let frac = x - i as f64;
                table[i] * (1.0 - frac) + table[i + 1] * frac
            },
            r_max,
        )
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if (0.0..=self.r_max).contains(&r) {
            (self.pdf)(r)
        } else {
            0.0
        }
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Inverse of the tabulated CDF, linearly interpolated.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        if c1 > c0 {
            r0 + (r1 - r0) * (u - c0) / (c1 - c0)
        } else {
            r0
        }
    }
}

/// The shape of `p(r)`.
#[derive(Clone, Debug)]
pub enum NoiseKind {
    /// Cauchy laws of half-width `Γ/2` along each of the three axes, each
    /// axis carrying weight 1/3.
    Lorentzian3Axis { gamma: f64 },
    /// Two-point law `±a` along a single axis.
    TelegraphAxis { axis: Axis, amplitude: f64 },
    /// `p(r) ∝ exp(−Σ rᵢ²/dᵢ²)`.
    GaussianAniso { widths: [f64; 3] },
    /// Isotropic law with the given density of `|r|`.
    RadialCustom(RadialDensity),
}

/// Validated noise distribution; construct through the named constructors.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    kind: NoiseKind,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidModel(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl NoiseModel {
    pub fn lorentzian(gamma: f64) -> Result<Self> {
        Ok(Self {
            kind: NoiseKind::Lorentzian3Axis {
                gamma: positive("gamma", gamma)?,
            },
        })
    }

    pub fn telegraph(axis: Axis, amplitude: f64) -> Result<Self> {
        Ok(Self {
            kind: NoiseKind::TelegraphAxis {
                axis,
                amplitude: positive("amplitude", amplitude)?,
            },
        })
    }

    pub fn gaussian(widths: [f64; 3]) -> Result<Self> {
        for w in widths {
            positive("gaussian width", w)?;
        }
        Ok(Self {
            kind: NoiseKind::GaussianAniso { widths },
        })
    }

    pub fn gaussian_isotropic(width: f64) -> Result<Self> {
        Self::gaussian([width; 3])
    }

    pub fn radial(density: RadialDensity) -> Self {
        Self {
            kind: NoiseKind::RadialCustom(density),
        }
    }

    pub fn kind(&self) -> &NoiseKind {
        &self.kind
    }

    /// True when `p(r)` depends on `|r|` only.
    pub fn is_spherically_symmetric(&self) -> bool {
        match &self.kind {
            NoiseKind::GaussianAniso { widths: [a, b, c] } => a == b && b == c,
            NoiseKind::RadialCustom(_) => true,
            _ => false,
        }
    }
}

fn uniform_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let u: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - u * u).sqrt();
    [s * phi.cos(), s * phi.sin(), u]
}

/// Draws one noise vector `r` from `p(r)`.
pub fn sample_r<R: Rng + ?Sized>(model: &NoiseModel, rng: &mut R) -> [f64; 3] {
    match &model.kind {
        NoiseKind::Lorentzian3Axis { gamma } => {
            let axis = rng.random_range(0..3usize);
            let u: f64 = rng.random();
            let mut r = [0.0; 3];
            r[axis] = 0.5 * gamma * (PI * (u - 0.5)).tan();
            r
        }
        NoiseKind::TelegraphAxis { axis, amplitude } => {
            let mut r = [0.0; 3];
            r[axis.index()] = if rng.random::<bool>() { *amplitude } else { -*amplitude };
            r
        }
        NoiseKind::GaussianAniso { widths } => widths.map(|d| {
            let z: f64 = rng.sample(StandardNormal);
            z * d / std::f64::consts::SQRT_2
        }),
        NoiseKind::RadialCustom(density) => {
            let radius = density.quantile(rng.random());
            uniform_direction(rng).map(|c| c * radius)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructors_validate() {
        assert!(NoiseModel::lorentzian(0.0).is_err());
        assert!(NoiseModel::lorentzian(f64::INFINITY).is_err());
        assert!(NoiseModel::telegraph(Axis::X, -1.0).is_err());
        assert!(NoiseModel::gaussian([1.0, 0.0, 1.0]).is_err());
        assert!(RadialDensity::new(|_| 1.0, 2.0).is_err());
        assert!(RadialDensity::new(|r| if r < 0.5 { -1.0 } else { 3.0 }, 1.0).is_err());
        assert!(RadialDensity::new(|_| 1.0, 1.0).is_ok());
    }

    #[test]
    fn telegraph_samples_are_symmetric() {
        let a = 0.7;
        let model = NoiseModel::telegraph(Axis::X, a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let r = sample_r(&model, &mut rng);
            assert!(r[0].abs() == a && r[1] == 0.0 && r[2] == 0.0);
            sum += r[0];
        }
        assert!((sum / n as f64).abs() < 3.0 * a / 1e3);
    }

    #[test]
    fn isotropic_gaussian_angular_moments() {
        let model = NoiseModel::gaussian_isotropic(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 200_000;
        let mut sums = [0.0; 3];
        let mut sq = [0.0; 3];
        for _ in 0..n {
            let r = sample_r(&model, &mut rng);
            let r2: f64 = r.iter().map(|x| x * x).sum();
            for i in 0..3 {
                let v = r[i] * r[i] / r2;
                sums[i] += v;
                sq[i] += v * v;
            }
        }
        for i in 0..3 {
            let mean = sums[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!((mean - 1.0 / 3.0).abs() < 3.0 * se, "axis {i}: {mean} ± {se}");
        }
    }

    #[test]
    fn gaussian_component_variance() {
        let d = [1.0, 2.0, 3.0];
        let model = NoiseModel::gaussian(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut sq = [0.0; 3];
        for _ in 0..n {
            let r = sample_r(&model, &mut rng);
            for i in 0..3 {
                sq[i] += r[i] * r[i];
            }
        }
        for i in 0..3 {
            // E[x²] = d²/2 for exp(−x²/d²); relative standard error √(2/n)
            let var = sq[i] / n as f64;
            let expected = d[i] * d[i] / 2.0;
            assert!((var / expected - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
        }
    }

    #[test]
    fn lorentzian_median_is_half_width() {
        let gamma = 1.6;
        let model = NoiseModel::lorentzian(gamma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut on_x: Vec<f64> = Vec::new();
        let mut counts = [0usize; 3];
        for _ in 0..300_000 {
            let r = sample_r(&model, &mut rng);
            let axis = r.iter().position(|&c| c != 0.0).unwrap_or(0);
            counts[axis] += 1;
            if axis == 0 {
                on_x.push(r[0].abs());
            }
        }
        on_x.sort_by(f64::total_cmp);
        let n = on_x.len() as f64;
        let median = on_x[on_x.len() / 2];
        // sd of the sample median: 1/(2 f(m) √n), f the density of |x| at m = Γ/2
        let density = 2.0 / (PI * gamma);
        let se = 1.0 / (2.0 * density * n.sqrt());
        assert!((median - gamma / 2.0).abs() < 3.0 * se, "{median} vs {}", gamma / 2.0);
        for c in counts {
            let p = c as f64 / 300_000.0;
            assert!((p - 1.0 / 3.0).abs() < 3.0 * (2.0f64 / 9.0 / 300_000.0).sqrt());
        }
    }

    #[test]
    fn radial_quantile_inverts_cdf() {
        // density 3r² on [0, 1]: CDF r³
        let density = RadialDensity::new(|r| 3.0 * r * r, 1.0).unwrap();
        for &u in &[0.001, 0.1, 0.5, 0.9, 0.999] {
            let r = density.quantile(u);
            assert!((r - f64::cbrt(u)).abs() < 1e-3, "u={u}: {r}");
        }
        let tabulated = RadialDensity::from_table(vec![0.0, 2.0], 1.0).unwrap();
        assert!((tabulated.pdf(0.25) - 0.5).abs() < 1e-15);
        assert!((tabulated.quantile(0.25) - 0.5).abs() < 1e-3);
    }
}
