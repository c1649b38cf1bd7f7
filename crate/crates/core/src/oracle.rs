//! Monte-Carlo ground truth: exact evolution under one noise realization,
//! averaged over samples of `p(r)`.
//!
//! Samples are split into fixed blocks of [`BLOCK_SIZE`]. Block `k` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, and sums are formed
//! pairwise in sample order within and across blocks, so results are
//! bit-identical for any thread count.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::csv::{format_real, matrix_columns};
use crate::linalg::{density_to_bloch, ComplexMatrix, DensityMatrix};
use crate::noise::{sample_r, NoiseModel};
use crate::{Error, Real, Result};

/// Samples per deterministic block.
pub const BLOCK_SIZE: usize = 4096;

/// Smallest sample count accepted by the averaging routines.
pub const MIN_SAMPLES: usize = 100;

const PAIRWISE_LEAF: usize = 32;

/// Rotation applied to the Bloch vector by a fixed noise vector over time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizationRotation<T> {
    /// Unit rotation axis `r̂`; `(0, 0, 1)` when `r = 0`.
    pub axis: [T; 3],
    /// Rotation angle `2|r|t`.
    pub angle: T,
    /// Magnitude `|r|`.
    pub r: T,
}

impl<T: Real> RealizationRotation<T> {
    pub fn new(r: [T; 3], t: T) -> Self {
        let norm = r.iter().map(|&c| c * c).sum::<T>().sqrt();
        let axis = if norm > T::zero() {
            r.map(|c| c / norm)
        } else {
            [T::zero(), T::zero(), T::one()]
        };
        Self {
            axis,
            angle: T::lit(2.0) * norm * t,
            r: norm,
        }
    }
}

/// `U = exp(i t r·σ) = cos(|r|t) 𝟙 + i sin(|r|t) r̂·σ`.
pub fn rotation_unitary<T: Real>(r: [T; 3], t: T) -> ComplexMatrix<T> {
    let rot = RealizationRotation::new(r, t);
    let half = rot.angle / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let [nx, ny, nz] = rot.axis.map(|n| n * s);
    ComplexMatrix::from_vec(
        2,
        vec![
            Complex::new(c, nz),
            Complex::new(ny, nx),
            Complex::new(-ny, nx),
            Complex::new(c, -nz),
        ],
    )
    .expect("2x2 layout")
}

/// State at time `t` under the fixed Hamiltonian `r·σ`: `U ρ U†`.
pub fn evolve_fixed_r<T: Real>(rho0: &DensityMatrix<T>, r: [T; 3], t: T) -> Result<DensityMatrix<T>> {
    if rho0.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho0.dim(),
        });
    }
    if r.iter().all(|&c| c == T::zero()) {
        return Ok(rho0.clone());
    }
    let u = rotation_unitary(r, t);
    Ok(DensityMatrix::new_unchecked(u.sandwich(rho0.matrix()).hermitian_part()))
}

/// Sample mean of the evolved state with per-entry standard errors.
#[derive(Clone, Debug)]
pub struct McEstimate {
    mean: DensityMatrix<f64>,
    stderr_re: Vec<f64>,
    stderr_im: Vec<f64>,
    samples: usize,
    seed: u64,
}

impl McEstimate {
    pub fn mean(&self) -> &DensityMatrix<f64> {
        &self.mean
    }

    pub fn dim(&self) -> usize {
        self.mean.dim()
    }

    /// Standard errors of the real and imaginary part of entry `(i, j)`.
    pub fn stderr(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.dim() + j;
        (self.stderr_re[k], self.stderr_im[k])
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Bloch vector of the mean (single qubit only).
    pub fn bloch(&self) -> Result<[f64; 3]> {
        Ok(density_to_bloch(&self.mean)?.components())
    }

    /// Standard errors of the Bloch components (single qubit only).
    pub fn bloch_stderr(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: self.dim(),
            });
        }
        let (re01, im01) = self.stderr(0, 1);
        let (re00, _) = self.stderr(0, 0);
        // ax = 2 Re ρ01, ay = −2 Im ρ01, az = ρ00 − ρ11 = 2ρ00 − 1
        Ok([2.0 * re01, 2.0 * im01, 2.0 * re00])
    }

    /// Column names for [`csv_fields`](Self::csv_fields).
    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut cols = matrix_columns(dim, "mean_");
        cols.extend(matrix_columns(dim, "se_"));
        cols
    }

    /// Mean entries followed by their standard errors, formatted for CSV.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::with_capacity(4 * self.stderr_re.len());
        for z in self.mean.matrix().as_slice() {
            out.push(format_real(z.re));
            out.push(format_real(z.im));
        }
        for (re, im) in self.stderr_re.iter().zip(&self.stderr_im) {
            out.push(format_real(*re));
            out.push(format_real(*im));
        }
        out
    }
}

/// Column sums and sums of squares of a row-major table.
#[derive(Clone, Debug)]
struct Moments {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Moments {
    fn zeros(width: usize) -> Self {
        Self {
            sum: vec![0.0; width],
            sq: vec![0.0; width],
        }
    }

    fn add(mut self, other: &Moments) -> Self {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sq.iter_mut().zip(&other.sq) {
            *a += b;
        }
        self
    }
}

/// Pairwise column sums of `rows` (each of length `width`).
fn pairwise_rows(rows: &[f64], width: usize) -> Moments {
    let n = rows.len() / width;
    if n <= PAIRWISE_LEAF {
        let mut m = Moments::zeros(width);
        for row in rows.chunks_exact(width) {
            for (k, &v) in row.iter().enumerate() {
                m.sum[k] += v;
                m.sq[k] += v * v;
            }
        }
        return m;
    }
    let mid = n / 2;
    let (lo, hi) = rows.split_at(mid * width);
    pairwise_rows(lo, width).add(&pairwise_rows(hi, width))
}

fn pairwise_blocks(blocks: &[Moments]) -> Moments {
    match blocks {
        [] => unreachable!("at least one block"),
        [single] => single.clone(),
        _ => {
            let (lo, hi) = blocks.split_at(blocks.len() / 2);
            pairwise_blocks(lo).add(&pairwise_blocks(hi))
        }
    }
}

/// Runs `n` samples through `row`, which writes `width` values per sample,
/// and returns the deterministic column moments.
fn block_moments<F>(n: usize, seed: u64, width: usize, row: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let blocks = n.div_ceil(BLOCK_SIZE);
    let partials: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut rows = vec![0.0; count * width];
            for chunk in rows.chunks_exact_mut(width) {
                row(&mut rng, chunk);
            }
            pairwise_rows(&rows, width)
        })
        .collect();
    pairwise_blocks(&partials)
}

/// Mean and standard error from moments of `n` samples.
fn mean_and_stderr(m: &Moments, n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mean: Vec<f64> = m.sum.iter().map(|s| s / nf).collect();
    let se =
        m.sq.iter()
            .zip(&mean)
            .map(|(q, mu)| {
                let var = ((q / nf - mu * mu) * nf / (nf - 1.0)).max(0.0);
                (var / nf).sqrt()
            })
            .collect();
    (mean, se)
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {n}"
        )));
    }
    Ok(())
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

/// Writes the deviation `out − ρ0` as interleaved re/im into `row`.
fn write_deviation(out: &ComplexMatrix<f64>, rho0: &ComplexMatrix<f64>, row: &mut [f64]) {
    for (k, (a, b)) in out.as_slice().iter().zip(rho0.as_slice()).enumerate() {
        let d = a - b;
        row[2 * k] = d.re;
        row[2 * k + 1] = d.im;
    }
}

fn estimate(rho0: &DensityMatrix<f64>, m: &Moments, n: usize, seed: u64) -> McEstimate {
    let (mean_dev, se) = mean_and_stderr(m, n);
    let dim = rho0.dim();
    let data = rho0
        .matrix()
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, z)| z + Complex::new(mean_dev[2 * k], mean_dev[2 * k + 1]))
        .collect();
    let mean = ComplexMatrix::from_vec(dim, data)
        .expect("same shape as input")
        .hermitian_part();
    McEstimate {
        mean: DensityMatrix::new_unchecked(mean),
        stderr_re: se.iter().step_by(2).copied().collect(),
        stderr_im: se.iter().skip(1).step_by(2).copied().collect(),
        samples: n,
        seed,
    }
}

/// Average of `U_r ρ0 U_r†` over `n` noise samples.
pub fn mc_average(model: &NoiseModel, rho0: &DensityMatrix<f64>, t: f64, n: usize, seed: u64) -> Result<McEstimate> {
    check_samples(n)?;
    check_time(t)?;
    if rho0.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho0.dim(),
        });
    }
    let base = rho0.matrix();
    let m = block_moments(n, seed, 8, |rng, row| {
        let r = sample_r(model, rng);
        let u = rotation_unitary(r, t);
        write_deviation(&u.sandwich(base), base, row);
    });
    Ok(estimate(rho0, &m, n, seed))
}

/// Average of `(U_{r₁}⊗U_{r₂}) ρ0 (…)†` with independent samples per qubit.
pub fn mc_average_two_qubit(
    model: &NoiseModel,
    rho0: &DensityMatrix<f64>,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(n)?;
    check_time(t)?;
    if rho0.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho0.dim(),
        });
    }
    let base = rho0.matrix();
    let m = block_moments(n, seed, 32, |rng, row| {
        let r1 = sample_r(model, rng);
        let r2 = sample_r(model, rng);
        let u = rotation_unitary(r1, t)
            .kron(&rotation_unitary(r2, t))
            .expect("2x2 factors");
        write_deviation(&u.sandwich(base), base, row);
    });
    Ok(estimate(rho0, &m, n, seed))
}

/// Direct estimate of `Λᵢ(t) = ⟨rᵢ²/r² + (1 − rᵢ²/r²) cos 2rt⟩` with standard errors.
pub fn mc_lambda(model: &NoiseModel, t: f64, n: usize, seed: u64) -> Result<([f64; 3], [f64; 3])> {
    check_samples(n)?;
    check_time(t)?;
    let m = block_moments(n, seed, 3, |rng, row| {
        let r = sample_r(model, rng);
        let r2: f64 = r.iter().map(|c| c * c).sum();
        if r2 == 0.0 {
            row.fill(1.0);
            return;
        }
        let c = (2.0 * r2.sqrt() * t).cos();
        for i in 0..3 {
            let w = r[i] * r[i] / r2;
            row[i] = w + (1.0 - w) * c;
        }
    });
    let (mean, se) = mean_and_stderr(&m, n);
    Ok(([mean[0], mean[1], mean[2]], [se[0], se[1], se[2]]))
}
