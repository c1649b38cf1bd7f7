use num_complex::Complex;

use super::eigen::{hermitian_eig, numerical_zero, psd_sqrt};
use super::matrix::check_dim;
use super::ComplexMatrix;
use crate::{Error, Real, Result};

/// Bloch vector `a` of a qubit state `½(𝟙 + a·σ)`, with `|a| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T> {
    a: [T; 3],
}

impl<T: Real> BlochVector<T> {
    pub fn new(a: [T; 3]) -> Result<Self> {
        let norm = a.iter().map(|&x| x * x).sum::<T>().sqrt();
        if !(norm <= T::one() + T::state_tol()) {
            return Err(Error::InvalidState(format!("Bloch vector norm {} exceeds 1", norm)));
        }
        Ok(Self { a })
    }

    pub(crate) fn new_unchecked(a: [T; 3]) -> Self {
        Self { a }
    }

    pub fn zero() -> Self {
        Self { a: [T::zero(); 3] }
    }

    pub fn components(&self) -> [T; 3] {
        self.a
    }

    /// Purity parameter `|a|`.
    pub fn norm(&self) -> T {
        self.a.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

/// Unit-trace, Hermitian, positive semidefinite density operator on one or
/// two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        check_dim(matrix.dim())?;
        let dev = matrix.hermitian_deviation();
        if dev > T::state_tol() {
            return Err(Error::NotHermitian {
                deviation: dev.as_f64(),
            });
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::state_tol() || tr.im.abs() > T::state_tol() {
            return Err(Error::InvalidState(format!(
                "trace {}{:+}i differs from 1",
                tr.re, tr.im
            )));
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.values[0] < -T::clip_tol() {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.values[0].as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a valid state by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    /// Pure state `|ψ⟩⟨ψ|`; the amplitudes must be normalized.
    pub fn from_pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let n = amplitudes.len();
        check_dim(n)?;
        let norm: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - T::one()).abs() > T::state_tol() {
            return Err(Error::InvalidState(format!("amplitudes have squared norm {norm}")));
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Ok(Self::new_unchecked(m))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let w = T::one() / T::lit(dim as f64);
        Ok(Self::new_unchecked(ComplexMatrix::identity(dim).scale(w)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &[Complex<T>]) -> Result<T> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        let n = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + psi[i].conj() * self.matrix[(i, j)] * psi[j];
            }
        }
        Ok(acc.re)
    }

    pub fn cast<U: Real>(&self) -> DensityMatrix<U> {
        DensityMatrix::new_unchecked(self.matrix.cast())
    }
}

/// `½(𝟙 + a·σ)`.
pub fn bloch_to_density<T: Real>(a: &BlochVector<T>) -> DensityMatrix<T> {
    let half = T::lit(0.5);
    let [x, y, z] = a.a;
    let m = ComplexMatrix::from_vec(
        2,
        vec![
            Complex::new(half * (T::one() + z), T::zero()),
            Complex::new(half * x, -half * y),
            Complex::new(half * x, half * y),
            Complex::new(half * (T::one() - z), T::zero()),
        ],
    )
    .expect("2x2 layout");
    DensityMatrix::new_unchecked(m)
}

/// `aᵢ = Tr(ρ σᵢ)` for a single-qubit state.
pub fn density_to_bloch<T: Real>(rho: &DensityMatrix<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = &rho.matrix;
    let x = m[(0, 1)].re + m[(1, 0)].re;
    let y = m[(1, 0)].im - m[(0, 1)].im;
    let z = m[(0, 0)].re - m[(1, 1)].re;
    Ok(BlochVector::new_unchecked([x, y, z]))
}

/// Product state `ρA ⊗ ρB`.
pub fn tensor<T: Real>(a: &DensityMatrix<T>, b: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    Ok(DensityMatrix::new_unchecked(a.matrix.kron(&b.matrix)?))
}

/// Traces out the first qubit of a two-qubit operator.
pub fn partial_trace_first<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if m.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: m.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(2);
    for k in 0..2 {
        for l in 0..2 {
            out[(k, l)] = m[(k, l)] + m[(2 + k, 2 + l)];
        }
    }
    Ok(out)
}

/// Traces out the second qubit of a two-qubit operator.
pub fn partial_trace_second<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if m.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: m.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)];
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let s = psd_sqrt(&rho.matrix)?;
    let inner = (&(&s * &sigma.matrix) * &s).hermitian_part();
    let eig = hermitian_eig(&inner)?;
    let floor = numerical_zero(eig.values.last().copied().unwrap_or(T::zero()).abs());
    let root_trace: T = eig
        .values
        .iter()
        .map(|&l| if l <= floor { T::zero() } else { l.sqrt() })
        .sum();
    Ok(root_trace * root_trace)
}
