use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Real, Result};

/// Dense row-major complex matrix of dimension 2 (one qubit) or 4 (two qubits).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

impl<T: Real> ComplexMatrix<T> {
    /// Zero matrix. Panics unless `dim` is 2 or 4.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "matrix dimension must be 2 or 4, got {dim}");
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diag(diag: &[T]) -> Result<Self> {
        check_dim(diag.len())?;
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        Ok(m)
    }

    /// Pauli matrix by index: 0 → identity, 1 → σx, 2 → σy, 3 → σz.
    pub fn pauli(index: usize) -> Self {
        let o = T::zero();
        let l = T::one();
        let c = |re, im| Complex::new(re, im);
        let data = match index {
            0 => vec![c(l, o), c(o, o), c(o, o), c(l, o)],
            1 => vec![c(o, o), c(l, o), c(l, o), c(o, o)],
            2 => vec![c(o, o), c(o, -l), c(o, l), c(o, o)],
            3 => vec![c(l, o), c(o, o), c(o, o), c(-l, o)],
            _ => panic!("Pauli index out of range: {index}"),
        };
        Self { dim: 2, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`; only 2×2 ⊗ 2×2 is supported.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: self.dim,
            });
        }
        if other.dim != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: other.dim,
            });
        }
        let mut out = Self::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `A · ρ · A†`.
    pub fn sandwich(&self, rho: &Self) -> Self {
        &(self * rho) * &self.adjoint()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest elementwise deviation `|M - M†|`.
    pub fn hermitian_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * half;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (M::pauli(1), M::pauli(2), M::pauli(3));
        let i = Complex::new(0.0, 1.0);
        // σx σy = i σz
        assert!((&x * &y).max_abs_diff(&z.scale_complex(i)) < 1e-15);
        for p in [&x, &y, &z] {
            assert!((p * p).max_abs_diff(&M::identity(2)) < 1e-15);
            assert_eq!(p.hermitian_deviation(), 0.0);
        }
    }

    #[test]
    fn kron_layout() {
        let z = M::pauli(3);
        let x = M::pauli(1);
        let zx = z.kron(&x).unwrap();
        assert_eq!(zx[(0, 1)], Complex::new(1.0, 0.0));
        assert_eq!(zx[(2, 3)], Complex::new(-1.0, 0.0));
        assert_eq!(zx[(0, 2)], Complex::new(0.0, 0.0));
        assert!(zx.kron(&x).is_err());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(
            M::from_vec(3, vec![Complex::new(0.0, 0.0); 9]),
            Err(Error::UnsupportedDimension(3))
        );
        assert!(M::from_vec(2, vec![Complex::new(0.0, 0.0); 3]).is_err());
    }
}
