//! Cyclic Jacobi eigensolver for small Hermitian matrices and the PSD
//! square root built on it.

use num_complex::Complex;

use super::ComplexMatrix;
use crate::{Error, Real, Result};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `M = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as columns, in the same order as `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Rebuilds `V f(λ) V†` for an arbitrary spectral function.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.vectors.dim();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn check_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > T::state_tol() * T::one().max(m.max_abs()) {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    Ok(())
}

/// Hermitian eigen-decomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(m)?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let zero = Complex::new(T::zero(), T::zero());
    let two = T::lit(2.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < T::jacobi_tol() {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs == T::zero() {
                    continue;
                }
                // Phase rotation makes the (p, q) element real, then a real
                // Jacobi rotation annihilates it.
                let phase = g.conj() / g_abs;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (two * g_abs);
                let t = if theta.abs() > T::lit(1e150) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                let j_pp = Complex::new(c, T::zero());
                let j_pq = Complex::new(s, T::zero());
                let j_qp = phase * (-s);
                let j_qq = phase * c;

                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
                // V ← V J
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues at or below this magnitude are indistinguishable from
/// round-off of a zero eigenvalue and are treated as exactly zero.
pub(crate) fn numerical_zero<T: Real>(scale: T) -> T {
    T::lit(64.0) * T::epsilon() * T::one().max(scale)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-error_tol, 0)` are clipped to zero; anything more
/// negative is reported as [`Error::NotPositive`].
pub fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(m)?;
    let min = eig.values[0];
    if min < -T::error_tol() {
        return Err(Error::NotPositive {
            min_eigenvalue: min.as_f64(),
        });
    }
    let max = *eig.values.last().expect("non-empty spectrum");
    let floor = numerical_zero(max.abs());
    Ok(eig
        .reconstruct_with(|l| if l <= floor { T::zero() } else { l.sqrt() })
        .hermitian_part())
}
