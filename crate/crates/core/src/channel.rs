//! Pauli-diagonal qubit channels parameterized by per-axis contraction
//! factors `Λᵢ(t)` and their Kraus decomposition.

use crate::linalg::{bloch_to_density, density_to_bloch, BlochVector, ComplexMatrix, DensityMatrix};
use crate::{Error, Real, Result};

/// Contraction factors `(Λx, Λy, Λz)` of the averaged channel at time `t`.
///
/// A Bloch vector maps componentwise as `aᵢ → Λᵢ aᵢ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaVector<T> {
    lam: [T; 3],
    t: T,
}

impl<T: Real> LambdaVector<T> {
    /// Each component must lie in `[-1, 1]` (up to the state tolerance).
    pub fn new(lam: [T; 3], t: T) -> Result<Self> {
        let bound = T::one() + T::state_tol();
        if let Some(bad) = lam.iter().find(|l| !(l.abs() <= bound)) {
            return Err(Error::InvalidLambda(format!("component {bad} outside [-1, 1]")));
        }
        Ok(Self { lam, t })
    }

    pub fn isotropic(lambda: T, t: T) -> Result<Self> {
        Self::new([lambda; 3], t)
    }

    /// The identity channel.
    pub fn identity(t: T) -> Self {
        Self { lam: [T::one(); 3], t }
    }

    pub fn components(&self) -> [T; 3] {
        self.lam
    }

    pub fn time(&self) -> T {
        self.t
    }

    /// Returns the common value when all three components agree within `tol`.
    pub fn isotropic_value(&self, tol: T) -> Option<T> {
        let [x, y, z] = self.lam;
        ((x - y).abs() <= tol && (x - z).abs() <= tol && (y - z).abs() <= tol).then_some(x)
    }

    pub fn cast<U: Real>(&self) -> LambdaVector<U> {
        LambdaVector {
            lam: self.lam.map(|l| U::lit(l.as_f64())),
            t: U::lit(self.t.as_f64()),
        }
    }
}

/// Coefficients `(k0, k1, k2, k3)` of the Kraus operators `Kᵢ = kᵢ σᵢ`
/// (`σ₀ = 𝟙`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausCoefficients<T> {
    k: [T; 4],
}

impl<T: Real> KrausCoefficients<T> {
    pub fn coefficients(&self) -> [T; 4] {
        self.k
    }

    /// Squared coefficients, i.e. the Pauli error probabilities.
    pub fn weights(&self) -> [T; 4] {
        self.k.map(|k| k * k)
    }

    /// Materialized operators `kᵢ σᵢ`.
    pub fn operators(&self) -> [ComplexMatrix<T>; 4] {
        std::array::from_fn(|i| ComplexMatrix::pauli(i).scale(self.k[i]))
    }
}

/// Result of [`cp_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpReport<T> {
    pub valid: bool,
    /// `1+Λx+Λy+Λz`, `1+Λx−Λy−Λz`, `1−Λx+Λy−Λz`, `1−Λx−Λy+Λz`; each equals
    /// four times a Kraus weight.
    pub radicands: [T; 4],
}

fn radicands<T: Real>(lambda: &LambdaVector<T>) -> [T; 4] {
    let [x, y, z] = lambda.lam;
    let one = T::one();
    [one + x + y + z, one + x - y - z, one - x + y - z, one - x - y + z]
}

/// Complete positivity of the Pauli-diagonal map: every radicand must be
/// non-negative (within the clip tolerance).
pub fn cp_check<T: Real>(lambda: &LambdaVector<T>) -> CpReport<T> {
    let radicands = radicands(lambda);
    CpReport {
        valid: radicands.iter().all(|&r| r >= -T::clip_tol()),
        radicands,
    }
}

pub(crate) fn require_cp<T: Real>(lambda: &LambdaVector<T>) -> Result<[T; 4]> {
    let r = radicands(lambda);
    if r.iter().any(|&v| v < -T::error_tol()) {
        return Err(Error::NotCompletelyPositive {
            radicands: r.map(Real::as_f64),
        });
    }
    Ok(r)
}

/// `k0 = ½√(1+Λx+Λy+Λz)`, `k1 = ½√(1+Λx−Λy−Λz)`, `k2 = ½√(1−Λx+Λy−Λz)`,
/// `k3 = ½√(1−Λx−Λy+Λz)`. Slightly negative radicands clip to zero.
pub fn kraus_from_lambda<T: Real>(lambda: &LambdaVector<T>) -> Result<KrausCoefficients<T>> {
    let r = require_cp(lambda)?;
    let half = T::lit(0.5);
    Ok(KrausCoefficients {
        k: r.map(|v| half * v.max(T::zero()).sqrt()),
    })
}

fn require_qubit<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Applies the channel through the Bloch contraction `aᵢ → Λᵢ aᵢ`.
pub fn apply_single<T: Real>(lambda: &LambdaVector<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    require_qubit(rho)?;
    require_cp(lambda)?;
    let a = density_to_bloch(rho)?.components();
    let out = std::array::from_fn(|i| lambda.lam[i] * a[i]);
    Ok(bloch_to_density(&BlochVector::new_unchecked(out)))
}

/// Applies the operator-sum form `Σ kᵢ² σᵢ ρ σᵢ`.
pub fn apply_kraus_single<T: Real>(kraus: &KrausCoefficients<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    require_qubit(rho)?;
    let mut out = ComplexMatrix::zeros(2);
    for (i, w) in kraus.weights().into_iter().enumerate() {
        if w == T::zero() {
            continue;
        }
        let p = ComplexMatrix::pauli(i);
        out = &out + &p.sandwich(rho.matrix()).scale(w);
    }
    Ok(DensityMatrix::new_unchecked(out.hermitian_part()))
}

/// Independent channels on each qubit: `Σ_{rs} (K_r⊗K_s) ρ (K_r⊗K_s)†`.
pub fn apply_two_qubit<T: Real>(
    lambda_a: &LambdaVector<T>,
    lambda_b: &LambdaVector<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let ka = kraus_from_lambda(lambda_a)?;
    let kb = kraus_from_lambda(lambda_b)?;
    let ops_a = ka.operators();
    let ops_b = kb.operators();
    let mut out = ComplexMatrix::zeros(4);
    for (r, opa) in ops_a.iter().enumerate() {
        if ka.k[r] == T::zero() {
            continue;
        }
        for (s, opb) in ops_b.iter().enumerate() {
            if kb.k[s] == T::zero() {
                continue;
            }
            let k = opa.kron(opb)?;
            out = &out + &k.sandwich(rho.matrix());
        }
    }
    Ok(DensityMatrix::new_unchecked(out.hermitian_part()))
}

/// Report of [`divisibility_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivisibilityReport<T> {
    pub divisible: bool,
    /// `maxᵢ |Λᵢ(t+s) − Λᵢ(t)Λᵢ(s)|`.
    pub residual: T,
}

/// Tests the semigroup law `Φ_t ∘ Φ_s = Φ_{t+s}` at one pair of times.
///
/// Pauli-diagonal maps compose componentwise, so the check reduces to
/// `Λᵢ(t+s) = Λᵢ(t) Λᵢ(s)`.
pub fn divisibility_check<T, F>(lambda: F, t: T, s: T, tol: T) -> Result<DivisibilityReport<T>>
where
    T: Real,
    F: Fn(T) -> Result<LambdaVector<T>>,
{
    if t < T::zero() || s < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "divisibility times must be non-negative (t={t}, s={s})"
        )));
    }
    let lt = lambda(t)?.lam;
    let ls = lambda(s)?.lam;
    let lts = lambda(t + s)?.lam;
    let residual = (0..3).map(|i| (lts[i] - lt[i] * ls[i]).abs()).fold(T::zero(), T::max);
    Ok(DivisibilityReport {
        divisible: residual <= tol,
        residual,
    })
}

/// Kraus-form channel for the unbiased depolarizing map with error
/// probability `p`: `(1−p)ρ + (p/3)Σ σᵢρσᵢ`.
pub fn unbiased_depolarizing<T: Real>(p: T) -> Result<KrausCoefficients<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    let side = (p / T::lit(3.0)).sqrt();
    Ok(KrausCoefficients {
        k: [(T::one() - p).sqrt(), side, side, side],
    })
}
