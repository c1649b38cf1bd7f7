//! Closed-form entanglement fidelities between channel inputs and outputs.

use num_complex::Complex;

use crate::channel::{apply_two_qubit, require_cp, LambdaVector};
use crate::linalg::{uhlmann_fidelity, BlochVector, ComplexMatrix, DensityMatrix};
use crate::{Error, Real, Result};

/// `F = ½(ξ + √(χ(1 − |a|²)))` with `ξ = 1 + Σ aᵢ²Λᵢ` and `χ = 1 − Σ aᵢ²Λᵢ²`.
pub fn single_qubit_fidelity<T: Real>(a: &BlochVector<T>, lambda: &LambdaVector<T>) -> Result<T> {
    require_cp(lambda)?;
    let a = a.components();
    let lam = lambda.components();
    let mut xi = T::one();
    let mut chi = T::one();
    let mut norm2 = T::zero();
    for i in 0..3 {
        let a2 = a[i] * a[i];
        xi = xi + a2 * lam[i];
        chi = chi - a2 * lam[i] * lam[i];
        norm2 = norm2 + a2;
    }
    let mixed = (chi * (T::one() - norm2)).max(T::zero());
    Ok((xi + mixed.sqrt()) / T::lit(2.0))
}

/// Pure two-qubit state `a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitPureAmps<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> TwoQubitPureAmps<T> {
    /// Amplitudes must be normalized within the state tolerance.
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if !((norm - T::one()).abs() <= T::state_tol()) {
            return Err(Error::InvalidState(format!("amplitudes have norm² {norm}")));
        }
        Ok(Self { a, b, c, d })
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let s = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self { a: s, b: z, c: z, d: s }
    }

    pub fn amplitudes(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `|bc − ad|`, half the concurrence.
    pub fn entanglement_term(&self) -> T {
        (self.b * self.c - self.a * self.d).norm()
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(&self.amplitudes()).expect("normalized amplitudes")
    }
}

/// `F = ((1+Λ)/2)² − 4Λ((1−Λ)/2)|bc − ad|²` for an isotropic channel on each qubit.
pub fn two_qubit_pure_fidelity<T: Real>(psi: &TwoQubitPureAmps<T>, lambda: &LambdaVector<T>) -> Result<T> {
    require_cp(lambda)?;
    let l = lambda.isotropic_value(T::state_tol()).ok_or_else(|| {
        Error::UnsupportedFormula(format!(
            "pure-state formula needs isotropic Λ, got {:?}",
            lambda.components()
        ))
    })?;
    let two = T::lit(2.0);
    let e = psi.entanglement_term();
    let plus = (T::one() + l) / two;
    Ok(plus * plus - T::lit(4.0) * l * (T::one() - l) / two * e * e)
}

/// Which computation produced a fidelity value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FidelityRoute {
    ClosedForm,
    Uhlmann,
}

/// Pure-state formula when Λ is isotropic, otherwise `⟨Ψ|ρ_out|Ψ⟩` from the
/// full two-qubit channel.
pub fn two_qubit_pure_fidelity_auto<T: Real>(
    psi: &TwoQubitPureAmps<T>,
    lambda: &LambdaVector<T>,
) -> Result<(T, FidelityRoute)> {
    match two_qubit_pure_fidelity(psi, lambda) {
        Ok(f) => Ok((f, FidelityRoute::ClosedForm)),
        Err(Error::UnsupportedFormula(_)) => {
            let out = apply_two_qubit(lambda, lambda, &psi.to_density())?;
            Ok((out.expectation_pure(&psi.amplitudes())?, FidelityRoute::Uhlmann))
        }
        Err(e) => Err(e),
    }
}

/// `ρ(m) = ½(|00⟩⟨00| + |11⟩⟨11|) + (m/2)(|00⟩⟨11| + |11⟩⟨00|)`, `0 ≤ m ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MFamilyState<T> {
    m: T,
}

impl<T: Real> MFamilyState<T> {
    pub fn new(m: T) -> Result<Self> {
        if !(m >= T::zero() && m <= T::one()) {
            return Err(Error::InvalidState(format!("coherence m = {m} outside [0, 1]")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        let half = T::lit(0.5);
        let mut mat = ComplexMatrix::zeros(4);
        mat[(0, 0)] = Complex::new(half, T::zero());
        mat[(3, 3)] = Complex::new(half, T::zero());
        mat[(0, 3)] = Complex::new(half * self.m, T::zero());
        mat[(3, 0)] = Complex::new(half * self.m, T::zero());
        DensityMatrix::new(mat).expect("m in [0, 1] gives a valid state")
    }
}

/// `F = ¼[A + m²s + √(1−m²) √(A² − m²s²)]` with `A = 1 + Λz²`, `s = Λx² + Λy²`.
pub fn two_qubit_m_fidelity<T: Real>(state: &MFamilyState<T>, lambda: &LambdaVector<T>) -> Result<T> {
    require_cp(lambda)?;
    let [lx, ly, lz] = lambda.components();
    let m2 = state.m * state.m;
    let big = T::one() + lz * lz;
    let s = lx * lx + ly * ly;
    let root = ((T::one() - m2).max(T::zero()) * (big * big - m2 * s * s).max(T::zero())).sqrt();
    Ok((big + m2 * s + root) / T::lit(4.0))
}

/// Uhlmann fidelity between `ρ(m)` and its image under `Λ ⊗ Λ`.
pub fn two_qubit_m_fidelity_uhlmann<T: Real>(state: &MFamilyState<T>, lambda: &LambdaVector<T>) -> Result<T> {
    let rho = state.to_density();
    let out = apply_two_qubit(lambda, lambda, &rho)?;
    uhlmann_fidelity(&rho, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_single;
    use crate::linalg::bloch_to_density;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lam(l: [f64; 3]) -> LambdaVector<f64> {
        LambdaVector::new(l, 1.0).unwrap()
    }

    /// Uniform sample of the CP tetrahedron spanned by the four Pauli twirls.
    fn random_cp_lambda(rng: &mut ChaCha8Rng) -> LambdaVector<f64> {
        let mut w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().ln());
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        // Λᵢ = w0 + wᵢ − (sum of the other two)
        lam([
            w[0] + w[1] - w[2] - w[3],
            w[0] - w[1] + w[2] - w[3],
            w[0] - w[1] - w[2] + w[3],
        ])
    }

    fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector<f64> {
        loop {
            let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            if a.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                return BlochVector::new(a).unwrap();
            }
        }
    }

    fn random_pure(rng: &mut ChaCha8Rng) -> TwoQubitPureAmps<f64> {
        let v: [Complex<f64>; 4] =
            std::array::from_fn(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        TwoQubitPureAmps::new(v[0] / n, v[1] / n, v[2] / n, v[3] / n).unwrap()
    }

    #[test]
    fn single_qubit_examples() {
        let any = lam([0.2, -0.1, 0.5]);
        assert_eq!(single_qubit_fidelity(&BlochVector::zero(), &any).unwrap(), 1.0);
        let a = BlochVector::new([0.3, -0.4, 0.5]).unwrap();
        assert!((single_qubit_fidelity(&a, &LambdaVector::identity(0.0)).unwrap() - 1.0f64).abs() < 1e-15);
        let up = BlochVector::new([0.0, 0.0, 1.0]).unwrap();
        let f = single_qubit_fidelity(&up, &lam([1.0 / 3.0; 3])).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            single_qubit_fidelity(&a, &lam([1.0, 1.0, -1.0])),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn single_qubit_matches_uhlmann() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let a = random_bloch(&mut rng);
            let l = random_cp_lambda(&mut rng);
            let rho = bloch_to_density(&a);
            let out = apply_single(&l, &rho).unwrap();
            let f = single_qubit_fidelity(&a, &l).unwrap();
            let u = uhlmann_fidelity(&rho, &out).unwrap();
            assert!((f - u).abs() < 1e-10, "{f} vs {u}");
        }
    }

    #[test]
    fn two_qubit_pure_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = Complex::new(0.0, 0.0);
        let (c, d) = (Complex::new(0.6, 0.0), Complex::new(0.0, 0.8));
        let separable = TwoQubitPureAmps::new(z, z, c, d).unwrap();
        for l in [0.1, 0.5, 0.9] {
            let f = two_qubit_pure_fidelity(&separable, &lam([l; 3])).unwrap();
            assert!((f - ((1.0 + l) / 2.0).powi(2)).abs() < 1e-15);
            let bell = two_qubit_pure_fidelity(&TwoQubitPureAmps::bell(), &lam([l; 3])).unwrap();
            assert!(bell < f);
            assert!((bell - (1.0 + 3.0 * l * l) / 4.0).abs() < 1e-15);
        }
        for _ in 0..20 {
            let psi = random_pure(&mut rng);
            let f = two_qubit_pure_fidelity(&psi, &LambdaVector::identity(0.0)).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_qubit_pure_matches_tensor_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for k in 0..500 {
            let psi = random_pure(&mut rng);
            let l = lam([0.1 * (1 + k % 9) as f64; 3]);
            let out = apply_two_qubit(&l, &l, &psi.to_density()).unwrap();
            let brute = out.expectation_pure(&psi.amplitudes()).unwrap();
            let f = two_qubit_pure_fidelity(&psi, &l).unwrap();
            assert!((f - brute).abs() < 1e-10);
        }
    }

    #[test]
    fn anisotropic_pure_routes_to_general_path() {
        let psi = TwoQubitPureAmps::bell();
        let l = lam([0.2, 0.5, 0.7]);
        assert!(matches!(
            two_qubit_pure_fidelity(&psi, &l),
            Err(Error::UnsupportedFormula(_))
        ));
        let (f, route) = two_qubit_pure_fidelity_auto(&psi, &l).unwrap();
        assert_eq!(route, FidelityRoute::Uhlmann);
        let u = uhlmann_fidelity(&psi.to_density(), &apply_two_qubit(&l, &l, &psi.to_density()).unwrap()).unwrap();
        assert!((f - u).abs() < 1e-10);
        let (_, route) = two_qubit_pure_fidelity_auto(&psi, &lam([0.4; 3])).unwrap();
        assert_eq!(route, FidelityRoute::ClosedForm);
    }

    #[test]
    fn m_family_examples() {
        for m in [0.0, 0.3, 0.9, 1.0] {
            let s = MFamilyState::new(m).unwrap();
            let f = two_qubit_m_fidelity(&s, &LambdaVector::identity(0.0)).unwrap();
            assert!((f - 1.0f64).abs() < 1e-15, "m={m}: {f}");
        }
        let zero = MFamilyState::new(0.0).unwrap();
        for lz in [0.0, 0.3, 0.8] {
            let l = lam([0.1, 0.2, lz]);
            let f = two_qubit_m_fidelity(&zero, &l).unwrap();
            assert!((f - (1.0 + lz * lz) / 2.0).abs() < 1e-15);
            let u = two_qubit_m_fidelity_uhlmann(&zero, &l).unwrap();
            assert!((f - u).abs() < 1e-10);
        }
        assert!(MFamilyState::new(1.2).is_err());
        assert!(MFamilyState::new(f64::NAN).is_err());
    }

    #[test]
    fn m_family_matches_uhlmann_for_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let s = MFamilyState::new(rng.random_range(0.0..=1.0)).unwrap();
            let l = random_cp_lambda(&mut rng);
            let f = two_qubit_m_fidelity(&s, &l).unwrap();
            let u = two_qubit_m_fidelity_uhlmann(&s, &l).unwrap();
            assert!((f - u).abs() < 1e-8, "m={} {:?}: {f} vs {u}", s.m(), l.components());
        }
    }

    proptest! {
        #[test]
        fn fidelities_lie_in_unit_interval(
            w in prop::array::uniform4(0.01f64..1.0),
            a in prop::array::uniform3(-0.577f64..0.577),
            m in 0.0f64..=1.0,
        ) {
            let total: f64 = w.iter().sum();
            let w = w.map(|x| x / total);
            let l = lam([
                w[0] + w[1] - w[2] - w[3],
                w[0] - w[1] + w[2] - w[3],
                w[0] - w[1] - w[2] + w[3],
            ]);
            let f1 = single_qubit_fidelity(&BlochVector::new(a).unwrap(), &l).unwrap();
            let f2 = two_qubit_m_fidelity(&MFamilyState::new(m).unwrap(), &l).unwrap();
            for f in [f1, f2] {
                prop_assert!((0.0..=1.0 + 1e-10).contains(&f));
            }
        }
    }

    #[test]
    fn f32_single_qubit() {
        let a = BlochVector::new([0.0f32, 0.0, 1.0]).unwrap();
        let l = LambdaVector::new([1.0f32 / 3.0; 3], 1.0).unwrap();
        assert!((single_qubit_fidelity(&a, &l).unwrap() - 2.0 / 3.0).abs() < 1e-6);
    }
}
