use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zbnoise::channel::LambdaVector;
use zbnoise::fidelity::{two_qubit_pure_fidelity, TwoQubitPureAmps};
use zbnoise::linalg::{bloch_to_density, BlochVector};
use zbnoise::noise::{lambda_quadrature, sample_r, Axis, NoiseModel, RadialDensity};
use zbnoise::oracle::{mc_average, rotation_unitary};
use zbnoise::Complex;

fn built_in_models() -> Vec<(&'static str, NoiseModel)> {
    vec![
        ("lorentzian", NoiseModel::lorentzian(1.0).unwrap()),
        ("telegraph", NoiseModel::telegraph(Axis::Y, 1.3).unwrap()),
        ("gaussian-iso", NoiseModel::gaussian_isotropic(1.0).unwrap()),
        ("gaussian-aniso", NoiseModel::gaussian([1.0, 2.0, 3.0]).unwrap()),
        (
            "radial",
            NoiseModel::radial(RadialDensity::new(|r| 3.0 * r * r / 8.0, 2.0).unwrap()),
        ),
    ]
}

#[test]
fn mc_average_contracts_bloch_vector_by_lambda() {
    let a = [0.5, -0.4, 0.6];
    let rho0 = bloch_to_density(&BlochVector::new(a).unwrap());
    for (m, (name, model)) in built_in_models().into_iter().enumerate() {
        for k in 0..10 {
            let t = 0.3 * k as f64;
            let lambda = lambda_quadrature(&model, t, 1e-9).unwrap().lambda.components();
            let est = mc_average(&model, &rho0, t, 100_000, 7000 + 100 * m as u64 + k).unwrap();
            let mean = est.bloch().unwrap();
            let se = est.bloch_stderr().unwrap();
            for i in 0..3 {
                let dev = (mean[i] - lambda[i] * a[i]).abs();
                assert!(
                    dev <= 3.0 * se[i] + 1e-12,
                    "{name} t={t} axis {i}: |Δ|={dev:e}, 3σ={:e}",
                    3.0 * se[i]
                );
            }
        }
    }
}

#[test]
fn bell_overlap_matches_pure_state_formula() {
    let model = NoiseModel::gaussian_isotropic(1.0).unwrap();
    let psi = TwoQubitPureAmps::<f64>::bell();
    let amps = psi.amplitudes();
    let n = 100_000;
    for (k, t) in [0.4, 1.0, 2.2].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(90 + k as u64);
        let overlaps: Vec<f64> = (0..n)
            .map(|_| {
                let u = rotation_unitary(sample_r(&model, &mut rng), t)
                    .kron(&rotation_unitary(sample_r(&model, &mut rng), t))
                    .unwrap();
                let mut amp = Complex::new(0.0, 0.0);
                for i in 0..4 {
                    for j in 0..4 {
                        amp += amps[i].conj() * u[(i, j)] * amps[j];
                    }
                }
                amp.norm_sqr()
            })
            .collect();
        let mean = overlaps.iter().sum::<f64>() / n as f64;
        let var = overlaps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let lambda = lambda_quadrature(&model, t, 1e-9).unwrap().lambda.components()[0];
        let closed = two_qubit_pure_fidelity(&psi, &LambdaVector::isotropic(lambda, t).unwrap()).unwrap();
        assert!(
            (mean - closed).abs() <= 3.0 * se,
            "t={t}: {mean} vs {closed} (σ={se:e})"
        );
    }
}
