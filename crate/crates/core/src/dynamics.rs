//! Fixed-step time integrators: the local Lindblad equation of the
//! Lorentzian model and the memory-kernel equation of telegraph noise.

use std::io::{self, Write};

use crate::channel::{apply_single, LambdaVector};
use crate::csv::{format_real, join_row, matrix_columns};
use crate::linalg::{density_to_bloch, ComplexMatrix, DensityMatrix};
use crate::{Error, Real, Result};

/// Which equation produced an [`EvolutionTrace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMethod {
    Lindblad,
    MemoryKernel,
    ExactLambda,
}

impl TraceMethod {
    pub fn tag(self) -> &'static str {
        match self {
            TraceMethod::Lindblad => "lindblad",
            TraceMethod::MemoryKernel => "memory-kernel",
            TraceMethod::ExactLambda => "exact-lambda",
        }
    }
}

/// Single-qubit trajectory on the uniform grid `tₖ = k h`.
#[derive(Clone, Debug)]
pub struct EvolutionTrace<T> {
    times: Vec<T>,
    states: Vec<DensityMatrix<T>>,
    method: TraceMethod,
}

impl<T: Real> EvolutionTrace<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn method(&self) -> TraceMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Bloch vector of every state.
    pub fn bloch(&self) -> Vec<[T; 3]> {
        self.states
            .iter()
            .map(|s| density_to_bloch(s).expect("trace states are qubits").components())
            .collect()
    }

    /// Header for [`write_csv`](Self::write_csv).
    pub fn csv_header() -> String {
        let mut cols = vec!["t".to_string()];
        cols.extend(matrix_columns(2, ""));
        cols.extend(["ax", "ay", "az"].map(String::from));
        join_row(cols)
    }

    /// Fields of row `k`: `t`, re/im of every entry, Bloch vector.
    pub fn csv_row(&self, k: usize) -> Vec<String> {
        let rho = &self.states[k];
        let mut fields = vec![format_real(self.times[k])];
        for z in rho.matrix().as_slice() {
            fields.push(format_real(z.re));
            fields.push(format_real(z.im));
        }
        let a = density_to_bloch(rho).expect("trace states are qubits").components();
        fields.extend(a.iter().map(|&c| format_real(c)));
        fields
    }

    /// Writes the header and one row per time.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", Self::csv_header())?;
        for k in 0..self.len() {
            writeln!(out, "{}", join_row(self.csv_row(k)))?;
        }
        Ok(())
    }
}

fn time_grid<T: Real>(total: T, h: T) -> Result<Vec<T>> {
    if !(total > T::zero() && total.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {total}")));
    }
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let steps = (total / h - T::lit(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
    Ok((0..=steps).map(|k| T::from_usize(k).expect("step index") * h).collect())
}

fn check_qubit<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    if rho.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    Ok(())
}

fn trace_drift<T: Real>(m: &ComplexMatrix<T>) -> T {
    let tr = m.trace();
    ((tr.re - T::one()).powi(2) + tr.im.powi(2)).sqrt()
}

/// `L(ρ) = −(Γ/2)[ρ − ⅓ Σᵢ σᵢρσᵢ]`.
pub fn lindblad_generator<T: Real>(gamma: T, rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut twirl = ComplexMatrix::zeros(2);
    for i in 1..4 {
        twirl = &twirl + &ComplexMatrix::pauli(i).sandwich(rho);
    }
    (rho - &twirl.scale(T::one() / T::lit(3.0))).scale(-gamma / T::lit(2.0))
}

/// Classic fourth-order Runge–Kutta integration of [`lindblad_generator`].
///
/// Requires `h ≤ T/100`; `h Γ > 0.1` is rejected as unstable.
pub fn lindblad_evolve<T: Real>(gamma: T, rho0: &DensityMatrix<T>, total: T, h: T) -> Result<EvolutionTrace<T>> {
    check_qubit(rho0)?;
    if !(gamma > T::zero() && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {gamma}")));
    }
    let times = time_grid(total, h)?;
    if h > total / T::lit(100.0) {
        return Err(Error::InvalidArgument(format!("step {h} exceeds horizon/100")));
    }
    if h * gamma > T::lit(0.1) {
        return Err(Error::Unstable(format!("step·rate = {} exceeds 0.1", h * gamma)));
    }
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let f = |m: &ComplexMatrix<T>| lindblad_generator(gamma, m);
    let mut rho = rho0.matrix().clone();
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for _ in 1..times.len() {
        let k1 = f(&rho);
        let k2 = f(&(&rho + &k1.scale(half)));
        let k3 = f(&(&rho + &k2.scale(half)));
        let k4 = f(&(&rho + &k3.scale(h)));
        let incr = &(&k1 + &k2.scale(two)) + &(&k3.scale(two) + &k4);
        rho = (&rho + &incr.scale(sixth)).hermitian_part();
        let drift = trace_drift(&rho);
        if drift > T::clip_tol() {
            return Err(Error::Unstable(format!("trace drift {drift}")));
        }
        states.push(DensityMatrix::new_unchecked(rho.clone()));
    }
    Ok(EvolutionTrace {
        times,
        states,
        method: TraceMethod::Lindblad,
    })
}

/// `D(ρ) = ρ − σx ρ σx`, the integrand of the telegraph memory kernel.
fn kernel_integrand<T: Real>(rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    rho - &ComplexMatrix::pauli(1).sandwich(rho)
}

/// Integrates `dρ/dt = −κ ∫₀ᵗ [ρ(s) − σx ρ(s) σx] ds`.
///
/// The history integral is the trapezoid rule over the stored trajectory;
/// each step is a Heun predictor-corrector. Requires
/// `h ≤ min(0.01/√κ, T/100)`.
pub fn memory_kernel_evolve<T: Real>(kappa: T, rho0: &DensityMatrix<T>, total: T, h: T) -> Result<EvolutionTrace<T>> {
    memory_kernel_impl(kappa, rho0, total, h, None)
}

/// As [`memory_kernel_evolve`] but with the history integral restricted
/// to the most recent `window` steps.
pub fn memory_kernel_evolve_truncated<T: Real>(
    kappa: T,
    rho0: &DensityMatrix<T>,
    total: T,
    h: T,
    window: usize,
) -> Result<EvolutionTrace<T>> {
    if window == 0 {
        return Err(Error::InvalidArgument(
            "history window must be at least one step".into(),
        ));
    }
    memory_kernel_impl(kappa, rho0, total, h, Some(window))
}

fn memory_kernel_impl<T: Real>(
    kappa: T,
    rho0: &DensityMatrix<T>,
    total: T,
    h: T,
    window: Option<usize>,
) -> Result<EvolutionTrace<T>> {
    check_qubit(rho0)?;
    if !(kappa > T::zero() && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "kernel constant must be positive, got {kappa}"
        )));
    }
    let times = time_grid(total, h)?;
    let limit = (T::lit(0.01) / kappa.sqrt()).min(total / T::lit(100.0));
    if h > limit * (T::one() + T::epsilon() * T::lit(16.0)) {
        return Err(Error::InvalidArgument(format!("step {h} exceeds limit {limit}")));
    }
    let half = h / T::lit(2.0);
    // prefix[k] = ∫₀^{t_k} D(ρ) ds by the trapezoid rule
    let mut prefix = vec![ComplexMatrix::zeros(2)];
    let history = |prefix: &[ComplexMatrix<T>], end: usize| -> ComplexMatrix<T> {
        match window {
            Some(w) if end > w => &prefix[end] - &prefix[end - w],
            _ => prefix[end].clone(),
        }
    };

    let mut rho = rho0.matrix().clone();
    let mut d_now = kernel_integrand(&rho);
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    for n in 0..times.len() - 1 {
        let slope = history(&prefix, n).scale(-kappa);
        let predicted = &rho + &slope.scale(h);
        let d_pred = kernel_integrand(&predicted);
        let last_interval = (&d_now + &d_pred).scale(half);
        // history over the window ending at t_{n+1}
        let h_pred = match window {
            Some(w) if n + 1 > w => &(&prefix[n] - &prefix[n + 1 - w]) + &last_interval,
            _ => &prefix[n] + &last_interval,
        };
        let slope_pred = h_pred.scale(-kappa);
        rho = (&rho + &(&slope + &slope_pred).scale(half)).hermitian_part();
        let drift = trace_drift(&rho);
        if drift > T::error_tol() {
            return Err(Error::Unstable(format!("trace drift {drift}")));
        }
        let d_next = kernel_integrand(&rho);
        let interval = (&d_now + &d_next).scale(half);
        prefix.push(&prefix[n] + &interval);
        d_now = d_next;
        states.push(DensityMatrix::new_unchecked(rho.clone()));
    }
    Ok(EvolutionTrace {
        times,
        states,
        method: TraceMethod::MemoryKernel,
    })
}

/// Applies the averaged channel `Λ(t)` to `ρ0` on the grid `tₖ = k h`.
pub fn exact_lambda_trace<T, F>(lambda: F, rho0: &DensityMatrix<T>, total: T, h: T) -> Result<EvolutionTrace<T>>
where
    T: Real,
    F: Fn(T) -> Result<LambdaVector<T>>,
{
    check_qubit(rho0)?;
    let times = time_grid(total, h)?;
    let states = times
        .iter()
        .map(|&t| apply_single(&lambda(t)?, rho0))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolutionTrace {
        times,
        states,
        method: TraceMethod::ExactLambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bloch_to_density, BlochVector};
    use num_complex::Complex;

    fn ket0() -> DensityMatrix<f64> {
        bloch_to_density(&BlochVector::new([0.0, 0.0, 1.0]).unwrap())
    }

    fn max_bloch_error(trace: &EvolutionTrace<f64>, exact: impl Fn(f64) -> [f64; 3]) -> f64 {
        trace
            .times()
            .iter()
            .zip(trace.bloch())
            .map(|(&t, a)| {
                let e = exact(t);
                (0..3).map(|i| (a[i] - e[i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn generator_contracts_bloch_vector_at_two_thirds_rate() {
        let gamma = 1.7f64;
        let a = [0.3f64, -0.5, 0.6];
        let rho = bloch_to_density(&BlochVector::new(a).unwrap());
        let d = lindblad_generator(gamma, rho.matrix());
        // dρ/dt = ½ (da/dt)·σ: read da/dt back through the Pauli traces
        for (i, &ai) in a.iter().enumerate() {
            let dai = (&ComplexMatrix::pauli(i + 1) * &d).trace();
            assert!((dai.re + 2.0 * gamma / 3.0 * ai).abs() < 1e-14);
            assert!(dai.im.abs() < 1e-14);
        }
        assert!(d.trace().norm() < 1e-15);
    }

    #[test]
    fn lindblad_fixed_point_and_decay() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        let tr = lindblad_evolve(1.0, &mixed, 1.0, 1e-3).unwrap();
        assert!(tr
            .states()
            .iter()
            .all(|s| s.matrix().max_abs_diff(mixed.matrix()) == 0.0));

        let tr = lindblad_evolve(1.0, &ket0(), 5.0, 1e-3).unwrap();
        assert_eq!(tr.method(), TraceMethod::Lindblad);
        assert_eq!(tr.times()[0], 0.0);
        let err = max_bloch_error(&tr, |t| [0.0, 0.0, (-2.0 * t / 3.0).exp()]);
        assert!(err < 1e-8, "{err}");
        for s in tr.states() {
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-10);
            assert_eq!(s.matrix().hermitian_deviation(), 0.0);
        }
    }

    #[test]
    fn lindblad_is_fourth_order() {
        let exact = |t: f64| [0.0, 0.0, (-2.0 * t / 3.0).exp()];
        let coarse = max_bloch_error(&lindblad_evolve(1.0, &ket0(), 10.0, 0.1).unwrap(), exact);
        let fine = max_bloch_error(&lindblad_evolve(1.0, &ket0(), 10.0, 0.05).unwrap(), exact);
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn lindblad_rejects_bad_steps() {
        assert!(matches!(
            lindblad_evolve(1.0, &ket0(), 1.0, 0.02),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            lindblad_evolve(20.0, &ket0(), 10.0, 0.01),
            Err(Error::Unstable(_))
        ));
        assert!(lindblad_evolve(0.0, &ket0(), 10.0, 0.01).is_err());
    }

    #[test]
    fn memory_kernel_reproduces_telegraph_closed_form() {
        let a = 1.0;
        let total = 2.0 * std::f64::consts::PI / a;
        let tr = memory_kernel_evolve(2.0 * a * a, &ket0(), total, 1e-3).unwrap();
        let err = max_bloch_error(&tr, |t| [0.0, 0.0, (2.0 * a * t).cos()]);
        assert!(err < 2e-4, "{err}");

        let printed = memory_kernel_evolve(a * a / 2.0, &ket0(), total, 1e-3).unwrap();
        let half = max_bloch_error(&printed, |t| [0.0, 0.0, (a * t).cos()]);
        let closed = max_bloch_error(&printed, |t| [0.0, 0.0, (2.0 * a * t).cos()]);
        assert!(half < 2e-4 && closed > 0.5, "{half} {closed}");
    }

    #[test]
    fn memory_kernel_is_second_order() {
        let a = 1.0;
        let exact = |t: f64| [0.0, 0.0, (2.0 * a * t).cos()];
        let total = 2.0 * std::f64::consts::PI;
        let coarse = max_bloch_error(&memory_kernel_evolve(2.0, &ket0(), total, 0.004).unwrap(), exact);
        let fine = max_bloch_error(&memory_kernel_evolve(2.0, &ket0(), total, 0.002).unwrap(), exact);
        assert!(coarse / fine >= 4.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn memory_kernel_fixes_states_commuting_with_sigma_x() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::from_pure(&[Complex::new(s, 0.0), Complex::new(s, 0.0)]).unwrap();
        let tr = memory_kernel_evolve(2.0, &plus, 3.0, 1e-3).unwrap();
        for st in tr.states() {
            assert!(st.matrix().max_abs_diff(plus.matrix()) < 1e-15);
        }
    }

    #[test]
    fn memory_kernel_depends_on_full_history() {
        let a = 1.0;
        let h = 1e-3;
        let t_star = std::f64::consts::PI / (2.0 * a);
        let full = memory_kernel_evolve(2.0, &ket0(), 2.0, h).unwrap();
        let local = memory_kernel_evolve_truncated(2.0, &ket0(), 2.0, h, 1).unwrap();
        let k = (t_star / h).round() as usize;
        let diff = full.states()[k].matrix().max_abs_diff(local.states()[k].matrix());
        assert!(diff > 1e-2, "{diff}");
    }

    #[test]
    fn memory_kernel_rejects_large_steps() {
        assert!(memory_kernel_evolve(2.0, &ket0(), 10.0, 0.05).is_err());
        assert!(memory_kernel_evolve(-1.0, &ket0(), 10.0, 1e-3).is_err());
    }

    #[test]
    fn exact_trace_and_csv() {
        let tr = exact_lambda_trace(
            |t: f64| LambdaVector::new([1.0, (2.0 * t).cos(), (2.0 * t).cos()], t),
            &ket0(),
            1.0,
            0.25,
        )
        .unwrap();
        assert_eq!(tr.len(), 5);
        assert_eq!(tr.method().tag(), "exact-lambda");
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], EvolutionTrace::<f64>::csv_header());
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1].split(',').count(), 1 + 8 + 3);
        let az: f64 = lines[3].split(',').next_back().unwrap().parse().unwrap();
        assert!((az - 1.0f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn f32_lindblad_path() {
        let rho = ket0().cast::<f32>();
        let tr = lindblad_evolve(1.0f32, &rho, 2.0, 0.01).unwrap();
        let az = tr.bloch().last().unwrap()[2];
        assert!((az - (-4.0f32 / 3.0).exp()).abs() < 1e-4);
    }
}
