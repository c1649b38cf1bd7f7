//! Built-in run configurations.

use crate::config::{AxisSpec, DynamicsSpec, ModelSpec, RunConfig, StateSpec, TimeGrid, Tolerances};

pub const PRESET_NAMES: [&str; 6] = [
    "fig1-upper",
    "fig1-lower",
    "fig2",
    "telegraph",
    "lorentzian",
    "exponential",
];

fn base(model: ModelSpec, t_max: f64, points: usize) -> RunConfig {
    RunConfig {
        model,
        t_grid: TimeGrid {
            t_min: 0.0,
            t_max,
            points,
        },
        state: StateSpec::Bloch([0.0, 0.0, 1.0]),
        samples: 100_000,
        seed: 1,
        tolerances: Tolerances::default(),
        dynamics: DynamicsSpec::default(),
        output: None,
    }
}

/// Looks up a preset by name.
pub fn preset(name: &str) -> Option<RunConfig> {
    Some(match name {
        // isotropic Gaussian, Kraus coefficients versus time
        "fig1-upper" => base(ModelSpec::Gaussian { d: [1.0, 1.0, 1.0] }, 10.0, 201),
        "fig1-lower" => base(ModelSpec::Gaussian { d: [1.0, 2.0, 3.0] }, 10.0, 201),
        // m-family fidelities under p(r) = π^{-3/2} e^{-r²}
        "fig2" => RunConfig {
            state: StateSpec::M(vec![1.0, 0.9, 0.7, 0.4, 0.0]),
            ..base(ModelSpec::Gaussian { d: [1.0, 1.0, 1.0] }, 5.0, 101)
        },
        "telegraph" => base(
            ModelSpec::Telegraph {
                amplitude: 1.0,
                axis: AxisSpec::X,
            },
            2.0 * std::f64::consts::PI,
            101,
        ),
        "lorentzian" => base(ModelSpec::Lorentzian { gamma: 1.0 }, 5.0, 101),
        "exponential" => base(ModelSpec::Exponential { rate: 1.0 }, 5.0, 101),
        _ => return None,
    })
}
