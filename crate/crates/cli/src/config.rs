//! Run configuration: a single JSON document, optionally seeded from a preset.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use zbnoise::channel::LambdaVector;
use zbnoise::fidelity::{MFamilyState, TwoQubitPureAmps};
use zbnoise::linalg::BlochVector;
use zbnoise::noise::{lambda_best, Axis, EvalPath, NoiseModel, RadialDensity};
use zbnoise::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisSpec {
    X,
    Y,
    Z,
}

impl From<AxisSpec> for Axis {
    fn from(a: AxisSpec) -> Self {
        match a {
            AxisSpec::X => Axis::X,
            AxisSpec::Y => Axis::Y,
            AxisSpec::Z => Axis::Z,
        }
    }
}

/// Noise model description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Lorentzian {
        gamma: f64,
    },
    Telegraph {
        amplitude: f64,
        #[serde(default = "default_axis")]
        axis: AxisSpec,
    },
    Gaussian {
        d: [f64; 3],
    },
    /// Isotropic law whose density of `|r|` is tabulated on a uniform grid over `[0, rmax]`.
    Radial {
        rmax: f64,
        pdf: Vec<f64>,
    },
    /// Synthetic `Λᵢ(t) = e^{−rate·t}`; has no sampler.
    Exponential {
        rate: f64,
    },
}

fn default_axis() -> AxisSpec {
    AxisSpec::X
}

/// A resolved model ready for evaluation.
#[derive(Clone, Debug)]
pub enum Model {
    Noise(NoiseModel),
    Exponential { rate: f64 },
}

/// A Λ value with the tag of the path that produced it.
#[derive(Clone, Copy, Debug)]
pub struct TaggedLambda {
    pub lambda: LambdaVector<f64>,
    pub method: &'static str,
}

impl Model {
    pub fn lambda(&self, t: f64, tol: f64) -> zbnoise::Result<TaggedLambda> {
        match self {
            Model::Noise(model) => {
                let eval = lambda_best(model, t, tol)?;
                Ok(TaggedLambda {
                    lambda: eval.lambda,
                    method: eval.path.tag(),
                })
            }
            Model::Exponential { rate } => Ok(TaggedLambda {
                lambda: LambdaVector::isotropic((-rate * t).exp(), t)?,
                method: if t == 0.0 {
                    EvalPath::Exact.tag()
                } else {
                    EvalPath::Analytic.tag()
                },
            }),
        }
    }

    pub fn noise(&self) -> Option<&NoiseModel> {
        match self {
            Model::Noise(m) => Some(m),
            Model::Exponential { .. } => None,
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        Ok(match self {
            ModelSpec::Lorentzian { gamma } => Model::Noise(NoiseModel::lorentzian(*gamma)?),
            ModelSpec::Telegraph { amplitude, axis } => {
                Model::Noise(NoiseModel::telegraph((*axis).into(), *amplitude)?)
            }
            ModelSpec::Gaussian { d } => Model::Noise(NoiseModel::gaussian(*d)?),
            ModelSpec::Radial { rmax, pdf } => {
                Model::Noise(NoiseModel::radial(RadialDensity::from_table(pdf.clone(), *rmax)?))
            }
            ModelSpec::Exponential { rate } => {
                ensure!(*rate > 0.0 && rate.is_finite(), "exponential rate must be positive");
                Model::Exponential { rate: *rate }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.t_min >= 0.0, "t_min must be non-negative");
        ensure!(self.points >= 2, "a time grid needs at least two points");
        ensure!(
            self.t_max > self.t_min && self.t_max.is_finite(),
            "t_max must exceed t_min"
        );
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * k as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Input state: a Bloch vector, two-qubit pure amplitudes `[[re, im]; 4]`,
/// or a list of coherence parameters of the m-family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Bloch([f64; 3]),
    Amplitudes([[f64; 2]; 4]),
    M(Vec<f64>),
}

/// A validated input state.
#[derive(Clone, Debug)]
pub enum InputState {
    Bloch(BlochVector<f64>),
    Pure(TwoQubitPureAmps<f64>),
    MFamily(Vec<MFamilyState<f64>>),
}

impl StateSpec {
    pub fn build(&self) -> Result<InputState> {
        Ok(match self {
            StateSpec::Bloch(a) => InputState::Bloch(BlochVector::new(*a)?),
            StateSpec::Amplitudes(v) => {
                let z = v.map(|[re, im]| Complex::new(re, im));
                InputState::Pure(TwoQubitPureAmps::new(z[0], z[1], z[2], z[3])?)
            }
            StateSpec::M(ms) => {
                ensure!(!ms.is_empty(), "m-family list is empty");
                InputState::MFamily(ms.iter().map(|&m| MFamilyState::new(m)).collect::<Result<_, _>>()?)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Requested accuracy of numerical Λ.
    pub quadrature: f64,
    /// Allowed gap between closed-form and Uhlmann fidelities.
    pub fidelity: f64,
    /// Absolute floor of the Monte-Carlo acceptance band.
    pub oracle_floor: f64,
    /// Residual below which a Λ family counts as divisible.
    pub divisibility: f64,
    /// Allowed gap between an integrated trace and its reference.
    pub dynamics: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 1e-9,
            fidelity: 1e-8,
            oracle_floor: 1e-6,
            divisibility: 1e-12,
            dynamics: 2e-4,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quadrature", self.quadrature),
            ("fidelity", self.fidelity),
            ("oracle_floor", self.oracle_floor),
            ("divisibility", self.divisibility),
            ("dynamics", self.dynamics),
        ] {
            ensure!(v > 0.0, "tolerance {name} must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSpec {
    /// Integration step.
    pub step: f64,
    /// Memory-kernel constant; defaults to `2a²` for telegraph noise.
    pub kappa: Option<f64>,
    /// `(t, s)` pairs for the semigroup test.
    pub divisibility_pairs: Vec<[f64; 2]>,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self {
            step: 1e-3,
            kappa: None,
            divisibility_pairs: vec![[0.5, 0.5], [0.25, 0.75], [1.0, 1.0], [1.0, 2.0]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub t_grid: TimeGrid,
    #[serde(default = "default_state")]
    pub state: StateSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub dynamics: DynamicsSpec,
    /// CSV destination; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_state() -> StateSpec {
    StateSpec::Bloch([0.0, 0.0, 1.0])
}

fn default_samples() -> usize {
    100_000
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("parsing run configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.t_grid.validate()?;
        self.tolerances.validate()?;
        self.model.build()?;
        self.state.build()?;
        if !(self.dynamics.step > 0.0) {
            bail!("dynamics step must be positive");
        }
        Ok(())
    }

    /// Compact JSON used in output comment lines.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }
}
