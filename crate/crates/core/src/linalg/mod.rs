//! Dense complex linear algebra for one- and two-qubit operators.

mod eigen;
mod matrix;
mod state;

pub use eigen::{hermitian_eig, psd_sqrt, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use state::{
    bloch_to_density, density_to_bloch, partial_trace_first, partial_trace_second, tensor, uhlmann_fidelity,
    BlochVector, DensityMatrix,
};
