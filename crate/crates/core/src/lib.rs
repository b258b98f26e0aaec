//! State-space gradient descent: an ancilla-assisted variational optimizer
//! over density matrices, with the models, generator families and numerical
//! checks it is tested against.
//!
//! Qubit 0 is the leftmost tensor factor. Ancilla qubits occupy the lowest
//! global indices, so system qubit `s` is global qubit `n_ancilla + s`.

pub mod error;
pub mod generators;
pub mod linalg;
pub mod models;
pub mod pauli;
pub mod random;
pub mod ssgd;
pub mod state;
pub mod verification;

pub use error::{Result, SsgdError};
pub use generators::{build_brickwall, build_standard, BrickPhase, BrickwallSchedule, GeneratorSet};
pub use models::{
    build_rydberg, build_tfim, ground_state, neel_order, reference_energies, spin_flip, Boundary, Geometry,
    RydbergParams, Spectrum, TfimParams,
};
pub use pauli::{Axis, PauliString, Phase, RegisterLayout};
pub use ssgd::{
    ancilla_direction, first_order, hessian, system_direction, NoiseMode, Observers, Optimizer, SsgdConfig,
    Trajectory, TrajectoryRecord,
};
pub use state::{attach_ancilla, expectation, reset_ancilla, DenseOperator, DensityMatrix};
