use thiserror::Error;

/// Failure modes shared by every stage of the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsgdError {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("qubit {qubit} lies outside a register of {n_qubits} qubits")]
    SupportOutsideLayout { qubit: usize, n_qubits: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operator is not Hermitian (max |O - O^dag| = {0:.3e})")]
    NonHermitian(f64),
    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),
    #[error("register layout has no ancilla qubits")]
    NoAncilla,
    #[error("generator {0} acts on the ancilla register")]
    GeneratorOnAncilla(String),
    #[error("generator {0} does not flip the ancilla out of |0>")]
    AncillaFilter(String),
    #[error("missing generators: {0}")]
    MissingGenerators(String),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("{0} qubits exceeds the dense simulation limit")]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, SsgdError>;
