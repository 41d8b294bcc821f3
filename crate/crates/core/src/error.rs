use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid parity-check matrix: {0}")]
    InvalidMatrix(String),
    #[error("infeasible degree assignment after {retries} retries")]
    InfeasibleConstruction { retries: usize },
    #[error("invalid channel parameters: {0}")]
    InvalidParameters(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty population")]
    EmptyPopulation,
    #[error("population size {got} is below the minimum {min}")]
    PopulationTooSmall { got: usize, min: usize },
    #[error("invalid bracket: converged={hi_converged} at {hi}, converged={lo_converged} at {lo}")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        lo_converged: bool,
        hi_converged: bool,
    },
    #[error("infeasible perturbation: {0}")]
    InfeasiblePerturbation(String),
    #[error("initial ensemble is not admissible")]
    InitialInadmissible,
    #[error("no admissible initial point for any power allocation in the grid")]
    NoAdmissibleAllocation,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
