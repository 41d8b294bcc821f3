//! LDPC ensembles, finite-length realizations and encoding.

mod degree;
mod encoder;
mod matrix;

pub use degree::{initial_distribution, DegreeDistribution, NodeDistribution, OPTIMIZER_DEGREES, SUM_TOLERANCE};
pub use encoder::SystematicEncoder;
pub use matrix::{apportion, sample_code, ParityCheckMatrix};
