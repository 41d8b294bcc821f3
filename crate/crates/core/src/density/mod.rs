//! Monte-Carlo density evolution of the joint decoder over sampled LLR
//! populations.

mod evolve;
mod population;
mod threshold;

pub use evolve::{
    evolve_ensemble, evolve_receiver, evolve_receiver_observed, state_node_capacity, AdmissibilityReport,
    DensityConfig, PopulationEvent, ReceiverReport,
};
pub use population::{mutual_information, mutual_information_oriented, symmetry_test, LlrPopulation, SymmetryReport};
pub use threshold::{threshold_bisect, threshold_bisect_with, ChannelKnob, ThresholdResult};
