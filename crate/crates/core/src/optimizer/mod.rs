//! Rate-maximizing degree-distribution search by constrained random
//! perturbations of the variable degrees.

mod perturbation;
mod search;

pub use perturbation::{
    retarget_target, sample_perturbation, sample_perturbation_to, step_target, PerturbationConfig, PerturbationVector,
};
pub use search::{optimize_joint, optimize_single, JointResult, LogRow, OptimizationTask, SingleResult, StepKind};
