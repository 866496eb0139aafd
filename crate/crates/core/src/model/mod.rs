//! The finite-state communication model and its induced kernels.

mod hmm;
mod kernels;
mod system;

pub use hmm::{Extremum, ForwardScratch, HmmKernel, ROW_TOLERANCE};
pub use kernels::{AlphabetSpec, ChannelKernel, InducedKernel, JointKernel, SourceKernel, StateSpec};
pub use system::{BoundaryStates, LogProbCache, SystemModel, Triple};

pub(crate) use system::TripleSampler;
