//! Quantum cloning machines and entanglement broadcasting for two-qubit
//! states.
//!
//! Orthogonal and non-orthogonal 1→2 cloners are applied locally (one qubit
//! machine per party) or non-locally (one four-dimensional machine on the
//! pair). Every map has an explicit-isometry oracle next to its closed form.

pub mod channels;
pub mod cloner;
pub mod error;
pub mod numerics;
pub mod random;
pub mod scan;
pub mod separability;
pub mod states;

pub use channels::{BroadcastOutputs, ClonerVariant, Pairing, VariantName};
pub use cloner::{si_params, CloningMachine, MachineKind};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, C64};
pub use separability::{is_broadcast, ppt_test, SeparabilityVerdict};
pub use states::{BellDiagonal, DensityMatrix, PureState, TwoQubitBloch};
