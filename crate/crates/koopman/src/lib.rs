//! Joint system and control-manifold propagation on a periodic grid, and its
//! correspondence with ordinary Schrödinger evolution along the classical flow.

pub mod correspondence;
pub mod error;
pub mod liouville;
pub mod propagate;
pub mod state;

pub use correspondence::{correspondence_check, loop_phase_from_sk, CircleCorrespondence, ConvergenceRow, CorrespondenceRun};
pub use error::KoopmanError;
pub use liouville::{LiouvilleOperator, PeriodicGrid};
pub use propagate::{sk_generator, sk_propagate, NodeHamiltonians, SkTrajectory};
pub use state::SKState;
