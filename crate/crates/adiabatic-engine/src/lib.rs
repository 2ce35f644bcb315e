//! Closed-system dynamics along parameter paths, in atomic units (ħ = 1).

pub mod cyclic;
pub mod error;
pub mod fig1;
pub mod multi;
pub mod ode;
pub mod propagate;
pub mod single;
pub mod transit;

pub use cyclic::aharonov_anandan_phase;
pub use error::EngineError;
pub use fig1::{Fig1Config, Fig1Run};
pub use multi::{adiabatic_propagate_multi, moving_frame_generator, MultiBandRun};
pub use ode::{integrate, OdeError, OdeOptions};
pub use propagate::{occupation_probabilities, schrodinger_propagate, Basis, StateTrajectory};
pub use single::{adiabatic_propagate_single, PhaseDecomposition, SingleBandRun};
pub use transit::{compute_beta, crossing_transit, sudden_transit_matrix, TransitCoefficients};
