//! Fuzzy-space matrix model: Fock-space coordinate operators, displacement
//! energy (Dirac) operators, quasi-coherent states, the noncommutative plane
//! and the quantum wormhole with its one- and two-sheet descriptions.
//!
//! Planck units throughout: `ℓ_P = m_P c² = t_P = 1`.

pub mod decay;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod metric;
pub mod quasi;
pub mod scan;
pub mod wormhole;

pub use decay::{single_sheet_decay, DecayFit, Generator};
pub use error::FuzzyError;
pub use fock::{coherent_overlap, coherent_state, CoherentState, FockSpace};
pub use geometry::FuzzyGeometry;
pub use metric::{
    embedding_metric, emergent_line_element, induced_metric, loop_phase, plane_chart, shift_vector, wormhole_chart, InducedMetric,
    LineElement, ShiftVector, STENCIL,
};
pub use quasi::{minimal_modulus, quasi_coherent, Eigenpair, QuasiCoherent};
pub use scan::{crossing_brackets, fig3_report, radial_scan, radii, refine_crossing, scan_row, Fig3Report, ScanRow};
pub use wormhole::{coherent_im_z, throat_height, DiracOperator, SheetPair, SheetState, Wormhole};
