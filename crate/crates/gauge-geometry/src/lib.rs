//! Berry connections and curvatures on parameter space, loop holonomies,
//! monopole charges by link products, and patchwise gluing data.

pub mod circulation;
pub mod error;
pub mod fields;
pub mod patches;
pub mod sphere;

pub use circulation::{loop_circulation, Circulation};
pub use error::GeometryError;
pub use fields::{berry_connection, berry_curvature, berry_curvature_step, twisted_connection, ConnectionSample, CurvatureSample};
pub use patches::{cocycle_integer, cover_charge, transition_function, winding, Cap, CocycleReport, CoverCharge, Normalization, PatchCover, Transition};
pub use sphere::{monopole_charge, monopole_charge_on, ChargeReport, SphereMesh};
