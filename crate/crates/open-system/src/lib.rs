//! A system coupled weakly to a small environment: eigen mixed states,
//! operator-valued connections and phases, and their adiabatic fields.

pub mod bipartite;
pub mod connection;
pub mod density;
pub mod error;
pub mod fields;
pub mod mixed;
pub mod transport;

pub use bipartite::{tensor_assemble, BipartiteFamily, BipartiteOperator, FnBipartite, QubitBath, Total};
pub use connection::{operator_connection, operator_connection_in, Flavor, OperatorConnection};
pub use density::{entropy_of, partial_trace, partial_trace_matrix, trace_distance, DensityMatrix, Keep};
pub use error::OpenError;
pub use fields::{adiabatic_fields, AdiabaticFields};
pub use mixed::{eigen_mixed_state, labeled_spectrum, EigenMixedState, Label, Labeling};
pub use transport::{bipartite_oracle, quarter_arc, weak_adiabatic_propagate, WeakTransport};
