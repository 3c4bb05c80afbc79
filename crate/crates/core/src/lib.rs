//! Semi-Lagrangian Vlasov-Poisson solver with high-order Hamiltonian
//! splitting schemes on periodic phase-space grids in one and two
//! spatial dimensions.

pub mod diagnostics;
pub mod error;
pub mod field;
pub mod flows;
pub mod grid;
pub mod interp;
pub mod runner;
pub mod schemes;

pub use diagnostics::DiagRecord;
pub use error::{Error, Result};
pub use field::FieldSolver;
pub use flows::{DCoefficients, Propagator};
pub use grid::{DistFn, PhaseGrid};
pub use schemes::SchemeSpec;
