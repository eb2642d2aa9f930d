//! Reduced 1-D simulator for the normalized flow among U(n)-invariant
//! metrics on complex projective space.
//!
//! The submodules split the work into the potential grid
//! ([`potential`]), pointwise curvature extraction ([`curvature`]) and
//! the time-stepping driver with its trajectory records ([`run`]).

pub mod curvature;
pub mod potential;
pub mod run;

pub use curvature::{curvature_from_potential, node_curvature_raw, NodeCurvature};
pub use potential::{FlowError, PotentialDerivs, RadialPotential, StencilTable};
pub use run::{
    run_flow, FieldFrame, FlowConfig, FlowRun, FlowState, InitialData, TrajectoryRecord,
    TrajectoryRow,
};
