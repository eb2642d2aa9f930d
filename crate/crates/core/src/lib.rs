//! Numerical laboratory for curvature positivity along the normalized
//! Kähler–Ricci flow.
//!
//! The crate has five layers, roughly bottom-up:
//!
//! * [`tensor`] — pointwise Kähler curvature tensors in a unitary frame:
//!   symmetry validation, traces, sectional/bisectional evaluation, the
//!   `g*g` model tensor, and a JSON exchange format.
//! * [`bounds`] — extremal curvature quantities (minimum holomorphic
//!   sectional, minimum orthogonal bisectional, pinching constant μ*,
//!   traceless-operator spectrum) with certifying directions.
//! * [`envelope`] — the closed-form comparison envelopes μ(t) that the
//!   maximum-principle arguments produce, plus a numerical ODE
//!   cross-check via [`rk45`].
//! * [`reaction`] — the algebraic (non-Laplacian) part of the curvature
//!   evolution operator, pointwise reaction-ODE trajectories, pinched
//!   tensors and null-direction diagnostics; [`quadform`] holds the
//!   supporting quadratic-form inequality machinery.
//! * [`flow`] — a reduced 1-D simulator for the normalized flow among
//!   U(n)-invariant metrics on ℂℙⁿ, recording curvature-bound
//!   trajectories next to their predicted envelopes.
//!
//! [`report`] provides the CSV/SVG/manifest plumbing shared with the
//! command-line front end.

pub mod bounds;
pub mod envelope;
pub mod flow;
pub mod linalg;
pub mod quadform;
pub mod reaction;
pub mod report;
pub mod rk45;
pub mod sample;
pub mod tensor;

pub use bounds::{cone_report, CurvatureBounds};
pub use tensor::{GgTensor, KahlerCurvatureTensor};
