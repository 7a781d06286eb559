//! Twistor surfaces, Hermitian structures on ℝ⁴, shear-free ray congruences on
//! Minkowski space and conformal foliations of ℝ³, tied together by numerical
//! residual certificates.
//!
//! Fields are closed-form [`FieldExpr`] trees evaluated with exact second-order
//! complex forward-mode derivatives; every geometric condition is checked as a
//! sampled residual on a real slice or on ℂ⁴.

pub mod catalog;
pub mod coords;
pub mod error;
pub mod exec;
pub mod fieldexpr;
pub mod groups;
pub mod hyperbolic;
pub mod kerr;
pub mod residuals;
pub mod tolerances;
pub mod trace;
pub mod twistor;
pub mod unify;

pub use coords::Metric;
pub use coords::{ExtC, MuPair, NullCoords, Point4C, SliceKind, SliceSpec, C64};
pub use error::{Error, Result};
pub use fieldexpr::{BranchSign, FieldExpr, JetC2};
