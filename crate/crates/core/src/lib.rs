//! Numerical laboratory for the generic Riemann pattern of the one-dimensional
//! compressible Navier-Stokes-Fourier system in Lagrangian mass coordinates:
//! a 1-rarefaction, a 2-viscous contact wave and a 3-viscous shock.
//!
//! The crate is organised bottom-up:
//!
//! * [`gas`]: ideal polytropic thermodynamics, wave curves and the four-state
//!   Riemann configuration.
//! * [`profiles`]: the three wave constructions (shock ODE, contact BVP,
//!   smooth approximate rarefaction).
//! * [`ansatz`]: the shifted superposition of the three waves and its residual.
//! * [`solver`]: method-of-lines finite differences in the shock frame, RK4 in time.
//! * [`shift`]: weight function, the constant `M`, and the shift ODE.
//! * [`diagnostics`]: relative entropy, good terms, gaps, weighted Poincaré checks.
//! * [`checks`]: property suites that bundle the above into pass/fail reports.
//!
//! Inner loops go through [`exec`], which runs on rayon when the `parallel`
//! feature is enabled and falls back to plain iteration otherwise. Reductions
//! are always sequential left folds, so results are bitwise identical in both
//! modes.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod ansatz;
pub mod checks;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod gas;
pub mod io;
pub mod numerics;
pub mod profiles;
pub mod shift;
pub mod solver;

pub use error::{NsfError, Result};
pub use exec::Exec;
pub use gas::{EndStates, GasParams, PrimState, WaveStrengths};
