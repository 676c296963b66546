//! The three elementary wave constructions.

pub mod contact;
pub mod rarefaction;
pub mod shock;

pub use contact::{contact_residual, solve_contact_profile, ContactProfile, ContactSample};
pub use rarefaction::{burgers_smooth, RarefactionSample, RarefactionWave};
pub use shock::{
    check_sharp_diffusion, check_shock_lemma, solve_shock_profile, ShockProfile, ShockSample, ShockSolveOptions,
};
