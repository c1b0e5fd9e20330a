//! Dirac operators on the line with δ / δ′ point interactions.
//!
//! The crate builds Gesztesy–Šeba realizations of
//! `D = −ic d/dx ⊗ σ₁ + (c²/2) ⊗ σ₃` on a half-line or a finite interval and
//! provides:
//!
//! - branch-correct dispersion functions ([`dispersion`]),
//! - closed-form piecewise states, boundary maps and Green identities ([`states`]),
//! - Weyl functions and γ-fields of every building block ([`weyl`]),
//! - Jacobi boundary operators with a Sturm-bisection eigensolver ([`jacobi`]),
//! - self-adjointness, deficiency, discreteness and spectral-type tests ([`classify`]),
//! - Krein-formula eigenvalues, transfer-matrix oracles and the
//!   non-relativistic limit ([`krein`]).

pub mod classify;
pub mod dispersion;
pub mod error;
pub mod jacobi;
pub mod krein;
pub mod model;
pub mod states;
pub mod weyl;

pub use error::{GsdError, Result};
pub use model::{
    beta_to_alpha, build_lattice, Count, InteractionKind, Interval, Lattice, ModelConfig, SequenceRule,
    StrengthKind, StrengthSeq,
};
pub use num_complex::Complex64 as C64;
