//! Numerics for Kirillov's orbit method on low-dimensional Lie groups.
//!
//! The crate is organized bottom-up: [`lie`] supplies algebras and groups,
//! [`calculus`] the modular, Jacobian and ρ functions, [`coadjoint`] the
//! action on the dual and polarizations, [`character`] test functions,
//! quadrature and the character backends, and [`positivity`] the Gram
//! matrices, the GNS quotient and the Schrödinger model of the Heisenberg
//! group.

pub mod builtin;
pub mod calculus;
pub mod character;
pub mod coadjoint;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod positivity;

pub use error::{OrbitError, Result};

/// Default relative tolerance for residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;
