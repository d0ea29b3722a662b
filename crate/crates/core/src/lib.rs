//! Non-retarded van der Waals interactions between finite dielectric bodies
//! by a collocation boundary-element method.
//!
//! * [`geometry`]: closed quad-panel meshes, rigid motions, mirror images.
//! * [`material`]: `ε(iξ)` and derived response functions.
//! * [`quadrature`]: Gauss–Legendre frequency grids on `[0, ∞)`.
//! * [`bem`]: kernel assembly, log-determinants, interaction energies.
//! * [`forces`]: energy scans and their numerical derivatives.
//! * [`baselines`]: proximity-force and pairwise (Hamaker) approximations.
//! * [`validation`]: analytic oracles that gate the solver.
//!
//! Units: lengths in nm, energies and imaginary frequencies `ħξ` in eV.

pub mod baselines;
pub mod bem;
pub mod error;
pub mod forces;
pub mod geometry;
pub mod material;
pub mod quadrature;
pub mod validation;

pub use error::{Error, Result};
