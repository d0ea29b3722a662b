//! Collocation boundary-element solver for the non-retarded interaction
//! energy.
//!
//! Panel `i` carries one unknown; the homogeneous system is
//! `R(ξ) = λ(ξ) I + K` with `λ = 2π (ε + 1)/(ε − 1)` and the
//! frequency-independent double-layer kernel
//! `K_ij = n_j · (r_i − r_j) / |r_i − r_j|³ · Δs_j`. The interaction energy of
//! several bodies is the imaginary-frequency integral of the log-determinant
//! of the coupled system minus those of the isolated bodies.

mod determinant;
mod energy;
mod kernel;

pub use determinant::{
    interaction_logdet, interaction_logdet_lu, logdet_lu, logdet_lu_signed, logdet_spectral,
    spectrum, DeterminantMethod, InteractionSpectra, SignedLogDet, Spectrum, SINGULAR_THRESHOLD,
};
pub use energy::{gap_resolution_warnings, interaction_energy, EnergyResult, EnergySolver};
pub use kernel::{
    assemble_kernel, assemble_kernel_with, kernel_entry, KernelMatrix, KernelScheme,
    MIN_CENTROID_DISTANCE,
};
