//! Qubit decoherence and environmental disentanglement.
//!
//! The crate evolves a single qubit under Markovian decoherence, decides when
//! the induced channel becomes entanglement-breaking, and cross-checks the
//! answer three ways: positivity of the partially transposed Choi matrix, an
//! explicit measure-and-prepare decomposition, and a Monte Carlo average over
//! random-field Schrödinger trajectories.
//!
//! Modules, bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, partial
//!   transpose/trace, real 4×4 matrix exponential.
//! - [`channels`]: Bloch-vector states, affine qubit channels, Lindblad
//!   generators and their semigroups.
//! - [`entanglement`]: Choi matrices, PPT verdicts, disentanglement time,
//!   the six-outcome measure-and-prepare form and the Werner-state family.
//! - [`stochastic`]: unitary-kick trajectories and seeded ensembles.

#![forbid(unsafe_code)]

pub mod channels;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod stochastic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
