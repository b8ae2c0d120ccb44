//! Gaussian phase-space toolkit for cloning coherent states drawn from
//! finite Gaussian ensembles.
//!
//! States are tracked exactly through their quadrature means and covariance
//! matrices. The convention throughout is that the vacuum has unit quadrature
//! variance and a coherent state `|α⟩` has quadrature means `(2 Re α, 2 Im α)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Gauss–Hermite rules, golden-section maximisation,
//!   bisection and seeded normal streams.
//! - [`phase_space`]: Gaussian states and the linear-optics elements used by
//!   the cloners (phase-insensitive amplifier, OPO, beam splitter).
//! - [`ensembles`]: Gaussian priors over coherent amplitudes, sampling and
//!   ensemble averages by quadrature or Monte Carlo.
//! - [`symmetric_cloner`]: amplifier + beam-splitter cloner, average fidelity
//!   over an ensemble, optimal gain and the resulting fidelity limit.
//! - [`estimation`]: dual-homodyne and clone-based amplitude estimation.
//! - [`teleportation`]: finite-ensemble teleportation fidelity and the
//!   entanglement needed to reach the no-cloning limit.
//! - [`single_quad_cloner`]: OPO + squeezed-port cloner for states on a line.
//! - [`cli`]: CSV-producing commands behind the `gaussclone` binary.
//!
//! ```
//! use gaussclone::symmetric_cloner::{max_average_fidelity, optimal_gain};
//!
//! // broad ensembles recover the 2/3 limit at unity gain
//! assert!((max_average_fidelity(1e4) - 2.0 / 3.0).abs() < 1e-8);
//! assert!((optimal_gain(1e4) - 2.0).abs() < 1e-7);
//! ```

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod estimation;
pub mod numerics;
pub mod phase_space;
pub mod single_quad_cloner;
pub mod symmetric_cloner;
pub mod teleportation;

pub use error::{Error, Result};
pub use phase_space::{CoherentAmplitude, GaussianState};
