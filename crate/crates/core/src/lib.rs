//! Hybrid analog/digital beamforming with a fixed DFT beam codebook.
//!
//! The crate covers the full chain for a multiuser massive-MIMO base station
//! whose RF chains each switch onto one DFT beam:
//!
//! * [`codebook`] builds the unitary DFT codebook and analog beamformers,
//! * [`channel`] draws Ricean multiuser channels with reproducible per-drop streams,
//! * [`linkrates`] estimates exact ergodic rates by Monte-Carlo for UL ZF/MRC and
//!   DL ZF/MRT under long- and short-term power normalization,
//! * [`approx`] evaluates the closed-form rate approximations and their Rayleigh
//!   and pure line-of-sight limits,
//! * [`selection`] implements exhaustive, per-user and two-step beam selection,
//! * [`experiment`] wires everything into config-driven runs and sweeps.

pub mod approx;
pub mod channel;
pub mod codebook;
mod error;
pub mod experiment;
pub mod linalg;
pub mod linkrates;
mod scheme;
pub mod selection;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use nalgebra::{Complex, DMatrix, DVector};
pub use scheme::{Link, Normalization, Scheme};

/// Double-precision complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
