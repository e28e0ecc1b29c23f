//! Chaotic image cipher built on the 2D sin-cos-pi hyperchaotic map.
//!
//! The crate is organised the way data flows through an encryption:
//!
//! * [`chaos`] iterates the planar maps and turns a [`chaos::KeyBundle`] into
//!   keystream material.
//! * [`scan`] builds invertible pixel orders, including the region-hopping
//!   Kun scan driven by the keystream control values.
//! * [`cipher`] composes permutation and keyed S-box diffusion into
//!   [`cipher::encrypt`] / [`cipher::decrypt`].
//!
//! The remaining modules reproduce the evidence around the cipher:
//! [`analysis`] (bifurcation sweeps, Lyapunov spectra), [`nist`] (a subset of
//! the SP 800-22 battery), [`metrics`] (entropy, correlation, NPCR/UACI),
//! [`gru`] (a small recurrent model trained on map orbits) and [`bench`].

pub mod analysis;
pub mod bench;
pub mod chaos;
pub mod cipher;
pub mod gru;
pub mod image;
pub mod metrics;
pub mod nist;
pub mod scan;

pub use chaos::{ChaosError, KeyBundle, MapId, MapParams};
pub use cipher::{decrypt, encrypt, CipherText};
pub use image::ImageBuffer;

/// Image dimensions as `(rows, cols)`, i.e. `(M, N)`.
pub type Dims = (usize, usize);
