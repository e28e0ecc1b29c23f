//! Planar chaotic maps and keystream derivation.

mod keys;
mod keystream;
mod maps;

pub use keys::{KeyBundle, KeyComponent, KEY_BITS};
pub use keystream::{
    generate_orbit, generate_orbit_values, partition_keystream, quantize_byte, quantize_bytes,
    ChaoticOrbit, KeystreamPartition,
};
pub use maps::{
    pow_signed, step_reference, step_scphm, ChaoticMap, Jacobian, MapId, MapParams, PlanarMap,
    State, EXPONENT_PERIOD, SCPHM_PARAM_MAX,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("non-finite value in {term}")]
    Overflow { term: &'static str },
    #[error("{map} is singular at ({x}, {y})")]
    Singular { map: MapId, x: f64, y: f64 },
    #[error("invalid map parameters: {0}")]
    InvalidParams(String),
    #[error("orbit too short: need {need} values, have {got}")]
    Length { need: usize, got: usize },
    #[error("non-finite input at index {0}")]
    NonFinite(usize),
    #[error("key error: {0}")]
    Key(String),
    #[error("image dimensions must be at least 1x1")]
    EmptyDims,
}
