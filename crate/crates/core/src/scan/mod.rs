//! Invertible pixel orders and the scan-correlation benchmark.

mod kun;
mod patterns;
mod permutation;

pub use kun::{build_kun_scan, KunScanConfig};
pub use patterns::{build_scan, ScanPattern};
pub use permutation::{apply_permutation, invert_permutation, PermutationMap};

use std::fmt;

use thiserror::Error;

use crate::image::ImageBuffer;
use crate::metrics::{correlations, DirectionalCorrelations, MetricsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("not a bijection: index {0} repeated or out of range")]
    NotBijective(usize),
    #[error("invalid scan config: {0}")]
    Config(String),
    #[error(transparent)]
    Metrics(Box<MetricsError>),
}

impl From<MetricsError> for ScanError {
    fn from(e: MetricsError) -> Self {
        ScanError::Metrics(Box::new(e))
    }
}

/// A classical pattern or the Kun scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanMethod {
    Pattern(ScanPattern),
    Kun(KunScanConfig),
}

impl ScanMethod {
    pub fn build(&self, dims: crate::Dims) -> Result<PermutationMap, ScanError> {
        match self {
            ScanMethod::Pattern(p) => Ok(build_scan(*p, dims)),
            ScanMethod::Kun(c) => build_kun_scan(dims, c),
        }
    }

    /// The nine classical patterns followed by a single-round Kun scan, so
    /// that `repeats` in [`scan_correlation_report`] counts Kun rounds too.
    pub fn comparison_set(ctrl: [f64; 3]) -> Vec<ScanMethod> {
        let mut v: Vec<ScanMethod> = ScanPattern::ALL.into_iter().map(ScanMethod::Pattern).collect();
        v.push(ScanMethod::Kun(KunScanConfig {
            rounds: 1,
            ..KunScanConfig::with_ctrl(ctrl)
        }));
        v
    }
}

impl fmt::Display for ScanMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanMethod::Pattern(p) => p.fmt(f),
            ScanMethod::Kun(_) => f.write_str("Kun-SCAN"),
        }
    }
}

/// Scans a grayscale image `repeats` times, re-reading the scanned sequence
/// as an `M × N` image each round, and reports the four adjacent-pixel
/// correlations of the result.
pub fn scan_correlation_report(
    image: &ImageBuffer,
    method: &ScanMethod,
    repeats: usize,
) -> Result<DirectionalCorrelations, ScanError> {
    let gray = image.to_gray();
    let p = method.build(gray.dims())?;
    let mut plane = gray.into_pixels();
    for _ in 0..repeats {
        plane = p.apply(&plane)?;
    }
    let scanned = ImageBuffer::gray(image.rows(), image.cols(), plane).expect("same shape");
    Ok(correlations(&scanned)?)
}

/// One row per method, in `methods` order.
pub fn comparison_table(
    image: &ImageBuffer,
    methods: &[ScanMethod],
    repeats: usize,
) -> Result<Vec<(String, DirectionalCorrelations)>, ScanError> {
    use rayon::prelude::*;
    methods
        .par_iter()
        .map(|m| Ok((m.to_string(), scan_correlation_report(image, m, repeats)?)))
        .collect()
}

pub fn comparison_csv(rows: &[(String, DirectionalCorrelations)]) -> String {
    let mut out = String::from("method,horizontal,vertical,diagonal,anti_diagonal\n");
    for (name, c) in rows {
        out.push_str(&format!("{name},{:.6},{:.6},{:.6},{:.6}\n", c.h, c.v, c.d, c.ad));
    }
    out
}
