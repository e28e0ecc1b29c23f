//! Cipher statistics: entropy, adjacent-pixel correlation, NPCR/UACI and key
//! sensitivity.
//!
//! Correlations use every adjacent pair, not a random sample, and colour
//! images report the mean over channels.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaos::{KeyBundle, KeyComponent};
use crate::cipher::{encrypt, CipherError};
use crate::image::ImageBuffer;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("zero variance: correlation undefined")]
    ZeroVariance,
    #[error("image must be at least 2x2 for correlation")]
    TooSmall,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
        Direction::AntiDiagonal,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalCorrelations {
    pub h: f64,
    pub v: f64,
    pub d: f64,
    pub ad: f64,
}

pub fn histogram(samples: &[u8]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &s in samples {
        h[s as usize] += 1;
    }
    h
}

/// Shannon entropy of the byte distribution, in bits per sample.
pub fn entropy(samples: &[u8]) -> f64 {
    let n = samples.len() as f64;
    histogram(samples)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Pearson correlation of adjacent pairs in one row-major plane.
///
/// Sums are accumulated exactly in integers, so the only rounding is in the
/// final division.
pub fn plane_correlation(plane: &[u8], (rows, cols): crate::Dims, dir: Direction) -> Result<f64, MetricsError> {
    if rows < 2 || cols < 2 {
        return Err(MetricsError::TooSmall);
    }
    if plane.len() != rows * cols {
        return Err(MetricsError::Shape(format!("{} samples for {rows}x{cols}", plane.len())));
    }
    let (r_hi, c_lo, c_hi, dr, dc): (usize, usize, usize, usize, isize) = match dir {
        Direction::Horizontal => (rows, 0, cols - 1, 0, 1),
        Direction::Vertical => (rows - 1, 0, cols, 1, 0),
        Direction::Diagonal => (rows - 1, 0, cols - 1, 1, 1),
        Direction::AntiDiagonal => (rows - 1, 1, cols, 1, -1),
    };
    let (mut n, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0i128, 0i128, 0i128, 0i128, 0i128, 0i128);
    for r in 0..r_hi {
        for c in c_lo..c_hi {
            let x = plane[r * cols + c] as i128;
            let y = plane[(r + dr) * cols + (c as isize + dc) as usize] as i128;
            n += 1;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
    }
    let cov = n * sxy - sx * sy;
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx == 0 || vy == 0 {
        return Err(MetricsError::ZeroVariance);
    }
    Ok(cov as f64 / ((vx as f64).sqrt() * (vy as f64).sqrt()))
}

/// Channel-mean correlation in one direction.
pub fn directional_correlation(image: &ImageBuffer, dir: Direction) -> Result<f64, MetricsError> {
    let planes = image.planes();
    let mut sum = 0.0;
    for p in &planes {
        sum += plane_correlation(p, image.dims(), dir)?;
    }
    Ok(sum / planes.len() as f64)
}

pub fn correlations(image: &ImageBuffer) -> Result<DirectionalCorrelations, MetricsError> {
    Ok(DirectionalCorrelations {
        h: directional_correlation(image, Direction::Horizontal)?,
        v: directional_correlation(image, Direction::Vertical)?,
        d: directional_correlation(image, Direction::Diagonal)?,
        ad: directional_correlation(image, Direction::AntiDiagonal)?,
    })
}

/// `(NPCR, UACI)` in percent.
pub fn npcr_uaci(c1: &[u8], c2: &[u8]) -> Result<(f64, f64), MetricsError> {
    if c1.len() != c2.len() || c1.is_empty() {
        return Err(MetricsError::Shape(format!("{} vs {} samples", c1.len(), c2.len())));
    }
    let n = c1.len() as f64;
    let (mut changed, mut abs) = (0u64, 0u64);
    for (&a, &b) in c1.iter().zip(c2) {
        changed += (a != b) as u64;
        abs += a.abs_diff(b) as u64;
    }
    Ok((100.0 * changed as f64 / n, 100.0 * abs as f64 / (255.0 * n)))
}

pub fn npcr_uaci_images(c1: &ImageBuffer, c2: &ImageBuffer) -> Result<(f64, f64), MetricsError> {
    if c1.dims() != c2.dims() || c1.channels() != c2.channels() {
        return Err(MetricsError::Shape(format!(
            "{:?}x{} vs {:?}x{}",
            c1.dims(),
            c1.channels(),
            c2.dims(),
            c2.channels()
        )));
    }
    npcr_uaci(c1.pixels(), c2.pixels())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub entropy: f64,
    pub corr_h: f64,
    pub corr_v: f64,
    pub corr_d: f64,
    pub corr_ad: f64,
    pub npcr: f64,
    pub uaci: f64,
    pub histogram: Vec<u64>,
    /// Wall-clock seconds for one encryption.
    pub elapsed: f64,
}

/// Encrypts `image` and measures the ciphertext. NPCR/UACI are averaged over
/// `trials` random single-pixel changes of the plaintext.
pub fn analyze(image: &ImageBuffer, keys: &KeyBundle, trials: usize, seed: u64) -> Result<MetricsReport, MetricsError> {
    let start = Instant::now();
    let cipher = encrypt(image, keys)?;
    let elapsed = start.elapsed().as_secs_f64();
    let ct = cipher.image();
    let corr = correlations(ct)?;
    let (npcr, uaci) = plaintext_sensitivity(image, keys, trials, seed, ct)?;
    Ok(MetricsReport {
        entropy: entropy(ct.pixels()),
        corr_h: corr.h,
        corr_v: corr.v,
        corr_d: corr.d,
        corr_ad: corr.ad,
        npcr,
        uaci,
        histogram: histogram(ct.pixels()).to_vec(),
        elapsed,
    })
}

fn plaintext_sensitivity(
    image: &ImageBuffer,
    keys: &KeyBundle,
    trials: usize,
    seed: u64,
    base: &ImageBuffer,
) -> Result<(f64, f64), MetricsError> {
    if trials == 0 {
        return Ok((0.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut npcr, mut uaci) = (0.0, 0.0);
    for _ in 0..trials {
        let mut changed = image.clone();
        let i = rng.gen_range(0..changed.pixels().len());
        changed.pixels_mut()[i] ^= rng.gen_range(1..=255u8);
        let (n, u) = npcr_uaci_images(base, encrypt(&changed, keys)?.image())?;
        npcr += n;
        uaci += u;
    }
    Ok((npcr / trials as f64, uaci / trials as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeySensitivity {
    /// `None` compares the keys with themselves.
    pub component: Option<KeyComponent>,
    pub npcr: f64,
    pub uaci: f64,
}

/// Ciphertext difference caused by flipping the LSB of one key component.
pub fn key_sensitivity_report(
    image: &ImageBuffer,
    keys: &KeyBundle,
    perturbation: Option<KeyComponent>,
) -> Result<KeySensitivity, MetricsError> {
    let other = perturbation.map_or(*keys, |c| keys.with_flipped_lsb(c));
    let c1 = encrypt(image, keys)?;
    let c2 = encrypt(image, &other)?;
    let (npcr, uaci) = npcr_uaci_images(c1.image(), c2.image())?;
    Ok(KeySensitivity {
        component: perturbation,
        npcr,
        uaci,
    })
}
