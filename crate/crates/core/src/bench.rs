//! Encryption throughput on synthetic square colour images.

use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cipher::{encrypt, CipherError};
use crate::chaos::KeyBundle;
use crate::image::ImageBuffer;

pub const BENCH_SIZES: [usize; 4] = [128, 256, 512, 1024];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub size: usize,
    pub channels: usize,
    /// Best of the repeats, in seconds.
    pub seconds: f64,
}

/// Uniform noise image; content does not affect cipher cost.
pub fn synthetic_image(size: usize, channels: usize, seed: u64) -> ImageBuffer {
    let mut px = vec![0u8; size * size * channels];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut px);
    ImageBuffer::new(size, size, channels, px).expect("consistent shape")
}

/// Wall-clock time of one encryption of `image`.
pub fn time_encryption(image: &ImageBuffer, keys: &KeyBundle) -> Result<Duration, CipherError> {
    let t = Instant::now();
    let c = encrypt(image, keys)?;
    let elapsed = t.elapsed();
    std::hint::black_box(c);
    Ok(elapsed)
}

/// Encrypts a `size × size × 3` image per entry of `sizes`, keeping the
/// fastest of `repeats` runs. The encryption path is sequential.
pub fn bench_encryption(sizes: &[usize], keys: &KeyBundle, repeats: usize) -> Result<Vec<BenchRow>, CipherError> {
    sizes
        .iter()
        .map(|&size| {
            let img = synthetic_image(size, 3, size as u64);
            let best = (0..repeats.max(1))
                .map(|_| time_encryption(&img, keys))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .min()
                .expect("at least one repeat");
            Ok(BenchRow {
                size,
                channels: 3,
                seconds: best.as_secs_f64(),
            })
        })
        .collect()
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{:<16}{:>12}\n", "image", "seconds");
    for r in rows {
        out.push_str(&format!("{:<16}{:>12.4}\n", format!("{0}x{0}x{1}", r.size, r.channels), r.seconds));
    }
    out
}
