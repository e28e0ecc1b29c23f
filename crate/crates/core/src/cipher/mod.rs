//! Kun-IE encryption: keystream, Kun scan, then two diffusion passes.
//!
//! For each channel the plane is permuted by the Kun scan and then diffused:
//!
//! ```text
//! forward  C_i = P'_i ⊕ S(C_{i−1} + C_{i−2}) ⊕ K_i     C_{−1} = C_{−2} = c0
//! backward D_i = C_i  ⊕ S(D_{i+1} + D_{i+2}) ⊕ K'_i    D_n = D_{n+1} = c0
//! ```
//!
//! `S` is a key-dependent byte substitution; without it both passes are
//! affine over GF(2) and a single-pixel change only ever XORs a constant
//! into the ciphertext. `+` is mod 256. The plain chain is exposed as [`xda_forward`] /
//! [`xda_inverse`].

mod container;
mod diffusion;

pub use container::{CipherText, CONTAINER_MAGIC, HEADER_LEN};
pub use diffusion::{diffuse, undiffuse, xda_forward, xda_inverse, SBox};

use rayon::prelude::*;
use thiserror::Error;

use crate::chaos::{generate_orbit_values, partition_keystream, quantize_byte, ChaosError, KeyBundle};
use crate::image::ImageBuffer;
use crate::scan::{build_kun_scan, KunScanConfig, PermutationMap, ScanError};
use crate::Dims;

/// Discard offset between consecutive images of a batch.
pub const BATCH_DISCARD_STRIDE: u64 = 17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CipherError {
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },
    #[error("bad container: {0}")]
    Container(String),
    #[error("empty batch")]
    EmptyBatch,
}

/// Everything derived from the keys for one image shape.
#[derive(Debug, Clone)]
pub struct CipherSchedule {
    pub permutation: PermutationMap,
    pub sbox: SBox,
    /// Forward-pass keystream, one vector per channel.
    pub k_forward: Vec<Vec<u8>>,
    /// Backward-pass keystream, one vector per channel.
    pub k_backward: Vec<Vec<u8>>,
    pub c0: u8,
}

/// Bits 8..16 of the same scaled value `quantize_byte` reads bits 0..8 from.
fn second_byte(v: f64) -> u8 {
    (((v.abs() * 1e10).floor() / 256.0).floor() % 256.0) as u8
}

impl CipherSchedule {
    /// Channels consume consecutive, disjoint slices of one orbit; the three
    /// values after the last slice drive the scan and the substitution box.
    pub fn derive(keys: &KeyBundle, dims: Dims, channels: usize, extra_discard: u64) -> Result<Self, CipherError> {
        if dims.0 == 0 || dims.1 == 0 || channels == 0 {
            return Err(ChaosError::EmptyDims.into());
        }
        let n = dims.0 * dims.1;
        let orbit = generate_orbit_values(keys, n * channels, extra_discard)?;
        let part = partition_keystream(&orbit, n * channels)?;
        let config = KunScanConfig::with_ctrl(part.y_ctrl);
        let permutation = build_kun_scan(dims, &config)?;
        let sbox = SBox::from_orbit(keys.params(), (part.y_ctrl[0], part.y_ctrl[1]))?;
        let (k_forward, k_backward) = part
            .x_s
            .chunks_exact(n)
            .map(|seg| (seg.iter().map(|&v| quantize_byte(v)).collect(), seg.iter().map(|&v| second_byte(v)).collect()))
            .unzip();
        Ok(CipherSchedule {
            permutation,
            sbox,
            k_forward,
            k_backward,
            c0: keys.c0(),
        })
    }

    pub fn encrypt_image(&self, image: &ImageBuffer) -> Result<CipherText, CipherError> {
        self.check_shape(image.dims(), image.channels())?;
        let planes = image
            .planes()
            .iter()
            .enumerate()
            .map(|(c, plane)| {
                let scanned = self.permutation.apply(plane)?;
                Ok(diffuse(&scanned, &self.k_forward[c], &self.k_backward[c], &self.sbox, self.c0)?)
            })
            .collect::<Result<Vec<_>, CipherError>>()?;
        let img = ImageBuffer::from_planes(image.rows(), image.cols(), &planes).expect("shape checked");
        Ok(CipherText::new(img, self.c0))
    }

    pub fn decrypt_image(&self, cipher: &CipherText) -> Result<ImageBuffer, CipherError> {
        let img = cipher.image();
        self.check_shape(img.dims(), img.channels())?;
        let planes = img
            .planes()
            .iter()
            .enumerate()
            .map(|(c, plane)| {
                let scanned = undiffuse(plane, &self.k_forward[c], &self.k_backward[c], &self.sbox, self.c0)?;
                Ok(self.permutation.apply_inverse(&scanned)?)
            })
            .collect::<Result<Vec<_>, CipherError>>()?;
        Ok(ImageBuffer::from_planes(img.rows(), img.cols(), &planes).expect("shape checked"))
    }

    fn check_shape(&self, dims: Dims, channels: usize) -> Result<(), CipherError> {
        let want = self.permutation.len() * self.k_forward.len();
        let got = dims.0 * dims.1 * channels;
        if dims != self.permutation.dims() || channels != self.k_forward.len() {
            return Err(CipherError::Length { left: want, right: got });
        }
        Ok(())
    }
}

pub fn encrypt(image: &ImageBuffer, keys: &KeyBundle) -> Result<CipherText, CipherError> {
    encrypt_indexed(image, keys, 0)
}

/// Decrypts with the keys' own `c0`; the header byte is informational.
pub fn decrypt(cipher: &CipherText, keys: &KeyBundle) -> Result<ImageBuffer, CipherError> {
    decrypt_indexed(cipher, keys, 0)
}

/// Encryption of the image occupying batch slot `slot`.
pub fn encrypt_indexed(image: &ImageBuffer, keys: &KeyBundle, slot: usize) -> Result<CipherText, CipherError> {
    CipherSchedule::derive(keys, image.dims(), image.channels(), slot as u64 * BATCH_DISCARD_STRIDE)?.encrypt_image(image)
}

pub fn decrypt_indexed(cipher: &CipherText, keys: &KeyBundle, slot: usize) -> Result<ImageBuffer, CipherError> {
    let img = cipher.image();
    CipherSchedule::derive(keys, img.dims(), img.channels(), slot as u64 * BATCH_DISCARD_STRIDE)?.decrypt_image(cipher)
}

/// Encrypts every image in parallel. Image `j` skips `17·j` extra orbit
/// steps, so each output depends only on its image and slot, never on the
/// thread schedule.
pub fn encrypt_batch(images: &[ImageBuffer], keys: &KeyBundle) -> Result<Vec<Result<CipherText, CipherError>>, CipherError> {
    if images.is_empty() {
        return Err(CipherError::EmptyBatch);
    }
    Ok(images
        .par_iter()
        .enumerate()
        .map(|(j, img)| encrypt_indexed(img, keys, j))
        .collect())
}

pub fn decrypt_batch(ciphers: &[CipherText], keys: &KeyBundle) -> Result<Vec<Result<ImageBuffer, CipherError>>, CipherError> {
    if ciphers.is_empty() {
        return Err(CipherError::EmptyBatch);
    }
    Ok(ciphers
        .par_iter()
        .enumerate()
        .map(|(j, c)| decrypt_indexed(c, keys, j))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::KeyComponent;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn keys() -> KeyBundle {
        KeyBundle::from_values(0.1, 0.2, 20.0, 21.0, 1000).unwrap()
    }

    fn random_image(rng: &mut ChaCha8Rng, rows: usize, cols: usize, ch: usize) -> ImageBuffer {
        let px = (0..rows * cols * ch).map(|_| rng.gen()).collect();
        ImageBuffer::new(rows, cols, ch, px).unwrap()
    }

    #[test]
    fn second_byte_reads_bits_eight_to_sixteen() {
        // 2^-10 · 1e10 = 9765625 = 0x9502f9
        assert_eq!(second_byte(2f64.powi(-10)), 0x02);
        assert_eq!(quantize_byte(2f64.powi(-10)), 0xf9);
        assert_eq!(second_byte(-(0x12_34_56 as f64) * 1e-10), 0x34);
    }

    #[test]
    fn round_trip_many_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
            let ch = if rng.gen_bool(0.5) { 1 } else { 3 };
            let img = random_image(&mut rng, r, c, ch);
            let k = KeyBundle::random(&mut rng);
            let ct = encrypt(&img, &k).unwrap();
            assert_eq!(ct.image().pixels().len(), img.pixels().len());
            assert_eq!(decrypt(&ct, &k).unwrap(), img, "{r}x{c}x{ch}");
        }
    }

    #[test]
    fn channels_use_disjoint_keystream() {
        let s = CipherSchedule::derive(&keys(), (8, 8), 3, 0).unwrap();
        assert_ne!(s.k_forward[0], s.k_forward[1]);
        assert_ne!(s.k_forward[1], s.k_forward[2]);
        let single = CipherSchedule::derive(&keys(), (8, 8), 1, 0).unwrap();
        assert_eq!(single.k_forward[0], s.k_forward[0]);
    }

    #[test]
    fn wrong_key_yields_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let img = random_image(&mut rng, 64, 64, 1);
        let k = keys();
        let ct = encrypt(&img, &k).unwrap();
        let bad = decrypt(&ct, &k.with_flipped_lsb(KeyComponent::X0)).unwrap();
        let same = bad.pixels().iter().zip(img.pixels()).filter(|(a, b)| a == b).count();
        assert!(same as f64 / img.pixels().len() as f64 <= 0.01, "{same} bytes survived");
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let s = CipherSchedule::derive(&keys(), (4, 4), 1, 0).unwrap();
        let img = ImageBuffer::gray(4, 5, vec![0; 20]).unwrap();
        assert!(s.encrypt_image(&img).is_err());
    }

    #[test]
    fn batch_semantics() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let img = random_image(&mut rng, 16, 16, 1);
        let k = keys();
        assert!(encrypt_batch(&[], &k).is_err());

        let one = encrypt_batch(std::slice::from_ref(&img), &k).unwrap();
        assert_eq!(one[0].as_ref().unwrap(), &encrypt(&img, &k).unwrap());

        let three: Vec<_> = encrypt_batch(&[img.clone(), img.clone(), img.clone()], &k)
            .unwrap()
            .into_iter()
            .map(Result::unwrap)
            .collect();
        assert_ne!(three[0], three[1]);
        assert_ne!(three[1], three[2]);
        assert_ne!(three[0], three[2]);

        // each slot's output is independent of the order slots are processed in
        for j in (0..3).rev() {
            assert_eq!(encrypt_indexed(&img, &k, j).unwrap(), three[j]);
        }
        let back = decrypt_batch(&three, &k).unwrap();
        assert!(back.into_iter().all(|r| r.unwrap() == img));
    }

    #[test]
    fn single_pixel_change_spreads_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let img = random_image(&mut rng, 64, 64, 1);
        let k = keys();
        let c1 = encrypt(&img, &k).unwrap();
        let mut total = 0.0;
        for _ in 0..5 {
            let mut px = img.pixels().to_vec();
            let i = rng.gen_range(0..px.len());
            px[i] ^= 1 << rng.gen_range(0..8);
            let c2 = encrypt(&ImageBuffer::gray(64, 64, px).unwrap(), &k).unwrap();
            let diff = c1.image().pixels().iter().zip(c2.image().pixels()).filter(|(a, b)| a != b).count();
            total += diff as f64 / img.pixels().len() as f64;
        }
        assert!(total / 5.0 >= 0.995, "mean changed fraction {}", total / 5.0);
    }
}
