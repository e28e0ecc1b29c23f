use std::path::Path;

use super::CipherError;
use crate::image::ImageBuffer;

pub const CONTAINER_MAGIC: &[u8; 6] = b"KUNIE1";
/// magic, rows (u32 LE), cols (u32 LE), channels (u8), c0 (u8)
pub const HEADER_LEN: usize = 16;

/// Ciphertext samples with the shape of the source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherText {
    image: ImageBuffer,
    c0: u8,
}

impl CipherText {
    pub fn new(image: ImageBuffer, c0: u8) -> Self {
        CipherText { image, c0 }
    }

    /// The ciphertext viewed as an image, e.g. for statistics.
    pub fn image(&self) -> &ImageBuffer {
        &self.image
    }

    pub fn pixels(&self) -> &[u8] {
        self.image.pixels()
    }

    pub fn c0(&self) -> u8 {
        self.c0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.pixels().len());
        out.extend_from_slice(CONTAINER_MAGIC);
        out.extend_from_slice(&(self.image.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(self.image.cols() as u32).to_le_bytes());
        out.push(self.image.channels() as u8);
        out.push(self.c0);
        out.extend_from_slice(self.pixels());
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, CipherError> {
        let bad = |m: &str| CipherError::Container(m.to_string());
        if data.len() < HEADER_LEN {
            return Err(bad("shorter than the header"));
        }
        if &data[..6] != CONTAINER_MAGIC {
            return Err(bad("missing KUNIE1 magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(data[i..i + 4].try_into().expect("4 bytes")) as usize;
        let (rows, cols, channels, c0) = (u32_at(6), u32_at(10), data[14] as usize, data[15]);
        let body = &data[HEADER_LEN..];
        let image = ImageBuffer::new(rows, cols, channels, body.to_vec()).map_err(|e| CipherError::Container(e.to_string()))?;
        Ok(CipherText { image, c0 })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, CipherError> {
        let data = std::fs::read(path).map_err(|e| CipherError::Container(e.to_string()))?;
        CipherText::from_bytes(&data)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), CipherError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CipherError::Container(e.to_string()))
    }
}
