//! 8-bit image buffers and Netpbm (PGM/PPM) I/O.
//!
//! Reads binary (P5/P6) and plain (P2/P3) files with `maxval <= 255`; always
//! writes binary with `maxval = 255`. Sample values pass through unscaled.

use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::Dims;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("bad image format: {0}")]
    Format(String),
    #[error("pixel buffer has {got} samples, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("channels must be 1 or 3, got {0}")]
    Channels(usize),
    #[error("image is empty")]
    Empty,
}

/// Interleaved 8-bit samples, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    rows: usize,
    cols: usize,
    channels: usize,
    pixels: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(rows: usize, cols: usize, channels: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if channels != 1 && channels != 3 {
            return Err(ImageError::Channels(channels));
        }
        if rows == 0 || cols == 0 {
            return Err(ImageError::Empty);
        }
        let expected = rows * cols * channels;
        if pixels.len() != expected {
            return Err(ImageError::Shape {
                expected,
                got: pixels.len(),
            });
        }
        Ok(ImageBuffer {
            rows,
            cols,
            channels,
            pixels,
        })
    }

    pub fn gray(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        ImageBuffer::new(rows, cols, 1, pixels)
    }

    /// Interleaves equally sized planes.
    pub fn from_planes(rows: usize, cols: usize, planes: &[Vec<u8>]) -> Result<Self, ImageError> {
        let n = rows * cols;
        if let Some(p) = planes.iter().find(|p| p.len() != n) {
            return Err(ImageError::Shape {
                expected: n,
                got: p.len(),
            });
        }
        let c = planes.len();
        let mut pixels = vec![0u8; n * c];
        for (ch, plane) in planes.iter().enumerate() {
            for (i, &v) in plane.iter().enumerate() {
                pixels[i * c + ch] = v;
            }
        }
        ImageBuffer::new(rows, cols, c, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> Dims {
        (self.rows, self.cols)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// One channel as a row-major plane.
    pub fn plane(&self, channel: usize) -> Vec<u8> {
        assert!(channel < self.channels);
        self.pixels
            .iter()
            .skip(channel)
            .step_by(self.channels)
            .copied()
            .collect()
    }

    pub fn planes(&self) -> Vec<Vec<u8>> {
        (0..self.channels).map(|c| self.plane(c)).collect()
    }

    /// ITU-R BT.601 luma for colour images; a copy for gray ones.
    pub fn to_gray(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let pixels = self
            .pixels
            .chunks_exact(3)
            .map(|p| {
                let y = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
                y.round().clamp(0.0, 255.0) as u8
            })
            .collect();
        ImageBuffer {
            rows: self.rows,
            cols: self.cols,
            channels: 1,
            pixels,
        }
    }

    pub fn read_pnm(path: impl AsRef<Path>) -> Result<Self, ImageError> {
        ImageBuffer::from_pnm_bytes(&std::fs::read(path)?)
    }

    pub fn write_pnm(&self, path: impl AsRef<Path>) -> Result<(), ImageError> {
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_pnm_bytes())?;
        f.flush()?;
        Ok(())
    }

    /// Binary PGM (gray) or PPM (colour).
    pub fn to_pnm_bytes(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_pnm_bytes(data: &[u8]) -> Result<Self, ImageError> {
        let mut r = HeaderReader { data, pos: 0 };
        let magic = r.token()?;
        let (channels, binary) = match magic.as_str() {
            "P2" => (1, false),
            "P3" => (3, false),
            "P5" => (1, true),
            "P6" => (3, true),
            other => return Err(ImageError::Format(format!("unsupported magic `{other}`"))),
        };
        let cols = r.number()?;
        let rows = r.number()?;
        let maxval = r.number()?;
        if maxval == 0 || maxval > 255 {
            return Err(ImageError::Format(format!("maxval {maxval} not in 1..=255")));
        }
        let n = rows * cols * channels;
        let pixels = if binary {
            // exactly one whitespace byte separates the header from the raster
            let start = r.pos + 1;
            let body = data
                .get(start..start + n)
                .ok_or_else(|| ImageError::Format("truncated raster".into()))?;
            if body.iter().any(|&v| v as usize > maxval) {
                return Err(ImageError::Format("sample exceeds maxval".into()));
            }
            body.to_vec()
        } else {
            (0..n)
                .map(|_| {
                    let v = r.number()?;
                    if v > maxval {
                        Err(ImageError::Format("sample exceeds maxval".into()))
                    } else {
                        Ok(v as u8)
                    }
                })
                .collect::<Result<_, _>>()?
        };
        ImageBuffer::new(rows, cols, channels, pixels)
    }
}

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn token(&mut self) -> Result<String, ImageError> {
        loop {
            match self.data.get(self.pos) {
                Some(b'#') => {
                    while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(_) => break,
                None => return Err(ImageError::Format("unexpected end of header".into())),
            }
        }
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(|c| !c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.data[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize, ImageError> {
        let t = self.token()?;
        t.parse()
            .map_err(|_| ImageError::Format(format!("expected a number, got `{t}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let img = ImageBuffer::new(2, 3, 3, (0..18).map(|v| v * 14).collect()).unwrap();
        let bytes = img.to_pnm_bytes();
        assert!(bytes.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ImageBuffer::from_pnm_bytes(&bytes).unwrap(), img);
    }

    #[test]
    fn reads_plain_pgm_with_comments() {
        let text = b"P2\n# made by hand\n3 2\n# max\n255\n0 1 2\n253 254 255\n";
        let img = ImageBuffer::from_pnm_bytes(text).unwrap();
        assert_eq!(img.dims(), (2, 3));
        assert_eq!(img.pixels(), &[0, 1, 2, 253, 254, 255]);
    }

    #[test]
    fn binary_raster_may_start_with_whitespace_bytes() {
        let mut data = b"P5 2 1 255\n".to_vec();
        data.extend_from_slice(&[b'\n', b' ']);
        let img = ImageBuffer::from_pnm_bytes(&data).unwrap();
        assert_eq!(img.pixels(), b"\n ");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ImageBuffer::from_pnm_bytes(b"P7\n1 1\n255\n\0").is_err());
        assert!(ImageBuffer::from_pnm_bytes(b"P5\n2 2\n255\n\0\0").is_err());
        assert!(ImageBuffer::from_pnm_bytes(b"P5\n1 1\n65535\n\0\0").is_err());
        assert!(ImageBuffer::from_pnm_bytes(b"P2\n1 1\n15\n16\n").is_err());
        assert!(ImageBuffer::new(1, 1, 2, vec![0, 0]).is_err());
        assert!(ImageBuffer::new(0, 1, 1, vec![]).is_err());
    }

    #[test]
    fn planes_round_trip() {
        let img = ImageBuffer::new(2, 2, 3, (0..12).collect()).unwrap();
        assert_eq!(img.plane(1), vec![1, 4, 7, 10]);
        assert_eq!(ImageBuffer::from_planes(2, 2, &img.planes()).unwrap(), img);
    }
}
