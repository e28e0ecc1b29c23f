//! PGM/PPM always; PNG with the `png` feature.

use std::path::Path;

use kunie_core::ImageBuffer;

use crate::error::{Failure, Outcome, FORMAT};

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

pub fn load(path: &Path) -> Outcome<ImageBuffer> {
    if is_png(path) {
        return load_png(path);
    }
    let data = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
    Ok(ImageBuffer::from_pnm_bytes(&data)?)
}

pub fn save(path: &Path, img: &ImageBuffer) -> Outcome<()> {
    if is_png(path) {
        return save_png(path, img);
    }
    std::fs::write(path, img.to_pnm_bytes()).map_err(|e| Failure::io(path, e))
}

#[cfg(feature = "png")]
fn load_png(path: &Path) -> Outcome<ImageBuffer> {
    let dynamic = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Failure::io(path, io),
        other => Failure::new(FORMAT, other.to_string()),
    })?;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let img = if dynamic.color().has_color() {
        ImageBuffer::new(h, w, 3, dynamic.into_rgb8().into_raw())
    } else {
        ImageBuffer::new(h, w, 1, dynamic.into_luma8().into_raw())
    };
    Ok(img?)
}

#[cfg(not(feature = "png"))]
fn load_png(path: &Path) -> Outcome<ImageBuffer> {
    Err(Failure::new(FORMAT, format!("{}: built without PNG support", path.display())))
}

#[cfg(feature = "png")]
fn save_png(path: &Path, img: &ImageBuffer) -> Outcome<()> {
    let color = if img.channels() == 3 {
        image::ExtendedColorType::Rgb8
    } else {
        image::ExtendedColorType::L8
    };
    image::save_buffer(path, img.pixels(), img.cols() as u32, img.rows() as u32, color).map_err(|e| match e {
        image::ImageError::IoError(io) => Failure::io(path, io),
        other => Failure::new(FORMAT, other.to_string()),
    })
}

#[cfg(not(feature = "png"))]
fn save_png(path: &Path, _: &ImageBuffer) -> Outcome<()> {
    Err(Failure::new(FORMAT, format!("{}: built without PNG support", path.display())))
}
