use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use super::Segmentation;
use crate::error::{Error, Result};
use crate::raster::{write_atomically, RgbImage};

/// Writes the label raster as a 16-bit grayscale PNG holding `label + 1`.
pub fn save_labels(seg: &Segmentation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if seg.len() >= u16::MAX as usize {
        return Err(Error::InvalidParameter {
            name: "labels",
            message: format!("{} superpixels do not fit in 16 bits", seg.len()),
        });
    }
    let (w, h) = seg.labels.dimensions();
    let raw: Vec<u16> = seg.labels.data().iter().map(|&l| l as u16 + 1).collect();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(w as u32, h as u32, raw).expect("buffer length matches");
    let bytes = crate::raster::io_encode(DynamicImage::ImageLuma16(img), path)?;
    write_atomically(path, &bytes)
}

/// Paints superpixel boundaries (pixels with a 4-neighbor of another label)
/// in red over `image`.
pub fn save_boundaries(image: &RgbImage, seg: &Segmentation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image.check_same_size(&seg.labels)?;
    let (w, h) = image.dimensions();
    let labels = &seg.labels;
    let mut raw = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let l = labels[(x, y)];
            let edge = (x + 1 < w && labels[(x + 1, y)] != l) || (y + 1 < h && labels[(x, y + 1)] != l);
            let px = if edge { [255, 0, 0] } else { image[(x, y)] };
            raw.extend_from_slice(&px);
        }
    }
    let img = image::RgbImage::from_raw(w as u32, h as u32, raw).expect("buffer length matches");
    let bytes = crate::raster::io_encode(DynamicImage::ImageRgb8(img), path)?;
    write_atomically(path, &bytes)
}
