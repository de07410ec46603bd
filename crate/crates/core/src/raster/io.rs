use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, ImageFormat, ImageReader};

use super::{BinaryMask, Raster, RgbImage, SaliencyMap};
use crate::error::{Error, Result};

fn decode(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    let reader = reader.with_guessed_format().map_err(|e| Error::io(path, e))?;
    reader.decode().map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads an 8-bit RGB image. Grayscale inputs are expanded to RGB.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let img = decode(path)?.into_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.pixels().map(|p| p.0).collect();
    Raster::from_vec(w, h, data)
}

/// Loads an 8-bit grayscale saliency map; byte `v` becomes `v / 255`.
///
/// RGB files are accepted only when all three channels agree.
pub fn load_saliency(path: impl AsRef<Path>) -> Result<SaliencyMap> {
    let path = path.as_ref();
    let img = decode(path)?;
    let gray = if img.color().has_color() {
        let rgb = img.into_rgb8();
        if rgb.pixels().any(|p| p.0[0] != p.0[1] || p.0[1] != p.0[2]) {
            return Err(Error::NotGrayscale(path.to_path_buf()));
        }
        DynamicImage::ImageRgb8(rgb).into_luma8()
    } else {
        img.into_luma8()
    };
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let data = gray.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
    Raster::from_vec(w, h, data)
}

/// Loads a ground-truth mask: pixels `>= 128` are foreground.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    Ok(load_saliency(path)?.map(|&v| v >= 0.5))
}

fn to_gray(map: &SaliencyMap) -> GrayImage {
    let bytes = map
        .data()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    GrayImage::from_raw(map.width() as u32, map.height() as u32, bytes)
        .expect("buffer length matches dimensions")
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename, so
/// a failed write never leaves a partial file behind.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::ErrorKind::InvalidInput.into()))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp: PathBuf = path.with_file_name(tmp_name);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub(crate) fn encode(img: DynamicImage, path: &Path) -> Result<Vec<u8>> {
    let format = ImageFormat::from_path(path).unwrap_or(ImageFormat::Png);
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, format).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(buf.into_inner())
}

/// Saves a map as 8-bit grayscale, `round(v * 255)` per pixel. The format
/// follows the extension (PNG when unknown).
pub fn save_map(map: &SaliencyMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(DynamicImage::ImageLuma8(to_gray(map)), path)?;
    write_atomically(path, &bytes)
}
