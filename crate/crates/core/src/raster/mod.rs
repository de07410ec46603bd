//! Image and map primitives.
//!
//! Everything in the pipeline is a dense row-major [`Raster`]: the input RGB
//! image, its normalized CIELab conversion, saliency maps, binary masks and
//! superpixel label rasters. Pixel `(x, y)` lives at index `y * width + x`.

mod color;
mod components;
mod distance;
mod io;
mod otsu;

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub use color::{rgb_to_lab, srgb_to_lab};
pub use components::{connected_components, Components};
pub use distance::squared_distance_to;
pub use io::{load_image, load_mask, load_saliency, save_map, write_atomically};
pub(crate) use io::encode as io_encode;
pub use otsu::{histogram, level_of, otsu_level, otsu_threshold, threshold_of};

/// A dense row-major grid of pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

/// 8-bit sRGB image.
pub type RgbImage = Raster<[u8; 3]>;
/// CIELab image with every channel normalized to `[0, 1]`.
pub type LabImage = Raster<[f64; 3]>;
/// Per-pixel saliency in `[0, 1]`.
pub type SaliencyMap = Raster<f64>;
/// Per-pixel boolean mask.
pub type BinaryMask = Raster<bool>;

impl<T> Raster<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{width}x{height} raster needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a raster by evaluating `f(x, y)` in raster order.
    ///
    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn index_of(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords_of(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&T> {
        (x < self.width && y < self.height).then(|| &self.data[y * self.width + x])
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Raster<U> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Errors unless `other` has the same width and height.
    pub fn check_same_size<U>(&self, other: &Raster<U>) -> Result<()> {
        if self.dimensions() == other.dimensions() {
            Ok(())
        } else {
            Err(Error::mismatch(self.dimensions(), other.dimensions()))
        }
    }
}

impl<T: Clone> Raster<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl Raster<f64> {
    /// Builds a saliency map, rejecting values outside `[0, 1]` or NaN.
    pub fn saliency(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidRaster(format!(
                "saliency value {v} outside [0, 1]"
            )));
        }
        Self::from_vec(width, height, data)
    }

    /// Min-max normalizes to `[0, 1]`. Constant maps are returned unchanged.
    pub fn normalized(&self) -> Self {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if hi <= lo {
            return self.clone();
        }
        let span = hi - lo;
        self.map(|&v| ((v - lo) / span).clamp(0.0, 1.0))
    }

    /// Foreground mask `v >= threshold`.
    pub fn threshold(&self, threshold: f64) -> BinaryMask {
        self.map(|&v| v >= threshold)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

impl Raster<bool> {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// 1.0 where true, 0.0 elsewhere.
    pub fn to_map(&self) -> SaliencyMap {
        self.map(|&b| if b { 1.0 } else { 0.0 })
    }
}

impl<T> Index<(usize, usize)> for Raster<T> {
    type Output = T;

    #[inline]
    fn index(&self, (x, y): (usize, usize)) -> &T {
        &self.data[y * self.width + x]
    }
}

impl<T> IndexMut<(usize, usize)> for Raster<T> {
    #[inline]
    fn index_mut(&mut self, (x, y): (usize, usize)) -> &mut T {
        &mut self.data[y * self.width + x]
    }
}

/// Offsets of the 8-neighborhood, in raster order.
pub(crate) const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Returns `(x + dx, y + dy)` when it falls inside a `width x height` grid.
#[inline]
pub(crate) fn offset(
    x: usize,
    y: usize,
    (dx, dy): (isize, isize),
    width: usize,
    height: usize,
) -> Option<(usize, usize)> {
    let nx = x.checked_add_signed(dx)?;
    let ny = y.checked_add_signed(dy)?;
    (nx < width && ny < height).then_some((nx, ny))
}
