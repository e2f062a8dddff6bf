//! Grayscale carrier, binarization and grid rescaling.

use crate::grid::{CellIndex, GridError, GridImage};

use super::{DatasetError, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(GridError::ZeroDimension { width, height }.into());
        }
        if pixels.len() != width * height {
            return Err(DatasetError::PixelCount {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// Dark ink on light paper: a cell is active when its pixel is below `cutoff`.
pub fn binarize(gray: &GrayImage, cutoff: u8) -> GridImage {
    let cells = gray
        .pixels
        .iter()
        .enumerate()
        .filter(|(_, &p)| p < cutoff)
        .map(|(i, _)| CellIndex::new(i / gray.width, i % gray.width));
    GridImage::new(gray.width, gray.height, cells).expect("cells come from the raster")
}

/// Source span `[lo, hi)` feeding target index `t` along one axis.
///
/// Upscaling (or equal size) picks the single nearest source cell. Downscaling
/// pools the whole block of source cells so thin strokes survive.
fn source_span(t: usize, src: usize, dst: usize) -> (usize, usize) {
    if dst >= src {
        let s = ((2 * t + 1) * src / (2 * dst)).min(src - 1);
        (s, s + 1)
    } else {
        (t * src / dst, (t + 1) * src / dst)
    }
}

/// Maps the `rows x cols` window at (`top`, `left`) onto a fresh
/// `width x height` grid. A target cell is active when any cell of its source
/// span is active.
fn sample_window(
    image: &GridImage,
    (top, left, rows, cols): (usize, usize, usize, usize),
    width: usize,
    height: usize,
) -> Result<GridImage> {
    let mut out = GridImage::empty(width, height)?;
    let col_spans: Vec<_> = (0..width).map(|c| source_span(c, cols, width)).collect();
    for r in 0..height {
        let (r_lo, r_hi) = source_span(r, rows, height);
        for (c, &(c_lo, c_hi)) in col_spans.iter().enumerate() {
            let hit = (r_lo..r_hi).any(|sr| {
                (c_lo..c_hi).any(|sc| image.is_active(CellIndex::new(top + sr, left + sc)))
            });
            if hit {
                out.activate(CellIndex::new(r, c))?;
            }
        }
    }
    Ok(out)
}

/// Rescales the whole image to `width x height`. Returns the
/// image unchanged when it already has that shape.
pub fn resample(image: &GridImage, width: usize, height: usize) -> Result<GridImage> {
    if image.width() == width && image.height() == height {
        return Ok(image.clone());
    }
    sample_window(image, (0, 0, image.height(), image.width()), width, height)
}

/// Crops to the bounding box of the active cells and stretches it over a
/// `width x height` grid.
pub fn normalize_scale(image: &GridImage, width: usize, height: usize) -> Result<GridImage> {
    let (r0, c0, r1, c1) = image.bounding_box().ok_or(DatasetError::EmptyImage)?;
    sample_window(image, (r0, c0, r1 - r0 + 1, c1 - c0 + 1), width, height)
}
