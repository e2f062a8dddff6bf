//! Image ingestion, dataset manifests and the train-then-recognise harness.

mod evaluate;
mod manifest;
mod pgm;
mod textgrid;
mod transform;

use std::path::PathBuf;

use thiserror::Error;

use crate::classifier::ClassifierError;
use crate::grid::GridError;

pub use evaluate::{evaluate, evaluate_with, load_image, train_bank, EvaluationReport};
pub use manifest::{load_manifest, parse_manifest, DatasetManifest, ScaleMode};
pub use pgm::{decode_pgm, encode_pgm, load_pgm};
pub use textgrid::{grid_to_text, load_grid_text, parse_grid_text, write_grid_text};
pub use transform::{binarize, normalize_scale, resample, GrayImage};

/// Default classifier grid edge, in cells.
pub const DEFAULT_GRID: usize = 32;
/// Default binarization cutoff.
pub const DEFAULT_CUTOFF: u8 = 128;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: unsupported image format (expected .pgm, .txt or .grid)", .0.display())]
    UnsupportedFormat(PathBuf),

    #[error("pixel count {found} does not match {expected}")]
    PixelCount { expected: usize, found: usize },

    #[error("image has no active cells")]
    EmptyImage,

    #[error("class {0:?} has no images")]
    EmptyClass(String),

    #[error("test class {0:?} has no trained classifier")]
    UnknownClass(String),

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: Box<DatasetError>,
    },

    #[error("{}: {source}", path.display())]
    Classify {
        path: PathBuf,
        source: ClassifierError,
    },

    #[error(transparent)]
    Classifier(#[from] ClassifierError),

    #[error(transparent)]
    Grid(#[from] GridError),
}

pub type Result<T> = std::result::Result<T, DatasetError>;
