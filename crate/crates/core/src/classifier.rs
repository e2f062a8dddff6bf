//! Full-linking co-occurrence classifier.
//!
//! Every training image adds one count to each ordered pair of distinct active
//! cells. Averaging a pair count over the number of trained images gives the
//! link weight, and retrieval admits a non-input cell when its mean link weight
//! from the active input cells reaches the threshold.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{CellIndex, GridError, GridImage};

/// Retrieval threshold used when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("image is {found_w}x{found_h} but classifier {label:?} is {width}x{height}")]
    DimensionMismatch {
        label: String,
        width: usize,
        height: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("training image needs at least 2 active cells, found {0}")]
    NothingToAssociate(usize),

    #[error("a cell has no link with itself: {0}")]
    SelfLink(CellIndex),

    #[error("classifier {0:?} has not been trained")]
    Untrained(String),

    #[error("threshold must lie in [0, 1], got {0}")]
    ThresholdOutOfRange(f64),

    #[error("invalid class label {0:?}: must be non-empty without whitespace or path separators")]
    BadLabel(String),

    #[error("classifier bank is empty")]
    EmptyBank,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Grid(#[from] GridError),
}

pub type Result<T> = std::result::Result<T, ClassifierError>;

pub(crate) fn validate_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || c == '/' || c == '\\')
    {
        return Err(ClassifierError::BadLabel(label.to_string()));
    }
    Ok(())
}

/// Pair counts for one class.
///
/// Counts live in a dense `cells x cells` matrix indexed by flat cell index;
/// the diagonal is never written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceClassifier {
    label: String,
    width: usize,
    height: usize,
    counts: Vec<u32>,
    known: Vec<bool>,
    images_trained: u32,
}

impl CooccurrenceClassifier {
    pub fn new(label: impl Into<String>, width: usize, height: usize) -> Result<Self> {
        let label = label.into();
        validate_label(&label)?;
        if width == 0 || height == 0 {
            return Err(GridError::ZeroDimension { width, height }.into());
        }
        let cells = width * height;
        Ok(Self {
            label,
            width,
            height,
            counts: vec![0; cells * cells],
            known: vec![false; cells],
            images_trained: 0,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn images_trained(&self) -> u32 {
        self.images_trained
    }

    fn cells(&self) -> usize {
        self.width * self.height
    }

    fn flat(&self, c: CellIndex) -> usize {
        c.row * self.width + c.col
    }

    fn check_shape(&self, image: &GridImage) -> Result<()> {
        if image.width() != self.width || image.height() != self.height {
            return Err(ClassifierError::DimensionMismatch {
                label: self.label.clone(),
                width: self.width,
                height: self.height,
                found_w: image.width(),
                found_h: image.height(),
            });
        }
        Ok(())
    }

    fn check_cell(&self, c: CellIndex) -> Result<()> {
        if c.row >= self.height || c.col >= self.width {
            return Err(GridError::OutOfBounds {
                row: c.row,
                col: c.col,
                width: self.width,
                height: self.height,
            }
            .into());
        }
        Ok(())
    }

    fn check_trained(&self) -> Result<()> {
        if self.images_trained == 0 {
            return Err(ClassifierError::Untrained(self.label.clone()));
        }
        Ok(())
    }

    /// Adds one image: every ordered pair of distinct active cells gains a count.
    pub fn train(&mut self, image: &GridImage) -> Result<()> {
        self.check_shape(image)?;
        if image.active_count() < 2 {
            return Err(ClassifierError::NothingToAssociate(image.active_count()));
        }
        let cells = self.cells();
        let active = image.active_flat();
        for &c in &active {
            let row = &mut self.counts[c * cells..(c + 1) * cells];
            for &d in &active {
                if c != d {
                    row[d] += 1;
                }
            }
            self.known[c] = true;
        }
        self.images_trained += 1;
        Ok(())
    }

    /// Raw count for the ordered pair `(c, d)`.
    pub fn count(&self, c: CellIndex, d: CellIndex) -> Result<u32> {
        self.check_cell(c)?;
        self.check_cell(d)?;
        Ok(self.counts[self.flat(c) * self.cells() + self.flat(d)])
    }

    /// Count averaged over the number of trained images.
    pub fn link_weight(&self, c: CellIndex, d: CellIndex) -> Result<f64> {
        if c == d {
            return Err(ClassifierError::SelfLink(c));
        }
        self.check_trained()?;
        Ok(f64::from(self.count(c, d)?) / f64::from(self.images_trained))
    }

    /// Whether the cell took part in at least one stored pair.
    pub fn is_known(&self, c: CellIndex) -> bool {
        c.row < self.height && c.col < self.width && self.known[self.flat(c)]
    }

    /// Iterates stored ordered pairs `(c, d, count)` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (CellIndex, CellIndex, u32)> + '_ {
        let cells = self.cells();
        let w = self.width;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(move |(i, &n)| {
                let (c, d) = (i / cells, i % cells);
                (
                    CellIndex::new(c / w, c % w),
                    CellIndex::new(d / w, d % w),
                    n,
                )
            })
    }

    /// Sum of counts from `sources` (flat indices) into flat cell `target`.
    fn summed_counts(&self, sources: &[usize], target: usize) -> u64 {
        // counts is symmetric, so read the target's row for locality
        let row = &self.counts[target * self.cells()..(target + 1) * self.cells()];
        sources.iter().map(|&c| u64::from(row[c])).sum()
    }

    /// Mean link weight from the `sources` cells into `target`.
    ///
    /// Zero when there are no sources or the classifier is untrained.
    pub fn mean_link_weight(&self, sources: &[usize], target: usize) -> f64 {
        if sources.is_empty() || self.images_trained == 0 {
            return 0.0;
        }
        let denom = sources.len() as u64 * u64::from(self.images_trained);
        self.summed_counts(sources, target) as f64 / denom as f64
    }

    /// Admission rule shared by retrieval and binding: the target must have at
    /// least one link into the sources and its mean weight must reach the
    /// threshold.
    pub(crate) fn admits(&self, sources: &[usize], target: usize, threshold: f64) -> bool {
        if sources.is_empty() || self.images_trained == 0 {
            return false;
        }
        let sum = self.summed_counts(sources, target);
        if sum == 0 {
            return false;
        }
        let denom = sources.len() as u64 * u64::from(self.images_trained);
        sum as f64 / denom as f64 >= threshold
    }

    /// Cells the classifier returns for an input image: the input cells it
    /// knows, plus every other cell whose mean link weight from the input
    /// reaches `threshold`.
    pub fn retrieve(&self, image: &GridImage, threshold: f64) -> Result<BTreeSet<CellIndex>> {
        check_threshold(threshold)?;
        self.check_trained()?;
        self.check_shape(image)?;
        let sources = image.active_flat();
        if sources.is_empty() {
            return Ok(BTreeSet::new());
        }
        let mut is_input = vec![false; self.cells()];
        for &c in &sources {
            is_input[c] = true;
        }
        let retrieved = (0..self.cells())
            .filter(|&d| {
                if is_input[d] {
                    self.known[d]
                } else {
                    self.admits(&sources, d, threshold)
                }
            })
            .map(|d| image.unflat(d))
            .collect();
        Ok(retrieved)
    }

    /// Serializes to the line-oriented text format: a header line
    /// `label width height images_trained` followed by one
    /// `row1 col1 row2 col2 count` line per stored ordered pair.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.label, self.width, self.height, self.images_trained
        );
        for (c, d, n) in self.pairs() {
            let _ = writeln!(out, "{} {} {} {} {}", c.row, c.col, d.row, d.col, n);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| ClassifierError::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header line".into()))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                1,
                "header must be `label width height images_trained`".into(),
            ));
        }
        let num = |s: &str, line: usize| -> Result<u64> {
            s.parse::<u64>()
                .map_err(|_| parse_err(line, format!("expected a non-negative integer, got {s:?}")))
        };
        let width = num(fields[1], 1)? as usize;
        let height = num(fields[2], 1)? as usize;
        let trained = u32::try_from(num(fields[3], 1)?)
            .map_err(|_| parse_err(1, "images_trained too large".into()))?;
        let mut classifier = Self::new(fields[0], width, height)?;
        classifier.images_trained = trained;

        let cells = classifier.cells();
        let mut last: Option<usize> = None;
        for (line, text) in lines {
            let parts: Vec<&str> = text.split(' ').collect();
            if parts.len() != 5 {
                return Err(parse_err(
                    line,
                    "expected `row1 col1 row2 col2 count`".into(),
                ));
            }
            let mut v = [0u64; 5];
            for (slot, p) in v.iter_mut().zip(&parts) {
                *slot = num(p, line)?;
            }
            let c = CellIndex::new(v[0] as usize, v[1] as usize);
            let d = CellIndex::new(v[2] as usize, v[3] as usize);
            classifier
                .check_cell(c)
                .and_then(|_| classifier.check_cell(d))
                .map_err(|e| parse_err(line, e.to_string()))?;
            if c == d {
                return Err(parse_err(line, format!("self pair {c}")));
            }
            let count = v[4];
            if count == 0 || count > u64::from(trained) {
                return Err(parse_err(
                    line,
                    format!("count {count} outside 1..={trained}"),
                ));
            }
            let index = classifier.flat(c) * cells + classifier.flat(d);
            if last.is_some_and(|prev| prev >= index) {
                return Err(parse_err(line, "pairs out of lexicographic order".into()));
            }
            last = Some(index);
            classifier.counts[index] = count as u32;
            let fc = classifier.flat(c);
            classifier.known[fc] = true;
        }
        for c in 0..cells {
            for d in (c + 1)..cells {
                if classifier.counts[c * cells + d] != classifier.counts[d * cells + c] {
                    return Err(parse_err(
                        0,
                        format!(
                            "asymmetric counts between {} and {}",
                            classifier.unflat(c),
                            classifier.unflat(d)
                        ),
                    ));
                }
            }
        }
        Ok(classifier)
    }

    fn unflat(&self, i: usize) -> CellIndex {
        CellIndex::new(i / self.width, i % self.width)
    }
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(ClassifierError::ThresholdOutOfRange(threshold));
    }
    Ok(())
}

/// Trains a fresh classifier on a sequence of images.
pub fn train_all<'a>(
    label: &str,
    width: usize,
    height: usize,
    images: impl IntoIterator<Item = &'a GridImage>,
) -> Result<CooccurrenceClassifier> {
    let mut classifier = CooccurrenceClassifier::new(label, width, height)?;
    for image in images {
        classifier.train(image)?;
    }
    Ok(classifier)
}
