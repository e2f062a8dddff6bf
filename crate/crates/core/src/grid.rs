//! Binary cell grids.
//!
//! A [`GridImage`] is the unit of sensory input for every model in this crate:
//! a `width x height` grid in which each cell is either active (ink present) or
//! inactive. Active cells are kept in a [`BTreeSet`] so iteration is always in
//! `(row, col)` lexicographic order.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },

    #[error("cell ({row}, {col}) lies outside a {width}x{height} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid cell label {0:?}")]
    BadLabel(String),
}

/// Position of one cell. Ordering is `(row, col)` lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Parses a spreadsheet-style label such as `A1` or `C12`.
    ///
    /// Letters select the column (`A` = 0) and the number selects the row
    /// starting at 1.
    pub fn from_label(label: &str) -> Result<Self, GridError> {
        let bad = || GridError::BadLabel(label.to_string());
        let split = label
            .find(|c: char| c.is_ascii_digit())
            .filter(|&i| i > 0)
            .ok_or_else(bad)?;
        let (letters, digits) = label.split_at(split);
        let mut col = 0usize;
        for ch in letters.chars() {
            if !ch.is_ascii_uppercase() {
                return Err(bad());
            }
            col = col * 26 + (ch as usize - 'A' as usize + 1);
        }
        let row: usize = digits.parse().map_err(|_| bad())?;
        if row == 0 {
            return Err(bad());
        }
        Ok(Self::new(row - 1, col - 1))
    }

    pub fn label(&self) -> String {
        let mut col = self.col + 1;
        let mut letters = Vec::new();
        while col > 0 {
            let rem = (col - 1) % 26;
            letters.push((b'A' + rem as u8) as char);
            col = (col - 1) / 26;
        }
        letters.reverse();
        format!(
            "{}{}",
            letters.into_iter().collect::<String>(),
            self.row + 1
        )
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Binary 2-D image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridImage {
    width: usize,
    height: usize,
    active: BTreeSet<CellIndex>,
}

impl GridImage {
    /// An image with no active cells.
    pub fn empty(width: usize, height: usize) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::ZeroDimension { width, height });
        }
        Ok(Self {
            width,
            height,
            active: BTreeSet::new(),
        })
    }

    pub fn new(
        width: usize,
        height: usize,
        cells: impl IntoIterator<Item = CellIndex>,
    ) -> Result<Self, GridError> {
        let mut image = Self::empty(width, height)?;
        for cell in cells {
            image.activate(cell)?;
        }
        Ok(image)
    }

    /// Builds an image from spreadsheet-style labels (`A1`, `B1`, ...).
    pub fn from_labels(width: usize, height: usize, labels: &[&str]) -> Result<Self, GridError> {
        let cells = labels
            .iter()
            .map(|l| CellIndex::from_label(l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(width, height, cells)
    }

    pub fn activate(&mut self, cell: CellIndex) -> Result<(), GridError> {
        self.check_bounds(cell)?;
        self.active.insert(cell);
        Ok(())
    }

    pub fn check_bounds(&self, cell: CellIndex) -> Result<(), GridError> {
        if cell.row >= self.height || cell.col >= self.width {
            return Err(GridError::OutOfBounds {
                row: cell.row,
                col: cell.col,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn active(&self) -> &BTreeSet<CellIndex> {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, cell: CellIndex) -> bool {
        self.active.contains(&cell)
    }

    pub fn same_shape(&self, other: &GridImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Row-major flat index of a cell.
    pub fn flat(&self, cell: CellIndex) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn unflat(&self, index: usize) -> CellIndex {
        CellIndex::new(index / self.width, index % self.width)
    }

    /// Flat indices of the active cells, ascending.
    pub fn active_flat(&self) -> Vec<usize> {
        self.active.iter().map(|&c| self.flat(c)).collect()
    }

    /// Smallest `(min_row, min_col, max_row, max_col)` box holding every
    /// active cell, or `None` for an empty image.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let first = self.active.iter().next()?;
        let mut bbox = (first.row, first.col, first.row, first.col);
        for c in &self.active {
            bbox.0 = bbox.0.min(c.row);
            bbox.1 = bbox.1.min(c.col);
            bbox.2 = bbox.2.max(c.row);
            bbox.3 = bbox.3.max(c.col);
        }
        Some(bbox)
    }
}
