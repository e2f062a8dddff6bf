//! `#`/`.` text grids, one row per line.

use std::path::Path;

use crate::grid::{CellIndex, GridImage};

use super::{DatasetError, Result};

pub fn parse_grid_text(text: &str) -> std::result::Result<GridImage, (usize, String)> {
    let mut rows: Vec<&str> = text.lines().collect();
    // trailing blank lines are ignored
    while rows
        .last()
        .is_some_and(|r| r.trim_end_matches('\r').is_empty())
    {
        rows.pop();
    }
    if rows.is_empty() {
        return Err((1, "empty grid".into()));
    }
    let width = rows[0].trim_end_matches('\r').chars().count();
    if width == 0 {
        return Err((1, "empty row".into()));
    }
    let mut cells = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        let row = row.trim_end_matches('\r');
        let mut len = 0;
        for (c, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push(CellIndex::new(r, c)),
                '.' => {}
                other => return Err((r + 1, format!("illegal character {other:?}"))),
            }
            len += 1;
        }
        if len != width {
            return Err((r + 1, format!("row has {len} cells, expected {width}")));
        }
    }
    GridImage::new(width, rows.len(), cells).map_err(|e| (1, e.to_string()))
}

/// Reads a text grid file.
pub fn load_grid_text(path: &Path) -> Result<GridImage> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_grid_text(&text).map_err(|(line, message)| DatasetError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

pub fn grid_to_text(image: &GridImage) -> String {
    let mut out = String::with_capacity((image.width() + 1) * image.height());
    for r in 0..image.height() {
        for c in 0..image.width() {
            out.push(if image.is_active(CellIndex::new(r, c)) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    out
}

pub fn write_grid_text(path: &Path, image: &GridImage) -> Result<()> {
    std::fs::write(path, grid_to_text(image)).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}
