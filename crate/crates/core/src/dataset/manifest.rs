//! Dataset manifests.
//!
//! ```text
//! # comment
//! grid = 32x32
//! cutoff = 128
//! scale = off
//! class 1: digits/1/*.pgm
//! class 2: digits/2/a.pgm digits/2/b.pgm
//! test 1: held_out/1/*.pgm
//! ```
//!
//! Paths are relative to the manifest's directory. Entries holding `*`, `?`
//! or `[` are expanded as globs (sorted). Without `test` lines the training
//! images double as the recognition set.

use std::path::{Path, PathBuf};

use crate::classifier::validate_label;

use super::{DatasetError, Result, DEFAULT_CUTOFF, DEFAULT_GRID};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    #[default]
    Off,
    /// Crop to the ink bounding box and stretch over the grid.
    BoundingBoxFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub classes: Vec<(String, Vec<PathBuf>)>,
    pub tests: Vec<(String, Vec<PathBuf>)>,
    pub grid_width: usize,
    pub grid_height: usize,
    pub binarize_cutoff: u8,
    pub scale_mode: ScaleMode,
}

impl DatasetManifest {
    pub fn new(classes: Vec<(String, Vec<PathBuf>)>) -> Self {
        Self {
            classes,
            tests: Vec::new(),
            grid_width: DEFAULT_GRID,
            grid_height: DEFAULT_GRID,
            binarize_cutoff: DEFAULT_CUTOFF,
            scale_mode: ScaleMode::Off,
        }
    }

    /// The images recognised by the harness: `test` entries when present,
    /// otherwise the training images themselves.
    pub fn recognition_set(&self) -> &[(String, Vec<PathBuf>)] {
        if self.tests.is_empty() {
            &self.classes
        } else {
            &self.tests
        }
    }
}

fn push_entry(list: &mut Vec<(String, Vec<PathBuf>)>, label: String, mut files: Vec<PathBuf>) {
    match list.iter_mut().find(|(l, _)| *l == label) {
        Some((_, existing)) => existing.append(&mut files),
        None => list.push((label, files)),
    }
}

fn expand(item: &str, base: &Path) -> std::result::Result<Vec<PathBuf>, String> {
    let joined = base.join(item);
    if !item.contains(['*', '?', '[']) {
        return Ok(vec![joined]);
    }
    let pattern = joined.to_string_lossy().into_owned();
    let mut found = glob::glob(&pattern)
        .map_err(|e| format!("bad pattern {item:?}: {e}"))?
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    if found.is_empty() {
        return Err(format!("pattern {item:?} matched no files"));
    }
    found.sort();
    Ok(found)
}

/// Parses manifest text. `origin` names the manifest in error messages and
/// `base` anchors relative paths.
pub fn parse_manifest(text: &str, origin: &Path, base: &Path) -> Result<DatasetManifest> {
    let mut manifest = DatasetManifest::new(Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| DatasetError::Parse {
            path: origin.to_path_buf(),
            line: line_no,
            message,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let list_kind = ["class ", "test "]
            .into_iter()
            .find(|p| line.starts_with(p));
        if let Some(prefix) = list_kind {
            let rest = &line[prefix.len()..];
            let (label, items) = rest
                .split_once(':')
                .ok_or_else(|| err(format!("expected `{}<label>: <files>`", prefix)))?;
            let label = label.trim().to_string();
            validate_label(&label).map_err(|e| err(e.to_string()))?;
            let mut files = Vec::new();
            for item in items.split_whitespace() {
                files.extend(expand(item, base).map_err(err)?);
            }
            if files.is_empty() {
                return Err(err(format!("class {label:?} lists no files")));
            }
            let target = if prefix == "class " {
                &mut manifest.classes
            } else {
                &mut manifest.tests
            };
            push_entry(target, label, files);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("unrecognised line {line:?}")))?;
        let value = value.trim();
        match key.trim() {
            "grid" => {
                let (w, h) = value
                    .split_once('x')
                    .and_then(|(w, h)| Some((w.trim().parse().ok()?, h.trim().parse().ok()?)))
                    .filter(|&(w, h): &(usize, usize)| w > 0 && h > 0)
                    .ok_or_else(|| err(format!("grid must be <width>x<height>, got {value:?}")))?;
                manifest.grid_width = w;
                manifest.grid_height = h;
            }
            "cutoff" => {
                manifest.binarize_cutoff = value
                    .parse()
                    .map_err(|_| err(format!("cutoff must be 0..=255, got {value:?}")))?;
            }
            "scale" => {
                manifest.scale_mode = match value {
                    "off" => ScaleMode::Off,
                    "fit" => ScaleMode::BoundingBoxFit,
                    other => return Err(err(format!("scale must be off|fit, got {other:?}"))),
                };
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    if manifest.classes.is_empty() {
        return Err(DatasetError::Parse {
            path: origin.to_path_buf(),
            line: 0,
            message: "manifest declares no classes".into(),
        });
    }
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_manifest(&text, path, base)
}
