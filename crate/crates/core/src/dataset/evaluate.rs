//! Train one classifier per class, then recognise every image against the
//! whole bank.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::classifier::CooccurrenceClassifier;
use crate::exec::Exec;
use crate::grid::GridImage;
use crate::score::classify_with;

use super::{
    binarize, load_grid_text, load_pgm, normalize_scale, resample, DatasetError, DatasetManifest,
    Result, ScaleMode,
};

/// A class label with its accuracy.
pub type ClassAccuracy<'a> = (&'a str, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub per_class_accuracy: BTreeMap<String, f64>,
    pub average_accuracy: f64,
    /// `(true label, predicted label) -> count`
    pub confusion: BTreeMap<(String, String), usize>,
    pub examples: BTreeMap<String, usize>,
}

impl EvaluationReport {
    fn labels(&self) -> Vec<String> {
        let mut labels: BTreeSet<&String> = self.examples.keys().collect();
        labels.extend(self.confusion.keys().map(|(_, p)| p));
        labels.into_iter().cloned().collect()
    }

    /// Best and worst class accuracy.
    pub fn extremes(&self) -> Option<(ClassAccuracy<'_>, ClassAccuracy<'_>)> {
        let mut iter = self.per_class_accuracy.iter();
        let (l, &a) = iter.next()?;
        let mut best = (l.as_str(), a);
        let mut worst = best;
        for (l, &a) in iter {
            if a > best.1 {
                best = (l, a);
            }
            if a < worst.1 {
                worst = (l, a);
            }
        }
        Some((best, worst))
    }

    /// Human-readable table ending with the `average_accuracy` line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("class  correct/total  accuracy\n");
        for (label, acc) in &self.per_class_accuracy {
            let total = self.examples[label];
            let correct = self
                .confusion
                .get(&(label.clone(), label.clone()))
                .copied()
                .unwrap_or(0);
            let _ = writeln!(out, "{label}  {correct}/{total}  {acc:.6}");
        }
        if let Some(((bl, ba), (wl, wa))) = self.extremes() {
            let _ = writeln!(out, "best {bl} {ba:.6}");
            let _ = writeln!(out, "worst {wl} {wa:.6}");
        }
        let _ = writeln!(out, "average_accuracy {:.6}", self.average_accuracy);
        out
    }

    /// Confusion matrix as CSV: rows are true labels, columns predictions.
    pub fn confusion_csv(&self) -> String {
        let labels = self.labels();
        let mut out = String::from("true\\predicted");
        for l in &labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for t in self.examples.keys() {
            out.push_str(t);
            for p in &labels {
                let n = self
                    .confusion
                    .get(&(t.clone(), p.clone()))
                    .copied()
                    .unwrap_or(0);
                let _ = write!(out, ",{n}");
            }
            out.push('\n');
        }
        out
    }
}

fn with_path(path: &Path) -> impl Fn(DatasetError) -> DatasetError + '_ {
    move |e| match e {
        e @ (DatasetError::Io { .. } | DatasetError::Parse { .. }) => e,
        other => DatasetError::Image {
            path: path.to_path_buf(),
            source: Box::new(other),
        },
    }
}

/// Loads one image and maps it onto the manifest's grid.
///
/// `.pgm` files are binarized with the manifest cutoff, `.txt`/`.grid` files
/// are already binary. With scaling off an image of a different size is
/// rescaled as a whole; with bounding-box fit the ink is cropped first.
pub fn load_image(path: &Path, manifest: &DatasetManifest) -> Result<GridImage> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase());
    let raw = match ext.as_deref() {
        Some("pgm") => binarize(&load_pgm(path)?, manifest.binarize_cutoff),
        Some("txt") | Some("grid") => load_grid_text(path)?,
        _ => return Err(DatasetError::UnsupportedFormat(path.to_path_buf())),
    };
    let (w, h) = (manifest.grid_width, manifest.grid_height);
    match manifest.scale_mode {
        ScaleMode::Off => resample(&raw, w, h),
        ScaleMode::BoundingBoxFit => normalize_scale(&raw, w, h),
    }
    .map_err(with_path(path))
}

fn train_class(
    label: &str,
    files: &[PathBuf],
    manifest: &DatasetManifest,
) -> Result<CooccurrenceClassifier> {
    if files.is_empty() {
        return Err(DatasetError::EmptyClass(label.to_string()));
    }
    let mut cls = CooccurrenceClassifier::new(label, manifest.grid_width, manifest.grid_height)?;
    for path in files {
        let image = load_image(path, manifest)?;
        cls.train(&image).map_err(|source| DatasetError::Classify {
            path: path.clone(),
            source,
        })?;
    }
    Ok(cls)
}

/// One trained classifier per manifest class, in manifest order.
pub fn train_bank(manifest: &DatasetManifest, exec: Exec) -> Result<Vec<CooccurrenceClassifier>> {
    exec.try_map(&manifest.classes, |(label, files)| {
        train_class(label, files, manifest)
    })
}

/// Trains on the manifest and recognises its recognition set.
pub fn evaluate(manifest: &DatasetManifest, threshold: f64) -> Result<EvaluationReport> {
    evaluate_with(manifest, None, threshold, Exec::default())
}

/// Like [`evaluate`], optionally reusing an already trained bank.
pub fn evaluate_with(
    manifest: &DatasetManifest,
    bank: Option<&[CooccurrenceClassifier]>,
    threshold: f64,
    exec: Exec,
) -> Result<EvaluationReport> {
    crate::classifier::check_threshold(threshold)?;
    let trained;
    let bank = match bank {
        Some(b) => b,
        None => {
            trained = train_bank(manifest, exec)?;
            &trained
        }
    };
    let known: BTreeSet<&str> = bank.iter().map(|c| c.label()).collect();
    let mut jobs = Vec::new();
    for (label, files) in manifest.recognition_set() {
        if files.is_empty() {
            return Err(DatasetError::EmptyClass(label.clone()));
        }
        if !known.contains(label.as_str()) {
            return Err(DatasetError::UnknownClass(label.clone()));
        }
        jobs.extend(files.iter().map(|f| (label.as_str(), f.as_path())));
    }
    let predictions = exec.try_map(&jobs, |&(_, path)| {
        let image = load_image(path, manifest)?;
        let ranked =
            classify_with(bank, &image, threshold, Exec::Sequential).map_err(|source| {
                DatasetError::Classify {
                    path: path.to_path_buf(),
                    source,
                }
            })?;
        Ok::<_, DatasetError>(ranked[0].label.clone())
    })?;

    let mut confusion = BTreeMap::new();
    let mut examples = BTreeMap::new();
    for (&(truth, _), predicted) in jobs.iter().zip(predictions) {
        *confusion
            .entry((truth.to_string(), predicted))
            .or_insert(0usize) += 1;
        *examples.entry(truth.to_string()).or_insert(0usize) += 1;
    }
    let per_class_accuracy: BTreeMap<String, f64> = examples
        .iter()
        .map(|(label, &total)| {
            let correct = confusion
                .get(&(label.clone(), label.clone()))
                .copied()
                .unwrap_or(0);
            (label.clone(), correct as f64 / total as f64)
        })
        .collect();
    let average_accuracy =
        per_class_accuracy.values().sum::<f64>() / per_class_accuracy.len() as f64;
    Ok(EvaluationReport {
        per_class_accuracy,
        average_accuracy,
        confusion,
        examples,
    })
}
