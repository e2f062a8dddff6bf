//! Ensemble/hierarchy neuron pairing.
//!
//! Every ensemble cell is paired one-to-one with the hierarchy cell at the
//! same position. Reconciling an activation against a stored pattern sorts
//! each cell into one of four cases: both fire (matched), only the ensemble
//! fires (to learn), only the hierarchy fires and the ensemble links pull it in
//! (link activated), or only the hierarchy fires without support (error to
//! remove). Resonance feeds link-activated cells back into the ensemble until
//! nothing changes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::classifier::{ClassifierError, CooccurrenceClassifier};
use crate::grid::{CellIndex, GridImage};
use crate::score::{success_score, Score};

#[derive(Debug, Error, PartialEq)]
pub enum BindingError {
    #[error("{what} is {found_w}x{found_h} but the ensemble is {width}x{height}")]
    DimensionMismatch {
        what: &'static str,
        width: usize,
        height: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("max_iter must be at least 1")]
    ZeroIterations,

    #[error("link threshold must lie in [0, 1], got {0}")]
    Threshold(f64),

    #[error(transparent)]
    Classifier(#[from] ClassifierError),
}

pub type Result<T> = std::result::Result<T, BindingError>;

/// Currently firing ensemble cells plus the learned association mass.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleState {
    pub active: GridImage,
    pub links: CooccurrenceClassifier,
}

impl EnsembleState {
    pub fn new(active: GridImage, links: CooccurrenceClassifier) -> Result<Self> {
        if links.width() != active.width() || links.height() != active.height() {
            return Err(BindingError::DimensionMismatch {
                what: "link classifier",
                width: active.width(),
                height: active.height(),
                found_w: links.width(),
                found_h: links.height(),
            });
        }
        Ok(Self { active, links })
    }
}

/// Stored hierarchy pattern, paired cell-for-cell with the ensemble grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyPattern(pub GridImage);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BindingReport {
    pub matched: BTreeSet<CellIndex>,
    pub to_learn: BTreeSet<CellIndex>,
    pub to_remove: BTreeSet<CellIndex>,
    pub link_activated: BTreeSet<CellIndex>,
}

impl BindingReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, set) in [
            ("matched", &self.matched),
            ("to_learn", &self.to_learn),
            ("to_remove", &self.to_remove),
            ("link_activated", &self.link_activated),
        ] {
            let _ = write!(out, "{name} {}:", set.len());
            for c in set {
                let _ = write!(out, " {},{}", c.row, c.col);
            }
            out.push('\n');
        }
        out
    }
}

fn check_hierarchy(ensemble: &EnsembleState, hierarchy: &HierarchyPattern) -> Result<()> {
    if !ensemble.active.same_shape(&hierarchy.0) {
        return Err(BindingError::DimensionMismatch {
            what: "hierarchy",
            width: ensemble.active.width(),
            height: ensemble.active.height(),
            found_w: hierarchy.0.width(),
            found_h: hierarchy.0.height(),
        });
    }
    Ok(())
}

fn report_for(
    active: &GridImage,
    links: &CooccurrenceClassifier,
    pattern: &GridImage,
    threshold: f64,
) -> BindingReport {
    let sources = active.active_flat();
    let mut report = BindingReport::default();
    for &cell in active.active() {
        if pattern.is_active(cell) {
            report.matched.insert(cell);
        } else {
            report.to_learn.insert(cell);
        }
    }
    for &cell in pattern.active() {
        if active.is_active(cell) {
            continue;
        }
        if links.admits(&sources, active.flat(cell), threshold) {
            report.link_activated.insert(cell);
        } else {
            report.to_remove.insert(cell);
        }
    }
    report
}

/// Sorts every cell of `active ∪ pattern` into the four binding cases.
/// Hierarchy-only cells are link activated when their mean link weight from
/// the active ensemble reaches `link_threshold`, using the same admission rule
/// as classifier retrieval.
pub fn bind_report(
    ensemble: &EnsembleState,
    hierarchy: &HierarchyPattern,
    link_threshold: f64,
) -> Result<BindingReport> {
    check_hierarchy(ensemble, hierarchy)?;
    if !(0.0..=1.0).contains(&link_threshold) {
        return Err(BindingError::Threshold(link_threshold));
    }
    Ok(report_for(
        &ensemble.active,
        &ensemble.links,
        &hierarchy.0,
        link_threshold,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub active: GridImage,
    pub report: BindingReport,
    /// Number of reconciliation passes, including the final unchanged one.
    pub iterations: usize,
    pub stable: bool,
}

/// Repeatedly reconciles and absorbs link-activated cells into the ensemble
/// until the active set stops changing or `max_iter` passes have run.
pub fn resonate(
    ensemble: &EnsembleState,
    hierarchy: &HierarchyPattern,
    link_threshold: f64,
    max_iter: usize,
) -> Result<Resonance> {
    if max_iter == 0 {
        return Err(BindingError::ZeroIterations);
    }
    let mut active = ensemble.active.clone();
    let mut report = bind_report(ensemble, hierarchy, link_threshold)?;
    let mut iterations = 1;
    while !report.link_activated.is_empty() && iterations < max_iter {
        for &cell in &report.link_activated {
            active
                .activate(cell)
                .expect("pattern cells lie in the grid");
        }
        report = report_for(&active, &ensemble.links, &hierarchy.0, link_threshold);
        iterations += 1;
    }
    let stable = report.link_activated.is_empty();
    Ok(Resonance {
        active,
        report,
        iterations,
        stable,
    })
}

/// Scores a classifier's retrieval twice: as is, and with the cells that
/// binding marks as error removed. The retrieval is the hierarchy pattern,
/// the query is the ensemble activation and the classifier supplies the links.
pub fn error_filtered_score(
    classifier: &CooccurrenceClassifier,
    image: &GridImage,
    retrieval_threshold: f64,
    link_threshold: f64,
) -> Result<(Score, Score)> {
    if !(0.0..=1.0).contains(&link_threshold) {
        return Err(BindingError::Threshold(link_threshold));
    }
    let retrieved = classifier.retrieve(image, retrieval_threshold)?;
    let pattern = GridImage::new(image.width(), image.height(), retrieved.iter().copied())
        .expect("retrieved cells lie in the grid");
    let report = report_for(image, classifier, &pattern, link_threshold);
    let filtered: BTreeSet<CellIndex> = retrieved.difference(&report.to_remove).copied().collect();
    Ok((
        success_score(&retrieved, image),
        success_score(&filtered, image),
    ))
}
