//! Success score and classifier competition.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::classifier::{ClassifierError, CooccurrenceClassifier, Result};
use crate::exec::Exec;
use crate::grid::{CellIndex, GridImage};

/// In/out ratio of a retrieval. `Infinite` means nothing was retrieved
/// outside the input and outranks every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub fn is_infinite(self) -> bool {
        matches!(self, Ratio::Infinite)
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Ratio::Finite(v) => v,
            Ratio::Infinite => f64::INFINITY,
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ratio::Infinite, Ratio::Infinite) => Ordering::Equal,
            (Ratio::Infinite, _) => Ordering::Greater,
            (_, Ratio::Infinite) => Ordering::Less,
            (Ratio::Finite(a), Ratio::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v:.6}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub in_count: usize,
    pub out_count: usize,
    pub ratio: Ratio,
}

impl Score {
    pub fn from_counts(in_count: usize, out_count: usize) -> Self {
        let ratio = match (in_count, out_count) {
            (0, 0) => Ratio::Finite(0.0),
            (_, 0) => Ratio::Infinite,
            (i, o) => Ratio::Finite(i as f64 / o as f64),
        };
        Self {
            in_count,
            out_count,
            ratio,
        }
    }

    /// Ranking order: higher ratio first, then larger `in_count`.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .ratio
            .total_cmp(&self.ratio)
            .then(other.in_count.cmp(&self.in_count))
    }
}

/// Scores a retrieved set against the input image: cells inside the input
/// over cells outside it.
pub fn success_score(retrieved: &BTreeSet<CellIndex>, image: &GridImage) -> Score {
    let in_count = retrieved.iter().filter(|c| image.is_active(**c)).count();
    Score::from_counts(in_count, retrieved.len() - in_count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub label: String,
    pub score: Score,
}

/// Scores the image against every classifier in the bank and ranks labels,
/// best first. Ties fall back to `in_count`, then label order.
pub fn classify(
    bank: &[CooccurrenceClassifier],
    image: &GridImage,
    threshold: f64,
) -> Result<Vec<Ranked>> {
    classify_with(bank, image, threshold, Exec::default())
}

pub fn classify_with(
    bank: &[CooccurrenceClassifier],
    image: &GridImage,
    threshold: f64,
    exec: Exec,
) -> Result<Vec<Ranked>> {
    if bank.is_empty() {
        return Err(ClassifierError::EmptyBank);
    }
    let mut ranked = exec.try_map(bank, |cls| {
        let retrieved = cls.retrieve(image, threshold)?;
        Ok::<_, ClassifierError>(Ranked {
            label: cls.label().to_string(),
            score: success_score(&retrieved, image),
        })
    })?;
    ranked.sort_by(|a, b| {
        a.score
            .rank_cmp(&b.score)
            .then_with(|| a.label.cmp(&b.label))
    });
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(labels: &[&str]) -> BTreeSet<CellIndex> {
        labels
            .iter()
            .map(|l| CellIndex::from_label(l).unwrap())
            .collect()
    }

    #[test]
    fn score_cases() {
        let input = GridImage::from_labels(3, 3, &["A1", "A2"]).unwrap();
        let s = success_score(&cells(&["A1", "A2", "B1", "C1"]), &input);
        assert_eq!((s.in_count, s.out_count), (2, 2));
        assert_eq!(s.ratio, Ratio::Finite(1.0));

        let empty = success_score(&BTreeSet::new(), &input);
        assert_eq!(empty.ratio, Ratio::Finite(0.0));

        let perfect = success_score(&cells(&["A1", "A2"]), &input);
        assert_eq!(perfect.ratio, Ratio::Infinite);

        let outside = success_score(&cells(&["C3"]), &input);
        assert_eq!(outside.ratio, Ratio::Finite(0.0));
        assert_eq!(outside.out_count, 1);
    }

    #[test]
    fn ranking_order() {
        let inf_small = Score::from_counts(1, 0);
        let inf_big = Score::from_counts(5, 0);
        let two = Score::from_counts(4, 2);
        let mut scores = [two, inf_small, inf_big];
        scores.sort_by(|a, b| a.rank_cmp(b));
        assert_eq!(scores, [inf_big, inf_small, two]);
    }

    #[test]
    fn empty_bank_rejected() {
        let img = GridImage::from_labels(2, 2, &["A1"]).unwrap();
        assert_eq!(classify(&[], &img, 0.2), Err(ClassifierError::EmptyBank));
    }

    #[test]
    fn single_classifier_always_wins() {
        let mut cls = CooccurrenceClassifier::new("only", 3, 3).unwrap();
        cls.train(&GridImage::from_labels(3, 3, &["A1", "B1"]).unwrap())
            .unwrap();
        let q = GridImage::from_labels(3, 3, &["C3"]).unwrap();
        let r = classify(&[cls], &q, 0.2).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].label, "only");
    }

    #[test]
    fn self_match_beats_spill() {
        let x = GridImage::from_labels(3, 3, &["A1", "B1", "C1"]).unwrap();
        let mut own = CooccurrenceClassifier::new("own", 3, 3).unwrap();
        own.train(&x).unwrap();
        let mut other = CooccurrenceClassifier::new("a-other", 3, 3).unwrap();
        other
            .train(&GridImage::from_labels(3, 3, &["A1", "B1", "C1", "B2"]).unwrap())
            .unwrap();
        let r = classify(&[other, own], &x, 0.5).unwrap();
        assert_eq!(r[0].label, "own");
        assert!(r[0].score.ratio.is_infinite());
        assert!(!r[1].score.ratio.is_infinite());
    }

    #[test]
    fn ties_break_by_label() {
        let x = GridImage::from_labels(3, 3, &["A1", "B1"]).unwrap();
        let mut b = CooccurrenceClassifier::new("b", 3, 3).unwrap();
        b.train(&x).unwrap();
        let a = CooccurrenceClassifier::from_text(&b.to_text().replacen('b', "a", 1)).unwrap();
        let r = classify(&[b, a], &x, 0.5).unwrap();
        assert_eq!(r[0].label, "a");
        assert_eq!(r[1].label, "b");
    }
}
