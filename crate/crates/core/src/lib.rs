//! Associative pattern models on binary grids.
//!
//! - [`classifier`] and [`score`]: a full-linking co-occurrence classifier,
//!   its retrieval rule and the in/out success score used for classifier
//!   competition.
//! - [`dataset`]: text grid and graymap ingestion, binarization, rescaling,
//!   dataset manifests and the train-then-recognise evaluation harness.
//! - [`behaviour`]: behaviour metric equations, the memory-based prediction
//!   with its feedback simulator.
//! - [`binding`]: ensemble/hierarchy reconciliation and resonance.
//! - [`concept`]: concept cross-referencing and binding resolution.

pub mod behaviour;
pub mod binding;
pub mod classifier;
pub mod concept;
pub mod dataset;
pub mod exec;
pub mod grid;
pub mod score;

pub use classifier::{CooccurrenceClassifier, DEFAULT_THRESHOLD};
pub use exec::Exec;
pub use grid::{CellIndex, GridImage};
pub use score::{classify, classify_with, success_score, Ranked, Ratio, Score};
