//! Concept cross-referencing at one or two levels of depth.
//!
//! Concepts that are sensed together learn a cross-reference. When a set of
//! concepts is active, those joined by strong enough cross-references close a
//! circuit and bind into one group, so co-active features never pair up across
//! groups that were never learned together.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConceptError {
    #[error("need at least 2 distinct concepts to cross-reference, got {0}")]
    TooFewConcepts(usize),

    #[error("invalid concept name {0:?}")]
    BadName(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, ConceptError>;

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(ConceptError::BadName(name.to_string()));
    }
    Ok(())
}

/// Registered concepts and pairwise cross-reference counts. Pair keys are
/// stored with the smaller name first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptBase {
    concepts: BTreeSet<String>,
    cross_refs: BTreeMap<(String, String), u64>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// A set of at least two concepts joined into one circuit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoundGroup {
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub groups: Vec<BoundGroup>,
    pub unbound: BTreeSet<String>,
}

impl Resolution {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.groups {
            let members: Vec<&str> = g.members.iter().map(String::as_str).collect();
            let _ = writeln!(out, "group {}", members.join(" "));
        }
        for u in &self.unbound {
            let _ = writeln!(out, "unbound {u}");
        }
        out
    }
}

impl ConceptBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn count(&self, a: &str, b: &str) -> u64 {
        self.cross_refs.get(&key(a, b)).copied().unwrap_or(0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.cross_refs
            .iter()
            .map(|((a, b), &n)| (a.as_str(), b.as_str(), n))
    }

    /// Records one co-occurrence session: each pair of distinct active
    /// concepts gains a count. New concepts are registered on sight.
    pub fn learn_occurrence<S: AsRef<str>>(&mut self, active: &[S]) -> Result<()> {
        let distinct: BTreeSet<&str> = active.iter().map(AsRef::as_ref).collect();
        for name in &distinct {
            check_name(name)?;
        }
        if distinct.len() < 2 {
            return Err(ConceptError::TooFewConcepts(distinct.len()));
        }
        let names: Vec<&str> = distinct.into_iter().collect();
        for (i, a) in names.iter().enumerate() {
            self.concepts.insert(a.to_string());
            for b in &names[i + 1..] {
                *self.cross_refs.entry(key(a, b)).or_insert(0) += 1;
            }
        }
        Ok(())
    }

    /// Groups active concepts into circuits: connected components of the
    /// graph whose edges are cross-references of at least `min_count`.
    /// Unregistered or unconnected concepts come back unbound.
    pub fn resolve_bindings<S: AsRef<str>>(&self, active: &[S], min_count: u64) -> Resolution {
        let names: Vec<&str> = active
            .iter()
            .map(AsRef::as_ref)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut sets = UnionFind::<usize>::new(names.len());
        let mut linked = vec![false; names.len()];
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                if self.count(names[i], names[j]) >= min_count.max(1) {
                    sets.union(i, j);
                    linked[i] = true;
                    linked[j] = true;
                }
            }
        }
        let mut components: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        let mut unbound = BTreeSet::new();
        for (i, name) in names.iter().enumerate() {
            if linked[i] {
                components
                    .entry(sets.find(i))
                    .or_default()
                    .insert(name.to_string());
            } else {
                unbound.insert(name.to_string());
            }
        }
        let mut groups: Vec<BoundGroup> = components
            .into_values()
            .map(|members| BoundGroup { members })
            .collect();
        groups.sort();
        Resolution { groups, unbound }
    }

    /// `pair <a> <b> <count>` lines in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (a, b, n) in self.pairs() {
            let _ = writeln!(out, "pair {a} {b} {n}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut base = Self::new();
        let mut last: Option<(String, String)> = None;
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| ConceptError::Parse {
                line: i + 1,
                message,
            };
            let words: Vec<&str> = line.split(' ').collect();
            if words.len() != 4 || words[0] != "pair" {
                return Err(err("expected `pair <a> <b> <count>`".into()));
            }
            let (a, b) = (words[1], words[2]);
            check_name(a)
                .and(check_name(b))
                .map_err(|e| err(e.to_string()))?;
            if a >= b {
                return Err(err(format!(
                    "pair names must be distinct and ordered: {a} {b}"
                )));
            }
            let n: u64 = words[3].parse().ok().filter(|&n| n > 0).ok_or_else(|| {
                err(format!(
                    "count must be a positive integer, got {:?}",
                    words[3]
                ))
            })?;
            let k = key(a, b);
            if last.as_ref().is_some_and(|prev| *prev >= k) {
                return Err(err("pairs out of lexicographic order".into()));
            }
            last = Some(k.clone());
            base.concepts.insert(a.to_string());
            base.concepts.insert(b.to_string());
            base.cross_refs.insert(k, n);
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(names: &[&str]) -> BoundGroup {
        BoundGroup {
            members: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn learning_counts_pairs() {
        let mut base = ConceptBase::new();
        base.learn_occurrence(&["red", "circle"]).unwrap();
        assert_eq!(base.count("circle", "red"), 1);
        assert_eq!(base.count("red", "circle"), 1);
        base.learn_occurrence(&["blue", "square"]).unwrap();
        assert_eq!(base.count("blue", "square"), 1);
        assert_eq!(base.count("red", "square"), 0);
        assert_eq!(base.count("blue", "circle"), 0);

        let mut abc = ConceptBase::new();
        abc.learn_occurrence(&["a", "b", "c"]).unwrap();
        assert_eq!(abc.pairs().count(), 3);
        assert!(abc.pairs().all(|(_, _, n)| n == 1));
    }

    #[test]
    fn too_few_concepts() {
        let mut base = ConceptBase::new();
        assert_eq!(
            base.learn_occurrence(&["red"]),
            Err(ConceptError::TooFewConcepts(1))
        );
        assert_eq!(
            base.learn_occurrence(&["red", "red"]),
            Err(ConceptError::TooFewConcepts(1))
        );
        assert!(base.learn_occurrence(&["a b", "c"]).is_err());
        assert_eq!(base, ConceptBase::new());
    }

    #[test]
    fn red_circle_blue_square() {
        let mut base = ConceptBase::new();
        base.learn_occurrence(&["red", "circle"]).unwrap();
        base.learn_occurrence(&["blue", "square"]).unwrap();
        let r = base.resolve_bindings(&["red", "circle", "blue", "square"], 1);
        assert_eq!(
            r.groups,
            vec![group(&["blue", "square"]), group(&["circle", "red"])]
        );
        assert!(r.unbound.is_empty());
    }

    #[test]
    fn single_and_unknown_concepts_are_unbound() {
        let mut base = ConceptBase::new();
        base.learn_occurrence(&["red", "circle"]).unwrap();
        let r = base.resolve_bindings(&["red"], 1);
        assert!(r.groups.is_empty());
        assert_eq!(r.unbound.len(), 1);
        let r = base.resolve_bindings(&["red", "circle", "green"], 1);
        assert_eq!(r.groups, vec![group(&["circle", "red"])]);
        assert_eq!(r.unbound, ["green".to_string()].into_iter().collect());
    }

    #[test]
    fn min_count_prunes_edges() {
        let mut base = ConceptBase::new();
        base.learn_occurrence(&["a", "b"]).unwrap();
        base.learn_occurrence(&["a", "b"]).unwrap();
        base.learn_occurrence(&["b", "c"]).unwrap();
        assert_eq!(
            base.resolve_bindings(&["a", "b", "c"], 1).groups,
            vec![group(&["a", "b", "c"])]
        );
        let strict = base.resolve_bindings(&["a", "b", "c"], 2);
        assert_eq!(strict.groups, vec![group(&["a", "b"])]);
        assert_eq!(strict.unbound.len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let mut base = ConceptBase::new();
        base.learn_occurrence(&["red", "circle", "big"]).unwrap();
        base.learn_occurrence(&["red", "circle"]).unwrap();
        let text = base.to_text();
        assert_eq!(
            text,
            "pair big circle 1\npair big red 1\npair circle red 2\n"
        );
        let back = ConceptBase::from_text(&text).unwrap();
        assert_eq!(back, base);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn from_text_rejects_bad_lines() {
        for bad in [
            "pair a b\n",
            "pair b a 1\n",
            "pair a a 1\n",
            "pair a b 0\n",
            "link a b 1\n",
            "pair a c 1\npair a b 1\n",
        ] {
            assert!(ConceptBase::from_text(bad).is_err(), "{bad:?}");
        }
    }
}
