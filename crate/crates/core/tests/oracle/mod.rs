//! Independent brute-force reference computations shared by the test suites.
//!
//! Nothing here calls into the library's training, retrieval, scoring or
//! resolution code; every answer is recomputed from the raw training images
//! with exact integer arithmetic. Thresholds are rationals `k / q`.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cobind_core::{CellIndex, GridImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random image with at least `min_active` active cells.
pub fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize, min_active: usize) -> GridImage {
    let density: f64 = rng.gen_range(0.1..0.6);
    loop {
        let cells: Vec<CellIndex> = (0..h)
            .flat_map(|r| (0..w).map(move |c| CellIndex::new(r, c)))
            .filter(|_| rng.gen_bool(density))
            .collect();
        if cells.len() >= min_active {
            return GridImage::new(w, h, cells).unwrap();
        }
    }
}

/// Between 1 and `max_images` trainable images.
pub fn random_training_set(
    rng: &mut ChaCha8Rng,
    w: usize,
    h: usize,
    max_images: usize,
) -> Vec<GridImage> {
    let n = rng.gen_range(1..=max_images);
    (0..n).map(|_| random_image(rng, w, h, 2)).collect()
}

pub fn random_dims(rng: &mut ChaCha8Rng, max: usize) -> (usize, usize) {
    (rng.gen_range(2..=max), rng.gen_range(2..=max))
}

fn all_cells(w: usize, h: usize) -> Vec<CellIndex> {
    (0..h)
        .flat_map(|r| (0..w).map(move |c| CellIndex::new(r, c)))
        .collect()
}

/// Ordered-pair frequencies by a direct double loop over each image.
pub fn pair_counts(images: &[GridImage]) -> BTreeMap<(CellIndex, CellIndex), u32> {
    let mut counts = BTreeMap::new();
    for image in images {
        for &c in image.active() {
            for &d in image.active() {
                if c != d {
                    *counts.entry((c, d)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Number of training images where both `c` and `d` are active.
fn co_active(images: &[GridImage], c: CellIndex, d: CellIndex) -> u64 {
    images
        .iter()
        .filter(|i| i.is_active(c) && i.is_active(d))
        .count() as u64
}

/// Whether `d` is admitted from `sources`: positive link mass and mean
/// weight at least `k / q`.
fn admitted(
    images: &[GridImage],
    sources: &BTreeSet<CellIndex>,
    d: CellIndex,
    k: u64,
    q: u64,
) -> bool {
    if sources.is_empty() {
        return false;
    }
    let sum: u64 = sources.iter().map(|&c| co_active(images, c, d)).sum();
    let denom = sources.len() as u64 * images.len() as u64;
    sum > 0 && sum * q >= k * denom
}

pub fn retrieve(images: &[GridImage], query: &GridImage, k: u64, q: u64) -> BTreeSet<CellIndex> {
    let known: BTreeSet<CellIndex> = images
        .iter()
        .flat_map(|i| i.active().iter().copied())
        .collect();
    let sources = query.active().clone();
    all_cells(query.width(), query.height())
        .into_iter()
        .filter(|&d| {
            if sources.contains(&d) {
                known.contains(&d)
            } else {
                admitted(images, &sources, d, k, q)
            }
        })
        .collect()
}

pub fn in_out(retrieved: &BTreeSet<CellIndex>, query: &GridImage) -> (usize, usize) {
    let inside = retrieved.iter().filter(|c| query.is_active(**c)).count();
    (inside, retrieved.len() - inside)
}

/// Ranking order on `(in, out)` pairs: infinite ratio first, then larger
/// ratio by cross multiplication, then larger in-count.
pub fn rank(a: (usize, usize), b: (usize, usize)) -> Ordering {
    let inf = |(i, o): (usize, usize)| o == 0 && i > 0;
    let frac = |(i, o): (usize, usize)| if o == 0 { (0, 1) } else { (i, o) };
    match (inf(a), inf(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => b.0.cmp(&a.0),
        (false, false) => {
            let (ai, ao) = frac(a);
            let (bi, bo) = frac(b);
            (bi * ao).cmp(&(ai * bo)).then(b.0.cmp(&a.0))
        }
    }
}

/// Winning label by re-scoring each class from its raw training images.
pub fn winner(bank: &[(String, Vec<GridImage>)], query: &GridImage, k: u64, q: u64) -> String {
    let mut scored: Vec<(&str, (usize, usize))> = bank
        .iter()
        .map(|(label, images)| {
            (
                label.as_str(),
                in_out(&retrieve(images, query, k, q), query),
            )
        })
        .collect();
    scored.sort_by(|a, b| rank(a.1, b.1).then(a.0.cmp(b.0)));
    scored[0].0.to_string()
}

/// Fixed point of repeatedly adding every pattern cell admitted by the
/// current active set. No cell is ever removed.
pub fn closure(
    images: &[GridImage],
    active: &BTreeSet<CellIndex>,
    pattern: &BTreeSet<CellIndex>,
    k: u64,
    q: u64,
) -> BTreeSet<CellIndex> {
    let mut current = active.clone();
    loop {
        let add: Vec<CellIndex> = pattern
            .difference(&current)
            .copied()
            .filter(|&d| admitted(images, &current, d, k, q))
            .collect();
        if add.is_empty() {
            return current;
        }
        current.extend(add);
    }
}

/// Pattern-only cells of a single reconciliation pass split into
/// `(link_activated, to_remove)`.
pub fn split_hierarchy_only(
    images: &[GridImage],
    active: &BTreeSet<CellIndex>,
    pattern: &BTreeSet<CellIndex>,
    k: u64,
    q: u64,
) -> (BTreeSet<CellIndex>, BTreeSet<CellIndex>) {
    pattern
        .difference(active)
        .copied()
        .partition(|&d| admitted(images, active, d, k, q))
}

/// Connected components of size at least two by breadth-first search over
/// the active concepts, plus the remaining unbound concepts.
pub fn components(
    counts: &BTreeMap<(String, String), u64>,
    active: &BTreeSet<String>,
    min_count: u64,
) -> (BTreeSet<BTreeSet<String>>, BTreeSet<String>) {
    let edge = |a: &String, b: &String| {
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        a != b && counts.get(&key).copied().unwrap_or(0) >= min_count.max(1)
    };
    let mut seen = BTreeSet::new();
    let mut groups = BTreeSet::new();
    let mut unbound = BTreeSet::new();
    for start in active {
        if seen.contains(start) {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start.clone());
        while let Some(node) = queue.pop_front() {
            for other in active {
                if !seen.contains(other) && edge(&node, other) {
                    seen.insert(other.clone());
                    queue.push_back(other.clone());
                }
            }
            component.insert(node);
        }
        if component.len() >= 2 {
            groups.insert(component);
        } else {
            unbound.extend(component);
        }
    }
    (groups, unbound)
}
