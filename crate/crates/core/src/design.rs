//! Block designs, resolutions into parallel classes, and cross
//! intersection profiles.
//!
//! Point labels are arbitrary strings externally and dense 0-based
//! indices internally; serialization preserves labels. Blocks are kept
//! as sorted index lists. A block's identity is its (class, position)
//! slot, so duplicate block contents across classes are fine.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, GeneratorMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("design has no points")]
    NoPoints,
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("block {block} references unknown point {label:?}")]
    UnknownPoint { block: usize, label: String },
    #[error("duplicate point label {0:?}")]
    DuplicatePoint(String),
    #[error("grid side must be at least 2, got {0}")]
    GridTooSmall(usize),
    #[error("blocks in class {class} are not pairwise disjoint")]
    ClassNotDisjoint { class: usize },
    #[error("blocks in class {class} do not cover the point set")]
    ClassNotCovering { class: usize },
    #[error("resolution needs at least 2 parallel classes, got {0}")]
    TooFewClasses(usize),
    #[error("blocks have unequal sizes ({0} vs {1})")]
    UnequalBlockSizes(usize, usize),
    #[error("block size {k} does not divide the point count {v}")]
    BlockSizeNotDividing { k: usize, v: usize },
    #[error("block count {b} cannot split into classes of {per_class} blocks")]
    BlockCountMismatch { b: usize, per_class: usize },
    #[error("no resolution exists for this design with block size {0}")]
    NoResolution(usize),
    #[error("code coordinate {0} is identically zero; its blocks would degenerate")]
    DegenerateCoordinate(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point set with a multiset of nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    points: Vec<String>,
    blocks: Vec<Vec<usize>>,
}

impl Design {
    pub fn new(
        points: Vec<String>,
        blocks_by_label: Vec<Vec<String>>,
    ) -> Result<Self, DesignError> {
        if points.is_empty() {
            return Err(DesignError::NoPoints);
        }
        let mut index = std::collections::HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(DesignError::DuplicatePoint(p.clone()));
            }
        }
        let mut blocks = Vec::with_capacity(blocks_by_label.len());
        for (bi, block) in blocks_by_label.iter().enumerate() {
            if block.is_empty() {
                return Err(DesignError::EmptyBlock(bi));
            }
            let mut ids = Vec::with_capacity(block.len());
            for label in block {
                let &id = index.get(label).ok_or_else(|| DesignError::UnknownPoint {
                    block: bi,
                    label: label.clone(),
                })?;
                ids.push(id);
            }
            ids.sort_unstable();
            ids.dedup();
            blocks.push(ids);
        }
        Ok(Design { points, blocks })
    }

    fn from_indices(points: Vec<String>, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        Design { points, blocks }
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    /// `v`, the number of points.
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// `b`, the number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block contents as sorted point indices.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Display label for a block: point labels joined in point order.
    pub fn block_label(&self, i: usize) -> String {
        join_labels(&self.points, &self.blocks[i])
    }
}

pub(crate) fn join_labels(points: &[String], ids: &[usize]) -> String {
    if ids.iter().all(|&p| points[p].chars().count() == 1) {
        ids.iter().map(|&p| points[p].as_str()).collect()
    } else {
        ids.iter().map(|&p| points[p].as_str()).join(",")
    }
}

/// A design together with a partition of its blocks into parallel classes.
///
/// JSON form: `{"points": [...], "classes": [[[point, ...], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ResolutionJson", into = "ResolutionJson")]
pub struct Resolution {
    design: Design,
    classes: Vec<Vec<usize>>,
    block_size: usize,
    // class -> point -> index of the class block containing the point
    membership: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ResolutionJson {
    points: Vec<String>,
    classes: Vec<Vec<Vec<String>>>,
}

impl TryFrom<ResolutionJson> for Resolution {
    type Error = DesignError;
    fn try_from(j: ResolutionJson) -> Result<Self, DesignError> {
        Resolution::from_classes(j.points, j.classes)
    }
}

impl From<Resolution> for ResolutionJson {
    fn from(r: Resolution) -> Self {
        let points = r.design.points.clone();
        let classes = r
            .classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&b| {
                        r.design.blocks[b]
                            .iter()
                            .map(|&p| points[p].clone())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ResolutionJson { points, classes }
    }
}

impl Resolution {
    /// Builds a resolution from per-class block label lists, validating that
    /// each class partitions the point set and block sizes are uniform.
    pub fn from_classes(
        points: Vec<String>,
        classes: Vec<Vec<Vec<String>>>,
    ) -> Result<Self, DesignError> {
        let blocks: Vec<Vec<String>> = classes.iter().flatten().cloned().collect();
        let design = Design::new(points, blocks)?;
        let mut index_classes = Vec::with_capacity(classes.len());
        let mut next = 0usize;
        for class in &classes {
            let ids: Vec<usize> = (next..next + class.len()).collect();
            next += class.len();
            index_classes.push(ids);
        }
        Self::assemble(design, index_classes)
    }

    fn assemble(design: Design, classes: Vec<Vec<usize>>) -> Result<Self, DesignError> {
        if classes.is_empty() {
            return Err(DesignError::TooFewClasses(0));
        }
        let v = design.num_points();
        let block_size = design.blocks.first().map(|b| b.len()).unwrap_or(0);
        for b in &design.blocks {
            if b.len() != block_size {
                return Err(DesignError::UnequalBlockSizes(block_size, b.len()));
            }
        }
        if block_size == 0 || !v.is_multiple_of(block_size) {
            return Err(DesignError::BlockSizeNotDividing { k: block_size, v });
        }
        let per_class = v / block_size;
        let mut membership = Vec::with_capacity(classes.len());
        for (ci, class) in classes.iter().enumerate() {
            if class.len() != per_class {
                return Err(DesignError::BlockCountMismatch {
                    b: design.num_blocks(),
                    per_class,
                });
            }
            let mut owner = vec![usize::MAX; v];
            for (pos, &b) in class.iter().enumerate() {
                for &p in &design.blocks[b] {
                    if owner[p] != usize::MAX {
                        return Err(DesignError::ClassNotDisjoint { class: ci + 1 });
                    }
                    owner[p] = pos;
                }
            }
            if owner.contains(&usize::MAX) {
                return Err(DesignError::ClassNotCovering { class: ci + 1 });
            }
            membership.push(owner);
        }
        Ok(Resolution {
            design,
            classes,
            block_size,
            membership,
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    /// `r`, the number of parallel classes.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// `k`, the common block size.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_points(&self) -> usize {
        self.design.num_points()
    }

    pub fn num_blocks(&self) -> usize {
        self.design.num_blocks()
    }

    /// Blocks per class, `v / k`.
    pub fn blocks_per_class(&self) -> usize {
        self.num_points() / self.block_size
    }

    /// Block indices of class `j` (0-based).
    pub fn class(&self, j: usize) -> &[usize] {
        &self.classes[j]
    }

    /// Global block index of the block of class `j` containing `point`.
    pub fn block_of(&self, class: usize, point: usize) -> usize {
        self.classes[class][self.membership[class][point]]
    }

    /// All block indices in column order: class 0 blocks first, then class 1, ...
    pub fn block_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes.iter().flatten().copied()
    }

    /// Class of a global block index.
    pub fn class_of_block(&self, block: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&block))
            .expect("block index came from this resolution")
    }

    /// Exhaustive cross intersection profile over all tuple sizes `2..=r`.
    pub fn cross_profile(&self) -> Result<CrossProfile, DesignError> {
        let r = self.num_classes();
        if r < 2 {
            return Err(DesignError::TooFewClasses(r));
        }
        let mut mu = std::collections::BTreeMap::new();
        for i in 2..=r {
            if let Some(value) = self.cross_number(i) {
                mu.insert(i, value);
            }
        }
        let crn = mu.keys().next_back().copied();
        Ok(CrossProfile {
            is_crd: !mu.is_empty(),
            is_mcrd: crn == Some(r),
            mu,
            crn,
        })
    }

    /// The i-th cross intersection number, if every choice of one block from
    /// each of `i` distinct classes meets in the same nonzero count.
    fn cross_number(&self, i: usize) -> Option<usize> {
        let mut common: Option<usize> = None;
        for combo in (0..self.num_classes()).combinations(i) {
            let choices = combo.iter().map(|&c| self.classes[c].iter().copied());
            for tuple in choices.multi_cartesian_product() {
                let mut acc: Vec<usize> = self.design.blocks[tuple[0]].clone();
                for &b in &tuple[1..] {
                    acc.retain(|p| self.design.blocks[b].binary_search(p).is_ok());
                    if acc.is_empty() {
                        break;
                    }
                }
                let size = acc.len();
                if size == 0 {
                    return None;
                }
                match common {
                    None => common = Some(size),
                    Some(c) if c != size => return None,
                    _ => {}
                }
            }
        }
        common
    }
}

/// Cross intersection numbers and the derived CRD/MCRD classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossProfile {
    /// `i -> mu_i` for each tuple size where the number exists.
    pub mu: std::collections::BTreeMap<usize, usize>,
    /// Largest `i` with `mu_i` defined (the cross resolution number).
    pub crn: Option<usize>,
    pub is_crd: bool,
    pub is_mcrd: bool,
}

impl CrossProfile {
    pub fn mu2(&self) -> Option<usize> {
        self.mu.get(&2).copied()
    }
}

impl fmt::Display for CrossProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mu.is_empty() {
            return write!(f, "not cross resolvable");
        }
        let parts: Vec<String> = self.mu.iter().map(|(i, m)| format!("mu_{i}={m}")).collect();
        write!(f, "{}", parts.join(", "))?;
        if self.is_mcrd {
            write!(f, " (maximal)")?;
        }
        Ok(())
    }
}

/// The two-class design on `[n^2]` whose classes are the rows and columns of
/// the `n x n` grid. Always has `mu_2 = 1`.
pub fn grid_mcrd(n: usize) -> Result<Resolution, DesignError> {
    if n < 2 {
        return Err(DesignError::GridTooSmall(n));
    }
    let points: Vec<String> = (1..=n * n).map(|p| p.to_string()).collect();
    let rows: Vec<Vec<usize>> = (0..n).map(|i| (i * n..(i + 1) * n).collect()).collect();
    let cols: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..n).map(|i| i * n + j).collect())
        .collect();
    let blocks: Vec<Vec<usize>> = rows.into_iter().chain(cols).collect();
    let design = Design::from_indices(points, blocks);
    let classes = vec![(0..n).collect(), (n..2 * n).collect()];
    Resolution::assemble(design, classes)
}

/// The resolvable design of a full-rank `(n, k)` code over GF(q): points are
/// codeword indices `0..q^k`, and class `i` groups them by the value of
/// coordinate `i`, one block per field value in ascending order.
pub fn design_from_code(g: &GeneratorMatrix) -> Result<Resolution, DesignError> {
    let words = g.enumerate_codewords()?;
    let q = g.q() as usize;
    let n = g.code_len();
    // A coordinate where every generator row is zero would put all points in
    // one block and none in the others.
    for coord in 0..n {
        if words.iter().all(|w| w[coord] == 0) {
            return Err(DesignError::DegenerateCoordinate(coord + 1));
        }
    }
    let points: Vec<String> = (0..words.len()).map(|i| i.to_string()).collect();
    let mut blocks = Vec::with_capacity(n * q);
    let mut classes = Vec::with_capacity(n);
    for coord in 0..n {
        let mut class = Vec::with_capacity(q);
        for value in 0..q as u64 {
            class.push(blocks.len());
            blocks.push(
                words
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w[coord] == value)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        classes.push(class);
    }
    let design = Design::from_indices(points, blocks);
    Resolution::assemble(design, classes)
}

/// Partitions a uniform-block-size design into parallel classes by exact-cover
/// backtracking, or reports that none exists. Deterministic: each class is
/// seeded with the smallest unused block index and completed by always
/// covering the smallest uncovered point with the lowest-indexed block.
pub fn find_resolution(design: &Design, k: usize) -> Result<Resolution, DesignError> {
    let v = design.num_points();
    for b in design.blocks() {
        if b.len() != k {
            return Err(DesignError::UnequalBlockSizes(k, b.len()));
        }
    }
    if k == 0 || !v.is_multiple_of(k) {
        return Err(DesignError::BlockSizeNotDividing { k, v });
    }
    let per_class = v / k;
    if !design.num_blocks().is_multiple_of(per_class) {
        return Err(DesignError::NoResolution(k));
    }

    let mut used = vec![false; design.num_blocks()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    if !assign_classes(design, &mut used, &mut classes) {
        return Err(DesignError::NoResolution(k));
    }
    Resolution::assemble(design.clone(), classes)
}

fn assign_classes(design: &Design, used: &mut [bool], classes: &mut Vec<Vec<usize>>) -> bool {
    let Some(seed) = used.iter().position(|&u| !u) else {
        return true; // all blocks placed
    };
    let mut covered: BTreeSet<usize> = design.block(seed).iter().copied().collect();
    let mut class = vec![seed];
    used[seed] = true;
    if complete_class(design, used, &mut covered, &mut class, classes) {
        return true;
    }
    used[seed] = false;
    false
}

fn complete_class(
    design: &Design,
    used: &mut [bool],
    covered: &mut BTreeSet<usize>,
    class: &mut Vec<usize>,
    classes: &mut Vec<Vec<usize>>,
) -> bool {
    if covered.len() == design.num_points() {
        classes.push(class.clone());
        if assign_classes(design, used, classes) {
            return true;
        }
        classes.pop();
        return false;
    }
    let target = (0..design.num_points())
        .find(|p| !covered.contains(p))
        .expect("some point is uncovered");
    for b in 0..design.num_blocks() {
        if used[b] || !design.block(b).contains(&target) {
            continue;
        }
        if design.block(b).iter().any(|p| covered.contains(p)) {
            continue;
        }
        used[b] = true;
        covered.extend(design.block(b).iter().copied());
        class.push(b);
        if complete_class(design, used, covered, class, classes) {
            return true;
        }
        class.pop();
        for p in design.block(b) {
            covered.remove(p);
        }
        used[b] = false;
    }
    false
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .copied()
        .filter(|p| b.binary_search(p).is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GeneratorMatrix;

    fn labels(r: &Resolution, class: usize) -> Vec<String> {
        r.class(class)
            .iter()
            .map(|&b| r.design().block_label(b))
            .collect()
    }

    #[test]
    fn grid_two_matches_expected_classes() {
        let g = grid_mcrd(2).unwrap();
        assert_eq!(labels(&g, 0), vec!["12", "34"]);
        assert_eq!(labels(&g, 1), vec!["13", "24"]);
        assert_eq!(g.num_blocks(), 4);
        assert!(g.design().blocks().iter().all(|b| b.len() == 2));
    }

    #[test]
    fn grid_three_matches_expected_classes() {
        let g = grid_mcrd(3).unwrap();
        assert_eq!(labels(&g, 0), vec!["123", "456", "789"]);
        assert_eq!(labels(&g, 1), vec!["147", "258", "369"]);
    }

    #[test]
    fn grid_rejects_small_sides() {
        assert_eq!(grid_mcrd(1).unwrap_err(), DesignError::GridTooSmall(1));
        assert_eq!(grid_mcrd(0).unwrap_err(), DesignError::GridTooSmall(0));
    }

    #[test]
    fn grid_profile_is_maximal_with_mu2_one() {
        for n in 2..=10 {
            let profile = grid_mcrd(n).unwrap().cross_profile().unwrap();
            assert_eq!(profile.mu2(), Some(1), "n={n}");
            assert!(profile.is_mcrd, "n={n}");
        }
    }

    #[test]
    fn code_design_reproduces_known_classes() {
        let g = GeneratorMatrix::new(3, vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap();
        let res = design_from_code(&g).unwrap();
        assert_eq!(res.num_classes(), 4);
        assert_eq!(labels(&res, 0), vec!["012", "345", "678"]);
        assert_eq!(labels(&res, 1), vec!["036", "147", "258"]);
        assert_eq!(labels(&res, 2), vec!["057", "138", "246"]);
        assert_eq!(labels(&res, 3), vec!["048", "237", "156"]);
        let profile = res.cross_profile().unwrap();
        assert_eq!(profile.mu2(), Some(1));
        assert!(profile.is_crd);
    }

    #[test]
    fn code_design_classes_partition_points() {
        // Random full-rank matrices over small fields; every class must
        // partition the point set into blocks of size q^(k-1).
        let mut lcg = 0x9E3779B97F4A7C15u64;
        let mut next = move |m: u64| {
            lcg = lcg
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (lcg >> 33) % m
        };
        for q in [2u64, 3, 5] {
            for k in 1..=2usize {
                for n in k.max(2)..=5usize {
                    let mut found = 0;
                    let mut tries = 0;
                    while found < 2 && tries < 100 {
                        tries += 1;
                        let rows: Vec<Vec<u64>> =
                            (0..k).map(|_| (0..n).map(|_| next(q)).collect()).collect();
                        let zero_column = (0..n).any(|c| rows.iter().all(|r| r[c] == 0));
                        let Ok(g) = GeneratorMatrix::new(q, rows) else {
                            continue;
                        };
                        if zero_column {
                            assert!(matches!(
                                design_from_code(&g),
                                Err(DesignError::DegenerateCoordinate(_))
                            ));
                            continue;
                        }
                        found += 1;
                        let res = design_from_code(&g).unwrap();
                        assert_eq!(res.num_classes(), n);
                        let expected = (q as usize).pow(k as u32 - 1);
                        assert!(res.design().blocks().iter().all(|b| b.len() == expected));
                    }
                }
            }
        }
    }

    fn three_class_pairs() -> Resolution {
        Resolution::from_classes(
            (1..=4).map(|p| p.to_string()).collect(),
            vec![
                vec![vec!["1".into(), "2".into()], vec!["3".into(), "4".into()]],
                vec![vec!["1".into(), "3".into()], vec!["2".into(), "4".into()]],
                vec![vec!["1".into(), "4".into()], vec!["2".into(), "3".into()]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn pair_design_is_crd_but_not_maximal() {
        let profile = three_class_pairs().cross_profile().unwrap();
        assert_eq!(profile.mu2(), Some(1));
        assert!(profile.is_crd);
        assert!(!profile.is_mcrd);
        assert_eq!(profile.crn, Some(2));
    }

    #[test]
    fn six_point_design_is_not_crd() {
        let res = Resolution::from_classes(
            (1..=6).map(|p| p.to_string()).collect(),
            vec![
                vec![
                    vec!["1".into(), "2".into()],
                    vec!["3".into(), "4".into()],
                    vec!["5".into(), "6".into()],
                ],
                vec![
                    vec!["1".into(), "3".into()],
                    vec!["2".into(), "5".into()],
                    vec!["4".into(), "6".into()],
                ],
                vec![
                    vec!["1".into(), "4".into()],
                    vec!["2".into(), "6".into()],
                    vec!["3".into(), "5".into()],
                ],
            ],
        )
        .unwrap();
        let profile = res.cross_profile().unwrap();
        assert_eq!(profile.mu2(), None);
        assert!(!profile.is_crd);
        assert_eq!(profile.crn, None);
    }

    fn design_on_four(blocks: &[&str]) -> Design {
        let points: Vec<String> = (1..=4).map(|p| p.to_string()).collect();
        let blocks = blocks
            .iter()
            .map(|b| b.chars().map(|c| c.to_string()).collect())
            .collect();
        Design::new(points, blocks).unwrap()
    }

    #[test]
    fn resolves_all_pairs_on_four_points() {
        let d = design_on_four(&["12", "13", "14", "23", "24", "34"]);
        let res = find_resolution(&d, 2).unwrap();
        assert_eq!(res.num_classes(), 3);
        assert_eq!(labels(&res, 0), vec!["12", "34"]);
        assert_eq!(labels(&res, 1), vec!["13", "24"]);
        assert_eq!(labels(&res, 2), vec!["14", "23"]);
    }

    #[test]
    fn no_resolution_for_partial_cover() {
        let d = design_on_four(&["12", "13"]);
        assert_eq!(
            find_resolution(&d, 2).unwrap_err(),
            DesignError::NoResolution(2)
        );
    }

    #[test]
    fn single_class_design_returned_unchanged() {
        let d = design_on_four(&["12", "34"]);
        let res = find_resolution(&d, 2).unwrap();
        assert_eq!(res.num_classes(), 1);
        assert_eq!(labels(&res, 0), vec!["12", "34"]);
        // Cross profiles still need at least two classes.
        assert_eq!(
            res.cross_profile().unwrap_err(),
            DesignError::TooFewClasses(1)
        );
    }

    #[test]
    fn grid_blocks_reflatten_into_a_resolution() {
        for n in 2..=5 {
            let grid = grid_mcrd(n).unwrap();
            let blocks: Vec<Vec<String>> = grid
                .design()
                .blocks()
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|&p| grid.design().points()[p].clone())
                        .collect()
                })
                .collect();
            let d = Design::new(grid.design().points().to_vec(), blocks).unwrap();
            let res = find_resolution(&d, n).unwrap();
            assert_eq!(res.num_classes(), 2);
            assert_eq!(res.cross_profile().unwrap().mu2(), Some(1));
        }
    }

    #[test]
    fn resolution_json_round_trip() {
        let g = grid_mcrd(3).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        let back: Resolution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_overlapping_class() {
        let err = Resolution::from_classes(
            (1..=4).map(|p| p.to_string()).collect(),
            vec![
                vec![vec!["1".into(), "2".into()], vec!["2".into(), "3".into()]],
                vec![vec!["1".into(), "3".into()], vec!["2".into(), "4".into()]],
            ],
        )
        .unwrap_err();
        assert_eq!(err, DesignError::ClassNotDisjoint { class: 1 });
    }
}
