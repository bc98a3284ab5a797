//! The two array constructions over cross resolvable designs, plus the
//! general form for any design with `mu_2 = 1`.
//!
//! Each variant sits behind the [`Construction`] trait and is registered by
//! name, so front ends can pick one at runtime. All of them share the same
//! cell rule: walk from the cell's point `x` to the block of the successor
//! class containing `x`, and intersect it with the cell's block. With
//! `mu_2 = 1` that intersection is a single point.
//!
//! Row and column orders are pinned to the design's point order and
//! (class, block) order, so outputs are positionally reproducible, not just
//! equivalent up to permutation.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::design::{intersect, join_labels, DesignError, Resolution};
use crate::pda::{
    render_grid, validate_dpda, ArrayParams, Dpda, PdaArray, PdaError, Phi, SymbolicArray,
    SymbolicEntry, Violation,
};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("design is not cross resolvable with mu_2 = 1 ({0})")]
    NotMu2One(String),
    #[error("expected {expected}, found {found}")]
    WrongShape { expected: String, found: String },
    #[error("constructed array has parameters {found}, expected {expected}")]
    ParameterMismatch {
        expected: ArrayParams,
        found: ArrayParams,
    },
    #[error("constructed array failed validation: {}", format_violations(.0))]
    OutputInvalid(Vec<Violation>),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Array(#[from] PdaError),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Where a constructed array came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSummary {
    pub points: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub classes: usize,
    pub mu2: usize,
}

impl fmt::Display for SourceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "v={}, b={}, k={}, r={}, mu2={}",
            self.points, self.blocks, self.block_size, self.classes, self.mu2
        )
    }
}

/// A validated array plus its provenance and the pre-canonicalization
/// symbols, which render exactly like the source design's labels.
#[derive(Debug, Clone)]
pub struct ConstructedDpda {
    dpda: Dpda,
    construction: &'static str,
    source: SourceSummary,
    symbolic: Vec<Vec<String>>,
    col_separators: Vec<usize>,
    row_separators: Vec<usize>,
}

impl ConstructedDpda {
    pub fn dpda(&self) -> &Dpda {
        &self.dpda
    }

    pub fn array(&self) -> &PdaArray {
        self.dpda.array()
    }

    pub fn params(&self) -> ArrayParams {
        self.dpda.params()
    }

    pub fn construction(&self) -> &'static str {
        self.construction
    }

    pub fn source(&self) -> &SourceSummary {
        &self.source
    }

    /// Pre-canonicalization display symbol at (row, col), `"*"` for stars.
    pub fn symbolic_entry(&self, row: usize, col: usize) -> &str {
        &self.symbolic[row][col]
    }

    pub fn symbolic(&self) -> &[Vec<String>] {
        &self.symbolic
    }

    /// Figure-style rendering: labeled grid with class separators and the
    /// design's own symbols.
    pub fn render_text(&self) -> String {
        let array = self.array();
        let row_labels = array
            .row_labels()
            .map(<[String]>::to_vec)
            .unwrap_or_else(|| (1..=array.num_rows()).map(|r| r.to_string()).collect());
        let col_labels = array
            .col_labels()
            .map(<[String]>::to_vec)
            .unwrap_or_else(|| (1..=array.num_cols()).map(|c| c.to_string()).collect());
        let mut grid = render_grid(
            &row_labels,
            &col_labels,
            &self.symbolic,
            &self.col_separators,
        );
        if !self.row_separators.is_empty() {
            grid = insert_row_separators(&grid, &self.row_separators);
        }
        let params = self.params();
        format!(
            "({},{},{},{}) DPDA from construction {} ({})\n{}",
            params.k, params.f, params.z, params.s, self.construction, self.source, grid
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = self.dpda.to_json();
        let obj = value.as_object_mut().expect("array json is an object");
        obj.insert("construction".into(), self.construction.into());
        obj.insert(
            "source".into(),
            serde_json::to_value(&self.source).expect("source summary serializes"),
        );
        obj.insert(
            "symbolic".into(),
            serde_json::to_value(&self.symbolic).expect("symbol grid serializes"),
        );
        value
    }
}

fn insert_row_separators(grid: &str, separators: &[usize]) -> String {
    let lines: Vec<&str> = grid.lines().collect();
    let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        // Line 0 is the header; data row r sits at line r + 1.
        if i > 0 && separators.contains(&(i - 1)) {
            out.push_str(&"-".repeat(width));
            out.push('\n');
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// 0-based successor class: class `j` walks to class `(j + 1) mod r`.
fn successor(class: usize, num_classes: usize) -> usize {
    (class + 1) % num_classes
}

fn require_mu2_one(source: &Resolution) -> Result<SourceSummary, ConstructError> {
    let profile = source.cross_profile()?;
    match profile.mu2() {
        Some(1) => Ok(SourceSummary {
            points: source.num_points(),
            blocks: source.num_blocks(),
            block_size: source.block_size(),
            classes: source.num_classes(),
            mu2: 1,
        }),
        _ => Err(ConstructError::NotMu2One(profile.to_string())),
    }
}

fn require_two_class_square(source: &Resolution) -> Result<usize, ConstructError> {
    let n = source.block_size();
    let shape_ok =
        source.num_classes() == 2 && source.num_points() == n * n && source.num_blocks() == 2 * n;
    if !shape_ok {
        return Err(ConstructError::WrongShape {
            expected: "a 2-class design with n blocks of size n per class".into(),
            found: format!(
                "v={}, b={}, k={}, r={}",
                source.num_points(),
                source.num_blocks(),
                source.block_size(),
                source.num_classes()
            ),
        });
    }
    Ok(n)
}

fn check_params(
    dpda: Dpda,
    expected: ArrayParams,
    construction: &'static str,
    source: SourceSummary,
    symbolic: Vec<Vec<String>>,
    col_separators: Vec<usize>,
    row_separators: Vec<usize>,
) -> Result<ConstructedDpda, ConstructError> {
    let found = dpda.params();
    if found != expected {
        return Err(ConstructError::ParameterMismatch { expected, found });
    }
    Ok(ConstructedDpda {
        dpda,
        construction,
        source,
        symbolic,
        col_separators,
        row_separators,
    })
}

/// Rows are points, columns are blocks; a non-star cell holds the pair
/// `{x} ∪ (block ∩ successor-class block of x)`, and each pair's sender is
/// the one block containing it. Works for any design with `mu_2 = 1` and
/// yields parameters `(b, v, k, C(k,2)·b)`.
pub fn construct_general(source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
    let summary = require_mu2_one(source)?;
    build_point_rows(source, summary, "general")
}

/// The two-class special case with its `(2n, n^2, n, n^2(n-1))` contract.
pub fn construct_i(source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
    let n = require_two_class_square(source)?;
    let summary = require_mu2_one(source)?;
    let built = build_point_rows(source, summary, "I")?;
    let expected = ArrayParams {
        k: 2 * n,
        f: n * n,
        z: n,
        s: n * n * (n - 1),
    };
    let found = built.params();
    if found != expected {
        return Err(ConstructError::ParameterMismatch { expected, found });
    }
    Ok(built)
}

fn build_point_rows(
    source: &Resolution,
    summary: SourceSummary,
    name: &'static str,
) -> Result<ConstructedDpda, ConstructError> {
    let design = source.design();
    let r = source.num_classes();
    let columns: Vec<usize> = source.block_order().collect();
    let col_class: Vec<usize> = (0..r)
        .flat_map(|j| std::iter::repeat_n(j, source.blocks_per_class()))
        .collect();

    // Every 2-subset of a block identifies that block uniquely (mu_2 = 1),
    // which is exactly the sender mapping.
    let mut pair_to_col: HashMap<(usize, usize), usize> = HashMap::new();
    for (col, &b) in columns.iter().enumerate() {
        let block = design.block(b);
        for i in 0..block.len() {
            for j in i + 1..block.len() {
                pair_to_col.insert((block[i], block[j]), col);
            }
        }
    }

    let mut symbolic_rows = Vec::with_capacity(design.num_points());
    for x in 0..design.num_points() {
        let mut row = Vec::with_capacity(columns.len());
        for (col, &b) in columns.iter().enumerate() {
            let block = design.block(b);
            if block.binary_search(&x).is_ok() {
                row.push(SymbolicEntry::Star);
            } else {
                let partner = source.block_of(successor(col_class[col], r), x);
                let hit = intersect(block, design.block(partner));
                debug_assert_eq!(hit.len(), 1, "mu_2 = 1 guarantees a single point");
                let y = hit[0];
                row.push(SymbolicEntry::Symbol((x.min(y), x.max(y))));
            }
        }
        symbolic_rows.push(row);
    }

    let row_labels: Vec<String> = design.points().to_vec();
    let col_labels: Vec<String> = columns.iter().map(|&b| design.block_label(b)).collect();
    let symbolic = SymbolicArray::from_rows(symbolic_rows)?
        .with_labels(Some(row_labels.clone()), Some(col_labels.clone()));
    let (canonical, table) = symbolic.canonicalize();
    let canonical = canonical.with_labels(Some(row_labels), Some(col_labels))?;

    let phi = Phi::new(table.iter().map(|pair| pair_to_col[pair]).collect());
    let dpda = validate_dpda(&canonical, Some(phi)).map_err(ConstructError::OutputInvalid)?;

    let display: Vec<Vec<String>> = (0..canonical.num_rows())
        .map(|row| {
            (0..canonical.num_cols())
                .map(|col| match symbolic.entry(row, col) {
                    SymbolicEntry::Star => "*".to_string(),
                    SymbolicEntry::Symbol((a, b)) => join_labels(design.points(), &[*a, *b]),
                })
                .collect()
        })
        .collect();

    let expected = ArrayParams {
        k: summary.blocks,
        f: summary.points,
        z: summary.block_size,
        s: summary.block_size * (summary.block_size - 1) / 2 * summary.blocks,
    };
    let separators: Vec<usize> = (1..r).map(|j| j * source.blocks_per_class()).collect();
    check_params(
        dpda,
        expected,
        name,
        summary,
        display,
        separators,
        Vec::new(),
    )
}

/// Rows are blocks, columns are points; a non-star cell holds the single
/// point of `block ∩ successor-class block of x`, subscripted by its
/// occurrence index in that row. Requires the two-class square design and
/// yields parameters `(n^2, 2n, 2, n^2(n-1))`; the sender of `(y, a)` is
/// column `y`.
pub fn construct_ii(source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
    let n = require_two_class_square(source)?;
    let summary = require_mu2_one(source)?;
    let design = source.design();
    let r = source.num_classes();
    let rows: Vec<usize> = source.block_order().collect();
    let row_class: Vec<usize> = (0..r)
        .flat_map(|j| std::iter::repeat_n(j, source.blocks_per_class()))
        .collect();

    let mut symbolic_rows = Vec::with_capacity(rows.len());
    for (ri, &b) in rows.iter().enumerate() {
        let block = design.block(b);
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut row = Vec::with_capacity(design.num_points());
        for x in 0..design.num_points() {
            if block.binary_search(&x).is_ok() {
                row.push(SymbolicEntry::Star);
            } else {
                let partner = source.block_of(successor(row_class[ri], r), x);
                let hit = intersect(block, design.block(partner));
                debug_assert_eq!(hit.len(), 1, "mu_2 = 1 guarantees a single point");
                let y = hit[0];
                let alpha = seen.entry(y).and_modify(|a| *a += 1).or_insert(1);
                row.push(SymbolicEntry::Symbol((y, *alpha)));
            }
        }
        symbolic_rows.push(row);
    }

    let row_labels: Vec<String> = rows.iter().map(|&b| design.block_label(b)).collect();
    let col_labels: Vec<String> = design.points().to_vec();
    let symbolic = SymbolicArray::from_rows(symbolic_rows)?
        .with_labels(Some(row_labels.clone()), Some(col_labels.clone()));
    let (canonical, table) = symbolic.canonicalize();
    let canonical = canonical.with_labels(Some(row_labels), Some(col_labels))?;

    let phi = Phi::new(table.iter().map(|&(y, _)| y).collect());
    let dpda = validate_dpda(&canonical, Some(phi)).map_err(ConstructError::OutputInvalid)?;

    let display: Vec<Vec<String>> = (0..canonical.num_rows())
        .map(|row| {
            (0..canonical.num_cols())
                .map(|col| match symbolic.entry(row, col) {
                    SymbolicEntry::Star => "*".to_string(),
                    SymbolicEntry::Symbol((y, alpha)) => {
                        format!("{}_{}", design.points()[*y], alpha)
                    }
                })
                .collect()
        })
        .collect();

    let expected = ArrayParams {
        k: n * n,
        f: 2 * n,
        z: 2,
        s: n * n * (n - 1),
    };
    let separators: Vec<usize> = (1..r).map(|j| j * source.blocks_per_class()).collect();
    check_params(
        dpda,
        expected,
        "II",
        summary,
        display,
        Vec::new(),
        separators,
    )
}

/// One interchangeable array construction, selectable by name.
pub trait Construction: Sync {
    fn name(&self) -> &'static str;
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }
    fn summary(&self) -> &'static str;
    fn build(&self, source: &Resolution) -> Result<ConstructedDpda, ConstructError>;
}

struct PointRowsOverGrid;

impl Construction for PointRowsOverGrid {
    fn name(&self) -> &'static str {
        "I"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["i", "1", "construct-i", "point-rows"]
    }
    fn summary(&self) -> &'static str {
        "(2n, n^2, n, n^2(n-1)) array from a two-class square design; rows are points"
    }
    fn build(&self, source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
        construct_i(source)
    }
}

struct BlockRowsOverGrid;

impl Construction for BlockRowsOverGrid {
    fn name(&self) -> &'static str {
        "II"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["ii", "2", "construct-ii", "block-rows"]
    }
    fn summary(&self) -> &'static str {
        "(n^2, 2n, 2, n^2(n-1)) array from a two-class square design; rows are blocks"
    }
    fn build(&self, source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
        construct_ii(source)
    }
}

struct PointRowsGeneral;

impl Construction for PointRowsGeneral {
    fn name(&self) -> &'static str {
        "general"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["g", "multi-class"]
    }
    fn summary(&self) -> &'static str {
        "(b, v, k, C(k,2)b) array from any design with mu_2 = 1"
    }
    fn build(&self, source: &Resolution) -> Result<ConstructedDpda, ConstructError> {
        construct_general(source)
    }
}

/// The registered constructions, in presentation order.
pub fn constructions() -> &'static [&'static dyn Construction] {
    static REGISTRY: [&dyn Construction; 3] =
        [&PointRowsOverGrid, &BlockRowsOverGrid, &PointRowsGeneral];
    &REGISTRY
}

/// Case-insensitive lookup by name or alias.
pub fn find_construction(name: &str) -> Option<&'static dyn Construction> {
    let wanted = name.to_ascii_lowercase();
    constructions().iter().copied().find(|c| {
        c.name().to_ascii_lowercase() == wanted
            || c.aliases().iter().any(|a| a.to_ascii_lowercase() == wanted)
    })
}
