//! Arrays over `{*} ∪ [S]`, the placement/delivery conditions C1-C4, symbol
//! canonicalization, and array equivalence.
//!
//! The validators collect every violated condition with coordinates instead
//! of failing fast, so they double as a debugging aid for hand-built arrays.
//! All user-facing row/column/symbol indices are 1-based; internal storage is
//! 0-based row-major.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdaError {
    #[error("array must have at least one row and one column")]
    EmptyArray,
    #[error("row {0} has {1} entries, expected {2}")]
    RaggedRow(usize, usize, usize),
    #[error("entry at row {row}, column {col} must be \"*\" or an integer >= 1")]
    BadEntry { row: usize, col: usize },
    #[error("declared shape {rows}x{cols} does not match {actual} entry rows")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        actual: usize,
    },
    #[error("label list has {0} entries, expected {1}")]
    LabelLength(usize, usize),
    #[error("phi has {0} entries, expected one per symbol ({1})")]
    PhiLength(usize, usize),
    #[error("phi maps symbol {symbol} to column {col}, outside 1..={cols}")]
    PhiRange {
        symbol: u32,
        col: usize,
        cols: usize,
    },
    #[error("arrays have different shapes: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// One cell: the reserved star or an integer symbol in `1..=S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Star,
    Symbol(u32),
}

impl Entry {
    pub fn is_star(&self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn symbol(&self) -> Option<u32> {
        match self {
            Entry::Star => None,
            Entry::Symbol(s) => Some(*s),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => write!(f, "*"),
            Entry::Symbol(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Entry::Star => ser.serialize_str("*"),
            Entry::Symbol(s) => ser.serialize_u32(*s),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(de)?;
        match &value {
            serde_json::Value::String(s) if s == "*" => Ok(Entry::Star),
            serde_json::Value::Number(n) => match n.as_u64() {
                Some(v) if v >= 1 && v <= u32::MAX as u64 => Ok(Entry::Symbol(v as u32)),
                _ => Err(D::Error::custom("symbols must be integers >= 1")),
            },
            _ => Err(D::Error::custom(r#"expected "*" or an integer >= 1"#)),
        }
    }
}

/// An `F x K` grid of stars and integer symbols with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaArray {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl PdaArray {
    pub fn new(rows: usize, cols: usize, entries: Vec<Entry>) -> Result<Self, PdaError> {
        if rows == 0 || cols == 0 {
            return Err(PdaError::EmptyArray);
        }
        if entries.len() != rows * cols {
            return Err(PdaError::ShapeMismatch {
                rows,
                cols,
                actual: entries.len() / cols.max(1),
            });
        }
        Ok(PdaArray {
            rows,
            cols,
            entries,
            row_labels: None,
            col_labels: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Result<Self, PdaError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(PdaError::EmptyArray);
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(PdaError::RaggedRow(i + 1, r.len(), cols));
            }
        }
        let f = rows.len();
        PdaArray::new(f, cols, rows.into_iter().flatten().collect())
    }

    pub fn with_labels(
        mut self,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self, PdaError> {
        if let Some(ref l) = row_labels {
            if l.len() != self.rows {
                return Err(PdaError::LabelLength(l.len(), self.rows));
            }
        }
        if let Some(ref l) = col_labels {
            if l.len() != self.cols {
                return Err(PdaError::LabelLength(l.len(), self.cols));
            }
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    /// `F`, the subpacketization (row count).
    pub fn num_rows(&self) -> usize {
        self.rows
    }

    /// `K`, the user count (column count).
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Entry {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// Largest symbol value present (0 when the array is all stars).
    pub fn max_symbol(&self) -> u32 {
        self.entries
            .iter()
            .filter_map(Entry::symbol)
            .max()
            .unwrap_or(0)
    }

    /// All cells per symbol, as 0-based (row, col) pairs in row-major order.
    pub fn occurrences(&self) -> BTreeMap<u32, Vec<(usize, usize)>> {
        let mut map: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if let Entry::Symbol(s) = self.entry(r, c) {
                    map.entry(s).or_default().push((r, c));
                }
            }
        }
        map
    }

    /// 0-based columns holding a star in the given row.
    pub fn star_cols(&self, row: usize) -> BTreeSet<usize> {
        self.row(row)
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_star())
            .map(|(c, _)| c)
            .collect()
    }

    pub fn star_count_in_col(&self, col: usize) -> usize {
        (0..self.rows)
            .filter(|&r| self.entry(r, col).is_star())
            .count()
    }

    /// Renames symbols to `1..=S` in order of first occurrence scanning rows
    /// top to bottom, columns left to right. Stars are untouched.
    pub fn canonicalize(&self) -> PdaArray {
        let sym = SymbolicArray {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| match e {
                    Entry::Star => SymbolicEntry::Star,
                    Entry::Symbol(s) => SymbolicEntry::Symbol(*s),
                })
                .collect(),
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        };
        sym.canonicalize().0
    }

    /// Plain grid rendering with row and column labels.
    pub fn render_text(&self) -> String {
        let col_labels: Vec<String> = match &self.col_labels {
            Some(l) => l.clone(),
            None => (1..=self.cols).map(|c| c.to_string()).collect(),
        };
        let row_labels: Vec<String> = match &self.row_labels {
            Some(l) => l.clone(),
            None => (1..=self.rows).map(|r| r.to_string()).collect(),
        };
        let cells: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|e| e.to_string()).collect())
            .collect();
        render_grid(&row_labels, &col_labels, &cells, &[])
    }

    /// CSV rendering: header of column labels, then one line per row.
    pub fn render_csv(&self) -> String {
        let col_labels: Vec<String> = match &self.col_labels {
            Some(l) => l.clone(),
            None => (1..=self.cols).map(|c| c.to_string()).collect(),
        };
        let row_labels: Vec<String> = match &self.row_labels {
            Some(l) => l.clone(),
            None => (1..=self.rows).map(|r| r.to_string()).collect(),
        };
        let mut out = String::new();
        out.push_str(&format!(",{}\n", col_labels.join(",")));
        for (r, label) in row_labels.iter().enumerate() {
            let cells: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{},{}\n", label, cells.join(",")));
        }
        out
    }
}

pub(crate) fn render_grid(
    row_labels: &[String],
    col_labels: &[String],
    cells: &[Vec<String>],
    col_separators: &[usize],
) -> String {
    let cols = col_labels.len();
    let mut widths: Vec<usize> = col_labels.iter().map(|l| l.chars().count()).collect();
    for row in cells {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.chars().count());
        }
    }
    let label_width = row_labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    let mut line = format!("{:label_width$}", "");
    for c in 0..cols {
        if col_separators.contains(&c) {
            line.push_str(" |");
        }
        line.push_str(&format!(" {:>width$}", col_labels[c], width = widths[c]));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for (r, row) in cells.iter().enumerate() {
        let mut line = format!("{:>label_width$}", row_labels[r]);
        for (c, cell) in row.iter().enumerate() {
            if col_separators.contains(&c) {
                line.push_str(" |");
            }
            line.push_str(&format!(" {:>width$}", cell, width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ArrayJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    row_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col_labels: Option<Vec<String>>,
}

/// Parses the array JSON format. Returns the array and, when present, the
/// accompanying symbol-to-column mapping.
pub fn array_from_json(text: &str) -> Result<(PdaArray, Option<Phi>), ArrayParseError> {
    let json: ArrayJson = serde_json::from_str(text)?;
    let flat: Vec<Vec<Entry>> = json.entries;
    if flat.len() != json.rows {
        return Err(PdaError::ShapeMismatch {
            rows: json.rows,
            cols: json.cols,
            actual: flat.len(),
        }
        .into());
    }
    for (i, row) in flat.iter().enumerate() {
        if row.len() != json.cols {
            return Err(PdaError::RaggedRow(i + 1, row.len(), json.cols).into());
        }
    }
    let array = PdaArray::from_rows(flat)?.with_labels(json.row_labels, json.col_labels)?;
    let phi = match json.phi {
        Some(cols_1based) => Some(Phi::from_one_based(&cols_1based, &array)?),
        None => None,
    };
    Ok((array, phi))
}

/// Serializes an array (and optionally its phi) to the array JSON format.
pub fn array_to_json(array: &PdaArray, phi: Option<&Phi>) -> serde_json::Value {
    let json = ArrayJson {
        rows: array.rows,
        cols: array.cols,
        entries: (0..array.rows).map(|r| array.row(r).to_vec()).collect(),
        phi: phi.map(Phi::to_one_based),
        row_labels: array.row_labels.clone(),
        col_labels: array.col_labels.clone(),
    };
    serde_json::to_value(json).expect("array JSON is serializable")
}

#[derive(Debug, Error)]
pub enum ArrayParseError {
    #[error("invalid array JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Array(#[from] PdaError),
}

/// Maps each symbol `s` in `1..=S` to the 0-based column of its sender.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi(Vec<usize>);

impl Phi {
    pub fn new(cols_0based: Vec<usize>) -> Self {
        Phi(cols_0based)
    }

    fn from_one_based(cols: &[usize], array: &PdaArray) -> Result<Self, PdaError> {
        let s = array.max_symbol() as usize;
        if cols.len() != s {
            return Err(PdaError::PhiLength(cols.len(), s));
        }
        let mut mapped = Vec::with_capacity(cols.len());
        for (i, &c) in cols.iter().enumerate() {
            if c == 0 || c > array.num_cols() {
                return Err(PdaError::PhiRange {
                    symbol: i as u32 + 1,
                    col: c,
                    cols: array.num_cols(),
                });
            }
            mapped.push(c - 1);
        }
        Ok(Phi(mapped))
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|c| c + 1).collect()
    }

    /// 0-based sender column for symbol `s` (1-based).
    pub fn col(&self, s: u32) -> usize {
        self.0[(s - 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every symbol `s` maps to column `s`.
    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &c)| i == c)
    }
}

/// The four defining conditions plus the sender condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3a,
    C3b,
    C4,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Where a violation occurred. All indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Column {
        col: usize,
    },
    Symbol {
        symbol: u32,
    },
    Pair {
        symbol: u32,
        rows: (usize, usize),
        cols: (usize, usize),
    },
    Cell {
        row: usize,
        col: usize,
        symbol: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition, self.message)
    }
}

/// The `(K, F, Z, S)` signature of a validated array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArrayParams {
    /// Number of users (columns).
    pub k: usize,
    /// Subpacketization (rows).
    pub f: usize,
    /// Stars per column.
    pub z: usize,
    /// Number of distinct symbols.
    pub s: usize,
}

impl fmt::Display for ArrayParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k, self.f, self.z, self.s)
    }
}

/// Checks C1-C3. Returns the array parameters on success, otherwise every
/// violated condition with coordinates.
pub fn validate_pda(array: &PdaArray) -> Result<ArrayParams, Vec<Violation>> {
    let mut violations = Vec::new();

    // C1: the star count must be the same in every column. The reference
    // count is the most common one (ties broken toward the larger value).
    let counts: Vec<usize> = (0..array.num_cols())
        .map(|c| array.star_count_in_col(c))
        .collect();
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &counts {
        *freq.entry(c).or_default() += 1;
    }
    let z = freq
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
        .map(|(&count, _)| count)
        .unwrap_or(0);
    for (c, &count) in counts.iter().enumerate() {
        if count != z {
            violations.push(Violation {
                condition: Condition::C1,
                location: Location::Column { col: c + 1 },
                message: format!("column {} has {} stars, expected {}", c + 1, count, z),
            });
        }
    }

    // C2: symbols must be exactly 1..=S with no gaps.
    let occurrences = array.occurrences();
    let s = array.max_symbol();
    for missing in (1..=s).filter(|m| !occurrences.contains_key(m)) {
        violations.push(Violation {
            condition: Condition::C2,
            location: Location::Symbol { symbol: missing },
            message: format!("symbol {missing} never occurs but {s} does"),
        });
    }

    // C3: equal symbols sit in distinct rows and columns (a), and the two
    // crossing cells hold stars (b).
    for (&sym, cells) in &occurrences {
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let (r1, c1) = cells[i];
                let (r2, c2) = cells[j];
                if r1 == r2 || c1 == c2 {
                    violations.push(Violation {
                        condition: Condition::C3a,
                        location: Location::Pair {
                            symbol: sym,
                            rows: (r1 + 1, r2 + 1),
                            cols: (c1 + 1, c2 + 1),
                        },
                        message: format!(
                            "symbol {sym} repeats in the same {} (rows {},{} / cols {},{})",
                            if r1 == r2 { "row" } else { "column" },
                            r1 + 1,
                            r2 + 1,
                            c1 + 1,
                            c2 + 1
                        ),
                    });
                    continue;
                }
                if !array.entry(r1, c2).is_star() || !array.entry(r2, c1).is_star() {
                    violations.push(Violation {
                        condition: Condition::C3b,
                        location: Location::Pair {
                            symbol: sym,
                            rows: (r1 + 1, r2 + 1),
                            cols: (c1 + 1, c2 + 1),
                        },
                        message: format!(
                            "symbol {sym} at rows {},{} / cols {},{} lacks the crossing stars",
                            r1 + 1,
                            r2 + 1,
                            c1 + 1,
                            c2 + 1
                        ),
                    });
                }
            }
        }
    }

    if violations.is_empty() {
        Ok(ArrayParams {
            k: array.num_cols(),
            f: array.num_rows(),
            z,
            s: s as usize,
        })
    } else {
        Err(violations)
    }
}

/// Per-symbol occurrence counts: `g` when uniform, otherwise every symbol
/// whose count differs from the most common one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regularity {
    Regular(usize),
    NonRegular(Vec<(u32, usize)>),
}

pub fn regularity(array: &PdaArray) -> Regularity {
    let occurrences = array.occurrences();
    let counts: Vec<usize> = occurrences.values().map(Vec::len).collect();
    if counts.is_empty() {
        return Regularity::Regular(0);
    }
    if counts.iter().all(|&c| c == counts[0]) {
        return Regularity::Regular(counts[0]);
    }
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &counts {
        *freq.entry(c).or_default() += 1;
    }
    let mode = freq
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
        .map(|(&count, _)| count)
        .unwrap();
    let offenders = occurrences
        .iter()
        .filter(|(_, cells)| cells.len() != mode)
        .map(|(&s, cells)| (s, cells.len()))
        .collect();
    Regularity::NonRegular(offenders)
}

/// For each symbol, the columns that hold a star in every row where the
/// symbol occurs. Any of them is a feasible sender column.
pub fn phi_candidates(array: &PdaArray) -> BTreeMap<u32, BTreeSet<usize>> {
    let mut result = BTreeMap::new();
    for (sym, cells) in array.occurrences() {
        let mut rows: Vec<usize> = cells.iter().map(|&(r, _)| r).collect();
        rows.dedup();
        let mut candidates = array.star_cols(rows[0]);
        for &r in &rows[1..] {
            let stars = array.star_cols(r);
            candidates = candidates.intersection(&stars).copied().collect();
            if candidates.is_empty() {
                break;
            }
        }
        result.insert(sym, candidates);
    }
    result
}

/// Derives a sender mapping, picking the smallest feasible column for each
/// symbol. On failure, returns every symbol with no feasible column.
pub fn derive_phi(array: &PdaArray) -> Result<Phi, Vec<u32>> {
    let candidates = phi_candidates(array);
    let mut cols = Vec::with_capacity(candidates.len());
    let mut failures = Vec::new();
    for s in 1..=array.max_symbol() {
        match candidates.get(&s).and_then(|c| c.iter().next()) {
            Some(&col) => cols.push(col),
            None => failures.push(s),
        }
    }
    if failures.is_empty() {
        Ok(Phi(cols))
    } else {
        Err(failures)
    }
}

/// C4 check for a supplied mapping: every row containing `s` must hold a star
/// in column `phi(s)`.
pub fn check_phi(array: &PdaArray, phi: &Phi) -> Vec<Violation> {
    let mut violations = Vec::new();
    let s = array.max_symbol() as usize;
    if phi.len() < s {
        for missing in (phi.len() as u32 + 1)..=(s as u32) {
            violations.push(Violation {
                condition: Condition::C4,
                location: Location::Symbol { symbol: missing },
                message: format!("phi does not map symbol {missing} to any sender"),
            });
        }
        return violations;
    }
    for (sym, cells) in array.occurrences() {
        let col = phi.col(sym);
        for (r, _) in cells {
            if !array.entry(r, col).is_star() {
                violations.push(Violation {
                    condition: Condition::C4,
                    location: Location::Cell {
                        row: r + 1,
                        col: col + 1,
                        symbol: sym,
                    },
                    message: format!(
                        "symbol {} occurs in row {} but column {} has no star there",
                        sym,
                        r + 1,
                        col + 1
                    ),
                });
            }
        }
    }
    violations
}

/// A validated array together with its sender mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpda {
    array: PdaArray,
    phi: Phi,
    params: ArrayParams,
}

impl Dpda {
    pub fn array(&self) -> &PdaArray {
        &self.array
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn params(&self) -> ArrayParams {
        self.params
    }

    pub fn to_json(&self) -> serde_json::Value {
        array_to_json(&self.array, Some(&self.phi))
    }
}

/// Runs the full C1-C4 validation. When `phi` is absent one is derived
/// (smallest feasible column per symbol).
pub fn validate_dpda(array: &PdaArray, phi: Option<Phi>) -> Result<Dpda, Vec<Violation>> {
    let params = validate_pda(array)?;
    match phi {
        Some(phi) => {
            let violations = check_phi(array, &phi);
            if violations.is_empty() {
                Ok(Dpda {
                    array: array.clone(),
                    phi,
                    params,
                })
            } else {
                Err(violations)
            }
        }
        None => match derive_phi(array) {
            Ok(phi) => Ok(Dpda {
                array: array.clone(),
                phi,
                params,
            }),
            Err(symbols) => Err(symbols
                .into_iter()
                .map(|s| Violation {
                    condition: Condition::C4,
                    location: Location::Symbol { symbol: s },
                    message: format!("no column has a star in every row containing symbol {s}"),
                })
                .collect()),
        },
    }
}

/// An array over opaque symbols, used by the constructions before integer
/// labels are assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicArray<T> {
    rows: usize,
    cols: usize,
    entries: Vec<SymbolicEntry<T>>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicEntry<T> {
    Star,
    Symbol(T),
}

impl<T: Clone + Eq + Hash> SymbolicArray<T> {
    pub fn from_rows(rows: Vec<Vec<SymbolicEntry<T>>>) -> Result<Self, PdaError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(PdaError::EmptyArray);
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(PdaError::RaggedRow(i + 1, r.len(), cols));
            }
        }
        Ok(SymbolicArray {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
            row_labels: None,
            col_labels: None,
        })
    }

    pub fn with_labels(
        mut self,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Self {
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        self
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &SymbolicEntry<T> {
        &self.entries[row * self.cols + col]
    }

    /// Assigns integer labels `1..=S` by first occurrence in row-major order.
    /// Returns the canonical array and the symbol table (`table[i]` is the
    /// original symbol for label `i + 1`).
    pub fn canonicalize(&self) -> (PdaArray, Vec<T>) {
        let mut ids: std::collections::HashMap<&T, u32> = std::collections::HashMap::new();
        let mut table = Vec::new();
        let entries = self
            .entries
            .iter()
            .map(|e| match e {
                SymbolicEntry::Star => Entry::Star,
                SymbolicEntry::Symbol(t) => {
                    let next = ids.len() as u32 + 1;
                    let id = *ids.entry(t).or_insert_with(|| {
                        table.push(t.clone());
                        next
                    });
                    Entry::Symbol(id)
                }
            })
            .collect();
        let array = PdaArray {
            rows: self.rows,
            cols: self.cols,
            entries,
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
        };
        (array, table)
    }
}

/// Parses a whitespace grid of `*` and opaque tokens, one row per line.
pub fn parse_symbolic_grid(text: &str) -> Result<SymbolicArray<String>, PdaError> {
    let rows: Vec<Vec<SymbolicEntry<String>>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            line.split_whitespace()
                .map(|tok| {
                    if tok == "*" {
                        SymbolicEntry::Star
                    } else {
                        SymbolicEntry::Symbol(tok.to_string())
                    }
                })
                .collect()
        })
        .collect();
    SymbolicArray::from_rows(rows)
}

/// Parses a whitespace grid of `*` and integer symbols, one row per line.
pub fn parse_entry_grid(text: &str) -> Result<PdaArray, PdaError> {
    let mut rows = Vec::new();
    for (r, line) in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
    {
        let mut row = Vec::new();
        for (c, tok) in line.split_whitespace().enumerate() {
            let entry = if tok == "*" {
                Entry::Star
            } else {
                match tok.parse::<u32>() {
                    Ok(v) if v >= 1 => Entry::Symbol(v),
                    _ => {
                        return Err(PdaError::BadEntry {
                            row: r + 1,
                            col: c + 1,
                        })
                    }
                }
            };
            row.push(entry);
        }
        rows.push(row);
    }
    PdaArray::from_rows(rows)
}

/// Free-function form of [`PdaArray::canonicalize`].
pub fn canonicalize(array: &PdaArray) -> PdaArray {
    array.canonicalize()
}

/// True when the two arrays agree entry-for-entry after canonical symbol
/// relabeling, with rows and columns in the given order.
pub fn equivalent(a: &PdaArray, b: &PdaArray) -> Result<bool, PdaError> {
    if a.num_rows() != b.num_rows() || a.num_cols() != b.num_cols() {
        return Err(PdaError::DimensionMismatch(
            a.num_rows(),
            a.num_cols(),
            b.num_rows(),
            b.num_cols(),
        ));
    }
    Ok(a.canonicalize().entries == b.canonicalize().entries)
}
