//! Transmission-load lower bounds, optimality classification, and the
//! scheme comparison report.
//!
//! All ratios are exact `BigRational`s; bound comparisons are never done in
//! floating point. The one exception is the graph-based catalog row whose
//! memory ratio is irrational by formula; it carries an explicit `f64`
//! approximation instead (see [`crate::catalog`]).

use std::fmt;

use num::{BigInt, BigRational, BigUint, One};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{find_scheme, CatalogError, CatalogInputs};
use crate::pda::{ArrayParams, Dpda};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("bounds need 0 < Z < F, got Z={z}, F={f}")]
    InvalidZ { z: usize, f: usize },
    #[error("users must be at least 1")]
    NoUsers,
    #[error("comparison sides need n >= 2, got {0}")]
    SideTooSmall(u64),
    #[error("unknown scheme {0:?} in comparison filter")]
    UnknownCompareScheme(String),
    #[error(
        "equality clause mismatch for the {bound} bound: load equality is {value_equal} \
         but the structural condition is {structure}"
    )]
    EqualityClauseMismatch {
        bound: &'static str,
        value_equal: bool,
        structure: bool,
    },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Exact rational from integer parts.
pub fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(big(num), big(den))
}

/// `p/q` string form, plain integer when the denominator is one.
pub fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `R >= F/Z - 1`, the subpacketization-only bound.
pub fn bound_jmqx(f: usize, z: usize) -> Result<BigRational, BoundsError> {
    if z == 0 || z >= f {
        return Err(BoundsError::InvalidZ { z, f });
    }
    Ok(ratio((f - z) as u64, z as u64))
}

/// `R >= (K/F)(F/Z - 1)`, counting the per-user sending budget. Tighter than
/// the other bound exactly when `K > F`.
pub fn bound_new(k: usize, f: usize, z: usize) -> Result<BigRational, BoundsError> {
    if k == 0 {
        return Err(BoundsError::NoUsers);
    }
    let base = bound_jmqx(f, z)?;
    Ok(base * ratio(k as u64, f as u64))
}

/// Which of the two bounds is larger for given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tighter {
    Jmqx,
    New,
    Equal,
}

impl fmt::Display for Tighter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tighter::Jmqx => write!(f, "jmqx"),
            Tighter::New => write!(f, "new"),
            Tighter::Equal => write!(f, "equal"),
        }
    }
}

/// Structural equality-clause checks backing the two bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EqualityEvidence {
    /// Every symbol occurs exactly `KZ/F` times.
    pub uniform_kzf_multiplicity: bool,
    /// Every row holds exactly `KZ/F` stars.
    pub rows_have_kzf_stars: bool,
    /// Every symbol occurs exactly `Z` times.
    pub uniform_z_multiplicity: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityReport {
    pub params: ArrayParams,
    pub load: BigRational,
    pub bound_jmqx: BigRational,
    pub bound_new: BigRational,
    pub tighter: Tighter,
    pub meets_jmqx: bool,
    pub meets_new: bool,
    pub evidence: EqualityEvidence,
}

impl OptimalityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "K": self.params.k,
            "F": self.params.f,
            "Z": self.params.z,
            "S": self.params.s,
            "R": ratio_string(&self.load),
            "bound_jmqx": ratio_string(&self.bound_jmqx),
            "bound_new": ratio_string(&self.bound_new),
            "tighter": self.tighter.to_string(),
            "meets_jmqx": self.meets_jmqx,
            "meets_new": self.meets_new,
            "evidence": self.evidence,
        })
    }
}

impl fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} R={} bound_jmqx={}{} bound_new={}{} tighter={}",
            self.params,
            ratio_string(&self.load),
            ratio_string(&self.bound_jmqx),
            if self.meets_jmqx { " (met)" } else { "" },
            ratio_string(&self.bound_new),
            if self.meets_new { " (met)" } else { "" },
            self.tighter
        )
    }
}

/// Evaluates both bounds for a validated array, checks load equality exactly,
/// and independently verifies the structural equality clauses. A disagreement
/// between value equality and structure is an internal error, not a report.
pub fn classify(dpda: &Dpda) -> Result<OptimalityReport, BoundsError> {
    let params = dpda.params();
    let load = ratio(params.s as u64, params.f as u64);
    let jmqx = bound_jmqx(params.f, params.z)?;
    let new = bound_new(params.k, params.f, params.z)?;
    let tighter = match new.cmp(&jmqx) {
        std::cmp::Ordering::Greater => Tighter::New,
        std::cmp::Ordering::Less => Tighter::Jmqx,
        std::cmp::Ordering::Equal => Tighter::Equal,
    };

    let occurrences = dpda.array().occurrences();
    let kzf = ratio(params.k as u64 * params.z as u64, params.f as u64);
    let kzf_count = if kzf.denom().is_one() {
        use num::ToPrimitive;
        kzf.numer().to_usize()
    } else {
        None
    };
    let uniform_kzf_multiplicity = match kzf_count {
        Some(target) => occurrences.values().all(|cells| cells.len() == target),
        None => false,
    };
    let rows_have_kzf_stars = match kzf_count {
        Some(target) => (0..params.f).all(|row| dpda.array().star_cols(row).len() == target),
        None => false,
    };
    let uniform_z_multiplicity = occurrences.values().all(|cells| cells.len() == params.z);

    let meets_jmqx = load == jmqx;
    let meets_new = load == new;
    if meets_jmqx != (uniform_kzf_multiplicity && rows_have_kzf_stars) {
        return Err(BoundsError::EqualityClauseMismatch {
            bound: "subpacketization",
            value_equal: meets_jmqx,
            structure: uniform_kzf_multiplicity && rows_have_kzf_stars,
        });
    }
    if meets_new != uniform_z_multiplicity {
        return Err(BoundsError::EqualityClauseMismatch {
            bound: "per-user",
            value_equal: meets_new,
            structure: uniform_z_multiplicity,
        });
    }

    Ok(OptimalityReport {
        params,
        load,
        bound_jmqx: jmqx,
        bound_new: new,
        tighter,
        meets_jmqx,
        meets_new,
        evidence: EqualityEvidence {
            uniform_kzf_multiplicity,
            rows_have_kzf_stars,
            uniform_z_multiplicity,
        },
    })
}

/// Closed-form `(K, M/N, F, R)` for one scheme, constructed or cataloged.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub users: BigUint,
    pub subpacketization: BigUint,
    /// Stars per column, when the array shape is known.
    pub stars_per_column: Option<BigUint>,
    /// Symbol count, when the array shape is known.
    pub symbols: Option<BigUint>,
    /// Exact memory ratio; absent only when the formula is irrational.
    pub memory_ratio: Option<BigRational>,
    /// Float fallback for the one catalog row with an irrational ratio.
    pub memory_ratio_approx: Option<f64>,
    pub load: BigRational,
}

impl SchemeParams {
    pub fn exact(
        users: BigUint,
        memory_ratio: BigRational,
        subpacketization: BigUint,
        load: BigRational,
    ) -> Self {
        SchemeParams {
            users,
            subpacketization,
            stars_per_column: None,
            symbols: None,
            memory_ratio: Some(memory_ratio),
            memory_ratio_approx: None,
            load,
        }
    }

    /// Parameters of a validated array: `M/N = Z/F`, `R = S/F`.
    pub fn from_array(params: ArrayParams) -> Result<Self, BoundsError> {
        if params.z == 0 || params.z >= params.f {
            return Err(BoundsError::InvalidZ {
                z: params.z,
                f: params.f,
            });
        }
        Ok(SchemeParams {
            users: BigUint::from(params.k),
            subpacketization: BigUint::from(params.f),
            stars_per_column: Some(BigUint::from(params.z)),
            symbols: Some(BigUint::from(params.s)),
            memory_ratio: Some(ratio(params.z as u64, params.f as u64)),
            memory_ratio_approx: None,
            load: ratio(params.s as u64, params.f as u64),
        })
    }

    pub fn memory_ratio_string(&self) -> String {
        match (&self.memory_ratio, self.memory_ratio_approx) {
            (Some(r), _) => ratio_string(r),
            (None, Some(a)) => format!("~{a:.6}"),
            (None, None) => "?".into(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("K".into(), self.users.to_string().into());
        obj.insert(
            "M_over_N".into(),
            match &self.memory_ratio {
                Some(r) => ratio_string(r).into(),
                None => serde_json::Value::Null,
            },
        );
        if let Some(a) = self.memory_ratio_approx {
            obj.insert("M_over_N_approx".into(), a.into());
        }
        obj.insert("F".into(), self.subpacketization.to_string().into());
        obj.insert("R".into(), ratio_string(&self.load).into());
        if let Some(z) = &self.stars_per_column {
            obj.insert("Z".into(), z.to_string().into());
        }
        if let Some(s) = &self.symbols {
            obj.insert("S".into(), s.to_string().into());
        }
        serde_json::Value::Object(obj)
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={}, M/N={}, F={}, R={}",
            self.users,
            self.memory_ratio_string(),
            self.subpacketization,
            ratio_string(&self.load)
        )
    }
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub scheme: &'static str,
    pub n: u64,
    pub params: SchemeParams,
}

impl CompareRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.scheme,
            self.params.users,
            self.params.memory_ratio_string(),
            self.params.subpacketization,
            ratio_string(&self.params.load)
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "scheme": self.scheme,
            "K": self.params.users.to_string(),
            "M_over_N": self.params.memory_ratio_string(),
            "F": self.params.subpacketization.to_string(),
            "R": ratio_string(&self.params.load),
        })
    }
}

pub const COMPARE_SCHEMES: [&str; 4] = ["jcm", "hypercube", "constr-i", "constr-ii"];

fn normalize_scheme(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

/// Per side `n`: the matched baseline rows and the two construction rows, all
/// at memory ratio `1/n`. The baseline appears once per operating point
/// (`K = n^2` next to the block-rows construction, `K = 2n` next to the
/// point-rows one); coinciding rows are deduplicated.
pub fn compare_report(
    sides: &[u64],
    schemes: Option<&[String]>,
) -> Result<Vec<CompareRow>, BoundsError> {
    let selected: Vec<&'static str> = match schemes {
        None => COMPARE_SCHEMES.to_vec(),
        Some(names) => {
            let mut picked = Vec::new();
            for name in names {
                let norm = normalize_scheme(name);
                let found = COMPARE_SCHEMES
                    .iter()
                    .find(|s| normalize_scheme(s) == norm)
                    .copied()
                    .ok_or_else(|| BoundsError::UnknownCompareScheme(name.clone()))?;
                if !picked.contains(&found) {
                    picked.push(found);
                }
            }
            picked
        }
    };

    let jcm = find_scheme("jcm").expect("jcm is registered");
    let hypercube = find_scheme("hypercube").expect("hypercube is registered");
    let mut rows: Vec<CompareRow> = Vec::new();
    let push = |rows: &mut Vec<CompareRow>, row: CompareRow| {
        if !rows
            .iter()
            .any(|r| r.scheme == row.scheme && r.params == row.params)
        {
            rows.push(row);
        }
    };
    for &n in sides {
        if n < 2 {
            return Err(BoundsError::SideTooSmall(n));
        }
        if selected.contains(&"jcm") {
            let params = jcm.eval(&CatalogInputs::from_pairs(&[("k", n * n), ("t", n)]))?;
            push(
                &mut rows,
                CompareRow {
                    scheme: "jcm",
                    n,
                    params,
                },
            );
        }
        if selected.contains(&"hypercube") {
            let params = hypercube.eval(&CatalogInputs::from_pairs(&[("n", n)]))?;
            push(
                &mut rows,
                CompareRow {
                    scheme: "hypercube",
                    n,
                    params,
                },
            );
        }
        if selected.contains(&"constr-ii") {
            let params = SchemeParams::exact(
                BigUint::from(n * n),
                ratio(1, n),
                BigUint::from(2 * n),
                ratio(n * (n - 1), 2),
            );
            push(
                &mut rows,
                CompareRow {
                    scheme: "constr-ii",
                    n,
                    params,
                },
            );
        }
        if selected.contains(&"jcm") {
            let params = jcm.eval(&CatalogInputs::from_pairs(&[("k", 2 * n), ("t", 2)]))?;
            push(
                &mut rows,
                CompareRow {
                    scheme: "jcm",
                    n,
                    params,
                },
            );
        }
        if selected.contains(&"constr-i") {
            let params = SchemeParams::exact(
                BigUint::from(2 * n),
                ratio(1, n),
                BigUint::from(n * n),
                ratio(n - 1, 1),
            );
            push(
                &mut rows,
                CompareRow {
                    scheme: "constr-i",
                    n,
                    params,
                },
            );
        }
    }
    Ok(rows)
}

/// CSV twin of the comparison table.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from("scheme,K,M_over_N,F,R\n");
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn compare_json(rows: &[CompareRow]) -> serde_json::Value {
    serde_json::Value::Array(rows.iter().map(CompareRow::to_json).collect())
}
