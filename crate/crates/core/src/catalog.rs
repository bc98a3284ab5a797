//! Closed-form parameter formulas for the known cache-multicast schemes,
//! each behind a common trait and registered by name.
//!
//! These are formula evaluators with validated input constraints only; no
//! arrays are produced. Binomials use arbitrary-precision integers so the
//! results stay exact at any size.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, BigUint, One, Zero};
use thiserror::Error;

use crate::bounds::SchemeParams;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog scheme {0:?}")]
    UnknownScheme(String),
    #[error("scheme {scheme} needs parameter {name}")]
    MissingParam {
        scheme: &'static str,
        name: &'static str,
    },
    #[error("scheme {scheme}: {message}")]
    Constraint {
        scheme: &'static str,
        message: String,
    },
    #[error("cannot parse {0:?} as key=value")]
    BadPair(String),
}

/// Named integer inputs for a catalog row, e.g. `k=50, t=2`.
#[derive(Debug, Clone, Default)]
pub struct CatalogInputs(BTreeMap<String, u64>);

impl CatalogInputs {
    pub fn from_pairs(pairs: &[(&str, u64)]) -> Self {
        CatalogInputs(
            pairs
                .iter()
                .map(|(k, v)| (k.to_ascii_lowercase(), *v))
                .collect(),
        )
    }

    /// Parses `"k=50,t=2"`.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut map = BTreeMap::new();
        for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| CatalogError::BadPair(pair.to_string()))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| CatalogError::BadPair(pair.to_string()))?;
            map.insert(key.trim().to_ascii_lowercase(), value);
        }
        Ok(CatalogInputs(map))
    }

    fn get(&self, scheme: &'static str, name: &'static str) -> Result<u64, CatalogError> {
        self.0
            .get(name)
            .copied()
            .ok_or(CatalogError::MissingParam { scheme, name })
    }
}

fn constraint(scheme: &'static str, message: impl Into<String>) -> CatalogError {
    CatalogError::Constraint {
        scheme,
        message: message.into(),
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn urat(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn one_minus(fraction: BigRational, scheme: &'static str) -> Result<BigRational, CatalogError> {
    let ratio = BigRational::one() - fraction;
    if ratio <= BigRational::new(BigInt::from(0), BigInt::from(1)) || ratio >= BigRational::one() {
        return Err(constraint(scheme, "memory ratio falls outside (0, 1)"));
    }
    Ok(ratio)
}

/// One catalog row: a named closed-form `(K, M/N, F, R)` evaluator.
pub trait CatalogScheme: Sync {
    fn name(&self) -> &'static str;
    /// Stable row id; also usable for lookup as "rowN".
    fn row(&self) -> u8;
    /// Human help for the expected parameters.
    fn params_help(&self) -> &'static str;
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError>;
}

struct Jcm;

impl CatalogScheme for Jcm {
    fn name(&self) -> &'static str {
        "jcm"
    }
    fn row(&self) -> u8 {
        1
    }
    fn params_help(&self) -> &'static str {
        "k (users), t (1 <= t <= k-1)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let k = self.get_users(inputs)?;
        let t = inputs.get(self.name(), "t")?;
        if t == 0 || t >= k {
            return Err(constraint(
                self.name(),
                format!("t must be in 1..={}", k - 1),
            ));
        }
        let f = BigUint::from(t) * binomial(k, t);
        Ok(SchemeParams::exact(
            BigUint::from(k),
            urat(BigUint::from(t), BigUint::from(k)),
            f,
            urat(BigUint::from(k - t), BigUint::from(t)),
        ))
    }
}

impl Jcm {
    fn get_users(&self, inputs: &CatalogInputs) -> Result<u64, CatalogError> {
        let k = inputs.get(self.name(), "k")?;
        if k < 2 {
            return Err(constraint(self.name(), "k must be at least 2"));
        }
        Ok(k)
    }
}

struct RsGraph;

impl CatalogScheme for RsGraph {
    fn name(&self) -> &'static str {
        "rs-graph"
    }
    fn row(&self) -> u8 {
        2
    }
    fn params_help(&self) -> &'static str {
        "lambda (>= 2), z (>= 2*lambda), gamma (>= 1), tau (>= 1)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let lambda = inputs.get(self.name(), "lambda")?;
        let z = inputs.get(self.name(), "z")?;
        let gamma = inputs.get(self.name(), "gamma")?;
        let tau = inputs.get(self.name(), "tau")?;
        if lambda < 2 {
            return Err(constraint(self.name(), "lambda must be at least 2"));
        }
        if z < 2 * lambda {
            return Err(constraint(self.name(), "z must be at least 2*lambda"));
        }
        if gamma < 1 || tau < 1 {
            return Err(constraint(self.name(), "gamma and tau must be positive"));
        }
        let users = BigUint::from(lambda).pow(z as u32);
        let f = users.clone() * BigUint::from(2 * gamma - 1);
        let load = urat(BigUint::from(tau) * BigUint::from(2 * gamma), f.clone());
        // The closed-form ratio 2*lambda^(-z / (2 lambda^4 ln lambda)) equals
        // 2*exp(-z / (2 lambda^4)), which is irrational; only an
        // approximation can be carried.
        let approx = 2.0 * (-(z as f64) / (2.0 * (lambda as f64).powi(4))).exp();
        Ok(SchemeParams {
            users,
            subpacketization: f,
            stars_per_column: None,
            symbols: None,
            memory_ratio: None,
            memory_ratio_approx: Some(approx),
            load,
        })
    }
}

struct Hypercube;

impl CatalogScheme for Hypercube {
    fn name(&self) -> &'static str {
        "hypercube"
    }
    fn row(&self) -> u8 {
        3
    }
    fn params_help(&self) -> &'static str {
        "n (>= 2)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let n = inputs.get(self.name(), "n")?;
        if n < 2 {
            return Err(constraint(self.name(), "n must be at least 2"));
        }
        Ok(SchemeParams::exact(
            BigUint::from(n * n),
            urat(BigUint::one(), BigUint::from(n)),
            BigUint::from(n).pow(n as u32),
            urat(BigUint::from(n), BigUint::one()),
        ))
    }
}

struct SubsetPairs;

impl CatalogScheme for SubsetPairs {
    fn name(&self) -> &'static str {
        "subset-pairs"
    }
    fn row(&self) -> u8 {
        4
    }
    fn params_help(&self) -> &'static str {
        "n, a, t (1 <= t <= a <= n-t)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let n = inputs.get(self.name(), "n")?;
        let a = inputs.get(self.name(), "a")?;
        let t = inputs.get(self.name(), "t")?;
        if t == 0 || t > a || a + t > n {
            return Err(constraint(self.name(), "need 1 <= t <= a <= n-t"));
        }
        let users = binomial(n, a);
        let f = binomial(n, 2 * t) * binomial(2 * t, t);
        let cached = urat(binomial(n - a, t) * binomial(a, t), f.clone());
        Ok(SchemeParams::exact(
            users.clone(),
            one_minus(cached, self.name())?,
            f.clone(),
            urat(users, f),
        ))
    }
}

struct DoubledSubsets;

impl CatalogScheme for DoubledSubsets {
    fn name(&self) -> &'static str {
        "doubled-subsets"
    }
    fn row(&self) -> u8 {
        5
    }
    fn params_help(&self) -> &'static str {
        "n, a (n >= 4a)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let n = inputs.get(self.name(), "n")?;
        let a = inputs.get(self.name(), "a")?;
        if a == 0 || n < 4 * a {
            return Err(constraint(self.name(), "need a >= 1 and n >= 4a"));
        }
        let users = BigUint::from(2u32) * binomial(n, a);
        let f = binomial(n, 2 * a);
        let cached = urat(binomial(n - a, a), f.clone());
        Ok(SchemeParams::exact(
            users.clone(),
            one_minus(cached, self.name())?,
            f.clone(),
            urat(users, f),
        ))
    }
}

struct ResidueSet;

impl CatalogScheme for ResidueSet {
    fn name(&self) -> &'static str {
        "residue-set"
    }
    fn row(&self) -> u8 {
        6
    }
    fn params_help(&self) -> &'static str {
        "n (odd), d (1 <= d <= n-1, size of the given residue set)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let n = inputs.get(self.name(), "n")?;
        let d = inputs.get(self.name(), "d")?;
        if n.is_multiple_of(2) || n < 3 {
            return Err(constraint(self.name(), "n must be odd and at least 3"));
        }
        if d == 0 || d >= n {
            return Err(constraint(self.name(), "need 1 <= d <= n-1"));
        }
        // The residue set itself is taken as given; its two defining
        // conditions are not checked here.
        Ok(SchemeParams::exact(
            BigUint::from(n),
            one_minus(urat(BigUint::from(d), BigUint::from(n)), self.name())?,
            BigUint::from(n),
            urat(BigUint::one(), BigUint::one()),
        ))
    }
}

struct NestedSubsets;

impl CatalogScheme for NestedSubsets {
    fn name(&self) -> &'static str {
        "nested-subsets"
    }
    fn row(&self) -> u8 {
        7
    }
    fn params_help(&self) -> &'static str {
        "n, a, b (a < b < 2a < n)"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let n = inputs.get(self.name(), "n")?;
        let a = inputs.get(self.name(), "a")?;
        let b = inputs.get(self.name(), "b")?;
        if !(a < b && b < 2 * a && 2 * a < n) {
            return Err(constraint(self.name(), "need a < b < 2a < n"));
        }
        let users = binomial(n, a);
        let f = binomial(n, b);
        let cached = urat(binomial(a, b - a) * binomial(n - a, a), f.clone());
        Ok(SchemeParams::exact(
            users.clone(),
            one_minus(cached, self.name())?,
            f.clone(),
            urat(users * binomial(n - a, 2 * a - b), f),
        ))
    }
}

struct PdaLift;

impl CatalogScheme for PdaLift {
    fn name(&self) -> &'static str {
        "pda-lift"
    }
    fn row(&self) -> u8 {
        8
    }
    fn params_help(&self) -> &'static str {
        "g (regularity is g+1), k, f, z, s of the source array"
    }
    fn eval(&self, inputs: &CatalogInputs) -> Result<SchemeParams, CatalogError> {
        let g = inputs.get(self.name(), "g")?;
        let k = inputs.get(self.name(), "k")?;
        let f = inputs.get(self.name(), "f")?;
        let z = inputs.get(self.name(), "z")?;
        let s = inputs.get(self.name(), "s")?;
        if g == 0 {
            return Err(constraint(self.name(), "g must be at least 1"));
        }
        if z == 0 || z >= f {
            return Err(constraint(self.name(), "need 0 < z < f"));
        }
        if s == 0 || k == 0 {
            return Err(constraint(self.name(), "k and s must be positive"));
        }
        Ok(SchemeParams {
            users: BigUint::from(k),
            subpacketization: BigUint::from(g * f),
            stars_per_column: Some(BigUint::from(g * z)),
            symbols: Some(BigUint::from((g + 1) * s)),
            memory_ratio: Some(urat(BigUint::from(z), BigUint::from(f))),
            memory_ratio_approx: None,
            load: urat(BigUint::from((g + 1) * s), BigUint::from(g * f)),
        })
    }
}

/// The registered catalog rows in table order.
pub fn schemes() -> &'static [&'static dyn CatalogScheme] {
    static REGISTRY: [&dyn CatalogScheme; 8] = [
        &Jcm,
        &RsGraph,
        &Hypercube,
        &SubsetPairs,
        &DoubledSubsets,
        &ResidueSet,
        &NestedSubsets,
        &PdaLift,
    ];
    &REGISTRY
}

/// Case-insensitive lookup by name (punctuation ignored) or by row number.
pub fn find_scheme(name: &str) -> Option<&'static dyn CatalogScheme> {
    let wanted: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    schemes().iter().copied().find(|s| {
        s.name()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase()
            == wanted
            || wanted == format!("row{}", s.row())
    })
}
