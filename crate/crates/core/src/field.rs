//! Prime-field arithmetic and linear-code codeword enumeration.
//!
//! Only prime moduli are supported. Codewords of an `(n, k)` code are
//! enumerated in message-index order, where message `i` is the base-`q`
//! digit expansion of `i` with the most significant digit first. Block
//! labels elsewhere in the crate depend on this ordering, so it is part
//! of the public contract.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NonPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("generator matrix is empty or ragged")]
    MalformedMatrix,
    #[error("matrix entry {value} is outside [0, {q})")]
    EntryOutOfRange { value: u64, q: u64 },
    #[error("generator matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("codebook with q^k = {q}^{k} elements is too large to enumerate")]
    CodebookTooLarge { q: u64, k: usize },
}

/// Arithmetic modulo a prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if !is_prime(q) {
            return Err(FieldError::NonPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a % self.q + b % self.q) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.q, b % self.q);
        (a + self.q - b) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (((a % self.q) as u128 * (b % self.q) as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.q;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat: `a^(q-2) mod q`.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }
}

/// A full-rank `k x n` generator matrix over GF(q).
///
/// Accepted as JSON `{"q": int, "rows": [[int, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorMatrixJson", into = "GeneratorMatrixJson")]
pub struct GeneratorMatrix {
    field: PrimeField,
    rows: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorMatrixJson {
    q: u64,
    rows: Vec<Vec<u64>>,
}

impl TryFrom<GeneratorMatrixJson> for GeneratorMatrix {
    type Error = FieldError;
    fn try_from(j: GeneratorMatrixJson) -> Result<Self, FieldError> {
        GeneratorMatrix::new(j.q, j.rows)
    }
}

impl From<GeneratorMatrix> for GeneratorMatrixJson {
    fn from(g: GeneratorMatrix) -> Self {
        GeneratorMatrixJson {
            q: g.field.modulus(),
            rows: g.rows,
        }
    }
}

impl GeneratorMatrix {
    pub fn new(q: u64, rows: Vec<Vec<u64>>) -> Result<Self, FieldError> {
        let field = PrimeField::new(q)?;
        let k = rows.len();
        if k == 0 || rows[0].is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(FieldError::MalformedMatrix);
        }
        for row in &rows {
            for &v in row {
                if v >= q {
                    return Err(FieldError::EntryOutOfRange { value: v, q });
                }
            }
        }
        let g = GeneratorMatrix { field, rows };
        let rank = g.rank();
        if rank != k {
            return Err(FieldError::RankDeficient { rank, expected: k });
        }
        Ok(g)
    }

    pub fn q(&self) -> u64 {
        self.field.modulus()
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Message length `k` (number of rows).
    pub fn message_len(&self) -> usize {
        self.rows.len()
    }

    /// Code length `n` (number of columns).
    pub fn code_len(&self) -> usize {
        self.rows[0].len()
    }

    /// Number of codewords, `q^k`, if it fits in a `u64` and stays desk-scale.
    pub fn codebook_size(&self) -> Result<u64, FieldError> {
        let q = self.q();
        let k = self.message_len();
        let mut size = 1u64;
        for _ in 0..k {
            size = size
                .checked_mul(q)
                .ok_or(FieldError::CodebookTooLarge { q, k })?;
            if size > 1 << 24 {
                return Err(FieldError::CodebookTooLarge { q, k });
            }
        }
        Ok(size)
    }

    fn rank(&self) -> usize {
        // Gaussian elimination over GF(q) on a scratch copy.
        let f = self.field;
        let mut m = self.rows.clone();
        let (k, n) = (m.len(), m[0].len());
        let mut rank = 0;
        let mut col = 0;
        while rank < k && col < n {
            let pivot = (rank..k).find(|&r| m[r][col] != 0);
            let Some(pivot) = pivot else {
                col += 1;
                continue;
            };
            m.swap(rank, pivot);
            let inv = f.inv(m[rank][col]).expect("pivot is nonzero");
            for cell in &mut m[rank][col..] {
                *cell = f.mul(*cell, inv);
            }
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let factor = row[col];
                    for (cell, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                        *cell = f.sub(*cell, f.mul(factor, p));
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Base-`q` digits of `index`, most significant first, as a message vector.
    pub fn message(&self, index: u64) -> Vec<u64> {
        let q = self.q();
        let k = self.message_len();
        let mut digits = vec![0u64; k];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = rest % q;
            rest /= q;
        }
        digits
    }

    /// Codeword at `index`: `message(index) . G` over GF(q).
    pub fn codeword(&self, index: u64) -> Vec<u64> {
        let f = self.field;
        let msg = self.message(index);
        let n = self.code_len();
        let mut cw = vec![0u64; n];
        for (digit, row) in msg.iter().zip(&self.rows) {
            for (acc, &g) in cw.iter_mut().zip(row) {
                *acc = f.add(*acc, f.mul(*digit, g));
            }
        }
        cw
    }

    /// All `q^k` codewords in message-index order.
    pub fn enumerate_codewords(&self) -> Result<Vec<Vec<u64>>, FieldError> {
        let size = self.codebook_size()?;
        Ok((0..size).map(|i| self.codeword(i)).collect())
    }
}
