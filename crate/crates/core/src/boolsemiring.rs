//! Dense Boolean matrices over `({0,1}, OR, AND)` with bit-packed rows.
//!
//! Rows are stored as little-endian `u64` words; bit `j` of row `i`
//! (both 0-based internally) holds entry `(i+1, j+1)` of the public,
//! 1-indexed matrix. Bits past column `n` are always zero, so derived
//! equality and hashing are exact.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::Hasher;

use serde::{Deserialize, Serialize};

use crate::{Error, Execution, Result};

const WORD: usize = 64;

/// Row count above which `multiply` hands rows out to the rayon pool.
pub const PARALLEL_MULTIPLY_THRESHOLD: usize = 192;

/// 128-bit digest of a matrix. Equal matrices share a fingerprint; the
/// converse must be confirmed with `==`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u128);

/// Square matrix over the binary Boolean semiring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

#[inline]
fn stride_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl BoolMatrix {
    /// All-zero `n x n` matrix.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let stride = stride_for(n);
        Ok(BoolMatrix {
            n,
            stride,
            words: vec![0; n * stride],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 1..=n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    /// All-ones `n x n` matrix (`J_n`).
    pub fn ones(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// Builds a matrix from a predicate on 1-indexed `(row, column)`.
    pub fn from_fn(n: usize, mut entry: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 1..=n {
            for j in 1..=n {
                if entry(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Parses `n` rows of `'0'`/`'1'` characters.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref().trim();
            if row.chars().count() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.chars().count()
                )));
            }
            for (j, c) in row.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => m.set(i + 1, j + 1, true),
                    other => {
                        return Err(Error::MalformedMatrix(format!(
                            "unexpected character {other:?} in row {}",
                            i + 1
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Parses the golden text format: a line holding `n`, then `n` rows.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedMatrix("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::MalformedMatrix(format!("bad dimension line {header:?}")))?;
        let rows: Vec<&str> = lines.collect();
        if rows.len() != n {
            return Err(Error::MalformedMatrix(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        Self::from_rows(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.row_strings() {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    pub fn row_strings(&self) -> Vec<String> {
        (1..=self.n)
            .map(|i| {
                (1..=self.n)
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 1-indexed.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        let (r, c) = (i - 1, j - 1);
        self.words[r * self.stride + c / WORD] >> (c % WORD) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: bool) {
        let (r, c) = (i - 1, j - 1);
        let w = &mut self.words[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// True when row `i` (1-indexed) has no nonzero entry.
    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i - 1).iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 1-indexed columns set in row `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row(i - 1).iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD + bits.trailing_zeros() as usize + 1);
                bits &= bits - 1;
            }
        }
        out
    }

    fn check_padding(&self) -> bool {
        let tail = self.n % WORD;
        if tail == 0 {
            return true;
        }
        let mask = !((1u64 << tail) - 1);
        (0..self.n).all(|r| self.row(r)[self.stride - 1] & mask == 0)
    }

    #[inline]
    fn debug_canonical(self) -> Self {
        debug_assert!(self.check_padding(), "padding bits must stay zero");
        self
    }

    fn product_row(&self, other: &BoolMatrix, r: usize, out: &mut [u64]) {
        for (wi, &w) in self.row(r).iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let k = wi * WORD + bits.trailing_zeros() as usize;
                for (o, &b) in out.iter_mut().zip(other.row(k)) {
                    *o |= b;
                }
                bits &= bits - 1;
            }
        }
    }

    /// Boolean product; parallel over rows for large `n` when enabled.
    pub fn multiply(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        let exec = if self.n >= PARALLEL_MULTIPLY_THRESHOLD {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        self.multiply_with(other, exec)
    }

    /// Boolean product with an explicit execution strategy.
    ///
    /// Row `i` of the result is the OR of the rows `k` of `other` for which
    /// `self(i, k) = 1`.
    pub fn multiply_with(&self, other: &BoolMatrix, exec: Execution) -> Result<BoolMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = BoolMatrix::zeros(self.n)?;
        let stride = self.stride;
        if exec.is_parallel() {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                out.words
                    .par_chunks_mut(stride)
                    .enumerate()
                    .for_each(|(r, dst)| self.product_row(other, r, dst));
            }
        } else {
            for (r, dst) in out.words.chunks_mut(stride).enumerate() {
                self.product_row(other, r, dst);
            }
        }
        Ok(out.debug_canonical())
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.n).expect("n >= 1");
        for i in 1..=self.n {
            for j in self.row_support(i) {
                out.set(j, i, true);
            }
        }
        out.debug_canonical()
    }

    /// `A^m` by repeated squaring; `A^0` is the identity.
    pub fn power(&self, m: u64) -> BoolMatrix {
        let mut result = BoolMatrix::identity(self.n).expect("n >= 1");
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                base = base.multiply(&base).expect("same dimension");
            }
        }
        result
    }

    /// `self * self^T`: entry `(i, j)` is 1 iff rows `i` and `j` share a
    /// nonzero column.
    pub fn gram(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zeros(self.n).expect("n >= 1");
        for i in 0..self.n {
            for j in i..self.n {
                let meet = self.row(i).iter().zip(self.row(j)).any(|(a, b)| a & b != 0);
                if meet {
                    out.set(i + 1, j + 1, true);
                    out.set(j + 1, i + 1, true);
                }
            }
        }
        out.debug_canonical()
    }

    /// Constant along every diagonal: `(i, j) = (i+1, j+1)` wherever both exist.
    pub fn is_toeplitz(&self) -> bool {
        (1..self.n).all(|i| (1..self.n).all(|j| self.get(i, j) == self.get(i + 1, j + 1)))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn diagonal_all_ones(&self) -> bool {
        (1..=self.n).all(|i| self.get(i, i))
    }

    /// Principal submatrix on the given 1-indexed vertices, in that order.
    pub fn principal_submatrix(&self, vertices: &[usize]) -> Result<BoolMatrix> {
        BoolMatrix::from_fn(vertices.len(), |a, b| {
            self.get(vertices[a - 1], vertices[b - 1])
        })
    }

    /// `P A P^T` where `order[k]` is the vertex placed at position `k + 1`.
    pub fn permute(&self, order: &[usize]) -> Result<BoolMatrix> {
        if order.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: order.len(),
            });
        }
        self.principal_submatrix(order)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let half = |seed: u64| {
            let mut h = DefaultHasher::new();
            h.write_u64(seed);
            h.write_usize(self.n);
            for &w in &self.words {
                h.write_u64(w);
            }
            h.finish()
        };
        let hi = half(0x9e37_79b9_7f4a_7c15);
        let lo = half(0xc2b2_ae3d_27d4_eb4f);
        Fingerprint((hi as u128) << 64 | lo as u128)
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix({})", self.n)?;
        for row in self.row_strings() {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<String>,
}

impl Serialize for BoolMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            n: self.n,
            rows: self.row_strings(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoolMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.rows.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "expected {} rows, found {}",
                raw.n,
                raw.rows.len()
            )));
        }
        BoolMatrix::from_rows(&raw.rows).map_err(serde::de::Error::custom)
    }
}
