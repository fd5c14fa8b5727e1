//! Dense GF(2) linear algebra on bit-packed words.
//!
//! Vectors and matrices store 64 bits per word, row-major. Addition is XOR,
//! so elimination runs a word at a time. Everything here is immutable from
//! the caller's side once constructed; operations return fresh values and
//! are safe to run from many threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

const WORD_BITS: usize = 64;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self, Gf2Error> {
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Gf2Error::Parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(v)
    }

    /// Uniform random vector, one bit per position.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = BitVec::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place XOR with another vector of the same length.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor_assign: length mismatch");
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(wi * WORD_BITS + b);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Sub-vector at the given positions, in order.
    pub fn select(&self, positions: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(positions.len());
        for (j, &i) in positions.iter().enumerate() {
            if self.get(i) {
                out.set(j, true);
            }
        }
        out
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// A dense matrix over GF(2), rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let row_words = words_for(cols);
        BitMatrix {
            rows,
            cols,
            row_words,
            data: vec![0; rows * row_words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "from_rows: ragged rows");
            m.row_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds from strings of `0`/`1`, one per row.
    pub fn parse_rows(rows: &[&str]) -> Result<Self, Gf2Error> {
        let parsed: Result<Vec<_>, _> = rows.iter().map(|s| BitVec::parse(s)).collect();
        let parsed = parsed?;
        if let Some(first) = parsed.first() {
            if parsed.iter().any(|r| r.len() != first.len()) {
                return Err(Gf2Error::Parse("ragged rows".into()));
            }
        }
        Ok(BitMatrix::from_rows(&parsed))
    }

    /// Uniform random matrix, deterministic for a given generator state.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for w in m.row_mut(r) {
                *w = rng.gen();
            }
        }
        m.mask_tails();
        m
    }

    /// Uniform random matrix from a bare seed.
    pub fn random_seeded(rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BitMatrix::random(rows, cols, &mut rng)
    }

    fn mask_tails(&mut self) {
        let rem = self.cols % WORD_BITS;
        if rem == 0 {
            return;
        }
        let mask = (1u64 << rem) - 1;
        for r in 0..self.rows {
            let w = self.row_words;
            self.data[r * w + w - 1] &= mask;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.row_words..(r + 1) * self.row_words]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.row_words..(r + 1) * self.row_words]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.row(r)[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.row_mut(r)[c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_vec(&self, r: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row(r).to_vec(),
        }
    }

    pub fn col_vec(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.row_words;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&lo[src * w..src * w + w], &mut hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&hi[..w], &mut lo[dst * w..dst * w + w])
        };
        for (d, s) in b.iter_mut().zip(a.iter()) {
            *d ^= *s;
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.row_words;
        for i in 0..w {
            self.data.swap(a * w + i, b * w + i);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let row = self.row(r);
            for (wi, &w) in row.iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    t.set(wi * WORD_BITS + b, r, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    /// Row submatrix at the given row indices, in order.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(indices.len(), self.cols);
        for (j, &i) in indices.iter().enumerate() {
            let src = self.row(i).to_vec();
            m.row_mut(j).copy_from_slice(&src);
        }
        m
    }

    /// Column submatrix at the given column indices, in order.
    pub fn select_cols(&self, indices: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, indices.len());
        for (j, &c) in indices.iter().enumerate() {
            assert!(c < self.cols, "select_cols: column {c} out of range");
            for r in 0..self.rows {
                if self.get(r, c) {
                    m.set(r, j, true);
                }
            }
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hstack: row count mismatch");
        let mut m = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    m.set(r, c, true);
                }
            }
            for c in 0..other.cols {
                if other.get(r, c) {
                    m.set(r, self.cols + c, true);
                }
            }
        }
        m
    }

    /// Matrix-vector product `M x`.
    pub fn mat_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.cols, x.len(), "mat_vec: dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row(r).iter().zip(x.words().iter()) {
                acc ^= a & b;
            }
            if acc.count_ones() & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Transposed product `Mᵀ y` without materializing the transpose:
    /// the XOR of the rows of `M` selected by the set bits of `y`.
    pub fn transpose_mat_vec(&self, y: &BitVec) -> BitVec {
        assert_eq!(self.rows, y.len(), "transpose_mat_vec: dimension mismatch");
        let mut words = vec![0u64; self.row_words];
        for i in y.ones() {
            for (d, s) in words.iter_mut().zip(self.row(i).iter()) {
                *d ^= *s;
            }
        }
        BitVec {
            len: self.cols,
            words,
        }
    }

    /// Matrix product `self · other`.
    pub fn mat_mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "mat_mul: dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![0u64; other.row_words];
            let row = self.row(r);
            for (wi, &w) in row.iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    let k = wi * WORD_BITS + b;
                    for (d, s) in acc.iter_mut().zip(other.row(k).iter()) {
                        *d ^= *s;
                    }
                    bits &= bits - 1;
                }
            }
            out.row_mut(r).copy_from_slice(&acc);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Rank by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in rank + 1..m.rows {
                if m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Reduced row-echelon form with rank and pivot columns.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        Rref {
            matrix: m,
            rank,
            pivots,
        }
    }

    /// Basis of `{x : M x = 0}`, returned as the columns of an
    /// `cols × (cols − rank)` matrix.
    pub fn null_space(&self) -> BitMatrix {
        let Rref {
            matrix: r,
            rank,
            pivots,
        } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = BitMatrix::zeros(self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            basis.set(fc, j, true);
            for (pi, &pc) in pivots.iter().enumerate().take(rank) {
                if r.get(pi, fc) {
                    basis.set(pc, j, true);
                }
            }
        }
        basis
    }

    /// Serializes to the plain text exchange format: a `rows cols` header
    /// line followed by one `0`/`1` string per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            out.push_str(&self.row_vec(r).to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Gf2Error::Parse("bad header".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Gf2Error::Parse("bad header".into()))?;
        if parts.next().is_some() {
            return Err(Gf2Error::Parse("trailing header fields".into()));
        }
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("missing row {r}")))?;
            if line.len() != cols {
                return Err(Gf2Error::Parse(format!(
                    "row {r} has {} characters, expected {cols}",
                    line.len()
                )));
            }
            let v = BitVec::parse(line)?;
            m.row_mut(r).copy_from_slice(v.words());
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Gf2Error::Parse("trailing content after last row".into()));
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row_vec(r))?;
        }
        Ok(())
    }
}

/// Output of [`BitMatrix::rref`].
pub struct Rref {
    pub matrix: BitMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// How to fill unconstrained variables when a system has several solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreePolicy {
    /// Set every free variable to zero.
    Zeros,
    /// Draw free variables uniformly from a seeded generator, making the
    /// choice uniform over the whole solution set.
    RandomSeeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveTag {
    Unique,
    Multiple,
    Inconsistent,
}

/// Outcome of solving `A x = b`.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub tag: SolveTag,
    pub solution: Option<BitVec>,
    pub free_var_count: usize,
}

/// Solves `A x = b` exactly. Free variables are filled per `policy`; the tag
/// records whether the solution was unique, one of `2^free_var_count`, or
/// nonexistent.
pub fn solve(a: &BitMatrix, b: &BitVec, policy: FreePolicy) -> Result<SolveOutcome, Gf2Error> {
    if a.rows != b.len() {
        return Err(Gf2Error::DimensionMismatch(format!(
            "solve: matrix has {} rows but rhs has {} entries",
            a.rows,
            b.len()
        )));
    }
    let elim = eliminate(a, b, policy);
    if elim.unsatisfied > 0 {
        return Ok(SolveOutcome {
            tag: SolveTag::Inconsistent,
            solution: None,
            free_var_count: 0,
        });
    }
    let free = a.cols - elim.rank;
    let tag = if free == 0 {
        SolveTag::Unique
    } else {
        SolveTag::Multiple
    };
    Ok(SolveOutcome {
        tag,
        solution: Some(elim.solution),
        free_var_count: free,
    })
}

/// Partial solve used by encoders that must emit something even when the
/// system is inconsistent: rows that reduce to `0 = 1` are dropped and the
/// returned vector satisfies every remaining row.
pub struct LenientSolve {
    pub solution: BitVec,
    pub consistent: bool,
    pub free_var_count: usize,
}

pub fn solve_lenient(a: &BitMatrix, b: &BitVec, policy: FreePolicy) -> LenientSolve {
    assert_eq!(a.rows, b.len(), "solve_lenient: dimension mismatch");
    let elim = eliminate(a, b, policy);
    LenientSolve {
        solution: elim.solution,
        consistent: elim.unsatisfied == 0,
        free_var_count: a.cols - elim.rank,
    }
}

struct Elimination {
    solution: BitVec,
    rank: usize,
    unsatisfied: usize,
}

fn eliminate(a: &BitMatrix, b: &BitVec, policy: FreePolicy) -> Elimination {
    // Gauss-Jordan on [A | b]; after the sweep each pivot row constrains its
    // pivot variable in terms of free variables only.
    let mut aug = a.hstack(&BitMatrix::from_rows(std::slice::from_ref(b)).transpose());
    let bcol = a.cols;
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..a.cols {
        let Some(p) = (rank..aug.rows).find(|&r| aug.get(r, col)) else {
            continue;
        };
        aug.swap_rows(rank, p);
        for r in 0..aug.rows {
            if r != rank && aug.get(r, col) {
                aug.xor_row_into(rank, r);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == aug.rows {
            break;
        }
    }
    let unsatisfied = (rank..aug.rows).filter(|&r| aug.get(r, bcol)).count();

    let mut x = BitVec::zeros(a.cols);
    let mut is_pivot = vec![false; a.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    match policy {
        FreePolicy::Zeros => {}
        FreePolicy::RandomSeeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (c, &pivot) in is_pivot.iter().enumerate() {
                if !pivot && rng.gen::<bool>() {
                    x.set(c, true);
                }
            }
        }
    }
    for (i, &c) in pivots.iter().enumerate() {
        // row i reads: x_c + sum over free columns = b_i
        let mut acc = 0u64;
        for (rw, xw) in aug.row(i).iter().zip(x.words().iter()) {
            acc ^= rw & xw;
        }
        let mut bit = acc.count_ones() & 1 == 1;
        bit ^= aug.get(i, bcol);
        x.set(c, bit);
    }
    Elimination {
        solution: x,
        rank,
        unsatisfied,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    // Bit-at-a-time elimination kept deliberately naive; the packed code is
    // checked against it.
    fn naive_rank(m: &BitMatrix) -> usize {
        let mut rows: Vec<Vec<u8>> = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect())
            .collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[col] == 1 {
                    for (a, b) in row.iter_mut().zip(pivot_row.iter()) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn naive_solve(a: &BitMatrix, b: &BitVec) -> Option<Vec<u8>> {
        let cols = a.cols();
        let mut rows: Vec<(Vec<u8>, u8)> = (0..a.rows())
            .map(|r| {
                (
                    (0..cols).map(|c| a.get(r, c) as u8).collect(),
                    b.get(r) as u8,
                )
            })
            .collect();
        let mut rank = 0;
        let mut pivots = Vec::new();
        for col in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].0[col] == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let (prow, pb) = rows[rank].clone();
            for (r, (row, rb)) in rows.iter_mut().enumerate() {
                if r != rank && row[col] == 1 {
                    for (a, b) in row.iter_mut().zip(prow.iter()) {
                        *a ^= b;
                    }
                    *rb ^= pb;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        for (row, rb) in rows.iter().skip(rank) {
            if row.iter().all(|&v| v == 0) && *rb == 1 {
                return None;
            }
        }
        let mut x = vec![0u8; cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = rows[i].1;
        }
        Some(x)
    }

    #[test]
    fn rref_identity() {
        let id = BitMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_zero_matrix() {
        let z = BitMatrix::zeros(4, 5);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_dependent_rows() {
        let m = BitMatrix::parse_rows(&["110", "011", "101"]).unwrap();
        let r = m.rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        // row space is preserved: every original row reduces to zero against R
        let rr = r.matrix.rref();
        assert_eq!(rr.matrix, r.matrix, "rref must be idempotent");
    }

    #[test]
    fn solve_identity() {
        let a = BitMatrix::identity(3);
        let b = BitVec::parse("101").unwrap();
        let out = solve(&a, &b, FreePolicy::Zeros).unwrap();
        assert_eq!(out.tag, SolveTag::Unique);
        assert_eq!(out.free_var_count, 0);
        assert_eq!(out.solution.unwrap(), b);
    }

    #[test]
    fn solve_contradictory_rows() {
        let a = BitMatrix::parse_rows(&["11", "11"]).unwrap();
        let b = BitVec::parse("10").unwrap();
        let out = solve(&a, &b, FreePolicy::Zeros).unwrap();
        assert_eq!(out.tag, SolveTag::Inconsistent);
        assert!(out.solution.is_none());
    }

    #[test]
    fn solve_underdetermined_zeros_policy() {
        let a = BitMatrix::parse_rows(&["11"]).unwrap();
        let b = BitVec::parse("1").unwrap();
        let out = solve(&a, &b, FreePolicy::Zeros).unwrap();
        assert_eq!(out.tag, SolveTag::Multiple);
        assert_eq!(out.free_var_count, 1);
        let x = out.solution.unwrap();
        assert_eq!(x.to_string(), "10");
        // both candidates satisfy the system; ours is the zeros-policy one
        assert_eq!(a.mat_vec(&x), b);
    }

    #[test]
    fn solve_dimension_mismatch_rejected() {
        let a = BitMatrix::identity(3);
        let b = BitVec::zeros(4);
        assert!(solve(&a, &b, FreePolicy::Zeros).is_err());
    }

    #[test]
    fn rank_matches_naive_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let r = rng.gen_range(1..=12);
            let c = rng.gen_range(1..=12);
            let m = BitMatrix::random(r, c, &mut rng);
            assert_eq!(m.rank(), naive_rank(&m));
            assert_eq!(m.rank(), m.transpose().rank());
        }
        // taller shapes used by the rank-deficiency statistics
        for seed in 0..50 {
            let m = BitMatrix::random_seeded(20, 10, seed);
            assert_eq!(m.rank(), naive_rank(&m));
        }
    }

    #[test]
    fn solve_matches_naive_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let r = rng.gen_range(1..=10);
            let c = rng.gen_range(1..=10);
            let a = BitMatrix::random(r, c, &mut rng);
            let b = BitVec::random(r, &mut rng);
            let ours = solve(&a, &b, FreePolicy::Zeros).unwrap();
            match naive_solve(&a, &b) {
                None => assert_eq!(ours.tag, SolveTag::Inconsistent),
                Some(_) => {
                    let x = ours
                        .solution
                        .expect("consistent system must produce a solution");
                    assert_eq!(a.mat_vec(&x), b, "A·x must equal b bit-exactly");
                }
            }
        }
    }

    #[test]
    fn consistency_iff_augmented_rank_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let r = rng.gen_range(1..=12);
            let c = rng.gen_range(1..=12);
            let a = BitMatrix::random(r, c, &mut rng);
            let b = BitVec::random(r, &mut rng);
            let aug = a.hstack(&BitMatrix::from_rows(std::slice::from_ref(&b)).transpose());
            let consistent =
                solve(&a, &b, FreePolicy::Zeros).unwrap().tag != SolveTag::Inconsistent;
            assert_eq!(consistent, a.rank() == aug.rank());
        }
    }

    #[test]
    fn solution_count_is_two_to_free_vars() {
        // exhaustive over all x for small systems
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let r = rng.gen_range(1..=6);
            let c = rng.gen_range(1..=10);
            let a = BitMatrix::random(r, c, &mut rng);
            let b = BitVec::random(r, &mut rng);
            let out = solve(&a, &b, FreePolicy::Zeros).unwrap();
            let mut count = 0u64;
            for bits in 0..(1u64 << c) {
                let x =
                    BitVec::from_bools(&(0..c).map(|i| (bits >> i) & 1 == 1).collect::<Vec<_>>());
                if a.mat_vec(&x) == b {
                    count += 1;
                }
            }
            match out.tag {
                SolveTag::Inconsistent => assert_eq!(count, 0),
                _ => assert_eq!(count, 1u64 << out.free_var_count),
            }
        }
    }

    #[test]
    fn solve_across_word_boundaries() {
        // column counts straddling the 64-bit packing boundary, where the
        // augmented right-hand-side column lands in a fresh word or shares
        // the last one
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for c in [63usize, 64, 65, 127, 128] {
            let a = BitMatrix::random(c + 5, c, &mut rng);
            let x = BitVec::random(c, &mut rng);
            let b = a.mat_vec(&x);
            let out = solve(&a, &b, FreePolicy::Zeros).unwrap();
            let got = out.solution.expect("constructed system is consistent");
            assert_eq!(a.mat_vec(&got), b, "cols = {c}");
        }
    }

    #[test]
    fn random_free_policy_solutions_satisfy_system() {
        let a = BitMatrix::parse_rows(&["1100", "0110"]).unwrap();
        let b = BitVec::parse("10").unwrap();
        for seed in 0..32 {
            let out = solve(&a, &b, FreePolicy::RandomSeeded(seed)).unwrap();
            let x = out.solution.unwrap();
            assert_eq!(a.mat_vec(&x), b);
        }
    }

    #[test]
    fn lenient_solve_satisfies_consistent_subset() {
        let a = BitMatrix::parse_rows(&["11", "11", "10"]).unwrap();
        let b = BitVec::parse("101").unwrap();
        let out = solve_lenient(&a, &b, FreePolicy::Zeros);
        assert!(!out.consistent);
        // rows 0 and 2 are satisfiable together; row 1 contradicts row 0
        let residual = a.mat_vec(&out.solution).xor(&b);
        assert_eq!(residual.weight(), 1);
    }

    #[test]
    fn null_space_spans_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let r = rng.gen_range(1..=10);
            let c = rng.gen_range(1..=10);
            let m = BitMatrix::random(r, c, &mut rng);
            let ns = m.null_space();
            assert_eq!(ns.cols(), c - m.rank());
            for j in 0..ns.cols() {
                let v = ns.col_vec(j);
                assert!(m.mat_vec(&v).is_zero());
            }
            assert_eq!(ns.rank(), ns.cols(), "kernel basis must be independent");
        }
    }

    #[test]
    fn matvec_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let m = BitMatrix::random(8, 8, &mut rng);
        assert!(m.mat_vec(&BitVec::zeros(8)).is_zero());
        let x = BitVec::random(8, &mut rng);
        assert_eq!(BitMatrix::identity(8).mat_vec(&x), x);
        let a = BitMatrix::random(8, 8, &mut rng);
        let b = BitMatrix::random(8, 8, &mut rng);
        for _ in 0..16 {
            let x = BitVec::random(8, &mut rng);
            assert_eq!(a.mat_mul(&b).mat_vec(&x), a.mat_vec(&b.mat_vec(&x)));
        }
    }

    #[test]
    fn transpose_mat_vec_agrees_with_materialized_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let r = rng.gen_range(1..=20);
            let c = rng.gen_range(1..=20);
            let m = BitMatrix::random(r, c, &mut rng);
            let y = BitVec::random(r, &mut rng);
            assert_eq!(m.transpose_mat_vec(&y), m.transpose().mat_vec(&y));
        }
    }

    #[test]
    fn text_roundtrip() {
        let m = BitMatrix::random_seeded(5, 9, 99);
        let text = m.to_text();
        assert!(text.starts_with("5 9\n"));
        assert_eq!(BitMatrix::from_text(&text).unwrap(), m);
        assert!(BitMatrix::from_text("2 2\n01\n0").is_err());
        assert!(BitMatrix::from_text("2 2\n01\n0x\n").is_err());
    }

    proptest! {
        #[test]
        fn prop_rref_idempotent(seed in 0u64..500, r in 1usize..10, c in 1usize..10) {
            let m = BitMatrix::random_seeded(r, c, seed);
            let rref1 = m.rref();
            let rref2 = rref1.matrix.rref();
            prop_assert_eq!(rref1.matrix, rref2.matrix);
            prop_assert_eq!(rref1.rank, rref2.rank);
        }

        #[test]
        fn prop_transpose_involution(seed in 0u64..500, r in 1usize..16, c in 1usize..16) {
            let m = BitMatrix::random_seeded(r, c, seed);
            prop_assert_eq!(m.transpose().transpose(), m);
        }

        #[test]
        fn prop_consistent_solution_exact(seed in 0u64..500, r in 1usize..10, c in 1usize..10) {
            let m = BitMatrix::random_seeded(r, c, seed);
            let x = BitVec::random(c, &mut ChaCha8Rng::seed_from_u64(seed ^ 0xabcd));
            let b = m.mat_vec(&x);
            let out = solve(&m, &b, FreePolicy::RandomSeeded(seed)).unwrap();
            let got = out.solution.expect("constructed system is consistent");
            prop_assert_eq!(m.mat_vec(&got), b);
        }
    }
}
