//! Linear block codes and partitioned linear block codes.
//!
//! A [`LinearCode`] is a generator/parity-check pair `(G, H)` with `c = G m`
//! and `Hᵀ c = 0`. A [`PartitionedCode`] splits the codeword space into a
//! message part `G1` and a masking part `G0`, with a message-inverse `H0`
//! (`H0ᵀ G1 = I`, `H0ᵀ G0 = 0`) and a parity check `H~` of the direct sum.
//! PBCH constructions derive both `G0` and `H~` from BCH parity-check
//! matrices, so their masking and erasure distances come from BCH designed
//! distances.

pub mod bch;

use crate::gf2::{BitMatrix, BitVec};
use serde::{Deserialize, Serialize};

pub use bch::BchCode;

/// Codeword enumeration cap for exact weight distributions and distances.
pub const ENUMERATION_BUDGET_LOG2: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum CodeError {
    #[error("unsupported field degree m={m} (supported: 3..=10)")]
    UnsupportedField { m: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("generator matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("unrealizable code (n={n}, k={k}, l={l}); nearest realizable l values: {nearest:?}")]
    Unrealizable {
        n: usize,
        k: usize,
        l: usize,
        nearest: Vec<usize>,
    },
    #[error("dimension {dim} exceeds the enumeration budget of 2^{budget} codewords")]
    EnumerationBudget { dim: usize, budget: usize },
}

/// Whether a reported distance was enumerated or taken from a designed
/// (BCH) construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distance {
    Exact(u32),
    Designed(u32),
}

impl Distance {
    pub fn value(&self) -> u32 {
        match *self {
            Distance::Exact(d) | Distance::Designed(d) => d,
        }
    }
}

/// JSON-serializable description of a code, sufficient to rebuild it
/// bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CodeDescriptor {
    pub family: String,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primitive_poly: Option<u32>,
}

/// An `[n, k]` linear code with generator `G` (n×k), parity check `H`
/// (n×(n−k)), and a precomputed message inverse for codeword→message maps.
#[derive(Debug, Clone)]
pub struct LinearCode {
    pub n: usize,
    pub k: usize,
    pub g: BitMatrix,
    pub h: BitMatrix,
    ginv: BitMatrix,
    pub designed_distance: Option<u32>,
    pub descriptor: CodeDescriptor,
}

impl LinearCode {
    /// Builds a code from a full-column-rank generator; `H` spans the null
    /// space of `Gᵀ`.
    pub fn from_generator(g: BitMatrix) -> Result<Self, CodeError> {
        let n = g.rows();
        let k = g.cols();
        let rank = g.rank();
        if rank != k {
            return Err(CodeError::RankDeficient { rank, cols: k });
        }
        let h = g.transpose().null_space();
        let ginv = right_inverse_columns(&g, k);
        let descriptor = CodeDescriptor {
            family: "generator".into(),
            n,
            k,
            l: None,
            m: None,
            t0: None,
            t1: None,
            primitive_poly: None,
        };
        Ok(LinearCode {
            n,
            k,
            g,
            h,
            ginv,
            designed_distance: None,
            descriptor,
        })
    }

    /// The `[7,4]` Hamming code in systematic form.
    pub fn hamming_7_4() -> Self {
        let g = BitMatrix::parse_rows(&["1000", "0100", "0010", "0001", "1101", "1011", "0111"])
            .unwrap();
        let mut code = LinearCode::from_generator(g).unwrap();
        code.designed_distance = Some(3);
        code.descriptor.family = "hamming74".into();
        code
    }

    /// Narrow-sense primitive BCH code used as a generator-matrix (erasure
    /// correction) code.
    pub fn bch(m: u32, t: u32) -> Result<Self, CodeError> {
        let bch = BchCode::new(m, t)?;
        let g = bch.generator_matrix();
        let h = bch.parity_check_matrix();
        let ginv = right_inverse_columns(&g, bch.k);
        let descriptor = CodeDescriptor {
            family: "bch".into(),
            n: bch.n,
            k: bch.k,
            l: None,
            m: Some(m),
            t0: None,
            t1: Some(t),
            primitive_poly: Some(bch::primitive_poly(m)?),
        };
        Ok(LinearCode {
            n: bch.n,
            k: bch.k,
            g,
            h,
            ginv,
            designed_distance: Some(bch.designed_distance()),
            descriptor,
        })
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn encode(&self, message: &BitVec) -> BitVec {
        self.g.mat_vec(message)
    }

    /// Message of a codeword: `Ginvᵀ c`, exact because rank(G) = k.
    pub fn message_of(&self, codeword: &BitVec) -> BitVec {
        self.ginv.transpose_mat_vec(codeword)
    }

    pub fn minimum_distance(&self) -> Result<Distance, CodeError> {
        if self.k <= ENUMERATION_BUDGET_LOG2 {
            Ok(Distance::Exact(minimum_distance_exact(&self.g)?))
        } else if let Some(d) = self.designed_distance {
            Ok(Distance::Designed(d))
        } else {
            Err(CodeError::EnumerationBudget {
                dim: self.k,
                budget: ENUMERATION_BUDGET_LOG2,
            })
        }
    }
}

/// An `[n, k, l]` partitioned linear block code: codewords are
/// `c = G1 m + G0 d` with `r = n - k - l` erasure-parity bits implied by the
/// parity check `H~` of `[G1 G0]`.
#[derive(Debug, Clone)]
pub struct PartitionedCode {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub g1: BitMatrix,
    pub g0: BitMatrix,
    pub h0: BitMatrix,
    pub htilde: BitMatrix,
    /// Designed masking distance; 0 stands for "no masking part" (l = 0).
    pub d0_designed: Option<u32>,
    /// Designed erasure distance; 0 stands for "no erasure part" (r = 0).
    pub d1_designed: Option<u32>,
    pub descriptor: CodeDescriptor,
}

impl PartitionedCode {
    pub fn r(&self) -> usize {
        self.n - self.k - self.l
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Stacked `[G1 G0]`, the generator of the erasure-correcting code.
    pub fn gtilde(&self) -> BitMatrix {
        self.g1.hstack(&self.g0)
    }

    /// Builds a partitioned code from explicit part generators. `H0` and
    /// `H~` are derived; `rank [G1 G0]` must be `k + l`.
    pub fn from_parts(g1: BitMatrix, g0: BitMatrix) -> Result<Self, CodeError> {
        let n = g1.rows();
        if g0.rows() != n {
            return Err(CodeError::InvalidParam(
                "from_parts: G1/G0 row mismatch".into(),
            ));
        }
        let k = g1.cols();
        let l = g0.cols();
        if k + l > n {
            return Err(CodeError::InvalidParam(format!(
                "from_parts: k+l = {} exceeds n = {n}",
                k + l
            )));
        }
        let gtilde = g1.hstack(&g0);
        let rank = gtilde.rank();
        if rank != k + l {
            return Err(CodeError::RankDeficient { rank, cols: k + l });
        }
        let h0 = right_inverse_columns(&gtilde, k);
        let htilde = gtilde.transpose().null_space();
        let descriptor = CodeDescriptor {
            family: "partitioned".into(),
            n,
            k,
            l: Some(l),
            m: None,
            t0: None,
            t1: None,
            primitive_poly: None,
        };
        Ok(PartitionedCode {
            n,
            k,
            l,
            g1,
            g0,
            h0,
            htilde,
            d0_designed: None,
            d1_designed: None,
            descriptor,
        })
    }

    /// PBCH construction: `G0` is the parity check of the redundancy-`l` BCH
    /// code and `H~` the parity check of the redundancy-`r` BCH code, so the
    /// designed distances are `d0 = 2 t0 + 1` and `d1 = 2 t1 + 1` with
    /// `t0 = l/m`, `t1 = r/m`.
    pub fn pbch(n: usize, k: usize, l: usize) -> Result<Self, CodeError> {
        let m = usize::BITS - n.leading_zeros();
        if n == 0 || n != (1usize << m) - 1 {
            return Err(CodeError::InvalidParam(format!(
                "pbch: n = {n} is not of the form 2^m - 1"
            )));
        }
        bch::primitive_poly(m)?;
        if k + l > n {
            return Err(CodeError::InvalidParam(format!(
                "pbch: k + l = {} exceeds n = {n}",
                k + l
            )));
        }
        let r = n - k - l;
        let realizable = realizable_redundancies(m, n);
        let find_t = |red: usize| realizable.iter().find(|&&(_, d)| d == red).map(|&(t, _)| t);
        let (t0, t1) = match (find_t(l), find_t(r)) {
            (Some(t0), Some(t1)) => (t0, t1),
            _ => {
                let mut nearest: Vec<usize> = realizable
                    .iter()
                    .map(|&(_, d)| d)
                    .filter(|&d| d <= n - k && find_t(n - k - d).is_some())
                    .collect();
                nearest.sort_by_key(|&cand| cand.abs_diff(l));
                nearest.truncate(4);
                return Err(CodeError::Unrealizable { n, k, l, nearest });
            }
        };

        let g0 = if t0 == 0 {
            BitMatrix::zeros(n, 0)
        } else {
            BchCode::new(m, t0)?.parity_check_matrix()
        };
        let (htilde, ctilde_basis) = if t1 == 0 {
            (BitMatrix::zeros(n, 0), BitMatrix::identity(n))
        } else {
            let h = BchCode::new(m, t1)?.parity_check_matrix();
            let basis = h.transpose().null_space();
            (h, basis)
        };
        // The masking space must sit inside the erasure-correcting code for
        // the split to exist; this holds throughout the realizable range.
        if !htilde.transpose().mat_mul(&g0).is_zero() {
            return Err(CodeError::InvalidParam(format!(
                "pbch: masking space not contained in the [n, k+l] code at (n={n}, k={k}, l={l})"
            )));
        }
        let g1 = extend_basis(&g0, &ctilde_basis, k);
        let mut code = Self::from_parts(g1, g0)?;
        code.d0_designed = Some(if t0 == 0 { 0 } else { 2 * t0 + 1 });
        code.d1_designed = Some(if t1 == 0 { 0 } else { 2 * t1 + 1 });
        code.descriptor = CodeDescriptor {
            family: "pbch".into(),
            n,
            k,
            l: Some(l),
            m: Some(m),
            t0: Some(t0),
            t1: Some(t1),
            primitive_poly: Some(bch::primitive_poly(m)?),
        };
        Ok(code)
    }

    /// Pure defect-channel code (`r = 0`): the whole space partitioned into
    /// `col(G0)` and a complement picked from unit vectors.
    pub fn pure_bdc_from_g0(g0: BitMatrix) -> Result<Self, CodeError> {
        let n = g0.rows();
        let l = g0.cols();
        let g1 = extend_basis(&g0, &BitMatrix::identity(n), n - l);
        Self::from_parts(g1, g0)
    }
}

/// All (t, redundancy) pairs realizable at this field degree, including the
/// empty code part (0, 0).
fn realizable_redundancies(m: u32, n: usize) -> Vec<(u32, usize)> {
    let mut out = vec![(0u32, 0usize)];
    let mut t = 1u32;
    loop {
        if 2 * t as usize >= n {
            break;
        }
        let red = bch::root_exponents(m, t).len();
        if red >= n {
            break;
        }
        // repeated redundancy means the extra roots were already covered;
        // keep the smallest t for a given degree
        if out.last().map(|&(_, d)| d) != Some(red) {
            out.push((t, red));
        }
        t += 1;
    }
    out
}

/// Picks columns of `candidates` that extend the column space of `base` to
/// `extra` additional dimensions, greedily and deterministically.
fn extend_basis(base: &BitMatrix, candidates: &BitMatrix, extra: usize) -> BitMatrix {
    let n = base.rows();
    // eliminated basis of the span so far, indexed by leading bit
    let mut by_lead: Vec<Option<BitVec>> = vec![None; n];
    let mut absorb = |v: BitVec| -> bool {
        let mut cur = v;
        while let Some(lead) = cur.first_one() {
            match &by_lead[lead] {
                Some(r) => {
                    let r = r.clone();
                    cur.xor_assign(&r);
                }
                None => {
                    by_lead[lead] = Some(cur);
                    return true;
                }
            }
        }
        false
    };
    for j in 0..base.cols() {
        let added = absorb(base.col_vec(j));
        debug_assert!(added, "base columns must be independent");
    }
    let mut picked = Vec::new();
    for j in 0..candidates.cols() {
        if picked.len() == extra {
            break;
        }
        let col = candidates.col_vec(j);
        if absorb(col.clone()) {
            picked.push(col);
        }
    }
    assert_eq!(
        picked.len(),
        extra,
        "candidate columns do not span enough dimensions"
    );
    let mut g = BitMatrix::zeros(n, extra);
    for (c, v) in picked.iter().enumerate() {
        for i in v.ones() {
            g.set(i, c, true);
        }
    }
    g
}

/// Right inverse restricted to the first `keep` coordinates: returns an
/// `n × keep` matrix `X` with `Aᵀ X = [I_keep; 0]` for `A` of full column
/// rank, i.e. `Xᵀ` inverts the first `keep` columns of `A` and annihilates
/// the rest.
///
/// One elimination of `[Aᵀ | I]` serves every column: with row operations
/// `T` such that `T Aᵀ` is in reduced echelon form with pivot columns `p_i`,
/// the solution of `Aᵀ x = e_j` is `x[p_i] = T[i, j]`.
fn right_inverse_columns(a: &BitMatrix, keep: usize) -> BitMatrix {
    let at = a.transpose();
    let rows = at.rows();
    let cols = at.cols();
    let mut aug = at.hstack(&BitMatrix::identity(rows));
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| aug.get(r, col)) else {
            continue;
        };
        aug.swap_rows(rank, p);
        for r in 0..rows {
            if r != rank && aug.get(r, col) {
                aug.xor_row_into(rank, r);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    assert_eq!(
        rank, rows,
        "right_inverse_columns requires full column rank"
    );
    let mut out = BitMatrix::zeros(a.rows(), keep);
    for (i, &pc) in pivots.iter().enumerate() {
        for j in 0..keep {
            if aug.get(i, cols + j) {
                out.set(pc, j, true);
            }
        }
    }
    out
}

/// Weight distribution of a code: the number of codewords at each Hamming
/// weight, exact or binomial-approximate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    pub n: usize,
    kind: WdKind,
}

#[derive(Debug, Clone, PartialEq)]
enum WdKind {
    Exact { counts: Vec<u64>, dimension: usize },
    Binomial { redundancy: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WdLabel {
    Exact,
    BinomialApprox,
}

impl WeightDistribution {
    pub fn kind(&self) -> WdLabel {
        match self.kind {
            WdKind::Exact { .. } => WdLabel::Exact,
            WdKind::Binomial { .. } => WdLabel::BinomialApprox,
        }
    }

    /// Count of codewords at weight `w` (real-valued for the binomial kind).
    pub fn count(&self, w: usize) -> f64 {
        if w > self.n {
            return 0.0;
        }
        match &self.kind {
            WdKind::Exact { counts, .. } => counts[w] as f64,
            WdKind::Binomial { redundancy } => (crate::bounds::ln_binomial(self.n, w)
                - *redundancy as f64 * std::f64::consts::LN_2)
                .exp(),
        }
    }

    /// Natural log of `count(w)`; `-inf` where the count is zero.
    pub fn ln_count(&self, w: usize) -> f64 {
        if w > self.n {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            WdKind::Exact { counts, .. } => {
                if counts[w] == 0 {
                    f64::NEG_INFINITY
                } else {
                    (counts[w] as f64).ln()
                }
            }
            WdKind::Binomial { redundancy } => {
                crate::bounds::ln_binomial(self.n, w) - *redundancy as f64 * std::f64::consts::LN_2
            }
        }
    }

    pub fn exact_counts(&self) -> Option<&[u64]> {
        match &self.kind {
            WdKind::Exact { counts, .. } => Some(counts),
            WdKind::Binomial { .. } => None,
        }
    }

    /// Dimension of the enumerated code, for the exact kind.
    pub fn exact_dimension(&self) -> Option<usize> {
        match &self.kind {
            WdKind::Exact { dimension, .. } => Some(*dimension),
            WdKind::Binomial { .. } => None,
        }
    }
}

/// Exact weight distribution by Gray-code enumeration of all `2^k`
/// codewords of the given generator matrix.
pub fn weight_distribution_exact(g: &BitMatrix) -> Result<WeightDistribution, CodeError> {
    let n = g.rows();
    let k = g.cols();
    if k > ENUMERATION_BUDGET_LOG2 {
        return Err(CodeError::EnumerationBudget {
            dim: k,
            budget: ENUMERATION_BUDGET_LOG2,
        });
    }
    let cols: Vec<BitVec> = (0..k).map(|j| g.col_vec(j)).collect();
    let mut counts = vec![0u64; n + 1];
    let mut cw = BitVec::zeros(n);
    counts[0] += 1;
    for i in 1u64..(1u64 << k) {
        let flip = i.trailing_zeros() as usize;
        cw.xor_assign(&cols[flip]);
        counts[cw.weight()] += 1;
    }
    Ok(WeightDistribution {
        n,
        kind: WdKind::Exact {
            counts,
            dimension: k,
        },
    })
}

/// Binomial approximation `A_w ≈ 2^{-redundancy} · C(n, w)`, the random-code
/// profile also used for BCH codes.
pub fn weight_distribution_binomial(n: usize, redundancy: usize) -> WeightDistribution {
    WeightDistribution {
        n,
        kind: WdKind::Binomial { redundancy },
    }
}

/// Smallest nonzero codeword weight of a generator matrix, by enumeration.
pub fn minimum_distance_exact(g: &BitMatrix) -> Result<u32, CodeError> {
    let wd = weight_distribution_exact(g)?;
    let counts = wd.exact_counts().unwrap();
    counts
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &c)| c > 0)
        .map(|(w, _)| w as u32)
        .ok_or_else(|| CodeError::InvalidParam("zero-dimensional code has no distance".into()))
}

/// Designed-distance pair table entry check helper: the parity/inverse
/// identities every partitioned code must satisfy.
pub fn partitioned_identities_hold(code: &PartitionedCode) -> bool {
    let h0t = code.h0.transpose();
    let i_k = BitMatrix::identity(code.k);
    if h0t.mat_mul(&code.g1) != i_k {
        return false;
    }
    if !h0t.mat_mul(&code.g0).is_zero() {
        return false;
    }
    let gt = code.gtilde();
    if code.htilde.transpose().mat_mul(&gt).is_zero() {
        gt.rank() == code.k + code.l
    } else {
        false
    }
}
