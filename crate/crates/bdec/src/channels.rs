//! Channel models: erasures, stuck-at defects, and their combination.
//!
//! A defect state is a ternary per-cell vector; stuck cells ignore the
//! written value. Erasures replace read bits with an erasure symbol at
//! positions known to the decoder. In the combined channel only normal
//! cells pass through the erasure stage.

use crate::gf2::BitVec;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error("invalid channel parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bec,
    Bdc,
    Bdec,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::Bec => "bec",
            ChannelKind::Bdc => "bdc",
            ChannelKind::Bdec => "bdec",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = ChannelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bec" => Ok(ChannelKind::Bec),
            "bdc" => Ok(ChannelKind::Bdc),
            "bdec" => Ok(ChannelKind::Bdec),
            other => Err(ChannelError::InvalidParam(format!(
                "unknown channel {other:?}"
            ))),
        }
    }
}

/// Erasure probability `alpha` and defect probability `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ChannelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(ChannelError::InvalidParam(format!(
                "alpha = {alpha} outside [0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
            return Err(ChannelError::InvalidParam(format!(
                "beta = {beta} outside [0, 1]"
            )));
        }
        Ok(ChannelParams { alpha, beta })
    }

    pub fn capacity(&self, kind: ChannelKind) -> f64 {
        match kind {
            ChannelKind::Bec => 1.0 - self.alpha,
            ChannelKind::Bdc => 1.0 - self.beta,
            ChannelKind::Bdec => (1.0 - self.alpha) * (1.0 - self.beta),
        }
    }
}

/// State of one memory cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Stuck0,
    Stuck1,
    /// The defect-free state, usually written λ.
    Normal,
}

/// Per-cell defect states for an `n`-cell word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectState {
    cells: Vec<Cell>,
}

impl DefectState {
    pub fn all_normal(n: usize) -> Self {
        DefectState {
            cells: vec![Cell::Normal; n],
        }
    }

    pub fn from_cells(cells: Vec<Cell>) -> Self {
        DefectState { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    pub fn defect_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| !matches!(c, Cell::Normal))
            .count()
    }

    /// Positions of stuck cells, ascending.
    pub fn defect_positions(&self) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| !matches!(c, Cell::Normal))
            .map(|(i, _)| i)
            .collect()
    }

    /// Stuck values at the given positions (which must all be defects).
    pub fn stuck_values(&self, positions: &[usize]) -> BitVec {
        let mut v = BitVec::zeros(positions.len());
        for (j, &i) in positions.iter().enumerate() {
            match self.cells[i] {
                Cell::Stuck0 => {}
                Cell::Stuck1 => v.set(j, true),
                Cell::Normal => panic!("position {i} is not a defect"),
            }
        }
        v
    }
}

/// Draws an i.i.d. defect state: each cell is stuck at 0 or 1 with
/// probability `beta/2` each, normal otherwise.
pub fn sample_defects<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> DefectState {
    let cells = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < beta / 2.0 {
                Cell::Stuck0
            } else if u < beta {
                Cell::Stuck1
            } else {
                Cell::Normal
            }
        })
        .collect();
    DefectState { cells }
}

/// Writes `x` through the defect state: stuck cells output their stuck
/// value, normal cells pass the input through.
pub fn apply_circ(x: &BitVec, s: &DefectState) -> BitVec {
    assert_eq!(x.len(), s.len(), "apply_circ: length mismatch");
    let mut y = x.clone();
    for (i, cell) in s.cells.iter().enumerate() {
        match cell {
            Cell::Stuck0 => y.set(i, false),
            Cell::Stuck1 => y.set(i, true),
            Cell::Normal => {}
        }
    }
    y
}

/// Number of cells where the stored word disagrees with `x`, i.e. the
/// weight of `(x ∘ s) - x`.
pub fn count_defect_errors(x: &BitVec, s: &DefectState) -> usize {
    assert_eq!(x.len(), s.len(), "count_defect_errors: length mismatch");
    s.cells
        .iter()
        .enumerate()
        .filter(|&(i, cell)| match cell {
            Cell::Stuck0 => x.get(i),
            Cell::Stuck1 => !x.get(i),
            Cell::Normal => false,
        })
        .count()
}

/// Read bits with erasures at known positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryOutput {
    values: BitVec,
    erased: BitVec,
}

impl TernaryOutput {
    pub fn new(values: BitVec, erased: BitVec) -> Self {
        assert_eq!(values.len(), erased.len());
        TernaryOutput { values, erased }
    }

    /// A fully-known output with no erasures.
    pub fn unerased(values: BitVec) -> Self {
        let erased = BitVec::zeros(values.len());
        TernaryOutput { values, erased }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.erased.get(i)
    }

    /// Bit value at an unerased position.
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(!self.is_erased(i), "reading an erased position");
        self.values.get(i)
    }

    pub fn erased_count(&self) -> usize {
        self.erased.weight()
    }

    /// Erased positions, ascending.
    pub fn erased_positions(&self) -> Vec<usize> {
        self.erased.ones()
    }

    /// Unerased positions, ascending.
    pub fn unerased_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.erased.get(i)).collect()
    }

    /// Values at the unerased positions, in position order.
    pub fn unerased_values(&self) -> BitVec {
        self.values.select(&self.unerased_positions())
    }

    /// Full-length values with every erased position forced to zero, the
    /// form consumed by syndrome-style products.
    pub fn values_masked(&self) -> BitVec {
        let mut v = self.values.clone();
        for i in self.erased.ones() {
            v.set(i, false);
        }
        v
    }
}

/// Erases each position independently with probability `alpha`, skipping
/// the protected set (defect cells in the combined channel are read as
/// stored, never erased).
pub fn apply_erasures<R: Rng + ?Sized>(
    y: &BitVec,
    alpha: f64,
    rng: &mut R,
    protect: &[usize],
) -> TernaryOutput {
    let mut erased = BitVec::zeros(y.len());
    let mut protected = vec![false; y.len()];
    for &i in protect {
        protected[i] = true;
    }
    for (i, &skip) in protected.iter().enumerate() {
        if !skip && rng.gen::<f64>() < alpha {
            erased.set(i, true);
        }
    }
    TernaryOutput {
        values: y.clone(),
        erased,
    }
}
