//! Redundancy allocation between masking parity `l` and erasure parity `r`.
//!
//! The split minimizes the finite-length bound
//! `2^{-l} (1+β)^n + 2^{-r} {1 + α(1-β)}^n` subject to `l + r = n - k`.
//! Discrete allocation scans the realizable code candidates; the
//! real-valued solution comes from the KKT conditions of the convex
//! relaxation. Pure channels skip the optimization: with `β = 0` there is
//! nothing to mask and all redundancy goes to erasures, and symmetrically
//! for `α = 0`.

use crate::bounds::{bdc_bound_log2, bdec_bound_log2, log2_add};
use crate::codes::{bch, CodeError};
use serde::{Deserialize, Serialize};

/// One realizable `(l, r)` split with its designed distance pair;
/// `d0 = 0` or `d1 = 0` mark an absent code part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCode {
    pub l: usize,
    pub r: usize,
    pub d0: u32,
    pub d1: u32,
}

/// A candidate together with its bound objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredCandidate {
    pub candidate: CandidateCode,
    pub objective_log2: f64,
}

impl ScoredCandidate {
    pub fn objective(&self) -> f64 {
        self.objective_log2.exp2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// All redundancy on erasure correction (`l = 0`).
    AllErasure,
    /// All redundancy on defect masking (`r = 0`).
    AllDefect,
    Interior,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::AllErasure => "all_erasure",
            Regime::AllDefect => "all_defect",
            Regime::Interior => "interior",
        }
    }
}

/// Real-valued allocation from the KKT conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktSolution {
    pub l: f64,
    pub r: f64,
    pub regime: Regime,
}

/// Discrete and real-valued allocation for one channel.
#[derive(Debug, Clone)]
pub struct AllocationSolution {
    pub l_hat: usize,
    pub r_hat: usize,
    pub l_tilde: f64,
    pub r_tilde: f64,
    pub regime: Regime,
    pub best: ScoredCandidate,
    pub scored: Vec<ScoredCandidate>,
}

/// Bound objective of a split in log2. The term for an absent failure mode
/// is dropped: with `β = 0` masking never fails and only the erasure term
/// remains, and symmetrically for `α = 0`.
pub fn objective_log2(n: usize, l: usize, r: usize, alpha: f64, beta: f64) -> f64 {
    let nf = n as f64;
    match (beta > 0.0, alpha > 0.0) {
        (true, true) => bdec_bound_log2(nf, l as f64, r as f64, alpha, beta),
        (true, false) => bdc_bound_log2(nf, l as f64, beta),
        (false, true) => -(r as f64) + nf * (1.0 + alpha).log2(),
        (false, false) => log2_add(-(l as f64), -(r as f64)),
    }
}

/// Scores every candidate under the bound objective.
pub fn score_candidates(
    candidates: &[CandidateCode],
    n: usize,
    alpha: f64,
    beta: f64,
) -> Vec<ScoredCandidate> {
    candidates
        .iter()
        .map(|&candidate| ScoredCandidate {
            candidate,
            objective_log2: objective_log2(n, candidate.l, candidate.r, alpha, beta),
        })
        .collect()
}

/// Discrete minimizer of the bound objective over the candidate list.
/// Ties break toward larger `l`, a fixed arbitrary choice.
pub fn allocate_discrete(
    candidates: &[CandidateCode],
    n: usize,
    alpha: f64,
    beta: f64,
) -> ScoredCandidate {
    assert!(!candidates.is_empty(), "candidate list must not be empty");
    let scored = score_candidates(candidates, n, alpha, beta);
    *scored
        .iter()
        .min_by(|a, b| {
            a.objective_log2
                .total_cmp(&b.objective_log2)
                .then(b.candidate.l.cmp(&a.candidate.l))
        })
        .unwrap()
}

/// Real-valued allocation by the KKT conditions of the convex relaxation:
/// boundary regimes when one term dominates over the whole segment, the
/// interior stationary point
/// `l = (1/2) { n (1 + log2((1+β) / (1+α(1-β)))) - k }` otherwise.
pub fn allocate_kkt(n: usize, k: usize, alpha: f64, beta: f64) -> KktSolution {
    assert!(k <= n, "k must not exceed n");
    let budget = (n - k) as f64;
    if beta == 0.0 {
        return KktSolution {
            l: 0.0,
            r: budget,
            regime: Regime::AllErasure,
        };
    }
    if alpha == 0.0 {
        return KktSolution {
            l: budget,
            r: 0.0,
            regime: Regime::AllDefect,
        };
    }
    let nf = n as f64;
    let ratio_log2 = (1.0 + beta).log2() - (1.0 + alpha * (1.0 - beta)).log2();
    let l = 0.5 * (nf * (1.0 + ratio_log2) - k as f64);
    // the stationary point leaving [0, n-k] is exactly the boundary
    // condition for the corresponding endpoint
    if l <= 0.0 {
        KktSolution {
            l: 0.0,
            r: budget,
            regime: Regime::AllErasure,
        }
    } else if l >= budget {
        KktSolution {
            l: budget,
            r: 0.0,
            regime: Regime::AllDefect,
        }
    } else {
        KktSolution {
            l,
            r: budget - l,
            regime: Regime::Interior,
        }
    }
}

/// Realizable `(l, r, d0, d1)` splits for `[n = 2^m - 1, k]` partitioned
/// BCH codes: every split where both redundancies are BCH generator
/// degrees, endpoints included.
pub fn candidate_table(m: u32, k: usize) -> Result<Vec<CandidateCode>, CodeError> {
    bch::primitive_poly(m)?;
    let n = (1usize << m) - 1;
    if k > n {
        return Err(CodeError::InvalidParam(format!("k = {k} exceeds n = {n}")));
    }
    let budget = n - k;
    let mut by_redundancy = vec![None::<u32>; budget + 1];
    by_redundancy[0] = Some(0);
    let mut t = 1u32;
    while 2 * (t as usize) < n {
        let red = bch::root_exponents(m, t).len();
        if red > budget {
            break;
        }
        if by_redundancy[red].is_none() {
            by_redundancy[red] = Some(t);
        }
        t += 1;
    }
    let designed = |t: u32| if t == 0 { 0 } else { 2 * t + 1 };
    let mut out = Vec::new();
    for l in 0..=budget {
        let (Some(t0), Some(t1)) = (by_redundancy[l], by_redundancy[budget - l]) else {
            continue;
        };
        out.push(CandidateCode {
            l,
            r: budget - l,
            d0: designed(t0),
            d1: designed(t1),
        });
    }
    Ok(out)
}

/// The eleven `[1023, 923, l]` candidates, `l = 0, 10, ..., 100`.
pub fn candidate_table_1023() -> Vec<CandidateCode> {
    candidate_table(10, 923).expect("fixed parameters are valid")
}

/// Full allocation for one channel over a candidate list.
pub fn allocate(
    candidates: &[CandidateCode],
    n: usize,
    k: usize,
    alpha: f64,
    beta: f64,
) -> AllocationSolution {
    let best = allocate_discrete(candidates, n, alpha, beta);
    let scored = score_candidates(candidates, n, alpha, beta);
    let kkt = allocate_kkt(n, k, alpha, beta);
    AllocationSolution {
        l_hat: best.candidate.l,
        r_hat: best.candidate.r,
        l_tilde: kkt.l,
        r_tilde: kkt.r,
        regime: kkt.regime,
        best,
        scored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHANNELS_095: [(f64, f64); 7] = [
        (0.0500, 0.0),
        (0.0404, 0.0100),
        (0.0306, 0.0200),
        (0.0253, 0.0253),
        (0.0200, 0.0306),
        (0.0100, 0.0404),
        (0.0, 0.0500),
    ];

    #[test]
    fn candidate_table_matches_designed_distances() {
        let table = candidate_table_1023();
        let expected = [
            (0usize, 100usize, 0u32, 21u32),
            (10, 90, 3, 19),
            (20, 80, 5, 17),
            (30, 70, 7, 15),
            (40, 60, 9, 13),
            (50, 50, 11, 11),
            (60, 40, 13, 9),
            (70, 30, 15, 7),
            (80, 20, 17, 5),
            (90, 10, 19, 3),
            (100, 0, 21, 0),
        ];
        assert_eq!(table.len(), 11);
        for (cand, (l, r, d0, d1)) in table.iter().zip(expected.iter()) {
            assert_eq!((cand.l, cand.r, cand.d0, cand.d1), (*l, *r, *d0, *d1));
        }
    }

    #[test]
    fn discrete_allocation_per_channel() {
        let table = candidate_table_1023();
        let expected_l_hat = [0usize, 30, 40, 50, 60, 70, 100];
        for ((alpha, beta), want) in CHANNELS_095.iter().zip(expected_l_hat.iter()) {
            let best = allocate_discrete(&table, 1023, *alpha, *beta);
            assert_eq!(best.candidate.l, *want, "alpha={alpha} beta={beta}");
        }
    }

    #[test]
    fn kkt_allocation_per_channel() {
        let expected_l_tilde = [0.0f64, 28.4, 42.8, 50.5, 58.1, 72.2, 100.0];
        for ((alpha, beta), want) in CHANNELS_095.iter().zip(expected_l_tilde.iter()) {
            let kkt = allocate_kkt(1023, 923, *alpha, *beta);
            assert!(
                (kkt.l - want).abs() <= 0.05,
                "alpha={alpha} beta={beta}: l_tilde {} vs {want}",
                kkt.l
            );
            assert!((kkt.l + kkt.r - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kkt_regimes() {
        assert_eq!(
            allocate_kkt(1023, 923, 0.05, 0.0).regime,
            Regime::AllErasure
        );
        assert_eq!(allocate_kkt(1023, 923, 0.0, 0.05).regime, Regime::AllDefect);
        assert_eq!(
            allocate_kkt(1023, 923, 0.0253, 0.0253).regime,
            Regime::Interior
        );
        // tiny beta against heavy erasures pins the boundary even when both
        // failure modes exist
        let sol = allocate_kkt(100, 90, 0.3, 1e-9);
        assert_eq!(sol.regime, Regime::AllErasure);
        assert_eq!(sol.l, 0.0);
    }

    #[test]
    fn interior_stationarity() {
        let kkt = allocate_kkt(1023, 923, 0.0253, 0.0253);
        assert_eq!(kkt.regime, Regime::Interior);
        let lhs = -kkt.l + 1023.0 * (1.0f64 + 0.0253).log2();
        let rhs = -kkt.r + 1023.0 * (1.0f64 + 0.0253 * (1.0 - 0.0253)).log2();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn kkt_side_matches_parameter_balance() {
        // l >= r exactly when beta >= alpha(1-beta)
        for &(alpha, beta) in &[(0.01, 0.02), (0.02, 0.01), (0.03, 0.03), (0.0404, 0.01)] {
            let kkt = allocate_kkt(1023, 923, alpha, beta);
            if beta >= alpha * (1.0 - beta) {
                assert!(kkt.l >= kkt.r);
            } else {
                assert!(kkt.l <= kkt.r);
            }
        }
    }

    #[test]
    fn pure_erasure_channel_prefers_smallest_l() {
        let table = candidate_table_1023();
        let best = allocate_discrete(&table, 1023, 0.05, 0.0);
        assert_eq!(best.candidate.l, 0);
        let best = allocate_discrete(&table, 1023, 0.0, 0.05);
        assert_eq!(best.candidate.l, 100);
    }

    #[test]
    fn discrete_is_nearest_candidate_to_kkt() {
        let table = candidate_table_1023();
        for (alpha, beta) in CHANNELS_095 {
            let kkt = allocate_kkt(1023, 923, alpha, beta);
            let best = allocate_discrete(&table, 1023, alpha, beta);
            let nearest = table
                .iter()
                .min_by(|a, b| {
                    (a.l as f64 - kkt.l)
                        .abs()
                        .total_cmp(&(b.l as f64 - kkt.l).abs())
                })
                .unwrap();
            assert_eq!(best.candidate.l, nearest.l, "alpha={alpha} beta={beta}");
        }
    }

    #[test]
    fn objective_discretely_convex_along_the_line() {
        let table = candidate_table_1023();
        for &(alpha, beta) in &[(0.0404, 0.01), (0.0253, 0.0253), (0.01, 0.0404), (0.1, 0.1)] {
            let scored = score_candidates(&table, 1023, alpha, beta);
            for w in scored.windows(3) {
                let second_diff = w[2].objective() - 2.0 * w[1].objective() + w[0].objective();
                assert!(second_diff >= -1e-9 * w[1].objective().abs());
            }
        }
    }

    #[test]
    fn smaller_code_candidate_table() {
        // [15, 7] leaves 8 redundancy bits: splits 0/8, 4/4, 8/0
        let table = candidate_table(4, 7).unwrap();
        let splits: Vec<(usize, usize, u32, u32)> =
            table.iter().map(|c| (c.l, c.r, c.d0, c.d1)).collect();
        assert_eq!(splits, vec![(0, 8, 0, 5), (4, 4, 3, 3), (8, 0, 5, 0)]);
    }
}
