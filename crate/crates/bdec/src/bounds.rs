//! Closed-form failure probabilities and finite-length bounds.
//!
//! The per-count failure profile has three regimes: zero below the
//! distance, an exact value (with a factor 1/2) in the window
//! `[d, d + floor((d-1)/2)]`, and a combinatorial upper bound beyond it.
//! The finite-length message-failure bound is
//! `2^{-l} (1+β)^n + 2^{-r} {1 + α(1-β)}^n`, which also drives the
//! redundancy allocation. Everything is evaluated in the log domain;
//! binomial coefficients at these lengths overflow any fixed-width float.

use crate::channels::{ChannelKind, ChannelParams};
use crate::codes::WeightDistribution;
use std::sync::RwLock;

static LN_FACT: RwLock<Vec<f64>> = RwLock::new(Vec::new());

/// ln(n!), from a compensated cumulative table.
pub fn ln_factorial(n: usize) -> f64 {
    {
        let table = LN_FACT.read().unwrap();
        if n < table.len() {
            return table[n];
        }
    }
    let mut table = LN_FACT.write().unwrap();
    if n >= table.len() {
        let target = (n + 1).next_power_of_two().max(1024);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64; // Kahan compensation
        let mut fresh = Vec::with_capacity(target);
        fresh.push(0.0);
        for i in 1..target {
            let term = (i as f64).ln() - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
            fresh.push(sum);
        }
        *table = fresh;
    }
    table[n]
}

/// ln C(n, k); `-inf` outside the triangle.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// A per-count failure probability: exactly zero, exact, or an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Zero,
    Exact(f64),
    Upper(f64),
}

impl BoundValue {
    pub fn value(&self) -> f64 {
        match *self {
            BoundValue::Zero => 0.0,
            BoundValue::Exact(v) | BoundValue::Upper(v) => v,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            BoundValue::Zero => "zero",
            BoundValue::Exact(_) => "exact",
            BoundValue::Upper(_) => "upper",
        }
    }
}

/// Sum of `A_w · C(n-w, x-w) / C(n, x)` over `w = d..=x`, in the log domain
/// with a log-sum-exp accumulation.
fn profile_sum(n: usize, wd: &WeightDistribution, d: usize, x: usize) -> f64 {
    let ln_cnx = ln_binomial(n, x);
    let mut ln_terms = Vec::new();
    for w in d..=x.min(n) {
        let ln_a = wd.ln_count(w);
        if ln_a == f64::NEG_INFINITY {
            continue;
        }
        ln_terms.push(ln_a + ln_binomial(n - w, x - w) - ln_cnx);
    }
    let max = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    let sum: f64 = ln_terms.iter().map(|&t| (t - max).exp()).sum();
    (max + sum.ln()).exp()
}

/// Failure-probability profile for a distance-`d` code at `x` losses:
/// zero below `d`, exact with the 1/2 factor through `d + floor((d-1)/2)`,
/// an upper bound past the window.
fn failure_profile(n: usize, wd: &WeightDistribution, d: usize, x: usize) -> BoundValue {
    assert!(x <= n, "count exceeds block length");
    assert!(d >= 1, "distance must be at least 1");
    if x < d {
        return BoundValue::Zero;
    }
    let t = (d - 1) / 2;
    let s = profile_sum(n, wd, d, x);
    if x <= d + t {
        BoundValue::Exact((0.5 * s).min(1.0))
    } else {
        BoundValue::Upper(s.min(1.0))
    }
}

/// Decoding-failure probability of an erasure decoder given `e` erasures,
/// from the code's weight distribution `A_w` and minimum distance.
pub fn bec_failure_profile(
    n: usize,
    wd: &WeightDistribution,
    d_min: usize,
    e: usize,
) -> BoundValue {
    failure_profile(n, wd, d_min, e)
}

/// Masking-failure probability given `u` defects, from the dual weight
/// distribution `B_w` of the masking code and the masking distance `d0`.
/// Formally the mirror image of [`bec_failure_profile`].
pub fn bdc_failure_profile(
    n: usize,
    wd_dual: &WeightDistribution,
    d0: usize,
    u: usize,
) -> BoundValue {
    failure_profile(n, wd_dual, d0, u)
}

/// A finite-length bound value; the closed form is a bound, not a
/// probability, so it can exceed one and is reported unclamped alongside a
/// clamped companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteBound {
    pub log2: f64,
}

impl FiniteBound {
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }

    pub fn clamped(&self) -> f64 {
        self.value().min(1.0)
    }
}

fn log2_one_plus(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// log2 of the masking-side term `2^{-l} (1+β)^n` with real-valued inputs.
pub fn bdc_bound_log2(n: f64, l: f64, beta: f64) -> f64 {
    -l + n * log2_one_plus(beta)
}

/// log2 of the erasure-side term `2^{-r} (1+α)^n` with real-valued inputs.
pub fn bec_bound_log2(n: f64, r: f64, alpha: f64) -> f64 {
    -r + n * log2_one_plus(alpha)
}

/// Finite-length bound on message failure for the erasure-only channel:
/// `2^{-r} (1+α)^n`.
pub fn bec_finite_bound(n: usize, r: usize, alpha: f64) -> FiniteBound {
    FiniteBound {
        log2: bec_bound_log2(n as f64, r as f64, alpha),
    }
}

/// Finite-length bound on message failure for the defect-only channel:
/// `2^{-l} (1+β)^n`.
pub fn bdc_finite_bound(n: usize, l: usize, beta: f64) -> FiniteBound {
    FiniteBound {
        log2: bdc_bound_log2(n as f64, l as f64, beta),
    }
}

/// log2 of `2^{-l} (1+β)^n + 2^{-r} {1+α(1-β)}^n`.
pub fn bdec_bound_log2(n: f64, l: f64, r: f64, alpha: f64, beta: f64) -> f64 {
    let mask_term = bdc_bound_log2(n, l, beta);
    let erase_term = -r + n * log2_one_plus(alpha * (1.0 - beta));
    log2_add(mask_term, erase_term)
}

/// log2(2^a + 2^b) without leaving the log domain.
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// Finite-length bound on message failure for the combined channel. The
/// split must satisfy `l + r = n - k`.
pub fn bdec_finite_bound(
    n: usize,
    k: usize,
    l: usize,
    r: usize,
    alpha: f64,
    beta: f64,
) -> FiniteBound {
    assert_eq!(l + r, n - k, "redundancy split must satisfy l + r = n - k");
    FiniteBound {
        log2: bdec_bound_log2(n as f64, l as f64, r as f64, alpha, beta),
    }
}

/// Probability that a uniform random `rows × cols` binary matrix has rank
/// below `min(rows, cols)`: the exact product form, paired with the crude
/// `2^{min-max}` figure often quoted for it (an upper proxy on the exact
/// value, never below it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDeficiency {
    pub exact: f64,
    pub approx: f64,
}

pub fn rank_deficiency_prob(rows: usize, cols: usize) -> RankDeficiency {
    let min = rows.min(cols) as i64;
    let max = rows.max(cols) as i64;
    let mut prod = 1.0f64;
    for i in 0..min {
        prod *= 1.0 - ((i - max) as f64).exp2();
    }
    RankDeficiency {
        exact: 1.0 - prod,
        approx: ((min - max) as f64).exp2(),
    }
}

/// Channel capacity: `1-α`, `1-β`, or `(1-α)(1-β)`.
pub fn capacity(params: &ChannelParams, kind: ChannelKind) -> f64 {
    params.capacity(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{weight_distribution_binomial, weight_distribution_exact, LinearCode};
    use num::{BigRational, BigUint, FromPrimitive, One, ToPrimitive, Zero};

    fn big_binomial(n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        let mut r = BigUint::one();
        for i in 0..k {
            r = r * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        r
    }

    fn ln_of_big(x: &BigUint) -> f64 {
        let bits = x.bits();
        if bits <= 64 {
            return (x.to_u64().unwrap() as f64).ln();
        }
        let shift = bits - 53;
        let top = (x >> shift).to_u64().unwrap() as f64;
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn ln_binomial_matches_exact_rationals() {
        for &(n, k) in &[
            (7usize, 3usize),
            (100, 50),
            (1023, 500),
            (2048, 1024),
            (2048, 71),
        ] {
            let exact = ln_of_big(&big_binomial(n, k));
            let got = ln_binomial(n, k);
            assert!(
                (got - exact).abs() <= 1e-9,
                "lnC({n},{k}): got {got}, exact {exact}"
            );
        }
        assert_eq!(ln_binomial(5, 9), f64::NEG_INFINITY);
    }

    #[test]
    fn hamming_profile_values() {
        let code = LinearCode::hamming_7_4();
        let wd = weight_distribution_exact(&code.g).unwrap();
        assert_eq!(bec_failure_profile(7, &wd, 3, 2), BoundValue::Zero);
        match bec_failure_profile(7, &wd, 3, 3) {
            BoundValue::Exact(v) => assert!((v - 0.1).abs() < 1e-12),
            other => panic!("expected exact at e=3, got {other:?}"),
        }
        match bec_failure_profile(7, &wd, 3, 4) {
            BoundValue::Exact(v) => assert!((v - 0.5).abs() < 1e-12),
            other => panic!("expected exact at e=4, got {other:?}"),
        }
        assert!(matches!(
            bec_failure_profile(7, &wd, 3, 5),
            BoundValue::Upper(_)
        ));
    }

    #[test]
    fn bdc_profile_mirrors_bec_profile() {
        // the defect-side formula is the same function of (wd, d, count)
        let wd = weight_distribution_binomial(63, 18);
        for x in 0..=63 {
            assert_eq!(
                bec_failure_profile(63, &wd, 5, x),
                bdc_failure_profile(63, &wd, 5, x)
            );
        }
    }

    #[test]
    fn profile_monotone_in_distance() {
        // more redundancy (larger d with matched binomial wd) never hurts
        let n = 63;
        for x in 0..=n {
            let mut prev = f64::INFINITY;
            for t in 1..=5usize {
                let d = 2 * t + 1;
                let wd = weight_distribution_binomial(n, 6 * t);
                let v = bec_failure_profile(n, &wd, d, x).value();
                assert!(v <= prev + 1e-12, "x={x} t={t}: {v} > {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn finite_bound_trivial_cases() {
        // no erasures: the bound collapses to 2^{-r}
        let b = bec_finite_bound(1023, 50, 0.0);
        assert!((b.value() - (2f64).powi(-50)).abs() < 1e-30);
        // no defects: the combined bound loses its beta term
        let combined = bdec_finite_bound(1023, 923, 50, 50, 0.1, 0.0);
        let erase_only = bec_finite_bound(1023, 50, 0.1);
        assert!(
            (combined.value() - ((2f64).powi(-50) + erase_only.value())).abs()
                < 1e-12 * combined.value()
        );
        // alpha = 0 mirrors it on the defect side
        let combined = bdec_finite_bound(1023, 923, 50, 50, 0.0, 0.1);
        let mask_only = bdc_finite_bound(1023, 50, 0.1);
        assert!(
            (combined.value() - ((2f64).powi(-50) + mask_only.value())).abs()
                < 1e-12 * combined.value()
        );
    }

    #[test]
    fn bdec_bound_matches_arbitrary_precision() {
        // 2^{-50}(1+β)^n + 2^{-50}(1+α(1-β))^n at α=β=0.0253, n=1023,
        // recomputed in exact rational arithmetic
        let n = 1023u32;
        let alpha = BigRational::new(253.into(), 10000.into());
        let beta = alpha.clone();
        let one = BigRational::one();
        let two = BigRational::from_u32(2).unwrap();
        let pow = |base: &BigRational, e: u32| -> BigRational {
            let mut acc = BigRational::one();
            for _ in 0..e {
                acc *= base;
            }
            acc
        };
        let mask = pow(&(one.clone() + beta.clone()), n) / pow(&two, 50);
        let erase = pow(
            &(one.clone() + alpha.clone() * (one.clone() - beta.clone())),
            n,
        ) / pow(&two, 50);
        let exact = mask + erase;
        // numerator and denominator overflow f64; compare through logs
        let ln_exact = ln_of_big(&exact.numer().to_biguint().unwrap())
            - ln_of_big(&exact.denom().to_biguint().unwrap());
        let got = bdec_finite_bound(1023, 923, 50, 50, 0.0253, 0.0253);
        let ln_got = got.log2 * std::f64::consts::LN_2;
        assert!(
            (ln_got - ln_exact).abs() < 1e-9,
            "log values differ: {ln_got} vs {ln_exact}"
        );
    }

    #[test]
    fn slope_and_intercept_of_log_bound() {
        // per-unit-n slope of the log2 bound at fixed rate
        let alpha = 0.1;
        let rate = 0.9;
        for n in [100.0f64, 500.0, 1023.0] {
            let r_n = n * (1.0 - rate);
            let r_n1 = (n + 1.0) * (1.0 - rate);
            let slope = bec_bound_log2(n + 1.0, r_n1, alpha) - bec_bound_log2(n, r_n, alpha);
            let expected = rate - 1.0 + (1.0f64 + alpha).log2();
            assert!((slope - expected).abs() < 1e-9);
        }
        // x-axis intercept: R with log2 bound = 0 is 1 - log2(1+alpha)
        let r_intercept = 1.0 - (1.1f64).log2();
        assert!((r_intercept - 0.8625).abs() < 5e-5);
    }

    #[test]
    fn rank_deficiency_small_cases() {
        let rd = rank_deficiency_prob(1, 1);
        assert!((rd.exact - 0.5).abs() < 1e-15);
        assert!((rd.approx - 1.0).abs() < 1e-15);

        let rd = rank_deficiency_prob(3, 2);
        assert!((rd.exact - 0.34375).abs() < 1e-15);
        assert!((rd.approx - 0.5).abs() < 1e-15);
        // symmetric in the arguments
        assert_eq!(rank_deficiency_prob(2, 3), rd);
    }

    #[test]
    fn rank_deficiency_exhaustive_3x2() {
        // all 64 binary 3x2 matrices
        use crate::gf2::BitMatrix;
        let mut deficient = 0usize;
        for bits in 0u32..64 {
            let mut m = BitMatrix::zeros(3, 2);
            for i in 0..6 {
                if (bits >> i) & 1 == 1 {
                    m.set(i / 2, i % 2, true);
                }
            }
            if m.rank() < 2 {
                deficient += 1;
            }
        }
        assert_eq!(deficient, 22); // 22/64 = 0.34375
    }

    #[test]
    fn log2_add_accuracy() {
        assert!((log2_add(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((log2_add(-10.0, f64::NEG_INFINITY) + 10.0).abs() < 1e-15);
        let v = log2_add(-3.0, -5.0);
        assert!((v.exp2() - (0.125 + 0.03125)).abs() < 1e-15);
    }
}
