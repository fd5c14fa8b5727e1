//! Monte-Carlo harness, exact small-code oracles, and table reproduction.
//!
//! Trials derive their generator from `(seed, trial index)` as independent
//! ChaCha streams, so tallies are identical for any worker count. The
//! exact oracles enumerate every erasure or defect pattern of a small code
//! and credit random tie-breaks analytically: a pattern admitting `2^j`
//! candidate codewords succeeds with probability `2^-j`.

use crate::allocation::{allocate, candidate_table_1023, score_candidates};
use crate::bounds::{bdc_finite_bound, bdec_finite_bound, bec_finite_bound, ln_binomial};
use crate::channels::{apply_circ, apply_erasures, sample_defects, ChannelKind, ChannelParams};
use crate::codes::{bch, CodeDescriptor, CodeError, LinearCode, PartitionedCode};
use crate::gf2::BitVec;
use crate::schemes::{
    bdc_decode, bdc_encode_additive, bdec_decode_via_h, bdec_encode, bec_decode_via_h, DecodeStatus,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Enumeration cap for the exact pattern oracles (2^n subsets).
pub const ORACLE_MAX_N: usize = 20;
/// Enumeration cap for the combined-channel oracle (3^n patterns).
pub const ORACLE_MAX_N_BDEC: usize = 12;

/// A code built for simulation.
pub enum SimCode {
    Linear(LinearCode),
    Partitioned(PartitionedCode),
}

impl SimCode {
    pub fn n(&self) -> usize {
        match self {
            SimCode::Linear(c) => c.n,
            SimCode::Partitioned(c) => c.n,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            SimCode::Linear(c) => c.k,
            SimCode::Partitioned(c) => c.k,
        }
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn descriptor(&self) -> &CodeDescriptor {
        match self {
            SimCode::Linear(c) => &c.descriptor,
            SimCode::Partitioned(c) => &c.descriptor,
        }
    }
}

/// Builds a code from its descriptor. Families: `hamming74`, `bch`
/// (generator-matrix code for erasure runs), `pbch` (partitioned).
pub fn build_code(desc: &CodeDescriptor) -> Result<SimCode, SimError> {
    match desc.family.as_str() {
        "hamming74" => Ok(SimCode::Linear(LinearCode::hamming_7_4())),
        "bch" => {
            let m = desc.m.unwrap_or(usize::BITS - desc.n.leading_zeros());
            if desc.n != (1usize << m) - 1 {
                return Err(SimError::InvalidParam(format!(
                    "bch: n = {} is not 2^m - 1",
                    desc.n
                )));
            }
            let red = desc.n - desc.k;
            let t = match desc.t1 {
                Some(t) => t,
                None => find_t_for_redundancy(m, red).ok_or_else(|| {
                    SimError::InvalidParam(format!(
                        "bch: no designed t gives redundancy {red} at m={m}"
                    ))
                })?,
            };
            Ok(SimCode::Linear(LinearCode::bch(m, t)?))
        }
        "pbch" => {
            let l = desc.l.ok_or_else(|| {
                SimError::InvalidParam("pbch descriptor needs the masking parity l".into())
            })?;
            Ok(SimCode::Partitioned(PartitionedCode::pbch(
                desc.n, desc.k, l,
            )?))
        }
        other => Err(SimError::InvalidParam(format!(
            "unknown code family {other:?}"
        ))),
    }
}

fn find_t_for_redundancy(m: u32, red: usize) -> Option<u32> {
    let n = (1usize << m) - 1;
    (1u32..)
        .take_while(|&t| 2 * (t as usize) < n)
        .find(|&t| bch::root_exponents(m, t).len() == red)
}

/// Everything one run needs; JSON-serializable so configs can live in files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub channel: ChannelKind,
    pub alpha: f64,
    pub beta: f64,
    pub code: CodeDescriptor,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
}

fn default_ci_level() -> f64 {
    0.95
}

/// Two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ci {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Estimated event probability with its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub failures: u64,
    pub p_hat: f64,
    pub ci: Ci,
}

impl EventEstimate {
    fn from_tally(failures: u64, trials: u64, level: f64) -> Self {
        let p_hat = failures as f64 / trials as f64;
        EventEstimate {
            failures,
            p_hat,
            ci: binomial_ci(failures, trials, level),
        }
    }

    pub fn overlaps(&self, other: &EventEstimate) -> bool {
        self.ci.lo <= other.ci.hi && other.ci.lo <= self.ci.hi
    }
}

/// Result of a Monte-Carlo run. Failure events: `M = 0` (masking),
/// `D = 0` (decoding), and the composite message failure
/// `(M = 0) or (M = 1 and D = 0)` that the bounds speak about.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub run_id: String,
    pub channel: ChannelKind,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub rate: f64,
    pub trials: u64,
    pub fail_mask: u64,
    pub fail_decode: u64,
    pub fail_msg: u64,
    pub p_mask: EventEstimate,
    pub p_decode: EventEstimate,
    pub p_msg: EventEstimate,
    pub bound: f64,
    pub seed: u64,
    pub wall_time_s: f64,
}

pub const RESULT_CSV_HEADER: &str = "run_id,channel,alpha,beta,n,k,l,r,rate,trials,fail_M,fail_D,fail_msg,p_hat,ci_lo,ci_hi,bound,seed";

impl SimResult {
    /// One row of the fixed results schema; `p_hat` and its interval refer
    /// to the composite message-failure event.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.channel.as_str(),
            self.alpha,
            self.beta,
            self.n,
            self.k,
            self.l,
            self.r,
            self.rate,
            self.trials,
            self.fail_mask,
            self.fail_decode,
            self.fail_msg,
            self.p_msg.p_hat,
            self.p_msg.ci.lo,
            self.p_msg.ci.hi,
            self.bound,
            self.seed
        )
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    mask: u64,
    decode: u64,
    msg: u64,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            mask: self.mask + other.mask,
            decode: self.decode + other.decode,
            msg: self.msg + other.msg,
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs the configured experiment. Per trial: draw a message, sample the
/// channel state, encode, pass the channel, decode, tally.
pub fn run_trials(config: &ExperimentConfig) -> Result<SimResult, SimError> {
    let params = ChannelParams::new(config.alpha, config.beta)
        .map_err(|e| SimError::InvalidParam(e.to_string()))?;
    if config.trials == 0 {
        return Err(SimError::InvalidParam("trials must be positive".into()));
    }
    let code = build_code(&config.code)?;
    let (n, k) = (code.n(), code.k());
    let (l, r) = match &code {
        SimCode::Linear(_) => (0, n - k),
        SimCode::Partitioned(c) => (c.l, c.r()),
    };
    match (config.channel, &code) {
        (ChannelKind::Bec, SimCode::Linear(_)) => {}
        (ChannelKind::Bdc | ChannelKind::Bdec, SimCode::Partitioned(_)) => {}
        (ch, _) => {
            return Err(SimError::InvalidParam(format!(
                "channel {} does not match code family {}",
                ch.as_str(),
                code.descriptor().family
            )));
        }
    }

    let started = Instant::now();
    let run = |t: u64| -> Tally {
        let mut rng = trial_rng(config.seed, t);
        one_trial(&code, config.channel, &params, &mut rng)
    };
    let total = if let Some(workers) = config.workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| SimError::InvalidParam(e.to_string()))?;
        pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(run)
                .reduce(Tally::default, Tally::merge)
        })
    } else {
        (0..config.trials)
            .into_par_iter()
            .map(run)
            .reduce(Tally::default, Tally::merge)
    };
    let wall_time_s = started.elapsed().as_secs_f64();

    let bound = match config.channel {
        ChannelKind::Bec => bec_finite_bound(n, n - k, config.alpha).value(),
        ChannelKind::Bdc => bdc_finite_bound(n, l, config.beta).value(),
        ChannelKind::Bdec => bdec_finite_bound(n, k, l, r, config.alpha, config.beta).value(),
    };
    Ok(SimResult {
        run_id: run_id(config),
        channel: config.channel,
        alpha: config.alpha,
        beta: config.beta,
        n,
        k,
        l,
        r,
        rate: code.rate(),
        trials: config.trials,
        fail_mask: total.mask,
        fail_decode: total.decode,
        fail_msg: total.msg,
        p_mask: EventEstimate::from_tally(total.mask, config.trials, config.ci_level),
        p_decode: EventEstimate::from_tally(total.decode, config.trials, config.ci_level),
        p_msg: EventEstimate::from_tally(total.msg, config.trials, config.ci_level),
        bound,
        seed: config.seed,
        wall_time_s,
    })
}

fn one_trial(
    code: &SimCode,
    channel: ChannelKind,
    params: &ChannelParams,
    rng: &mut ChaCha8Rng,
) -> Tally {
    match (channel, code) {
        (ChannelKind::Bec, SimCode::Linear(c)) => {
            let m = BitVec::random(c.k, rng);
            let cw = c.encode(&m);
            let y = apply_erasures(&cw, params.alpha, rng, &[]);
            let dec = bec_decode_via_h(c, &y, rng);
            let decode_fail =
                dec.status == DecodeStatus::Failed || dec.message.as_ref() != Some(&m);
            Tally {
                mask: 0,
                decode: decode_fail as u64,
                msg: decode_fail as u64,
            }
        }
        (ChannelKind::Bdc, SimCode::Partitioned(c)) => {
            let m = BitVec::random(c.k, rng);
            let s = sample_defects(c.n, params.beta, rng);
            let enc = bdc_encode_additive(c, &m, &s);
            let y = apply_circ(&enc.codeword, &s);
            let m_hat = bdc_decode(c, &y);
            let mask_fail = !enc.masked;
            let decode_fail = m_hat != m;
            Tally {
                mask: mask_fail as u64,
                decode: decode_fail as u64,
                msg: (mask_fail || decode_fail) as u64,
            }
        }
        (ChannelKind::Bdec, SimCode::Partitioned(c)) => {
            let m = BitVec::random(c.k, rng);
            let s = sample_defects(c.n, params.beta, rng);
            let enc = bdec_encode(c, &m, &s);
            let stored = apply_circ(&enc.codeword, &s);
            let y = apply_erasures(&stored, params.alpha, rng, &s.defect_positions());
            let dec = bdec_decode_via_h(c, &y, rng);
            let mask_fail = !enc.masked;
            // decoding counts as failed unless the exact written codeword
            // comes back
            let decode_fail =
                dec.status == DecodeStatus::Failed || dec.codeword.as_ref() != Some(&enc.codeword);
            Tally {
                mask: mask_fail as u64,
                decode: decode_fail as u64,
                msg: (mask_fail || (!mask_fail && decode_fail)) as u64,
            }
        }
        _ => unreachable!("validated in run_trials"),
    }
}

fn run_id(config: &ExperimentConfig) -> String {
    // FNV-1a over the config fields; stable across runs by construction
    let text = format!(
        "{}|{}|{}|{}|{}|{}|{}|{}",
        config.channel.as_str(),
        config.alpha,
        config.beta,
        config.code.family,
        config.code.n,
        config.code.k,
        config.trials,
        config.seed
    );
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

// ---------------------------------------------------------------------------
// Confidence intervals

/// Normal-approximation interval, falling back to exact binomial
/// (Clopper-Pearson) tails when either tally is below 30.
pub fn binomial_ci(failures: u64, trials: u64, level: f64) -> Ci {
    assert!(trials > 0);
    assert!(
        level > 0.0 && level < 1.0,
        "confidence level must be in (0, 1)"
    );
    let p_hat = failures as f64 / trials as f64;
    let successes = trials - failures;
    if failures >= 30 && successes >= 30 {
        let z = normal_quantile(1.0 - (1.0 - level) / 2.0);
        let half = z * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        return Ci {
            level,
            lo: (p_hat - half).max(0.0),
            hi: (p_hat + half).min(1.0),
        };
    }
    let tail = (1.0 - level) / 2.0;
    let lo = if failures == 0 {
        0.0
    } else {
        // smallest p with P(X >= failures; p) = tail
        bisect(|p| binom_sf(failures, trials, p) - tail)
    };
    let hi = if failures == trials {
        1.0
    } else {
        // largest p with P(X <= failures; p) = tail
        bisect(|p| tail - binom_cdf(failures, trials, p))
    };
    Ci { level, lo, hi }
}

fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    // f increasing in p, root in (0, 1)
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// P(X <= x) for X ~ Binomial(n, p); only called with small x.
fn binom_cdf(x: u64, n: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if x >= n { 1.0 } else { 0.0 };
    }
    let mut sum = 0.0;
    for i in 0..=x {
        let ln_term =
            ln_binomial(n as usize, i as usize) + i as f64 * p.ln() + (n - i) as f64 * (-p).ln_1p();
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// P(X >= x), complement of the cdf at x-1.
fn binom_sf(x: u64, n: u64, p: f64) -> f64 {
    if x == 0 {
        return 1.0;
    }
    (1.0 - binom_cdf(x - 1, n, p)).max(0.0)
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// |relative error| < 1.15e-9 over the open unit interval).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0, 1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

// ---------------------------------------------------------------------------
// Exact small-code oracles

/// Exact failure probabilities by full pattern enumeration.
#[derive(Debug, Clone)]
pub struct ExactFailure {
    /// P(M = 0), when the channel has defects.
    pub p_mask: Option<f64>,
    /// P(D = 0), when decoding failure is well defined independent of
    /// encoder conventions.
    pub p_decode: Option<f64>,
    /// Composite message-failure probability `(M=0) or (M=1 and D=0)`.
    pub p_msg: f64,
    /// P(D = 0 | e erasures), indexed by e.
    pub cond_decode: Vec<f64>,
    /// P(M = 0 | u defects), indexed by u.
    pub cond_mask: Vec<f64>,
}

/// Exact erasure-decoding failure of a linear code: an erasure pattern
/// whose unerased generator rows lose rank `j` admits `2^j` matching
/// codewords and fails with probability `1 - 2^-j`.
pub fn exact_bec_failure(code: &LinearCode, alpha: f64) -> Result<ExactFailure, SimError> {
    let n = code.n;
    if n > ORACLE_MAX_N {
        return Err(SimError::BudgetExceeded(format!(
            "oracle enumerates 2^n patterns; n = {n} > {ORACLE_MAX_N}"
        )));
    }
    let cond = enumerate_patterns(n, |_, unerased| {
        code.k - code.g.select_rows(unerased).rank()
    });
    let p = mix_binomial(&cond, n, alpha);
    Ok(ExactFailure {
        p_mask: None,
        p_decode: Some(p),
        p_msg: p,
        cond_decode: cond,
        cond_mask: Vec::new(),
    })
}

/// Exact masking failure of a partitioned code: a defect pattern whose
/// `G0` rows lose rank `j` is unmaskable for all but `2^-j` of the stuck
/// values.
pub fn exact_bdc_failure(pcode: &PartitionedCode, beta: f64) -> Result<ExactFailure, SimError> {
    let n = pcode.n;
    if n > ORACLE_MAX_N {
        return Err(SimError::BudgetExceeded(format!(
            "oracle enumerates 2^n patterns; n = {n} > {ORACLE_MAX_N}"
        )));
    }
    let cond = enumerate_patterns(n, |defects, _| {
        defects.len() - pcode.g0.select_rows(defects).rank()
    });
    let p = mix_binomial(&cond, n, beta);
    Ok(ExactFailure {
        p_mask: Some(p),
        p_decode: None,
        p_msg: p,
        cond_decode: Vec::new(),
        cond_mask: cond,
    })
}

/// Exact combined-channel failure, enumerating defect and erasure patterns
/// jointly (3^n work, so only tiny codes).
pub fn exact_bdec_failure(
    pcode: &PartitionedCode,
    alpha: f64,
    beta: f64,
) -> Result<ExactFailure, SimError> {
    let n = pcode.n;
    if n > ORACLE_MAX_N_BDEC {
        return Err(SimError::BudgetExceeded(format!(
            "combined oracle enumerates 3^n patterns; n = {n} > {ORACLE_MAX_N_BDEC}"
        )));
    }
    let gtilde = pcode.gtilde();
    let dim = pcode.k + pcode.l;
    let mut p_mask = 0.0f64;
    let mut p_mask_ok_decode_fail = 0.0f64;
    for defect_mask in 0u32..(1u32 << n) {
        let u: Vec<usize> = (0..n).filter(|&i| (defect_mask >> i) & 1 == 1).collect();
        let pu = beta.powi(u.len() as i32) * (1.0 - beta).powi((n - u.len()) as i32);
        if pu == 0.0 {
            continue;
        }
        let j0 = u.len() - pcode.g0.select_rows(&u).rank();
        let mask_fail = 1.0 - 0.5f64.powi(j0 as i32);
        p_mask += pu * mask_fail;

        // erasures live on the normal cells only
        let w: Vec<usize> = (0..n).filter(|&i| (defect_mask >> i) & 1 == 0).collect();
        let mut decode_fail_given_mask_ok = 0.0f64;
        for erase_bits in 0u32..(1u32 << w.len()) {
            let e: Vec<usize> = (0..w.len())
                .filter(|&i| (erase_bits >> i) & 1 == 1)
                .map(|i| w[i])
                .collect();
            let pe = alpha.powi(e.len() as i32) * (1.0 - alpha).powi((w.len() - e.len()) as i32);
            if pe == 0.0 {
                continue;
            }
            let v: Vec<usize> = (0..n).filter(|&i| !e.contains(&i)).collect();
            let j1 = dim - gtilde.select_rows(&v).rank();
            decode_fail_given_mask_ok += pe * (1.0 - 0.5f64.powi(j1 as i32));
        }
        p_mask_ok_decode_fail += pu * (1.0 - mask_fail) * decode_fail_given_mask_ok;
    }
    Ok(ExactFailure {
        p_mask: Some(p_mask),
        p_decode: None,
        p_msg: p_mask + p_mask_ok_decode_fail,
        cond_decode: Vec::new(),
        cond_mask: Vec::new(),
    })
}

/// Dispatch on channel kind.
pub fn exact_failure_small(
    code: &SimCode,
    channel: ChannelKind,
    params: &ChannelParams,
) -> Result<ExactFailure, SimError> {
    match (channel, code) {
        (ChannelKind::Bec, SimCode::Linear(c)) => exact_bec_failure(c, params.alpha),
        (ChannelKind::Bdc, SimCode::Partitioned(c)) => exact_bdc_failure(c, params.beta),
        (ChannelKind::Bdec, SimCode::Partitioned(c)) => {
            exact_bdec_failure(c, params.alpha, params.beta)
        }
        (ch, _) => Err(SimError::InvalidParam(format!(
            "channel {} does not match the code family",
            ch.as_str()
        ))),
    }
}

/// For each pattern size, the average of `1 - 2^-j` over all patterns of
/// that size, where `j` is the candidate exponent reported by `deficiency`
/// from the pattern and its complement.
fn enumerate_patterns(n: usize, deficiency: impl Fn(&[usize], &[usize]) -> usize) -> Vec<f64> {
    let mut fail_sum = vec![0.0f64; n + 1];
    for mask in 0u32..(1u32 << n) {
        let pattern: Vec<usize> = (0..n).filter(|&i| (mask >> i) & 1 == 1).collect();
        let complement: Vec<usize> = (0..n).filter(|&i| (mask >> i) & 1 == 0).collect();
        let j = deficiency(&pattern, &complement);
        if j > 0 {
            fail_sum[pattern.len()] += 1.0 - 0.5f64.powi(j as i32);
        }
    }
    (0..=n)
        .map(|s| fail_sum[s] / binomial_u128(n, s) as f64)
        .collect()
}

/// Exact binomial coefficient for the small lengths the oracles handle.
fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn mix_binomial(cond: &[f64], n: usize, p: f64) -> f64 {
    if p == 0.0 {
        return cond[0];
    }
    if p == 1.0 {
        return cond[n];
    }
    (0..=n)
        .map(|s| {
            (ln_binomial(n, s) + s as f64 * p.ln() + (n - s) as f64 * (1.0 - p).ln()).exp()
                * cond[s]
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Duality check

/// One matched erasure/defect pair: same weight distribution, `α = β`.
#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub method: String,
    pub p_bec: f64,
    pub p_bdc: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub alpha: f64,
    pub pairs: Vec<PairCheck>,
}

impl DualityReport {
    pub fn all_passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed)
    }
}

/// Matched pair: erasure code with generator `G`, defect code with
/// `G0 = H` of the same code, so both weight distributions coincide.
fn matched_pair(m: u32, t: u32) -> Result<(LinearCode, PartitionedCode), SimError> {
    let linear = LinearCode::bch(m, t)?;
    let pcode = PartitionedCode::pure_bdc_from_g0(linear.h.clone())?;
    Ok((linear, pcode))
}

/// Checks P(D=0) = P(M=0) on matched pairs: exactly on enumerable codes,
/// by confidence-interval overlap on the long one.
pub fn duality_check(alpha: f64, trials: u64, seed: u64) -> Result<DualityReport, SimError> {
    let mut pairs = Vec::new();

    let hamming = LinearCode::hamming_7_4();
    let hamming_defects = PartitionedCode::pure_bdc_from_g0(hamming.h.clone())?;
    let small: Vec<(String, LinearCode, PartitionedCode)> = {
        let (bch15, pbch15) = matched_pair(4, 1)?;
        vec![
            ("[7,4] Hamming".to_string(), hamming, hamming_defects),
            ("[15,11] Hamming".to_string(), bch15, pbch15),
        ]
    };
    for (label, linear, pcode) in &small {
        let bec = exact_bec_failure(linear, alpha)?;
        let bdc = exact_bdc_failure(pcode, alpha)?;
        let diff = (bec.p_msg - bdc.p_msg).abs();
        pairs.push(PairCheck {
            label: label.clone(),
            n: linear.n,
            k: linear.k,
            method: "exact".into(),
            p_bec: bec.p_msg,
            p_bdc: bdc.p_msg,
            passed: diff <= 1e-12,
        });
    }

    if trials > 0 {
        let bec_cfg = ExperimentConfig {
            channel: ChannelKind::Bec,
            alpha,
            beta: 0.0,
            code: CodeDescriptor {
                family: "bch".into(),
                n: 1023,
                k: 923,
                l: None,
                m: Some(10),
                t0: None,
                t1: Some(10),
                primitive_poly: None,
            },
            trials,
            seed,
            workers: None,
            ci_level: 0.95,
        };
        let bdc_cfg = ExperimentConfig {
            channel: ChannelKind::Bdc,
            alpha: 0.0,
            beta: alpha,
            code: CodeDescriptor {
                family: "pbch".into(),
                n: 1023,
                k: 923,
                l: Some(100),
                m: Some(10),
                t0: Some(10),
                t1: None,
                primitive_poly: None,
            },
            trials,
            seed: seed ^ 0x5eed_0002,
            workers: None,
            ci_level: 0.95,
        };
        let bec_run = run_trials(&bec_cfg)?;
        let bdc_run = run_trials(&bdc_cfg)?;
        let passed = bec_run.p_msg.overlaps(&bdc_run.p_msg);
        pairs.push(PairCheck {
            label: "[1023,923] BCH".into(),
            n: 1023,
            k: 923,
            method: format!("monte-carlo ({trials} trials, 95% ci overlap)"),
            p_bec: bec_run.p_msg.p_hat,
            p_bdc: bdc_run.p_msg.p_hat,
            passed,
        });
    }

    Ok(DualityReport { alpha, pairs })
}

// ---------------------------------------------------------------------------
// Table reproduction

/// Channels with capacity 0.95, from the pure-erasure end to the
/// pure-defect end.
pub const CHANNELS_095: [(f64, f64); 7] = [
    (0.0500, 0.0),
    (0.0404, 0.0100),
    (0.0306, 0.0200),
    (0.0253, 0.0253),
    (0.0200, 0.0306),
    (0.0100, 0.0404),
    (0.0, 0.0500),
];

/// Emits the reproduction CSV bundle into `out_dir`:
/// `channels.csv` (capacity checks), `objectives.csv` (per-candidate bound
/// curves), `allocation.csv` (discrete and real allocations), and, when
/// `trials > 0`, `simulation.csv` with Monte-Carlo points per candidate.
pub fn reproduce_tables(
    out_dir: &Path,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<String>, SimError> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let candidates = candidate_table_1023();

    let mut channels = String::from("channel,alpha,beta,capacity\n");
    for (i, (alpha, beta)) in CHANNELS_095.iter().enumerate() {
        let params = ChannelParams::new(*alpha, *beta).expect("table params are valid");
        channels.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            alpha,
            beta,
            params.capacity(ChannelKind::Bdec)
        ));
    }
    written.push(write_file(out_dir, "channels.csv", &channels)?);

    let mut objectives = String::from("channel,alpha,beta,l,r,d0,d1,objective_log2,objective\n");
    let mut allocation = String::from("channel,alpha,beta,l_hat,r_hat,l_tilde,r_tilde,regime\n");
    for (i, (alpha, beta)) in CHANNELS_095.iter().enumerate() {
        let scored = score_candidates(&candidates, 1023, *alpha, *beta);
        for s in &scored {
            objectives.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                i + 1,
                alpha,
                beta,
                s.candidate.l,
                s.candidate.r,
                s.candidate.d0,
                s.candidate.d1,
                s.objective_log2,
                s.objective()
            ));
        }
        let sol = allocate(&candidates, 1023, 923, *alpha, *beta);
        allocation.push_str(&format!(
            "{},{},{},{},{},{:.1},{:.1},{}\n",
            i + 1,
            alpha,
            beta,
            sol.l_hat,
            sol.r_hat,
            sol.l_tilde,
            sol.r_tilde,
            sol.regime.as_str()
        ));
    }
    written.push(write_file(out_dir, "objectives.csv", &objectives)?);
    written.push(write_file(out_dir, "allocation.csv", &allocation)?);

    if trials > 0 {
        let mut sim = RESULT_CSV_HEADER.to_string() + "\n";
        for (i, (alpha, beta)) in CHANNELS_095.iter().enumerate() {
            for cand in &candidates {
                let config = ExperimentConfig {
                    channel: ChannelKind::Bdec,
                    alpha: *alpha,
                    beta: *beta,
                    code: CodeDescriptor {
                        family: "pbch".into(),
                        n: 1023,
                        k: 923,
                        l: Some(cand.l),
                        m: Some(10),
                        t0: None,
                        t1: None,
                        primitive_poly: None,
                    },
                    trials,
                    seed: seed ^ ((i as u64) << 32) ^ cand.l as u64,
                    workers,
                    ci_level: 0.95,
                };
                sim.push_str(&run_trials(&config)?.csv_row());
                sim.push('\n');
            }
        }
        written.push(write_file(out_dir, "simulation.csv", &sim)?);
    }
    Ok(written)
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<String, SimError> {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path)?;
    f.write_all(content.as_bytes())?;
    Ok(path.display().to_string())
}
