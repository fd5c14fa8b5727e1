//! Command-line surface: code construction, bound evaluation, redundancy
//! allocation, Monte-Carlo simulation, exact oracles, duality checks, and
//! table reproduction.
//!
//! Machine-readable output (CSV or JSON) goes to standard output or
//! `--out`; human-readable summaries go to standard error. Every stochastic
//! subcommand takes a mandatory `--seed`, and repeated invocations with the
//! same flags and seed produce byte-identical output.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 unrealizable code,
//! 4 budget exceeded.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

use bdec::allocation::{allocate, candidate_table};
use bdec::bounds::{
    bdc_failure_profile, bdc_finite_bound, bdec_finite_bound, bec_failure_profile, bec_finite_bound,
};
use bdec::channels::{ChannelKind, ChannelParams};
use bdec::codes::{
    weight_distribution_binomial, weight_distribution_exact, CodeDescriptor, CodeError,
    WeightDistribution,
};
use bdec::schemes::SchemeError;
use bdec::sim::{
    build_code, duality_check, exact_failure_small, reproduce_tables, run_trials, ExperimentConfig,
    SimCode, SimError, RESULT_CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "bdec",
    version,
    about = "Erasure and stuck-at defect coding toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code and print its JSON descriptor.
    CodeInfo(CodeInfoArgs),
    /// Evaluate failure bounds (per-count profiles or finite-length forms).
    Bound(BoundArgs),
    /// Redundancy allocation: discrete candidates and the KKT solution.
    Allocate(AllocateArgs),
    /// Monte-Carlo simulation of one channel/code configuration.
    Simulate(SimulateArgs),
    /// Exact failure probabilities for small codes by full enumeration.
    Oracle(OracleArgs),
    /// Erasure/defect duality check on matched code pairs.
    Duality(DualityArgs),
    /// Emit the CSV bundle reproducing the reference tables and curves.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Code family: hamming74, bch, or pbch.
    #[arg(long = "code", alias = "family", default_value = "hamming74")]
    code: String,
    #[arg(long, default_value_t = 7)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Masking parity width (pbch only).
    #[arg(long)]
    l: Option<usize>,
}

impl CodeArgs {
    fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor {
            family: self.code.clone(),
            n: self.n,
            k: self.k,
            l: self.l,
            m: None,
            t0: None,
            t1: None,
            primitive_poly: None,
        }
    }
}

#[derive(Args)]
struct CodeInfoArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Build the code from a generator matrix in the text exchange format
    /// instead of a named family.
    #[arg(long)]
    from_generator: Option<PathBuf>,
    /// Directory for matrix exports in the text exchange format.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    channel: ChannelKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Erasure count for a BEC profile row.
    #[arg(long)]
    e: Option<usize>,
    /// Defect count for a BDC profile row.
    #[arg(long)]
    u: Option<usize>,
    /// Sweep the profile over every count 0..=n.
    #[arg(long, default_value_t = false)]
    sweep: bool,
    /// Minimum distance for binomial-approximation profiles.
    #[arg(long)]
    d: Option<usize>,
    /// Use the exact enumerated weight distribution of this code family
    /// instead of the binomial approximation.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AllocateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file; other flags are ignored when present.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "bec")]
    channel: ChannelKind,
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Mandatory for reproducibility of the stochastic run.
    #[arg(long, required = true)]
    seed: Option<u64>,
    /// Worker thread cap; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    ci_level: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long)]
    channel: ChannelKind,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Also emit the per-count conditional failure probabilities.
    #[arg(long, default_value_t = false)]
    per_count: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DualityArgs {
    /// Shared erasure and defect probability of the matched pair.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Monte-Carlo trials for the long pair; 0 checks only the exact pairs.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, required = true)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Output directory for the CSV bundle.
    #[arg(long)]
    out: PathBuf,
    /// Monte-Carlo trials per candidate; 0 emits only the closed forms.
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(code_err) = cause.downcast_ref::<CodeError>() {
            return match code_err {
                CodeError::Unrealizable { .. } => 3,
                CodeError::EnumerationBudget { .. } => 4,
                _ => 2,
            };
        }
        if let Some(sim_err) = cause.downcast_ref::<SimError>() {
            return match sim_err {
                SimError::Code(CodeError::Unrealizable { .. }) => 3,
                SimError::Code(CodeError::EnumerationBudget { .. }) => 4,
                SimError::BudgetExceeded(_) => 4,
                _ => 2,
            };
        }
        if let Some(scheme_err) = cause.downcast_ref::<SchemeError>() {
            return match scheme_err {
                SchemeError::BruteForceBudget { .. } => 4,
            };
        }
    }
    2
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::CodeInfo(args) => code_info(args),
        Command::Bound(args) => bound(args),
        Command::Allocate(args) => allocate_cmd(args),
        Command::Simulate(args) => simulate(args),
        Command::Oracle(args) => oracle(args),
        Command::Duality(args) => duality(args),
        Command::Reproduce(args) => reproduce(args),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn code_info(args: CodeInfoArgs) -> Result<()> {
    let code = match &args.from_generator {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let g = bdec::gf2::BitMatrix::from_text(&text).map_err(|e| anyhow!(e.to_string()))?;
            SimCode::Linear(bdec::codes::LinearCode::from_generator(g)?)
        }
        None => build_code(&args.code.descriptor())?,
    };
    let json = serde_json::to_string_pretty(code.descriptor())?;
    println!("{json}");
    match &code {
        SimCode::Linear(c) => {
            let dist = match c.minimum_distance() {
                Ok(d) => format!("{d:?}"),
                Err(_) => "unknown (beyond enumeration budget)".into(),
            };
            eprintln!(
                "[n, k] = [{}, {}], rate {:.4}, distance {}",
                c.n,
                c.k,
                c.rate(),
                dist
            );
            if let Some(dir) = &args.export {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("g.txt"), c.g.to_text())?;
                std::fs::write(dir.join("h.txt"), c.h.to_text())?;
                eprintln!("wrote g.txt, h.txt to {}", dir.display());
            }
        }
        SimCode::Partitioned(c) => {
            eprintln!(
                "[n, k, l] = [{}, {}, {}], r = {}, rate {:.4}, designed d0 = {:?}, d1 = {:?}",
                c.n,
                c.k,
                c.l,
                c.r(),
                c.rate(),
                c.d0_designed,
                c.d1_designed
            );
            if let Some(dir) = &args.export {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("g1.txt"), c.g1.to_text())?;
                std::fs::write(dir.join("g0.txt"), c.g0.to_text())?;
                std::fs::write(dir.join("h0.txt"), c.h0.to_text())?;
                std::fs::write(dir.join("htilde.txt"), c.htilde.to_text())?;
                eprintln!(
                    "wrote g1.txt, g0.txt, h0.txt, htilde.txt to {}",
                    dir.display()
                );
            }
        }
    }
    Ok(())
}

const BOUND_CSV_HEADER: &str = "channel,n,k,l,r,alpha,beta,e_or_u,kind,value";

struct BoundRows {
    channel: ChannelKind,
    n: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    csv: String,
}

impl BoundRows {
    fn new(channel: ChannelKind, n: usize, k: usize, alpha: f64, beta: f64) -> Self {
        BoundRows {
            channel,
            n,
            k,
            alpha,
            beta,
            csv: format!("{BOUND_CSV_HEADER}\n"),
        }
    }

    fn push(&mut self, l: usize, r: usize, e_or_u: Option<usize>, kind: &str, value: f64) {
        self.csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            self.channel.as_str(),
            self.n,
            self.k,
            l,
            r,
            self.alpha,
            self.beta,
            e_or_u.map_or(String::new(), |x| x.to_string()),
            kind,
            value
        ));
    }
}

fn profile_wd(args: &BoundArgs, redundancy: usize) -> Result<(WeightDistribution, usize)> {
    if let Some(family) = &args.code {
        let desc = CodeDescriptor {
            family: family.clone(),
            n: args.n,
            k: args.k,
            l: args.l,
            m: None,
            t0: None,
            t1: None,
            primitive_poly: None,
        };
        let code = build_code(&desc)?;
        match code {
            SimCode::Linear(c) => {
                let wd = weight_distribution_exact(&c.g)?;
                let d = c.minimum_distance()?.value() as usize;
                Ok((wd, args.d.unwrap_or(d)))
            }
            SimCode::Partitioned(c) => {
                // dual weight distribution of the masking code: enumerate
                // the code with parity check G0
                let kernel = c.g0.transpose().null_space();
                let wd = weight_distribution_exact(&kernel)?;
                let d = args
                    .d
                    .or(c.d0_designed.map(|d| d as usize))
                    .ok_or_else(|| anyhow!("--d required for this code"))?;
                Ok((wd, d))
            }
        }
    } else {
        let d = args.d.ok_or_else(|| {
            anyhow!("profile bounds need --d (designed distance) or --code for exact weights")
        })?;
        Ok((weight_distribution_binomial(args.n, redundancy), d))
    }
}

fn bound(args: BoundArgs) -> Result<()> {
    let params = ChannelParams::new(args.alpha, args.beta).map_err(|e| anyhow!(e.to_string()))?;
    let n = args.n;
    let k = args.k;
    let mut rows = BoundRows::new(args.channel, n, k, args.alpha, args.beta);
    match args.channel {
        ChannelKind::Bdec => {
            let l = args.l.ok_or_else(|| anyhow!("bdec bound needs --l"))?;
            let r = args
                .r
                .unwrap_or(n.checked_sub(k + l).ok_or_else(|| anyhow!("k + l > n"))?);
            if l + r != n - k {
                return Err(anyhow!("l + r must equal n - k"));
            }
            let b = bdec_finite_bound(n, k, l, r, params.alpha, params.beta);
            rows.push(l, r, None, "upper", b.value());
        }
        ChannelKind::Bec => {
            let r = args.r.unwrap_or(n - k);
            if args.sweep || args.e.is_some() {
                let (wd, d) = profile_wd(&args, r)?;
                let counts: Vec<usize> = if args.sweep {
                    (0..=n).collect()
                } else {
                    vec![args.e.unwrap()]
                };
                for e in counts {
                    let bv = bec_failure_profile(n, &wd, d, e);
                    rows.push(0, r, Some(e), bv.kind_str(), bv.value());
                }
            } else {
                rows.push(
                    0,
                    r,
                    None,
                    "upper",
                    bec_finite_bound(n, r, params.alpha).value(),
                );
            }
        }
        ChannelKind::Bdc => {
            let l = args.l.unwrap_or(n - k);
            if args.sweep || args.u.is_some() {
                let (wd, d) = profile_wd(&args, l)?;
                let counts: Vec<usize> = if args.sweep {
                    (0..=n).collect()
                } else {
                    vec![args.u.unwrap()]
                };
                for u in counts {
                    let bv = bdc_failure_profile(n, &wd, d, u);
                    rows.push(l, 0, Some(u), bv.kind_str(), bv.value());
                }
            } else {
                rows.push(
                    l,
                    0,
                    None,
                    "upper",
                    bdc_finite_bound(n, l, params.beta).value(),
                );
            }
        }
    }
    emit(&args.out, &rows.csv)
}

fn allocate_cmd(args: AllocateArgs) -> Result<()> {
    ChannelParams::new(args.alpha, args.beta).map_err(|e| anyhow!(e.to_string()))?;
    let m = usize::BITS - args.n.leading_zeros();
    if args.n == 0 || args.n != (1usize << m) - 1 {
        return Err(anyhow!(
            "allocate expects n of the form 2^m - 1, got {}",
            args.n
        ));
    }
    let candidates = candidate_table(m, args.k)?;
    if candidates.is_empty() {
        return Err(CodeError::Unrealizable {
            n: args.n,
            k: args.k,
            l: 0,
            nearest: vec![],
        }
        .into());
    }
    let sol = allocate(&candidates, args.n, args.k, args.alpha, args.beta);
    let mut csv = String::from("n,k,alpha,beta,l_hat,r_hat,l_tilde,r_tilde,regime\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{:.4},{:.4},{}\n",
        args.n,
        args.k,
        args.alpha,
        args.beta,
        sol.l_hat,
        sol.r_hat,
        sol.l_tilde,
        sol.r_tilde,
        sol.regime.as_str()
    ));
    csv.push('\n');
    csv.push_str("l,r,d0,d1,objective_log2,objective\n");
    for s in &sol.scored {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.candidate.l,
            s.candidate.r,
            s.candidate.d0,
            s.candidate.d1,
            s.objective_log2,
            s.objective()
        ));
    }
    emit(&args.out, &csv)?;
    eprintln!(
        "l_hat={} l_tilde={:.1} regime={}",
        sol.l_hat,
        sol.l_tilde,
        sol.regime.as_str()
    );
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).context("parsing config JSON")?
        }
        None => ExperimentConfig {
            channel: args.channel,
            alpha: args.alpha,
            beta: args.beta,
            code: args.code.descriptor(),
            trials: args.trials,
            seed: args.seed.expect("clap enforces --seed"),
            workers: args.workers,
            ci_level: args.ci_level,
        },
    };
    let result = run_trials(&config)?;
    let mut csv = String::from(RESULT_CSV_HEADER);
    csv.push('\n');
    csv.push_str(&result.csv_row());
    csv.push('\n');
    emit(&args.out, &csv)?;
    eprintln!(
        "{} trials in {:.2}s: p_msg={:.3e} ({} failures), bound={:.3e}",
        result.trials, result.wall_time_s, result.p_msg.p_hat, result.fail_msg, result.bound
    );
    Ok(())
}

fn oracle(args: OracleArgs) -> Result<()> {
    let params = ChannelParams::new(args.alpha, args.beta).map_err(|e| anyhow!(e.to_string()))?;
    let code = build_code(&args.code.descriptor())?;
    let exact = exact_failure_small(&code, args.channel, &params)?;
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |p| p.to_string());
    let mut csv =
        String::from("channel,family,n,k,alpha,beta,p_mask_fail,p_decode_fail,p_msg_fail\n");
    csv.push_str(&format!(
        "{},{},{},{},{},{},{},{},{}\n",
        args.channel.as_str(),
        code.descriptor().family,
        code.n(),
        code.k(),
        args.alpha,
        args.beta,
        fmt_opt(exact.p_mask),
        fmt_opt(exact.p_decode),
        exact.p_msg
    ));
    if args.per_count {
        csv.push('\n');
        csv.push_str("count,p_fail_given_count\n");
        let cond = if exact.cond_decode.is_empty() {
            &exact.cond_mask
        } else {
            &exact.cond_decode
        };
        for (x, p) in cond.iter().enumerate() {
            csv.push_str(&format!("{x},{p}\n"));
        }
    }
    emit(&args.out, &csv)
}

fn duality(args: DualityArgs) -> Result<()> {
    let report = duality_check(
        args.alpha,
        args.trials,
        args.seed.expect("clap enforces --seed"),
    )?;
    let mut csv = String::from("label,n,k,method,p_bec,p_bdc,passed\n");
    for pair in &report.pairs {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            pair.label, pair.n, pair.k, pair.method, pair.p_bec, pair.p_bdc, pair.passed
        ));
    }
    emit(&args.out, &csv)?;
    if report.all_passed() {
        eprintln!("duality holds on all {} pairs", report.pairs.len());
        Ok(())
    } else {
        Err(anyhow!("duality check failed; see report"))
    }
}

fn reproduce(args: ReproduceArgs) -> Result<()> {
    if args.trials > 0 && args.seed.is_none() {
        return Err(anyhow!("--seed is required when --trials > 0"));
    }
    let files = reproduce_tables(&args.out, args.trials, args.seed.unwrap_or(0), args.workers)?;
    for f in &files {
        println!("{f}");
    }
    eprintln!("wrote {} files to {}", files.len(), args.out.display());
    Ok(())
}
