//! Command-line entry point: flat key=value config files merged under
//! explicit flags, subcommand dispatch, and reproducible structured output
//! (byte-identical for identical config + seed, independent of --threads).

use crate::arith::Real;
use crate::dioph::{ClaimId, ClaimInstance};
use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;
use crate::pseudopoly::{PseudoPolynomial, DEFAULT_PRECISION_CAP};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "pplab", version, about = "desk-scale experiments on fractional parts of pseudo-polynomials at primes")]
pub struct Cli {
    /// flat key = value config file; flags override file values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output path (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// output format where a choice exists: json|csv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// seed for every sampled computation
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker-thread hint; results are identical for any value
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// floor-certification precision cap in bits
    /// (flag > PPLAB_PRECISION_CAP env > default 16384)
    #[arg(long, global = true)]
    pub precision_cap: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// exact exponent bundle for (k, theta)
    Exponents(ExponentsArgs),
    /// prime table up to a limit
    Primes(PrimesArgs),
    /// decomposition parameters U, V, Z and their constraint report
    Hbparams(HbArgs),
    /// Diophantine approximation tools
    Dioph(DiophArgs),
    /// sampled claim verification (alias of `dioph claims`)
    Claims(ClaimsArgs),
    /// exponential sums
    Expsum(ExpsumArgs),
    /// minimum fractional-part search over primes
    SearchMin(SearchMinArgs),
    /// least-squares decay exponent from a search-min CSV
    FitDecay(FitDecayArgs),
    /// large-sieve witness search
    SieveWitness(SieveWitnessArgs),
    /// smallest prime with floor(f(p)) divisible by m
    MultipleSearch(MultipleSearchArgs),
    /// sizes of the three Case I sums at desk scale
    Case1Demo(Case1Args),
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
    /// epsilon for the B threshold (exact rational, default 0)
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Args)]
pub struct PrimesArgs {
    #[arg(long)]
    pub limit: Option<String>,
}

#[derive(Debug, Args)]
pub struct HbArgs {
    #[arg(long = "Y", visible_alias = "y")]
    pub y: Option<String>,
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long)]
    pub c2: Option<String>,
    #[arg(long)]
    pub c3: Option<String>,
    /// also emit the dyadic block skeleton
    #[arg(long, default_value_t = false)]
    pub skeleton: bool,
}

#[derive(Debug, Args)]
pub struct DiophArgs {
    #[command(subcommand)]
    pub what: DiophCommand,
}

#[derive(Debug, Subcommand)]
pub enum DiophCommand {
    /// Dirichlet approximation of x with window Q
    Approx(ApproxArgs),
    /// all convergents with denominator up to max-q
    Cf(CfArgs),
    /// sampled claim verification
    Claims(ClaimsArgs),
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long = "Q", visible_alias = "q")]
    pub q: Option<String>,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub max_q: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct ClaimsArgs {
    #[arg(long)]
    pub claim: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long = "X", visible_alias = "x")]
    pub x: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExpsumArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long = "X", visible_alias = "x")]
    pub x: Option<String>,
    /// restrict the sum to primes
    #[arg(long, default_value_t = false)]
    pub primes_only: bool,
    /// weight by the von Mangoldt function
    #[arg(long, default_value_t = false)]
    pub vonmangoldt: bool,
    /// working precision in bits
    #[arg(long)]
    pub wp: Option<String>,
    /// accept pure polynomials
    #[arg(long, default_value_t = false)]
    pub relax: bool,
}

#[derive(Debug, Args)]
pub struct SearchMinArgs {
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    /// one value or a comma list, e.g. 1000,10000,30000
    #[arg(long = "X", visible_alias = "x")]
    pub x: Option<String>,
    #[arg(long, default_value_t = false)]
    pub relax: bool,
    /// error out instead of skipping floors undecided at the cap
    #[arg(long, default_value_t = false)]
    pub strict_floors: bool,
}

#[derive(Debug, Args)]
pub struct FitDecayArgs {
    /// CSV produced by search-min
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// attach the predicted rho for (k, theta)
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Args)]
pub struct SieveWitnessArgs {
    /// explicit points, comma separated
    #[arg(long)]
    pub points: Option<String>,
    /// or: sample n points with ||x|| >= 1/m by construction
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
}

#[derive(Debug, Args)]
pub struct MultipleSearchArgs {
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub limit: Option<String>,
    #[arg(long, default_value_t = false)]
    pub relax: bool,
}

#[derive(Debug, Args)]
pub struct Case1Args {
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long = "X", visible_alias = "x")]
    pub x: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    /// contradiction exponent rho-tilde (default rho/2)
    #[arg(long)]
    pub rho_tilde: Option<String>,
    #[arg(long)]
    pub wp: Option<String>,
    #[arg(long, default_value_t = false)]
    pub relax: bool,
}

/// Fully resolved invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub cli: Cli,
    pub seed: u64,
    pub precision_cap: u32,
    /// the exact argv the run resolved to (after config-file merge)
    pub invocation: Vec<String>,
}

/// Parse argv with an optional flat key=value file merged underneath:
/// file pairs become flags only where the flag is absent from argv.
pub fn parse_config(argv: &[String], file: Option<&str>) -> Result<RunConfig> {
    let mut merged: Vec<String> = argv.to_vec();
    if let Some(text) = file {
        let extra = file_pairs(text)?;
        for (key, value) in extra {
            let flag = format!("--{}", key);
            let already = argv
                .iter()
                .any(|a| a == &flag || a.starts_with(&format!("{}=", flag)));
            if !already {
                merged.push(flag);
                if !value.is_empty() {
                    merged.push(value);
                }
            }
        }
    }
    let cli = Cli::try_parse_from(&merged).map_err(map_clap_error)?;
    let precision_cap = cli
        .precision_cap
        .or_else(|| {
            std::env::var("PPLAB_PRECISION_CAP")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_PRECISION_CAP);
    let seed = cli.seed.unwrap_or(0x5EED);
    Ok(RunConfig { seed, precision_cap, invocation: merged, cli })
}

fn map_clap_error(e: clap::Error) -> Error {
    use clap::error::ErrorKind::*;
    match e.kind() {
        UnknownArgument | InvalidSubcommand => Error::UnknownFlag(e.to_string()),
        ValueValidation | InvalidValue => Error::MalformedNumber(e.to_string()),
        _ => Error::MalformedNumber(e.to_string()),
    }
}

fn file_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::UnknownFlag(format!("config line {} is not key = value: {:?}", lineno + 1, raw))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

// ---- typed flag readers -------------------------------------------------

fn need<'a>(opt: &'a Option<String>, name: &str) -> Result<&'a str> {
    opt.as_deref()
        .ok_or_else(|| Error::UnknownFlag(format!("missing required --{}", name)))
}

fn parse_u64_flag(opt: &Option<String>, name: &str) -> Result<u64> {
    need(opt, name)?
        .parse()
        .map_err(|_| Error::MalformedNumber(format!("--{} {:?}", name, opt.as_deref().unwrap_or(""))))
}

fn parse_u64_or(opt: &Option<String>, name: &str, default: u64) -> Result<u64> {
    match opt {
        None => Ok(default),
        Some(_) => parse_u64_flag(opt, name),
    }
}

fn parse_i64_flag(opt: &Option<String>, name: &str) -> Result<i64> {
    need(opt, name)?
        .parse()
        .map_err(|_| Error::MalformedNumber(format!("--{} {:?}", name, opt.as_deref().unwrap_or(""))))
}

fn parse_rat_flag(opt: &Option<String>, name: &str) -> Result<BigRational> {
    crate::arith::parse_rational(need(opt, name)?)
        .map_err(|_| Error::MalformedNumber(format!("--{} {:?}", name, opt.as_deref().unwrap_or(""))))
}

fn parse_real_flag(opt: &Option<String>, name: &str) -> Result<Real> {
    Real::parse(need(opt, name)?)
        .map_err(|_| Error::MalformedNumber(format!("--{} {:?}", name, opt.as_deref().unwrap_or(""))))
}

fn parse_poly_flag(opt: &Option<String>, name: &str, strict: bool) -> Result<PseudoPolynomial> {
    PseudoPolynomial::parse(need(opt, name)?, strict)
}

// ---- output plumbing ----------------------------------------------------

#[derive(Debug, Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    precision_cap: u32,
    invocation: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Envelope<T: Serialize> {
    meta: Meta,
    result: T,
}

fn emit_json<T: Serialize>(config: &RunConfig, result: T) -> Result<()> {
    let envelope = Envelope {
        meta: Meta {
            tool: "pplab",
            version: TOOL_VERSION,
            seed: config.seed,
            precision_cap: config.precision_cap,
            invocation: config.invocation.iter().skip(1).cloned().collect(),
        },
        result,
    };
    let text = serde_json::to_string_pretty(&envelope).expect("serializable") + "\n";
    write_out(config, text.as_bytes())
}

fn emit_csv(config: &RunConfig, header: &str, rows: &[String]) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(&format!("# tool = pplab {}\n", TOOL_VERSION));
    buf.push_str(&format!("# seed = {}\n", config.seed));
    buf.push_str(&format!("# precision_cap = {}\n", config.precision_cap));
    buf.push_str(&format!(
        "# invocation = {}\n",
        config.invocation.iter().skip(1).cloned().collect::<Vec<_>>().join(" ")
    ));
    if !header.is_empty() {
        buf.push_str(header);
        buf.push('\n');
    }
    for r in rows {
        buf.push_str(r);
        buf.push('\n');
    }
    write_out(config, buf.as_bytes())
}

fn write_out(config: &RunConfig, bytes: &[u8]) -> Result<()> {
    match &config.cli.out {
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, bytes)?;
            Ok(())
        }
    }
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

// ---- result views -------------------------------------------------------

#[derive(Serialize)]
struct BundleView {
    k: i64,
    theta: String,
    tau1: String,
    rho_star: String,
    rho: String,
    rho_lemma: String,
    rho_lemma_note: &'static str,
    c_split: String,
    b_threshold: String,
    eps: String,
    tau_type_i_small_m: String,
    tau_type_i_large_m: String,
    tau_type_ii_low: String,
    tau_type_ii_high_base: String,
    property_f_range: bool,
    saving_type_i: String,
    saving_type_i_mid: String,
    saving_type_ii: String,
    saving_type_ii_note: &'static str,
    saving_type_ii_high: String,
    saving_type_ii_near: String,
    saving_type_ii_low: String,
}

#[derive(Serialize)]
struct ApproxView {
    x: String,
    q_window: String,
    a: String,
    q: String,
    err: String,
    err_f64: f64,
}

#[derive(Serialize)]
struct ClaimView {
    claim: &'static str,
    k: i64,
    theta: String,
    y_exponent: String,
    m: u64,
    h: u64,
    x: u64,
    j: i64,
    a: String,
    q: String,
    err_f64: f64,
    alpha_target: f64,
    q_lower_target: f64,
    q_upper_target: f64,
    lower_ok: bool,
    ratio: f64,
    scaled_down: bool,
    dirichlet_ok: bool,
}

#[derive(Serialize)]
struct ClaimsSummary {
    claim: &'static str,
    samples: u64,
    dirichlet_ok: u64,
    lower_ok: u64,
    lower_ok_ratio: f64,
    window_rejected: u64,
    reports: Vec<ClaimView>,
}

#[derive(Serialize)]
struct ExpsumView {
    value_re: f64,
    value_im: f64,
    magnitude: f64,
    terms: u64,
    err_bound: f64,
    working_precision: u32,
}

#[derive(Serialize)]
struct HbView {
    y: String,
    c1: String,
    c2: String,
    c3: String,
    u: f64,
    v: f64,
    z: String,
    all_pass: bool,
    constraints: Vec<HbConstraintView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skeleton: Option<HbSkeletonView>,
}

#[derive(Serialize)]
struct HbConstraintView {
    name: &'static str,
    lhs: f64,
    rhs: f64,
    pass: bool,
}

#[derive(Serialize)]
struct HbSkeletonView {
    dyadic_levels: u32,
    type1_ranges: Vec<((f64, f64), (f64, f64))>,
    type2_ranges: Vec<((f64, f64), (f64, f64))>,
}

#[derive(Serialize)]
struct WitnessView {
    n: usize,
    m_bound: u64,
    witness_m: u64,
    magnitude: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct FitView {
    points: Vec<(f64, f64)>,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_predicted: Option<String>,
}

#[derive(Serialize)]
struct Case1View {
    x: u64,
    m: u64,
    q: u64,
    h_window: u64,
    truncated_sum: f64,
    sum1_direct_over_q: f64,
    sum2_shifted: f64,
    sum3_fejer: f64,
    working_precision: u32,
}

#[derive(Serialize)]
struct MultipleView {
    m: u64,
    limit: u64,
    prime: u64,
    floor_value: String,
}

// ---- dispatch -----------------------------------------------------------

/// Execute a resolved configuration. Returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let body = || -> Result<()> {
        match &config.cli.command {
            Command::Exponents(args) => run_exponents(config, args),
            Command::Primes(args) => run_primes(config, args),
            Command::Hbparams(args) => run_hbparams(config, args),
            Command::Dioph(args) => match &args.what {
                DiophCommand::Approx(a) => run_approx(config, a),
                DiophCommand::Cf(a) => run_cf(config, a),
                DiophCommand::Claims(a) => run_claims(config, a),
            },
            Command::Claims(args) => run_claims(config, args),
            Command::Expsum(args) => run_expsum(config, args),
            Command::SearchMin(args) => run_search_min(config, args),
            Command::FitDecay(args) => run_fit_decay(config, args),
            Command::SieveWitness(args) => run_sieve_witness(config, args),
            Command::MultipleSearch(args) => run_multiple_search(config, args),
            Command::Case1Demo(args) => run_case1(config, args),
        }
    };
    let with_pool = || match config.cli.threads {
        None => body(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::BadParameters(e.to_string()));
            match pool {
                Ok(p) => p.install(body),
                Err(e) => Err(e),
            }
        }
    };
    match with_pool() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pplab: {}", e);
            e.exit_code()
        }
    }
}

fn run_exponents(config: &RunConfig, args: &ExponentsArgs) -> Result<()> {
    let k = parse_i64_flag(&args.k, "k")?;
    let theta = parse_rat_flag(&args.theta, "theta")?;
    let eps = match &args.eps {
        None => BigRational::zero(),
        Some(_) => parse_rat_flag(&args.eps, "eps")?,
    };
    let bundle = crate::exponents::compute_bundle(k, &theta)?;
    let saving = crate::exponents::proposition_exponents(&bundle);
    emit_json(
        config,
        BundleView {
            k: bundle.k,
            theta: rat_str(&bundle.theta),
            tau1: rat_str(&bundle.tau1),
            rho_star: rat_str(&bundle.rho_star),
            rho: rat_str(&bundle.rho),
            rho_lemma: rat_str(&bundle.rho_lemma),
            rho_lemma_note: "interpretation: prime-sum exponent taken as 3*rho so that rho(f) <= rho_lemma/3",
            c_split: rat_str(&bundle.c_split),
            b_threshold: rat_str(&bundle.b_threshold(&eps)),
            eps: rat_str(&eps),
            tau_type_i_small_m: rat_str(&bundle.tau_type_i_small_m),
            tau_type_i_large_m: rat_str(&bundle.tau_type_i_large_m),
            tau_type_ii_low: rat_str(&bundle.tau_type_ii_low),
            tau_type_ii_high_base: rat_str(&bundle.tau_type_ii_high_base),
            property_f_range: bundle.property_f_range,
            saving_type_i: rat_str(&saving.type_i),
            saving_type_i_mid: rat_str(&saving.type_i_mid),
            saving_type_ii: rat_str(&saving.type_ii),
            saving_type_ii_note: "second term enters with a positive sign in the exponent (weakens the saving); reproduced verbatim",
            saving_type_ii_high: rat_str(&saving.type_ii_high),
            saving_type_ii_near: rat_str(&saving.type_ii_near),
            saving_type_ii_low: rat_str(&saving.type_ii_low),
        },
    )
}

fn run_primes(config: &RunConfig, args: &PrimesArgs) -> Result<()> {
    let limit = parse_u64_flag(&args.limit, "limit")?;
    let table = crate::primes::sieve(limit)?;
    let rows: Vec<String> = table.primes().iter().map(|p| p.to_string()).collect();
    emit_csv(config, "", &rows)
}

fn run_hbparams(config: &RunConfig, args: &HbArgs) -> Result<()> {
    let y: BigInt = need(&args.y, "Y")?
        .parse()
        .map_err(|_| Error::MalformedNumber(format!("--Y {:?}", args.y.as_deref().unwrap_or(""))))?;
    let defaults = crate::primes::default_hb_constants();
    let c1 = match &args.c1 {
        None => defaults.0,
        Some(_) => parse_rat_flag(&args.c1, "c1")?,
    };
    let c2 = match &args.c2 {
        None => defaults.1,
        Some(_) => parse_rat_flag(&args.c2, "c2")?,
    };
    let c3 = match &args.c3 {
        None => defaults.2,
        Some(_) => parse_rat_flag(&args.c3, "c3")?,
    };
    let params = crate::primes::hb_params(&y, (c1.clone(), c2.clone(), c3.clone()))?;
    let skeleton = if args.skeleton {
        let s = crate::primes::hb_skeleton(&y, &params);
        Some(HbSkeletonView {
            dyadic_levels: s.dyadic_levels,
            type1_ranges: s.type1_ranges,
            type2_ranges: s.type2_ranges,
        })
    } else {
        None
    };
    emit_json(
        config,
        HbView {
            y: y.to_string(),
            c1: rat_str(&c1),
            c2: rat_str(&c2),
            c3: rat_str(&c3),
            u: params.u,
            v: params.v,
            z: rat_str(&params.z),
            all_pass: params.all_pass,
            constraints: params
                .constraint_report
                .iter()
                .map(|c| HbConstraintView { name: c.name, lhs: c.lhs, rhs: c.rhs, pass: c.pass })
                .collect(),
            skeleton,
        },
    )
}

fn run_approx(config: &RunConfig, args: &ApproxArgs) -> Result<()> {
    let x = parse_real_flag(&args.x, "x")?;
    let q = parse_rat_flag(&args.q, "Q")?;
    let approx = crate::dioph::dirichlet_approx(&x, &q)?;
    emit_json(
        config,
        ApproxView {
            x: x.to_string(),
            q_window: rat_str(&q),
            a: approx.a.to_string(),
            q: approx.q.to_string(),
            err: rat_str(&approx.err),
            err_f64: approx.err_f64(),
        },
    )
}

fn run_cf(config: &RunConfig, args: &CfArgs) -> Result<()> {
    let x = parse_real_flag(&args.x, "x")?;
    let max_q_r = parse_rat_flag(&args.max_q, "max-q")?;
    let max_q = max_q_r.floor().to_integer();
    let convs = crate::dioph::continued_fraction(&x, &max_q)?;
    let views: Vec<ApproxView> = convs
        .iter()
        .map(|c| ApproxView {
            x: x.to_string(),
            q_window: max_q.to_string(),
            a: c.a.to_string(),
            q: c.q.to_string(),
            err: rat_str(&c.err),
            err_f64: c.err_f64(),
        })
        .collect();
    emit_json(config, views)
}

fn run_claims(config: &RunConfig, args: &ClaimsArgs) -> Result<()> {
    let claim = ClaimId::parse(need(&args.claim, "claim")?)?;
    let samples = parse_u64_or(&args.samples, "samples", 100)?;
    let k = match &args.k {
        None => 12,
        Some(_) => parse_i64_flag(&args.k, "k")?,
    };
    let theta = match &args.theta {
        None => BigRational::from_integer(BigInt::from(5)),
        Some(_) => parse_rat_flag(&args.theta, "theta")?,
    };
    let x = parse_u64_or(&args.x, "X", 10_000)?;
    let bundle = crate::exponents::compute_bundle(k, &theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut reports = Vec::new();
    let mut dirichlet_ok = 0u64;
    let mut lower_ok = 0u64;
    let mut window_rejected = 0u64;
    let mut produced = 0u64;
    while produced < samples {
        let inst = sample_instance(claim, &bundle, x, &mut rng)?;
        match crate::dioph::verify_claim(&inst, &bundle) {
            Ok(rep) => {
                produced += 1;
                if rep.dirichlet_ok {
                    dirichlet_ok += 1;
                }
                if rep.lower_ok {
                    lower_ok += 1;
                }
                reports.push(ClaimView {
                    claim: claim.name(),
                    k,
                    theta: rat_str(&theta),
                    y_exponent: rat_str(&inst.y_exponent),
                    m: inst.m,
                    h: inst.h,
                    x: inst.x,
                    j: rep.j,
                    a: rep.approx.a.to_string(),
                    q: rep.approx.q.to_string(),
                    err_f64: rep.approx.err_f64(),
                    alpha_target: rep.alpha_target,
                    q_lower_target: rep.q_lower_target,
                    q_upper_target: rep.q_upper_target,
                    lower_ok: rep.lower_ok,
                    ratio: rep.ratio,
                    scaled_down: rep.scaled_down,
                    dirichlet_ok: rep.dirichlet_ok,
                });
            }
            Err(Error::WindowViolation(_)) | Err(Error::JOutOfClaimRange { .. }) => {
                window_rejected += 1;
                if window_rejected > samples * 100 {
                    return Err(Error::WindowViolation(
                        "sampler keeps leaving the claim window; check k/theta/X".into(),
                    ));
                }
            }
            Err(e) => return Err(e),
        }
    }
    emit_json(
        config,
        ClaimsSummary {
            claim: claim.name(),
            samples,
            dirichlet_ok,
            lower_ok,
            lower_ok_ratio: lower_ok as f64 / samples.max(1) as f64,
            window_rejected,
            reports,
        },
    )
}

/// Draw an in-window instance: a rational y-exponent inside the claim band,
/// a modulus on the right side of the X^c split, a small shift h, and an
/// irrational coefficient sqrt(r) with r in [2, 20) square-free-ish.
fn sample_instance(
    claim: ClaimId,
    bundle: &crate::exponents::ExponentBundle,
    x: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ClaimInstance> {
    let den = rng.gen_range(7..=24i64);
    let frac = |num: i64, den: i64| BigRational::new(BigInt::from(num), BigInt::from(den));
    // band windows as f64 for sampling; verification re-checks exactly
    let (lo, hi) = match claim {
        ClaimId::C41 | ClaimId::C42 => {
            let hi = -&bundle.theta + &bundle.rho_star;
            (frac(-23 * bundle.k, 30), hi)
        }
        ClaimId::C53 => {
            let lo = -&bundle.theta;
            let hi = &lo + bundle.b_threshold(&BigRational::zero());
            (lo, hi)
        }
        ClaimId::C54 => (frac(-23 * bundle.k, 30), -&bundle.theta),
    };
    let t = rng.gen_range(1..den);
    let y_exponent = &lo + (&hi - &lo) * frac(t, den);
    // X^c boundary for the Type I modulus split
    let c_f = crate::pseudopoly::rational_to_f64(&bundle.c_split);
    let xc = (x as f64).powf(c_f);
    let m = match claim {
        ClaimId::C41 => rng.gen_range(1..=(xc.floor() as u64).max(1)),
        ClaimId::C42 => rng.gen_range((xc.ceil() as u64 + 1)..=(x / 4).max(xc.ceil() as u64 + 2)),
        // the Type II claims difference the inner variable n ~ X/M with
        // X^(1/5) << M << X^(1/3): sample n accordingly
        _ => {
            let m_lo = (x as f64).powf(0.2);
            let m_hi = (x as f64).powf(1.0 / 3.0);
            let mm = rng.gen_range(m_lo..m_hi);
            ((x as f64 / mm).round() as u64).max(2)
        }
    };
    let h = rng.gen_range(1..=4u64);
    let r = rng.gen_range(2..=20u64);
    let coefficient = Real::sqrt(BigRational::from_integer(BigInt::from(r)))?;
    Ok(ClaimInstance {
        claim_id: claim,
        k: bundle.k,
        theta: bundle.theta.clone(),
        coefficient,
        m,
        h,
        y_exponent,
        x,
    })
}

fn run_expsum(config: &RunConfig, args: &ExpsumArgs) -> Result<()> {
    let f = parse_poly_flag(&args.f, "f", !args.relax)?;
    let y = parse_real_flag(&args.y, "y")?;
    let x = parse_u64_flag(&args.x, "X")?;
    let wp = parse_u64_or(&args.wp, "wp", crate::expsums::DEFAULT_WORKING_PRECISION as u64)? as u32;
    let result = if args.vonmangoldt {
        crate::expsums::vonmangoldt_exp_sum_wp(&f, &y, x, wp)?
    } else if args.primes_only {
        let primes = crate::primes::sieve(x)?;
        crate::expsums::prime_exp_sum_wp(&f, &y, x, &primes, wp)?
    } else {
        let phase = crate::expsums::ScaledPolyPhase { f: &f, y: &y };
        crate::expsums::exp_sum(&phase, 1..=x, wp)?
    };
    emit_json(
        config,
        ExpsumView {
            value_re: result.value().re,
            value_im: result.value().im,
            magnitude: result.magnitude(),
            terms: result.term_count,
            err_bound: result.rounding_error_bound,
            working_precision: result.working_precision,
        },
    )
}

fn run_search_min(config: &RunConfig, args: &SearchMinArgs) -> Result<()> {
    let xi = parse_real_flag(&args.xi, "xi")?;
    let f = parse_poly_flag(&args.f, "f", !args.relax)?;
    let xs: Vec<u64> = need(&args.x, "X")?
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::MalformedNumber(format!("--X element {:?}", s)))
        })
        .collect::<Result<_>>()?;
    if xs.is_empty() {
        return Err(Error::MalformedNumber("--X needs at least one value".into()));
    }
    let max_x = *xs.iter().max().unwrap();
    let primes = crate::primes::sieve(max_x)?;
    let mut rows = Vec::new();
    for &x in &xs {
        let r = crate::experiments::min_fracpart(
            &xi,
            &f,
            x,
            &primes,
            config.precision_cap,
            args.strict_floors,
        )?;
        rows.push(format!(
            "{},{},{:e},{}",
            r.x, r.argmin_prime, r.min_distance, r.ambiguous_floors
        ));
    }
    emit_csv(config, "X,p_argmin,min_distance,ambiguous_floors", &rows)
}

fn run_fit_decay(config: &RunConfig, args: &FitDecayArgs) -> Result<()> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| Error::UnknownFlag("missing required --in".into()))?;
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for line in text.lines() {
        let l = line.trim();
        if l.is_empty() || l.starts_with('#') || l.starts_with('X') {
            continue;
        }
        let cols: Vec<&str> = l.split(',').collect();
        if cols.len() < 3 {
            return Err(Error::MalformedNumber(format!("bad CSV row {:?}", l)));
        }
        let x: f64 = cols[0]
            .parse()
            .map_err(|_| Error::MalformedNumber(format!("bad X {:?}", cols[0])))?;
        let d: f64 = cols[2]
            .parse()
            .map_err(|_| Error::MalformedNumber(format!("bad min_distance {:?}", cols[2])))?;
        points.push((x, d));
    }
    let mut fit = crate::experiments::decay_fit(&points)?;
    if args.k.is_some() && args.theta.is_some() {
        let k = parse_i64_flag(&args.k, "k")?;
        let theta = parse_rat_flag(&args.theta, "theta")?;
        fit.rho_predicted = Some(crate::exponents::compute_bundle(k, &theta)?.rho);
    }
    emit_json(
        config,
        FitView {
            points: fit.grid.clone(),
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            rho_predicted: fit.rho_predicted.as_ref().map(rat_str),
        },
    )
}

fn run_sieve_witness(config: &RunConfig, args: &SieveWitnessArgs) -> Result<()> {
    let m = parse_u64_or(&args.m, "m", 10)?;
    let points: Vec<f64> = match &args.points {
        Some(text) => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::MalformedNumber(format!("--points element {:?}", s)))
            })
            .collect::<Result<_>>()?,
        None => {
            let n = parse_u64_or(&args.n, "n", 50)? as usize;
            if m < 2 {
                return Err(Error::BadParameters("random instances need m >= 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..n)
                .map(|_| {
                    let margin = 1.0 / m as f64;
                    rng.gen_range(margin..=(1.0 - margin).max(margin))
                })
                .collect()
        }
    };
    let w = crate::experiments::large_sieve_witness(&points, m)?;
    emit_json(
        config,
        WitnessView {
            n: points.len(),
            m_bound: m,
            witness_m: w.m,
            magnitude: w.magnitude,
            threshold: w.threshold,
        },
    )
}

fn run_multiple_search(config: &RunConfig, args: &MultipleSearchArgs) -> Result<()> {
    let m = parse_u64_flag(&args.m, "m")?;
    let f = parse_poly_flag(&args.f, "f", !args.relax)?;
    let limit = parse_u64_flag(&args.limit, "limit")?;
    let primes = crate::primes::sieve(limit)?;
    let p = crate::experiments::multiple_search(m, &f, limit, &primes, config.precision_cap)?;
    let floor = crate::pseudopoly::floor_certified(&f, &BigInt::from(p), config.precision_cap)?;
    emit_json(
        config,
        MultipleView { m, limit, prime: p, floor_value: floor.to_string() },
    )
}

fn run_case1(config: &RunConfig, args: &Case1Args) -> Result<()> {
    let xi = parse_real_flag(&args.xi, "xi")?;
    let f = parse_poly_flag(&args.f, "f", !args.relax)?;
    let x = parse_u64_flag(&args.x, "X")?;
    let m = parse_u64_or(&args.m, "m", 1)?;
    let wp = parse_u64_or(&args.wp, "wp", 96)? as u32;
    let parts = crate::pseudopoly::split(&f);
    let k = parts.poly_degree().ok_or(Error::MissingPolynomialPart)?;
    let theta = parts.pseudo_degree().ok_or(Error::MissingPseudoPart)?.clone();
    let bundle = crate::exponents::compute_bundle(k, &theta)?;
    let mut exp_config = ExperimentConfig::for_bundle(&bundle);
    exp_config.precision_cap = config.precision_cap;
    exp_config.seed = config.seed;
    if args.rho_tilde.is_some() {
        exp_config.contradiction_exponent = parse_rat_flag(&args.rho_tilde, "rho-tilde")?;
    }
    let primes = crate::primes::sieve(x)?;
    let rep = crate::experiments::case1_demo(&xi, &f, x, m, &bundle, &exp_config, &primes, wp)?;
    emit_json(
        config,
        Case1View {
            x: rep.x,
            m: rep.m,
            q: rep.q,
            h_window: rep.h_window,
            truncated_sum: rep.truncated_sum,
            sum1_direct_over_q: rep.sum1,
            sum2_shifted: rep.sum2,
            sum3_fejer: rep.sum3,
            working_precision: rep.working_precision,
        },
    )
}

/// Full entry point used by the binary: argv in, exit code out.
pub fn main_with_args(argv: &[String]) -> i32 {
    // a --config flag must be honoured before clap sees the merged argv
    let file_text = match preload_config(argv) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pplab: {}", e);
            return e.exit_code();
        }
    };
    match parse_config(argv, file_text.as_deref()) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("pplab: {}", e);
            // malformed invocations exit 1; precision/io keep their classes
            let code = e.exit_code();
            if code == 0 {
                1
            } else {
                code
            }
        }
    }
}

fn preload_config(argv: &[String]) -> Result<Option<String>> {
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            let path = argv
                .get(i + 1)
                .ok_or_else(|| Error::UnknownFlag("--config needs a path".into()))?;
            return Ok(Some(std::fs::read_to_string(path)?));
        }
        if let Some(path) = a.strip_prefix("--config=") {
            return Ok(Some(std::fs::read_to_string(path)?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        std::iter::once("pplab")
            .chain(parts.iter().copied())
            .map(String::from)
            .collect()
    }

    #[test]
    fn parse_round_trip() {
        let cfg = parse_config(&argv(&["exponents", "--k", "12", "--theta", "5"]), None).unwrap();
        match &cfg.cli.command {
            Command::Exponents(a) => {
                assert_eq!(a.k.as_deref(), Some("12"));
                assert_eq!(a.theta.as_deref(), Some("5"));
            }
            other => panic!("wrong subcommand {:?}", other),
        }
        assert_eq!(cfg.seed, 0x5EED);
    }

    #[test]
    fn rational_theta_stays_exact() {
        let cfg = parse_config(&argv(&["exponents", "--k", "12", "--theta", "9/2"]), None).unwrap();
        match &cfg.cli.command {
            Command::Exponents(a) => {
                let t = parse_rat_flag(&a.theta, "theta").unwrap();
                assert_eq!(t, BigRational::new(BigInt::from(9), BigInt::from(2)));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn malformed_number_is_reported() {
        let cfg = parse_config(&argv(&["exponents", "--k", "twelve", "--theta", "5"]), None).unwrap();
        match &cfg.cli.command {
            Command::Exponents(a) => {
                assert!(matches!(
                    parse_i64_flag(&a.k, "k"),
                    Err(Error::MalformedNumber(_))
                ));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn unknown_flag_rejected() {
        let e = parse_config(&argv(&["exponents", "--k", "12", "--bogus", "1"]), None).unwrap_err();
        assert!(matches!(e, Error::UnknownFlag(_)));
    }

    #[test]
    fn config_file_fills_gaps_and_flags_win() {
        let file = "k = 13\ntheta = 9/2\n";
        let cfg = parse_config(&argv(&["exponents", "--k", "12"]), Some(file)).unwrap();
        match &cfg.cli.command {
            Command::Exponents(a) => {
                assert_eq!(a.k.as_deref(), Some("12")); // flag wins
                assert_eq!(a.theta.as_deref(), Some("9/2")); // file fills
            }
            _ => unreachable!(),
        }
        // unknown config keys are rejected
        let e = parse_config(&argv(&["exponents", "--k", "12"]), Some("zzz = 1\n")).unwrap_err();
        assert!(matches!(e, Error::UnknownFlag(_)));
    }
}
