//! molab: reproducible command-line runs of the multiplicative-function
//! laboratory. Primary outputs go to files or stdout as CSV/JSON; verdict
//! commands are scriptable through exit codes (0 = pass, 1 = check verdict
//! failed, 2 = usage or validation error).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use molab_core::catalog::{self, CatalogEntry, FamilyParams};
use molab_core::error::Error;
use molab_core::numeric::ComplexValue;
use molab_core::series::partial_sums;
use molab_core::verify::{
    self, ConditionIVerdict, ConditionIiVerdict, MultiplicativityVerdict, Overrides, ScanWeight,
    TransferGridConfig, TransferVerdict,
};
use molab_core::zeta;

mod output;
use output::{write_text, RunReport};

/// Default zero-table path override.
const ZERO_TABLE_ENV: &str = "MOLAB_ZERO_TABLE";

#[derive(Parser)]
#[command(
    name = "molab",
    version,
    about = "Numerical laboratory for multiplicative arithmetic functions: \
             sieved values, compensated partial sums, eta/zeta zeros, Euler \
             factors and MO-condition diagnostics",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for the data-parallel loops (default: all cores).
    /// Results are identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed recorded in reports (reserved for randomized property demos).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct FunctionOpts {
    /// Catalog id: mobius-over-n | mobius-raw | liouville-over-n | eta | gk | character
    #[arg(long)]
    function: String,
    /// Re(alpha) for the eta/gk/character families
    #[arg(long)]
    alpha_re: Option<f64>,
    /// Im(alpha); 0 when omitted
    #[arg(long)]
    alpha_im: Option<f64>,
    /// k of the g_k family (must be a prime power)
    #[arg(long)]
    k: Option<u64>,
    /// Character modulus (built-ins: 3 and 4)
    #[arg(long)]
    modulus: Option<u32>,
}

impl FunctionOpts {
    fn resolve(&self) -> Result<CatalogEntry, Error> {
        catalog::resolve(&self.function, &self.params()?)
    }

    fn params(&self) -> Result<FamilyParams, Error> {
        let alpha = match (self.alpha_re, self.alpha_im) {
            (Some(re), im) => Some(ComplexValue::new(re, im.unwrap_or(0.0))),
            (None, Some(_)) => {
                return Err(Error::Validation(
                    "--alpha-im given without --alpha-re".into(),
                ))
            }
            (None, None) => None,
        };
        Ok(FamilyParams {
            alpha,
            k: self.k,
            modulus: self.modulus,
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump f(n) for n = 1..N: bulk evaluation of a multiplicative function
    /// from its prime-power values (CSV `n,re,im`)
    Sieve {
        #[command(flatten)]
        function: FunctionOpts,
        #[arg(long)]
        limit: u64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checkpointed partial sums S(x) = sum_{n<=x} f(n), accumulated with
    /// compensated summation in ascending n (CSV `x,re,im`)
    Sum {
        #[command(flatten)]
        function: FunctionOpts,
        #[arg(long)]
        limit: u64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the two MO-function conditions: partial sums tending to zero,
    /// and every per-prime Euler factor sum_k f(p^k) nonzero
    MoCheck {
        #[command(flatten)]
        function: FunctionOpts,
        /// Partial-sum limit for the vanishing-sum check
        #[arg(long)]
        limit: u64,
        /// Largest prime checked in the Euler-factor condition
        #[arg(long)]
        pmax: u64,
        /// Certified truncation tail per Euler factor
        #[arg(long, default_value_t = 1e-10)]
        tail: f64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One per-prime Euler factor sum_k f(p^k), truncated with a certified
    /// geometric tail bound, or in exact closed form with --closed
    Euler {
        #[command(flatten)]
        function: FunctionOpts,
        #[arg(long)]
        prime: u64,
        /// Certified truncation tail target
        #[arg(long, default_value_t = 1e-12)]
        tail: f64,
        /// Use the family's closed form instead of truncation
        #[arg(long)]
        closed: bool,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated prime-power distance D(f,g) = sum_p sum_k |g(p^k) - f(p^k)|
    /// with a certified bound on the omitted tail when available
    Distance(DistanceCmd),
    /// Sup of w(x)|S(x)| over dyadic windows: decay-rate evidence for how
    /// fast the partial sums can tend to zero
    Scan {
        #[command(flatten)]
        function: FunctionOpts,
        #[arg(long)]
        limit: u64,
        /// Weight: xlogx | xloglog2 | pow:C | logpow:E | loglogpow:E
        #[arg(long)]
        weight: String,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Critical-line zeros of the Dirichlet eta function (equivalently zeta)
    Zero {
        #[command(subcommand)]
        cmd: ZeroCmd,
    },
    /// Perturb f at finitely many prime powers and test whether the
    /// perturbed partial sums still vanish (closeness-transfer experiment)
    Transfer {
        #[command(flatten)]
        function: FunctionOpts,
        /// Override as `p,k,re,im`; repeatable
        #[arg(long = "override")]
        overrides: Vec<String>,
        #[arg(long)]
        limit: u64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force multiplicativity check of the raw g_k sequence over all
    /// coprime pairs with product <= limit
    Multcheck {
        /// k of the raw g_k sequence (1-k on multiples of k, 1 elsewhere)
        #[arg(long)]
        gk: u64,
        #[arg(long)]
        limit: u64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DistanceCmd {
    /// First function id
    #[arg(long)]
    f: String,
    #[arg(long)]
    f_alpha_re: Option<f64>,
    #[arg(long)]
    f_alpha_im: Option<f64>,
    #[arg(long)]
    f_k: Option<u64>,
    #[arg(long)]
    f_modulus: Option<u32>,
    /// Second function id
    #[arg(long)]
    g: String,
    #[arg(long)]
    g_alpha_re: Option<f64>,
    #[arg(long)]
    g_alpha_im: Option<f64>,
    #[arg(long)]
    g_k: Option<u64>,
    #[arg(long)]
    g_modulus: Option<u32>,
    /// Largest prime in the truncation
    #[arg(long)]
    pmax: u64,
    /// Largest exponent in the truncation
    #[arg(long)]
    kmax: u32,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ZeroCmd {
    /// Refine a zero of eta(1/2 + it) near a guessed height via secant
    /// iteration, verified by the residual |eta(rho)|
    Find {
        #[arg(long)]
        guess: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a zero-table CSV (`index,imag`) and re-verify each row
    /// through eta; table path defaults to $MOLAB_ZERO_TABLE
    Verify {
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // ignore the error from double initialization in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::ZeroNotFound(msg)) => {
            eprintln!("zero not found: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Error> {
    match &cli.cmd {
        Cmd::Sieve {
            function,
            limit,
            out,
        } => {
            let entry = function.resolve()?;
            let values = molab_core::sieve_values(entry.spec(), *limit)?;
            let mut text = String::from("n,re,im\n");
            for (n, v) in values.iter().enumerate().skip(1) {
                text.push_str(&format!("{n},{:.16e},{:.16e}\n", v.re, v.im));
            }
            write_text(out.as_deref(), &text)?;
            Ok(0)
        }
        Cmd::Sum {
            function,
            limit,
            out,
        } => {
            let entry = function.resolve()?;
            let series = partial_sums(entry.spec(), *limit)?;
            let mut buf = Vec::new();
            series.write_csv(&mut buf)?;
            write_text(out.as_deref(), std::str::from_utf8(&buf).unwrap())?;
            Ok(0)
        }
        Cmd::MoCheck {
            function,
            limit,
            pmax,
            tail,
            out,
        } => {
            let entry = function.resolve()?;
            let report = verify::mo_check_entry(&entry, *limit, *pmax, *tail)?;
            let failed = report.condition_i.verdict == ConditionIVerdict::Inconsistent
                || report.condition_ii.verdict == ConditionIiVerdict::FailsAtWitness;
            emit_json(cli, "mo-check", Some(entry.spec().name().into()), &report, out.as_deref())?;
            Ok(if failed { 1 } else { 0 })
        }
        Cmd::Euler {
            function,
            prime,
            tail,
            closed,
            out,
        } => {
            let entry = function.resolve()?;
            if !is_prime(*prime) {
                return Err(Error::Validation(format!("--prime {prime} is not prime")));
            }
            let report = if *closed {
                verify::euler_factor_closed(&entry, *prime)?
            } else {
                verify::euler_factor(entry.spec(), *prime, *tail)?
            };
            emit_json(cli, "euler", Some(entry.spec().name().into()), &report, out.as_deref())?;
            Ok(0)
        }
        Cmd::Distance(d) => {
            let f = catalog::resolve(
                &d.f,
                &FamilyParams {
                    alpha: complex_opt(d.f_alpha_re, d.f_alpha_im)?,
                    k: d.f_k,
                    modulus: d.f_modulus,
                },
            )?;
            let g = catalog::resolve(
                &d.g,
                &FamilyParams {
                    alpha: complex_opt(d.g_alpha_re, d.g_alpha_im)?,
                    k: d.g_k,
                    modulus: d.g_modulus,
                },
            )?;
            let report = verify::distance(f.spec(), g.spec(), d.pmax, d.kmax)?;
            let name = format!("{}|{}", f.spec().name(), g.spec().name());
            emit_json(cli, "distance", Some(name), &report, d.out.as_deref())?;
            Ok(0)
        }
        Cmd::Scan {
            function,
            limit,
            weight,
            out,
            format,
        } => {
            let entry = function.resolve()?;
            let weight = parse_weight(weight)?;
            let report = verify::omega_scan(entry.spec(), *limit, weight)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    write_text(out.as_deref(), std::str::from_utf8(&buf).unwrap())?;
                }
                Format::Json => {
                    emit_json(cli, "scan", Some(entry.spec().name().into()), &report, out.as_deref())?;
                }
            }
            Ok(0)
        }
        Cmd::Zero { cmd } => match cmd {
            ZeroCmd::Find { guess, tol, out } => {
                let zero = zeta::find_zero(*guess, *tol)?;
                println!(
                    "zero {}: t = {:.15}  |eta(rho)| = {:.3e}",
                    zero.index,
                    zero.rho.im,
                    zero.residual.unwrap_or(f64::NAN)
                );
                if out.is_some() {
                    emit_json(cli, "zero find", None, &zero, out.as_deref())?;
                }
                Ok(0)
            }
            ZeroCmd::Verify { table, tol } => {
                let path = table
                    .clone()
                    .or_else(|| std::env::var_os(ZERO_TABLE_ENV).map(PathBuf::from))
                    .ok_or_else(|| {
                        Error::Validation(format!(
                            "no zero table: pass --table or set {ZERO_TABLE_ENV}"
                        ))
                    })?;
                let zeros = zeta::load_zero_table(&path)?;
                let checks = zeta::verify_zero_table(&zeros, *tol)?;
                let mut all_ok = true;
                for c in &checks {
                    println!(
                        "zero {}: t = {:.15}  |eta| = {:.3e}  {}",
                        c.index,
                        c.im,
                        c.residual,
                        if c.ok { "ok" } else { "FAIL" }
                    );
                    all_ok &= c.ok;
                }
                println!(
                    "{} zero(s) loaded from {}, {}",
                    checks.len(),
                    path.display(),
                    if all_ok { "all verified" } else { "verification FAILED" }
                );
                Ok(if all_ok { 0 } else { 1 })
            }
        },
        Cmd::Transfer {
            function,
            overrides,
            limit,
            out,
        } => {
            let entry = function.resolve()?;
            let ovs = parse_overrides(overrides)?;
            let cfg = TransferGridConfig::default();
            let report = verify::transfer_experiment(entry.spec(), &ovs, *limit, &cfg)?;
            let failed = matches!(report.verdict, TransferVerdict::HypothesisViolated(_));
            emit_json(cli, "transfer", Some(entry.spec().name().into()), &report, out.as_deref())?;
            Ok(if failed { 1 } else { 0 })
        }
        Cmd::Multcheck { gk, limit, out } => {
            if *gk < 2 {
                return Err(Error::Validation("--gk must be at least 2".into()));
            }
            if *limit < 2 {
                return Err(Error::Validation("--limit must be at least 2".into()));
            }
            let rule = catalog::raw_gk_rule(*gk);
            let mut values = vec![ComplexValue::new(0.0, 0.0)];
            values.extend((1..=*limit).map(rule));
            let verdict = verify::is_multiplicative_bruteforce(&values)?;
            let code = match &verdict {
                MultiplicativityVerdict::Multiplicative => {
                    println!("g_{gk} multiplicative over all coprime pairs with product <= {limit}");
                    0
                }
                MultiplicativityVerdict::Counterexample {
                    m,
                    n,
                    pointwise_product,
                    value_at_product,
                } => {
                    println!(
                        "counterexample m={m} n={n}: f(m)f(n) = {} but f(mn) = {}",
                        pointwise_product.re, value_at_product.re
                    );
                    1
                }
            };
            if out.is_some() {
                emit_json(cli, "multcheck", Some(format!("gk[k={gk}](raw)")), &verdict, out.as_deref())?;
            }
            Ok(code)
        }
    }
}

fn complex_opt(re: Option<f64>, im: Option<f64>) -> Result<Option<ComplexValue>, Error> {
    match (re, im) {
        (Some(re), im) => Ok(Some(ComplexValue::new(re, im.unwrap_or(0.0)))),
        (None, Some(_)) => Err(Error::Validation("imaginary part given without real part".into())),
        (None, None) => Ok(None),
    }
}

fn parse_weight(text: &str) -> Result<ScanWeight, Error> {
    let parse_param = |rest: &str, what: &str| -> Result<f64, Error> {
        rest.parse()
            .map_err(|e| Error::Validation(format!("bad {what} parameter `{rest}`: {e}")))
    };
    if text == "xlogx" {
        Ok(ScanWeight::XLogX)
    } else if text == "xloglog2" {
        Ok(ScanWeight::XLogLogSq)
    } else if let Some(rest) = text.strip_prefix("pow:") {
        Ok(ScanWeight::XPow(parse_param(rest, "pow")?))
    } else if let Some(rest) = text.strip_prefix("logpow:") {
        Ok(ScanWeight::XLogPow(parse_param(rest, "logpow")?))
    } else if let Some(rest) = text.strip_prefix("loglogpow:") {
        Ok(ScanWeight::XLogLogPow(parse_param(rest, "loglogpow")?))
    } else {
        Err(Error::Validation(format!(
            "unknown weight `{text}` (xlogx | xloglog2 | pow:C | logpow:E | loglogpow:E)"
        )))
    }
}

fn parse_overrides(items: &[String]) -> Result<Overrides, Error> {
    let mut out = Overrides::new();
    for item in items {
        let parts: Vec<&str> = item.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Validation(format!(
                "override `{item}` must be p,k,re,im"
            )));
        }
        let p: u64 = parts[0]
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("override `{item}`: bad p: {e}")))?;
        let k: u32 = parts[1]
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("override `{item}`: bad k: {e}")))?;
        let re: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("override `{item}`: bad re: {e}")))?;
        let im: f64 = parts[3]
            .trim()
            .parse()
            .map_err(|e| Error::Validation(format!("override `{item}`: bad im: {e}")))?;
        if !is_prime(p) {
            return Err(Error::Validation(format!(
                "override `{item}`: p = {p} is not prime"
            )));
        }
        if k == 0 {
            return Err(Error::Validation(format!(
                "override `{item}`: k must be >= 1"
            )));
        }
        out.insert((p, k), ComplexValue::new(re, im));
    }
    Ok(out)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn emit_json<T: Serialize>(
    cli: &Cli,
    command: &str,
    function: Option<String>,
    report: &T,
    out: Option<&Path>,
) -> Result<(), Error> {
    let wrapped = RunReport {
        command,
        function,
        threads: rayon::current_num_threads(),
        seed: cli.seed,
        report,
    };
    let mut text = serde_json::to_string_pretty(&wrapped)
        .map_err(|e| Error::Validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(out, &text)?;
    Ok(())
}
