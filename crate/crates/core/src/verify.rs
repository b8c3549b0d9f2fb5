//! The MO-condition toolkit: certified Euler factors, the two defining
//! condition checks (series sum zero; every per-prime factor nonzero),
//! absolute-convergence diagnostics, the prime-power distance between
//! multiplicative functions, perturbations and the closeness-transfer
//! experiment, and weighted decay scans of partial sums.
//!
//! All reports serialize to JSON with stable field names and carry
//! `"schema_version": 1`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::catalog::{CatalogEntry, FamilyKind};
use crate::error::{Error, Result};
use crate::multiplicative::{MultiplicativeSpec, TailCertificate};
use crate::numeric::{ensure_finite, recip_pow, recip_pow_k, ComplexValue, Neumaier, ONE};
use crate::parallel;
use crate::series::{partial_sums, CompensatedSum, PartialSumSeries};
use crate::sieve::SpfTable;
use crate::stream;

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Euler factors
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerFactorMethod {
    ClosedForm,
    TruncatedGeometric,
}

/// Truncated per-prime series sum_{k=0}^K f(p^k) with a certified bound on
/// the omitted tail. Closed-form factors carry tail_bound = 0.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EulerFactorReport {
    pub schema_version: u32,
    pub p: u64,
    #[serde(with = "crate::numeric::complex_fields")]
    pub value: ComplexValue,
    pub truncation_depth: u32,
    pub tail_bound: f64,
    pub method: EulerFactorMethod,
}

const MAX_EULER_TERMS: u32 = 200_000;

/// Truncate sum_k f(p^k) at the smallest depth whose geometric tail bound
/// |f(p^{K+1})| / (1 - r) is at or below `target_tail`. The function must
/// carry a tail certificate.
pub fn euler_factor(
    f: &MultiplicativeSpec,
    p: u64,
    target_tail: f64,
) -> Result<EulerFactorReport> {
    if target_tail <= 0.0 {
        return Err(Error::Domain("target_tail must be positive".into()));
    }
    let Some(tail) = f.tail() else {
        return Err(Error::UncertifiableTail(format!(
            "`{}` carries no tail certificate; only closed-form catalog entries can be \
             evaluated without one",
            f.name()
        )));
    };
    let r = tail.ratio;
    let mut acc = CompensatedSum::new();
    acc.add(ONE); // k = 0 term, f(1) = 1
    let mut next_val = f.prime_power_value(p, 1);
    let mut k = 0u32;
    loop {
        k += 1;
        acc.add(next_val);
        next_val = f.prime_power_value(p, k + 1);
        // the geometric bound needs the ratio certificate from exponent k+1 on
        if k + 1 >= tail.min_exponent {
            let bound = next_val.norm() / (1.0 - r);
            if bound <= target_tail {
                let value = ensure_finite(acc.value(), "euler_factor")?;
                return Ok(EulerFactorReport {
                    schema_version: SCHEMA_VERSION,
                    p,
                    value,
                    truncation_depth: k,
                    tail_bound: bound,
                    method: EulerFactorMethod::TruncatedGeometric,
                });
            }
        }
        if k >= MAX_EULER_TERMS {
            return Err(Error::Precision(format!(
                "euler_factor({}, p={p}): tail not certified within {MAX_EULER_TERMS} terms",
                f.name()
            )));
        }
    }
}

/// Exact closed-form Euler factor for a catalog family:
/// 1 - 1/p for mu/n; 1/(1 - f(p)) for completely multiplicative entries with
/// |f(p)| < 1; (2^a - 2)/(2^a - 1) and 1/(1 - p^-a) for the alternating
/// family; (k^a - k)/(k^a (1 - p^-a)) and 1/(1 - p^-a) for g_k.
pub fn euler_factor_closed(entry: &CatalogEntry, p: u64) -> Result<EulerFactorReport> {
    let value = match entry.kind() {
        FamilyKind::MobiusOverN => ONE - ComplexValue::new(1.0 / p as f64, 0.0),
        FamilyKind::MobiusRaw => ComplexValue::new(0.0, 0.0), // 1 + mu(p) = 0 at every prime
        FamilyKind::LiouvilleOverN | FamilyKind::Character { .. } => {
            cm_factor(entry.spec(), p)?
        }
        FamilyKind::Eta { alpha } => {
            if p == 2 {
                let two_alpha = recip_pow(2.0, -*alpha); // 2^alpha
                (two_alpha - 2.0) / (two_alpha - 1.0)
            } else {
                (ONE - recip_pow_k(p, 1, *alpha)).inv()
            }
        }
        FamilyKind::Gk {
            k,
            base_prime,
            alpha,
            ..
        } => {
            if p == *base_prime {
                let k_alpha = recip_pow(*k as f64, -*alpha); // k^alpha
                let kf = ComplexValue::new(*k as f64, 0.0);
                (k_alpha - kf) / (k_alpha * (ONE - recip_pow_k(p, 1, *alpha)))
            } else {
                (ONE - recip_pow_k(p, 1, *alpha)).inv()
            }
        }
    };
    Ok(EulerFactorReport {
        schema_version: SCHEMA_VERSION,
        p,
        value: ensure_finite(value, "euler_factor_closed")?,
        truncation_depth: 0,
        tail_bound: 0.0,
        method: EulerFactorMethod::ClosedForm,
    })
}

fn cm_factor(spec: &MultiplicativeSpec, p: u64) -> Result<ComplexValue> {
    let fp = spec.prime_power_value(p, 1);
    if fp.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "euler factor of `{}` diverges at p = {p}: |f(p)| = {} >= 1",
            spec.name(),
            fp.norm()
        )));
    }
    Ok((ONE - fp).inv())
}

// ---------------------------------------------------------------------------
// Decay fitting over checkpointed partial sums
// ---------------------------------------------------------------------------

/// Least-squares decay fit: slope of log sup-window |S(x)| against log x
/// over dyadic windows. Window suprema rather than pointwise |S| because the
/// partial sums oscillate through zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    /// c in sup |S(x)| ~ x^-c.
    pub exponent: f64,
    /// RMS residual of the fit in natural-log space.
    pub log_residual_rms: f64,
    /// Mean of log sup over the fitted windows (sets the linear scale of the
    /// residual).
    pub mean_log_sup: f64,
    pub window_count: u32,
}

/// Fit the decay exponent of |S(x)| over [x_lo, x_hi] using dyadic windows
/// of the checkpoint list. None if fewer than 3 windows carry a nonzero sup.
pub fn fit_decay_exponent(
    checkpoints: &[(u64, ComplexValue)],
    x_lo: u64,
    x_hi: u64,
) -> Option<DecayFit> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut lo = x_lo.max(1);
    while lo <= x_hi {
        let hi = (lo.saturating_mul(2) - 1).min(x_hi);
        let sup = checkpoints
            .iter()
            .filter(|&&(x, _)| x >= lo && x <= hi)
            .map(|&(_, s)| s.norm())
            .fold(0.0f64, f64::max);
        if sup > 0.0 {
            let mid = ((lo as f64) * (hi as f64)).sqrt();
            pts.push((mid.ln(), sup.ln()));
        }
        lo = hi + 1;
    }
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + icept);
            r * r
        })
        .sum();
    Some(DecayFit {
        exponent: -slope,
        log_residual_rms: (ss_res / n).sqrt(),
        mean_log_sup: my,
        window_count: pts.len() as u32,
    })
}

// ---------------------------------------------------------------------------
// Condition (i): the series sum vanishes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionIVerdict {
    ConsistentWithZero,
    Inconsistent,
    Inconclusive,
}

/// Verdict thresholds (empirical, sized for runs up to 1e6..1e7):
/// consistent-with-zero needs |S(limit)| <= 10 * limit^-0.2 and a positive
/// fitted decay exponent; inconsistent needs an essentially flat fit
/// (exponent <= 0.02) with |S| over the last decade at least 5x the linear
/// scale of the fit residual. Anything else is inconclusive.
pub const CONSISTENT_ABS_COEFF: f64 = 10.0;
pub const CONSISTENT_ABS_EXPONENT: f64 = -0.2;
pub const INCONSISTENT_MAX_EXPONENT: f64 = 0.02;
pub const INCONSISTENT_MARGIN: f64 = 5.0;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionIReport {
    pub schema_version: u32,
    pub limit: u64,
    #[serde(with = "crate::numeric::complex_fields")]
    pub s_at_limit: ComplexValue,
    pub abs_s_at_limit: f64,
    /// None when no decay fit was possible.
    pub fitted_decay_exponent: Option<f64>,
    pub fit_window: (u64, u64),
    pub verdict: ConditionIVerdict,
}

/// Empirical check of "sum f(n) = 0": runs checkpointed partial sums to
/// `limit` and classifies the decay. The fit window is the upper half of the
/// checkpoints in log x, i.e. [sqrt(limit), limit].
pub fn check_condition_i(f: &MultiplicativeSpec, limit: u64) -> Result<ConditionIReport> {
    if limit < 1000 {
        return Err(Error::Range(format!(
            "check_condition_i needs limit >= 1000, got {limit}"
        )));
    }
    let series = partial_sums(f, limit)?;
    Ok(check_condition_i_from_series(&series))
}

/// Classify an existing partial-sum series (same verdict rules as
/// [`check_condition_i`]).
pub fn check_condition_i_from_series(series: &PartialSumSeries) -> ConditionIReport {
    let limit = series.limit();
    let x_lo = crate::numeric::isqrt(limit).max(1);
    let fit = fit_decay_exponent(series.checkpoints(), x_lo, limit);
    let s = series.final_sum();
    let abs_s = s.norm();
    let threshold = CONSISTENT_ABS_COEFF * (limit as f64).powf(CONSISTENT_ABS_EXPONENT);
    let last_decade_min = series
        .checkpoints()
        .iter()
        .filter(|&&(x, _)| x >= limit / 10)
        .map(|&(_, v)| v.norm())
        .fold(f64::INFINITY, f64::min);
    let verdict = match fit {
        Some(ref fit) => {
            let lin_residual = fit.mean_log_sup.exp() * fit.log_residual_rms;
            if abs_s <= threshold && fit.exponent > 0.0 {
                ConditionIVerdict::ConsistentWithZero
            } else if fit.exponent <= INCONSISTENT_MAX_EXPONENT
                && last_decade_min.is_finite()
                && last_decade_min >= INCONSISTENT_MARGIN * lin_residual
                && last_decade_min > 0.0
            {
                ConditionIVerdict::Inconsistent
            } else {
                ConditionIVerdict::Inconclusive
            }
        }
        None => ConditionIVerdict::Inconclusive,
    };
    ConditionIReport {
        schema_version: SCHEMA_VERSION,
        limit,
        s_at_limit: s,
        abs_s_at_limit: abs_s,
        fitted_decay_exponent: fit.map(|f| f.exponent),
        fit_window: (x_lo, limit),
        verdict,
    }
}

// ---------------------------------------------------------------------------
// Condition (ii): every Euler factor is nonzero
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionIiVerdict {
    HoldsUpToPmax,
    FailsAtWitness,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionIiReport {
    pub schema_version: u32,
    pub p_max: u64,
    pub target_tail: f64,
    /// Smallest |factor| seen, and where.
    pub min_abs_factor: f64,
    pub min_at_prime: u64,
    /// First prime whose factor cannot be separated from zero:
    /// |value| <= tail_bound.
    pub witness_prime: Option<u64>,
    pub verdict: ConditionIiVerdict,
    /// True when the family's closed forms show the factors for p > p_max
    /// cannot vanish, making the finite check complete.
    pub complete_via_closed_form: bool,
}

/// Relative slack on the witness test |value| <= tail_bound. When a factor
/// is truly zero the truncated value IS the truncation error, which can
/// saturate its bound exactly; the slack keeps the comparison off that
/// rounding knife edge.
pub const CONDITION_II_SLACK: f64 = 1e-6;

/// Check sum_k f(p^k) != 0 for all p <= p_max via certified truncations: a
/// factor fails when its truncated value is within the certified tail bound
/// of zero.
pub fn check_condition_ii(
    f: &MultiplicativeSpec,
    p_max: u64,
    target_tail: f64,
) -> Result<ConditionIiReport> {
    condition_ii_core(f, p_max, target_tail)
}

/// [`check_condition_ii`] for a catalog entry, which can also record that
/// the closed forms settle all primes beyond p_max.
pub fn check_condition_ii_entry(
    entry: &CatalogEntry,
    p_max: u64,
    target_tail: f64,
) -> Result<ConditionIiReport> {
    let complete = match entry.kind() {
        FamilyKind::MobiusOverN | FamilyKind::LiouvilleOverN | FamilyKind::Character { .. } => {
            true
        }
        // the only factor that can vanish sits at the base prime
        FamilyKind::Gk { base_prime, .. } => *base_prime <= p_max,
        FamilyKind::Eta { .. } => true, // odd-prime factors never vanish
        FamilyKind::MobiusRaw => false, // every factor vanishes; check finds p = 2
    };
    let mut report = condition_ii_core(entry.spec(), p_max, target_tail)?;
    report.complete_via_closed_form = complete;
    Ok(report)
}

fn condition_ii_core(
    f: &MultiplicativeSpec,
    p_max: u64,
    target_tail: f64,
) -> Result<ConditionIiReport> {
    if p_max < 2 {
        return Err(Error::Range(format!(
            "check_condition_ii needs p_max >= 2, got {p_max}"
        )));
    }
    let table = SpfTable::build(p_max)?;
    let primes = table.primes();
    let reports: Vec<Result<(f64, f64)>> = parallel::map_indexed(primes.len(), |i| {
        let r = euler_factor(f, primes[i] as u64, target_tail)?;
        Ok((r.value.norm(), r.tail_bound))
    });
    let mut min_abs = f64::INFINITY;
    let mut min_at = 0u64;
    let mut witness = None;
    for (i, r) in reports.into_iter().enumerate() {
        let (abs, tail) = r?;
        let p = primes[i] as u64;
        if abs < min_abs {
            min_abs = abs;
            min_at = p;
        }
        if witness.is_none() && abs <= tail * (1.0 + CONDITION_II_SLACK) + f64::MIN_POSITIVE {
            witness = Some(p);
        }
    }
    let verdict = if witness.is_some() {
        ConditionIiVerdict::FailsAtWitness
    } else if min_abs.is_finite() {
        ConditionIiVerdict::HoldsUpToPmax
    } else {
        ConditionIiVerdict::Inconclusive
    };
    Ok(ConditionIiReport {
        schema_version: SCHEMA_VERSION,
        p_max,
        target_tail,
        min_abs_factor: min_abs,
        min_at_prime: min_at,
        witness_prime: witness,
        verdict,
        complete_via_closed_form: false,
    })
}

/// The two condition checks bundled, as emitted by `molab mo-check`.
#[derive(Clone, Debug, Serialize)]
pub struct MoCheckReport {
    pub schema_version: u32,
    pub function_name: String,
    pub condition_i: ConditionIReport,
    pub condition_ii: ConditionIiReport,
}

pub fn mo_check_entry(
    entry: &CatalogEntry,
    limit: u64,
    p_max: u64,
    target_tail: f64,
) -> Result<MoCheckReport> {
    Ok(MoCheckReport {
        schema_version: SCHEMA_VERSION,
        function_name: entry.spec().name().to_string(),
        condition_i: check_condition_i(entry.spec(), limit)?,
        condition_ii: check_condition_ii_entry(entry, p_max, target_tail)?,
    })
}

// ---------------------------------------------------------------------------
// Absolute-convergence diagnostics
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WindowIncrement {
    pub lo: u64,
    pub hi: u64,
    pub increment: f64,
}

/// Convergence-vs-divergence heuristic over dyadic windows: if the window
/// increments of a nonnegative series do not decay geometrically (mean
/// consecutive ratio below 0.85 over the last windows), the trend is flagged
/// divergent.
#[derive(Clone, Debug, Serialize)]
pub struct TrendSummary {
    pub windows: Vec<WindowIncrement>,
    pub mean_tail_ratio: Option<f64>,
    pub divergent_trend: bool,
}

pub const DIVERGENT_RATIO_THRESHOLD: f64 = 0.85;

fn trend_from_windows(windows: Vec<WindowIncrement>) -> TrendSummary {
    // only complete dyadic windows feed the ratio estimate; a clipped final
    // window would fake a decaying increment
    let pos: Vec<f64> = windows
        .iter()
        .filter(|w| w.hi == 2 * w.lo - 1)
        .map(|w| w.increment)
        .filter(|&v| v > 0.0)
        .collect();
    let ratios: Vec<f64> = pos.windows(2).map(|w| w[1] / w[0]).collect();
    let take = ratios.len().min(6);
    let tail = &ratios[ratios.len() - take..];
    let mean = if tail.is_empty() {
        None
    } else {
        Some(tail.iter().sum::<f64>() / tail.len() as f64)
    };
    TrendSummary {
        windows,
        mean_tail_ratio: mean,
        divergent_trend: mean.map(|m| m >= DIVERGENT_RATIO_THRESHOLD).unwrap_or(false),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AbsConvergenceReport {
    pub schema_version: u32,
    /// sum_{p <= p_max} sum_{k <= k_max} |f(p^k)| with its dyadic trend in p.
    pub prime_power_sum: f64,
    pub prime_power_trend: TrendSummary,
    /// sum_{n <= n_max} |f(n)| with its dyadic trend in n.
    pub n_sum: f64,
    pub n_trend: TrendSummary,
}

/// Both truncations of the absolute-convergence criterion: the double sum
/// over prime powers and the plain sum over n, each with a divergence flag.
pub fn absolute_convergence_diag(
    f: &MultiplicativeSpec,
    p_max: u64,
    k_max: u32,
    n_max: u64,
) -> Result<AbsConvergenceReport> {
    if p_max < 2 || k_max < 2 || n_max < 2 {
        return Err(Error::Range(
            "absolute_convergence_diag needs p_max, k_max, n_max >= 2".into(),
        ));
    }
    let table = SpfTable::build(p_max)?;
    let primes = table.primes();
    let per_prime: Vec<f64> = parallel::map_indexed(primes.len(), |i| {
        let p = primes[i] as u64;
        let mut acc = Neumaier::default();
        for k in 1..=k_max {
            acc.add(f.prime_power_value(p, k).norm());
        }
        acc.value()
    });
    let mut pp_total = Neumaier::default();
    let mut pp_windows = Vec::new();
    let mut lo = 2u64;
    let mut idx = 0usize;
    while lo <= p_max {
        let hi = (lo * 2 - 1).min(p_max);
        let mut inc = Neumaier::default();
        while idx < primes.len() && (primes[idx] as u64) <= hi {
            inc.add(per_prime[idx]);
            idx += 1;
        }
        pp_windows.push(WindowIncrement {
            lo,
            hi,
            increment: inc.value(),
        });
        pp_total.add(inc.value());
        lo = hi + 1;
    }

    let mut n_total = CompensatedSum::new();
    let mut n_windows = Vec::new();
    let mut win_lo = 1u64;
    let mut win_acc = Neumaier::default();
    stream::stream_values(f, n_max, |n, v| {
        let hi = (win_lo * 2 - 1).min(n_max);
        if n > hi {
            n_windows.push(WindowIncrement {
                lo: win_lo,
                hi,
                increment: win_acc.value(),
            });
            win_lo = hi + 1;
            win_acc = Neumaier::default();
        }
        win_acc.add(v.norm());
        n_total.add(ComplexValue::new(v.norm(), 0.0));
        Ok(())
    })?;
    n_windows.push(WindowIncrement {
        lo: win_lo,
        hi: n_max,
        increment: win_acc.value(),
    });

    Ok(AbsConvergenceReport {
        schema_version: SCHEMA_VERSION,
        prime_power_sum: pp_total.value(),
        prime_power_trend: trend_from_windows(pp_windows),
        n_sum: n_total.value().re,
        n_trend: trend_from_windows(n_windows),
    })
}

// ---------------------------------------------------------------------------
// Brute-force multiplicativity
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum MultiplicativityVerdict {
    Multiplicative,
    Counterexample {
        m: u64,
        n: u64,
        #[serde(with = "crate::numeric::complex_fields")]
        pointwise_product: ComplexValue,
        #[serde(with = "crate::numeric::complex_fields")]
        value_at_product: ComplexValue,
    },
}

/// Check `values[m*n] = values[m]*values[n]` over every coprime pair with
/// m < n and m*n <= N (`values` is 1-indexed: `values[i]` is f(i), index 0
/// ignored). Tolerance is 1e-12 relative to 1 + |f(m)f(n)|. Returns the
/// first counterexample in lexicographic (m, n) order.
pub fn is_multiplicative_bruteforce(values: &[ComplexValue]) -> Result<MultiplicativityVerdict> {
    if values.len() < 2 {
        return Err(Error::Precondition(
            "is_multiplicative_bruteforce needs values for n = 1 .. N".into(),
        ));
    }
    if values[1] != ONE {
        return Err(Error::Precondition(format!(
            "values[1] = {} but multiplicativity requires f(1) = 1",
            values[1]
        )));
    }
    let n_max = values.len() as u64 - 1;
    // m = 1 always passes because f(1) = 1
    for m in 2..=n_max {
        if m * m > n_max {
            break;
        }
        for n in (m + 1)..=(n_max / m) {
            if crate::catalog::gcd(m, n) != 1 {
                continue;
            }
            let lhs = values[(m * n) as usize];
            let rhs = values[m as usize] * values[n as usize];
            if (lhs - rhs).norm() > 1e-12 * (1.0 + rhs.norm()) {
                return Ok(MultiplicativityVerdict::Counterexample {
                    m,
                    n,
                    pointwise_product: rhs,
                    value_at_product: lhs,
                });
            }
        }
    }
    Ok(MultiplicativityVerdict::Multiplicative)
}

// ---------------------------------------------------------------------------
// The prime-power distance D(f, g)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistanceReport {
    pub schema_version: u32,
    pub p_max: u64,
    pub k_max: u32,
    /// Truncated double sum over p <= p_max, 1 <= k <= k_max: a monotone
    /// lower bound for the distance (the k = 0 layer is identically zero
    /// because f(1) = g(1) = 1).
    pub lower_bound: f64,
    /// Certified upper bound on the omitted part, when both specs carry the
    /// needed certificates; the truncation plus this bound brackets the true
    /// distance.
    pub tail_note: Option<f64>,
}

/// Truncated distance sum_{p <= p_max} sum_{k=1}^{k_max} |g(p^k) - f(p^k)|.
pub fn distance(
    f: &MultiplicativeSpec,
    g: &MultiplicativeSpec,
    p_max: u64,
    k_max: u32,
) -> Result<DistanceReport> {
    if p_max < 2 || k_max < 1 {
        return Err(Error::Range(
            "distance needs p_max >= 2 and k_max >= 1".into(),
        ));
    }
    let table = SpfTable::build(p_max)?;
    let primes = table.primes();
    let tails = (f.tail(), g.tail());
    let per_prime: Vec<(f64, Option<f64>)> = parallel::map_indexed(primes.len(), |i| {
        let p = primes[i] as u64;
        let mut acc = Neumaier::default();
        for k in 1..=k_max {
            acc.add((g.prime_power_value(p, k) - f.prime_power_value(p, k)).norm());
        }
        // certified bound on the k > k_max layer at this prime
        let k_tail = match tails {
            (Some(tf), Some(tg))
                if k_max + 1 >= tf.min_exponent && k_max + 1 >= tg.min_exponent =>
            {
                Some(
                    f.prime_power_value(p, k_max + 1).norm() / (1.0 - tf.ratio)
                        + g.prime_power_value(p, k_max + 1).norm() / (1.0 - tg.ratio),
                )
            }
            _ => None,
        };
        (acc.value(), k_tail)
    });
    let mut lower = Neumaier::default();
    let mut k_tail_total = Some(Neumaier::default());
    for &(d, kt) in &per_prime {
        lower.add(d);
        match (k_tail_total.as_mut(), kt) {
            (Some(acc), Some(v)) => acc.add(v),
            _ => k_tail_total = None,
        }
    }
    let beyond = tail_beyond_pmax(f, g, p_max);
    let tail_note = match (k_tail_total, beyond) {
        (Some(kt), Some(b)) => Some(kt.value() + b),
        _ => None,
    };
    Ok(DistanceReport {
        schema_version: SCHEMA_VERSION,
        p_max,
        k_max,
        lower_bound: lower.value(),
        tail_note,
    })
}

/// Certified bound on sum_{p > P} sum_{k >= 1} |g - f|, from the declared
/// envelopes |f(p^k)| <= A p^(-sigma k). When both first-power forms agree
/// the k = 1 layer cancels identically and only k >= 2 remains, which
/// converges for sigma > 1/2; otherwise sigma > 1 is needed. Primes above
/// P >= 2 are odd, so sums over them are at most half the corresponding sums
/// over all integers >= P (each odd term is dominated by the mean of itself
/// and its even neighbor).
fn tail_beyond_pmax(f: &MultiplicativeSpec, g: &MultiplicativeSpec, p_max: u64) -> Option<f64> {
    let ef = f.envelope()?;
    let eg = g.envelope()?;
    let k1_cancels = match (f.first_power_form(), g.first_power_form()) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    };
    let p = p_max as f64;
    let bound_one = |coeff: f64, sigma: f64| -> Option<f64> {
        if k1_cancels {
            if sigma <= 0.5 {
                return None;
            }
            if sigma == 1.0 {
                // sum_{m >= P} 1/(m(m-1)) telescopes to 1/(P-1)
                return Some(coeff / (2.0 * (p - 1.0)));
            }
            let geom = 1.0 - p.powf(-sigma);
            let sum = p.powf(-2.0 * sigma) + p.powf(1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
            Some(coeff * sum / (2.0 * geom))
        } else {
            if sigma <= 1.0 {
                return None;
            }
            let geom = 1.0 - p.powf(-sigma);
            let sum = p.powf(-sigma) + p.powf(1.0 - sigma) / (sigma - 1.0);
            Some(coeff * sum / (2.0 * geom))
        }
    };
    Some(bound_one(ef.coeff, ef.sigma)? + bound_one(eg.coeff, eg.sigma)?)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricAxiomReport {
    pub schema_version: u32,
    pub d_ff: f64,
    pub d_fg: f64,
    pub d_gf: f64,
    pub d_fh: f64,
    pub d_gh: f64,
    pub identity_ok: bool,
    pub symmetry_ok: bool,
    pub triangle_ok: bool,
    pub ok: bool,
}

/// Metric axioms on truncations: D(f,f) = 0 exactly, D(f,g) = D(g,f)
/// exactly, and D(f,h) <= D(f,g) + D(g,h) within 1e-12 slack.
pub fn metric_axiom_check(
    f: &MultiplicativeSpec,
    g: &MultiplicativeSpec,
    h: &MultiplicativeSpec,
    p_max: u64,
    k_max: u32,
) -> Result<MetricAxiomReport> {
    let d_ff = distance(f, f, p_max, k_max)?.lower_bound;
    let d_fg = distance(f, g, p_max, k_max)?.lower_bound;
    let d_gf = distance(g, f, p_max, k_max)?.lower_bound;
    let d_fh = distance(f, h, p_max, k_max)?.lower_bound;
    let d_gh = distance(g, h, p_max, k_max)?.lower_bound;
    let identity_ok = d_ff == 0.0;
    let symmetry_ok = d_fg == d_gf;
    let triangle_ok = d_fh <= d_fg + d_gh + 1e-12;
    Ok(MetricAxiomReport {
        schema_version: SCHEMA_VERSION,
        d_ff,
        d_fg,
        d_gf,
        d_fh,
        d_gh,
        identity_ok,
        symmetry_ok,
        triangle_ok,
        ok: identity_ok && symmetry_ok && triangle_ok,
    })
}

// ---------------------------------------------------------------------------
// Perturbations and the closeness-transfer experiment
// ---------------------------------------------------------------------------

pub type Overrides = BTreeMap<(u64, u32), ComplexValue>;

#[derive(Clone, Debug)]
pub struct Perturbation {
    pub spec: MultiplicativeSpec,
    /// Exact distance to the base function: the finite sum of
    /// |override - original| over the overridden prime powers.
    pub distance_from_base: f64,
}

/// A multiplicative function agreeing with `f` except at finitely many
/// prime powers. Tail and envelope certificates are adjusted so the result
/// remains certifiable; the first-power form is dropped if any k = 1 value
/// changes.
pub fn perturb(f: &MultiplicativeSpec, overrides: &Overrides) -> Perturbation {
    if overrides.is_empty() {
        return Perturbation {
            spec: f.clone(),
            distance_from_base: 0.0,
        };
    }
    let mut d = Neumaier::default();
    let mut max_k = 0u32;
    let mut touches_k1 = false;
    for (&(p, k), &v) in overrides {
        d.add((v - f.prime_power_value(p, k)).norm());
        max_k = max_k.max(k);
        touches_k1 |= k == 1;
    }
    let tail = f.tail().map(|t| TailCertificate {
        ratio: t.ratio,
        min_exponent: t.min_exponent.max(max_k + 1),
    });
    let envelope = f.envelope().map(|e| {
        let mut coeff = e.coeff;
        for (&(p, k), &v) in overrides {
            let norm = v.norm();
            if norm > 0.0 {
                coeff = coeff.max(norm * (p as f64).powf(e.sigma * k as f64));
            }
        }
        crate::multiplicative::PrimeEnvelope {
            coeff,
            sigma: e.sigma,
        }
    });
    let first_power_form = if touches_k1 { None } else { f.first_power_form() };
    let base_rule = f.rule().clone();
    let ov = overrides.clone();
    let name = format!("{}+{}override(s)", f.name(), overrides.len());
    let spec = MultiplicativeSpec::from_parts(
        name,
        std::sync::Arc::new(move |p, k| match ov.get(&(p, k)) {
            Some(&v) => v,
            None => base_rule(p, k),
        }),
        false,
        tail,
        envelope,
        first_power_form,
    );
    Perturbation {
        spec,
        distance_from_base: d.value(),
    }
}

/// Grid for the heuristic screening of the uniform lower bound
/// |sum_k f(p^k) p^(-ks)| >= a over Re s >= 0: the bound quantifies over a
/// half-plane and cannot be verified exhaustively, so it is sampled on a
/// finite grid and reported as a heuristic certificate only.
#[derive(Clone, Debug, Serialize)]
pub struct TransferGridConfig {
    pub sigmas: Vec<f64>,
    pub t_max: f64,
    pub t_step: f64,
    pub grid_p_max: u64,
    pub condition_p_max: u64,
    pub target_tail: f64,
    /// Grid minima below this report a hypothesis violation.
    pub min_abs_threshold: f64,
}

impl Default for TransferGridConfig {
    fn default() -> Self {
        TransferGridConfig {
            sigmas: vec![0.0, 0.25, 0.5, 1.0],
            t_max: 50.0,
            t_step: 1.0,
            grid_p_max: 100,
            condition_p_max: 10_000,
            target_tail: 1e-10,
            min_abs_threshold: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisGridCheck {
    pub grid_points: u32,
    pub primes_checked: u32,
    pub min_abs: f64,
    pub min_at_prime: u64,
    pub min_at_s: (f64, f64),
    /// Always true: a finite grid cannot prove a half-plane bound.
    pub heuristic: bool,
}

fn hypothesis_grid_check(
    f: &MultiplicativeSpec,
    cfg: &TransferGridConfig,
) -> Result<HypothesisGridCheck> {
    let Some(tail) = f.tail() else {
        return Err(Error::UncertifiableTail(format!(
            "`{}` carries no tail certificate for the grid check",
            f.name()
        )));
    };
    let table = SpfTable::build(cfg.grid_p_max)?;
    let primes = table.primes();
    let mut svals: Vec<ComplexValue> = Vec::new();
    for &sigma in &cfg.sigmas {
        let steps = (cfg.t_max / cfg.t_step).floor() as i64;
        for i in -steps..=steps {
            svals.push(ComplexValue::new(sigma, i as f64 * cfg.t_step));
        }
    }
    let per_prime: Vec<Result<(f64, (f64, f64))>> = parallel::map_indexed(primes.len(), |i| {
        let p = primes[i] as u64;
        let mut best = f64::INFINITY;
        let mut best_s = (0.0, 0.0);
        for &s in &svals {
            let mut acc = CompensatedSum::new();
            acc.add(ONE);
            let mut k = 0u32;
            let mut next = f.prime_power_value(p, 1) * recip_pow_k(p, 1, s);
            loop {
                k += 1;
                acc.add(next);
                next = f.prime_power_value(p, k + 1) * recip_pow_k(p, k + 1, s);
                if k + 1 >= tail.min_exponent {
                    // p^(-Re s) <= 1 on the grid, so the plain ratio still bounds the tail
                    let bound = next.norm() / (1.0 - tail.ratio);
                    if bound <= cfg.target_tail {
                        break;
                    }
                }
                if k >= MAX_EULER_TERMS {
                    return Err(Error::Precision(format!(
                        "grid check: tail not certified at p = {p}, s = {s}"
                    )));
                }
            }
            let norm = acc.value().norm();
            if norm < best {
                best = norm;
                best_s = (s.re, s.im);
            }
        }
        Ok((best, best_s))
    });
    let mut min_abs = f64::INFINITY;
    let mut min_at_prime = 0u64;
    let mut min_at_s = (0.0, 0.0);
    for (i, r) in per_prime.into_iter().enumerate() {
        let (best, best_s) = r?;
        if best < min_abs {
            min_abs = best;
            min_at_prime = primes[i] as u64;
            min_at_s = best_s;
        }
    }
    Ok(HypothesisGridCheck {
        grid_points: svals.len() as u32,
        primes_checked: primes.len() as u32,
        min_abs,
        min_at_prime,
        min_at_s,
        heuristic: true,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum TransferVerdict {
    /// Perturbed partial sums decay to zero as the closeness-transfer
    /// theorem predicts.
    TransferObserved,
    HypothesisViolated(String),
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub schema_version: u32,
    pub function_name: String,
    pub perturbed_name: String,
    pub limit: u64,
    pub base_condition_i: ConditionIReport,
    pub base_condition_ii: ConditionIiReport,
    pub hypothesis_grid: HypothesisGridCheck,
    /// Exact distance between base and perturbed functions.
    pub distance_f_g: f64,
    pub perturbed_condition_ii: ConditionIiReport,
    pub perturbed_condition_i: ConditionIReport,
    #[serde(with = "crate::numeric::complex_fields")]
    pub s_f_at_limit: ComplexValue,
    #[serde(with = "crate::numeric::complex_fields")]
    pub s_g_at_limit: ComplexValue,
    pub verdict: TransferVerdict,
}

/// Perturb `f` at finitely many prime powers and test whether the perturbed
/// function still has vanishing partial sums, as closeness transfer
/// predicts. Hypothesis failures come back as a verdict, never an error.
pub fn transfer_experiment(
    f: &MultiplicativeSpec,
    overrides: &Overrides,
    limit: u64,
    cfg: &TransferGridConfig,
) -> Result<TransferReport> {
    let base_condition_i = check_condition_i(f, limit)?;
    let base_condition_ii = check_condition_ii(f, cfg.condition_p_max, cfg.target_tail)?;
    let hypothesis_grid = hypothesis_grid_check(f, cfg)?;
    let perturbation = perturb(f, overrides);
    let g = &perturbation.spec;
    let perturbed_condition_ii = check_condition_ii(g, cfg.condition_p_max, cfg.target_tail)?;
    let perturbed_condition_i = check_condition_i(g, limit)?;

    let mut violations: Vec<&str> = Vec::new();
    if base_condition_i.verdict != ConditionIVerdict::ConsistentWithZero {
        violations.push("base partial sums not consistent with zero");
    }
    if base_condition_ii.verdict != ConditionIiVerdict::HoldsUpToPmax {
        violations.push("base Euler factors not verified nonvanishing");
    }
    if hypothesis_grid.min_abs < cfg.min_abs_threshold {
        violations.push("no uniform lower bound observed on the s-grid");
    }
    if perturbed_condition_ii.verdict != ConditionIiVerdict::HoldsUpToPmax {
        violations.push("perturbed Euler factors not verified nonvanishing");
    }
    let verdict = if !violations.is_empty() {
        TransferVerdict::HypothesisViolated(violations.join("; "))
    } else if perturbed_condition_i.verdict == ConditionIVerdict::ConsistentWithZero {
        TransferVerdict::TransferObserved
    } else {
        TransferVerdict::Inconclusive
    };
    Ok(TransferReport {
        schema_version: SCHEMA_VERSION,
        function_name: f.name().to_string(),
        perturbed_name: g.name().to_string(),
        limit,
        s_f_at_limit: base_condition_i.s_at_limit,
        s_g_at_limit: perturbed_condition_i.s_at_limit,
        base_condition_i,
        base_condition_ii,
        hypothesis_grid,
        distance_f_g: perturbation.distance_from_base,
        perturbed_condition_ii,
        perturbed_condition_i,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Weighted decay scans
// ---------------------------------------------------------------------------

/// Weight w(x) multiplying |S(x)| in a scan. Windowed suprema of w(x)|S(x)|
/// staying bounded below is the numerical signature of S(x) not decaying
/// faster than 1/w(x); the report carries raw numbers only, the
/// interpretation is the caller's.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanWeight {
    /// x log x
    XLogX,
    /// x (log log x)^2
    XLogLogSq,
    /// x^c
    XPow(f64),
    /// x (log x)^eps
    XLogPow(f64),
    /// x (log log x)^eps
    XLogLogPow(f64),
}

impl ScanWeight {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            ScanWeight::XLogX => x * x.ln(),
            ScanWeight::XLogLogSq => {
                let ll = x.ln().ln();
                x * ll * ll
            }
            ScanWeight::XPow(c) => x.powf(*c),
            ScanWeight::XLogPow(eps) => x * x.ln().powf(*eps),
            ScanWeight::XLogLogPow(eps) => x * x.ln().ln().powf(*eps),
        }
    }
}

/// Smallest x a scan window may contain; keeps log log x positive.
pub const SCAN_X_MIN: u64 = 8;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanWindow {
    pub x_lo: u64,
    pub x_hi: u64,
    pub sup_weighted: f64,
    pub at_x: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub function_name: String,
    pub limit: u64,
    pub weight: ScanWeight,
    pub windows: Vec<ScanWindow>,
    pub global_inf_of_window_sups: f64,
}

impl ScanReport {
    /// CSV: `window_lo,window_hi,sup_weighted,at_x`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "window_lo,window_hi,sup_weighted,at_x")?;
        for win in &self.windows {
            writeln!(
                w,
                "{},{},{:.16e},{}",
                win.x_lo, win.x_hi, win.sup_weighted, win.at_x
            )?;
        }
        Ok(())
    }
}

/// Weighted decay evidence: over consecutive dyadic windows [2^j, 2^(j+1))
/// covering [8, limit], the supremum of w(x)|S(x)| at the checkpoints, plus
/// the running infimum of those window sups.
pub fn omega_scan(f: &MultiplicativeSpec, limit: u64, weight: ScanWeight) -> Result<ScanReport> {
    if limit < 10_000 {
        return Err(Error::Range(format!(
            "omega_scan needs limit >= 10000, got {limit}"
        )));
    }
    let series = partial_sums(f, limit)?;
    Ok(omega_scan_from_series(&series, weight))
}

/// Scan an existing partial-sum series.
pub fn omega_scan_from_series(series: &PartialSumSeries, weight: ScanWeight) -> ScanReport {
    let limit = series.limit();
    let mut windows = Vec::new();
    let mut lo = SCAN_X_MIN;
    while lo <= limit {
        let hi = (lo * 2 - 1).min(limit);
        let mut sup = f64::NEG_INFINITY;
        let mut at_x = lo;
        for &(x, s) in series.checkpoints() {
            if x < lo || x > hi {
                continue;
            }
            let v = weight.apply(x as f64) * s.norm();
            if v > sup {
                sup = v;
                at_x = x;
            }
        }
        if sup.is_finite() {
            windows.push(ScanWindow {
                x_lo: lo,
                x_hi: hi,
                sup_weighted: sup,
                at_x,
            });
        }
        lo = hi + 1;
    }
    let inf = windows
        .iter()
        .map(|w| w.sup_weighted)
        .fold(f64::INFINITY, f64::min);
    ScanReport {
        schema_version: SCHEMA_VERSION,
        function_name: series.function_name().to_string(),
        limit,
        weight,
        windows,
        global_inf_of_window_sups: inf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::numeric::ZERO;
    use std::f64::consts::{LN_2, TAU};

    #[test]
    fn euler_factor_mobius_is_finite_series() {
        let e = catalog::mobius_over_n();
        let r = euler_factor(e.spec(), 5, 1e-12).unwrap();
        assert_eq!(r.value.re, 0.8);
        assert_eq!(r.tail_bound, 0.0);
        assert_eq!(r.method, EulerFactorMethod::TruncatedGeometric);
    }

    #[test]
    fn euler_factor_eta_alpha2_at_two() {
        let e = catalog::eta_family(ComplexValue::new(2.0, 0.0)).unwrap();
        let trunc = euler_factor(e.spec(), 2, 1e-12).unwrap();
        let closed = euler_factor_closed(&e, 2).unwrap();
        assert!((closed.value.re - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(closed.tail_bound, 0.0);
        assert_eq!(closed.method, EulerFactorMethod::ClosedForm);
        assert!((trunc.value - closed.value).norm() <= trunc.tail_bound + 1e-13);
    }

    #[test]
    fn euler_factor_g4_alpha2_at_two_is_one() {
        let e = catalog::g_family(4, ComplexValue::new(2.0, 0.0)).unwrap();
        let closed = euler_factor_closed(&e, 2).unwrap();
        assert!((closed.value.re - 1.0).abs() < 1e-13, "{}", closed.value);
        assert!(closed.value.im.abs() < 1e-13);
        let trunc = euler_factor(e.spec(), 2, 1e-12).unwrap();
        assert!((trunc.value - closed.value).norm() <= trunc.tail_bound + 1e-12);
    }

    #[test]
    fn euler_factor_liouville_cm_form() {
        let e = catalog::liouville_over_n();
        let closed = euler_factor_closed(&e, 2).unwrap();
        assert!((closed.value.re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn euler_factor_needs_certificate() {
        let bare = MultiplicativeSpec::new("bare", |_, _| ONE);
        assert!(matches!(
            euler_factor(&bare, 2, 1e-10),
            Err(Error::UncertifiableTail(_))
        ));
    }

    #[test]
    fn condition_ii_mobius_holds() {
        let e = catalog::mobius_over_n();
        let r = check_condition_ii_entry(&e, 1000, 1e-12).unwrap();
        assert_eq!(r.verdict, ConditionIiVerdict::HoldsUpToPmax);
        assert_eq!(r.min_abs_factor, 0.5);
        assert_eq!(r.min_at_prime, 2);
        assert!(r.witness_prime.is_none());
        assert!(r.complete_via_closed_form);
    }

    #[test]
    fn condition_ii_eta_bad_alpha_fails_at_two() {
        // 2^alpha = 2 exactly up to rounding: the factor at p = 2 vanishes
        let alpha = ComplexValue::new(1.0, TAU / LN_2);
        let e = catalog::eta_family(alpha).unwrap();
        let r = check_condition_ii_entry(&e, 10, 1e-10).unwrap();
        assert_eq!(r.verdict, ConditionIiVerdict::FailsAtWitness);
        assert_eq!(r.witness_prime, Some(2));
    }

    #[test]
    fn condition_ii_explicit_zero_factor() {
        // f(2) = -1, everything else zero: factor at 2 is exactly 0
        let f = MultiplicativeSpec::new("unit-minus-two", |p, k| {
            if p == 2 && k == 1 {
                ComplexValue::new(-1.0, 0.0)
            } else {
                ZERO
            }
        })
        .with_tail(0.5, 1);
        let r = check_condition_ii(&f, 10, 1e-12).unwrap();
        assert_eq!(r.verdict, ConditionIiVerdict::FailsAtWitness);
        assert_eq!(r.witness_prime, Some(2));
        assert_eq!(r.min_abs_factor, 0.0);
    }

    #[test]
    fn condition_ii_mobius_raw_fails_everywhere() {
        let e = catalog::mobius_raw();
        let r = check_condition_ii_entry(&e, 100, 1e-12).unwrap();
        assert_eq!(r.verdict, ConditionIiVerdict::FailsAtWitness);
        assert_eq!(r.witness_prime, Some(2));
    }

    #[test]
    fn multiplicativity_bruteforce_examples() {
        let to_values = |k: u64, n: u64| -> Vec<ComplexValue> {
            let rule = catalog::raw_gk_rule(k);
            let mut v = vec![ZERO];
            v.extend((1..=n).map(rule));
            v
        };
        match is_multiplicative_bruteforce(&to_values(6, 100)).unwrap() {
            MultiplicativityVerdict::Counterexample { m, n, .. } => {
                assert_eq!((m, n), (2, 3));
            }
            _ => panic!("g_6 should fail"),
        }
        match is_multiplicative_bruteforce(&to_values(12, 100)).unwrap() {
            MultiplicativityVerdict::Counterexample { m, n, .. } => {
                assert_eq!((m, n), (3, 4));
            }
            _ => panic!("g_12 should fail"),
        }
        assert!(matches!(
            is_multiplicative_bruteforce(&to_values(8, 10_000)).unwrap(),
            MultiplicativityVerdict::Multiplicative
        ));

        let mut bad = to_values(8, 10);
        bad[1] = ComplexValue::new(2.0, 0.0);
        assert!(matches!(
            is_multiplicative_bruteforce(&bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn distance_identity_and_perturbation() {
        let f = catalog::mobius_over_n();
        let d = distance(f.spec(), f.spec(), 1000, 20).unwrap();
        assert_eq!(d.lower_bound, 0.0);

        let mut ov = Overrides::new();
        ov.insert((2, 1), ZERO);
        let g = perturb(f.spec(), &ov);
        assert_eq!(g.distance_from_base, 0.5);
        let d = distance(f.spec(), &g.spec, 1000, 20).unwrap();
        assert_eq!(d.lower_bound, 0.5);

        // Euler factor of the perturbed function at 2 becomes 1
        let r = euler_factor(&g.spec, 2, 1e-12).unwrap();
        assert_eq!(r.value.re, 1.0);
    }

    #[test]
    fn distance_mobius_liouville_small_oracle() {
        let f = catalog::mobius_over_n();
        let g = catalog::liouville_over_n();
        let d = distance(f.spec(), g.spec(), 1000, 60).unwrap();
        // oracle: sum over primes of 1/(p(p-1))
        let table = SpfTable::build(1000).unwrap();
        let mut oracle = Neumaier::default();
        for &p in table.primes() {
            let p = p as f64;
            oracle.add(1.0 / (p * (p - 1.0)));
        }
        assert!((d.lower_bound - oracle.value()).abs() < 1e-12);
        let tail = d.tail_note.expect("both sides carry certificates");
        assert!(tail <= 2.0 / 1000.0 + 1e-9, "tail {tail}");
    }

    #[test]
    fn distance_monotone_in_truncation() {
        let f = catalog::eta_family(ComplexValue::new(0.8, 1.0)).unwrap();
        let g = catalog::liouville_over_n();
        let mut prev = 0.0;
        for (p_max, k_max) in [(10u64, 2u32), (100, 4), (1000, 8), (1000, 30)] {
            let d = distance(f.spec(), g.spec(), p_max, k_max).unwrap();
            assert!(d.lower_bound >= prev - 1e-15);
            prev = d.lower_bound;
        }
    }

    #[test]
    fn metric_axioms_on_catalog_triple() {
        let f = catalog::mobius_over_n();
        let g = catalog::liouville_over_n();
        let h = catalog::eta_family(ComplexValue::new(1.0, 0.0)).unwrap();
        let r = metric_axiom_check(f.spec(), g.spec(), h.spec(), 500, 20).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn perturb_examples() {
        let f = catalog::mobius_over_n();
        let empty = perturb(f.spec(), &Overrides::new());
        assert_eq!(empty.distance_from_base, 0.0);
        for (p, k) in [(2u64, 1u32), (3, 2), (7, 1)] {
            let a = empty.spec.prime_power_value(p, k);
            let b = f.spec().prime_power_value(p, k);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
        }

        let mut ov = Overrides::new();
        ov.insert((3, 1), ComplexValue::new(-1.0, 0.0));
        let g = perturb(f.spec(), &ov);
        assert!((g.distance_from_base - 2.0 / 3.0).abs() < 1e-15);
        assert!(g.spec.first_power_form().is_none());
    }

    #[test]
    fn transfer_empty_overrides_is_bit_identical() {
        let f = catalog::mobius_over_n();
        let cfg = TransferGridConfig {
            grid_p_max: 20,
            condition_p_max: 100,
            t_max: 5.0,
            ..TransferGridConfig::default()
        };
        let base = check_condition_i(f.spec(), 2000).unwrap();
        let r = transfer_experiment(f.spec(), &Overrides::new(), 2000, &cfg).unwrap();
        assert_eq!(
            r.perturbed_condition_i.s_at_limit.re.to_bits(),
            base.s_at_limit.re.to_bits()
        );
        assert_eq!(
            r.perturbed_condition_i.s_at_limit.im.to_bits(),
            base.s_at_limit.im.to_bits()
        );
        assert_eq!(r.perturbed_condition_i.verdict, base.verdict);
        assert_eq!(r.distance_f_g, 0.0);
    }

    #[test]
    fn fit_decay_exponent_recovers_power_law() {
        let checkpoints: Vec<(u64, ComplexValue)> = crate::series::checkpoint_xs(100_000)
            .into_iter()
            .map(|x| (x, ComplexValue::new((x as f64).powf(-0.5), 0.0)))
            .collect();
        // checkpoint jitter inside each window leaves sub-percent noise
        let fit = fit_decay_exponent(&checkpoints, 100, 100_000).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.02, "{}", fit.exponent);
        assert!(fit.log_residual_rms < 0.05);
    }

    #[test]
    fn scan_windows_cover_range() {
        let e = catalog::mobius_over_n();
        let r = omega_scan(e.spec(), 10_000, ScanWeight::XPow(0.5)).unwrap();
        assert_eq!(r.windows.first().unwrap().x_lo, 8);
        assert_eq!(r.windows.last().unwrap().x_hi, 10_000);
        for pair in r.windows.windows(2) {
            assert_eq!(pair[0].x_hi + 1, pair[1].x_lo);
        }
        assert!(r.global_inf_of_window_sups > 0.0);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("window_lo,window_hi,sup_weighted,at_x\n"));
    }

    #[test]
    fn scan_needs_limit() {
        let e = catalog::mobius_over_n();
        assert!(matches!(
            omega_scan(e.spec(), 100, ScanWeight::XLogX),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn abs_convergence_trends() {
        // mu(n)/n: prime-power layer is sum 1/p, divergent
        let e = catalog::mobius_over_n();
        let r = absolute_convergence_diag(e.spec(), 10_000, 5, 10_000).unwrap();
        assert!(r.prime_power_trend.divergent_trend);
        assert!(r.n_trend.divergent_trend); // sum over squarefree n of 1/n

        // 1/n^2 (completely multiplicative comparison point): both converge
        let sq = MultiplicativeSpec::new("inv-square", |p, k| {
            ComplexValue::new((p as f64).powi(-2 * k as i32), 0.0)
        });
        let r = absolute_convergence_diag(&sq, 10_000, 5, 10_000).unwrap();
        assert!(!r.prime_power_trend.divergent_trend);
        assert!(!r.n_trend.divergent_trend);
    }

    #[test]
    fn condition_i_small_mobius_consistent() {
        let e = catalog::mobius_over_n();
        let r = check_condition_i(e.spec(), 20_000).unwrap();
        assert_eq!(r.verdict, ConditionIVerdict::ConsistentWithZero, "{r:?}");
        assert!(r.fitted_decay_exponent.unwrap() > 0.2);
    }

    #[test]
    fn condition_i_requires_limit() {
        let e = catalog::mobius_over_n();
        assert!(matches!(
            check_condition_i(e.spec(), 100),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn scaling_linearity() {
        // scaling every rule value by c scales sums and distances linearly
        let c = ComplexValue::new(-2.5, 1.5);
        let base = catalog::mobius_over_n();
        let base_spec = base.spec().clone();
        let scaled = MultiplicativeSpec::new("scaled", move |p, k| {
            base_spec.prime_power_value(p, k) * c
        });

        let other = catalog::liouville_over_n();
        let other_spec = other.spec().clone();
        let scaled_other = MultiplicativeSpec::new("scaled-other", move |p, k| {
            other_spec.prime_power_value(p, k) * c
        });

        let d = distance(base.spec(), other.spec(), 500, 10).unwrap();
        let d_scaled = distance(&scaled, &scaled_other, 500, 10).unwrap();
        assert!((d_scaled.lower_bound - c.norm() * d.lower_bound).abs() <= 1e-12);

        // Euler factors: the k >= 1 layer scales by c (the k = 0 term is 1)
        let ef = euler_factor(base.spec(), 3, 1e-13).unwrap();
        let scaled_with_tail = {
            let base_spec = base.spec().clone();
            MultiplicativeSpec::new("scaled-tailed", move |p, k| {
                base_spec.prime_power_value(p, k) * c
            })
            .with_tail(0.5, 1)
        };
        let ef_scaled = euler_factor(&scaled_with_tail, 3, 1e-13).unwrap();
        assert!(((ef_scaled.value - ONE) - (ef.value - ONE) * c).norm() <= 1e-12);
    }

    #[test]
    fn report_json_schema() {
        let e = catalog::mobius_over_n();
        let r = euler_factor(e.spec(), 5, 1e-12).unwrap();
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["p"], 5);
        assert_eq!(json["method"], "truncated_geometric");
        assert!((json["value"]["re"].as_f64().unwrap() - 0.8).abs() < 1e-15);

        let ii = check_condition_ii_entry(&e, 50, 1e-10).unwrap();
        let json = serde_json::to_value(&ii).unwrap();
        assert_eq!(json["verdict"], "holds_up_to_pmax");
        assert_eq!(json["witness_prime"], serde_json::Value::Null);
    }
}
