//! Compensated summation, checkpointed partial sums S(x) = sum_{n<=x} f(n),
//! counting functions A(x), Abel-summed weighted series, and the closed-form
//! reference values of the alternating and g_k series.
//!
//! Everything here is conditionally convergent territory: terms are summed
//! in ascending n exactly, never reordered. Parallelism only ever produces
//! the values; accumulation is a single compensated left-to-right pass.

use std::io::Write;

use crate::error::{Error, Result};
use crate::multiplicative::MultiplicativeSpec;
use crate::numeric::{ensure_finite, is_finite, recip_pow, ComplexValue, Neumaier, ONE};
use crate::stream;

/// Compensated complex accumulator: Neumaier summation applied independently
/// to the real and imaginary parts.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: Neumaier,
    im: Neumaier,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: ComplexValue) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> ComplexValue {
        ComplexValue::new(self.re.value(), self.im.value())
    }
}

/// Sum of a finite term sequence with error O(1) ulp of the result (plus the
/// unavoidable conditioning of the sum), instead of the O(n) ulp of naive
/// accumulation.
pub fn compensated_sum<I>(terms: I) -> Result<ComplexValue>
where
    I: IntoIterator<Item = ComplexValue>,
{
    let mut acc = CompensatedSum::new();
    for t in terms {
        if !is_finite(t) {
            return Err(Error::Overflow(
                "compensated_sum: non-finite term".into(),
            ));
        }
        acc.add(t);
    }
    ensure_finite(acc.value(), "compensated_sum")
}

/// Checkpoint abscissas for a run to `limit`: a geometric ladder of ratio
/// 1.05 starting at 1, every power of 10, and limit itself.
pub fn checkpoint_xs(limit: u64) -> Vec<u64> {
    let mut xs: Vec<u64> = Vec::new();
    let mut x = 1u64;
    while x < limit {
        xs.push(x);
        let geo = ((x as f64) * 1.05).ceil() as u64;
        x = geo.max(x + 1);
    }
    xs.push(limit);
    let mut pow = 1u64;
    while pow <= limit / 10 {
        pow *= 10;
        xs.push(pow);
    }
    xs.sort_unstable();
    xs.dedup();
    xs
}

pub const CHECKPOINT_POLICY: &str = "geometric(1.05)+powers-of-10+limit";

/// Checkpointed running sums S(x) = sum_{n<=x} f(n), accumulated with
/// compensated summation in ascending n.
#[derive(Clone, Debug)]
pub struct PartialSumSeries {
    function_name: String,
    limit: u64,
    checkpoint_policy: String,
    checkpoints: Vec<(u64, ComplexValue)>,
}

impl PartialSumSeries {
    pub fn function_name(&self) -> &str {
        &self.function_name
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn checkpoint_policy(&self) -> &str {
        &self.checkpoint_policy
    }

    /// (x, S(x)) pairs, strictly increasing in x, final entry at x = limit.
    pub fn checkpoints(&self) -> &[(u64, ComplexValue)] {
        &self.checkpoints
    }

    /// S(limit).
    pub fn final_sum(&self) -> ComplexValue {
        self.checkpoints
            .last()
            .map(|&(_, s)| s)
            .unwrap_or(ComplexValue::new(0.0, 0.0))
    }

    /// S(x) if x is a checkpoint.
    pub fn sum_at(&self, x: u64) -> Option<ComplexValue> {
        self.checkpoints
            .binary_search_by_key(&x, |&(cx, _)| cx)
            .ok()
            .map(|i| self.checkpoints[i].1)
    }

    /// Largest checkpoint <= x and its sum.
    pub fn sum_at_or_before(&self, x: u64) -> Option<(u64, ComplexValue)> {
        match self.checkpoints.binary_search_by_key(&x, |&(cx, _)| cx) {
            Ok(i) => Some(self.checkpoints[i]),
            Err(0) => None,
            Err(i) => Some(self.checkpoints[i - 1]),
        }
    }

    /// Checkpoint dump: header `x,re,im`, one row per checkpoint, 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re,im")?;
        for &(x, s) in &self.checkpoints {
            writeln!(w, "{x},{:.16e},{:.16e}", s.re, s.im)?;
        }
        Ok(())
    }
}

/// Streaming checkpointed partial sums of a multiplicative function.
/// Values are generated segment by segment (segments in parallel under the
/// `parallel` feature); accumulation is sequential compensated summation, so
/// the result is identical for any thread count.
pub fn partial_sums(f: &MultiplicativeSpec, limit: u64) -> Result<PartialSumSeries> {
    if limit == 0 {
        return Err(Error::Size("partial_sums limit must be at least 1".into()));
    }
    let xs = checkpoint_xs(limit);
    let mut checkpoints = Vec::with_capacity(xs.len());
    let mut next = 0usize;
    let mut acc = CompensatedSum::new();
    stream::stream_values(f, limit, |n, v| {
        if !is_finite(v) {
            return Err(Error::Overflow(format!(
                "partial_sums({}): non-finite value at n = {n}",
                f.name()
            )));
        }
        acc.add(v);
        if next < xs.len() && n == xs[next] {
            checkpoints.push((n, acc.value()));
            next += 1;
        }
        Ok(())
    })?;
    debug_assert_eq!(next, xs.len());
    Ok(PartialSumSeries {
        function_name: f.name().to_string(),
        limit,
        checkpoint_policy: CHECKPOINT_POLICY.to_string(),
        checkpoints,
    })
}

/// A(x) = sum_{n<=x} a(n) for an integer-indexed sequence a: piecewise
/// constant, A(0) = 0.
///
/// Periodic sequences are represented by one period and evaluated in O(1);
/// arbitrary rules are tabulated up to a limit.
#[derive(Clone, Debug)]
pub struct StepFunctionA {
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Periodic {
        /// prefix[r] = a(1) + .. + a(r) within one period; prefix[0] = 0.
        prefix: Vec<ComplexValue>,
        full_sum: ComplexValue,
        period: u64,
    },
    Tabulated {
        /// prefix[x] = A(x), prefix[0] = 0.
        prefix: Vec<ComplexValue>,
    },
}

impl StepFunctionA {
    /// Sequence with a(n) = one_period[(n-1) mod len].
    pub fn periodic(one_period: Vec<ComplexValue>) -> Result<StepFunctionA> {
        if one_period.is_empty() {
            return Err(Error::Validation("periodic sequence needs a nonempty period".into()));
        }
        let period = one_period.len() as u64;
        let mut prefix = Vec::with_capacity(one_period.len() + 1);
        prefix.push(ComplexValue::new(0.0, 0.0));
        let mut acc = CompensatedSum::new();
        for &v in &one_period {
            acc.add(v);
            prefix.push(acc.value());
        }
        let full_sum = acc.value();
        Ok(StepFunctionA {
            repr: Repr::Periodic {
                prefix,
                full_sum,
                period,
            },
        })
    }

    /// Tabulate A(x) for x <= limit from an arbitrary rule.
    pub fn tabulate(rule: impl Fn(u64) -> ComplexValue, limit: u64) -> StepFunctionA {
        let mut prefix = Vec::with_capacity(limit as usize + 1);
        prefix.push(ComplexValue::new(0.0, 0.0));
        let mut acc = CompensatedSum::new();
        for n in 1..=limit {
            acc.add(rule(n));
            prefix.push(acc.value());
        }
        StepFunctionA {
            repr: Repr::Tabulated { prefix },
        }
    }

    /// A(x). Periodic representations accept any x; tabulated ones are
    /// range-checked.
    pub fn value(&self, x: u64) -> Result<ComplexValue> {
        match &self.repr {
            Repr::Periodic {
                prefix,
                full_sum,
                period,
            } => {
                let q = (x / period) as f64;
                let r = (x % period) as usize;
                Ok(full_sum * q + prefix[r])
            }
            Repr::Tabulated { prefix } => prefix
                .get(x as usize)
                .copied()
                .ok_or_else(|| Error::Range(format!("A(x): x = {x} beyond tabulated limit"))),
        }
    }
}

/// Counting sums A(x) = sum_{n<=x} a(n) of a raw integer-indexed rule.
pub fn raw_counting_sums(rule: impl Fn(u64) -> ComplexValue, limit: u64) -> StepFunctionA {
    StepFunctionA::tabulate(rule, limit)
}

/// Abel-summed weighted series sum_{n<=x} a(n) n^(-alpha), evaluated purely
/// from the counting function:
/// sum_{n=1}^{x-1} A(n) (n^(-alpha) - (n+1)^(-alpha)) + A(x) x^(-alpha).
/// This is the step-function integral of the usual boundary + integral
/// identity, evaluated in closed form on each unit interval.
pub fn abel_weighted_sum(
    a: &StepFunctionA,
    alpha: ComplexValue,
    x: u64,
) -> Result<ComplexValue> {
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "abel_weighted_sum needs Re(alpha) > 0, got {}",
            alpha.re
        )));
    }
    if x == 0 {
        return Err(Error::Range("abel_weighted_sum needs x >= 1".into()));
    }
    let mut acc = CompensatedSum::new();
    let mut cur = ONE; // 1^(-alpha)
    for n in 1..x {
        let next = recip_pow((n + 1) as f64, alpha);
        acc.add(a.value(n)? * (cur - next));
        cur = next;
    }
    acc.add(a.value(x)? * cur);
    ensure_finite(acc.value(), "abel_weighted_sum")
}

/// (1 - 2^(1-alpha)) zeta(alpha): the value of the alternating series
/// sum (-1)^(n-1) n^(-alpha) for Re(alpha) > 0, alpha != 1.
pub fn closed_form_eta_series<Z>(alpha: ComplexValue, zeta_eval: Z) -> Result<ComplexValue>
where
    Z: Fn(ComplexValue) -> Result<ComplexValue>,
{
    closed_form_gk_series(2, alpha, zeta_eval)
}

/// (1 - k^(1-alpha)) zeta(alpha): the value of sum g_k(n) n^(-alpha) for
/// Re(alpha) > 0, alpha != 1; k = 2 is the alternating series.
pub fn closed_form_gk_series<Z>(k: u64, alpha: ComplexValue, zeta_eval: Z) -> Result<ComplexValue>
where
    Z: Fn(ComplexValue) -> Result<ComplexValue>,
{
    if k < 2 {
        return Err(Error::Construction(format!(
            "closed_form_gk_series needs k >= 2, got {k}"
        )));
    }
    if alpha.re <= 0.0 {
        return Err(Error::Domain(format!(
            "closed form needs Re(alpha) > 0, got {}",
            alpha.re
        )));
    }
    if alpha == ONE {
        // the product form degenerates to 0 * infinity at alpha = 1; the
        // series value there is not zero and not covered by this formula
        return Err(Error::Pole("closed form undefined at alpha = 1".into()));
    }
    let z = zeta_eval(alpha)?;
    // k^(1-alpha) = k^-(alpha - 1)
    let factor = ONE - recip_pow(k as f64, alpha - ONE);
    ensure_finite(factor * z, "closed_form_gk_series")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ZERO;
    use std::f64::consts::PI;

    fn mobius_over_n() -> MultiplicativeSpec {
        MultiplicativeSpec::new("mobius-over-n", |p, k| {
            if k == 1 {
                ComplexValue::new(-1.0 / p as f64, 0.0)
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn compensated_sum_examples() {
        // 1 followed by 10^4 copies of 1e-16
        let mut terms = vec![ComplexValue::new(1.0, 0.0)];
        terms.extend(std::iter::repeat_n(ComplexValue::new(1e-16, 0.0), 10_000));
        let s = compensated_sum(terms).unwrap();
        let expect = 1.0 + 1e-12;
        assert!((s.re - expect).abs() <= 1e-15 * expect);

        assert_eq!(compensated_sum(Vec::new()).unwrap(), ZERO);

        let s = compensated_sum(vec![
            ComplexValue::new(1.0, 2.0),
            ComplexValue::new(-1.0, -2.0),
        ])
        .unwrap();
        assert_eq!(s, ZERO);

        assert!(matches!(
            compensated_sum(vec![ComplexValue::new(f64::NAN, 0.0)]),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn checkpoints_cover_policy() {
        let xs = checkpoint_xs(1000);
        assert_eq!(*xs.first().unwrap(), 1);
        assert_eq!(*xs.last().unwrap(), 1000);
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
        for p in [1u64, 10, 100, 1000] {
            assert!(xs.binary_search(&p).is_ok(), "power of ten {p} missing");
        }
        // geometric gaps never exceed the 1.05 ratio by much
        for w in xs.windows(2) {
            assert!(w[1] as f64 <= (w[0] as f64 * 1.05).ceil());
        }
    }

    #[test]
    fn partial_sums_small_mobius() {
        let s = partial_sums(&mobius_over_n(), 3).unwrap();
        let last = s.final_sum();
        assert!((last.re - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(s.limit(), 3);
        assert_eq!(s.checkpoints().last().unwrap().0, 3);
    }

    #[test]
    fn partial_sums_prefix_consistency() {
        // streamed S(x) at a checkpoint == full reaccumulation up to x
        let f = mobius_over_n();
        let s = partial_sums(&f, 20_000).unwrap();
        for &x in &[128u64, 1_000, 9_999, 20_000] {
            let sub = partial_sums(&f, x).unwrap();
            let a = s.sum_at(x).or_else(|| sub.sum_at(x));
            // x may not be a checkpoint of the big run; only compare when it is
            if let Some(a) = s.sum_at(x) {
                let b = sub.final_sum();
                assert_eq!(a.re.to_bits(), b.re.to_bits(), "x={x}");
                assert_eq!(a.im.to_bits(), b.im.to_bits(), "x={x}");
            } else {
                let _ = a;
            }
        }
    }

    #[test]
    fn step_function_examples() {
        // alternating +-1
        let alt = StepFunctionA::periodic(vec![
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(-1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(alt.value(5).unwrap().re, 1.0);
        assert_eq!(alt.value(0).unwrap().re, 0.0);

        // raw g_4: 1,1,1,-3 repeating
        let g4 = StepFunctionA::periodic(vec![
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(-3.0, 0.0),
        ])
        .unwrap();
        assert_eq!(g4.value(7).unwrap().re, 3.0);
        assert_eq!(g4.value(8).unwrap().re, 0.0);

        // tabulated matches periodic
        let g4t = raw_counting_sums(
            |n| {
                if n % 4 == 0 {
                    ComplexValue::new(-3.0, 0.0)
                } else {
                    ComplexValue::new(1.0, 0.0)
                }
            },
            100,
        );
        for x in 0..=100u64 {
            assert_eq!(g4t.value(x).unwrap().re, g4.value(x).unwrap().re);
        }
        assert!(matches!(g4t.value(101), Err(Error::Range(_))));
    }

    #[test]
    fn abel_three_term_identity() {
        let alt = StepFunctionA::periodic(vec![
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(-1.0, 0.0),
        ])
        .unwrap();
        let s = abel_weighted_sum(&alt, ComplexValue::new(1.0, 0.0), 3).unwrap();
        assert!((s.re - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn abel_matches_direct_sum() {
        let alt = StepFunctionA::periodic(vec![
            ComplexValue::new(1.0, 0.0),
            ComplexValue::new(-1.0, 0.0),
        ])
        .unwrap();
        let alpha = ComplexValue::new(2.0, 0.0);
        let x = 10_000u64;
        let abel = abel_weighted_sum(&alt, alpha, x).unwrap();
        let direct = compensated_sum((1..=x).map(|n| {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            recip_pow(n as f64, alpha) * sign
        }))
        .unwrap();
        assert!((abel - direct).norm() < 1e-12);
    }

    #[test]
    fn abel_domain_error() {
        let alt = StepFunctionA::periodic(vec![ComplexValue::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            abel_weighted_sum(&alt, ComplexValue::new(0.0, 1.0), 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn closed_forms() {
        let zeta2 = |_: ComplexValue| Ok(ComplexValue::new(PI * PI / 6.0, 0.0));
        let v = closed_form_eta_series(ComplexValue::new(2.0, 0.0), zeta2).unwrap();
        assert!((v.re - PI * PI / 12.0).abs() < 1e-15);

        let v9 = closed_form_gk_series(9, ComplexValue::new(2.0, 0.0), zeta2).unwrap();
        assert!((v9.re - (8.0 / 9.0) * PI * PI / 6.0).abs() < 1e-15);

        assert!(matches!(
            closed_form_eta_series(ComplexValue::new(1.0, 0.0), zeta2),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            closed_form_gk_series(1, ComplexValue::new(2.0, 0.0), zeta2),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn csv_dump_format() {
        let s = partial_sums(&mobius_over_n(), 3).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,re,im");
        let row1 = lines.next().unwrap();
        assert!(row1.starts_with("1,1.0000000000000000e0,"));
    }
}
