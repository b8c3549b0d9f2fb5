//! Segment-by-segment generation of multiplicative function values, so
//! partial sums over ranges like 1..=1e7 never hold more than a few segments
//! in memory. Segments are aligned to absolute positions and each one is
//! computed from segment-local data only, so the value stream for a prefix
//! does not depend on the overall limit.

use crate::error::Result;
use crate::multiplicative::MultiplicativeSpec;
use crate::numeric::{isqrt, ComplexValue, ONE};
use crate::parallel;

pub(crate) const SEGMENT_LEN: u64 = 1 << 18;

/// How many segments are materialized at once; the group is computed in
/// parallel (under the `parallel` feature) and then consumed in order.
const GROUP: usize = 8;

pub(crate) struct SegmentedValues<'a> {
    f: &'a MultiplicativeSpec,
    limit: u64,
    seg_len: u64,
    /// Primes up to sqrt(limit).
    primes: Vec<u32>,
    /// powers[i][k-1] = f(p_i^k) for every p_i^k <= limit.
    powers: Vec<Vec<ComplexValue>>,
}

impl<'a> SegmentedValues<'a> {
    pub fn new(f: &'a MultiplicativeSpec, limit: u64) -> Self {
        Self::with_segment_len(f, limit, SEGMENT_LEN)
    }

    pub fn with_segment_len(f: &'a MultiplicativeSpec, limit: u64, seg_len: u64) -> Self {
        debug_assert!(limit >= 1 && seg_len >= 1);
        let root = isqrt(limit);
        let primes = simple_primes(root);
        let powers = primes
            .iter()
            .map(|&p| {
                let p = p as u64;
                let mut vals = Vec::new();
                let mut pk = p;
                let mut k = 1u32;
                loop {
                    vals.push(f.prime_power_value(p, k));
                    match pk.checked_mul(p) {
                        Some(next) if next <= limit => {
                            pk = next;
                            k += 1;
                        }
                        _ => break,
                    }
                }
                vals
            })
            .collect();
        SegmentedValues {
            f,
            limit,
            seg_len,
            primes,
            powers,
        }
    }

    pub fn segment_count(&self) -> usize {
        self.limit.div_ceil(self.seg_len) as usize
    }

    /// Inclusive range [lo, hi] of segment `idx`.
    pub fn segment_range(&self, idx: usize) -> (u64, u64) {
        let lo = idx as u64 * self.seg_len + 1;
        let hi = (lo + self.seg_len - 1).min(self.limit);
        (lo, hi)
    }

    /// Values f(n) for n in segment `idx`, by progressive division: strike
    /// out the full p^k part for every prime p with p^2 <= hi, then whatever
    /// remains is 1 or a single large prime. Division order is ascending in
    /// p for every n, so the result is deterministic.
    pub fn compute_segment(&self, idx: usize) -> Vec<ComplexValue> {
        let (lo, hi) = self.segment_range(idx);
        let len = (hi - lo + 1) as usize;
        let mut res = vec![ONE; len];
        let mut rem: Vec<u64> = (lo..=hi).collect();

        for (pi, &p) in self.primes.iter().enumerate() {
            let p = p as u64;
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = (m - lo) as usize;
                let mut k = 0u32;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                    k += 1;
                }
                // k >= 1 unless an earlier multiple already cleared p, which
                // cannot happen: each multiple is visited once per prime
                res[i] *= self.powers[pi][(k - 1) as usize];
                m += p;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                // leftover is a prime > sqrt(hi)
                res[i] *= self.f.prime_power_value(rem[i], 1);
            }
        }
        res
    }
}

/// Drive `sink(n, f(n))` for n = 1..=limit in order. Segment values are
/// computed in groups (in parallel when enabled); the sink always runs
/// sequentially in ascending n, so accumulation order is fixed.
pub(crate) fn stream_values<F>(
    f: &MultiplicativeSpec,
    limit: u64,
    mut sink: F,
) -> Result<()>
where
    F: FnMut(u64, ComplexValue) -> Result<()>,
{
    let stream = SegmentedValues::new(f, limit);
    let nseg = stream.segment_count();
    let mut next = 0usize;
    while next < nseg {
        let count = GROUP.min(nseg - next);
        let base = next;
        let segs = parallel::map_indexed(count, |j| stream.compute_segment(base + j));
        for (j, seg) in segs.into_iter().enumerate() {
            let (lo, _) = stream.segment_range(base + j);
            for (off, v) in seg.into_iter().enumerate() {
                sink(lo + off as u64, v)?;
            }
        }
        next += count;
    }
    Ok(())
}

fn simple_primes(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut m = p * p;
            while m <= n {
                sieve[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
}
