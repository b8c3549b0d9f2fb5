//! Smallest-prime-factor sieve and integer factorization.

use crate::error::{Error, Result};

/// Hard ceiling on sieve size: entries are u32, so any n <= limit must fit,
/// and the table costs 4 bytes per integer (plus the prime list). A limit of
/// 1e8 needs roughly 400 MB + 25 MB and is the practical target; anything
/// beyond `u32::MAX` is refused outright.
pub const MAX_SIEVE_LIMIT: u64 = u32::MAX as u64;

/// Smallest-prime-factor table for 1..=limit.
///
/// `spf[n]` is the smallest prime factor of n for n >= 2; `spf[1] = 1` is a
/// sentinel so the hot factorization path needs no option type.
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfTable {
    /// Linear (Euler) sieve: each composite is struck exactly once by its
    /// smallest prime factor, so construction is O(limit).
    pub fn build(limit: u64) -> Result<SpfTable> {
        if limit == 0 {
            return Err(Error::Size("sieve limit must be at least 1".into()));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::Size(format!(
                "sieve limit {limit} exceeds the supported bound {MAX_SIEVE_LIMIT}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        spf[0] = 0;
        if n >= 1 {
            spf[1] = 1;
        }
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let spf_i = spf[i];
            for &p in &primes {
                if p > spf_i {
                    break;
                }
                let m = (p as u64) * (i as u64);
                if m > limit {
                    break;
                }
                spf[m as usize] = p;
                if p == spf_i {
                    break;
                }
            }
        }
        Ok(SpfTable { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of n (n >= 2); 1 for the sentinel n = 1.
    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        debug_assert!(n >= 1 && n <= self.limit);
        self.spf[n as usize] as u64
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes <= limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Factor n into prime powers in O(log n) table lookups.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 || n > self.limit {
            return Err(Error::Range(format!(
                "factorize: n = {n} outside 1..={}",
                self.limit
            )));
        }
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut k = 0u32;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        Ok(Factorization { n, factors })
    }
}

/// Prime-power decomposition of an integer, primes strictly increasing.
/// Empty exactly for n = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Multiply the decomposition back out; equals n by construction.
    pub fn reassemble(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, k)| p.pow(k))
            .product::<u64>()
    }
}
