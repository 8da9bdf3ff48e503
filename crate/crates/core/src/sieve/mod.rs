//! Smallest-prime-factor and divisor-count tables.

mod cache;

pub use cache::{load_or_build, CacheOutcome, CACHE_VERSION};

use crate::error::{Error, Result};

/// Largest limit accepted by [`SieveTables::build`]. Roughly 6 bytes per
/// entry at build time, so about 400 MiB at this limit.
pub const DEFAULT_MAX_LIMIT: u32 = 1 << 26;

/// Immutable sieve output for the labels `0..=limit`.
#[derive(Clone, PartialEq, Eq)]
pub struct SieveTables {
    limit: u32,
    spf: Vec<u32>,
    divisor_count: Vec<u16>,
}

impl std::fmt::Debug for SieveTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SieveTables").field("limit", &self.limit).finish_non_exhaustive()
    }
}

impl SieveTables {
    pub fn build(limit: u32) -> Result<Self> {
        Self::build_with_max(limit, DEFAULT_MAX_LIMIT)
    }

    /// Linear sieve carrying the exponent of the smallest prime so that
    /// `d(i·p)` is derived from `d(i)` in O(1).
    pub fn build_with_max(limit: u32, max_limit: u32) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidParameter("sieve limit must be at least 1".into()));
        }
        if limit > max_limit {
            return Err(Error::Capacity {
                what: "sieve limit",
                requested: limit as u64,
                limit: max_limit as u64,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut divisor_count = vec![0u16; n + 1];
        let mut spf_exp = vec![0u8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        spf[1] = 1;
        divisor_count[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                divisor_count[i] = 2;
                spf_exp[i] = 1;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > n {
                    break;
                }
                spf[ip] = p;
                if p == si {
                    let e = spf_exp[i] as u16;
                    spf_exp[ip] = spf_exp[i] + 1;
                    divisor_count[ip] = divisor_count[i] / (e + 1) * (e + 2);
                } else {
                    spf_exp[ip] = 1;
                    divisor_count[ip] = divisor_count[i] * 2;
                }
            }
        }
        Ok(Self { limit, spf, divisor_count })
    }

    pub(crate) fn from_parts(limit: u32, spf: Vec<u32>, divisor_count: Vec<u16>) -> Self {
        Self { limit, spf, divisor_count }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    /// Smallest prime factor; `spf(1) == 1`.
    #[inline]
    pub fn spf(&self, i: u32) -> u32 {
        self.spf[i as usize]
    }

    /// Number of divisors `d(i)`.
    #[inline]
    pub fn divisor_count(&self, i: u32) -> u32 {
        self.divisor_count[i as usize] as u32
    }

    pub fn spf_table(&self) -> &[u32] {
        &self.spf
    }

    pub fn divisor_count_table(&self) -> &[u16] {
        &self.divisor_count
    }

    #[inline]
    pub fn is_prime(&self, i: u32) -> bool {
        i >= 2 && self.spf[i as usize] == i
    }

    fn check(&self, n: u32) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange { label: n as u64, size: self.limit as u64 });
        }
        Ok(())
    }

    pub fn factorize(&self, n: u32) -> Result<Factorization> {
        self.check(n)?;
        let mut prime_powers = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize];
            let mut j = 0;
            while m.is_multiple_of(p) {
                m /= p;
                j += 1;
            }
            prime_powers.push((p, j));
        }
        Ok(Factorization { n, prime_powers })
    }

    /// All divisors of `n` in ascending order.
    pub fn divisors(&self, n: u32) -> Result<Vec<u32>> {
        Ok(self.factorize(n)?.divisors())
    }
}

/// Prime-power decomposition `n = ∏ p^j` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u32,
    pub prime_powers: Vec<(u32, u32)>,
}

impl Factorization {
    /// `s(n) = ∏ (j + 1)`, the number of divisors.
    pub fn divisor_count(&self) -> u64 {
        self.prime_powers.iter().map(|&(_, j)| j as u64 + 1).product()
    }

    pub fn is_prime_power(&self) -> bool {
        self.prime_powers.len() == 1
    }

    /// Sorted exponent multiset; upper-half clustering depends only on this.
    pub fn shape(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.prime_powers.iter().map(|&(_, j)| j).collect();
        s.sort_unstable();
        s
    }

    pub fn product(&self) -> u64 {
        self.prime_powers.iter().map(|&(p, j)| (p as u64).pow(j)).product()
    }

    pub fn divisors(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.divisor_count() as usize);
        out.push(1u32);
        for &(p, j) in &self.prime_powers {
            let len = out.len();
            let mut pk = 1u32;
            for _ in 0..j {
                pk *= p;
                for idx in 0..len {
                    out.push(out[idx] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
