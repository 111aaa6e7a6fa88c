//! Sieves and elementary multiplicative functions.
//!
//! Everything here is deterministic and immutable after construction, so the
//! tables can be shared freely across threads. Range sieves work segment by
//! segment (default segment: [`DEFAULT_SEGMENT_LEN`] integers) so limits up to
//! 10^8 stay cache-friendly and within a modest memory budget.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::tuple::TupleConfig;

/// Default number of integers per sieve segment (2^22).
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 22;

/// Default memory budget for table and sieve allocations: 1 GiB.
pub const DEFAULT_MEMORY_BUDGET: u128 = 1 << 30;

static SEGMENT_LEN: AtomicUsize = AtomicUsize::new(DEFAULT_SEGMENT_LEN);

/// Process-wide segment length used when no explicit one is given.
/// The CLI sets this once at startup from `LIMITP_SEGMENT_SIZE`.
pub fn set_default_segment_len(len: usize) {
    SEGMENT_LEN.store(len.max(64), Ordering::Relaxed);
}

pub fn default_segment_len() -> usize {
    SEGMENT_LEN.load(Ordering::Relaxed)
}

fn require_budget(limit: u64, required: u128) -> Result<()> {
    if required > DEFAULT_MEMORY_BUDGET {
        return Err(Error::Capacity {
            limit,
            required,
            budget: DEFAULT_MEMORY_BUDGET,
        });
    }
    Ok(())
}

pub(crate) fn checked_pow_u128(base: u64, exp: u32, what: &'static str) -> Result<u128> {
    (base as u128).checked_pow(exp).ok_or(Error::Overflow {
        what,
        prime: Some(base),
    })
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ---------------------------------------------------------------------------
// Bit array
// ---------------------------------------------------------------------------

/// Plain bit array over the integers `1..=len`. Index 0 is allocated but
/// unused and always zero, so callers index by the integer itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitArray {
    len: usize,
    words: Vec<u64>,
}

impl BitArray {
    pub fn filled(len: usize, value: bool) -> Self {
        let nwords = len / 64 + 1;
        let mut words = vec![if value { !0u64 } else { 0 }; nwords];
        if value {
            words[0] &= !1; // index 0 unused
            let tail = len % 64;
            let last = nwords - 1;
            words[last] &= (!0u64).checked_shr(63 - tail as u32).unwrap_or(!0);
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i <= self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(1 <= i && i <= self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// Number of set bits with index `<= n`.
    pub fn count_through(&self, n: usize) -> u64 {
        let n = n.min(self.len);
        let full = n / 64;
        let mut total: u64 = self.words[..full]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let tail = n % 64;
        total += (self.words[full] & (!0u64).checked_shr(63 - tail as u32).unwrap_or(!0))
            .count_ones() as u64;
        total
    }

    pub fn count(&self) -> u64 {
        self.count_through(self.len)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.len).filter(move |&i| self.get(i))
    }
}

// ---------------------------------------------------------------------------
// Prime sieve (segmented)
// ---------------------------------------------------------------------------

fn small_primes(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primality bit array for `1..=limit`, sieved segment by segment.
pub fn sieve_primes(limit: u64) -> Result<BitArray> {
    sieve_primes_segmented(limit, default_segment_len())
}

pub fn sieve_primes_segmented(limit: u64, segment_len: usize) -> Result<BitArray> {
    require_budget(limit, limit as u128 / 8 + 64)?;
    let limit = limit as usize;
    let seg = segment_len.max(64);
    let mut bits = BitArray::filled(limit, true);
    if limit >= 1 {
        bits.set(1, false);
    }
    let base = small_primes((limit as f64).sqrt() as usize + 1);
    let mut lo = 2usize;
    while lo <= limit {
        let hi = (lo + seg - 1).min(limit);
        for &p in &base {
            let p = p as usize;
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                bits.set(j, false);
                j += p;
            }
        }
        lo = hi + 1;
    }
    Ok(bits)
}

/// All primes up to `limit`, ascending.
pub fn primes_up_to(limit: u64) -> Result<Vec<u64>> {
    let bits = sieve_primes(limit)?;
    Ok(bits.ones().map(|n| n as u64).collect())
}

// ---------------------------------------------------------------------------
// Dense arithmetic tables
// ---------------------------------------------------------------------------

/// Sieved Mobius, totient, smallest-prime-factor and primality tables for
/// `1..=limit`. Arrays are indexed by the integer itself; entry 0 is unused.
pub struct ArithTables {
    limit: u64,
    mu: Vec<i8>,
    phi: Vec<u64>,
    spf: Vec<u32>,
    is_prime: BitArray,
}

pub fn build_tables(limit: u64) -> Result<ArithTables> {
    build_tables_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

pub fn build_tables_with_budget(limit: u64, budget: u128) -> Result<ArithTables> {
    if limit < 2 {
        return Err(Error::InvalidInput(format!(
            "table limit must be >= 2, got {limit}"
        )));
    }
    if limit > u32::MAX as u64 {
        return Err(Error::InvalidInput(format!(
            "table limit {limit} exceeds u32 range"
        )));
    }
    // 1 (mu) + 8 (phi) + 4 (spf) bytes per entry plus one bit for primality.
    let required = (limit as u128 + 1) * 13 + limit as u128 / 8 + 64;
    if required > budget {
        return Err(Error::Capacity {
            limit,
            required,
            budget,
        });
    }

    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u64; n + 1];
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    spf[1] = 1;

    // Linear sieve: each composite is struck exactly once by its smallest
    // prime factor.
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i);
            mu[i] = -1;
            phi[i] = (i - 1) as u64;
        }
        let spf_i = spf[i] as usize;
        for &p in &primes {
            if p > spf_i || i * p > n {
                break;
            }
            let ip = i * p;
            spf[ip] = p as u32;
            if p == spf_i {
                mu[ip] = 0;
                phi[ip] = phi[i] * p as u64;
            } else {
                mu[ip] = -mu[i];
                phi[ip] = phi[i] * (p - 1) as u64;
            }
        }
    }

    let mut is_prime = BitArray::filled(n, false);
    for &p in &primes {
        is_prime.set(p, true);
    }

    Ok(ArithTables {
        limit,
        mu,
        phi,
        spf,
        is_prime,
    })
}

impl ArithTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(n as usize)
    }

    pub fn mu(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.check(n)?])
    }

    pub fn phi(&self, n: u64) -> Result<u64> {
        Ok(self.phi[self.check(n)?])
    }

    pub fn spf(&self, n: u64) -> Result<u64> {
        Ok(self.spf[self.check(n)?] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        Ok(self.is_prime.get(self.check(n)?))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.is_prime.ones().map(|n| n as u64)
    }

    /// Prime factorization via repeated smallest-prime-factor lookups.
    pub fn factor(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut m = self.check(n)?;
        let mut out = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// k-free indicators
// ---------------------------------------------------------------------------

/// Pointwise k-free test: 1 iff no prime power p^k divides n.
///
/// Range queries should use [`kfree_sieve`]; this factors n through the
/// smallest-prime-factor table. The divisor-sum identity over mu is kept as a
/// test oracle only.
pub fn is_kfree(n: u64, k: u32, tables: &ArithTables) -> Result<bool> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    Ok(tables.factor(n)?.iter().all(|&(_, e)| e < k))
}

/// Marks `n` with `m | n + alpha` as zero for every modulus `m = p^r`,
/// `p` prime in `primes`, `p^r <= limit + alpha`.
fn strike_power_multiples(
    bits: &mut BitArray,
    primes: &[u64],
    alpha: u64,
    r: u32,
    limit: u64,
    seg_lo: u64,
    seg_hi: u64,
) {
    for &p in primes {
        let pr = match (p as u128).checked_pow(r) {
            Some(v) if v <= (limit + alpha) as u128 => v as u64,
            _ => break,
        };
        // first n >= seg_lo with n + alpha ≡ 0 (mod p^r)
        let t = (seg_lo + alpha).div_ceil(pr);
        let mut n = t * pr - alpha;
        while n <= seg_hi {
            bits.set(n as usize, false);
            n += pr;
        }
    }
}

/// Indicator of the k-free numbers in `1..=limit`, sieved by striking
/// multiples of p^k directly.
pub fn kfree_sieve(k: u32, limit: u64) -> Result<BitArray> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    require_budget(limit, limit as u128 / 8 + 64)?;
    let primes = small_primes((limit as f64).powf(1.0 / k as f64) as usize + 2);
    let mut bits = BitArray::filled(limit as usize, true);
    let seg = default_segment_len() as u64;
    let mut lo = 1u64;
    while lo <= limit {
        let hi = (lo + seg - 1).min(limit);
        strike_power_multiples(&mut bits, &primes, 0, k, limit, lo, hi);
        lo = hi + 1;
    }
    Ok(bits)
}

/// Periodic approximation to the k-free indicator: only prime powers p^k with
/// p <= y are struck. The result is periodic with period prod_{p<=y} p^k and
/// dominates the exact indicator pointwise.
pub fn kfree_smooth_sieve(k: u32, y: u64, limit: u64) -> Result<BitArray> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be >= 2, got {k}")));
    }
    require_budget(limit, limit as u128 / 8 + 64)?;
    let primes: Vec<u64> = small_primes(y as usize);
    let mut bits = BitArray::filled(limit as usize, true);
    let seg = default_segment_len() as u64;
    let mut lo = 1u64;
    while lo <= limit {
        let hi = (lo + seg - 1).min(limit);
        strike_power_multiples(&mut bits, &primes, 0, k, limit, lo, hi);
        lo = hi + 1;
    }
    Ok(bits)
}

// ---------------------------------------------------------------------------
// Tuple indicator
// ---------------------------------------------------------------------------

/// Bit-exact indicator of f(n) = prod_i kfree_{r_i}(n + alpha_i) on `1..=limit`.
///
/// The strike loop runs over moduli p^{r_i} up to `limit + alpha_i`, so shifted
/// lookups never read past the sieved range; no table of length
/// `limit + max alpha` is ever materialized.
pub struct TupleIndicator {
    limit: u64,
    config: TupleConfig,
    bits: BitArray,
}

impl TupleIndicator {
    pub fn build(config: &TupleConfig, limit: u64) -> Result<Self> {
        Self::build_segmented(config, limit, default_segment_len())
    }

    pub fn build_segmented(config: &TupleConfig, limit: u64, segment_len: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidInput(
                "indicator limit must be positive".into(),
            ));
        }
        require_budget(limit, limit as u128 / 8 + 64)?;
        let max_alpha = config.max_alpha();
        limit.checked_add(max_alpha).ok_or(Error::Overflow {
            what: "limit + alpha",
            prime: None,
        })?;
        let primes = small_primes(((limit + max_alpha) as f64).sqrt() as usize + 2);
        let mut bits = BitArray::filled(limit as usize, true);
        let seg = segment_len.max(64) as u64;
        let mut lo = 1u64;
        while lo <= limit {
            let hi = (lo + seg - 1).min(limit);
            for &(alpha, r) in config.pairs() {
                strike_power_multiples(&mut bits, &primes, alpha, r, limit, lo, hi);
            }
            lo = hi + 1;
        }
        Ok(Self {
            limit,
            config: config.clone(),
            bits,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn config(&self) -> &TupleConfig {
        &self.config
    }

    /// f(n) as a bool. Panics if `n` is 0 or past the limit.
    #[inline]
    pub fn get(&self, n: u64) -> bool {
        assert!(
            n >= 1 && n <= self.limit,
            "n = {n} out of range 1..={}",
            self.limit
        );
        self.bits.get(n as usize)
    }

    pub fn count_through(&self, n: u64) -> u64 {
        self.bits.count_through(n as usize)
    }

    pub fn count(&self) -> u64 {
        self.bits.count()
    }

    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.ones().map(|n| n as u64)
    }

    pub fn bits(&self) -> &BitArray {
        &self.bits
    }
}

// ---------------------------------------------------------------------------
// Ramanujan sums
// ---------------------------------------------------------------------------

/// Ramanujan sum c_q(n), evaluated through the classical divisor form
///
/// ```text
/// c_q(n) = sum_{d | gcd(q, n)} d * mu(q / d)
/// ```
///
/// which the unit tests verify against the defining exponential sum.
pub fn ramanujan_sum(q: u64, n: i64, tables: &ArithTables) -> Result<i64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    tables.check(q)?;
    let res = n.rem_euclid(q as i64) as u64;
    let g = if res == 0 { q } else { gcd_u64(q, res) };
    let mut sum = 0i64;
    for d in divisors_of(&tables.factor(g)?) {
        sum += d as i64 * tables.mu(q / d)? as i64;
    }
    Ok(sum)
}

/// c_q(n) for every residue class: entry `i` holds c_q(n) for n ≡ i (mod q).
/// Standalone (factors q by trial division), used where no tables are around.
pub fn ramanujan_row(q: u64) -> Result<Vec<i64>> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus q must be positive".into()));
    }
    require_budget(q, q as u128 * 8)?;
    let fac = factorize(q);
    let mut row = vec![0i64; q as usize];
    // c_q(n) = sum over d | q, d | n of d * mu(q/d); walk multiples of d.
    for d in divisors_of(&fac) {
        let m = mu_from_factors(&factorize(q / d));
        if m == 0 {
            continue;
        }
        let add = d as i64 * m as i64;
        let mut idx = 0usize;
        while idx < q as usize {
            row[idx] += add;
            idx += d as usize;
        }
    }
    Ok(row)
}

/// All divisors of a factored integer, ascending.
pub fn divisors_of(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factors {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Trial-division factorization; intended for moduli up to ~10^12.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    out
}

pub(crate) fn mu_from_factors(factors: &[(u64, u32)]) -> i8 {
    if factors.iter().any(|&(_, e)| e >= 2) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}
