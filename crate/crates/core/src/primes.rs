//! Exact prime enumeration by segmented sieve of Eratosthenes.
//!
//! Everything downstream (model checks, conjecture scans) treats the counts
//! produced here as ground truth. Counting never materializes the full list
//! of primes: the range is streamed in fixed-size segments, and only the
//! base primes up to `sqrt(hi)` are kept in memory.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted input (all counts and bounds fit in a signed 64-bit integer).
pub const MAX_INPUT: u64 = i64::MAX as u64;

/// Default number of flags per segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes up to and including `limit`.
fn small_primes(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Marks primality of every integer in `[lo, hi)` into `flags`.
///
/// `base` must contain every prime up to `sqrt(hi - 1)`.
fn mark_range(base: &[u32], lo: u64, hi: u64, flags: &mut Vec<bool>) {
    let len = (hi - lo) as usize;
    flags.clear();
    flags.resize(len, true);
    for n in lo..hi.min(2) {
        flags[(n - lo) as usize] = false;
    }
    for &p in base {
        let p = p as u64;
        let sq = p * p;
        if sq >= hi {
            break;
        }
        let mut m = if sq >= lo { sq } else { lo.div_ceil(p) * p };
        while m < hi {
            flags[(m - lo) as usize] = false;
            m += p;
        }
    }
}

/// Primality flags for the half-open range `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSegment {
    lo: u64,
    hi: u64,
    flags: Vec<bool>,
}

impl SieveSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// `flags()[i]` is true iff `lo + i` is prime.
    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        (self.lo..self.hi)
            .contains(&n)
            .then(|| self.flags[(n - self.lo) as usize])
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(i, _)| lo + i as u64)
    }

    pub fn count(&self) -> u64 {
        self.flags.iter().filter(|&&f| f).count() as u64
    }
}

/// A residue class `l (mod k)` with `gcd(k, l) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProgressionClass {
    k: u64,
    l: u64,
    phi_k: u64,
}

impl ProgressionClass {
    /// `k = 1` is admitted with the single class `l = 0`.
    pub fn new(k: u64, l: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("modulus k must be >= 1".into()));
        }
        if l >= k {
            return Err(Error::InvalidArgument(format!(
                "residue l = {l} must satisfy 0 <= l < k = {k}"
            )));
        }
        if gcd(k, l) != 1 {
            return Err(Error::NotCoprime { k, l });
        }
        Ok(Self {
            k,
            l,
            phi_k: totient(k)?,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn phi_k(&self) -> u64 {
        self.phi_k
    }
}

/// Exact prime counts at a set of checkpoints, optionally split by residue class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeCountTable {
    pub checkpoints: Vec<u64>,
    pub counts: Vec<u64>,
    pub classes: Vec<ClassCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCounts {
    pub class: ProgressionClass,
    /// `pi(x; k, l)` at each checkpoint.
    pub counts: Vec<u64>,
}

impl PrimeCountTable {
    /// `pi(x)` at `x`, if `x` is one of the checkpoints.
    pub fn count_at(&self, x: u64) -> Option<u64> {
        self.checkpoints
            .binary_search(&x)
            .ok()
            .map(|i| self.counts[i])
    }

    pub fn class_count_at(&self, x: u64, class: &ProgressionClass) -> Option<u64> {
        let i = self.checkpoints.binary_search(&x).ok()?;
        self.classes
            .iter()
            .find(|c| c.class == *class)
            .map(|c| c.counts[i])
    }
}

/// Segmented sieve with cached base primes.
///
/// Immutable after construction, so one instance can serve concurrent queries.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    segment_size: usize,
    base: Vec<u32>,
    base_limit: u64,
}

impl Default for PrimeSieve {
    fn default() -> Self {
        Self::new(0)
    }
}

impl PrimeSieve {
    /// Caches base primes sufficient for ranges up to `max_hi`.
    pub fn new(max_hi: u64) -> Self {
        Self::with_segment_size(max_hi, DEFAULT_SEGMENT_SIZE)
    }

    pub fn with_segment_size(max_hi: u64, segment_size: usize) -> Self {
        let base_limit = isqrt(max_hi.min(MAX_INPUT)) + 1;
        Self {
            segment_size: segment_size.max(1),
            base: small_primes(base_limit),
            base_limit,
        }
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    fn base_for(&self, hi: u64) -> Cow<'_, [u32]> {
        let need = isqrt(hi) + 1;
        if need <= self.base_limit {
            Cow::Borrowed(&self.base)
        } else {
            Cow::Owned(small_primes(need))
        }
    }

    fn check_input(n: u64) -> Result<()> {
        if n > MAX_INPUT {
            Err(Error::OutOfRange {
                value: n,
                max: MAX_INPUT,
            })
        } else {
            Ok(())
        }
    }

    /// Sieves `[lo, hi)` as a single segment.
    pub fn sieve_segment(&self, lo: u64, hi: u64) -> Result<SieveSegment> {
        Self::check_input(hi)?;
        if lo < 2 {
            return Err(Error::InvalidArgument(format!(
                "segment lower bound must be >= 2, got {lo}"
            )));
        }
        if lo >= hi {
            return Err(Error::RangeOrder { lo, hi });
        }
        let len = hi - lo;
        if len > self.segment_size as u64 {
            return Err(Error::SegmentTooLarge {
                len,
                cap: self.segment_size as u64,
            });
        }
        let base = self.base_for(hi);
        let mut flags = Vec::new();
        mark_range(&base, lo, hi, &mut flags);
        Ok(SieveSegment { lo, hi, flags })
    }

    /// Calls `f(lo, flags)` for consecutive segments covering `[lo, hi)`, in order.
    pub fn for_each_segment<F>(&self, lo: u64, hi: u64, mut f: F)
    where
        F: FnMut(u64, &[bool]),
    {
        if lo >= hi {
            return;
        }
        let base = self.base_for(hi);
        let mut flags = Vec::with_capacity(self.segment_size);
        let mut start = lo;
        while start < hi {
            let end = hi.min(start.saturating_add(self.segment_size as u64));
            mark_range(&base, start, end, &mut flags);
            f(start, &flags);
            start = end;
        }
    }

    /// Streams the primes in `[lo, hi)` in increasing order.
    pub fn for_each_prime<F>(&self, lo: u64, hi: u64, mut f: F)
    where
        F: FnMut(u64),
    {
        self.for_each_segment(lo, hi, |start, flags| {
            for (i, _) in flags.iter().enumerate().filter(|(_, &b)| b) {
                f(start + i as u64);
            }
        });
    }

    /// Collects the primes in `[lo, hi)`.
    pub fn primes_between(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_prime(lo, hi, |p| out.push(p));
        out
    }

    /// `pi(x)`. Segments are counted in parallel and reduced by summation,
    /// so the result does not depend on the schedule.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        Self::check_input(x)?;
        if x < 2 {
            return Ok(0);
        }
        let hi = x + 1;
        let base = self.base_for(hi);
        let seg = self.segment_size as u64;
        let n_segments = (hi - 2).div_ceil(seg);
        let total = (0..n_segments)
            .into_par_iter()
            .map_init(Vec::new, |flags, s| {
                let lo = 2 + s * seg;
                let end = hi.min(lo + seg);
                mark_range(&base, lo, end, flags);
                flags.iter().filter(|&&b| b).count() as u64
            })
            .sum();
        Ok(total)
    }

    /// `pi(x; k, l)`.
    pub fn prime_count_progression(&self, x: u64, class: &ProgressionClass) -> Result<u64> {
        Self::check_input(x)?;
        let (k, l) = (class.k(), class.l());
        let mut n = 0;
        self.for_each_prime(2, x.saturating_add(1), |p| {
            if p % k == l {
                n += 1;
            }
        });
        Ok(n)
    }

    /// Prime counts for every residue `0..k` modulo `k`, over primes `<= x`.
    pub fn residue_counts(&self, x: u64, k: u64) -> Result<Vec<u64>> {
        Self::check_input(x)?;
        if k == 0 {
            return Err(Error::InvalidArgument("modulus k must be >= 1".into()));
        }
        let mut counts = vec![0u64; k as usize];
        self.for_each_prime(2, x.saturating_add(1), |p| counts[(p % k) as usize] += 1);
        Ok(counts)
    }

    /// Count of primes in the open interval `(a, b)` and the smallest of them.
    pub fn primes_in_interval(&self, a: u64, b: u64) -> Result<(u64, Option<u64>)> {
        Self::check_input(b)?;
        if a >= b {
            return Err(Error::RangeOrder { lo: a, hi: b });
        }
        let mut count = 0;
        let mut first = None;
        self.for_each_prime(a + 1, b, |p| {
            count += 1;
            first.get_or_insert(p);
        });
        Ok((count, first))
    }

    /// Builds a count table in a single streaming pass.
    ///
    /// Checkpoints are sorted and deduplicated.
    pub fn count_table(
        &self,
        checkpoints: &[u64],
        classes: &[ProgressionClass],
    ) -> Result<PrimeCountTable> {
        let mut cps = checkpoints.to_vec();
        cps.sort_unstable();
        cps.dedup();
        let Some(&max) = cps.last() else {
            return Ok(PrimeCountTable {
                checkpoints: cps,
                counts: Vec::new(),
                classes: Vec::new(),
            });
        };
        Self::check_input(max)?;

        let mut counts = Vec::with_capacity(cps.len());
        let mut class_counts: Vec<Vec<u64>> = vec![Vec::with_capacity(cps.len()); classes.len()];
        let mut running = 0u64;
        let mut running_cls = vec![0u64; classes.len()];
        let mut next = 0usize;

        // checkpoints below 2 hold zero primes
        while next < cps.len() && cps[next] < 2 {
            counts.push(0);
            for c in class_counts.iter_mut() {
                c.push(0);
            }
            next += 1;
        }

        self.for_each_segment(2, max + 1, |start, flags| {
            for (i, &is_p) in flags.iter().enumerate() {
                let n = start + i as u64;
                if is_p {
                    running += 1;
                    for (j, cls) in classes.iter().enumerate() {
                        if n % cls.k() == cls.l() {
                            running_cls[j] += 1;
                        }
                    }
                }
                while next < cps.len() && cps[next] == n {
                    counts.push(running);
                    for (j, c) in class_counts.iter_mut().enumerate() {
                        c.push(running_cls[j]);
                    }
                    next += 1;
                }
            }
        });

        Ok(PrimeCountTable {
            checkpoints: cps,
            counts,
            classes: classes
                .iter()
                .zip(class_counts)
                .map(|(&class, counts)| ClassCounts { class, counts })
                .collect(),
        })
    }

    /// `max over l coprime to k of |pi(x; k, l) - li_x / phi(k)|`, with the
    /// smallest maximizing `l`.
    pub fn residue_max_deviation(&self, x: u64, k: u64, li_x: f64) -> Result<(f64, u64)> {
        if k == 0 {
            return Err(Error::InvalidArgument("modulus k must be >= 1".into()));
        }
        if x < k {
            return Err(Error::InvalidArgument(format!(
                "residue_max_deviation requires x >= k (x = {x}, k = {k})"
            )));
        }
        let counts = self.residue_counts(x, k)?;
        Ok(max_deviation_from_counts(&counts, k, totient(k)?, li_x))
    }
}

/// Worst residue deviation given the per-residue counts modulo `k`.
///
/// Ties keep the smallest `l`.
pub(crate) fn max_deviation_from_counts(
    counts: &[u64],
    k: u64,
    phi_k: u64,
    li_x: f64,
) -> (f64, u64) {
    let expected = li_x / phi_k as f64;
    let mut best = (f64::NEG_INFINITY, 0);
    for (l, &c) in counts.iter().enumerate() {
        if gcd(k, l as u64) != 1 {
            continue;
        }
        let dev = (c as f64 - expected).abs();
        if dev > best.0 {
            best = (dev, l as u64);
        }
    }
    best
}

/// Sieves `[lo, hi)` with the default segment cap.
pub fn sieve_segment(lo: u64, hi: u64) -> Result<SieveSegment> {
    PrimeSieve::check_input(hi)?;
    PrimeSieve::new(hi).sieve_segment(lo, hi)
}

/// Number of primes `<= x`.
pub fn prime_count(x: u64) -> Result<u64> {
    PrimeSieve::check_input(x)?;
    PrimeSieve::new(x).prime_count(x)
}

pub fn prime_count_progression(x: u64, class: &ProgressionClass) -> Result<u64> {
    PrimeSieve::check_input(x)?;
    PrimeSieve::new(x).prime_count_progression(x, class)
}

pub fn primes_in_interval(a: u64, b: u64) -> Result<(u64, Option<u64>)> {
    PrimeSieve::check_input(b)?;
    PrimeSieve::new(b).primes_in_interval(a, b)
}

pub fn residue_max_deviation(x: u64, k: u64, li_x: f64) -> Result<(f64, u64)> {
    PrimeSieve::check_input(x)?;
    PrimeSieve::new(x).residue_max_deviation(x, k, li_x)
}

/// Euler's totient by trial-division factorization.
pub fn totient(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("totient(0) is undefined".into()));
    }
    let mut n = k;
    let mut phi = k;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        phi -= phi / n;
    }
    Ok(phi)
}

/// `phi(n)` for all `0 <= n <= limit` (index 0 holds 0).
pub fn totients_up_to(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut phi: Vec<u64> = (0..=limit).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}
