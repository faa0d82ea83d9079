//! Desk-scale checks of the model consequences: Legendre intervals, gap
//! widths, the Littlewood ratio, the sign of `Li(x) − π(x)`, Chebyshev bounds,
//! the 4k±1 race and Elliott–Halberstam sums.
//!
//! Nothing here proves anything. Each check evaluates a computable inequality
//! at concrete `x` and reports whether it held.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, NeumaierSum};
use crate::error::{Error, Result};
use crate::primes::{self, max_deviation_from_counts, PrimeSieve};

/// Chebyshev's constants: `a·x/ln x < π(x) < b·x/ln x`.
pub const CHEBYSHEV_LOWER: f64 = 0.921;
pub const CHEBYSHEV_UPPER: f64 = 1.106;
/// Smallest x at which the Chebyshev check is run; at 10³ the ratio is 1.1605.
pub const CHEBYSHEV_FLOOR: u64 = 100_000;

/// Largest `x^a` accepted by [`eh_sum`].
pub const EH_MAX_MODULI: f64 = 10_000.0;

/// Upper end of the scan used to locate the gap-ordering threshold.
const GAP_SCAN_MAX_DECADE: i32 = 15;
const GAP_SCAN_PER_DECADE: i32 = 16;

fn model_sd(x: f64) -> Result<f64> {
    let li = analytic::li_value(x)?;
    Ok((li - li * li / x).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreRow {
    pub n: u64,
    pub first_prime: Option<u64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreScan {
    pub n_max: u64,
    pub all_pass: bool,
    pub rows: Vec<LegendreRow>,
}

/// Checks for a prime strictly between `n²` and `(n+1)²` for every `1 <= n <= n_max`.
pub fn legendre_scan(n_max: u64) -> Result<LegendreScan> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let top = (n_max + 1)
        .checked_mul(n_max + 1)
        .filter(|&v| v <= primes::MAX_INPUT)
        .ok_or(Error::OutOfRange {
            value: n_max,
            max: 3_037_000_498,
        })?;
    let sieve = PrimeSieve::new(top);
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (count, first) = sieve.primes_in_interval(n * n, (n + 1) * (n + 1))?;
            Ok(LegendreRow {
                n,
                first_prime: first,
                count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LegendreScan {
        n_max,
        all_pass: rows.iter().all(|r| r.count > 0),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalCheck {
    pub x: u64,
    pub c: f64,
    pub interval_len: f64,
    pub found: bool,
    pub prime: Option<u64>,
}

/// Looks for a prime in `(x, x + C·√(Li(x) − Li²(x)/x)]`.
pub fn interval_prime_check(x: u64, c: f64) -> Result<IntervalCheck> {
    if x < 100 {
        return Err(Error::BelowThreshold {
            what: "interval_prime_check",
            x: x as f64,
            min: 100.0,
        });
    }
    if c.is_nan() || c <= 0.0 || c.is_infinite() {
        return Err(Error::InvalidArgument(format!("C must be > 0, got {c}")));
    }
    let interval_len = c * model_sd(x as f64)?;
    if interval_len < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "degenerate interval: length {interval_len} < 1"
        )));
    }
    let end = x + interval_len.floor() as u64;
    let (count, prime) = primes::primes_in_interval(x, end + 1)?;
    Ok(IntervalCheck {
        x,
        c,
        interval_len,
        found: count > 0,
        prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBoundTriple {
    pub x: u64,
    /// `A·√x·ln x`
    pub riemann_gap: f64,
    /// `C·√(Li(x) − Li²(x)/x)`
    pub model_gap: f64,
    /// `B·ln² x`
    pub cramer_gap: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `cramer_gap < model_gap < riemann_gap` at this x.
    pub ordering_holds: bool,
    /// Point above which the ordering holds everywhere on the scanned range
    /// (up to 10¹⁵); `None` if it still fails at the top of the scan.
    pub threshold: Option<f64>,
}

fn gap_ordering(x: f64, a: f64, b: f64, c: f64) -> Result<(f64, f64, f64, bool)> {
    let l = x.ln();
    let riemann = a * x.sqrt() * l;
    let model = c * model_sd(x)?;
    let cramer = b * l * l;
    Ok((riemann, model, cramer, cramer < model && model < riemann))
}

fn gap_threshold(a: f64, b: f64, c: f64) -> Result<Option<f64>> {
    let n = (GAP_SCAN_MAX_DECADE - 3) * GAP_SCAN_PER_DECADE;
    let grid: Vec<f64> = (0..=n)
        .map(|i| 10f64.powf(3.0 + i as f64 / GAP_SCAN_PER_DECADE as f64))
        .collect();
    let holds = grid
        .iter()
        .map(|&x| gap_ordering(x, a, b, c).map(|r| r.3))
        .collect::<Result<Vec<_>>>()?;
    let Some(last_fail) = holds.iter().rposition(|h| !h) else {
        return Ok(Some(grid[0]));
    };
    if last_fail + 1 == grid.len() {
        return Ok(None);
    }
    let (mut lo, mut hi) = (grid[last_fail], grid[last_fail + 1]);
    while hi / lo > 1.0 + 1e-9 {
        let mid = (lo * hi).sqrt();
        if gap_ordering(mid, a, b, c)?.3 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

pub fn gap_bound_triple(x: u64, a: f64, b: f64, c: f64) -> Result<GapBoundTriple> {
    if x < 1000 {
        return Err(Error::BelowThreshold {
            what: "gap_bound_triple",
            x: x as f64,
            min: 1000.0,
        });
    }
    if [a, b, c]
        .iter()
        .any(|v| v.is_nan() || *v <= 0.0 || v.is_infinite())
    {
        return Err(Error::InvalidArgument(format!(
            "gap constants must be positive, got A = {a}, B = {b}, C = {c}"
        )));
    }
    let (riemann_gap, model_gap, cramer_gap, ordering_holds) = gap_ordering(x as f64, a, b, c)?;
    Ok(GapBoundTriple {
        x,
        riemann_gap,
        model_gap,
        cramer_gap,
        a,
        b,
        c,
        ordering_holds,
        threshold: gap_threshold(a, b, c)?,
    })
}

/// `x·(ln ln ln x)² / (ln² x · (Li(x) − ∫₂ˣ dt/ln² t))`, with the integral
/// difference taken in closed form.
pub fn littlewood_ratio(x: f64) -> Result<f64> {
    let floor = E.powf(E);
    if x.is_nan() || x <= floor {
        return Err(Error::BelowThreshold {
            what: "littlewood_ratio",
            x,
            min: floor,
        });
    }
    let l = x.ln();
    let lll = l.ln().ln();
    Ok(x * lll * lll / (l * l * analytic::log_integral_difference(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignRow {
    pub x: u64,
    pub li: f64,
    pub pi: u64,
    /// `Li(x) − π(x)`
    pub difference: f64,
    pub positive: bool,
}

/// `Li(x) − π(x)` at each checkpoint, in ascending order of `x`.
pub fn li_minus_pi_sign(checkpoints: &[u64]) -> Result<Vec<SignRow>> {
    for &x in checkpoints {
        if x < 2 {
            return Err(Error::BelowThreshold {
                what: "li_minus_pi_sign",
                x: x as f64,
                min: 2.0,
            });
        }
        if x > 1_000_000_000 {
            return Err(Error::OutOfRange {
                value: x,
                max: 1_000_000_000,
            });
        }
    }
    let max = checkpoints.iter().copied().max().unwrap_or(2);
    let table = PrimeSieve::new(max).count_table(checkpoints, &[])?;
    table
        .checkpoints
        .iter()
        .zip(&table.counts)
        .map(|(&x, &pi)| {
            let li = analytic::li_value(x as f64)?;
            let difference = li - pi as f64;
            Ok(SignRow {
                x,
                li,
                pi,
                difference,
                positive: difference > 0.0,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevCheck {
    pub x: u64,
    pub pi: u64,
    /// `π(x)·ln x / x`
    pub ratio: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

pub fn chebyshev_bounds_check(x: u64) -> Result<ChebyshevCheck> {
    if x < CHEBYSHEV_FLOOR {
        return Err(Error::BelowThreshold {
            what: "chebyshev_bounds_check",
            x: x as f64,
            min: CHEBYSHEV_FLOOR as f64,
        });
    }
    let pi = primes::prime_count(x)?;
    let ratio = pi as f64 * (x as f64).ln() / x as f64;
    Ok(ChebyshevCheck {
        x,
        pi,
        ratio,
        lower_ok: ratio > CHEBYSHEV_LOWER,
        upper_ok: ratio < CHEBYSHEV_UPPER,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidueRace {
    pub x: u64,
    pub count_1_mod_4: u64,
    pub count_3_mod_4: u64,
    pub difference: u64,
    /// `difference / (√x · ln ln ln x / ln x)`, for `x > e^e`.
    pub normalized: Option<f64>,
}

pub fn residue_race(x: u64) -> Result<ResidueRace> {
    if x < 10 {
        return Err(Error::BelowThreshold {
            what: "residue_race",
            x: x as f64,
            min: 10.0,
        });
    }
    let counts = PrimeSieve::new(x).residue_counts(x, 4)?;
    let (c1, c3) = (counts[1], counts[3]);
    let difference = c1.abs_diff(c3);
    let xf = x as f64;
    let normalized = (xf > E.powf(E)).then(|| {
        let l = xf.ln();
        difference as f64 / (xf.sqrt() * l.ln().ln() / l)
    });
    Ok(ResidueRace {
        x,
        count_1_mod_4: c1,
        count_3_mod_4: c3,
        difference,
        normalized,
    })
}

/// `C(x) = (Li(x) − x/ln x)·ln² x / x`, the coefficient in
/// `Li(x) = x/ln x + C·x/ln² x`.
pub fn li_expansion_constant(x: f64) -> Result<f64> {
    let l = x.ln();
    Ok((analytic::li_value(x)? - x / l) * l * l / x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EhTerm {
    pub k: u64,
    pub phi_k: u64,
    pub max_deviation: f64,
    pub argmax_l: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EhSumRecord {
    pub x: u64,
    pub a: f64,
    pub k_max: u64,
    pub li_x: f64,
    /// `Σ_{1<=k<=x^a} max_l |π(x;k,l) − Li(x)/φ(k)|`
    pub sum: f64,
    pub terms: Vec<EhTerm>,
}

impl EhSumRecord {
    /// `sum · ln^A(x) / x`
    pub fn fitted_constant(&self, big_a: f64) -> f64 {
        let xf = self.x as f64;
        self.sum * xf.ln().powf(big_a) / xf
    }

    /// `C · x / ln^A(x)`
    pub fn bound(&self, c: f64, big_a: f64) -> f64 {
        let xf = self.x as f64;
        c * xf / xf.ln().powf(big_a)
    }
}

// Lemire's fastmod for 32-bit operands, d >= 2.
#[derive(Clone, Copy)]
struct FastMod {
    m: u64,
    d: u32,
}

impl FastMod {
    fn new(d: u32) -> Self {
        debug_assert!(d >= 2);
        Self {
            m: u64::MAX / d as u64 + 1,
            d,
        }
    }

    #[inline]
    fn rem(self, a: u32) -> u32 {
        let low = self.m.wrapping_mul(a as u64);
        ((low as u128 * self.d as u128) >> 64) as u32
    }
}

fn residue_histogram(primes: &[u32], k: u64) -> Vec<u64> {
    let mut counts = vec![0u64; k as usize];
    if k == 1 {
        counts[0] = primes.len() as u64;
        return counts;
    }
    let fm = FastMod::new(k as u32);
    for &p in primes {
        counts[fm.rem(p) as usize] += 1;
    }
    counts
}

/// Elliott–Halberstam sum over moduli `1 <= k <= x^a`.
///
/// The primes up to `x` are sieved once; each modulus then buckets them by
/// residue. Moduli are processed in parallel and summed in order of `k`.
pub fn eh_sum(x: u64, a: f64) -> Result<EhSumRecord> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent a must lie in (0, 1), got {a}"
        )));
    }
    if x < 1000 {
        return Err(Error::BelowThreshold {
            what: "eh_sum",
            x: x as f64,
            min: 1000.0,
        });
    }
    if x > u32::MAX as u64 {
        return Err(Error::OutOfRange {
            value: x,
            max: u32::MAX as u64,
        });
    }
    let span = (x as f64).powf(a);
    if span > EH_MAX_MODULI {
        return Err(Error::WorkBound(format!(
            "x^a = {span:.1} exceeds {EH_MAX_MODULI} moduli"
        )));
    }
    let k_max = span.floor() as u64;
    let li_x = analytic::li_value(x as f64)?;
    let sieve = PrimeSieve::new(x);
    let mut plist: Vec<u32> = Vec::new();
    sieve.for_each_prime(2, x + 1, |p| plist.push(p as u32));

    let phis = primes::totients_up_to(k_max);
    let terms: Vec<EhTerm> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let counts = residue_histogram(&plist, k);
            let phi_k = phis[k as usize];
            let (max_deviation, argmax_l) = max_deviation_from_counts(&counts, k, phi_k, li_x);
            EhTerm {
                k,
                phi_k,
                max_deviation,
                argmax_l,
            }
        })
        .collect();
    let sum = terms.iter().map(|t| t.max_deviation).sum();
    Ok(EhSumRecord {
        x,
        a,
        k_max,
        li_x,
        sum,
        terms,
    })
}

/// Largest `x` solving `x^{(1−a)/2} = ln^A x`; above it the power always
/// wins. `None` when the inequality holds for every `x > 1`.
pub fn eh_crossover(a: f64, big_a: f64) -> Result<Option<f64>> {
    if !(a > 0.0 && a < 1.0) || big_a.is_nan() || big_a <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 < a < 1 and A > 0, got a = {a}, A = {big_a}"
        )));
    }
    // in y = ln x: g(y) = (1−a)/2·y − A·ln y, minimal at y* = 2A/(1−a)
    let slope = (1.0 - a) / 2.0;
    let g = |y: f64| slope * y - big_a * y.ln();
    let y_min = big_a / slope;
    if g(y_min) >= 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (y_min, 2.0 * y_min);
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi.exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauConstant {
    /// `min φ(n)·ln ln n / n` over `3 <= n <= n_max`
    pub value: f64,
    pub argmin: u64,
    pub n_max: u64,
}

pub fn landau_constant(n_max: u64) -> Result<LandauConstant> {
    if n_max < 3 {
        return Err(Error::InvalidArgument("n_max must be >= 3".into()));
    }
    let phi = primes::totients_up_to(n_max);
    let (argmin, value) = (3..=n_max)
        .map(|n| {
            let nf = n as f64;
            (n, phi[n as usize] as f64 * nf.ln().ln() / nf)
        })
        .fold(
            (0, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        );
    Ok(LandauConstant {
        value,
        argmin,
        n_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotientSumChain {
    pub k_max: u64,
    /// `Σ_{k<=K} 1/√φ(k)`
    pub lhs: f64,
    /// `2 + C₃^{-1/2} Σ_{3<=k<=K} √(ln ln k / k)`
    pub middle: f64,
    /// `2 + C₃^{-1/2} √(ln ln K) Σ_{3<=k<=K} 1/√k`
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the totient-sum majorant chain with Landau constant `c3`.
pub fn totient_sum_chain(k_max: u64, c3: f64) -> Result<TotientSumChain> {
    if k_max < 3 || c3.is_nan() || c3 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "need K >= 3 and C3 > 0, got K = {k_max}, C3 = {c3}"
        )));
    }
    let phi = primes::totients_up_to(k_max);
    let lhs = (1..=k_max)
        .map(|k| 1.0 / (phi[k as usize] as f64).sqrt())
        .collect::<NeumaierSum>()
        .value();
    let inv = 1.0 / c3.sqrt();
    let middle = 2.0
        + inv
            * (3..=k_max)
                .map(|k| {
                    let kf = k as f64;
                    (kf.ln().ln() / kf).sqrt()
                })
                .collect::<NeumaierSum>()
                .value();
    let rhs = 2.0
        + inv
            * (k_max as f64).ln().ln().sqrt()
            * (3..=k_max)
                .map(|k| 1.0 / (k as f64).sqrt())
                .collect::<NeumaierSum>()
                .value();
    let slack = 1e-12 * rhs;
    Ok(TotientSumChain {
        k_max,
        lhs,
        middle,
        rhs,
        holds: lhs <= middle + slack && middle <= rhs + slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundStatus {
    Holds,
    Fails,
    /// `x` is below the crossover, where the power-versus-log comparison
    /// cannot hold yet.
    NotAssertable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EhBoundReport {
    pub x: u64,
    pub a: f64,
    pub big_a: f64,
    pub eh_sum: f64,
    /// `eh_sum · ln^A x / x`
    pub fitted_c: f64,
    /// `Σ_k √(Li(x)/φ(k))`
    pub sqrt_majorant: f64,
    /// `eh_sum / sqrt_majorant`
    pub fitted_c1: f64,
    /// `√Li(x) · (2 + C₃^{-1/2} √(ln ln x^a) Σ_{3<=k<=x^a} 1/√k)`
    pub totient_majorant: f64,
    /// `x^{(a+1)/2} · √(ln ln x / ln x)`
    pub power_form_loglog: f64,
    /// `x^{(a+1)/2}`
    pub power_form: f64,
    /// `sqrt_majorant / power_form_loglog`
    pub fitted_c_power: f64,
    /// `x / ln^A x`
    pub target: f64,
    pub landau_c3: f64,
    pub crossover: Option<f64>,
    /// `sqrt_majorant <= totient_majorant` and `power_form_loglog < power_form`.
    pub subchain_holds: bool,
    /// `power_form < target`, assertable only above the crossover.
    pub full_bound: BoundStatus,
}

/// Landau constant measured over `3 <= n <= 10⁶`.
pub const LANDAU_SCAN: u64 = 1_000_000;

pub fn eh_bound_check(rec: &EhSumRecord, big_a: f64) -> Result<EhBoundReport> {
    let xf = rec.x as f64;
    let l = xf.ln();
    let c3 = landau_constant(LANDAU_SCAN.max(rec.k_max))?.value;
    let phis = primes::totients_up_to(rec.k_max);
    let sqrt_majorant = (1..=rec.k_max)
        .map(|k| (rec.li_x / phis[k as usize] as f64).sqrt())
        .collect::<NeumaierSum>()
        .value();
    let span = xf.powf(rec.a);
    let tail = (3..=rec.k_max)
        .map(|k| 1.0 / (k as f64).sqrt())
        .collect::<NeumaierSum>()
        .value();
    let totient_majorant =
        rec.li_x.sqrt() * (2.0 + span.ln().ln().max(0.0).sqrt() * tail / c3.sqrt());
    let power_form = xf.powf((rec.a + 1.0) / 2.0);
    let power_form_loglog = power_form * (l.ln() / l).sqrt();
    let target = xf / l.powf(big_a);
    let crossover = eh_crossover(rec.a, big_a)?;
    let full_bound = match crossover {
        Some(cx) if xf <= cx => BoundStatus::NotAssertable,
        _ if power_form < target => BoundStatus::Holds,
        _ => BoundStatus::Fails,
    };
    Ok(EhBoundReport {
        x: rec.x,
        a: rec.a,
        big_a,
        eh_sum: rec.sum,
        fitted_c: rec.fitted_constant(big_a),
        sqrt_majorant,
        fitted_c1: rec.sum / sqrt_majorant,
        totient_majorant,
        power_form_loglog,
        power_form,
        fitted_c_power: sqrt_majorant / power_form_loglog,
        target,
        landau_c3: c3,
        crossover,
        subchain_holds: sqrt_majorant <= totient_majorant * (1.0 + 1e-12)
            && power_form_loglog < power_form,
        full_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_small() {
        let s = legendre_scan(3).unwrap();
        assert!(s.all_pass);
        assert_eq!(s.rows[0].first_prime, Some(2));
        assert_eq!(s.rows[2].first_prime, Some(11));
        assert!(legendre_scan(0).is_err());
    }

    #[test]
    fn interval_checks() {
        let r = interval_prime_check(1_000_000, 3.0).unwrap();
        assert!(
            (r.interval_len - 3.0 * 269.15).abs() < 0.1,
            "{}",
            r.interval_len
        );
        assert!(r.found);
        assert_eq!(r.prime, Some(1_000_003));
        assert!(interval_prime_check(10_000, 3.0).unwrap().found);
        assert!(interval_prime_check(10_000, 1e-6).is_err());
        assert!(interval_prime_check(99, 3.0).is_err());
    }

    #[test]
    fn gap_triple_at_a_million() {
        let g = gap_bound_triple(1_000_000, 1.0, 1.0, 1.0).unwrap();
        assert!((g.cramer_gap - 190.9).abs() < 0.1);
        assert!((g.model_gap - 269.2).abs() < 0.1);
        assert!((g.riemann_gap - 13815.5).abs() < 0.1);
        assert!(g.ordering_holds);
        let t = g.threshold.unwrap();
        assert!(t > 1e5 && t < 1e6, "{t}");
        assert!(gap_bound_triple(1000, 1.0, 0.0, 1.0).is_err());
        assert!(gap_bound_triple(999, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn littlewood_examples() {
        let v = littlewood_ratio(1e6).unwrap();
        assert!((v - 0.0675).abs() < 5e-4, "{v}");
        assert!(littlewood_ratio(1e8).unwrap() < v);
        assert!(littlewood_ratio(15.0).is_err());
    }

    #[test]
    fn sign_small() {
        let rows = li_minus_pi_sign(&[1_000_000, 100]).unwrap();
        assert_eq!(rows[0].x, 100);
        assert!((rows[0].difference - 4.08).abs() < 0.01);
        assert!((rows[1].difference - 128.5).abs() < 0.01);
        assert!(rows.iter().all(|r| r.positive));
        assert!(li_minus_pi_sign(&[1]).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        let c = chebyshev_bounds_check(1_000_000).unwrap();
        assert!((c.ratio - 1.0845).abs() < 1e-4);
        assert!(c.lower_ok && c.upper_ok);
        let c = chebyshev_bounds_check(100_000).unwrap();
        assert!((c.ratio - 1.1043).abs() < 1e-4);
        assert!(c.upper_ok);
        assert!(chebyshev_bounds_check(1000).is_err());
    }

    #[test]
    fn race_examples() {
        let r = residue_race(100).unwrap();
        assert_eq!(
            (r.count_1_mod_4, r.count_3_mod_4, r.difference),
            (11, 13, 2)
        );
        let r = residue_race(10).unwrap();
        assert_eq!((r.count_1_mod_4, r.count_3_mod_4, r.difference), (1, 2, 1));
        assert!(r.normalized.is_none());
        assert!(residue_race(9).is_err());
    }

    #[test]
    fn fastmod_matches_remainder() {
        for d in [2u32, 3, 7, 100, 3162, 10_000] {
            let fm = FastMod::new(d);
            for a in [0u32, 1, 2, 99, 1_000_003, u32::MAX, u32::MAX - 1] {
                assert_eq!(fm.rem(a), a % d, "{a} mod {d}");
            }
        }
    }

    #[test]
    fn eh_preconditions() {
        assert!(eh_sum(10_000, 0.0).is_err());
        assert!(eh_sum(10_000, 1.0).is_err());
        assert!(eh_sum(999, 0.5).is_err());
        assert!(matches!(eh_sum(1_000_000, 0.7), Err(Error::WorkBound(_))));
    }

    #[test]
    fn crossover_values() {
        let x = eh_crossover(0.5, 2.0).unwrap().unwrap();
        let y = x.ln();
        assert!((0.25 * y - 2.0 * y.ln()).abs() < 1e-9);
        assert!(y > 26.0 && y < 26.2, "{y}");
        assert!(eh_crossover(0.5, 0.01).unwrap().is_none());
        assert!(eh_crossover(1.5, 2.0).is_err());
    }

    #[test]
    fn landau_minimum_is_at_three() {
        let c = landau_constant(10_000).unwrap();
        assert_eq!(c.argmin, 3);
        assert!((c.value - 2.0 * 3f64.ln().ln() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn expansion_constant() {
        let c = li_expansion_constant(1e6).unwrap();
        assert!(c > 1.0 && c < 2.0, "{c}");
    }
}
