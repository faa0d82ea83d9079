//! Logarithmic integrals, inverse-log partial sums, Euler–Maclaurin constants
//! and the two-sided normal coverage function.
//!
//! `Li(x)` here is the offset integral `∫₂ˣ dt/ln t`, so there is no
//! singularity anywhere in the integration range.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};

/// Maximum integrand evaluations before quadrature gives up.
pub const MAX_EVALUATIONS: usize = 400_000;

/// Largest `x` accepted by the direct partial sums.
pub const PARTIAL_SUM_CAP: u64 = 1_000_000_000;

/// Default absolute tolerance for `Li`-type integrals up to `x`.
///
/// Absolute accuracy at large `x` is limited by f64 rounding of a value of
/// size `x / ln x`, so the tolerance scales with `x`.
pub fn default_tol(x: f64) -> f64 {
    1e-9_f64.max(1e-13 * x)
}

/// Compensated (Kahan–Babuška–Neumaier) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_bound: f64,
    pub evaluations: usize,
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    // error estimate is already at the rounding floor
    exhausted: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = (WGK[7] * fc).abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * h;
    let diff = ((kronrod - gauss) * h).abs();
    let floor = 16.0 * f64::EPSILON * abs_sum * h.abs();
    Panel {
        a,
        b,
        value,
        err: diff.max(floor),
        exhausted: diff <= floor,
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// The worst panel is halved until the summed error estimates fall below
/// `tol`. When `a > 0` and the range spans several octaves, the range is
/// first split geometrically so each panel has bounded relative width.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    if !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::InvalidArgument(format!(
            "invalid integration range [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_bound: 0.0,
            evaluations: 0,
        });
    }

    let mut breaks = vec![a];
    if a > 0.0 {
        let mut t = 2.0 * a;
        while t < b {
            breaks.push(t);
            t *= 2.0;
        }
    }
    breaks.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    for w in breaks.windows(2) {
        heap.push(gk15(&f, w[0], w[1]));
        evaluations += 15;
    }

    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        let worst = *heap.peek().expect("at least one panel");
        if total_err <= tol {
            let value = heap
                .iter()
                .map(|p| p.value)
                .collect::<NeumaierSum>()
                .value();
            return Ok(QuadratureResult {
                value,
                abs_error_bound: total_err,
                evaluations,
            });
        }
        if worst.exhausted || evaluations >= MAX_EVALUATIONS {
            return Err(Error::ToleranceUnachievable {
                tol,
                achieved: total_err,
                evaluations,
            });
        }
        heap.pop();
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gk15(&f, worst.a, mid));
        heap.push(gk15(&f, mid, worst.b));
        evaluations += 30;
    }
}

fn check_li_domain(x: f64, what: &'static str) -> Result<()> {
    if x.is_nan() || x < 2.0 {
        return Err(Error::BelowThreshold { what, x, min: 2.0 });
    }
    Ok(())
}

/// `Li(x) = ∫₂ˣ dt / ln t`.
pub fn li(x: f64, tol: f64) -> Result<QuadratureResult> {
    check_li_domain(x, "li")?;
    integrate(|t| 1.0 / t.ln(), 2.0, x, tol)
}

/// `∫₂ˣ dt / ln² t`.
pub fn li2(x: f64, tol: f64) -> Result<QuadratureResult> {
    check_li_domain(x, "li2")?;
    integrate(
        |t| {
            let l = t.ln();
            1.0 / (l * l)
        },
        2.0,
        x,
        tol,
    )
}

/// `Li(x)` at [`default_tol`].
pub fn li_value(x: f64) -> Result<f64> {
    li(x, default_tol(x)).map(|r| r.value)
}

/// `∫₂ˣ dt/ln² t` at [`default_tol`].
pub fn li2_value(x: f64) -> Result<f64> {
    li2(x, default_tol(x)).map(|r| r.value)
}

/// Closed form of `Li(x) − ∫₂ˣ dt/ln² t`, from the antiderivative
/// `d/dt (t / ln t) = 1/ln t − 1/ln² t`.
pub fn log_integral_difference(x: f64) -> f64 {
    x / x.ln() - 2.0 / LN_2
}

/// Sums of `1/ln i` and `1/ln² i` for `from <= i <= to`, compensated.
pub(crate) fn inv_log_sums(from: u64, to: u64) -> (f64, f64) {
    let mut s1 = NeumaierSum::new();
    let mut s2 = NeumaierSum::new();
    for i in from..=to {
        let r = 1.0 / (i as f64).ln();
        s1.add(r);
        s2.add(r * r);
    }
    (s1.value(), s2.value())
}

/// `Σ_{i=2}^{x} 1/lnᵖ i` by direct compensated summation.
pub fn partial_sum_inv_log(x: u64, p: u32) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "power p must be 1 or 2, got {p}"
        )));
    }
    if x < 3 {
        return Err(Error::BelowThreshold {
            what: "partial_sum_inv_log",
            x: x as f64,
            min: 3.0,
        });
    }
    if x >= PARTIAL_SUM_CAP {
        return Err(Error::OutOfRange {
            value: x,
            max: PARTIAL_SUM_CAP - 1,
        });
    }
    let (s1, s2) = inv_log_sums(2, x);
    Ok(if p == 1 { s1 } else { s2 })
}

/// Decreasing functions whose sum-minus-integral constant is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EmFunction {
    /// `1/ln t`
    InvLog,
    /// `1/ln² t`
    InvLogSquared,
    /// `1/ln t − 1/ln² t`, decreasing only for `t > 7`
    InvLogDifference,
}

impl EmFunction {
    pub fn from_power(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Self::InvLog),
            2 => Ok(Self::InvLogSquared),
            _ => Err(Error::InvalidArgument(format!(
                "power p must be 1 or 2, got {p}"
            ))),
        }
    }

    pub fn eval(self, t: f64) -> f64 {
        let r = 1.0 / t.ln();
        match self {
            Self::InvLog => r,
            Self::InvLogSquared => r * r,
            Self::InvLogDifference => r - r * r,
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        let r = 1.0 / t.ln();
        match self {
            Self::InvLog => -r * r / t,
            Self::InvLogSquared => -2.0 * r * r * r / t,
            Self::InvLogDifference => (-r * r + 2.0 * r * r * r) / t,
        }
    }

    /// Smallest admissible lower limit.
    pub fn min_lower_limit(self) -> f64 {
        match self {
            Self::InvLog | Self::InvLogSquared => 2.0,
            Self::InvLogDifference => 8.0,
        }
    }

    fn power(self) -> Option<u32> {
        match self {
            Self::InvLog => Some(1),
            Self::InvLogSquared => Some(2),
            Self::InvLogDifference => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmConstantEstimate {
    pub function: EmFunction,
    pub lower_limit: f64,
    pub n: u64,
    /// `Σ_{i=0}^{n} F(A+i) − ∫_A^{A+n} F` as computed.
    pub partial_difference: f64,
    /// The partial difference with the endpoint terms `F(A+n)/2 + F'(A+n)/12`
    /// removed, an estimate of the limiting constant.
    pub estimate: f64,
    /// `0.6202 / lnᵖ(p+1)` for the pure powers.
    pub bound: Option<f64>,
}

/// Estimates `C = lim (Σ_{i=0}^{n} F(A+i) − ∫_A^{A+n} F)`.
pub fn em_constant_estimate(function: EmFunction, a: f64, n: u64) -> Result<EmConstantEstimate> {
    if !a.is_finite() || a < function.min_lower_limit() {
        return Err(Error::BelowThreshold {
            what: "em_constant_estimate lower limit",
            x: a,
            min: function.min_lower_limit(),
        });
    }
    if n < 1000 {
        return Err(Error::InvalidArgument(format!(
            "truncation n must be >= 1000, got {n}"
        )));
    }
    let sum = (0..=n)
        .map(|i| function.eval(a + i as f64))
        .collect::<NeumaierSum>()
        .value();
    let end = a + n as f64;
    let integral = integrate(|t| function.eval(t), a, end, 1e-8)?.value;
    let partial_difference = sum - integral;
    let estimate = partial_difference - function.eval(end) / 2.0 - function.derivative(end) / 12.0;
    Ok(EmConstantEstimate {
        function,
        lower_limit: a,
        n,
        partial_difference,
        estimate,
        bound: function.power().map(assertion3_bound),
    })
}

/// `F(A)/2 + |F'(A)|/12` for `F = 1/lnᵖ`.
pub fn assertion2_bound(p: u32, a: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument("power p must be >= 1".into()));
    }
    if a.is_nan() || a <= 1.0 {
        return Err(Error::BelowThreshold {
            what: "assertion2_bound",
            x: a,
            min: 1.0,
        });
    }
    let l = a.ln();
    let f = l.powi(-(p as i32));
    let df = p as f64 / (a * l.powi(p as i32 + 1));
    Ok(f / 2.0 + df / 12.0)
}

/// `0.6202 / lnᵖ(p + 1)`.
pub fn assertion3_bound(p: u32) -> f64 {
    0.6202 / ((p + 1) as f64).ln().powi(p as i32)
}

/// Sum and integral of `1/ln − 1/ln²` on the short range below the
/// monotone regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortRangeDifference {
    /// `Σ_{i=2}^{7}`
    pub sum_2_to_7: f64,
    /// `Σ_{i=2}^{6}`
    pub sum_2_to_6: f64,
    /// `∫₂⁷`, from the closed form `7/ln 7 − 2/ln 2`.
    pub integral_2_to_7: f64,
}

pub fn short_range_difference() -> ShortRangeDifference {
    let term = |i: u64| EmFunction::InvLogDifference.eval(i as f64);
    ShortRangeDifference {
        sum_2_to_7: (2..=7).map(term).collect::<NeumaierSum>().value(),
        sum_2_to_6: (2..=6).map(term).collect::<NeumaierSum>().value(),
        integral_2_to_7: log_integral_difference(7.0),
    }
}

// erf(z) = 2/√π · e^{−z²} · Σ 2ⁿ z^{2n+1} / (1·3·…·(2n+1)); all terms positive.
fn erf_series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * z2 / (2.0 * n + 1.0);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    2.0 / PI.sqrt() * (-z2).exp() * sum
}

// erfc(z) for z >= 3 by the Laplace continued fraction, modified Lentz.
fn erfc_cf(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..500 {
        let an = n as f64 / 2.0;
        d = z + an * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = z + an / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}

/// `P(|Z| < c)` for standard normal `Z`, i.e. `erf(c/√2)`.
pub fn normal_module_cdf(c: f64) -> Result<f64> {
    if c.is_nan() || c < 0.0 {
        return Err(Error::InvalidArgument(format!("C must be >= 0, got {c}")));
    }
    let z = c / std::f64::consts::SQRT_2;
    Ok(if z < 3.0 {
        erf_series(z)
    } else {
        1.0 - erfc_cf(z)
    })
}

/// Smallest `C` with `normal_module_cdf(C) >= target`, by bisection.
pub fn choose_c_for_coverage(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "coverage target must lie in (0, 1), got {target}"
        )));
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if normal_module_cdf(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn li_examples() {
        let r = li(2.0, 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 0);

        let r = li(100.0, 1e-9).unwrap();
        assert!(r.abs_error_bound <= 1e-9);
        assert!((r.value - 29.081).abs() < 1e-3, "{}", r.value);

        let r = li(1e6, 1e-9).unwrap();
        assert!((r.value - 78626.50).abs() < 0.01, "{}", r.value);
    }

    #[test]
    fn li_domain_and_tolerance_errors() {
        assert!(matches!(li(1.5, 1e-9), Err(Error::BelowThreshold { .. })));
        assert!(matches!(li2(-1.0, 1e-9), Err(Error::BelowThreshold { .. })));
        assert!(matches!(li(10.0, 0.0), Err(Error::InvalidArgument(_))));
        // below f64 resolution of a value near 5e7
        assert!(matches!(
            li(1e9, 1e-12),
            Err(Error::ToleranceUnachievable { .. })
        ));
    }

    #[test]
    fn li2_examples() {
        assert_eq!(li2(2.0, 1e-9).unwrap().value, 0.0);
        let v = li2(1e6, 1e-7).unwrap().value;
        assert!((v - 6247.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn generic_integration() {
        let r = integrate(|t| t * t, 0.0, 3.0, 1e-12).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = integrate(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(integrate(|t| t, 1.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn partial_sums() {
        let v = partial_sum_inv_log(3, 1).unwrap();
        assert!((v - (1.0 / 2f64.ln() + 1.0 / 3f64.ln())).abs() < 1e-14);
        assert!((v - 2.35293).abs() < 1e-5);

        let hand: f64 = (2..=7)
            .map(|i| {
                let l = (i as f64).ln();
                1.0 / l - 1.0 / (l * l)
            })
            .sum();
        let d = partial_sum_inv_log(7, 1).unwrap() - partial_sum_inv_log(7, 2).unwrap();
        assert!((d - hand).abs() < 1e-14);
        assert!((d - 0.37575).abs() < 1e-5, "{d}");

        assert!(partial_sum_inv_log(2, 1).is_err());
        assert!(partial_sum_inv_log(10, 3).is_err());
        assert!(matches!(
            partial_sum_inv_log(PARTIAL_SUM_CAP, 1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn sum_minus_li_at_a_million() {
        let d = partial_sum_inv_log(1_000_000, 1).unwrap() - li(1e6, 1e-9).unwrap().value;
        assert!(d > 0.0 && d < 0.8948, "{d}");
    }

    #[test]
    fn em_estimates_respect_domain() {
        assert!(em_constant_estimate(EmFunction::InvLog, 1.5, 1000).is_err());
        assert!(em_constant_estimate(EmFunction::InvLog, 2.0, 999).is_err());
        assert!(em_constant_estimate(EmFunction::InvLogDifference, 7.0, 1000).is_err());
        assert!(em_constant_estimate(EmFunction::InvLogDifference, 8.0, 1000).is_ok());
        assert!(EmFunction::from_power(3).is_err());
    }

    #[test]
    fn em_derivatives_match_finite_differences() {
        for f in [
            EmFunction::InvLog,
            EmFunction::InvLogSquared,
            EmFunction::InvLogDifference,
        ] {
            for t in [2.5, 8.0, 1e3, 1e6] {
                let h = t * 1e-6;
                let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
                let d = f.derivative(t);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-12), "{f:?} at {t}");
            }
        }
    }

    #[test]
    fn assertion_bounds() {
        let v = assertion2_bound(1, 2.0).unwrap();
        let hand = 1.0 / (2.0 * LN_2) + 1.0 / (24.0 * LN_2 * LN_2);
        assert!((v - hand).abs() < 1e-15);
        assert!((v - 0.808).abs() < 1e-3);
        assert!((assertion2_bound(1, E).unwrap() - (0.5 + 1.0 / (12.0 * E))).abs() < 1e-15);
        assert!((assertion2_bound(2, E).unwrap() - (0.5 + 2.0 / (12.0 * E))).abs() < 1e-15);
        assert!(assertion2_bound(1, 1.0).is_err());

        assert!((assertion3_bound(1) - 0.8948).abs() < 1e-4);
        assert!((assertion3_bound(2) - 0.5139).abs() < 1e-4);
    }

    #[test]
    fn short_range_values() {
        let s = short_range_difference();
        assert!((s.sum_2_to_7 - 0.37575).abs() < 1e-5);
        assert!((s.sum_2_to_6 - 0.12594).abs() < 1e-5);
        assert!((s.integral_2_to_7 - 0.7119).abs() < 5e-4);
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_module_cdf(0.0).unwrap(), 0.0);
        assert!((normal_module_cdf(1.0).unwrap() - 0.682_689_492_137_086).abs() < 1e-12);
        assert!((normal_module_cdf(2.0).unwrap() - 0.954_499_736_103_642).abs() < 1e-12);
        assert!((normal_module_cdf(3.0).unwrap() - 0.997_300_203_936_740).abs() < 1e-12);
        assert!(normal_module_cdf(-0.1).is_err());
        assert_eq!(normal_module_cdf(50.0).unwrap(), 1.0);
    }

    #[test]
    fn coverage_inverse() {
        assert!((choose_c_for_coverage(0.95).unwrap() - 1.959964).abs() < 1e-5);
        assert!((choose_c_for_coverage(0.5).unwrap() - 0.674490).abs() < 1e-5);
        for t in [0.9, 0.99, 0.999] {
            let c = choose_c_for_coverage(t).unwrap();
            assert!(normal_module_cdf(c).unwrap() >= t);
        }
        assert!(choose_c_for_coverage(0.0).is_err());
        assert!(choose_c_for_coverage(1.0).is_err());
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }
}
