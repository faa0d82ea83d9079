//! Predicted moments of the four urn models for prime counts.
//!
//! * M1: binomial draws with replacement over `1..=x`, success probability
//!   `1/ln x` (crude) or `Li(x)/x` (corrected).
//! * M2: Cramér urns, urn `i` white with probability `1/ln i`.
//! * M3: binomial draws over the progression `ki + l`.
//! * M4: Cramér urns over the progression, `p_u = k / (φ(k) ln u)`.
//!
//! Raw Cramér probabilities exceed 1 for the first few urns (`1/ln 2 > 1`).
//! Those urns are dropped: sums start at the first urn whose raw probability
//! is below 1, and that index is carried in [`ModelMoments::start_index`].

use std::sync::OnceLock;

use serde::Serialize;

use crate::analytic::{self, EmFunction};
use crate::error::{Error, Result};
use crate::primes::ProgressionClass;

/// Smallest `x` (or `x/k`) at which the models are evaluated.
pub const VALIDITY_FLOOR: u64 = 10;

/// Default crossover between exact sums and integral-plus-constant forms.
pub const DEFAULT_DIRECT_SUM_CAP: u64 = 10_000_000;

/// Truncation used when estimating the sum-minus-integral constants.
const EM_TRUNCATION: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SuccessProbMode {
    /// `p = 1/ln x`
    CrudeInvLog,
    /// `p = Li(x)/x`
    #[default]
    LiCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    BinomialNatural(SuccessProbMode),
    CramerNatural,
    BinomialProgression(SuccessProbMode),
    CramerProgression,
}

impl ModelKind {
    pub const M1: Self = Self::BinomialNatural(SuccessProbMode::LiCorrected);
    pub const M2: Self = Self::CramerNatural;
    pub const M3: Self = Self::BinomialProgression(SuccessProbMode::LiCorrected);
    pub const M4: Self = Self::CramerProgression;

    pub fn is_progression(self) -> bool {
        matches!(self, Self::BinomialProgression(_) | Self::CramerProgression)
    }

    pub fn is_cramer(self) -> bool {
        matches!(self, Self::CramerNatural | Self::CramerProgression)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::BinomialNatural(_) => "M1",
            Self::CramerNatural => "M2",
            Self::BinomialProgression(_) => "M3",
            Self::CramerProgression => "M4",
        }
    }
}

/// How a set of moments was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentForm {
    ClosedForm,
    /// Exact sums over the urns.
    DirectSum,
    /// Integrals plus the estimated sum-minus-integral constants.
    IntegralWithConstants,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelMoments {
    pub mean: f64,
    pub variance: f64,
    pub x: u64,
    pub model: ModelKind,
    pub class: Option<ProgressionClass>,
    pub form: MomentForm,
    /// First urn included in a Cramér sum.
    pub start_index: Option<u64>,
    /// Combined quadrature error bound on mean and variance.
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationBand {
    pub center: f64,
    pub halfwidth: f64,
    pub c: f64,
    pub coverage: f64,
}

impl DeviationBand {
    pub fn lower(&self) -> f64 {
        self.center - self.halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.center + self.halfwidth
    }

    /// `|v − center| < halfwidth`.
    pub fn contains(&self, v: f64) -> bool {
        (v - self.center).abs() < self.halfwidth
    }
}

/// Cramér urns over the members `u ≡ l (mod k)`, `u <= x`, with
/// `p_u = (k/φ(k)) / ln u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CramerUrns {
    k: u64,
    ratio: f64,
    start: u64,
    x: u64,
}

impl CramerUrns {
    pub fn new(x: u64, class: Option<&ProgressionClass>) -> Self {
        let (k, l, phi) = class.map_or((1, 0, 1), |c| (c.k(), c.l(), c.phi_k()));
        let ratio = k as f64 / phi as f64;
        // first member with ln u > ratio, i.e. raw probability below 1
        let mut start = if l == 0 { k } else { l };
        while (start as f64).ln() <= ratio {
            start += k;
        }
        Self { k, ratio, start, x }
    }

    pub fn start_index(&self) -> u64 {
        self.start
    }

    pub fn probability(&self, u: u64) -> f64 {
        (self.ratio / (u as f64).ln()).min(1.0)
    }

    pub fn members(&self) -> impl Iterator<Item = u64> {
        (self.start..=self.x).step_by(self.k as usize)
    }

    pub fn len(&self) -> usize {
        if self.start > self.x {
            0
        } else {
            ((self.x - self.start) / self.k + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact `(Σ p_u, Σ p_u (1 − p_u))`.
    pub fn moments(&self) -> (f64, f64) {
        let (s1, s2) = if self.k == 1 {
            analytic::inv_log_sums(self.start, self.x)
        } else {
            let mut s1 = analytic::NeumaierSum::new();
            let mut s2 = analytic::NeumaierSum::new();
            for u in self.members() {
                let r = 1.0 / (u as f64).ln();
                s1.add(r);
                s2.add(r * r);
            }
            (s1.value(), s2.value())
        };
        let r = self.ratio;
        (r * s1, r * s1 - r * r * s2)
    }
}

/// Estimated limits of `Σ_{i=2}^{n} 1/lnᵖ i − ∫₂ⁿ dt/lnᵖ t` for `p = 1, 2`.
pub fn sum_integral_constants() -> (f64, f64) {
    static CONSTANTS: OnceLock<(f64, f64)> = OnceLock::new();
    *CONSTANTS.get_or_init(|| {
        let c = |f| {
            analytic::em_constant_estimate(f, 2.0, EM_TRUNCATION)
                .expect("valid parameters")
                .estimate
        };
        (c(EmFunction::InvLog), c(EmFunction::InvLogSquared))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConfig {
    /// M2 moments use exact sums for `x <= direct_sum_cap`.
    pub direct_sum_cap: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            direct_sum_cap: DEFAULT_DIRECT_SUM_CAP,
        }
    }
}

struct LogIntegrals {
    li: f64,
    li2: Option<f64>,
    err: f64,
}

fn log_integrals(x: u64, need_li2: bool) -> Result<LogIntegrals> {
    let xf = x as f64;
    let tol = analytic::default_tol(xf);
    let li = analytic::li(xf, tol)?;
    let li2 = if need_li2 {
        Some(analytic::li2(xf, tol)?)
    } else {
        None
    };
    Ok(LogIntegrals {
        li: li.value,
        li2: li2.map(|r| r.value),
        err: li.abs_error_bound + li2.map_or(0.0, |r| r.abs_error_bound),
    })
}

impl ModelConfig {
    pub fn model_moments(
        &self,
        model: ModelKind,
        x: u64,
        class: Option<&ProgressionClass>,
    ) -> Result<ModelMoments> {
        match (model.is_progression(), class) {
            (true, None) => return Err(Error::ModelMismatch("M3/M4 require a progression class")),
            (false, Some(_)) => {
                return Err(Error::ModelMismatch("M1/M2 take no progression class"))
            }
            _ => {}
        }
        let k = class.map_or(1, |c| c.k());
        if x / k < VALIDITY_FLOOR {
            return Err(Error::BelowThreshold {
                what: "model_moments (x/k)",
                x: x as f64 / k as f64,
                min: VALIDITY_FLOOR as f64,
            });
        }
        let xf = x as f64;
        let lnx = xf.ln();
        let phi = class.map_or(1.0, |c| c.phi_k() as f64);
        let kf = k as f64;

        let mut out = ModelMoments {
            mean: 0.0,
            variance: 0.0,
            x,
            model,
            class: class.copied(),
            form: MomentForm::ClosedForm,
            start_index: None,
            error_bound: 0.0,
        };

        match model {
            ModelKind::BinomialNatural(SuccessProbMode::CrudeInvLog) => {
                out.mean = xf / lnx;
                out.variance = out.mean * (1.0 - 1.0 / lnx);
            }
            ModelKind::BinomialNatural(SuccessProbMode::LiCorrected) => {
                let ints = log_integrals(x, false)?;
                out.mean = ints.li;
                out.variance = ints.li - ints.li * ints.li / xf;
                out.error_bound = ints.err * (1.0 + 2.0 * ints.li / xf);
            }
            ModelKind::CramerNatural => {
                let urns = CramerUrns::new(x, None);
                out.start_index = Some(urns.start_index());
                if x <= self.direct_sum_cap {
                    let (m, v) = urns.moments();
                    out.mean = m;
                    out.variance = v;
                    out.form = MomentForm::DirectSum;
                } else {
                    let ints = log_integrals(x, true)?;
                    let li2 = ints.li2.expect("requested");
                    let (c1, c2) = sum_integral_constants();
                    // Σ_{i=2}^{x} F = ∫₂ˣ F + C + F(x)/2 + …, then drop urns below the start
                    let (mut head1, mut head2) = (0.0, 0.0);
                    for i in 2..urns.start_index() {
                        let r = 1.0 / (i as f64).ln();
                        head1 += r;
                        head2 += r * r;
                    }
                    let tail1 = 0.5 / lnx;
                    let tail2 = 0.5 / (lnx * lnx);
                    let s1 = ints.li + c1 + tail1 - head1;
                    let s2 = li2 + c2 + tail2 - head2;
                    out.mean = s1;
                    out.variance = s1 - s2;
                    out.form = MomentForm::IntegralWithConstants;
                    out.error_bound = ints.err;
                }
            }
            ModelKind::BinomialProgression(SuccessProbMode::CrudeInvLog) => {
                out.mean = xf / (phi * lnx);
                out.variance = out.mean * (1.0 - kf / (phi * lnx));
            }
            ModelKind::BinomialProgression(SuccessProbMode::LiCorrected) => {
                let ints = log_integrals(x, false)?;
                out.mean = ints.li / phi;
                out.variance = ints.li / phi - kf * ints.li * ints.li / (phi * phi * xf);
                out.error_bound = ints.err * (1.0 + 2.0 * kf * ints.li / (phi * xf)) / phi;
            }
            ModelKind::CramerProgression => {
                let ints = log_integrals(x, true)?;
                let li2 = ints.li2.expect("requested");
                out.mean = ints.li / phi;
                out.variance = ints.li / phi - kf / (phi * phi) * li2;
                out.error_bound = ints.err * (1.0 + kf / phi) / phi;
            }
        }

        if out.variance.is_nan() || out.variance <= 0.0 {
            return Err(Error::BelowThreshold {
                what: "model_moments (positive variance)",
                x: xf,
                min: f64::NAN,
            });
        }
        Ok(out)
    }

    pub fn variance_chain_check(
        &self,
        x: u64,
        class: Option<&ProgressionClass>,
    ) -> Result<VarianceChainReport> {
        let m1 = self.model_moments(ModelKind::M1, x, None)?;
        let m2 = self.model_moments(ModelKind::M2, x, None)?;
        let li = m1.mean;
        let slack = m1.error_bound + m2.error_bound;
        let natural_holds = m2.variance <= m1.variance + slack && m1.variance <= li + slack;

        let progression = match class {
            None => None,
            Some(c) => {
                let m3 = self.model_moments(ModelKind::M3, x, Some(c))?;
                let m4 = self.model_moments(ModelKind::M4, x, Some(c))?;
                let li_over_phi = li / c.phi_k() as f64;
                let slack = m3.error_bound + m4.error_bound;
                Some(ProgressionChain {
                    k: c.k(),
                    l: c.l(),
                    phi_k: c.phi_k(),
                    li_over_phi,
                    d3: m3.variance,
                    d4: m4.variance,
                    holds: m4.variance < m3.variance + slack && m3.variance < li_over_phi + slack,
                })
            }
        };

        Ok(VarianceChainReport {
            x,
            li,
            d1: m1.variance,
            d2: m2.variance,
            natural_holds,
            progression,
            slack,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProgressionChain {
    pub k: u64,
    pub l: u64,
    pub phi_k: u64,
    pub li_over_phi: f64,
    pub d3: f64,
    pub d4: f64,
    /// `D₄ < D₃ < Li(x)/φ(k)` up to quadrature slack.
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceChainReport {
    pub x: u64,
    pub li: f64,
    pub d1: f64,
    pub d2: f64,
    /// `D₂ <= D₁ <= Li(x)` up to quadrature slack.
    pub natural_holds: bool,
    pub progression: Option<ProgressionChain>,
    pub slack: f64,
}

impl VarianceChainReport {
    pub fn holds(&self) -> bool {
        self.natural_holds && self.progression.is_none_or(|p| p.holds)
    }
}

pub fn model_moments(
    model: ModelKind,
    x: u64,
    class: Option<&ProgressionClass>,
) -> Result<ModelMoments> {
    ModelConfig::default().model_moments(model, x, class)
}

pub fn variance_chain_check(
    x: u64,
    class: Option<&ProgressionClass>,
) -> Result<VarianceChainReport> {
    ModelConfig::default().variance_chain_check(x, class)
}

/// Exact moments of a Cramér model from its urn probabilities.
///
/// For M2 this is the direct-sum form of [`model_moments`]; for M4 it is the
/// sum that the integral form approximates.
pub fn cramer_direct_moments(
    model: ModelKind,
    x: u64,
    class: Option<&ProgressionClass>,
) -> Result<ModelMoments> {
    if !model.is_cramer() {
        return Err(Error::ModelMismatch(
            "direct urn moments exist only for M2/M4",
        ));
    }
    match (model.is_progression(), class) {
        (true, None) => return Err(Error::ModelMismatch("M4 requires a progression class")),
        (false, Some(_)) => return Err(Error::ModelMismatch("M2 takes no progression class")),
        _ => {}
    }
    let k = class.map_or(1, |c| c.k());
    if x / k < VALIDITY_FLOOR {
        return Err(Error::BelowThreshold {
            what: "cramer_direct_moments (x/k)",
            x: x as f64 / k as f64,
            min: VALIDITY_FLOOR as f64,
        });
    }
    let urns = CramerUrns::new(x, class);
    let (mean, variance) = urns.moments();
    Ok(ModelMoments {
        mean,
        variance,
        x,
        model,
        class: class.copied(),
        form: MomentForm::DirectSum,
        start_index: Some(urns.start_index()),
        error_bound: 0.0,
    })
}

pub fn deviation_band(moments: &ModelMoments, c: f64) -> Result<DeviationBand> {
    if c.is_nan() || c <= 0.0 || c.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "band constant C must be > 0, got {c}"
        )));
    }
    Ok(DeviationBand {
        center: moments.mean,
        halfwidth: c * moments.variance.sqrt(),
        c,
        coverage: analytic::normal_module_cdf(c)?,
    })
}

/// `(actual − mean) / √variance`.
pub fn z_score(actual: u64, moments: &ModelMoments) -> Result<f64> {
    if moments.variance.is_nan() || moments.variance <= 0.0 {
        return Err(Error::InvalidArgument(
            "z-score needs positive variance".into(),
        ));
    }
    Ok((actual as f64 - moments.mean) / moments.variance.sqrt())
}
