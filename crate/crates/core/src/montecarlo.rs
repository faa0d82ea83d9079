//! Monte Carlo simulation of the Cramér urn models.
//!
//! Each trial draws one ball from every urn and counts the white ones. The
//! seed of trial `i` is `trial_seed(master_seed, i)`, so trials can run in any
//! order (or in parallel) and the report stays a pure function of the config.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic;
use crate::error::{Error, Result};
use crate::models::{self, CramerUrns, ModelKind, ModelMoments};
use crate::primes::ProgressionClass;

pub const MIN_TRIALS: u64 = 100;
pub const DEFAULT_TRIALS: u64 = 2000;
pub const DEFAULT_C_LIST: [f64; 3] = [1.0, 2.0, 3.0];
/// Largest simulated `x`; thresholds for every urn are held in memory.
pub const MAX_SIMULATED_X: u64 = 10_000_000;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output number `index + 1` for the stream starting at `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// success iff a uniform u64 falls below p · 2⁶⁴
fn threshold(p: f64) -> u64 {
    (p * 18_446_744_073_709_551_616.0) as u64
}

fn validate(model: ModelKind, x: u64, class: Option<&ProgressionClass>) -> Result<CramerUrns> {
    if !model.is_cramer() {
        return Err(Error::ModelMismatch(
            "only the Cramér models (M2, M4) are simulated",
        ));
    }
    match (model.is_progression(), class) {
        (true, None) => return Err(Error::ModelMismatch("M4 requires a progression class")),
        (false, Some(_)) => return Err(Error::ModelMismatch("M2 takes no progression class")),
        _ => {}
    }
    if x < models::VALIDITY_FLOOR {
        return Err(Error::BelowThreshold {
            what: "simulation",
            x: x as f64,
            min: models::VALIDITY_FLOOR as f64,
        });
    }
    if x > MAX_SIMULATED_X {
        return Err(Error::OutOfRange {
            value: x,
            max: MAX_SIMULATED_X,
        });
    }
    Ok(CramerUrns::new(x, class))
}

fn draw(thresholds: &[u64], seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    thresholds.iter().filter(|&&t| rng.next_u64() < t).count() as u64
}

/// One realisation of the urn count `I(x)`.
pub fn simulate_trajectory(
    model: ModelKind,
    x: u64,
    class: Option<&ProgressionClass>,
    seed: u64,
) -> Result<u64> {
    let urns = validate(model, x, class)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(urns
        .members()
        .filter(|&u| rng.next_u64() < threshold(urns.probability(u)))
        .count() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialConfig {
    pub model: ModelKind,
    pub x: u64,
    pub class: Option<ProgressionClass>,
    pub trials: u64,
    pub master_seed: u64,
    pub c_list: Vec<f64>,
}

impl TrialConfig {
    pub fn new(
        model: ModelKind,
        x: u64,
        class: Option<ProgressionClass>,
        master_seed: u64,
    ) -> Self {
        Self {
            model,
            x,
            class,
            trials: DEFAULT_TRIALS,
            master_seed,
            c_list: DEFAULT_C_LIST.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEntry {
    pub c: f64,
    /// Fraction of trials inside the model band.
    pub empirical: f64,
    /// `F(C)` under the normal approximation.
    pub expected: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub model: ModelKind,
    pub x: u64,
    pub class: Option<ProgressionClass>,
    pub trials: u64,
    pub master_seed: u64,
    pub start_index: u64,
    pub theoretical: ModelMoments,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub coverage: Vec<CoverageEntry>,
    pub z_values: ZSummary,
    /// Fraction of trials with `|z| < 1`.
    pub within_one_sigma: f64,
    #[serde(skip)]
    pub outcomes: Vec<u64>,
}

impl SimReport {
    /// Fraction of trials with `|I − mean| < C·√variance`.
    pub fn coverage_at(&self, c: f64) -> f64 {
        let half = c * self.theoretical.variance.sqrt();
        let inside = self
            .outcomes
            .iter()
            .filter(|&&v| (v as f64 - self.theoretical.mean).abs() < half)
            .count();
        inside as f64 / self.outcomes.len() as f64
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    match sorted.get(i + 1) {
        Some(&next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

pub fn run_experiment(cfg: &TrialConfig) -> Result<SimReport> {
    if cfg.trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_TRIALS} trials are required, got {}",
            cfg.trials
        )));
    }
    if let Some(c) = cfg
        .c_list
        .iter()
        .find(|c| c.is_nan() || **c <= 0.0 || c.is_infinite())
    {
        return Err(Error::InvalidArgument(format!(
            "band constants must be > 0, got {c}"
        )));
    }
    let urns = validate(cfg.model, cfg.x, cfg.class.as_ref())?;
    let theoretical = models::cramer_direct_moments(cfg.model, cfg.x, cfg.class.as_ref())?;
    let thresholds: Vec<u64> = urns
        .members()
        .map(|u| threshold(urns.probability(u)))
        .collect();

    let outcomes: Vec<u64> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| draw(&thresholds, trial_seed(cfg.master_seed, i)))
        .collect();

    let n = outcomes.len() as f64;
    let sum: u128 = outcomes.iter().map(|&v| v as u128).sum();
    let sum_sq: u128 = outcomes.iter().map(|&v| (v as u128) * (v as u128)).sum();
    let empirical_mean = sum as f64 / n;
    // exact integer centring: T·Σv² − (Σv)²
    let t = outcomes.len() as u128;
    let empirical_variance = (t * sum_sq - sum * sum) as f64 / (n * (n - 1.0));

    let sd = theoretical.variance.sqrt();
    let mut z: Vec<f64> = outcomes
        .iter()
        .map(|&v| (v as f64 - theoretical.mean) / sd)
        .collect();
    z.sort_by(f64::total_cmp);
    let within_one_sigma = z.iter().filter(|v| v.abs() < 1.0).count() as f64 / n;

    let mut report = SimReport {
        model: cfg.model,
        x: cfg.x,
        class: cfg.class,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        start_index: urns.start_index(),
        theoretical,
        empirical_mean,
        empirical_variance,
        coverage: Vec::with_capacity(cfg.c_list.len()),
        z_values: ZSummary {
            min: z[0],
            q1: quantile(&z, 0.25),
            median: quantile(&z, 0.5),
            q3: quantile(&z, 0.75),
            max: z[z.len() - 1],
        },
        within_one_sigma,
        outcomes,
    };
    for &c in &cfg.c_list {
        let entry = CoverageEntry {
            c,
            empirical: report.coverage_at(c),
            expected: analytic::normal_module_cdf(c)?,
        };
        report.coverage.push(entry);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub model: &'static str,
    pub x: u64,
    pub trials: u64,
    pub empirical: f64,
    pub expected: f64,
    /// Three binomial standard errors of the empirical fraction.
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageTable {
    pub c: f64,
    pub rows: Vec<CoverageRow>,
    pub all_pass: bool,
}

/// Empirical coverage at `c` against `F(c)` for each report, sorted by `x`.
pub fn coverage_report(reports: &[SimReport], c: f64) -> Result<CoverageTable> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument(
            "coverage_report needs at least one report".into(),
        ));
    }
    let expected = analytic::normal_module_cdf(c)?;
    let mut rows: Vec<CoverageRow> = reports
        .iter()
        .map(|r| {
            let empirical = r.coverage_at(c);
            let tolerance = 3.0 * (expected * (1.0 - expected) / r.trials as f64).sqrt();
            CoverageRow {
                model: r.model.label(),
                x: r.x,
                trials: r.trials,
                empirical,
                expected,
                tolerance,
                pass: (empirical - expected).abs() < tolerance,
            }
        })
        .collect();
    rows.sort_by_key(|r| r.x);
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(CoverageTable { c, rows, all_pass })
}
