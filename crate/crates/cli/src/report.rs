//! The composite `report-all` run.

use std::time::Instant;

use prime_models::analytic::{self, EmFunction};
use prime_models::conjectures::{self, BoundStatus};
use prime_models::models::{self, ModelKind};
use prime_models::montecarlo::{self, TrialConfig};
use prime_models::primes::{self, PrimeSieve, ProgressionClass};

use crate::error::CliError;
use crate::output::{format_real, Cell, Table};
use crate::ReportArgs;

pub const DEFAULT_SEED: u64 = 20_240_101;

/// `π(10^j)` for `j = 1..=9`.
const KNOWN_PI: [(u64, u64); 9] = [
    (10, 4),
    (100, 25),
    (1_000, 168),
    (10_000, 1_229),
    (100_000, 9_592),
    (1_000_000, 78_498),
    (10_000_000, 664_579),
    (100_000_000, 5_761_455),
    (1_000_000_000, 50_847_534),
];

const C1_BOUND: f64 = 0.8948;
const C2_BOUND: f64 = 0.6783;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Reported,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Reported => "REPORTED",
        }
    }
}

struct Row {
    status: Status,
    value: Cell,
    detail: String,
}

fn row(status: Status, value: impl Into<Cell>, detail: String) -> Row {
    Row {
        status,
        value: value.into(),
        detail,
    }
}

pub fn bound_status_label(s: BoundStatus) -> &'static str {
    match s {
        BoundStatus::Holds => "PASS",
        BoundStatus::Fails => "FAIL",
        BoundStatus::NotAssertable => "NOT ASSERTABLE",
    }
}

/// `10^lo, 10^{lo + 1/steps}, …` up to `cap`.
fn log_grid(lo: f64, cap: u64, steps: u32) -> Vec<u64> {
    let top = (cap as f64).log10();
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let e = lo + i as f64 / steps as f64;
        if e > top + 1e-12 {
            break;
        }
        out.push(10f64.powf(e).round() as u64);
        i += 1;
    }
    out
}

fn decades(from: u64, cap: u64) -> Vec<u64> {
    std::iter::successors(Some(from), |&x| x.checked_mul(10))
        .take_while(|&x| x <= cap)
        .collect()
}

fn fmt(v: f64) -> String {
    format_real(v)
}

fn check_prime_counts(cap: u64) -> Result<Row, CliError> {
    let points: Vec<u64> = KNOWN_PI.iter().map(|p| p.0).filter(|&x| x <= cap).collect();
    let table = PrimeSieve::new(cap).count_table(&points, &[])?;
    let bad: Vec<u64> = KNOWN_PI
        .iter()
        .filter(|(x, _)| *x <= cap)
        .filter(|(x, want)| table.count_at(*x) != Some(*want))
        .map(|p| p.0)
        .collect();
    let last = points.last().copied().unwrap_or(10);
    Ok(row(
        Status::of(bad.is_empty()),
        table.count_at(last).unwrap_or(0),
        format!("pi(10^j) for 10^j <= {cap} against tabulated values; mismatches {bad:?}"),
    ))
}

fn check_band_reality(cap: u64) -> Result<Row, CliError> {
    let xs = decades(10_000, cap);
    let table = PrimeSieve::new(cap).count_table(&xs, &[])?;
    let mut ok = true;
    let mut max_z = 0f64;
    let mut zs = Vec::new();
    for (&x, &pi) in table.checkpoints.iter().zip(&table.counts) {
        let m = models::model_moments(ModelKind::M1, x, None)?;
        let band = models::deviation_band(&m, 3.0)?;
        let z = models::z_score(pi, &m)?;
        ok &= (pi as f64 - band.center).abs() < band.halfwidth + m.error_bound && z.abs() < 1.0;
        max_z = max_z.max(z.abs());
        zs.push(format!("{x}:{}", fmt(z)));
    }
    Ok(row(
        Status::of(ok),
        max_z,
        format!(
            "pi(x) inside Li +/- 3 sd and |z| < 1; z at {}",
            zs.join(" ")
        ),
    ))
}

fn check_variance_chain(cap: u64) -> Result<Row, CliError> {
    let mut ok = true;
    let mut n = 0;
    for x in log_grid(3.0, cap, 2) {
        let r = models::variance_chain_check(x, None)?;
        ok &= r.natural_holds;
        n += 1;
    }
    for x in decades(10_000, cap.min(1_000_000)) {
        for k in [2u64, 3, 4, 6, 10] {
            let class = ProgressionClass::new(k, 1)?;
            let r = models::variance_chain_check(x, Some(&class))?;
            ok &= r.holds();
            n += 1;
        }
    }
    Ok(row(
        Status::of(ok),
        n as u64,
        "D2 <= D1 <= Li on the half-decade grid; D4 < D3 < Li/phi(k) for k in {2,3,4,6,10}".into(),
    ))
}

fn check_closed_form(cap: u64) -> Result<Row, CliError> {
    let mut max_rel = 0f64;
    for x in log_grid(1.0, cap, 4) {
        let xf = x as f64;
        let tol = analytic::default_tol(xf);
        let d = analytic::li(xf, tol)?.value - analytic::li2(xf, tol)?.value;
        max_rel = max_rel.max((d - analytic::log_integral_difference(xf)).abs() * xf.ln() / xf);
    }
    Ok(row(
        Status::of(max_rel < 1e-6),
        max_rel,
        "max |(li - li2) - (x/ln x - 2/ln 2)| / (x/ln x); limit 1e-6".into(),
    ))
}

fn check_short_range() -> Vec<(&'static str, Row)> {
    let s = analytic::short_range_difference();
    vec![
        (
            "short-range-integral",
            row(
                Status::of((s.integral_2_to_7 - 0.7119).abs() <= 0.0005),
                s.integral_2_to_7,
                "integral of 1/ln - 1/ln^2 on [2, 7]; target 0.7119 +/- 0.0005".into(),
            ),
        ),
        (
            "short-range-sum",
            row(
                Status::Reported,
                s.sum_2_to_7,
                format!(
                    "sum over i = 2..7 is {}, over i = 2..6 is {}; reference value 0.117",
                    fmt(s.sum_2_to_7),
                    fmt(s.sum_2_to_6)
                ),
            ),
        ),
    ]
}

fn check_em_constants() -> Result<Vec<(&'static str, Row)>, CliError> {
    let c1 = analytic::em_constant_estimate(EmFunction::InvLog, 2.0, 10_000_000)?;
    let c1_prev = analytic::em_constant_estimate(EmFunction::InvLog, 2.0, 1_000_000)?;
    let c2 = analytic::em_constant_estimate(EmFunction::InvLogSquared, 2.0, 10_000_000)?;
    let drift = (c1.estimate - c1_prev.estimate).abs();
    Ok(vec![
        (
            "em-constant-c1",
            row(
                Status::of(c1.estimate > 0.0 && c1.estimate < C1_BOUND && drift < 1e-3),
                c1.estimate,
                format!(
                    "bound {C1_BOUND}; change from n = 1e6 to 1e7 is {}",
                    fmt(drift)
                ),
            ),
        ),
        (
            "em-constant-c2",
            row(
                Status::of(c2.estimate > 0.0 && c2.estimate < C2_BOUND),
                c2.estimate,
                format!(
                    "reference bound {C2_BOUND}; 0.6202/ln^2 3 = {}",
                    fmt(analytic::assertion3_bound(2))
                ),
            ),
        ),
    ])
}

fn check_coverage(cap: u64, trials: u64, seed: u64) -> Result<Row, CliError> {
    let xs: Vec<u64> = [10_000u64, 100_000]
        .into_iter()
        .filter(|&x| x <= cap)
        .collect();
    if xs.is_empty() {
        return Ok(row(
            Status::Reported,
            Cell::Empty,
            "grid cap below 1e4; skipped".into(),
        ));
    }
    let reports = xs
        .iter()
        .map(|&x| {
            let cfg = TrialConfig {
                trials,
                ..TrialConfig::new(ModelKind::M2, x, None, seed)
            };
            montecarlo::run_experiment(&cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = montecarlo::coverage_report(&reports, 2.0)?;
    let last = reports.last().expect("non-empty");
    let cov = last.coverage_at(2.0);
    let se = (last.theoretical.variance / last.trials as f64).sqrt();
    let mean_ok = (last.empirical_mean - last.theoretical.mean).abs() < 3.0 * se;
    let detail = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "x={} {} vs {} (tol {})",
                r.x,
                fmt(r.empirical),
                fmt(r.expected),
                fmt(r.tolerance)
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(row(
        Status::of(table.all_pass && (cov - 0.9545).abs() <= 0.02 && mean_ok),
        cov,
        format!("M2 coverage at C = 2, T = {trials}, seed {seed}: {detail}; mean within 3 se: {mean_ok}"),
    ))
}

fn check_legendre() -> Result<Row, CliError> {
    let s = conjectures::legendre_scan(3000)?;
    let failing = s.rows.iter().filter(|r| r.count == 0).count();
    Ok(row(
        Status::of(s.all_pass),
        s.rows.len() as u64,
        format!("prime between n^2 and (n+1)^2 for n <= 3000; {failing} failures"),
    ))
}

fn check_intervals(cap: u64) -> Result<Row, CliError> {
    if cap < 10_000 {
        return Ok(row(
            Status::Reported,
            Cell::Empty,
            "grid cap below 1e4; skipped".into(),
        ));
    }
    let top = (cap as f64).log10();
    let mut misses = Vec::new();
    for i in 0..50 {
        let x = 10f64.powf(4.0 + (top - 4.0) * i as f64 / 49.0).round() as u64;
        if !conjectures::interval_prime_check(x, 3.0)?.found {
            misses.push(x);
        }
    }
    Ok(row(
        Status::of(misses.is_empty()),
        (50 - misses.len()) as u64,
        format!("prime in (x, x + 3 sd] at 50 log-spaced x in [1e4, {cap}]; misses {misses:?}"),
    ))
}

fn check_eh_oracle() -> Result<Row, CliError> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, a) in [(1_000u64, 0.5), (10_000, 0.5), (10_000, 0.3)] {
        let rec = conjectures::eh_sum(x, a)?;
        let sieve = PrimeSieve::new(x);
        let mut direct = 0.0;
        for k in 1..=rec.k_max {
            direct += sieve.residue_max_deviation(x, k, rec.li_x)?.0;
        }
        ok &= direct == rec.sum;
        parts.push(format!("({x}, {a}): {}", fmt(rec.sum)));
    }
    Ok(row(
        Status::of(ok),
        Cell::Empty,
        format!(
            "bucketed sum equals per-modulus recount {}",
            parts.join(", ")
        ),
    ))
}

fn check_eh_ratio(cap: u64) -> Result<Vec<(&'static str, Row)>, CliError> {
    let xs = decades(100_000, cap.min(10_000_000));
    let mut ratios = Vec::new();
    let mut last = None;
    for &x in &xs {
        let rec = conjectures::eh_sum(x, 0.5)?;
        ratios.push(rec.fitted_constant(1.0));
        last = Some(rec);
    }
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let mut rows = vec![(
        "eh-ratio",
        row(
            Status::of(decreasing),
            ratios.last().copied().map_or(Cell::Empty, Cell::Real),
            format!(
                "eh_sum(x, 0.5) ln x / x at {xs:?}: {}",
                ratios.iter().map(|&r| fmt(r)).collect::<Vec<_>>().join(" ")
            ),
        ),
    )];
    let crossover = conjectures::eh_crossover(0.5, 2.0)?;
    if let Some(rec) = last {
        let r = conjectures::eh_bound_check(&rec, 2.0)?;
        let chain = conjectures::totient_sum_chain(100, r.landau_c3)?;
        rows.push((
            "eh-subchain",
            row(
                Status::of(r.subchain_holds && chain.holds),
                r.sqrt_majorant,
                format!(
                    "at x = {}: sum sqrt(Li/phi(k)) = {} <= totient majorant {}; \
                     sum_(k<=100) 1/sqrt(phi(k)) = {} <= {}",
                    rec.x,
                    fmt(r.sqrt_majorant),
                    fmt(r.totient_majorant),
                    fmt(chain.lhs),
                    fmt(chain.rhs)
                ),
            ),
        ));
        rows.push((
            "eh-full-bound",
            row(
                Status::Reported,
                Cell::opt_real(crossover),
                format!(
                    "x^0.25 > ln^2 x only above the crossover; at x = {} the bound is {}",
                    rec.x,
                    bound_status_label(r.full_bound)
                ),
            ),
        ));
    }
    Ok(rows)
}

fn check_landau() -> Result<Row, CliError> {
    let c = conjectures::landau_constant(1_000_000)?;
    Ok(row(
        Status::Reported,
        c.value,
        format!(
            "min phi(n) ln ln n / n over 3 <= n <= 1e6, attained at n = {}",
            c.argmin
        ),
    ))
}

fn check_sign(cap: u64) -> Result<Row, CliError> {
    let rows = conjectures::li_minus_pi_sign(&log_grid(2.0, cap.min(1_000_000_000), 4))?;
    let smallest = rows
        .iter()
        .map(|r| r.difference)
        .fold(f64::INFINITY, f64::min);
    Ok(row(
        Status::of(rows.iter().all(|r| r.positive)),
        smallest,
        format!(
            "Li(x) - pi(x) > 0 at {} quarter-decade points from 1e2",
            rows.len()
        ),
    ))
}

fn check_littlewood(cap: u64) -> Result<Row, CliError> {
    let xs = decades(10_000, cap);
    let vals = xs
        .iter()
        .map(|&x| conjectures::littlewood_ratio(x as f64))
        .collect::<Result<Vec<_>, _>>()?;
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    let factor = vals.first().zip(vals.last()).map_or(1.0, |(a, b)| a / b);
    Ok(row(
        Status::of(decreasing && factor >= 3.0),
        factor,
        format!(
            "ratio at {xs:?}: {}; needs strict decrease and a factor of 3",
            vals.iter().map(|&v| fmt(v)).collect::<Vec<_>>().join(" ")
        ),
    ))
}

fn check_chebyshev(cap: u64) -> Result<Row, CliError> {
    let mut ok = true;
    let mut parts = Vec::new();
    for x in decades(conjectures::CHEBYSHEV_FLOOR, cap) {
        let c = conjectures::chebyshev_bounds_check(x)?;
        ok &= c.lower_ok && c.upper_ok;
        parts.push(format!("{x}:{}", fmt(c.ratio)));
    }
    Ok(row(
        Status::of(ok),
        Cell::Empty,
        format!("0.921 < pi(x) ln x / x < 1.106 at {}", parts.join(" ")),
    ))
}

fn check_gap(cap: u64) -> Result<Row, CliError> {
    let g = conjectures::gap_bound_triple(1_000.max(cap.min(1_000_000)), 1.0, 1.0, 1.0)?;
    let holds: Vec<String> = decades(10_000, cap)
        .into_iter()
        .map(|x| {
            conjectures::gap_bound_triple(x, 1.0, 1.0, 1.0)
                .map(|t| format!("{x}:{}", t.ordering_holds))
        })
        .collect::<Result<_, _>>()?;
    Ok(row(
        Status::Reported,
        Cell::opt_real(g.threshold),
        format!(
            "ln^2 x < sd < sqrt(x) ln x with unit constants holds above the threshold; {}",
            holds.join(" ")
        ),
    ))
}

fn check_race(cap: u64) -> Result<Row, CliError> {
    let mut worst = 0f64;
    let mut parts = Vec::new();
    for x in decades(100, cap) {
        let r = conjectures::residue_race(x)?;
        if let Some(v) = r.normalized {
            worst = worst.max(v);
        }
        parts.push(format!("{x}:{}", r.difference));
    }
    Ok(row(
        Status::Reported,
        worst,
        format!(
            "|pi(x;4,1) - pi(x;4,3)| at {}; value is the largest normalized gap",
            parts.join(" ")
        ),
    ))
}

fn check_expansion(cap: u64) -> Result<Row, CliError> {
    let mut first_inside = None;
    let mut parts = Vec::new();
    for x in decades(100, cap) {
        let c = conjectures::li_expansion_constant(x as f64)?;
        if first_inside.is_none() && c > 1.0 && c < 2.0 {
            first_inside = Some(x);
        }
        parts.push(format!("{x}:{}", fmt(c)));
    }
    Ok(row(
        Status::Reported,
        Cell::opt_int(first_inside),
        format!("(Li(x) - x/ln x) ln^2 x / x at {}", parts.join(" ")),
    ))
}

fn check_primes_cap(cap: u64) -> Result<(), CliError> {
    if cap < 1_000 {
        return Err(CliError::Usage("report-all needs --x >= 1000".into()));
    }
    if cap > primes::MAX_INPUT {
        return Err(prime_models::Error::OutOfRange {
            value: cap,
            max: primes::MAX_INPUT,
        }
        .into());
    }
    Ok(())
}

/// Runs every check in a fixed order. Returns the summary and whether no
/// row failed.
pub fn report_all(args: &ReportArgs) -> Result<(Table, bool), CliError> {
    check_primes_cap(args.x)?;
    let cap = args.x;
    let mut columns = vec!["check", "status", "value", "detail"];
    if args.timings {
        columns.push("wall_ms");
    }
    let mut table = Table::new(&columns);
    let mut passed = true;

    let mut add = |name: &'static str, r: Row, ms: f64| {
        passed &= r.status != Status::Fail;
        let mut cells = vec![
            Cell::text(name),
            Cell::text(r.status.label()),
            r.value,
            Cell::Text(r.detail),
        ];
        if args.timings {
            cells.push(Cell::Real(ms));
        }
        table.push(cells);
    };

    macro_rules! single {
        ($name:expr, $e:expr) => {{
            let t = Instant::now();
            let r = $e?;
            add($name, r, t.elapsed().as_secs_f64() * 1e3);
        }};
    }
    macro_rules! multi {
        ($e:expr) => {{
            let t = Instant::now();
            let rows = $e;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            for (name, r) in rows {
                add(name, r, ms);
            }
        }};
    }

    single!("prime-count", check_prime_counts(cap));
    single!("band-reality", check_band_reality(cap));
    single!("variance-chain", check_variance_chain(cap));
    single!("closed-form-identity", check_closed_form(cap));
    multi!(check_short_range());
    multi!(check_em_constants()?);
    single!("coverage", check_coverage(cap, args.trials, args.seed));
    single!("legendre", check_legendre());
    single!("interval-prime", check_intervals(cap));
    single!("eh-oracle", check_eh_oracle());
    multi!(check_eh_ratio(cap)?);
    single!("landau-constant", check_landau());
    single!("li-minus-pi-sign", check_sign(cap));
    single!("littlewood-ratio", check_littlewood(cap));
    single!("chebyshev", check_chebyshev(cap));
    single!("gap-ordering", check_gap(cap));
    single!("residue-race", check_race(cap));
    single!("li-expansion-constant", check_expansion(cap));

    Ok((table, passed))
}
