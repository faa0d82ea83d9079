use proptest::prelude::*;

use prime_models::analytic;
use prime_models::models::{self, ModelKind};
use prime_models::primes::{self, PrimeSieve, ProgressionClass};

fn is_prime_td(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sieve_is_independent_of_segmentation(
        lo in 2u64..50_000,
        len in 1u64..5_000,
        seg in 1usize..4_096,
    ) {
        let hi = lo + len;
        let a = PrimeSieve::with_segment_size(hi, seg).primes_between(lo, hi);
        let b = PrimeSieve::new(hi).primes_between(lo, hi);
        let td: Vec<u64> = (lo..hi).filter(|&n| is_prime_td(n)).collect();
        prop_assert_eq!(&a, &td);
        prop_assert_eq!(&b, &td);
    }

    #[test]
    fn prime_count_is_monotone(x in 0u64..200_000, d in 0u64..1_000) {
        prop_assert!(primes::prime_count(x).unwrap() <= primes::prime_count(x + d).unwrap());
    }

    #[test]
    fn class_counts_sum_to_pi(x in 100u64..100_000, k in 1u64..=50) {
        let sieve = PrimeSieve::new(x);
        let counts = sieve.residue_counts(x, k).unwrap();
        prop_assert_eq!(counts.iter().sum::<u64>(), sieve.prime_count(x).unwrap());
        // classes sharing a factor with k hold only the primes dividing k
        let non_coprime: u64 = counts
            .iter()
            .enumerate()
            .filter(|(l, _)| gcd(k, *l as u64) != 1)
            .map(|(_, &c)| c)
            .sum();
        let small = (2..=k.min(x)).filter(|&p| is_prime_td(p) && k % p == 0).count() as u64;
        prop_assert_eq!(non_coprime, small);
    }

    #[test]
    fn li_is_monotone_and_additive(x in 3.0f64..1e7, f in 1.01f64..3.0) {
        let a = analytic::li_value(x).unwrap();
        let b = analytic::li_value(x * f).unwrap();
        prop_assert!(b > a);
        let tol = analytic::default_tol(x * f);
        let piece = analytic::integrate(|t| 1.0 / t.ln(), x, x * f, tol).unwrap().value;
        prop_assert!(((a + piece) - b).abs() < 4.0 * tol);
    }

    #[test]
    fn li_difference_matches_closed_form(x in 2.0f64..1e8) {
        let tol = analytic::default_tol(x);
        let d = analytic::li(x, tol).unwrap().value - analytic::li2(x, tol).unwrap().value;
        prop_assert!((d - analytic::log_integral_difference(x)).abs() < 2.0 * tol);
    }

    #[test]
    fn coverage_function_is_monotone(c in 0.0f64..8.0, dc in 1e-6f64..1.0) {
        let a = analytic::normal_module_cdf(c).unwrap();
        let b = analytic::normal_module_cdf(c + dc).unwrap();
        prop_assert!(b >= a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn choose_c_inverts_coverage(target in 0.01f64..0.999_999) {
        let c = analytic::choose_c_for_coverage(target).unwrap();
        prop_assert!(analytic::normal_module_cdf(c).unwrap() >= target);
        prop_assert!(analytic::normal_module_cdf((c - 1e-9).max(0.0)).unwrap() <= target + 1e-12);
    }

    #[test]
    fn bands_nest_in_c(x in 1_000u64..1_000_000, c in 0.1f64..5.0, dc in 0.01f64..2.0) {
        let m = models::model_moments(ModelKind::M1, x, None).unwrap();
        let inner = models::deviation_band(&m, c).unwrap();
        let outer = models::deviation_band(&m, c + dc).unwrap();
        prop_assert!(outer.lower() <= inner.lower() && inner.upper() <= outer.upper());
        prop_assert!(outer.coverage >= inner.coverage);
    }

    #[test]
    fn variance_never_exceeds_mean(x in 1_000u64..2_000_000, k in 2u64..=12) {
        let class = ProgressionClass::new(k, 1).unwrap();
        for (model, cls) in [
            (ModelKind::M1, None),
            (ModelKind::M2, None),
            (ModelKind::M3, Some(&class)),
            (ModelKind::M4, Some(&class)),
        ] {
            let m = models::model_moments(model, x, cls).unwrap();
            prop_assert!(m.variance > 0.0 && m.variance <= m.mean, "{:?} at {}", model, x);
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn totient_sieve_matches_trial_division() {
    let table = primes::totients_up_to(2_000);
    for k in 1..=2_000u64 {
        let td = (1..=k).filter(|&l| gcd(k, l) == 1).count() as u64;
        assert_eq!(table[k as usize], td, "phi({k})");
        assert_eq!(primes::totient(k).unwrap(), td);
    }
}
