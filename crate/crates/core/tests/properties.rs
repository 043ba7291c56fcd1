use std::sync::Arc;

use proptest::prelude::*;

use genpoint::dimension::{entropy_dimension_closed, relative_entropy_sum};
use genpoint::gauss::{basic_interval_length, fold, gauss_measure_mass, CFPoint, LogContinuant};
use genpoint::generic::{export_stream, import_stream, Caps};
use genpoint::measures::{block_entropy, markov_approximation, Bernoulli, MarkovMeasure, Mixture};
use genpoint::symbolic::{d_star, walk_words, CylinderMeasure, Digit, Finite};

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.02f64..1.0, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

fn bernoulli() -> impl Strategy<Value = Bernoulli<f64>> {
    (2usize..=4).prop_flat_map(weights).prop_map(|w| Bernoulli::new(w).unwrap())
}

fn markov() -> impl Strategy<Value = MarkovMeasure<f64>> {
    (2usize..=3)
        .prop_flat_map(|n| prop::collection::vec(weights(n), n))
        .prop_map(|rows| MarkovMeasure::order_one(&rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_star_is_a_metric(a in bernoulli(), b in markov(), c in bernoulli()) {
        let d = |x: &dyn CylinderMeasure<f64>, y: &dyn CylinderMeasure<f64>| d_star::<f64, _, _>(x, y, 5, 4).unwrap().value;
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        prop_assert!(d(&a, &a) == 0.0);
        prop_assert!(d(&a, &b) <= 1.0 + 1e-12);
    }

    #[test]
    fn mixtures_contract(a in bernoulli(), b in markov(), c in markov(), e in bernoulli(), t in 0.0f64..1.0) {
        let d = |x: &dyn CylinderMeasure<f64>, y: &dyn CylinderMeasure<f64>| d_star::<f64, _, _>(x, y, 5, 4).unwrap().value;
        let left = Mixture::new(vec![(t, Arc::new(a.clone()) as Arc<dyn CylinderMeasure<f64>>), (1.0 - t, Arc::new(c.clone()))]).unwrap();
        let right = Mixture::new(vec![(t, Arc::new(b.clone()) as Arc<dyn CylinderMeasure<f64>>), (1.0 - t, Arc::new(e.clone()))]).unwrap();
        prop_assert!(d(&left, &right) <= t * d(&a, &b) + (1.0 - t) * d(&c, &e) + 1e-12);
    }

    #[test]
    fn markov_masses_are_consistent(mu in markov(), word in prop::collection::vec(1u32..=3, 1..6)) {
        let n = mu.alphabet() as Digit;
        let word: Vec<Digit> = word.into_iter().map(|d| d.min(n)).collect();
        let m: f64 = mu.mass(&word);
        let mut ext = word.clone();
        ext.push(1);
        let mut total = 0.0;
        for a in 1..=n {
            *ext.last_mut().unwrap() = a;
            total += CylinderMeasure::<f64>::mass(&mu, &ext);
        }
        prop_assert!((total - m).abs() <= 1e-12);
        // shift invariance
        let mut pre = 0.0;
        for a in 1..=n {
            let mut w = vec![a];
            w.extend_from_slice(&word);
            pre += CylinderMeasure::<f64>::mass(&mu, &w);
        }
        prop_assert!((pre - m).abs() <= 1e-12);
    }

    #[test]
    fn markov_approximation_matches_short_cylinders(mu in markov(), j in 1usize..=4) {
        let n = mu.alphabet() as Digit;
        let mj: MarkovMeasure<f64> = markov_approximation(&mu, j, n).unwrap();
        let mut worst = 0.0f64;
        walk_words(j, n, |w| {
            let a: f64 = mj.mass(w);
            let b: f64 = mu.mass(w);
            worst = worst.max((a - b).abs());
            true
        });
        prop_assert!(worst <= 1e-12);
    }

    #[test]
    fn cross_entropy_dominates_entropy(mu in markov(), nu in bernoulli(), k in 1usize..=4) {
        let cap = 4;
        let s = relative_entropy_sum(&nu, &mu, k, cap);
        let h = block_entropy::<f64, _>(&mu, k, cap).unwrap().value / k as f64;
        match s {
            Ok(s) => prop_assert!(s.value >= h - 1e-12),
            // ν may miss a letter that μ uses
            Err(e) => prop_assert!(matches!(e, genpoint::Error::SupportMismatch(_))),
        }
    }

    #[test]
    fn closed_beta_is_a_fraction(h in 0.0f64..3.0, extra in 0.0f64..3.0) {
        let b = entropy_dimension_closed(h, h + extra).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert_eq!(entropy_dimension_closed(h, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn interval_length_matches_endpoints(word in prop::collection::vec(1u32..50, 1..12)) {
        let len: f64 = basic_interval_length(&word).unwrap();
        let a: f64 = fold(&word, 0.0);
        let b: f64 = fold(&word, 1.0);
        prop_assert!((len - (a - b).abs()).abs() <= 1e-12 * len.max(1e-300) + 1e-15);
        let p = CFPoint::from_digits(&word);
        let mut c = LogContinuant::new();
        for &d in &word {
            c.push(d);
        }
        prop_assert!((c.ln_q - p.q().ln()).abs() <= 1e-12 * c.ln_q.max(1.0));
    }

    #[test]
    fn gauss_mass_is_additive(word in prop::collection::vec(1u32..20, 1..4)) {
        let m: f64 = gauss_measure_mass(&word);
        let mut ext = word.clone();
        ext.push(1);
        let mut total = 0.0;
        for a in 1..=5000 {
            *ext.last_mut().unwrap() = a;
            total += gauss_measure_mass::<f64>(&ext);
        }
        // the missing tail is at most about m · 2/5000
        prop_assert!(total <= m * (1.0 + 1e-12) && total >= m * (1.0 - 1e-3));
    }

    #[test]
    fn caps_first_reaching_is_minimal(s in 1u128..100_000, p in 0.2f64..3.0) {
        for caps in [Caps::Identity, Caps::Log2, Caps::Power { exponent: p }] {
            // log2 caps reach s only at n = 2^(s−1)
            let s = if caps == Caps::Log2 { s % 100 + 1 } else { s };
            let n = caps.first_reaching(s).unwrap();
            prop_assert!(caps.at(n) >= s);
            prop_assert!(n == 1 || caps.at(n - 1) < s);
        }
    }

    #[test]
    fn stream_text_roundtrip(digits in prop::collection::vec(1u32..1000, 0..200)) {
        let text = export_stream("# test\n", &Finite(digits.clone()), digits.len());
        prop_assert_eq!(import_stream(&text).unwrap(), digits);
    }
}
