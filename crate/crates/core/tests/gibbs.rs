use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use genpoint::gauss::{gauss_measure_mass, GaussPotential};
use genpoint::gibbs::{
    gibbs_constant_estimate, gibbs_cylinder_mass, gurevich_pressure, GibbsModel, LocallyConstant, ModelOptions,
    Potential, PressureOptions,
};
use genpoint::symbolic::{walk_words, CylinderMeasure};

fn gauss(s: f64) -> Arc<dyn Potential<f64>> {
    Arc::new(GaussPotential::gauss(s).unwrap())
}

#[test]
fn letter_weights_give_a_bernoulli_measure() {
    let p = [1.0, 2.0, 3.0];
    let phi: Arc<dyn Potential<f64>> = Arc::new(LocallyConstant::log_weights(&p).unwrap());
    let m = GibbsModel::build(phi.clone(), 3, 1, &ModelOptions::default()).unwrap();
    assert!((m.pressure() - 6f64.ln()).abs() < 1e-12);
    walk_words(3, 3, |w| {
        let exact: f64 = w.iter().map(|&a| p[a as usize - 1] / 6.0).product();
        assert!((m.mass(w) - exact).abs() < 1e-12);
        true
    });
    // the periodic sums are exact at every period
    let (_, report) = gurevich_pressure(phi, 3, 1, &PressureOptions { max_period: 4, ..Default::default() }).unwrap();
    for ps in &report.periodic {
        assert!((ps.value - 6f64.ln()).abs() < 1e-12, "{ps:?}");
    }
    assert!(gibbs_cylinder_mass(&m, &[4]).is_err());
}

#[test]
fn gauss_pressure_decreases_in_s() {
    let p: Vec<f64> = [0.6, 0.8, 1.0, 1.2]
        .iter()
        .map(|&s| GibbsModel::build(gauss(s), 200, 1, &ModelOptions::default()).unwrap().pressure())
        .collect();
    assert!(p.windows(2).all(|w| w[1] < w[0]), "{p:?}");
    // depth-1 truncation at s = 1 stays within a few hundredths of zero
    assert!(p[2].abs() < 0.03, "{}", p[2]);
}

#[test]
fn gibbs_model_at_s_one_approaches_the_gauss_measure() {
    let m = GibbsModel::build(gauss(1.0), 300, 2, &ModelOptions::default()).unwrap();
    for len in 1..=2 {
        walk_words(len, 4, |w| {
            let a = gibbs_cylinder_mass(&m, w).unwrap();
            let b: f64 = gauss_measure_mass(w);
            // depth-2 blocks leave a couple of percent of distortion
            assert!((a / b - 1.0).abs() < 0.03, "{w:?}: {a} vs {b}");
            true
        });
    }
}

#[test]
fn model_is_quasi_bernoulli_with_its_constant() {
    let mut m = GibbsModel::build(gauss(1.0), 100, 2, &ModelOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sample: Vec<Vec<u32>> = (0..200).map(|i| m.sample(&mut rng, 1 + i % 12)).collect();
    let c = m.estimate_constant(&sample);
    assert!((1.0..4.0).contains(&c), "{c}");
    assert_eq!(gibbs_constant_estimate(&m, &sample), c);
    for pair in sample.chunks(2) {
        let (u, v) = (&pair[0], &pair[1]);
        let uv: Vec<u32> = u.iter().chain(v).copied().collect();
        let r = m.mass(&uv) / (m.mass(u) * m.mass(v));
        assert!(r <= c.powi(3) && r >= c.powi(-3), "{r} outside C^±3 with C = {c}");
    }
}

#[test]
fn model_text_roundtrip() {
    let phi = gauss(1.3);
    let mut m = GibbsModel::build(phi.clone(), 20, 2, &ModelOptions::default()).unwrap();
    m.estimate_constant(&[vec![1, 2, 3], vec![7]]);
    let back = GibbsModel::from_text(&m.to_text(), phi).unwrap();
    assert_eq!(back.pressure(), m.pressure());
    assert_eq!(back.gibbs_constant(), m.gibbs_constant());
    // eigenvectors are renormalized on load
    let (a, b) = (back.mass(&[3, 1, 4]), m.mass(&[3, 1, 4]));
    assert!((a / b - 1.0).abs() < 1e-12);
    assert!(GibbsModel::from_text(&m.to_text(), gauss(1.0)).is_err());
}

#[test]
fn samples_follow_the_block_masses() {
    let m = GibbsModel::build(gauss(1.0), 50, 2, &ModelOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = m.sample(&mut rng, 200_000);
    let ones = x.iter().filter(|&&a| a == 1).count() as f64 / x.len() as f64;
    assert!((ones - m.mass(&[1])).abs() < 0.01, "{ones} vs {}", m.mass(&[1]));
}
