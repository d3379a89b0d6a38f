//! Checks against reference values computed independently of the library:
//! a Taylor-series error function written here, and constants frozen from a
//! 40-digit evaluation of the closed forms.

use threshold_lab::special::{std_normal_cdf, std_normal_pdf};
use threshold_lab::suite::{standard_gap, standard_model, standard_pair};
use threshold_lab::{
    accuracy_optimal, eu_pos, equivalence_test, find_crossing, foc_at_zero, prevalence_neg, prevalence_pos,
    ExtendedReal, ModelConfig, ScalarDistribution,
};

const PHI_1: f64 = 0.841_344_746_068_542_948_6;
const DENSITY_0: f64 = 0.398_942_280_401_432_677_9;
const DENSITY_1: f64 = 0.241_970_724_519_143_349_8;
const GAP: f64 = 0.682_689_492_137_085_897_2;
const PI_POS_0: f64 = 0.664_338_699_596_449_2;
const PI_NEG_0: f64 = 0.335_661_300_403_550_8;
const FOC: f64 = -0.079_530_308_415_773_35;
const T_ACC: f64 = -0.307_957_580_742_166_76;

/// erf by its Maclaurin series, summed until terms vanish.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1;
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

fn phi_series(z: f64) -> f64 {
    0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2))
}

#[test]
fn normal_cdf_agrees_with_series_oracle() {
    for i in -30..=30 {
        let z = i as f64 * 0.1;
        let want = phi_series(z);
        assert!((std_normal_cdf(z) - want).abs() < 5e-15, "z={z}");
    }
    assert!((phi_series(1.0) - PHI_1).abs() < 1e-15);
}

#[test]
fn frozen_constants() {
    assert!((std_normal_cdf(1.0) - PHI_1).abs() < 4e-16);
    assert!((std_normal_pdf(0.0) - DENSITY_0).abs() < 4e-16);
    assert!((std_normal_pdf(1.0) - DENSITY_1).abs() < 4e-16);
    assert!((standard_gap() - GAP).abs() < 1e-15);
    let n = ScalarDistribution::normal(-1.0, 1.0).unwrap();
    assert!((n.cdf(0.0) - PHI_1).abs() < 4e-16);
    let mix = ScalarDistribution::mixture(vec![
        (0.5, ScalarDistribution::normal(-1.0, 1.0).unwrap()),
        (0.5, ScalarDistribution::normal(1.0, 1.0).unwrap()),
    ])
    .unwrap();
    assert!((mix.pdf(0.0) - DENSITY_1).abs() < 4e-16);
    let std = ScalarDistribution::normal(0.0, 1.0).unwrap();
    assert!((std.pdf_prime(1.0) + DENSITY_1).abs() < 4e-16);
}

#[test]
fn worked_example() {
    let m = standard_model();
    let zero = ExtendedReal::Finite(0.0);
    assert!((prevalence_pos(&m, zero) - PI_POS_0).abs() < 1e-15);
    assert!((prevalence_neg(&m, zero) - PI_NEG_0).abs() < 1e-15);
    assert!((eu_pos(&m, zero) - PHI_1).abs() < 1e-15);
    assert!((foc_at_zero(&m) - FOC).abs() < 1e-15);
    assert!((FOC - (1.0 - 2.0 * PI_POS_0) * DENSITY_1).abs() < 4e-16);
    let t = accuracy_optimal(&m).threshold.finite().unwrap();
    assert!((t - T_ACC).abs() < 1e-10);
    assert!(!equivalence_test(&m, 1e-6).unwrap().equivalent);
}

#[test]
fn crossing_of_unequal_means() {
    let t = find_crossing(
        &ScalarDistribution::normal(0.0, 1.0).unwrap(),
        &ScalarDistribution::normal(2.0, 1.0).unwrap(),
    )
    .unwrap();
    assert!((t - 1.0).abs() < 1e-12);
}

#[test]
fn logistic_cost_at_the_gap_zeroes_the_foc() {
    let m = ModelConfig::new(standard_pair(), ScalarDistribution::logistic(GAP, 1.0).unwrap(), 1.0).unwrap();
    assert!(foc_at_zero(&m).abs() < 4e-16);
    // closed form for logistic(0.7, 1): (1 - 2 sigmoid(GAP - 0.7)) phi(1)
    let off = m.with_cost(ScalarDistribution::logistic(0.7, 1.0).unwrap());
    let want = (1.0 - 2.0 / (1.0 + (0.7 - GAP).exp())) * DENSITY_1;
    assert!((foc_at_zero(&off) - want).abs() < 4e-16);
    assert!((foc_at_zero(&off) - 0.002_094_265_768_748_858).abs() < 1e-15);
}
