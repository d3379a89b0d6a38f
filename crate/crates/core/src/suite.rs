//! Reference models: the standard worked example and a catalog of
//! admissible signal pairs and cost distributions used by the acceptance
//! suite, the demo and the benchmarks.

use crate::dist::ScalarDistribution;
use crate::equilibrium::ModelConfig;
use crate::error::Result;
use crate::family::{CostFamily, ParameterBox};
use crate::signal::{normalize_pair, SignalPair};
use crate::special::std_normal_cdf;

/// Rewards exercised by the suite.
pub const REWARDS: [f64; 3] = [0.5, 1.0, 2.0];

/// `G0(0) - G1(0)` for the standard pair, `2 Phi(1) - 1`. A logistic cost
/// located here puts prevalence at 1/2 under the compliance optimum.
pub fn standard_gap() -> f64 {
    2.0 * std_normal_cdf(1.0) - 1.0
}

/// `G0 = N(-1, 1)`, `G1 = N(1, 1)`; already normalized.
pub fn standard_pair() -> SignalPair {
    normalize_pair(&normal(-1.0, 1.0), &normal(1.0, 1.0)).expect("standard pair is admissible")
}

/// Standard pair, `F = logistic(0, 1)`, `r = 1`.
pub fn standard_model() -> ModelConfig {
    ModelConfig::new(standard_pair(), logistic(0.0, 1.0), 1.0).expect("standard model is valid")
}

/// `F(. | x) = logistic(x, 1)` for `x` in [-3, 3].
pub fn logistic_location_family() -> CostFamily {
    let bounds = ParameterBox::new(vec![-3.0], vec![3.0]).expect("valid box");
    CostFamily::location(logistic(0.0, 1.0), bounds).expect("valid family")
}

/// Mixture-linear family on a two-dimensional box. Two basis members put
/// almost all their mass below [`standard_gap`] and one almost all above
/// it, so with the standard pair the FOC vanishes near the line
/// `x_1 + x_2 = 1/2`, which cuts the box transversally.
pub fn two_parameter_mixture_family() -> CostFamily {
    let basis = vec![normal(-3.0, 1.0), normal(-2.5, 0.8), normal(5.0, 1.0)];
    let bounds = ParameterBox::new(vec![0.05, 0.05], vec![0.45, 0.45]).expect("valid box");
    CostFamily::mixture_linear(basis, bounds).expect("valid family")
}

/// A family whose members are all `logistic(standard_gap(), 1)`: the index
/// is ignored and, with the standard pair and unit reward, prevalence at the
/// compliance optimum is exactly 1/2 for every member.
pub fn frozen_family() -> CostFamily {
    let f = logistic(standard_gap(), 1.0);
    let bounds = ParameterBox::new(vec![0.1], vec![0.9]).expect("valid box");
    CostFamily::mixture_linear(vec![f.clone(), f], bounds).expect("valid family")
}

/// A named signal pair before normalization.
#[derive(Debug, Clone)]
pub struct NamedPair {
    pub name: String,
    pub g0: ScalarDistribution,
    pub g1: ScalarDistribution,
}

impl NamedPair {
    pub fn normalized(&self) -> Result<SignalPair> {
        normalize_pair(&self.g0, &self.g1)
    }
}

/// Twenty admissible pairs: location shifts of normal, logistic and gumbel
/// distributions, exponential tilts of normal mixtures, and location shifts
/// of log-concave normal mixtures.
pub fn admissible_pairs() -> Vec<NamedPair> {
    let mut out = Vec::new();
    let mut push = |name: String, g0: ScalarDistribution, g1: ScalarDistribution| out.push(NamedPair { name, g0, g1 });

    for (m0, m1, s) in [(0.0, 1.0, 1.0), (0.0, 2.0, 1.0), (-1.0, 1.0, 1.0), (0.0, 1.0, 0.5), (0.0, 3.0, 1.5), (0.0, 0.5, 0.8)] {
        push(format!("normal({m0},{s})|normal({m1},{s})"), normal(m0, s), normal(m1, s));
    }
    for (m0, m1, s) in [(-0.5, 0.5, 0.5), (0.0, 1.0, 0.6), (0.0, 2.0, 0.5), (0.0, 0.8, 0.7)] {
        push(format!("logistic({m0},{s})|logistic({m1},{s})"), logistic(m0, s), logistic(m1, s));
    }
    for (m0, m1, s) in [(0.0, 1.0, 0.6), (0.0, 0.5, 0.7), (0.0, 1.0, 0.5), (0.0, 2.0, 0.6)] {
        push(format!("gumbel({m0},{s})|gumbel({m1},{s})"), gumbel(m0, s), gumbel(m1, s));
    }
    let tilted: [(&[(f64, f64, f64)], f64); 3] = [
        (&[(0.5, -1.0, 1.0), (0.5, 1.0, 1.0)], 1.0),
        (&[(0.3, -2.0, 0.8), (0.7, 1.0, 1.2)], 0.8),
        (&[(0.2, -1.5, 0.6), (0.5, 0.0, 1.0), (0.3, 2.0, 0.7)], 1.5),
    ];
    for (i, (comps, theta)) in tilted.iter().enumerate() {
        let (g0, g1) = tilted_mixture(comps, *theta);
        push(format!("tilted-mixture-{}", i + 1), g0, g1);
    }
    for (i, (comps, shift)) in [
        (&[(0.5, -0.5, 1.0), (0.5, 0.5, 1.0)][..], 1.0),
        (&[(0.4, -0.3, 0.8), (0.6, 0.6, 0.9)][..], 1.5),
        (&[(0.3, 0.0, 1.0), (0.7, 0.8, 1.1)][..], 0.7),
    ]
    .into_iter()
    .enumerate()
    {
        let g0 = normal_mixture(comps);
        let g1 = g0.shifted(shift).expect("finite shift");
        push(format!("shifted-mixture-{}", i + 1), g0, g1);
    }
    out
}

/// Five cost distributions with full support.
pub fn cost_catalog() -> Vec<(String, ScalarDistribution)> {
    let mix = ScalarDistribution::mixture(vec![(0.4, logistic(-1.0, 1.0)), (0.6, normal(1.0, 0.5))])
        .expect("valid mixture");
    vec![
        ("logistic(0,1)".into(), logistic(0.0, 1.0)),
        ("normal(0,1)".into(), normal(0.0, 1.0)),
        ("normal(0.5,2)".into(), normal(0.5, 2.0)),
        ("gumbel(0,1)".into(), gumbel(0.0, 1.0)),
        ("mixture(logistic,normal)".into(), mix),
    ]
}

/// Every (pair, cost, reward) combination of the catalog.
pub fn suite_models() -> Result<Vec<(String, ModelConfig)>> {
    let mut out = Vec::new();
    for pair in admissible_pairs() {
        let sp = pair.normalized()?;
        for (cname, cost) in cost_catalog() {
            for r in REWARDS {
                out.push((format!("{} / {} / r={}", pair.name, cname, r), ModelConfig::new(sp.clone(), cost.clone(), r)?));
            }
        }
    }
    Ok(out)
}

/// Mixture `sum w N(mu, s)` and its exponential tilt by `theta`, whose
/// likelihood ratio against the original is `exp(theta x)` up to a constant.
fn tilted_mixture(comps: &[(f64, f64, f64)], theta: f64) -> (ScalarDistribution, ScalarDistribution) {
    let g0 = normal_mixture(comps);
    let raw: Vec<f64> = comps.iter().map(|&(w, m, s)| w * (theta * m + 0.5 * theta * theta * s * s).exp()).collect();
    let total: f64 = raw.iter().sum();
    let g1 = ScalarDistribution::mixture(
        comps.iter().zip(&raw).map(|(&(_, m, s), &w)| (w / total, normal(m + theta * s * s, s))).collect(),
    )
    .expect("valid tilted mixture");
    (g0, g1)
}

fn normal_mixture(comps: &[(f64, f64, f64)]) -> ScalarDistribution {
    ScalarDistribution::mixture(comps.iter().map(|&(w, m, s)| (w, normal(m, s))).collect()).expect("valid mixture")
}

fn normal(m: f64, s: f64) -> ScalarDistribution {
    ScalarDistribution::normal(m, s).expect("positive scale")
}

fn logistic(m: f64, s: f64) -> ScalarDistribution {
    ScalarDistribution::logistic(m, s).expect("positive scale")
}

fn gumbel(m: f64, s: f64) -> ScalarDistribution {
    ScalarDistribution::gumbel(m, s).expect("positive scale")
}
