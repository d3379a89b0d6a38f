//! Equilibrium prevalence under threshold rules and the principal's
//! accuracy payoff.
//!
//! With a positive threshold `t` the principal rewards signals above `t`.
//! An agent with cost `c` complies iff `c < r (G0(t) - G1(t))`, so the
//! complying share is `F(r (G0(t) - G1(t)))`; the negative rule flips the
//! sign of the argument.

use serde::Serialize;

use crate::dist::{ExtendedReal, ScalarDistribution};
use crate::error::{Error, Result};
use crate::signal::SignalPair;

/// A complete model instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    pair: SignalPair,
    cost: ScalarDistribution,
    reward: f64,
}

impl ModelConfig {
    /// Requires a normalized pair and a finite reward. `reward == 0` is
    /// accepted here; the genericity sweep rejects it.
    pub fn new(pair: SignalPair, cost: ScalarDistribution, reward: f64) -> Result<Self> {
        if !pair.is_normalized() {
            return Err(Error::NotNormalized { crossing: f64::NAN });
        }
        if !reward.is_finite() {
            return Err(Error::NonFiniteReward(reward));
        }
        Ok(Self { pair, cost, reward })
    }

    pub fn pair(&self) -> &SignalPair {
        &self.pair
    }

    pub fn cost(&self) -> &ScalarDistribution {
        &self.cost
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    /// Same signals and reward with a different cost distribution.
    pub fn with_cost(&self, cost: ScalarDistribution) -> Self {
        Self { pair: self.pair.clone(), cost, reward: self.reward }
    }
}

/// Prevalence under both rules at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrevalenceReport {
    pub t: ExtendedReal,
    pub pi_pos: f64,
    pub pi_neg: f64,
    /// `pi_pos - pi_neg`, resolved directly rather than by subtraction.
    pub gap: f64,
    /// `ln |pi_pos - pi_neg|`; finite wherever the gap is nonzero in exact
    /// arithmetic, even when `gap` itself underflows.
    pub ln_gap: f64,
}

/// `pi_F^+(t) = F(r (G0(t) - G1(t)))`; `F(0)` at both infinite thresholds.
pub fn prevalence_pos(m: &ModelConfig, t: ExtendedReal) -> f64 {
    m.cost.cdf(m.reward * m.pair.cdf_gap(t).value)
}

/// `pi_F^-(t) = F(r (G1(t) - G0(t)))`.
pub fn prevalence_neg(m: &ModelConfig, t: ExtendedReal) -> f64 {
    m.cost.cdf(-m.reward * m.pair.cdf_gap(t).value)
}

pub fn prevalence_report(m: &ModelConfig, t: ExtendedReal) -> PrevalenceReport {
    let d = m.pair.cdf_gap(t);
    let sign = d.sign * m.reward.signum();
    let ln_arg = m.reward.abs().ln() + d.ln_abs;
    let ln_gap = if sign == 0.0 {
        f64::NEG_INFINITY
    } else if ln_arg > -700.0 {
        let a = ln_arg.exp();
        m.cost.ln_interval_mass(-a, a)
    } else {
        // F(a) - F(-a) = 2 a f(0) to leading order once a is this small
        2f64.ln() + m.cost.ln_pdf(0.0) + ln_arg
    };
    PrevalenceReport {
        t,
        pi_pos: prevalence_pos(m, t),
        pi_neg: prevalence_neg(m, t),
        gap: sign * ln_gap.exp(),
        ln_gap,
    }
}

/// Probability that the reward matches behavior under a positive rule:
/// `pi (1 - G1(t)) + (1 - pi) G0(t)`.
///
/// At `-inf` everyone is rewarded and the payoff is `F(0)`; at `+inf` no one
/// is and it is `1 - F(0)`.
pub fn eu_pos(m: &ModelConfig, t: ExtendedReal) -> f64 {
    match t {
        ExtendedReal::NegInf => m.cost.cdf(0.0),
        ExtendedReal::PosInf => m.cost.sf(0.0),
        ExtendedReal::Finite(x) => {
            let pi = prevalence_pos(m, t);
            pi * m.pair.g1().sf(x) + (1.0 - pi) * m.pair.g0().cdf(x)
        }
    }
}

/// `d/dt pi_F^+(t) = f(r (G0 - G1)) r (g0 - g1)`.
pub fn dprevalence_pos(m: &ModelConfig, t: f64) -> f64 {
    let d = m.pair.cdf_gap(ExtendedReal::Finite(t)).value;
    let (g0, g1) = (m.pair.g0().pdf(t), m.pair.g1().pdf(t));
    m.cost.pdf(m.reward * d) * m.reward * (g0 - g1)
}

/// `d/dt EU_F^+(t) = pi' (1 - G0 - G1) - pi (g0 + g1) + g0`.
pub fn deu_pos(m: &ModelConfig, t: f64) -> f64 {
    let (g0, g1) = (m.pair.g0(), m.pair.g1());
    let pi = prevalence_pos(m, ExtendedReal::Finite(t));
    let one_minus = g0.sf(t) - g1.cdf(t);
    dprevalence_pos(m, t) * one_minus - pi * (g0.pdf(t) + g1.pdf(t)) + g0.pdf(t)
}

/// Payoff slope at the compliance-optimal threshold,
/// `(1 - 2 pi_F^+(0)) g0(0)`.
///
/// Its vanishing is necessary for the accuracy optimum to sit at 0.
pub fn foc_at_zero(m: &ModelConfig) -> f64 {
    (1.0 - 2.0 * prevalence_pos(m, ExtendedReal::Finite(0.0))) * m.pair.g0().pdf(0.0)
}
