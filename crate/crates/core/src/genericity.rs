//! Monte Carlo estimate of how much of a cost family's parameter box makes
//! the accuracy-optimal and compliance-optimal thresholds coincide.
//!
//! Parameters are drawn uniformly over the box, so the fraction of draws
//! whose coincidence metric falls below a tolerance is an unbiased estimate
//! of the (normalized) Lebesgue measure of that tolerance band. A
//! coincidence set of measure zero shows up as fractions that shrink to zero
//! with the tolerance; for a transversal codimension-one zero set they shrink
//! linearly, i.e. with log-log slope 1.
//!
//! Sample `i` is drawn from its own ChaCha stream (`seed`, stream `i`), so
//! results do not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::ExtendedReal;
use crate::equilibrium::{foc_at_zero, ModelConfig};
use crate::error::{Error, Result};
use crate::family::{certify, CostFamily, FamilyCertificate};
use crate::optimize::{accuracy_optimal_in, SearchWindow};
use crate::signal::SignalPair;

/// Minimum slope for the measure-zero verdict.
pub const SLOPE_THRESHOLD: f64 = 0.8;

/// The smallest-tolerance fraction must fall below this for the verdict.
pub const SMALL_FRACTION: f64 = 0.01;

/// Samples needed for a run to count as reported evidence.
pub const REPORTED_MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// `|d/dt EU(0)|`: one closed-form evaluation per sample.
    FocGap,
    /// `|accuracy-optimal threshold|`: a full optimization per sample.
    ThresholdDistance,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::FocGap => "foc_gap",
            SweepMode::ThresholdDistance => "threshold_distance",
        }
    }
}

impl std::str::FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "foc_gap" => Ok(SweepMode::FocGap),
            "threshold_distance" => Ok(SweepMode::ThresholdDistance),
            other => Err(format!("unknown sweep mode {other:?}; expected foc_gap or threshold_distance")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: CostFamily,
    pub pair: SignalPair,
    pub reward: f64,
    pub n_samples: usize,
    /// Strictly descending, positive.
    pub tolerances: Vec<f64>,
    pub seed: u64,
    pub mode: SweepMode,
    pub window: SearchWindow,
    /// Run even if the family fails the responsiveness certificate.
    pub allow_uncertified: bool,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SweepSpec {
    pub fn new(family: CostFamily, pair: SignalPair, reward: f64) -> Self {
        Self {
            family,
            pair,
            reward,
            n_samples: 10_000,
            tolerances: vec![0.1, 0.01, 0.001],
            seed: 42,
            mode: SweepMode::FocGap,
            window: SearchWindow::default(),
            allow_uncertified: false,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidSweep("n_samples must be at least 1".into()));
        }
        if self.tolerances.is_empty() {
            return Err(Error::InvalidSweep("tolerance ladder is empty".into()));
        }
        if let Some(t) = self.tolerances.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::InvalidSweep(format!("tolerances must be positive and finite, got {t}")));
        }
        if self.tolerances.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::InvalidSweep("tolerances must be strictly descending".into()));
        }
        if !(self.reward > 0.0 && self.reward.is_finite()) {
            return Err(Error::NonPositiveReward(self.reward));
        }
        if !self.pair.is_normalized() {
            return Err(Error::NotNormalized { crossing: f64::NAN });
        }
        self.window.validate()
    }
}

/// Per-sample record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub x: Vec<f64>,
    pub foc_gap: f64,
    /// Present in threshold-distance mode.
    pub accuracy_t: Option<ExtendedReal>,
    /// The quantity compared against each tolerance.
    pub metric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub mode: SweepMode,
    pub seed: u64,
    pub n_samples: usize,
    pub tolerances: Vec<f64>,
    pub counts: Vec<usize>,
    pub fractions: Vec<f64>,
    /// Least-squares slope of ln(fraction) on ln(tolerance); `None` with
    /// fewer than two nonzero fractions.
    pub scaling_slope: Option<f64>,
    pub certificate: FamilyCertificate,
    #[serde(skip)]
    pub per_sample: Vec<SampleRecord>,
}

impl SweepResult {
    pub fn coincident(&self, sample: &SampleRecord, tol_index: usize) -> bool {
        sample.metric < self.tolerances[tol_index]
    }
}

/// The `i`-th parameter draw for `seed`.
pub fn sample_at(family: &CostFamily, seed: u64, i: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    family.bounds().sample(&mut rng)
}

/// `n_samples` i.i.d. uniform draws over the family's box.
pub fn sample_parameters(spec: &SweepSpec) -> Vec<Vec<f64>> {
    (0..spec.n_samples as u64).map(|i| sample_at(&spec.family, spec.seed, i)).collect()
}

fn evaluate(spec: &SweepSpec, x: Vec<f64>) -> Result<SampleRecord> {
    let cost = spec.family.instantiate(&x)?;
    let model = ModelConfig::new(spec.pair.clone(), cost, spec.reward)?;
    let foc_gap = foc_at_zero(&model);
    let (accuracy_t, metric) = match spec.mode {
        SweepMode::FocGap => (None, foc_gap.abs()),
        SweepMode::ThresholdDistance => {
            let t = accuracy_optimal_in(&model, spec.window)?.threshold;
            (Some(t), t.finite().map_or(f64::INFINITY, f64::abs))
        }
    };
    Ok(SampleRecord { x, foc_gap, accuracy_t, metric })
}

/// Fraction of sampled parameters classified coincident at each tolerance.
pub fn coincidence_fraction(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let certificate = certify(&spec.family);
    if !certificate.responsive_ok && !spec.allow_uncertified {
        return Err(Error::CertificateMissing);
    }

    let run = || -> Result<Vec<SampleRecord>> {
        (0..spec.n_samples as u64)
            .into_par_iter()
            .map(|i| evaluate(spec, sample_at(&spec.family, spec.seed, i)))
            .collect()
    };
    let per_sample = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let metrics: Vec<f64> = per_sample.iter().map(|s| s.metric).collect();
    let counts = count_below(&metrics, &spec.tolerances);
    let fractions = to_fractions(&counts, metrics.len());
    Ok(SweepResult {
        mode: spec.mode,
        seed: spec.seed,
        n_samples: spec.n_samples,
        tolerances: spec.tolerances.clone(),
        scaling_slope: fit_slope(&spec.tolerances, &fractions),
        counts,
        fractions,
        certificate,
        per_sample,
    })
}

fn count_below(metrics: &[f64], tolerances: &[f64]) -> Vec<usize> {
    tolerances.iter().map(|&tau| metrics.iter().filter(|&&m| m < tau).count()).collect()
}

fn to_fractions(counts: &[usize], n: usize) -> Vec<f64> {
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// Least-squares slope of ln(fraction) against ln(tolerance) over the
/// nonzero fractions.
pub fn fit_slope(tolerances: &[f64], fractions: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = tolerances
        .iter()
        .zip(fractions)
        .filter(|(_, f)| **f > 0.0)
        .map(|(t, f)| (t.ln(), f.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithMeasureZero,
    Inconsistent,
    /// Fewer than two nonzero fractions; no slope can be fitted.
    DegenerateFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub slope: Option<f64>,
    /// Bootstrap 95% percentile interval of the slope.
    pub slope_ci: Option<(f64, f64)>,
    pub bootstrap_resamples: usize,
    pub smallest_tolerance_fraction: f64,
    pub verdict: Verdict,
    pub statement: String,
}

/// Slope, bootstrap interval and verdict for a finished sweep.
pub fn scaling_report(res: &SweepResult, resamples: usize) -> ScalingReport {
    let smallest = *res.fractions.last().unwrap_or(&0.0);
    let metrics: Vec<f64> = res.per_sample.iter().map(|s| s.metric).collect();
    let slope_ci = bootstrap_slope(&metrics, &res.tolerances, resamples, res.seed);
    let verdict = match res.scaling_slope {
        None => Verdict::DegenerateFit,
        Some(s) if s >= SLOPE_THRESHOLD && smallest < SMALL_FRACTION => Verdict::ConsistentWithMeasureZero,
        Some(_) => Verdict::Inconsistent,
    };
    let statement = match (verdict, res.scaling_slope) {
        (Verdict::ConsistentWithMeasureZero, Some(s)) => format!(
            "consistent with measure zero: coincidence fraction scales as tolerance^{s:.3} and is {smallest} at the smallest tolerance"
        ),
        (Verdict::Inconsistent, Some(s)) => format!(
            "inconsistent with measure zero: slope {s:.3} (need >= {SLOPE_THRESHOLD}), smallest-tolerance fraction {smallest} (need < {SMALL_FRACTION})"
        ),
        _ => "degenerate fit: fewer than two tolerances have coincident samples".to_string(),
    };
    ScalingReport {
        slope: res.scaling_slope,
        slope_ci,
        bootstrap_resamples: resamples,
        smallest_tolerance_fraction: smallest,
        verdict,
        statement,
    }
}

fn bootstrap_slope(metrics: &[f64], tolerances: &[f64], resamples: usize, seed: u64) -> Option<(f64, f64)> {
    if metrics.is_empty() || resamples == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb007_57a9);
    let n = metrics.len();
    let mut slopes: Vec<f64> = (0..resamples)
        .filter_map(|_| {
            let draw: Vec<f64> = (0..n).map(|_| metrics[rng.random_range(0..n)]).collect();
            fit_slope(tolerances, &to_fractions(&count_below(&draw, tolerances), n))
        })
        .collect();
    if slopes.is_empty() {
        return None;
    }
    slopes.sort_by(f64::total_cmp);
    let at = |q: f64| slopes[((slopes.len() - 1) as f64 * q).round() as usize];
    Some((at(0.025), at(0.975)))
}
