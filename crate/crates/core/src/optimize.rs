//! Compliance-optimal and accuracy-optimal thresholds.
//!
//! The compliance optimum is 0 in closed form for any normalized admissible
//! pair and positive reward; it is still checked against a grid. The
//! accuracy payoff carries no concavity guarantee, so its maximizer is found
//! by global grid search, golden-section refinement of the leading grid-local
//! maxima, and a final Brent solve of the first-order condition when the
//! refined bracket straddles a sign change of the payoff slope.

use serde::Serialize;

use crate::dist::ExtendedReal;
use crate::equilibrium::{deu_pos, eu_pos, foc_at_zero, prevalence_pos, ModelConfig};
use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::scalar::{brent_root, golden_section_max, Bracketed};

/// Slack allowed to grid points in the compliance guardrail.
pub const GUARDRAIL_TOL: f64 = 1e-9;

/// Final bracket width of the interior refinement.
pub const REFINE_XTOL: f64 = 1e-10;

/// Bracket width at which golden section hands over to the slope root solve.
const GOLDEN_HANDOFF: f64 = 1e-6;

/// Grid-local maxima refined by the accuracy search.
const MAX_CANDIDATES: usize = 8;

/// Finite search grid; the infinite thresholds are always added.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchWindow {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for SearchWindow {
    fn default() -> Self {
        Self { lo: -10.0, hi: 10.0, n: 401 }
    }
}

impl SearchWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidWindow(format!("need finite lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.n < 3 {
            return Err(Error::InvalidWindow(format!("need at least 3 points, got {}", self.n)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptMethod {
    ClosedForm,
    GridRefine,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptResult {
    pub threshold: ExtendedReal,
    pub value: f64,
    pub method: OptMethod,
    pub iterations: usize,
    pub bracket_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub compliance_t: ExtendedReal,
    pub accuracy_t: ExtendedReal,
    /// `|accuracy_t - compliance_t|`, infinite for a null accuracy rule.
    pub distance: f64,
    /// Payoff slope at 0; must vanish when the two optima coincide.
    pub foc_gap: f64,
    pub tolerance: f64,
    pub equivalent: bool,
}

/// Threshold maximizing prevalence: 0, checked on the default window.
pub fn compliance_optimal(m: &ModelConfig) -> Result<OptResult> {
    compliance_optimal_in(m, SearchWindow::default())
}

pub fn compliance_optimal_in(m: &ModelConfig, window: SearchWindow) -> Result<OptResult> {
    window.validate()?;
    if !(m.reward() > 0.0) {
        return Err(Error::NonPositiveReward(m.reward()));
    }
    let at_zero = prevalence_pos(m, ExtendedReal::Finite(0.0));
    let candidates = window
        .points()
        .into_iter()
        .map(ExtendedReal::Finite)
        .chain([ExtendedReal::NegInf, ExtendedReal::PosInf]);
    for t in candidates {
        let p = prevalence_pos(m, t);
        if p > at_zero + GUARDRAIL_TOL {
            return Err(Error::VerificationFailed(format!(
                "prevalence {p} at t = {t} exceeds {at_zero} at t = 0"
            )));
        }
    }
    Ok(OptResult {
        threshold: ExtendedReal::Finite(0.0),
        value: at_zero,
        method: OptMethod::ClosedForm,
        iterations: 0,
        bracket_width: 0.0,
    })
}

/// Maximizer of the accuracy payoff over the extended reals, default window.
pub fn accuracy_optimal(m: &ModelConfig) -> OptResult {
    accuracy_optimal_in(m, SearchWindow::default()).expect("default window is valid")
}

pub fn accuracy_optimal_in(m: &ModelConfig, window: SearchWindow) -> Result<OptResult> {
    window.validate()?;
    let grid = window.points();
    let values: Vec<f64> = grid.iter().map(|&t| eu_pos(m, t.into())).collect();
    let objective = |t: f64| eu_pos(m, t.into());

    // A peak narrower than the grid can sit below a higher grid point and
    // still win once refined, so every leading grid-local maximum is refined.
    let mut iterations = 0;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in grid_local_maxima(&values, MAX_CANDIDATES) {
        let (a, b) = (grid[i.saturating_sub(1)], grid[(i + 1).min(grid.len() - 1)]);
        let cell = refine_cell(m, a, b);
        iterations += cell.iterations;
        let v = objective(cell.x);
        let wins = match best {
            None => true,
            Some((x, bv, _)) => v > bv || (v == bv && cell.x < x),
        };
        if wins {
            best = Some((cell.x, v, cell.width));
        }
    }
    let (interior, interior_value, width) = best.expect("a nonempty grid has a local maximum");

    let lower = eu_pos(m, ExtendedReal::NegInf);
    let upper = eu_pos(m, ExtendedReal::PosInf);
    let result = if interior_value >= lower.max(upper) {
        OptResult {
            threshold: ExtendedReal::Finite(interior),
            value: interior_value,
            method: OptMethod::GridRefine,
            iterations,
            bracket_width: width,
        }
    } else {
        let threshold = if lower >= upper { ExtendedReal::NegInf } else { ExtendedReal::PosInf };
        OptResult {
            threshold,
            value: eu_pos(m, threshold),
            method: OptMethod::Boundary,
            iterations,
            bracket_width: 0.0,
        }
    };
    Ok(result)
}

/// Indices of grid-local maxima, best first (ties by index), at most `limit`.
/// On a plateau only its first point counts, so the index-ordered global
/// argmax always leads.
fn grid_local_maxima(values: &[f64], limit: usize) -> Vec<usize> {
    let n = values.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || values[i] > values[i - 1]) && (i + 1 == n || values[i] >= values[i + 1]))
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks.truncate(limit);
    peaks
}

/// Maximizer of the payoff on the grid cell `[a, b]`: golden section down to
/// a short bracket, then a root of the payoff slope.
fn refine_cell(m: &ModelConfig, a: f64, b: f64) -> Bracketed {
    let objective = |t: f64| eu_pos(m, t.into());
    let slope = |t: f64| deu_pos(m, t);
    let coarse = golden_section_max(objective, a, b, GOLDEN_HANDOFF, 200);
    // On a flat payoff, rounding in the objective can leave the golden
    // bracket just beside the slope root, so widen it until the slope flips.
    let mut half = coarse.width.max(GOLDEN_HANDOFF);
    let (lo, hi, root) = loop {
        let (lo, hi) = ((coarse.x - half).max(a), (coarse.x + half).min(b));
        if slope(lo) > 0.0 && slope(hi) < 0.0 {
            break (lo, hi, brent_root(slope, lo, hi, REFINE_XTOL * 0.1, 200));
        }
        if lo == a && hi == b {
            let (lo, hi) = ((coarse.x - coarse.width).max(a), (coarse.x + coarse.width).min(b));
            break (lo, hi, None);
        }
        half *= 4.0;
    };
    let mut fine = root.unwrap_or_else(|| golden_section_max(objective, lo, hi, REFINE_XTOL, 400));
    fine.iterations += coarse.iterations;
    fine
}

/// Whether the accuracy optimum coincides with the compliance optimum (0)
/// to within `tol`.
pub fn equivalence_test(m: &ModelConfig, tol: f64) -> Result<EquivalenceVerdict> {
    equivalence_test_in(m, tol, SearchWindow::default())
}

pub fn equivalence_test_in(m: &ModelConfig, tol: f64, window: SearchWindow) -> Result<EquivalenceVerdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be positive, got {tol}") });
    }
    let compliance = compliance_optimal_in(m, window)?;
    let accuracy = accuracy_optimal_in(m, window)?;
    let distance = match accuracy.threshold {
        ExtendedReal::Finite(t) => t.abs(),
        _ => f64::INFINITY,
    };
    Ok(EquivalenceVerdict {
        compliance_t: compliance.threshold,
        accuracy_t: accuracy.threshold,
        distance,
        foc_gap: foc_at_zero(m),
        tolerance: tol,
        equivalent: distance < tol,
    })
}
