//! Admissible signal pairs: likelihood-ratio monotonicity, the density
//! crossing, and the translation that moves the crossing to the origin.

use serde::Serialize;

use crate::dist::{derivative_consistency, ExtendedReal, ScalarDistribution};
use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::scalar::brent_root;
use crate::special::log_abs_diff_exp;

/// Grid over which the likelihood ratio is checked: `[-12, 12]`, 2001 points.
pub const MLRP_GRID: GridSpec = GridSpec { lo: -12.0, hi: 12.0, n: 2001 };

/// Minimum consecutive increase of the log likelihood ratio counted as strict.
pub const MLRP_STRICTNESS: f64 = 1e-12;

/// Bracket width at which the crossing search stops.
pub const CROSSING_XTOL: f64 = 1e-12;

/// A pair already translated is accepted as normalized when its crossing
/// lies within this distance of 0.
pub const NORMALIZED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.n)
    }
}

/// Verdict of the admissibility checks for a candidate pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub well_formed: bool,
    pub smooth: bool,
    pub mlrp_ok: bool,
    pub crossing_count: usize,
    pub crossing_location: Option<f64>,
    /// Smallest finite-difference slope of `ln g1 - ln g0` on the grid.
    pub min_ratio_slope: f64,
    pub grid_used: GridSpec,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.well_formed && self.smooth && self.mlrp_ok && self.crossing_count == 1
    }
}

fn log_density_gap(g0: &ScalarDistribution, g1: &ScalarDistribution, t: f64) -> f64 {
    g0.ln_pdf(t) - g1.ln_pdf(t)
}

/// Sign changes of `ln g0 - ln g1` along the grid, as brackets. A run of
/// exact zeros between opposite signs is reported as the bracket spanning
/// the run; a gap that vanishes everywhere has no crossing.
fn crossing_brackets(g0: &ScalarDistribution, g1: &ScalarDistribution, grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    let mut zero_run: Option<(f64, f64)> = None;
    for &t in grid {
        let h = log_density_gap(g0, g1, t);
        if h == 0.0 {
            zero_run = Some(zero_run.map_or((t, t), |(a, _)| (a, t)));
            continue;
        }
        if let Some((tp, hp)) = last {
            if hp.signum() != h.signum() {
                out.push(zero_run.unwrap_or((tp, t)));
            }
        }
        zero_run = None;
        last = Some((t, h));
    }
    out
}

/// Checks that `g1 / g0` is strictly increasing on [`MLRP_GRID`] and counts
/// density crossings.
pub fn check_mlrp(g0: &ScalarDistribution, g1: &ScalarDistribution) -> AdmissibilityReport {
    let grid = MLRP_GRID.points();
    let step = (MLRP_GRID.hi - MLRP_GRID.lo) / (MLRP_GRID.n - 1) as f64;
    let ratio: Vec<f64> = grid.iter().map(|&t| g1.ln_pdf(t) - g0.ln_pdf(t)).collect();
    let mut mlrp_ok = true;
    let mut min_diff = f64::INFINITY;
    for w in ratio.windows(2) {
        let diff = w[1] - w[0];
        if !(diff > MLRP_STRICTNESS) {
            mlrp_ok = false;
        }
        min_diff = min_diff.min(diff);
    }
    let brackets = crossing_brackets(g0, g1, &grid);
    let crossing_location = match brackets.as_slice() {
        [(a, b)] => refine_crossing(g0, g1, *a, *b),
        _ => None,
    };
    AdmissibilityReport {
        well_formed: true,
        smooth: true,
        mlrp_ok,
        crossing_count: brackets.len(),
        crossing_location,
        min_ratio_slope: min_diff / step,
        grid_used: MLRP_GRID,
    }
}

fn refine_crossing(g0: &ScalarDistribution, g1: &ScalarDistribution, a: f64, b: f64) -> Option<f64> {
    if a == b {
        return Some(a);
    }
    if log_density_gap(g0, g1, a) == 0.0 {
        return Some(a);
    }
    brent_root(|t| log_density_gap(g0, g1, t), a, b, CROSSING_XTOL, 200).map(|r| r.x)
}

/// Locates `t*` with `g0(t*) = g1(t*)`: sign bracketing on [`MLRP_GRID`],
/// then Brent refinement of `ln g0 - ln g1`.
///
/// When several crossings exist the leftmost is returned.
pub fn find_crossing(g0: &ScalarDistribution, g1: &ScalarDistribution) -> Result<f64> {
    let grid = MLRP_GRID.points();
    let (a, b) = *crossing_brackets(g0, g1, &grid).first().ok_or(Error::NoCrossing)?;
    refine_crossing(g0, g1, a, b).ok_or(Error::NoCrossing)
}

/// Composite gate: well-formedness, full support, twice-smoothness,
/// likelihood-ratio monotonicity and a unique density crossing.
pub fn check_admissible(g0: &ScalarDistribution, g1: &ScalarDistribution) -> AdmissibilityReport {
    let mut report = check_mlrp(g0, g1);
    let grid = MLRP_GRID.points();
    report.well_formed = g0.check_well_formed(&grid).ok() && g1.check_well_formed(&grid).ok();
    let coarse = linspace(MLRP_GRID.lo, MLRP_GRID.hi, 401);
    report.smooth = derivative_consistency(g0, &coarse).ok && derivative_consistency(g1, &coarse).ok;
    report
}

/// `G0(t) - G1(t)` with its log-magnitude, which stays finite where the
/// value itself underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfGap {
    pub value: f64,
    pub ln_abs: f64,
    pub sign: f64,
}

impl CdfGap {
    const ZERO: CdfGap = CdfGap { value: 0.0, ln_abs: f64::NEG_INFINITY, sign: 0.0 };
}

/// An admissible pair `(G0, G1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalPair {
    g0: ScalarDistribution,
    g1: ScalarDistribution,
    shift: f64,
    normalized: bool,
}

impl SignalPair {
    /// Pair taken as given, without checks or translation. Downstream model
    /// operations reject it.
    pub fn unnormalized(g0: ScalarDistribution, g1: ScalarDistribution) -> Self {
        Self { g0, g1, shift: 0.0, normalized: false }
    }

    /// Accepts a pair whose densities already cross at 0.
    pub fn from_normalized(g0: ScalarDistribution, g1: ScalarDistribution) -> Result<Self> {
        let report = check_mlrp(&g0, &g1);
        if !report.mlrp_ok {
            return Err(Error::MlrpViolated { min_slope: report.min_ratio_slope });
        }
        let crossing = find_crossing(&g0, &g1)?;
        if crossing.abs() > NORMALIZED_TOL {
            return Err(Error::NotNormalized { crossing });
        }
        Ok(Self { g0, g1, shift: 0.0, normalized: true })
    }

    pub fn g0(&self) -> &ScalarDistribution {
        &self.g0
    }

    pub fn g1(&self) -> &ScalarDistribution {
        &self.g1
    }

    /// Translation removed during normalization (the original crossing).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `G0(t) - G1(t)`, evaluated from whichever tail keeps both terms small.
    pub fn cdf_gap(&self, t: ExtendedReal) -> CdfGap {
        let Some(t) = t.finite() else {
            return CdfGap::ZERO;
        };
        let (ln_abs, sign) = if self.g0.cdf(t) <= 0.5 {
            log_abs_diff_exp(self.g0.ln_cdf(t), self.g1.ln_cdf(t))
        } else {
            log_abs_diff_exp(self.g1.ln_sf(t), self.g0.ln_sf(t))
        };
        CdfGap { value: sign * ln_abs.exp(), ln_abs, sign }
    }
}

/// Validates the pair and translates both densities so they cross at 0.
pub fn normalize_pair(g0: &ScalarDistribution, g1: &ScalarDistribution) -> Result<SignalPair> {
    let report = check_mlrp(g0, g1);
    if !report.mlrp_ok {
        return Err(Error::MlrpViolated { min_slope: report.min_ratio_slope });
    }
    let crossing = find_crossing(g0, g1)?;
    let (n0, n1) = (g0.shifted(-crossing)?, g1.shifted(-crossing)?);
    let recheck = check_mlrp(&n0, &n1);
    if !recheck.mlrp_ok {
        return Err(Error::MlrpViolated { min_slope: recheck.min_ratio_slope });
    }
    Ok(SignalPair { g0: n0, g1: n1, shift: crossing, normalized: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(m: f64, s: f64) -> ScalarDistribution {
        ScalarDistribution::normal(m, s).unwrap()
    }

    #[test]
    fn mlrp_examples() {
        let r = check_mlrp(&normal(-1.0, 1.0), &normal(1.0, 1.0));
        assert!(r.mlrp_ok);
        // ln ratio is 2x
        assert!((r.min_ratio_slope - 2.0).abs() < 1e-9);
        assert_eq!(r.crossing_count, 1);

        assert!(!check_mlrp(&normal(0.0, 1.0), &normal(0.0, 4.0)).mlrp_ok);

        let l = ScalarDistribution::logistic(0.0, 1.0).unwrap();
        let r = check_mlrp(&l, &l);
        assert!(!r.mlrp_ok);
    }

    #[test]
    fn crossing_examples() {
        let t = find_crossing(&normal(0.0, 1.0), &normal(2.0, 1.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        let t = find_crossing(&normal(-1.0, 1.0), &normal(1.0, 1.0)).unwrap();
        assert_eq!(t, 0.0);
        let l0 = ScalarDistribution::logistic(-0.5, 1.0).unwrap();
        let l1 = ScalarDistribution::logistic(0.5, 1.0).unwrap();
        let t = find_crossing(&l0, &l1).unwrap();
        assert!(t.abs() < 1e-12);
        assert!((l0.pdf(t) - l1.pdf(t)).abs() < 1e-10);
    }

    #[test]
    fn no_crossing_is_reported() {
        assert_eq!(
            find_crossing(&normal(0.0, 1.0), &normal(0.0, 1.0)),
            Err(Error::NoCrossing)
        );
        // crossing at 20, outside the search grid
        assert_eq!(
            find_crossing(&normal(0.0, 1.0), &normal(40.0, 1.0)),
            Err(Error::NoCrossing)
        );
    }

    #[test]
    fn normalize_examples() {
        let p = normalize_pair(&normal(0.0, 1.0), &normal(2.0, 1.0)).unwrap();
        assert!((p.shift() - 1.0).abs() < 1e-12);
        assert!(p.is_normalized());
        let (m0, m1) = (p.g0().params(), p.g1().params());
        assert!((m0[0] + 1.0).abs() < 1e-12 && (m1[0] - 1.0).abs() < 1e-12);

        let p = normalize_pair(&normal(-1.0, 1.0), &normal(1.0, 1.0)).unwrap();
        assert_eq!(p.shift(), 0.0);
        assert_eq!(p.g0(), &normal(-1.0, 1.0));

        assert!(matches!(
            normalize_pair(&normal(0.0, 1.0), &normal(0.0, 4.0)),
            Err(Error::MlrpViolated { .. })
        ));
    }

    #[test]
    fn admissibility_examples() {
        assert!(check_admissible(&normal(-1.0, 1.0), &normal(1.0, 1.0)).admissible());
        let g0 = ScalarDistribution::gumbel(0.0, 1.0).unwrap();
        let g1 = ScalarDistribution::gumbel(1.0, 1.0).unwrap();
        assert!(check_admissible(&g0, &g1).admissible());
        assert!(!check_admissible(&normal(0.0, 1.0), &normal(0.0, 1.0)).admissible());
    }

    #[test]
    fn from_normalized_rejects_offset_pairs() {
        assert!(SignalPair::from_normalized(normal(-1.0, 1.0), normal(1.0, 1.0)).is_ok());
        assert!(matches!(
            SignalPair::from_normalized(normal(0.0, 1.0), normal(2.0, 1.0)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn cdf_gap_is_accurate_in_both_tails() {
        let p = normalize_pair(&normal(-1.0, 1.0), &normal(1.0, 1.0)).unwrap();
        let g = p.cdf_gap(ExtendedReal::Finite(0.0));
        assert!((g.value - 0.682_689_492_137_085_9).abs() < 1e-15);
        let up = p.cdf_gap(ExtendedReal::Finite(9.0));
        let direct = p.g1().sf(9.0) - p.g0().sf(9.0);
        assert!(((up.value - direct) / direct).abs() < 1e-12);
        assert_eq!(p.cdf_gap(ExtendedReal::PosInf).value, 0.0);

        let gp = normalize_pair(
            &ScalarDistribution::gumbel(0.0, 0.6).unwrap(),
            &ScalarDistribution::gumbel(1.0, 0.6).unwrap(),
        )
        .unwrap();
        let low = gp.cdf_gap(ExtendedReal::Finite(-8.0));
        assert_eq!(low.sign, 1.0);
        assert!(low.ln_abs.is_finite());
    }
}
