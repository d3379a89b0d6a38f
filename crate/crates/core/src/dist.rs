//! Univariate distributions with full support on the real line.
//!
//! Every distribution in the catalog has a closed-form CDF, density and
//! density slope, so all model quantities reduce to direct evaluations.
//! The tail-sensitive quantities (`ln_cdf`, `ln_sf`, `sf`) are evaluated
//! without forming `1 - cdf`, which keeps differences of CDFs meaningful far
//! out in the tails.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::special::{self, log_sum_exp, softplus, LN_SQRT_2PI};

/// Positive floor applied to densities so likelihood ratios never divide by zero.
pub const PDF_FLOOR: f64 = 1e-300;

/// Tolerance on the mixture-weight sum.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Step used by the centered finite-difference self-checks.
pub const FD_STEP: f64 = 1e-4;

/// Allowed |pdf - dCDF/dt| in the self-check.
pub const PDF_FD_TOL: f64 = 1e-6;

/// Allowed |pdf' - dpdf/dt| in the self-check.
pub const SLOPE_FD_TOL: f64 = 1e-5;

/// A point of the extended real line.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    /// Maps `±inf` to the infinite tags; `None` for NaN.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtendedReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtendedReal::NegInf)
        } else {
            Some(ExtendedReal::Finite(x))
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    fn rank(self) -> u8 {
        match self {
            ExtendedReal::NegInf => 0,
            ExtendedReal::Finite(_) => 1,
            ExtendedReal::PosInf => 2,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x).expect("NaN is not a point of the extended real line")
    }
}

impl PartialEq for ExtendedReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => f.write_str("-inf"),
            ExtendedReal::PosInf => f.write_str("+inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "-inf" | "-infinity" => Ok(ExtendedReal::NegInf),
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtendedReal::PosInf),
            other => other
                .parse::<f64>()
                .ok()
                .and_then(ExtendedReal::from_f64)
                .ok_or_else(|| format!("not an extended real: {other:?}")),
        }
    }
}

/// Finite values serialize as numbers, infinite ones as `"-inf"` / `"+inf"`.
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => serializer.serialize_f64(*x),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

/// Catalog of supported distribution kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistributionKind {
    Normal,
    Logistic,
    Gumbel,
    Mixture,
}

impl DistributionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistributionKind::Normal => "normal",
            DistributionKind::Logistic => "logistic",
            DistributionKind::Gumbel => "gumbel",
            DistributionKind::Mixture => "mixture",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" | "gaussian" => Ok(DistributionKind::Normal),
            "logistic" => Ok(DistributionKind::Logistic),
            "gumbel" => Ok(DistributionKind::Gumbel),
            "mixture" => Ok(DistributionKind::Mixture),
            "uniform" | "beta" | "exponential" | "gamma" | "lognormal" | "weibull"
            | "triangular" | "pareto" | "chi_squared" => Err(Error::BoundedSupport(s.to_string())),
            other => Err(Error::InvalidParameter {
                name: "kind",
                reason: format!("unknown distribution kind {other:?}"),
            }),
        }
    }
}

/// Evaluation interface used by the derivative self-checks.
pub trait Density {
    fn cdf(&self, t: f64) -> f64;
    fn pdf(&self, t: f64) -> f64;
    fn pdf_prime(&self, t: f64) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Normal { mean: f64, sd: f64 },
    Logistic { location: f64, scale: f64 },
    Gumbel { location: f64, scale: f64 },
    Mixture(Vec<(f64, ScalarDistribution)>),
}

/// A validated, immutable univariate distribution on the real line.
///
/// Gumbel is the maximum-type law, `F(t) = exp(-exp(-(t - location) / scale))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDistribution {
    repr: Repr,
}

fn check_location(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

fn check_scale(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("scale must be positive and finite, got {value}"),
        })
    }
}

impl ScalarDistribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        check_location("mean", mean)?;
        check_scale("sd", sd)?;
        Ok(Self {
            repr: Repr::Normal { mean, sd },
        })
    }

    pub fn logistic(location: f64, scale: f64) -> Result<Self> {
        check_location("location", location)?;
        check_scale("scale", scale)?;
        Ok(Self {
            repr: Repr::Logistic { location, scale },
        })
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self> {
        check_location("location", location)?;
        check_scale("scale", scale)?;
        Ok(Self {
            repr: Repr::Gumbel { location, scale },
        })
    }

    /// Finite mixture; weights must be strictly positive and sum to one.
    pub fn mixture(components: Vec<(f64, ScalarDistribution)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for (index, (weight, _)) in components.iter().enumerate() {
            if !(weight.is_finite() && *weight > 0.0) {
                return Err(Error::NonPositiveWeight {
                    index,
                    weight: *weight,
                });
            }
        }
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Self {
            repr: Repr::Mixture(components),
        })
    }

    pub fn kind(&self) -> DistributionKind {
        match self.repr {
            Repr::Normal { .. } => DistributionKind::Normal,
            Repr::Logistic { .. } => DistributionKind::Logistic,
            Repr::Gumbel { .. } => DistributionKind::Gumbel,
            Repr::Mixture(_) => DistributionKind::Mixture,
        }
    }

    /// `[location, scale]` for the parametric kinds; empty for mixtures.
    pub fn params(&self) -> Vec<f64> {
        match self.repr {
            Repr::Normal { mean, sd } => vec![mean, sd],
            Repr::Logistic { location, scale } | Repr::Gumbel { location, scale } => {
                vec![location, scale]
            }
            Repr::Mixture(_) => Vec::new(),
        }
    }

    pub fn components(&self) -> Option<&[(f64, ScalarDistribution)]> {
        match &self.repr {
            Repr::Mixture(c) => Some(c),
            _ => None,
        }
    }

    /// Law of `shift + scale * X`.
    pub fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        check_location("shift", shift)?;
        check_scale("scale", scale)?;
        let repr = match &self.repr {
            Repr::Normal { mean, sd } => Repr::Normal {
                mean: shift + scale * mean,
                sd: scale * sd,
            },
            Repr::Logistic { location, scale: s } => Repr::Logistic {
                location: shift + scale * location,
                scale: scale * s,
            },
            Repr::Gumbel { location, scale: s } => Repr::Gumbel {
                location: shift + scale * location,
                scale: scale * s,
            },
            Repr::Mixture(c) => Repr::Mixture(
                c.iter()
                    .map(|(w, d)| Ok((*w, d.affine(shift, scale)?)))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Self { repr })
    }

    /// Law of `X + delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        self.affine(delta, 1.0)
    }

    /// Smallest scale parameter among all (nested) components.
    pub fn min_scale(&self) -> f64 {
        match &self.repr {
            Repr::Normal { sd, .. } => *sd,
            Repr::Logistic { scale, .. } | Repr::Gumbel { scale, .. } => *scale,
            Repr::Mixture(c) => c
                .iter()
                .map(|(_, d)| d.min_scale())
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => special::std_normal_cdf((t - mean) / sd),
            Repr::Logistic { location, scale } => {
                let z = (t - location) / scale;
                1.0 / (1.0 + (-z).exp())
            }
            Repr::Gumbel { location, scale } => {
                let z = (t - location) / scale;
                (-(-z).exp()).exp()
            }
            Repr::Mixture(c) => c.iter().map(|(w, d)| w * d.cdf(t)).sum(),
        }
    }

    /// Survival function `1 - F(t)`, computed without cancellation.
    pub fn sf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => special::std_normal_sf((t - mean) / sd),
            Repr::Logistic { location, scale } => {
                let z = (t - location) / scale;
                1.0 / (1.0 + z.exp())
            }
            Repr::Gumbel { location, scale } => {
                let z = (t - location) / scale;
                -(-(-z).exp()).exp_m1()
            }
            Repr::Mixture(c) => c.iter().map(|(w, d)| w * d.sf(t)).sum(),
        }
    }

    pub fn ln_cdf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => special::std_normal_ln_cdf((t - mean) / sd),
            Repr::Logistic { location, scale } => -softplus(-(t - location) / scale),
            Repr::Gumbel { location, scale } => -(-(t - location) / scale).exp(),
            Repr::Mixture(c) => log_sum_exp(c.iter().map(|(w, d)| w.ln() + d.ln_cdf(t))),
        }
    }

    pub fn ln_sf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => special::std_normal_ln_cdf(-(t - mean) / sd),
            Repr::Logistic { location, scale } => -softplus((t - location) / scale),
            Repr::Gumbel { location, scale } => {
                let e = (-(t - location) / scale).exp();
                (-(-e).exp_m1()).ln()
            }
            Repr::Mixture(c) => log_sum_exp(c.iter().map(|(w, d)| w.ln() + d.ln_sf(t))),
        }
    }

    /// CDF on the extended real line: 0 at `-inf`, 1 at `+inf`.
    pub fn cdf_ext(&self, t: ExtendedReal) -> f64 {
        match t {
            ExtendedReal::NegInf => 0.0,
            ExtendedReal::PosInf => 1.0,
            ExtendedReal::Finite(x) => self.cdf(x),
        }
    }

    /// Density, floored at [`PDF_FLOOR`].
    pub fn pdf(&self, t: f64) -> f64 {
        self.raw_pdf(t).max(PDF_FLOOR)
    }

    fn raw_pdf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => special::std_normal_pdf((t - mean) / sd) / sd,
            Repr::Logistic { location, scale } => {
                let e = (-((t - location) / scale).abs()).exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Repr::Gumbel { location, scale } => {
                let z = (t - location) / scale;
                (-z - (-z).exp()).exp() / scale
            }
            Repr::Mixture(c) => c.iter().map(|(w, d)| w * d.raw_pdf(t)).sum(),
        }
    }

    /// Log-density, exact (no floor) for every kind.
    pub fn ln_pdf(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => {
                let z = (t - mean) / sd;
                -0.5 * z * z - LN_SQRT_2PI - sd.ln()
            }
            Repr::Logistic { location, scale } => {
                let a = ((t - location) / scale).abs();
                -a - 2.0 * (-a).exp().ln_1p() - scale.ln()
            }
            Repr::Gumbel { location, scale } => {
                let z = (t - location) / scale;
                -z - (-z).exp() - scale.ln()
            }
            Repr::Mixture(c) => log_sum_exp(c.iter().map(|(w, d)| w.ln() + d.ln_pdf(t))),
        }
    }

    pub fn pdf_prime(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Normal { mean, sd } => {
                let z = (t - mean) / sd;
                -z * special::std_normal_pdf(z) / (sd * sd)
            }
            Repr::Logistic { location, scale } => {
                let z = (t - location) / scale;
                -self.raw_pdf(t) * (0.5 * z).tanh() / scale
            }
            Repr::Gumbel { location, scale } => {
                let z = (t - location) / scale;
                self.raw_pdf(t) * ((-z).exp() - 1.0) / scale
            }
            Repr::Mixture(c) => c.iter().map(|(w, d)| w * d.pdf_prime(t)).sum(),
        }
    }

    /// Probability of `(a, b]`, accurate both for wide intervals in either
    /// tail and for intervals too narrow for a CDF difference to resolve.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let width = b - a;
        if a.is_finite() && b.is_finite() && width < 1e-3 * self.min_scale() {
            let mid = 0.5 * (a + b);
            return width / 6.0 * (self.raw_pdf(a) + 4.0 * self.raw_pdf(mid) + self.raw_pdf(b));
        }
        if self.cdf(b) <= 0.5 {
            self.cdf(b) - self.cdf(a)
        } else if self.cdf(a) >= 0.5 {
            self.sf(a) - self.sf(b)
        } else {
            1.0 - self.cdf(a) - self.sf(b)
        }
    }

    /// `ln` of [`interval_mass`](Self::interval_mass), finite for any
    /// nonempty interval even where the mass itself underflows.
    pub fn ln_interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return f64::NEG_INFINITY;
        }
        let width = b - a;
        if a.is_finite() && b.is_finite() && width < 1e-3 * self.min_scale() {
            let mid = 0.5 * (a + b);
            let simpson = log_sum_exp([self.ln_pdf(a), 4f64.ln() + self.ln_pdf(mid), self.ln_pdf(b)]);
            return (width / 6.0).ln() + simpson;
        }
        if self.cdf(b) <= 0.5 {
            special::log_abs_diff_exp(self.ln_cdf(b), self.ln_cdf(a)).0
        } else if self.cdf(a) >= 0.5 {
            special::log_abs_diff_exp(self.ln_sf(a), self.ln_sf(b)).0
        } else {
            self.interval_mass(a, b).ln()
        }
    }

    /// Checks the distribution invariants on `grid`: monotone CDF inside
    /// [0, 1], strictly positive density, and the far-tail limits.
    pub fn check_well_formed(&self, grid: &[f64]) -> WellFormedReport {
        let mut monotone = true;
        let mut positive = true;
        let mut prev = f64::NEG_INFINITY;
        for &t in grid {
            let c = self.cdf(t);
            if !(0.0..=1.0).contains(&c) || c < prev {
                monotone = false;
            }
            prev = c;
            if self.pdf(t) <= 0.0 {
                positive = false;
            }
        }
        let limits_ok = self.cdf(-1e6) < 1e-12 && self.sf(1e6) < 1e-12;
        WellFormedReport {
            monotone_cdf: monotone,
            positive_pdf: positive,
            limits_ok,
        }
    }
}

impl Density for ScalarDistribution {
    fn cdf(&self, t: f64) -> f64 {
        ScalarDistribution::cdf(self, t)
    }
    fn pdf(&self, t: f64) -> f64 {
        ScalarDistribution::pdf(self, t)
    }
    fn pdf_prime(&self, t: f64) -> f64 {
        ScalarDistribution::pdf_prime(self, t)
    }
}

/// Builds a distribution from a kind, a parameter vector, and (for mixtures)
/// weighted components. This is the only validation gate.
pub fn make_distribution(
    kind: DistributionKind,
    params: &[f64],
    components: Option<Vec<(f64, ScalarDistribution)>>,
) -> Result<ScalarDistribution> {
    let two = |kind: &'static str| -> Result<(f64, f64)> {
        match params {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::ParameterCount {
                kind,
                expected: 2,
                got: params.len(),
            }),
        }
    };
    match kind {
        DistributionKind::Normal => {
            let (m, s) = two("normal")?;
            ScalarDistribution::normal(m, s)
        }
        DistributionKind::Logistic => {
            let (m, s) = two("logistic")?;
            ScalarDistribution::logistic(m, s)
        }
        DistributionKind::Gumbel => {
            let (m, s) = two("gumbel")?;
            ScalarDistribution::gumbel(m, s)
        }
        DistributionKind::Mixture => {
            if !params.is_empty() {
                return Err(Error::ParameterCount {
                    kind: "mixture",
                    expected: 0,
                    got: params.len(),
                });
            }
            ScalarDistribution::mixture(components.unwrap_or_default())
        }
    }
}

/// Result of [`ScalarDistribution::check_well_formed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WellFormedReport {
    pub monotone_cdf: bool,
    pub positive_pdf: bool,
    pub limits_ok: bool,
}

impl WellFormedReport {
    pub fn ok(&self) -> bool {
        self.monotone_cdf && self.positive_pdf && self.limits_ok
    }
}

/// Result of [`derivative_consistency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub points: usize,
    pub max_pdf_error: f64,
    pub max_slope_error: f64,
    pub ok: bool,
}

/// Compares pdf and pdf' against centered finite differences of cdf and pdf.
pub fn derivative_consistency<D: Density + ?Sized>(d: &D, points: &[f64]) -> DerivativeCheck {
    let h = FD_STEP;
    let mut max_pdf_error = 0.0f64;
    let mut max_slope_error = 0.0f64;
    for &t in points {
        let fd_pdf = (d.cdf(t + h) - d.cdf(t - h)) / (2.0 * h);
        let fd_slope = (d.pdf(t + h) - d.pdf(t - h)) / (2.0 * h);
        max_pdf_error = max_pdf_error.max((d.pdf(t) - fd_pdf).abs());
        max_slope_error = max_slope_error.max((d.pdf_prime(t) - fd_slope).abs());
    }
    DerivativeCheck {
        points: points.len(),
        max_pdf_error,
        max_slope_error,
        ok: max_pdf_error < PDF_FD_TOL && max_slope_error < SLOPE_FD_TOL,
    }
}

/// Serializes as `{"kind": ..., "params": [...]}`, or
/// `{"kind": "mixture", "components": [{"weight": w, "distribution": {...}}]}`.
impl Serialize for ScalarDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Component<'a>(f64, &'a ScalarDistribution);
        impl Serialize for Component<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut s = serializer.serialize_struct("Component", 2)?;
                s.serialize_field("weight", &self.0)?;
                s.serialize_field("distribution", self.1)?;
                s.end()
            }
        }

        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("kind", self.kind().as_str())?;
        match &self.repr {
            Repr::Mixture(c) => {
                let comps: Vec<Component<'_>> = c.iter().map(|(w, d)| Component(*w, d)).collect();
                map.serialize_entry("components", &comps)?;
            }
            _ => map.serialize_entry("params", &self.params())?,
        }
        map.end()
    }
}

impl fmt::Display for ScalarDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Mixture(c) => {
                f.write_str("mixture[")?;
                for (i, (w, d)) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{w}*{d}")?;
                }
                f.write_str("]")
            }
            _ => {
                let p = self.params();
                write!(f, "{}({}, {})", self.kind(), p[0], p[1])
            }
        }
    }
}
