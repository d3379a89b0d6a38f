//! Parameterized cost-distribution families over an axis-aligned box, with
//! numeric certificates for smoothness, parameter-linearity of the density
//! and responsiveness of the CDF to every parameter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{derivative_consistency, ScalarDistribution};
use crate::error::{Error, Result};
use crate::grid::linspace;

/// Blend error tolerated by the linearity certificate.
pub const LINEARITY_TOL: f64 = 1e-10;

/// Minimum sup-norm CDF movement counted as a response.
pub const RESPONSE_TOL: f64 = 1e-12;

/// Convex parameter set `X`, restricted to an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParameterBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidBox("dimension must be positive".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidBox(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBox(format!(
                    "coordinate {i}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| (l..=u).contains(&v))
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        for (index, (&value, (&lower, &upper))) in
            x.iter().zip(self.lower.iter().zip(&self.upper)).enumerate()
        {
            if !(lower..=upper).contains(&value) {
                return Err(Error::OutOfBox { index, value, lower, upper });
            }
        }
        Ok(())
    }

    /// Uniform draw over the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.random::<f64>())
            .collect()
    }

    /// Corners of the box (2^k points).
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let k = self.dim();
        (0..1usize << k)
            .map(|mask| {
                (0..k)
                    .map(|i| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    MixtureLinear,
    Location,
    LocationScale,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::MixtureLinear => "mixture_linear",
            FamilyKind::Location => "location",
            FamilyKind::LocationScale => "location_scale",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Members {
    Basis(Vec<ScalarDistribution>),
    Template(ScalarDistribution),
}

/// A k-parameter family of cost distributions `F(. | x)`, `x` in a box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostFamily {
    kind: FamilyKind,
    #[serde(rename = "box")]
    bounds: ParameterBox,
    #[serde(flatten)]
    members: Members,
}

impl CostFamily {
    /// `F(.|x) = x_1 B_1 + ... + x_k B_k + (1 - sum x) B_{k+1}`.
    ///
    /// The box must keep every weight strictly positive.
    pub fn mixture_linear(basis: Vec<ScalarDistribution>, bounds: ParameterBox) -> Result<Self> {
        let k = bounds.dim();
        if basis.len() != k + 1 {
            return Err(Error::InvalidBox(format!(
                "mixture_linear over a {k}-dimensional box needs {} basis distributions, got {}",
                k + 1,
                basis.len()
            )));
        }
        if let Some((i, lo)) = bounds.lower.iter().enumerate().find(|(_, lo)| **lo <= 0.0) {
            return Err(Error::InvalidBox(format!(
                "mixture weight x[{i}] can reach {lo}; lower bounds must be positive"
            )));
        }
        let top: f64 = bounds.upper.iter().sum();
        if top >= 1.0 {
            return Err(Error::InvalidBox(format!(
                "upper bounds sum to {top}; the remaining weight must stay positive"
            )));
        }
        Ok(Self { kind: FamilyKind::MixtureLinear, bounds, members: Members::Basis(basis) })
    }

    /// `F(.|x) = T(. - x_1)`.
    pub fn location(template: ScalarDistribution, bounds: ParameterBox) -> Result<Self> {
        if bounds.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: bounds.dim() });
        }
        Ok(Self { kind: FamilyKind::Location, bounds, members: Members::Template(template) })
    }

    /// `F(.|x) = T((. - x_1) / x_2)`.
    pub fn location_scale(template: ScalarDistribution, bounds: ParameterBox) -> Result<Self> {
        if bounds.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: bounds.dim() });
        }
        if bounds.lower[1] <= 0.0 {
            return Err(Error::InvalidBox("scale coordinate x[1] must be positive".into()));
        }
        Ok(Self { kind: FamilyKind::LocationScale, bounds, members: Members::Template(template) })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn bounds(&self) -> &ParameterBox {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// The distribution indexed by `x`.
    pub fn instantiate(&self, x: &[f64]) -> Result<ScalarDistribution> {
        self.bounds.check(x)?;
        self.instantiate_unchecked(x)
    }

    fn instantiate_unchecked(&self, x: &[f64]) -> Result<ScalarDistribution> {
        match (&self.kind, &self.members) {
            (FamilyKind::MixtureLinear, Members::Basis(basis)) => {
                let rest = 1.0 - x.iter().sum::<f64>();
                let weights = x.iter().copied().chain(std::iter::once(rest));
                let mut comps = Vec::with_capacity(basis.len());
                for (index, (w, b)) in weights.zip(basis).enumerate() {
                    if !(w > 0.0) {
                        return Err(Error::DegenerateWeights { index, weight: w });
                    }
                    comps.push((w, b.clone()));
                }
                // Rounding in `rest` can leave the sum a few ulps away from 1.
                ScalarDistribution::mixture(comps)
            }
            (FamilyKind::Location, Members::Template(t)) => t.shifted(x[0]),
            (FamilyKind::LocationScale, Members::Template(t)) => t.affine(x[0], x[1]),
            _ => unreachable!("family kind and members are paired at construction"),
        }
    }

    /// Density `f(t | x)` for points that may be blends outside a sampled set.
    fn density(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.instantiate_unchecked(x)?.pdf(t))
    }
}

/// Numeric evidence from one certificate check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEvidence {
    pub ok: bool,
    pub trials: usize,
    /// Worst error (smoothness, linearity) or smallest response (responsiveness).
    pub statistic: f64,
    pub detail: String,
}

/// Outcome of [`certify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCertificate {
    pub smooth_ok: bool,
    pub linear_ok: bool,
    pub responsive_ok: bool,
    pub smoothness: CheckEvidence,
    pub linearity: CheckEvidence,
    pub responsiveness: CheckEvidence,
}

impl FamilyCertificate {
    /// All three requirements hold.
    pub fn responsive_family(&self) -> bool {
        self.smooth_ok && self.linear_ok && self.responsive_ok
    }
}

/// Knobs for [`certify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    pub seed: u64,
    pub epsilon: f64,
    pub n_probe: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, epsilon: 0.01, n_probe: 200 }
    }
}

/// Derivative consistency of `F(.|x)` at 20 random `(x, t)` pairs.
pub fn check_smoothness(fam: &CostFamily, seed: u64) -> CheckEvidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut ok = true;
    let trials = 20;
    for _ in 0..trials {
        let x = fam.bounds.sample(&mut rng);
        let t = rng.random_range(-10.0..10.0);
        match fam.instantiate(&x) {
            Ok(d) => {
                let check = derivative_consistency(&d, &[t]);
                worst = worst.max(check.max_pdf_error).max(check.max_slope_error);
                ok &= check.ok;
            }
            Err(_) => ok = false,
        }
    }
    CheckEvidence {
        ok,
        trials,
        statistic: worst,
        detail: "max finite-difference error of pdf and pdf'".into(),
    }
}

/// `f(.|a x + (1-a) y) = a f(.|x) + (1-a) f(.|y)` over 50 random triples and
/// 20 evaluation points.
pub fn check_linearity(fam: &CostFamily, seed: u64) -> CheckEvidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
    let ts = linspace(-10.0, 10.0, 20);
    let trials = 50;
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..trials {
        let alpha: f64 = rng.random();
        let x = fam.bounds.sample(&mut rng);
        let y = fam.bounds.sample(&mut rng);
        let blend: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        for &t in &ts {
            let lhs = fam.density(&blend, t);
            let rhs = fam
                .density(&x, t)
                .and_then(|fx| fam.density(&y, t).map(|fy| alpha * fx + (1.0 - alpha) * fy));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => worst = worst.max((l - r).abs()),
                _ => ok = false,
            }
        }
    }
    CheckEvidence {
        ok: ok && worst < LINEARITY_TOL,
        trials,
        statistic: worst,
        detail: "max |f(.|blend) - blend of f| over sampled triples".into(),
    }
}

/// Perturbs each coordinate separately, and all jointly, within an
/// `epsilon` ball around random centers; every perturbation must move the
/// CDF by more than [`RESPONSE_TOL`] somewhere on a 401-point grid.
pub fn check_responsiveness(fam: &CostFamily, epsilon: f64, n_probe: usize, seed: u64) -> CheckEvidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x22);
    let ts = linspace(-10.0, 10.0, 401);
    let k = fam.dim();
    let mut smallest = f64::INFINITY;
    let mut ok = epsilon > 0.0;
    let mut trials = 0;
    for _ in 0..n_probe {
        let center = fam.bounds.sample(&mut rng);
        let Ok(base) = fam.instantiate(&center) else {
            ok = false;
            continue;
        };
        let mut perturbations: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut p = center.clone();
                p[i] = perturb_coordinate(fam, i, center[i], epsilon, &mut rng);
                p
            })
            .collect();
        // joint direction, scaled into the ball
        let dir: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let radius = epsilon * rng.random::<f64>();
        let joint: Vec<f64> = (0..k)
            .map(|i| {
                let (lo, hi) = (fam.bounds.lower[i], fam.bounds.upper[i]);
                (center[i] + radius * dir[i] / norm).clamp(lo, hi)
            })
            .collect();
        perturbations.push(joint);

        for p in perturbations {
            trials += 1;
            let Ok(moved) = fam.instantiate(&p) else {
                ok = false;
                continue;
            };
            let sup = ts
                .iter()
                .map(|&t| (base.cdf(t) - moved.cdf(t)).abs())
                .fold(0.0f64, f64::max);
            smallest = smallest.min(sup);
            if !(sup > RESPONSE_TOL) {
                ok = false;
            }
        }
    }
    CheckEvidence {
        ok,
        trials,
        statistic: smallest,
        detail: format!("smallest sup-norm CDF movement, epsilon = {epsilon}"),
    }
}

fn perturb_coordinate<R: Rng + ?Sized>(fam: &CostFamily, i: usize, value: f64, epsilon: f64, rng: &mut R) -> f64 {
    let (lo, hi) = (fam.bounds.lower[i], fam.bounds.upper[i]);
    let step = epsilon * (1.0 - rng.random::<f64>());
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let forward = value + sign * step;
    if (lo..=hi).contains(&forward) {
        return forward;
    }
    let backward = value - sign * step;
    if (lo..=hi).contains(&backward) {
        return backward;
    }
    forward.clamp(lo, hi)
}

/// Runs all three checks.
pub fn certify(fam: &CostFamily) -> FamilyCertificate {
    certify_with(fam, CertifyOptions::default())
}

pub fn certify_with(fam: &CostFamily, opts: CertifyOptions) -> FamilyCertificate {
    let smoothness = check_smoothness(fam, opts.seed);
    let linearity = check_linearity(fam, opts.seed);
    let responsiveness = check_responsiveness(fam, opts.epsilon, opts.n_probe, opts.seed);
    FamilyCertificate {
        smooth_ok: smoothness.ok,
        linear_ok: linearity.ok,
        responsive_ok: responsiveness.ok,
        smoothness,
        linearity,
        responsiveness,
    }
}
