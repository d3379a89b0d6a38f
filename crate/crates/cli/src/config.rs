//! JSON run configuration.
//!
//! Parsing happens in two passes: serde (through `serde_path_to_error`) for
//! shape and types, then a validation pass that builds the model objects and
//! reports the dotted path of any field that fails.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use threshold_lab::{
    make_distribution, normalize_pair, CostFamily, DistributionKind, Error, ParameterBox, ScalarDistribution,
    SearchWindow, SignalPair, SweepMode,
};

use crate::error::{CliError, CliResult};

pub const DEFAULT_TABLE_GRID: GridSpec = GridSpec { lo: -5.0, hi: 5.0, n: 101 };
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SWEEP_TOLERANCES: [f64; 3] = [0.1, 0.01, 0.001];
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BOOTSTRAP: usize = 200;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    signal_pair: RawPair,
    cost: Option<RawDist>,
    cost_family: Option<RawFamily>,
    reward: f64,
    grid: Option<GridSpec>,
    search: Option<GridSpec>,
    tolerance: Option<f64>,
    sweep: Option<RawSweep>,
    output: Option<OutputSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    g0: RawDist,
    g1: RawDist,
    #[serde(default = "yes")]
    auto_normalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDist {
    kind: String,
    #[serde(default)]
    params: Vec<f64>,
    components: Option<Vec<RawComponent>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    weight: f64,
    distribution: RawDist,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    template: Option<RawDist>,
    basis: Option<Vec<RawDist>>,
    #[serde(rename = "box")]
    bounds: RawBox,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    n_samples: Option<usize>,
    tolerances: Option<Vec<f64>>,
    seed: Option<u64>,
    mode: Option<String>,
    allow_uncertified: Option<bool>,
    bootstrap: Option<usize>,
}

/// `lo:hi:n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn validate(&self, path: &str) -> CliResult<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(CliError::config(path, format!("need finite lo < hi, got {}:{}", self.lo, self.hi)));
        }
        if self.n < 2 {
            return Err(CliError::config(path, format!("need at least 2 points, got {}", self.n)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        threshold_lab::grid::linspace(self.lo, self.hi, self.n)
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected LO:HI:N, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad bound {v:?}: {e}"));
        let n = n.trim().parse::<usize>().map_err(|e| format!("bad point count {n:?}: {e}"))?;
        Ok(GridSpec { lo: num(lo)?, hi: num(hi)?, n })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalSpec {
    pub g0: ScalarDistribution,
    pub g1: ScalarDistribution,
    pub auto_normalize: bool,
}

impl SignalSpec {
    /// The normalized pair used by every model operation.
    pub fn pair(&self) -> CliResult<SignalPair> {
        let built = if self.auto_normalize {
            normalize_pair(&self.g0, &self.g1)
        } else {
            SignalPair::from_normalized(self.g0.clone(), self.g1.clone())
        };
        built.map_err(|e| CliError::config("signal_pair", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_samples: usize,
    pub tolerances: Vec<f64>,
    pub seed: u64,
    pub mode: SweepMode,
    pub allow_uncertified: bool,
    pub bootstrap: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            tolerances: DEFAULT_SWEEP_TOLERANCES.to_vec(),
            seed: DEFAULT_SEED,
            mode: SweepMode::FocGap,
            allow_uncertified: false,
            bootstrap: DEFAULT_BOOTSTRAP,
        }
    }
}

/// Fully validated configuration with every default resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub signal_pair: SignalSpec,
    pub cost: Option<ScalarDistribution>,
    pub cost_family: Option<CostFamily>,
    pub reward: f64,
    pub grid: GridSpec,
    pub search: SearchWindow,
    pub tolerance: f64,
    pub sweep: SweepConfig,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn require_cost(&self) -> CliResult<&ScalarDistribution> {
        self.cost.as_ref().ok_or_else(|| CliError::config("cost", "this command needs a single cost distribution"))
    }

    pub fn require_family(&self) -> CliResult<&CostFamily> {
        self.cost_family.as_ref().ok_or_else(|| CliError::config("cost_family", "this command needs a cost family"))
    }
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(if path == "." { "config".to_string() } else { path }, e.into_inner())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> CliResult<RunConfig> {
    let signal_pair = SignalSpec {
        g0: build_dist(&raw.signal_pair.g0, "signal_pair.g0")?,
        g1: build_dist(&raw.signal_pair.g1, "signal_pair.g1")?,
        auto_normalize: raw.signal_pair.auto_normalize,
    };
    let cost = raw.cost.as_ref().map(|d| build_dist(d, "cost")).transpose()?;
    let cost_family = raw.cost_family.as_ref().map(build_family).transpose()?;
    if cost.is_none() && cost_family.is_none() {
        return Err(CliError::config("cost", "either `cost` or `cost_family` is required"));
    }
    if !raw.reward.is_finite() {
        return Err(CliError::config("reward", format!("must be finite, got {}", raw.reward)));
    }

    let grid = raw.grid.unwrap_or(DEFAULT_TABLE_GRID);
    grid.validate("grid")?;
    let search = match raw.search {
        Some(g) => SearchWindow { lo: g.lo, hi: g.hi, n: g.n },
        None => SearchWindow::default(),
    };
    search.validate().map_err(|e| CliError::config("search", e))?;

    let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(CliError::config("tolerance", format!("must be positive, got {tolerance}")));
    }

    let sweep = match raw.sweep {
        None => SweepConfig::default(),
        Some(s) => {
            let d = SweepConfig::default();
            let mode = match s.mode {
                Some(m) => m.parse().map_err(|e: String| CliError::config("sweep.mode", e))?,
                None => d.mode,
            };
            SweepConfig {
                n_samples: s.n_samples.unwrap_or(d.n_samples),
                tolerances: s.tolerances.unwrap_or(d.tolerances),
                seed: s.seed.unwrap_or(d.seed),
                mode,
                allow_uncertified: s.allow_uncertified.unwrap_or(d.allow_uncertified),
                bootstrap: s.bootstrap.unwrap_or(d.bootstrap),
            }
        }
    };
    if sweep.n_samples == 0 {
        return Err(CliError::config("sweep.n_samples", "must be at least 1"));
    }
    validate_tolerances(&sweep.tolerances, "sweep.tolerances")?;

    Ok(RunConfig {
        signal_pair,
        cost,
        cost_family,
        reward: raw.reward,
        grid,
        search,
        tolerance,
        sweep,
        output: raw.output.unwrap_or_default(),
    })
}

/// Positive, finite and strictly descending.
pub fn validate_tolerances(tol: &[f64], path: &str) -> CliResult<()> {
    if tol.is_empty() {
        return Err(CliError::config(path, "tolerance ladder is empty"));
    }
    if let Some((i, t)) = tol.iter().enumerate().find(|(_, t)| !(t.is_finite() && **t > 0.0)) {
        return Err(CliError::config(format!("{path}[{i}]"), format!("must be positive and finite, got {t}")));
    }
    if let Some(i) = tol.windows(2).position(|w| !(w[0] > w[1])) {
        return Err(CliError::config(
            format!("{path}[{}]", i + 1),
            format!("tolerances must be strictly descending, got {} after {}", tol[i + 1], tol[i]),
        ));
    }
    Ok(())
}

fn build_dist(raw: &RawDist, path: &str) -> CliResult<ScalarDistribution> {
    let kind: DistributionKind = raw.kind.parse().map_err(|e: Error| CliError::config(format!("{path}.kind"), e))?;
    let components = match (&raw.components, kind) {
        (Some(comps), DistributionKind::Mixture) => Some(
            comps
                .iter()
                .enumerate()
                .map(|(i, c)| Ok((c.weight, build_dist(&c.distribution, &format!("{path}.components[{i}].distribution"))?)))
                .collect::<CliResult<Vec<_>>>()?,
        ),
        (Some(_), _) => {
            return Err(CliError::config(format!("{path}.components"), format!("only mixtures take components, not {kind}")))
        }
        (None, _) => None,
    };
    make_distribution(kind, &raw.params, components).map_err(|e| {
        let field = match &e {
            Error::InvalidParameter { name, .. } => match *name {
                "mean" | "location" => format!("{path}.params[0]"),
                "sd" | "scale" => format!("{path}.params[1]"),
                _ => format!("{path}.params"),
            },
            Error::NonPositiveWeight { index, .. } => format!("{path}.components[{index}].weight"),
            Error::WeightsNotNormalized { .. } | Error::EmptyMixture => format!("{path}.components"),
            _ => format!("{path}.params"),
        };
        CliError::config(field, e)
    })
}

fn build_family(raw: &RawFamily) -> CliResult<CostFamily> {
    let bounds = ParameterBox::new(raw.bounds.lower.clone(), raw.bounds.upper.clone())
        .map_err(|e| CliError::config("cost_family.box", e))?;
    let template = || -> CliResult<ScalarDistribution> {
        let t = raw
            .template
            .as_ref()
            .ok_or_else(|| CliError::config("cost_family.template", format!("required for kind {:?}", raw.kind)))?;
        build_dist(t, "cost_family.template")
    };
    let fam = match raw.kind.as_str() {
        "location" => CostFamily::location(template()?, bounds),
        "location_scale" => CostFamily::location_scale(template()?, bounds),
        "mixture_linear" => {
            let basis = raw
                .basis
                .as_ref()
                .ok_or_else(|| CliError::config("cost_family.basis", "required for kind \"mixture_linear\""))?
                .iter()
                .enumerate()
                .map(|(i, d)| build_dist(d, &format!("cost_family.basis[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            CostFamily::mixture_linear(basis, bounds)
        }
        other => {
            return Err(CliError::config(
                "cost_family.kind",
                format!("unknown family {other:?}; expected location, location_scale or mixture_linear"),
            ))
        }
    };
    fam.map_err(|e| CliError::config("cost_family.box", e))
}
