use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use threshold_lab::suite::{logistic_location_family, standard_gap, standard_model};
use threshold_lab::{
    accuracy_optimal_in, certify, check_admissible, coincidence_fraction, compliance_optimal_in, deu_pos, eu_pos,
    equivalence_test_in, prevalence_neg, prevalence_pos, scaling_report, AdmissibilityReport,
    EquivalenceVerdict, ExtendedReal, FamilyCertificate, ModelConfig, OptResult,
    ScalingReport, SearchWindow, SweepMode, SweepResult, SweepSpec,
};

use crate::config::{GridSpec, OutputSpec, RunConfig, SignalSpec, SweepConfig, DEFAULT_TABLE_GRID, DEFAULT_TOLERANCE};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, fmt_f64, timestamped_dir, to_json, write_csv, write_csv_to, write_dat, write_json};

pub const THREADS_ENV: &str = "THRESHOLD_LAB_THREADS";
pub const DEFAULT_OUT_DIR: &str = "threshold-lab-out";

fn model(cfg: &RunConfig) -> CliResult<ModelConfig> {
    Ok(ModelConfig::new(cfg.signal_pair.pair()?, cfg.require_cost()?.clone(), cfg.reward)?)
}

// ---- check ----

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub admissibility: AdmissibilityReport,
    pub admissible: bool,
    /// Crossing removed by normalization, when the pair normalizes.
    pub shift: Option<f64>,
    pub cost_well_formed: Option<bool>,
    pub family_certificate: Option<FamilyCertificate>,
    pub responsive_family: Option<bool>,
}

pub fn check(cfg: &RunConfig) -> CliResult<CheckReport> {
    let SignalSpec { g0, g1, .. } = &cfg.signal_pair;
    let admissibility = check_admissible(g0, g1);
    let grid = threshold_lab::grid::linspace(-10.0, 10.0, 401);
    let certificate = cfg.cost_family.as_ref().map(certify);
    Ok(CheckReport {
        admissible: admissibility.admissible(),
        shift: cfg.signal_pair.pair().ok().map(|p| p.shift()),
        admissibility,
        cost_well_formed: cfg.cost.as_ref().map(|c| c.check_well_formed(&grid).ok()),
        responsive_family: certificate.as_ref().map(FamilyCertificate::responsive_family),
        family_certificate: certificate,
    })
}

// ---- equilibrium ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumRow {
    pub t: f64,
    pub pi_pos: f64,
    pub pi_neg: f64,
    pub eu_pos: f64,
    pub deu_pos: f64,
}

pub const EQUILIBRIUM_COLUMNS: [&str; 5] = ["t", "pi_pos", "pi_neg", "eu_pos", "deu_pos"];

pub fn equilibrium_table(m: &ModelConfig, grid: GridSpec) -> Vec<EquilibriumRow> {
    grid.points()
        .into_iter()
        .map(|t| {
            let e = ExtendedReal::Finite(t);
            EquilibriumRow {
                t,
                pi_pos: prevalence_pos(m, e),
                pi_neg: prevalence_neg(m, e),
                eu_pos: eu_pos(m, e),
                deu_pos: deu_pos(m, t),
            }
        })
        .collect()
}

fn equilibrium_csv(rows: &[EquilibriumRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = EQUILIBRIUM_COLUMNS.iter().map(|s| s.to_string()).collect();
    let body = rows
        .iter()
        .map(|r| [r.t, r.pi_pos, r.pi_neg, r.eu_pos, r.deu_pos].iter().map(|v| fmt_f64(*v)).collect())
        .collect();
    (header, body)
}

fn write_equilibrium(dir: &Path, rows: &[EquilibriumRow]) -> CliResult<()> {
    let (header, body) = equilibrium_csv(rows);
    write_csv(&dir.join("equilibrium.csv"), &header, &body)?;
    let eu: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.eu_pos)).collect();
    write_dat(&dir.join("eu_pos.dat"), &[], ("t", "eu_pos"), &eu)
}

pub fn equilibrium(cfg: &RunConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let rows = equilibrium_table(&model(cfg)?, cfg.grid);
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_equilibrium(dir, &rows)
        }
        None => {
            let (header, body) = equilibrium_csv(&rows);
            write_csv_to(stdout, &header, &body)
                .map_err(|e| CliError::Write { path: PathBuf::from("<stdout>"), source: e.into() })
        }
    }
}

// ---- optimize ----

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub compliance: OptResult,
    pub accuracy: OptResult,
    #[serde(flatten)]
    pub verdict: EquivalenceVerdict,
}

pub fn optimize_model(m: &ModelConfig, window: SearchWindow, tol: f64) -> CliResult<OptimizeReport> {
    Ok(OptimizeReport {
        compliance: compliance_optimal_in(m, window)?,
        accuracy: accuracy_optimal_in(m, window)?,
        verdict: equivalence_test_in(m, tol, window)?,
    })
}

#[derive(Serialize)]
struct WithConfig<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    result: &'a T,
}

pub fn optimize(cfg: &RunConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<OptimizeReport> {
    let report = optimize_model(&model(cfg)?, cfg.search, cfg.tolerance)?;
    let doc = WithConfig { config: cfg, result: &report };
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("optimize.json"), &doc)?;
    }
    emit(stdout, &to_json(&doc))?;
    Ok(report)
}

// ---- sweep ----

#[derive(Debug, Serialize)]
pub struct SweepSummary<'a> {
    pub config: &'a RunConfig,
    pub seed: u64,
    pub mode: SweepMode,
    pub n_samples: usize,
    pub tolerances: &'a [f64],
    pub counts: &'a [usize],
    pub fractions: &'a [f64],
    pub scaling_slope: Option<f64>,
    pub certificate: &'a FamilyCertificate,
    pub report: &'a ScalingReport,
    pub samples_csv_path: &'a str,
}

pub const SAMPLES_CSV: &str = "samples.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const FRACTION_DAT: &str = "fraction.dat";

/// Worker cap from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(THREADS_ENV, format!("expected a positive integer, got {v:?}"))),
        },
    }
}

pub fn sweep_spec(cfg: &RunConfig, threads: Option<usize>) -> CliResult<SweepSpec> {
    let family = cfg.require_family()?.clone();
    if !(cfg.reward > 0.0) {
        return Err(CliError::config("reward", format!("sweeps need a positive reward, got {}", cfg.reward)));
    }
    let s = &cfg.sweep;
    Ok(SweepSpec {
        family,
        pair: cfg.signal_pair.pair()?,
        reward: cfg.reward,
        n_samples: s.n_samples,
        tolerances: s.tolerances.clone(),
        seed: s.seed,
        mode: s.mode,
        window: cfg.search,
        allow_uncertified: s.allow_uncertified,
        threads,
    })
}

fn samples_csv(res: &SweepResult, k: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = (1..=k).map(|i| format!("x_{i}")).collect();
    header.extend(["foc_gap".to_string(), "accuracy_t".to_string()]);
    header.extend(res.tolerances.iter().map(|t| format!("coincident@{t}")));
    let rows = res
        .per_sample
        .iter()
        .map(|s| {
            let mut row: Vec<String> = s.x.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(s.foc_gap));
            row.push(s.accuracy_t.map(|t| fmt_f64(t.to_f64())).unwrap_or_default());
            row.extend((0..res.tolerances.len()).map(|i| u8::from(res.coincident(s, i)).to_string()));
            row
        })
        .collect();
    (header, rows)
}

pub fn run_sweep(cfg: &RunConfig, dir: &Path, threads: Option<usize>) -> CliResult<(SweepResult, ScalingReport, String)> {
    let spec = sweep_spec(cfg, threads)?;
    let res = coincidence_fraction(&spec)?;
    let report = scaling_report(&res, cfg.sweep.bootstrap);
    ensure_dir(dir)?;
    let (header, rows) = samples_csv(&res, spec.family.dim());
    write_csv(&dir.join(SAMPLES_CSV), &header, &rows)?;
    let summary = SweepSummary {
        config: cfg,
        seed: res.seed,
        mode: res.mode,
        n_samples: res.n_samples,
        tolerances: &res.tolerances,
        counts: &res.counts,
        fractions: &res.fractions,
        scaling_slope: res.scaling_slope,
        certificate: &res.certificate,
        report: &report,
        samples_csv_path: SAMPLES_CSV,
    };
    let json = to_json(&summary);
    std::fs::write(dir.join(SUMMARY_JSON), &json)
        .map_err(|source| CliError::Write { path: dir.join(SUMMARY_JSON), source })?;
    let pts: Vec<(f64, f64)> = res.tolerances.iter().copied().zip(res.fractions.iter().copied()).collect();
    let notes = [format!("seed {} n_samples {} mode {}", res.seed, res.n_samples, res.mode.as_str())];
    write_dat(&dir.join(FRACTION_DAT), &notes, ("tolerance", "fraction"), &pts)?;
    Ok((res, report, json))
}

pub fn sweep(cfg: &RunConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let (_, _, json) = run_sweep(cfg, &dir, threads_from_env()?)?;
    emit(stdout, &json)
}

// ---- demo ----

/// The worked example: symmetric normal signals, logistic costs, unit
/// reward, and a logistic-location family for the sweep.
pub fn demo_config() -> RunConfig {
    let m = standard_model();
    RunConfig {
        signal_pair: SignalSpec { g0: m.pair().g0().clone(), g1: m.pair().g1().clone(), auto_normalize: true },
        cost: Some(m.cost().clone()),
        cost_family: Some(logistic_location_family()),
        reward: 1.0,
        grid: DEFAULT_TABLE_GRID,
        search: SearchWindow::default(),
        tolerance: DEFAULT_TOLERANCE,
        sweep: SweepConfig::default(),
        output: OutputSpec::default(),
    }
}

#[derive(Debug, Serialize)]
struct DemoSummary {
    directory: String,
    pi_pos_at_zero: f64,
    eu_pos_at_zero: f64,
    foc_at_zero: f64,
    /// Cost location that zeroes the FOC for this signal pair.
    coincidence_location: f64,
    compliance_t: ExtendedReal,
    accuracy_t: ExtendedReal,
    equivalent: bool,
    sweep_fractions: Vec<f64>,
    sweep_slope: Option<f64>,
    sweep_statement: String,
}

pub fn demo(out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<PathBuf> {
    let cfg = demo_config();
    let dir = timestamped_dir(out.unwrap_or(Path::new(DEFAULT_OUT_DIR)), "demo")?;
    write_json(&dir.join("config.json"), &cfg)?;

    let m = model(&cfg)?;
    write_equilibrium(&dir, &equilibrium_table(&m, cfg.grid))?;
    let opt = optimize_model(&m, cfg.search, cfg.tolerance)?;
    write_json(&dir.join("optimize.json"), &WithConfig { config: &cfg, result: &opt })?;
    let (res, report, _) = run_sweep(&cfg, &dir.join("sweep"), threads_from_env()?)?;

    let zero = ExtendedReal::Finite(0.0);
    let summary = DemoSummary {
        directory: dir.display().to_string(),
        pi_pos_at_zero: prevalence_pos(&m, zero),
        eu_pos_at_zero: eu_pos(&m, zero),
        foc_at_zero: opt.verdict.foc_gap,
        coincidence_location: standard_gap(),
        compliance_t: opt.compliance.threshold,
        accuracy_t: opt.accuracy.threshold,
        equivalent: opt.verdict.equivalent,
        sweep_fractions: res.fractions,
        sweep_slope: res.scaling_slope,
        sweep_statement: report.statement,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    emit(stdout, &to_json(&summary))?;
    Ok(dir)
}

fn emit(stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
}
