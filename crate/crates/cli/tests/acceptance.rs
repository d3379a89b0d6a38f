//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use threshold_lab::grid::linspace;
use threshold_lab::suite::{
    frozen_family, logistic_location_family, standard_gap, standard_model, standard_pair, suite_models,
    two_parameter_mixture_family,
};
use threshold_lab::{
    accuracy_optimal, certify, coincidence_fraction, compliance_optimal, deu_pos, eu_pos, equivalence_test,
    foc_at_zero, prevalence_pos, prevalence_report, CostFamily, ExtendedReal, ModelConfig, ParameterBox,
    ScalarDistribution, SweepSpec, Verdict,
};

/// Outcome of one criterion: pass flag and a one-line account.
struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Joins sub-checks; the criterion passes only if all of them do.
#[derive(Default)]
struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    fn add(&mut self, ok: bool, what: impl Into<String>) {
        self.parts.push((ok, what.into()));
    }

    fn finish(self) -> Outcome {
        let pass = self.parts.iter().all(|(ok, _)| *ok);
        let detail = self
            .parts
            .into_iter()
            .map(|(ok, what)| format!("{}{}", if ok { "" } else { "NOT " }, what))
            .collect::<Vec<_>>()
            .join("; ");
        Outcome::new(pass, detail)
    }
}

fn suite() -> Vec<(String, ModelConfig)> {
    suite_models().expect("suite models build")
}

// 1. Prevalence is maximized at t = 0 for every suite model.
fn compliance_optimum_is_zero() -> Outcome {
    const BUDGET: Duration = Duration::from_secs(10);
    let start = Instant::now();
    let models = suite();
    let mut bad = Vec::new();
    for (name, m) in &models {
        match compliance_optimal(m) {
            Ok(res) if res.threshold == ExtendedReal::Finite(0.0) => {}
            Ok(res) => bad.push(format!("{name}: threshold {}", res.threshold)),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let mut c = Checks::default();
    c.add(bad.is_empty(), format!("{} / {} models give threshold 0 with guardrail slack 1e-9 {bad:?}", models.len() - bad.len(), models.len()));
    c.add(elapsed < BUDGET, format!("runtime {:.2}s < 10s", elapsed.as_secs_f64()));
    c.finish()
}

// 2. Positive rules beat negative ones on [-8, 8]; the gap dies out at +-12
// and is bounded away from zero at 0.
fn positive_rule_dominates() -> Outcome {
    let grid = linspace(-8.0, 8.0, 321);
    let mut underflowed = 0usize;
    let mut min_ln_gap = f64::INFINITY;
    let mut nonpositive = Vec::new();
    let mut tails = Vec::new();
    let mut centre = Vec::new();
    let mut max_tail = 0.0f64;
    let mut min_centre = f64::INFINITY;
    let models = suite();
    for (name, m) in &models {
        for &t in &grid {
            let rep = prevalence_report(m, t.into());
            // The gap can underflow in a gumbel lower tail; its logarithm
            // stays finite exactly when the gap is positive.
            if !(rep.gap >= 0.0 && rep.ln_gap.is_finite()) {
                nonpositive.push(format!("{name} at t={t}"));
            }
            underflowed += usize::from(rep.gap == 0.0);
            min_ln_gap = min_ln_gap.min(rep.ln_gap);
        }
        for t in [-12.0, 12.0] {
            let g = prevalence_report(m, t.into()).gap;
            max_tail = max_tail.max(g);
            if !(g < 1e-6) {
                tails.push(format!("{name} at t={t}: {g:e}"));
            }
        }
        let g0 = prevalence_report(m, 0.0.into()).gap;
        min_centre = min_centre.min(g0);
        if !(g0 > 1e-3) {
            centre.push(format!("{name}: {g0:e}"));
        }
    }
    let mut c = Checks::default();
    c.add(
        nonpositive.is_empty(),
        format!(
            "gap > 0 on 321-point grid over [-8,8] for {} models ({underflowed} points underflow f64 and are certified by a finite log gap, min {min_ln_gap:.4e}) {nonpositive:?}",
            models.len()
        ),
    );
    c.add(tails.is_empty(), format!("gap at t=+-12 < 1e-6 (max {max_tail:e}) {tails:?}"));
    c.add(centre.is_empty(), format!("gap at t=0 > 1e-3 (min {min_centre:e}) {centre:?}"));
    c.finish()
}

// 3. Closed-form slope matches the FOC at 0 and finite differences of the
// payoff on [-5, 5].
fn derivative_identity() -> Outcome {
    const H: f64 = 1e-4;
    let grid = linspace(-5.0, 5.0, 101);
    let mut worst_foc = 0.0f64;
    let mut worst_fd = 0.0f64;
    let models = suite();
    for (_, m) in &models {
        worst_foc = worst_foc.max((foc_at_zero(m) - deu_pos(m, 0.0)).abs());
        for &t in &grid {
            let fd = (eu_pos(m, (t + H).into()) - eu_pos(m, (t - H).into())) / (2.0 * H);
            worst_fd = worst_fd.max((deu_pos(m, t) - fd).abs());
        }
    }
    let mut c = Checks::default();
    c.add(worst_foc < 1e-10, format!("max |foc - deu(0)| = {worst_foc:e} < 1e-10"));
    c.add(worst_fd < 1e-6, format!("max |deu - finite difference| = {worst_fd:e} < 1e-6 over 101 points x {} models", models.len()));
    c.finish()
}

// 4. Worked example.
fn worked_example() -> Outcome {
    let m = standard_model();
    let zero = ExtendedReal::Finite(0.0);
    let pi = prevalence_pos(&m, zero);
    let eu = eu_pos(&m, zero);
    let foc = foc_at_zero(&m);
    let acc = accuracy_optimal(&m).threshold;
    let verdict = equivalence_test(&m, 1e-6).expect("valid tolerance");
    let mut c = Checks::default();
    c.add((pi - 0.664337).abs() <= 1e-6, format!("pi+(0) = {pi:.9} within 1e-6 of 0.664337"));
    c.add((eu - 0.841345).abs() <= 1e-6, format!("EU+(0) = {eu:.9} within 1e-6 of 0.841345"));
    c.add((foc + 0.079530).abs() <= 1e-6, format!("foc = {foc:.9} within 1e-6 of -0.079530"));
    c.add(acc.finite().is_some_and(|t| t < 0.0 && t.abs() >= 1e-6), format!("accuracy optimum {acc} strictly negative"));
    c.add(!verdict.equivalent, format!("equivalent = {}", verdict.equivalent));
    c.finish()
}

// 5. Equivalence under logistic(mu, 1) costs is pinned near 0.682689.
fn equivalence_pinpoint() -> Outcome {
    const TARGET: f64 = 0.682689;
    const TOL: f64 = 1e-6;
    const WINDOW: f64 = 1e-4;
    let pair = standard_pair();
    let verdict_at = |mu: f64| {
        let m = ModelConfig::new(pair.clone(), ScalarDistribution::logistic(mu, 1.0).unwrap(), 1.0).unwrap();
        equivalence_test(&m, TOL).unwrap()
    };
    let signed_t = |mu: f64| verdict_at(mu).accuracy_t.finite().unwrap_or(f64::NAN);

    let grid = linspace(-3.0, 3.0, 601);
    let ts: Vec<f64> = grid.iter().map(|&mu| signed_t(mu)).collect();
    let mut c = Checks::default();

    // grid points: equivalence only inside the window
    let wrong: Vec<f64> = grid
        .iter()
        .zip(&ts)
        .filter(|(mu, t)| (t.abs() < TOL) != ((**mu - TARGET).abs() < WINDOW))
        .map(|(mu, _)| *mu)
        .collect();
    c.add(wrong.is_empty(), format!("601-point grid agrees with |mu - {TARGET}| < {WINDOW} {wrong:?}"));

    // exactly one grid cell brackets a sign change of the accuracy optimum
    let brackets: Vec<(f64, f64)> = grid
        .windows(2)
        .zip(ts.windows(2))
        .filter(|(_, t)| t[0].signum() != t[1].signum())
        .map(|(mu, _)| (mu[0], mu[1]))
        .collect();
    c.add(brackets.len() == 1, format!("{} sign-change cell(s) {brackets:?}", brackets.len()));

    if let Some(&(mut lo, mut hi)) = brackets.first() {
        let lo_sign = signed_t(lo).signum();
        let mut found = None;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let v = verdict_at(mid);
            if v.equivalent {
                found = Some(mid);
                break;
            }
            if v.accuracy_t.finite().unwrap_or(f64::NAN).signum() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        match found {
            Some(mu) => {
                c.add((mu - TARGET).abs() < WINDOW, format!("bisection finds equivalent mu = {mu:.9}, |mu - {TARGET}| = {:.2e} < {WINDOW}", (mu - TARGET).abs()));
                c.add(verdict_at(mu).foc_gap.abs() < TOL, "FOC vanishes at the equivalent mu");
            }
            None => c.add(false, "bisection finds an equivalent mu"),
        }
    }
    for mu in [TARGET - WINDOW, TARGET + WINDOW] {
        c.add(!verdict_at(mu).equivalent, format!("mu = {mu} (window edge) not equivalent"));
    }
    // (the oracle location 2 Phi(1) - 1 in double precision)
    c.add((standard_gap() - TARGET).abs() < 1e-6, format!("oracle mu* = {:.9}", standard_gap()));
    c.finish()
}

fn sweep(family: CostFamily, allow_uncertified: bool) -> (threshold_lab::SweepResult, threshold_lab::ScalingReport, Duration) {
    let mut spec = SweepSpec::new(family, standard_pair(), 1.0);
    spec.n_samples = 10_000;
    spec.tolerances = vec![0.1, 0.01, 0.001];
    spec.seed = 42;
    spec.allow_uncertified = allow_uncertified;
    let start = Instant::now();
    let res = coincidence_fraction(&spec).expect("sweep runs");
    let report = threshold_lab::scaling_report(&res, 200);
    (res, report, start.elapsed())
}

// 6. Coincidence fractions shrink linearly with the tolerance.
fn measure_zero_at_desk_scale() -> Outcome {
    const EXPECTED: [f64; 3] = [0.0132, 0.00132, 0.000132];
    let (res, report, elapsed) = sweep(logistic_location_family(), false);
    let mut c = Checks::default();
    let within: Vec<bool> = res.fractions.iter().zip(EXPECTED).map(|(f, e)| *f >= e / 2.0 && *f <= e * 2.0).collect();
    c.add(
        within.iter().all(|&b| b),
        format!("k=1 fractions {:?} within a factor 2 of {EXPECTED:?}", res.fractions),
    );
    let slope = res.scaling_slope.unwrap_or(f64::NAN);
    c.add((0.8..=1.2).contains(&slope), format!("k=1 slope {slope:.4} in [0.8, 1.2] (95% CI {:?})", report.slope_ci));
    c.add(report.verdict == Verdict::ConsistentWithMeasureZero, format!("verdict {:?}", report.verdict));
    c.add(elapsed < Duration::from_secs(60), format!("k=1 runtime {:.2}s < 60s", elapsed.as_secs_f64()));

    let (res2, _, _) = sweep(two_parameter_mixture_family(), false);
    let slope2 = res2.scaling_slope.unwrap_or(f64::NAN);
    c.add(
        (0.8..=1.2).contains(&slope2),
        format!("k=2 mixture fractions {:?}, slope {slope2:.4} in [0.8, 1.2]", res2.fractions),
    );
    c.finish()
}

// 7. A family that ignores its index fills every tolerance band.
fn negative_control() -> Outcome {
    let (res, report, _) = sweep(frozen_family(), true);
    let mut c = Checks::default();
    c.add(!res.certificate.responsive_ok, "family fails the responsiveness check");
    c.add(res.fractions.iter().all(|&f| f == 1.0), format!("fractions {:?} all 1.0", res.fractions));
    c.add(report.verdict == Verdict::Inconsistent, format!("verdict {:?} (slope {:?})", report.verdict, report.slope));
    c.finish()
}

// 8. Certificates.
fn certificates() -> Outcome {
    let n = |m, s| ScalarDistribution::normal(m, s).unwrap();
    let l = |m, s| ScalarDistribution::logistic(m, s).unwrap();
    let unit = ParameterBox::new(vec![0.1], vec![0.9]).unwrap();
    let mixtures = [
        ("mixture N(-2,1)|N(2,1)", CostFamily::mixture_linear(vec![n(-2.0, 1.0), n(2.0, 1.0)], unit.clone()).unwrap()),
        ("mixture L(0,1)|N(1,0.5)", CostFamily::mixture_linear(vec![l(0.0, 1.0), n(1.0, 0.5)], unit).unwrap()),
        ("mixture k=2", two_parameter_mixture_family()),
    ];
    let box1 = ParameterBox::new(vec![-3.0], vec![3.0]).unwrap();
    let locations = [
        ("normal location", CostFamily::location(n(0.0, 1.0), box1.clone()).unwrap()),
        ("logistic location", CostFamily::location(l(0.0, 1.0), box1).unwrap()),
    ];
    let mut c = Checks::default();
    for (name, fam) in &mixtures {
        let cert = certify(fam);
        c.add(
            cert.smooth_ok && cert.linear_ok && cert.responsive_ok,
            format!("{name}: smooth {} linear {} responsive {}", cert.smooth_ok, cert.linear_ok, cert.responsive_ok),
        );
    }
    for (name, fam) in &locations {
        let cert = certify(fam);
        c.add(
            cert.smooth_ok && !cert.linear_ok && cert.responsive_ok,
            format!(
                "{name}: smooth {} linear {} (blend error {:.3e}) responsive {}",
                cert.smooth_ok, cert.linear_ok, cert.linearity.statistic, cert.responsive_ok
            ),
        );
    }
    c.finish()
}

// 9. Two CLI sweeps with identical config write identical bytes.
fn reproducible_outputs() -> Outcome {
    let root = std::env::temp_dir().join(format!("threshold-lab-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&root);
    std::fs::create_dir_all(&root).unwrap();
    let config = root.join("sweep.json");
    std::fs::write(
        &config,
        r#"{
  "signal_pair": {"g0": {"kind": "normal", "params": [-1, 1]}, "g1": {"kind": "normal", "params": [1, 1]}},
  "cost_family": {"kind": "location", "template": {"kind": "logistic", "params": [0, 1]},
                  "box": {"lower": [-3], "upper": [3]}},
  "reward": 1,
  "sweep": {"n_samples": 10000, "tolerances": [0.1, 0.01, 0.001], "seed": 7}
}"#,
    )
    .unwrap();
    let run = |dir: &Path, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_threshold-lab"))
            .args(["sweep", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(dir)
            .env("THRESHOLD_LAB_THREADS", threads)
            .output()
            .expect("binary runs")
    };
    let (a, b) = (root.join("a"), root.join("b"));
    let (ra, rb) = (run(&a, "1"), run(&b, "4"));
    let mut c = Checks::default();
    c.add(ra.status.success() && rb.status.success(), format!("exit status {:?} / {:?}", ra.status.code(), rb.status.code()));
    c.add(ra.stdout == rb.stdout, "stdout summaries identical");
    for file in ["samples.csv", "summary.json", "fraction.dat"] {
        let same = match (std::fs::read(a.join(file)), std::fs::read(b.join(file))) {
            (Ok(x), Ok(y)) => !x.is_empty() && x == y,
            _ => false,
        };
        c.add(same, format!("{file} byte-identical (1 vs 4 threads)"));
    }
    let _ = std::fs::remove_dir_all(&root);
    c.finish()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("compliance optimum is 0 across the suite", compliance_optimum_is_zero),
        ("positive rule dominates; gap vanishes only at infinity", positive_rule_dominates),
        ("payoff slope identity", derivative_identity),
        ("worked example", worked_example),
        ("equivalence pinpoint", equivalence_pinpoint),
        ("coincidence fractions vanish with tolerance", measure_zero_at_desk_scale),
        ("negative control", negative_control),
        ("family certificates", certificates),
        ("sweep reproducibility", reproducible_outputs),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| Outcome::new(false, "panicked"));
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {} [{:.2}s] -- {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
