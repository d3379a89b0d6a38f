//! Numerical laboratory for a principal-agent model with threshold reward
//! rules.
//!
//! A principal observes a real-valued signal drawn from `G1` if the agent
//! complied and from `G0` otherwise, and rewards the agent (reward `r`)
//! according to a threshold rule. Agents with cost `c ~ F` comply when the
//! rule's incentive exceeds their cost. The crate computes equilibrium
//! prevalence, the principal's accuracy payoff, the compliance-optimal and
//! accuracy-optimal thresholds, and Monte Carlo evidence that the two
//! optima coincide only on a measure-zero set of cost-family parameters.
//!
//! Modules, bottom-up:
//! - [`dist`]: distributions with closed-form CDF, density and slope.
//! - [`signal`]: admissible signal pairs and their normalization.
//! - [`family`]: parameterized cost families and their certificates.
//! - [`equilibrium`]: prevalence, payoff and its derivative.
//! - [`optimize`]: optimal thresholds and the equivalence test.
//! - [`genericity`]: parameter sweeps over cost families.

pub mod dist;
pub mod equilibrium;
pub mod error;
pub mod family;
pub mod genericity;
pub mod grid;
pub mod optimize;
pub mod scalar;
pub mod signal;
pub mod special;
pub mod suite;

pub use dist::{derivative_consistency, make_distribution, Density, DistributionKind, ExtendedReal, ScalarDistribution};
pub use equilibrium::{deu_pos, eu_pos, foc_at_zero, prevalence_neg, prevalence_pos, prevalence_report, ModelConfig, PrevalenceReport};
pub use error::{Error, Result};
pub use family::{
    certify, certify_with, check_linearity, check_responsiveness, check_smoothness, CertifyOptions, CostFamily,
    FamilyCertificate, FamilyKind, ParameterBox,
};
pub use genericity::{
    coincidence_fraction, sample_parameters, scaling_report, ScalingReport, SweepMode, SweepResult, SweepSpec, Verdict,
};
pub use optimize::{
    accuracy_optimal, accuracy_optimal_in, compliance_optimal, compliance_optimal_in, equivalence_test,
    equivalence_test_in, EquivalenceVerdict, OptMethod, OptResult, SearchWindow,
};
pub use signal::{check_admissible, check_mlrp, find_crossing, normalize_pair, AdmissibilityReport, SignalPair};
