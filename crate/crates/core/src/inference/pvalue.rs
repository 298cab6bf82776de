use super::statistic::{DeltaSource, PreparedStatistic, StatisticKind, TestStatisticSpec};
use crate::error::{Error, Result};
use crate::graph::{cross_link_matrix, degree_sequence, AdjacencyMatrix, GroupAssignment, TRANSITIVITY_LABEL};
use crate::io::Fixed17;
use crate::model::{mle_null, systematic_utility, ConvergenceReport};
use crate::rng::substream;
use crate::sampler::{enumerate_reference_set, parallel_draws, tau_from_pilot, ChainConfig, ChainStats};
use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const DENSITY_STREAM: u64 = 0xDE5;

/// Reference set the observed network is compared against, from the
/// loosest to the tightest conditioning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Same number of arcs.
    DensityOnly,
    /// Same in- and out-degrees.
    DegreeOnly,
    /// Same degrees and cross-link matrix.
    DegreeAndCrosslink,
    /// Same as `DegreeAndCrosslink`, listed exhaustively.
    Enumerated,
}

impl Reference {
    pub fn name(&self) -> &'static str {
        match self {
            Reference::DensityOnly => "density_only",
            Reference::DegreeOnly => "degree_only",
            Reference::DegreeAndCrosslink => "degree_and_crosslink",
            Reference::Enumerated => "enumerated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauChoice {
    Fixed(usize),
    /// Pilot-based: about `r` modifications per arc.
    Auto { r: f64, pilot_steps: usize },
}

pub const DEFAULT_PILOT_STEPS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestOptions {
    pub reference: Reference,
    pub draws: usize,
    pub tau: TauChoice,
    pub q: f64,
    pub seed: u64,
}

/// Networks drawn from a reference set together with the chain settings
/// that produced them.
#[derive(Clone, Debug)]
pub struct ReferenceSample {
    pub networks: Vec<AdjacencyMatrix>,
    /// 0 when no chain was run.
    pub tau: usize,
    pub stats: Option<ChainStats>,
}

/// Draws `opts.draws` networks from the chosen reference set (all of it
/// for `Enumerated`).
pub fn reference_sample(d: &AdjacencyMatrix, g: &GroupAssignment, opts: &TestOptions) -> Result<ReferenceSample> {
    g.check_len(d.n_nodes())?;
    let n = d.n_nodes();
    match opts.reference {
        Reference::Enumerated => {
            let networks = enumerate_reference_set(&degree_sequence(d), &cross_link_matrix(d, g), g)?;
            Ok(ReferenceSample { networks, tau: 0, stats: None })
        }
        Reference::DensityOnly => {
            if opts.draws == 0 {
                return Err(Error::invalid("draws must be at least 1"));
            }
            let cells = n * n.saturating_sub(1);
            let arcs = d.arc_count();
            let networks = (0..opts.draws)
                .into_par_iter()
                .map(|b| {
                    let mut rng = substream(opts.seed, &[DENSITY_STREAM, b as u64]);
                    let mut m = AdjacencyMatrix::empty(n);
                    for cell in sample_indices(&mut rng, cells, arcs).iter() {
                        let (i, r) = (cell / (n - 1), cell % (n - 1));
                        m.set(i, if r >= i { r + 1 } else { r }, true);
                    }
                    m
                })
                .collect();
            Ok(ReferenceSample { networks, tau: 0, stats: None })
        }
        Reference::DegreeOnly | Reference::DegreeAndCrosslink => {
            if opts.draws == 0 {
                return Err(Error::invalid("draws must be at least 1"));
            }
            let single;
            let groups = if opts.reference == Reference::DegreeOnly {
                single = GroupAssignment::single(n);
                &single
            } else {
                g
            };
            let tau = match opts.tau {
                TauChoice::Fixed(t) => t,
                TauChoice::Auto { r, pilot_steps } => tau_from_pilot(d, groups, opts.q, opts.seed, pilot_steps, r)?.0,
            };
            let cfg = ChainConfig::new(tau, opts.q, opts.seed)?;
            let (networks, stats) = parallel_draws(d, groups, &cfg, opts.draws)?;
            Ok(ReferenceSample { networks, tau, stats: Some(stats) })
        }
    }
}

/// Resolves the nuisance parameters of a statistic, fitting the null
/// model on `d` when requested.
pub fn prepare_statistic(
    spec: &TestStatisticSpec,
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
) -> Result<(PreparedStatistic, Option<ConvergenceReport>)> {
    match spec.kind {
        StatisticKind::TransitivityIndex => Ok((PreparedStatistic::TransitivityIndex, None)),
        StatisticKind::ReciprocityIndex => Ok((PreparedStatistic::ReciprocityIndex, None)),
        StatisticKind::LocallyBest => {
            let strategic = spec
                .strategic
                .clone()
                .ok_or_else(|| Error::invalid("the locally best statistic needs a strategic spec"))?;
            let (delta, report) = match &spec.delta_source {
                DeltaSource::Provided(p) => {
                    p.check_dims(d.n_nodes(), g)?;
                    (p.clone(), None)
                }
                DeltaSource::Fitted => {
                    let fit = mle_null(d, g)?;
                    let report = fit.report();
                    (fit.params, Some(report))
                }
            };
            Ok((PreparedStatistic::LocallyBest { mu: systematic_utility(&delta, g), spec: strategic }, report))
        }
    }
}

/// Tolerance under which a null value counts as tied with `observed`.
pub fn tie_tolerance(observed: f64) -> f64 {
    1e-9 * observed.abs().max(1.0)
}

/// Summary of a null sample relative to an observed value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullComparison {
    /// Add-one p-value over the valid draws.
    pub p_value: f64,
    /// Fraction of valid draws not exceeding the observed value.
    pub quantile: f64,
    pub at_least: usize,
    pub valid: usize,
    pub missing: usize,
}

/// NaN draws are treated as missing. A NaN observed value yields NaN
/// summaries.
pub fn compare_with_null(observed: f64, null: &[f64]) -> NullComparison {
    let tol = tie_tolerance(observed);
    let valid: Vec<f64> = null.iter().copied().filter(|v| !v.is_nan()).collect();
    let missing = null.len() - valid.len();
    if observed.is_nan() {
        return NullComparison { p_value: f64::NAN, quantile: f64::NAN, at_least: 0, valid: valid.len(), missing };
    }
    let at_least = valid.iter().filter(|&&v| v >= observed - tol).count();
    let at_most = valid.iter().filter(|&&v| v <= observed + tol).count();
    NullComparison {
        p_value: (1 + at_least) as f64 / (valid.len() + 1) as f64,
        quantile: if valid.is_empty() { f64::NAN } else { at_most as f64 / valid.len() as f64 },
        at_least,
        valid: valid.len(),
        missing,
    }
}

/// The exact conditional p-value over a complete reference set that
/// contains the observed network.
pub fn exact_p_value(observed: f64, all_values: &[f64]) -> f64 {
    let tol = tie_tolerance(observed);
    let hits = all_values.iter().filter(|&&v| v >= observed - tol).count();
    hits as f64 / all_values.len() as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub acceptance_rate: Fixed17,
    pub per_arc_modifications: Fixed17,
    pub missing_draws: usize,
}

/// Outcome of one conditional test.
#[derive(Clone, Debug)]
pub struct TestResult {
    pub statistic: String,
    pub strategic_spec: Option<String>,
    pub observed: f64,
    pub null_draws: Vec<f64>,
    pub p_value: f64,
    pub quantile: f64,
    pub reference: Reference,
    pub tau: usize,
    pub q: f64,
    pub seed: u64,
    pub acceptance_rate: f64,
    pub per_arc_modifications: f64,
    pub missing_draws: usize,
    pub mle: Option<ConvergenceReport>,
}

#[derive(Serialize)]
pub struct TestResultRecord<'a> {
    pub statistic: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategic_spec: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic_label: Option<&'a str>,
    pub observed: Fixed17,
    pub p_value: Fixed17,
    pub quantile: Fixed17,
    pub reference: &'a str,
    pub draws: usize,
    pub tau: usize,
    pub q: Fixed17,
    pub seed: u64,
    pub delta_refit: bool,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle: Option<&'a ConvergenceReport>,
}

impl TestResult {
    pub fn record(&self) -> TestResultRecord<'_> {
        TestResultRecord {
            statistic: &self.statistic,
            strategic_spec: self.strategic_spec.as_deref(),
            statistic_label: (self.statistic == StatisticKind::TransitivityIndex.name()).then_some(TRANSITIVITY_LABEL),
            observed: Fixed17(self.observed),
            p_value: Fixed17(self.p_value),
            quantile: Fixed17(self.quantile),
            reference: self.reference.name(),
            draws: self.null_draws.len(),
            tau: self.tau,
            q: Fixed17(self.q),
            seed: self.seed,
            delta_refit: false,
            diagnostics: Diagnostics {
                acceptance_rate: Fixed17(self.acceptance_rate),
                per_arc_modifications: Fixed17(self.per_arc_modifications),
                missing_draws: self.missing_draws,
            },
            mle: self.mle.as_ref(),
        }
    }
}

/// Compares the statistic on `d` with its distribution over the reference
/// set. The statistic is fixed before any draw is taken.
pub fn conditional_p_value(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    stat: &TestStatisticSpec,
    opts: &TestOptions,
) -> Result<TestResult> {
    let (prepared, mle) = prepare_statistic(stat, d, g)?;
    let sample = reference_sample(d, g, opts)?;
    let observed = prepared.evaluate(d);
    let null_draws: Vec<f64> = sample.networks.par_iter().map(|m| prepared.evaluate(m)).collect();
    let cmp = compare_with_null(observed, &null_draws);
    let p_value = if opts.reference == Reference::Enumerated {
        exact_p_value(observed, &null_draws)
    } else {
        cmp.p_value
    };
    let (acceptance_rate, per_arc) = match &sample.stats {
        Some(s) => (s.acceptance_rate(), s.per_arc_modifications(d.arc_count()) / sample.networks.len() as f64),
        None => (f64::NAN, f64::NAN),
    };
    Ok(TestResult {
        statistic: stat.kind.name().to_string(),
        strategic_spec: stat.strategic.as_ref().map(|s| s.name().to_string()),
        observed,
        null_draws,
        p_value,
        quantile: cmp.quantile,
        reference: opts.reference,
        tau: sample.tau,
        q: opts.q,
        seed: opts.seed,
        acceptance_rate,
        per_arc_modifications: per_arc,
        missing_draws: cmp.missing,
        mle,
    })
}
