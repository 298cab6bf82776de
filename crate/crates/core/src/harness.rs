//! Size and power experiments for the conditional tests.
//!
//! Each replication draws agent types, simulates a network (the least dense
//! equilibrium, which is the null network at `gamma = 0`), draws one set of
//! reference networks and evaluates every configured statistic on it.

use crate::error::{Error, Result};
use crate::graph::{transitivity_index, AdjacencyMatrix, GroupAssignment};
use crate::inference::{
    compare_with_null, reference_sample, PreparedStatistic, Reference, TauChoice, TestOptions, DEFAULT_PILOT_STEPS,
};
use crate::io::fmt17;
use crate::model::logistic::cdf;
use crate::model::{
    equilibrium_from_shocks, mle_null, simulate_null, systematic_utility, NuisanceParams, StrategicSpec,
    UtilityShockMatrix,
};
use crate::rng::{derive_seed, substream};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

const REPLICATION_STREAM: u64 = 0x4E9;
const CHAIN_STREAM: u64 = 0xC4A;
const SUMMARY_STREAM: u64 = 0x5A3;

pub const HIGH: f64 = 1.1;
pub const LOW: f64 = -1.1;
pub const CROSS_GROUP: f64 = -2.2;

/// One agent type: sender effect, receiver effect and group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypePoint {
    pub a: f64,
    pub b: f64,
    pub group: usize,
}

/// Finite distribution of agent types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub support: Vec<TypePoint>,
    pub weights: Vec<f64>,
}

impl Default for Population {
    /// Each of the eight combinations of high/low sender effect, high/low
    /// receiver effect and group 0/1 with probability 1/8.
    fn default() -> Self {
        let mut support = Vec::with_capacity(8);
        for a in [LOW, HIGH] {
            for b in [LOW, HIGH] {
                for group in 0..2 {
                    support.push(TypePoint { a, b, group });
                }
            }
        }
        Population { weights: vec![1.0; support.len()], support }
    }
}

impl Population {
    fn validate(&self, k: usize) -> Result<()> {
        if self.support.is_empty() || self.support.len() != self.weights.len() {
            return Err(Error::invalid("population support and weights must be nonempty and of equal length"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("population weights must be nonnegative with a positive sum"));
        }
        if self.support.iter().any(|t| t.group >= k || !t.a.is_finite() || !t.b.is_finite()) {
            return Err(Error::invalid("population type outside the lambda dimensions or not finite"));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> TypePoint {
        let total: f64 = self.weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (t, w) in self.support.iter().zip(&self.weights) {
            if u < *w {
                return *t;
            }
            u -= w;
        }
        *self.support.last().expect("nonempty")
    }

    /// Draws `n` agents and returns their groups and nuisance parameters.
    pub fn draw_agents<R: Rng + ?Sized>(
        &self,
        n: usize,
        lambda: &[Vec<f64>],
        rng: &mut R,
    ) -> Result<(GroupAssignment, NuisanceParams)> {
        let types: Vec<TypePoint> = (0..n).map(|_| self.draw(rng)).collect();
        let g = GroupAssignment::new(types.iter().map(|t| t.group).collect(), lambda.len())?;
        let delta = NuisanceParams::new(
            lambda.to_vec(),
            types.iter().map(|t| t.a).collect(),
            types.iter().map(|t| t.b).collect(),
        )?;
        Ok((g, delta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HarnessStatistic {
    /// Locally best statistic at the true nuisance parameters.
    InfeasibleLocallyBest,
    /// Locally best statistic at the null MLE.
    FeasibleLocallyBest,
    TransitivityIndex,
}

impl HarnessStatistic {
    pub fn name(&self) -> &'static str {
        match self {
            HarnessStatistic::InfeasibleLocallyBest => "infeasible_locally_best",
            HarnessStatistic::FeasibleLocallyBest => "feasible_locally_best",
            HarnessStatistic::TransitivityIndex => "transitivity_index",
        }
    }
}

/// Default grid of interaction strengths for the transitivity design.
pub const DEFAULT_GAMMAS: [f64; 5] = [0.0, 0.05, 0.1, 0.15, 0.2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_nodes: usize,
    pub gammas: Vec<f64>,
    pub replications: usize,
    pub draws_per_test: usize,
    pub alpha: f64,
    pub statistics: Vec<HarnessStatistic>,
    pub seed: u64,
    pub population: Population,
    pub lambda: Vec<Vec<f64>>,
    pub strategic: String,
    pub tau: TauChoice,
    pub q: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_nodes: 24,
            gammas: DEFAULT_GAMMAS.to_vec(),
            replications: 200,
            draws_per_test: 200,
            alpha: 0.05,
            statistics: vec![
                HarnessStatistic::InfeasibleLocallyBest,
                HarnessStatistic::FeasibleLocallyBest,
                HarnessStatistic::TransitivityIndex,
            ],
            seed: 0,
            population: Population::default(),
            lambda: vec![vec![0.0, CROSS_GROUP], vec![CROSS_GROUP, 0.0]],
            strategic: "transitivity".into(),
            tau: TauChoice::Auto { r: 10.0, pilot_steps: DEFAULT_PILOT_STEPS },
            q: crate::sampler::DEFAULT_Q,
        }
    }
}

impl ExperimentConfig {
    /// The published scale: 1000 replications and 400 reference draws.
    pub fn full_scale(n_nodes: usize) -> Self {
        ExperimentConfig { n_nodes, replications: 1000, draws_per_test: 400, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 3 {
            return Err(Error::invalid("n_nodes must be at least 3"));
        }
        if self.replications == 0 || self.draws_per_test == 0 {
            return Err(Error::invalid("replications and draws_per_test must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("gammas must be a nonempty list of finite values"));
        }
        if self.statistics.is_empty() {
            return Err(Error::invalid("no statistics configured"));
        }
        let k = self.lambda.len();
        if k == 0 || self.lambda.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("lambda must be a nonempty square matrix"));
        }
        self.population.validate(k)?;
        StrategicSpec::from_name(&self.strategic)?;
        crate::sampler::ChainConfig::new(1, self.q, 0)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerRow {
    pub gamma: f64,
    pub statistic: HarnessStatistic,
    pub reject_rate: f64,
    pub se: f64,
    /// Replications that produced a decision.
    pub reps: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    pub fn row(&self, gamma: f64, statistic: HarnessStatistic) -> Option<&PowerRow> {
        self.rows.iter().find(|r| r.gamma == gamma && r.statistic == statistic)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io_err = |e: std::io::Error| Error::Io { path: path.display().to_string(), source: e };
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e.into() })?;
        let csv_err = |e: csv::Error| io_err(e.into());
        w.write_record(["gamma", "statistic", "reject_rate", "se", "reps", "failures"]).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                fmt17(r.gamma),
                r.statistic.name().to_string(),
                fmt17(r.reject_rate),
                fmt17(r.se),
                r.reps.to_string(),
                r.failures.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Decision of one statistic in one replication; `None` when it could not
/// be computed.
type Decisions = Vec<Option<bool>>;

fn replication(cfg: &ExperimentConfig, spec: &StrategicSpec, gi: usize, rep: usize) -> Decisions {
    let fail = vec![None; cfg.statistics.len()];
    let gamma = cfg.gammas[gi];
    let mut rng = substream(cfg.seed, &[REPLICATION_STREAM, gi as u64, rep as u64]);
    let Ok((g, delta)) = cfg.population.draw_agents(cfg.n_nodes, &cfg.lambda, &mut rng) else {
        return fail;
    };
    let mu = systematic_utility(&delta, &g);
    let u = UtilityShockMatrix::draw(cfg.n_nodes, &mut rng);
    let Ok((d, _)) = equilibrium_from_shocks(&mu, gamma, spec, &u) else {
        return fail;
    };
    let opts = TestOptions {
        reference: Reference::DegreeAndCrosslink,
        draws: cfg.draws_per_test,
        tau: cfg.tau,
        q: cfg.q,
        seed: derive_seed(cfg.seed, &[CHAIN_STREAM, gi as u64, rep as u64]),
    };
    let Ok(sample) = reference_sample(&d, &g, &opts) else {
        return fail;
    };
    let fitted = cfg
        .statistics
        .contains(&HarnessStatistic::FeasibleLocallyBest)
        .then(|| mle_null(&d, &g).ok())
        .flatten();
    cfg.statistics
        .iter()
        .map(|s| {
            let prepared = match s {
                HarnessStatistic::InfeasibleLocallyBest => {
                    PreparedStatistic::LocallyBest { mu: mu.clone(), spec: spec.clone() }
                }
                HarnessStatistic::FeasibleLocallyBest => PreparedStatistic::LocallyBest {
                    mu: systematic_utility(&fitted.as_ref()?.params, &g),
                    spec: spec.clone(),
                },
                HarnessStatistic::TransitivityIndex => PreparedStatistic::TransitivityIndex,
            };
            let observed = prepared.evaluate(&d);
            let null: Vec<f64> = sample.networks.iter().map(|m| prepared.evaluate(m)).collect();
            let cmp = compare_with_null(observed, &null);
            (!cmp.p_value.is_nan()).then_some(cmp.p_value <= cfg.alpha)
        })
        .collect()
}

/// Rejection frequencies for every configured `gamma` and statistic.
/// Deterministic given the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PowerTable> {
    cfg.validate()?;
    let spec = StrategicSpec::from_name(&cfg.strategic)?;
    let mut rows = Vec::new();
    for gi in 0..cfg.gammas.len() {
        let decisions: Vec<Decisions> =
            (0..cfg.replications).into_par_iter().map(|rep| replication(cfg, &spec, gi, rep)).collect();
        for (si, &statistic) in cfg.statistics.iter().enumerate() {
            let made: Vec<bool> = decisions.iter().filter_map(|d| d[si]).collect();
            let reps = made.len();
            let rate = if reps == 0 { f64::NAN } else { made.iter().filter(|&&x| x).count() as f64 / reps as f64 };
            rows.push(PowerRow {
                gamma: cfg.gammas[gi],
                statistic,
                reject_rate: rate,
                se: (rate * (1.0 - rate) / reps as f64).sqrt(),
                reps,
                failures: cfg.replications - reps,
            });
        }
    }
    Ok(PowerTable { rows })
}

/// The six calibrated link probabilities of the design.
pub fn table1_calibration() -> Vec<(&'static str, f64)> {
    vec![
        ("F(a_H + b_H + lambda_00)", cdf(HIGH + HIGH)),
        ("F(a_H + b_L + lambda_00)", cdf(HIGH + LOW)),
        ("F(a_L + b_L + lambda_00)", cdf(LOW + LOW)),
        ("F(a_H + b_H + lambda_01)", cdf(HIGH + HIGH + CROSS_GROUP)),
        ("F(a_H + b_L + lambda_01)", cdf(HIGH + LOW + CROSS_GROUP)),
        ("F(a_L + b_L + lambda_01)", cdf(LOW + LOW + CROSS_GROUP)),
    ]
}

/// Averages over null networks of the default design.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DesignSummary {
    pub density: f64,
    pub transitivity: f64,
    pub in_degree_sd: f64,
    pub out_degree_sd: f64,
}

fn population_sd(xs: impl Iterator<Item = usize> + Clone) -> f64 {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<usize>() as f64 / n;
    (xs.map(|x| (x as f64 - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub fn null_design_summary(n: usize, reps: usize, seed: u64) -> Result<DesignSummary> {
    let cfg = ExperimentConfig::default();
    let per_rep: Vec<Result<[f64; 4]>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, &[SUMMARY_STREAM, r as u64]);
            let (g, delta) = cfg.population.draw_agents(n, &cfg.lambda, &mut rng)?;
            let d: AdjacencyMatrix = simulate_null(&delta, &g, &mut rng);
            Ok([
                d.density(),
                transitivity_index(&d),
                population_sd((0..n).map(|j| d.in_degree(j))),
                population_sd((0..n).map(|i| d.out_degree(i))),
            ])
        })
        .collect();
    let mut sums = [0.0; 4];
    for r in per_rep {
        for (s, v) in sums.iter_mut().zip(r?) {
            *s += v;
        }
    }
    let m = reps as f64;
    Ok(DesignSummary {
        density: sums[0] / m,
        transitivity: sums[1] / m,
        in_degree_sd: sums[2] / m,
        out_degree_sd: sums[3] / m,
    })
}
