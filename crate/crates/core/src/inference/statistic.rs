use crate::graph::{reciprocity_index, transitivity_index, AdjacencyMatrix, GroupAssignment};
use crate::model::logistic::{cdf, pdf, sf};
use crate::model::{systematic_utility, NuisanceParams, StrategicSpec, SystematicUtility};

/// `sum_{i != j} (d_ij - F(mu_ij)) s_ij(d)`.
pub fn locally_best_statistic(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    delta: &NuisanceParams,
    spec: &StrategicSpec,
) -> f64 {
    locally_best_from_utility(d, &systematic_utility(delta, g), spec)
}

pub fn locally_best_from_utility(d: &AdjacencyMatrix, mu: &SystematicUtility, spec: &StrategicSpec) -> f64 {
    let n = d.n_nodes();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let s = spec.value(d, i, j);
            if s != 0 {
                total += (d.entry(i, j) as f64 - cdf(mu.get(i, j))) * s as f64;
            }
        }
    }
    total
}

/// Score at `gamma = 0` assembled from the bucket decomposition: the
/// all-outer term contributes `s_min f/F` for present arcs and
/// `-s_max f/(1-F)` for absent ones; the single-inner term contributes
/// `(s - s_min) f/F` and `(s_max - s) f/(1-F)` respectively.
pub fn theorem2_derivative(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    delta: &NuisanceParams,
    spec: &StrategicSpec,
) -> f64 {
    let mu = systematic_utility(delta, g);
    let n = d.n_nodes();
    let (s_lo, s_hi) = spec.bounds(n);
    let (s_lo, s_hi) = (s_lo as f64, s_hi as f64);
    let mut outer = 0.0;
    let mut inner = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = mu.get(i, j);
            let s = spec.value(d, i, j) as f64;
            let f = pdf(m);
            if d.get(i, j) {
                let w = f / cdf(m);
                outer += s_lo * w;
                inner += (s - s_lo) * w;
            } else {
                let w = f / sf(m);
                outer -= s_hi * w;
                inner += (s_hi - s) * w;
            }
        }
    }
    outer + inner
}

/// Which statistic a test evaluates on each network.
#[derive(Clone, Debug)]
pub enum StatisticKind {
    LocallyBest,
    TransitivityIndex,
    ReciprocityIndex,
}

impl StatisticKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::LocallyBest => "locally_best",
            StatisticKind::TransitivityIndex => "transitivity_index",
            StatisticKind::ReciprocityIndex => "reciprocity_index",
        }
    }
}

/// Source of the nuisance parameters used by the locally best statistic.
#[derive(Clone, Debug)]
pub enum DeltaSource {
    /// Null MLE on the observed network, held fixed across draws.
    Fitted,
    Provided(NuisanceParams),
}

#[derive(Clone, Debug)]
pub struct TestStatisticSpec {
    pub kind: StatisticKind,
    pub strategic: Option<StrategicSpec>,
    pub delta_source: DeltaSource,
}

impl TestStatisticSpec {
    pub fn locally_best(spec: StrategicSpec, delta_source: DeltaSource) -> Self {
        TestStatisticSpec { kind: StatisticKind::LocallyBest, strategic: Some(spec), delta_source }
    }

    pub fn transitivity_index() -> Self {
        TestStatisticSpec {
            kind: StatisticKind::TransitivityIndex,
            strategic: None,
            delta_source: DeltaSource::Fitted,
        }
    }

    pub fn reciprocity_index() -> Self {
        TestStatisticSpec {
            kind: StatisticKind::ReciprocityIndex,
            strategic: None,
            delta_source: DeltaSource::Fitted,
        }
    }
}

/// A statistic with all data-dependent inputs resolved, ready to be
/// evaluated on many networks.
#[derive(Clone, Debug)]
pub enum PreparedStatistic {
    LocallyBest { mu: SystematicUtility, spec: StrategicSpec },
    TransitivityIndex,
    ReciprocityIndex,
}

impl PreparedStatistic {
    pub fn evaluate(&self, d: &AdjacencyMatrix) -> f64 {
        match self {
            PreparedStatistic::LocallyBest { mu, spec } => locally_best_from_utility(d, mu, spec),
            PreparedStatistic::TransitivityIndex => transitivity_index(d),
            PreparedStatistic::ReciprocityIndex => reciprocity_index(d),
        }
    }
}
