use super::logistic;
use super::params::{systematic_utility, NuisanceParams, SystematicUtility};
use super::strategic::StrategicSpec;
use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GroupAssignment};
use rand::Rng;
use std::collections::HashSet;

/// Iid standard logistic shocks `u_ij`; the diagonal is unused.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityShockMatrix {
    n: usize,
    u: Vec<f64>,
}

impl UtilityShockMatrix {
    pub fn draw<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut u = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    u[i * n + j] = logistic::sample(rng);
                }
            }
        }
        UtilityShockMatrix { n, u }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut u = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    u[i * n + j] = f(i, j);
                }
            }
        }
        UtilityShockMatrix { n, u }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.n + j]
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }
}

/// Null link rule `d_ij = 1(mu_ij >= u_ij)` for given shocks.
pub fn simulate_null_with_shocks(mu: &SystematicUtility, u: &UtilityShockMatrix) -> AdjacencyMatrix {
    AdjacencyMatrix::from_fn(mu.n_nodes(), |i, j| mu.get(i, j) >= u.get(i, j))
}

/// A network from the null model: independent arcs with probability
/// `F(mu_ij)`.
pub fn simulate_null<R: Rng + ?Sized>(
    delta: &NuisanceParams,
    g: &GroupAssignment,
    rng: &mut R,
) -> AdjacencyMatrix {
    let mu = systematic_utility(delta, g);
    let u = UtilityShockMatrix::draw(delta.n_nodes(), rng);
    simulate_null_with_shocks(&mu, &u)
}

/// Best-response map applied to every arc at once.
fn best_response(
    d: &AdjacencyMatrix,
    mu: &SystematicUtility,
    gamma: f64,
    spec: &StrategicSpec,
    u: &UtilityShockMatrix,
) -> AdjacencyMatrix {
    AdjacencyMatrix::from_fn(d.n_nodes(), |i, j| {
        mu.get(i, j) + gamma * spec.value(d, i, j) as f64 >= u.get(i, j)
    })
}

/// Whether every arc of `d` is a best response given the rest of `d`.
pub fn is_pure_nash(
    d: &AdjacencyMatrix,
    mu: &SystematicUtility,
    gamma: f64,
    spec: &StrategicSpec,
    u: &UtilityShockMatrix,
) -> bool {
    &best_response(d, mu, gamma, spec, u) == d
}

/// Iterates the best-response map from the empty network. Under a
/// monotone term with `gamma >= 0` the sequence increases to the least
/// dense equilibrium; otherwise a revisited state means no fixed point is
/// reached and an error is returned.
pub fn equilibrium_from_shocks(
    mu: &SystematicUtility,
    gamma: f64,
    spec: &StrategicSpec,
    u: &UtilityShockMatrix,
) -> Result<(AdjacencyMatrix, usize)> {
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma must be finite"));
    }
    let n = mu.n_nodes();
    let monotone = spec.is_monotone() && gamma >= 0.0;
    let mut d = AdjacencyMatrix::empty(n);
    let mut seen: HashSet<AdjacencyMatrix> = HashSet::new();
    let limit = n * n.saturating_sub(1) + 1;
    for sweep in 1.. {
        let next = best_response(&d, mu, gamma, spec, u);
        if next == d {
            return Ok((d, sweep));
        }
        if monotone {
            debug_assert!(d.to_edge_list().iter().all(|&(i, j)| next.get(i, j)));
            if sweep > limit {
                return Err(Error::NoFixedPoint);
            }
        } else if !seen.insert(d) {
            return Err(Error::NoFixedPoint);
        }
        d = next;
    }
    unreachable!()
}

/// Least dense pure-strategy equilibrium for freshly drawn shocks.
pub fn simulate_alternative<R: Rng + ?Sized>(
    gamma: f64,
    delta: &NuisanceParams,
    spec: &StrategicSpec,
    g: &GroupAssignment,
    rng: &mut R,
) -> Result<AdjacencyMatrix> {
    delta.check_dims(g.n_nodes(), g)?;
    let mu = systematic_utility(delta, g);
    let u = UtilityShockMatrix::draw(delta.n_nodes(), rng);
    Ok(equilibrium_from_shocks(&mu, gamma, spec, &u)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GroupAssignment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn strongly_negative_utilities_give_empty_graph() {
        let p = NuisanceParams::new(vec![vec![-1e6]], vec![0.0; 5], vec![0.0; 5]).unwrap();
        let d = simulate_null(&p, &GroupAssignment::single(5), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(d.arc_count(), 0);
    }

    #[test]
    fn zero_utilities_give_half_density() {
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = GroupAssignment::single(n);
        let p = NuisanceParams::zeros(n, 1);
        let reps = 20;
        let arcs: usize = (0..reps).map(|_| simulate_null(&p, &g, &mut rng).arc_count()).sum();
        let trials = (reps * n * (n - 1)) as f64;
        let se = (0.25 / trials).sqrt();
        assert!((arcs as f64 / trials - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn zero_gamma_matches_null_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 15;
        let mu = SystematicUtility::from_fn(n, |i, j| ((i * 3 + j) % 5) as f64 - 2.0);
        for _ in 0..10 {
            let u = UtilityShockMatrix::draw(n, &mut rng);
            let (d, _) = equilibrium_from_shocks(&mu, 0.0, &StrategicSpec::transitivity(), &u).unwrap();
            assert_eq!(d, simulate_null_with_shocks(&mu, &u));
        }
    }

    #[test]
    fn outputs_are_equilibria() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 12;
        let mu = SystematicUtility::from_fn(n, |i, j| ((i + 2 * j) % 4) as f64 - 2.5);
        for spec in [StrategicSpec::reciprocity(), StrategicSpec::transitivity(), StrategicSpec::customer_product()] {
            for gamma in [0.0, 0.3, 1.0] {
                let u = UtilityShockMatrix::draw(n, &mut rng);
                let (d, sweeps) = equilibrium_from_shocks(&mu, gamma, &spec, &u).unwrap();
                assert!(is_pure_nash(&d, &mu, gamma, &spec, &u));
                assert!(sweeps <= n * (n - 1) + 1);
            }
        }
    }

    #[test]
    fn doubly_inner_dyad_stays_empty() {
        // Both shocks lie in (mu, mu + gamma]: empty and mutual are both
        // equilibria; iteration from empty selects the empty dyad.
        let mu = SystematicUtility::from_fn(2, |_, _| 0.0);
        let u = UtilityShockMatrix::from_fn(2, |_, _| 0.5);
        let (d, _) = equilibrium_from_shocks(&mu, 1.0, &StrategicSpec::reciprocity(), &u).unwrap();
        assert_eq!(d.arc_count(), 0);
        let full = AdjacencyMatrix::complete(2);
        assert!(is_pure_nash(&full, &mu, 1.0, &StrategicSpec::reciprocity(), &u));
    }

    #[test]
    fn anti_coordination_without_pure_path_is_detected() {
        // With gamma < 0 and both shocks inner, best responses oscillate
        // between empty and mutual under simultaneous updating.
        let mu = SystematicUtility::from_fn(2, |_, _| 0.0);
        let u = UtilityShockMatrix::from_fn(2, |_, _| -0.5);
        let r = equilibrium_from_shocks(&mu, -1.0, &StrategicSpec::reciprocity(), &u);
        assert!(matches!(r, Err(Error::NoFixedPoint)));
        let flip = StrategicSpec::custom("anti", Arc::new(|d: &AdjacencyMatrix, i, j| 1 - d.get(j, i) as i64), 0, 1, false).unwrap();
        let u = UtilityShockMatrix::from_fn(2, |_, _| 0.5);
        let r = equilibrium_from_shocks(&mu, 1.0, &flip, &u);
        assert!(matches!(r, Err(Error::NoFixedPoint)));
    }
}
