//! Closed-form likelihood of the reciprocity model when every equilibrium
//! is selected with equal probability.
//!
//! With `s_ij = d_ji` each unordered dyad is a separate two-player game, so
//! the network likelihood is a product over dyads. For `gamma >= 0` a
//! player's shock falls in one of three buckets: below `mu` (always link),
//! in `(mu, mu + gamma]` (link iff reciprocated), or above (never link).
//! When both players are in the middle bucket, the empty and the mutual dyad
//! are both equilibria and share the probability. For `gamma < 0` the middle
//! bucket is `(mu + gamma, mu]` (link iff not reciprocated) and the two
//! asymmetric dyads share it.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GroupAssignment};
use crate::model::logistic::cdf;
use crate::model::{systematic_utility, NuisanceParams};

/// Outcome probabilities of one dyad `(1, 2)` with utilities `mu1 = mu_12`
/// and `mu2 = mu_21`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadProbabilities {
    pub mutual: f64,
    /// Only `1 -> 2`.
    pub forward: f64,
    /// Only `2 -> 1`.
    pub backward: f64,
    pub empty: f64,
}

impl DyadProbabilities {
    pub fn total(&self) -> f64 {
        self.mutual + self.forward + self.backward + self.empty
    }
}

pub fn dyad_probabilities(mu1: f64, mu2: f64, gamma: f64) -> DyadProbabilities {
    // Bucket masses: always, contingent, never.
    let buckets = |mu: f64| {
        let (lo, hi) = if gamma >= 0.0 { (mu, mu + gamma) } else { (mu + gamma, mu) };
        let (f_lo, f_hi) = (cdf(lo), cdf(hi));
        (f_lo, f_hi - f_lo, 1.0 - f_hi)
    };
    let (l1, i1, o1) = buckets(mu1);
    let (l2, i2, o2) = buckets(mu2);
    if gamma >= 0.0 {
        DyadProbabilities {
            mutual: l1 * l2 + l1 * i2 + i1 * l2 + 0.5 * i1 * i2,
            forward: l1 * o2,
            backward: o1 * l2,
            empty: i1 * o2 + o1 * i2 + o1 * o2 + 0.5 * i1 * i2,
        }
    } else {
        DyadProbabilities {
            mutual: l1 * l2,
            forward: l1 * (i2 + o2) + i1 * o2 + 0.5 * i1 * i2,
            backward: l2 * (i1 + o1) + i2 * o1 + 0.5 * i1 * i2,
            empty: o1 * o2,
        }
    }
}

/// Probability of `d` under the reciprocity model with uniform selection
/// over pure-strategy equilibria.
pub fn exact_reciprocity_likelihood(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    delta: &NuisanceParams,
    gamma: f64,
) -> Result<f64> {
    delta.check_dims(d.n_nodes(), g)?;
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma must be finite"));
    }
    let mu = systematic_utility(delta, g);
    let n = d.n_nodes();
    let mut p = 1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let q = dyad_probabilities(mu.get(i, j), mu.get(j, i), gamma);
            p *= match (d.get(i, j), d.get(j, i)) {
                (true, true) => q.mutual,
                (true, false) => q.forward,
                (false, true) => q.backward,
                (false, false) => q.empty,
            };
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::null_log_likelihood;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a, b, c) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-4.0..4.0));
            let p = dyad_probabilities(a, b, c);
            assert!((p.total() - 1.0).abs() < 1e-14);
            assert!(p.mutual >= 0.0 && p.forward >= 0.0 && p.backward >= 0.0 && p.empty >= 0.0);
        }
    }

    #[test]
    fn zero_gamma_is_the_null_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 4;
        let g = GroupAssignment::single(n);
        for _ in 0..20 {
            let d = AdjacencyMatrix::from_fn(n, |_, _| rng.random_bool(0.5));
            let p = NuisanceParams::new(
                vec![vec![0.0]],
                (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
                (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let exact = exact_reciprocity_likelihood(&d, &g, &p, 0.0).unwrap();
            let null = null_log_likelihood(&d, &g, &p).exp();
            assert!((exact - null).abs() <= 1e-14 * null.max(1e-300));
        }
    }

    #[test]
    fn continuous_across_zero() {
        let p0 = dyad_probabilities(0.3, -0.8, 0.0);
        let pp = dyad_probabilities(0.3, -0.8, 1e-9);
        let pm = dyad_probabilities(0.3, -0.8, -1e-9);
        for (a, b) in [(p0.mutual, pp.mutual), (p0.mutual, pm.mutual), (p0.empty, pm.empty)] {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
