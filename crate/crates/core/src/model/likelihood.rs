use super::logistic::{cdf, log1p_exp};
use super::params::{systematic_utility, NuisanceParams};
use crate::graph::{AdjacencyMatrix, GroupAssignment};

/// Null log-likelihood `sum_{i != j} [d_ij mu_ij - log(1 + e^{mu_ij})]`.
pub fn null_log_likelihood(d: &AdjacencyMatrix, g: &GroupAssignment, delta: &NuisanceParams) -> f64 {
    let mu = systematic_utility(delta, g);
    let n = d.n_nodes();
    let mut ll = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let m = mu.get(i, j);
                ll += if d.get(i, j) { m } else { 0.0 } - log1p_exp(m);
            }
        }
    }
    ll
}

/// Score of the null log-likelihood, in the shape of the parameters.
pub fn null_gradient(d: &AdjacencyMatrix, g: &GroupAssignment, delta: &NuisanceParams) -> NuisanceParams {
    let n = d.n_nodes();
    let k = g.n_groups();
    let mu = systematic_utility(delta, g);
    let mut grad = NuisanceParams::zeros(n, k);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = d.entry(i, j) as f64 - cdf(mu.get(i, j));
            grad.a[i] += r;
            grad.b[j] += r;
            grad.lambda_flat_mut()[g.group(i) * k + g.group(j)] += r;
        }
    }
    grad
}

/// Largest absolute gap between observed and fitted sufficient statistics
/// (out-degrees, in-degrees, cross-link counts).
pub fn moment_residual(d: &AdjacencyMatrix, g: &GroupAssignment, delta: &NuisanceParams) -> f64 {
    let grad = null_gradient(d, g, delta);
    grad.a
        .iter()
        .chain(&grad.b)
        .chain(grad.lambda_rows().iter().flatten())
        .fold(0.0f64, |m, x| m.max(x.abs()))
}
