//! Maximum likelihood for the null dyadic logit.
//!
//! The model is over-parameterized along a `2K`-dimensional null direction.
//! Estimation fixes the homophily row and column of a reference group at zero
//! and one receiver effect at zero; the receiver effects are then re-centred
//! to mean zero. Fitted utilities do not depend on these choices.

use super::likelihood::null_log_likelihood;
use super::logistic::cdf;
use super::params::{systematic_utility, NuisanceParams};
use crate::error::{Error, Result};
use crate::graph::{cross_link_matrix, AdjacencyMatrix, GroupAssignment};
use crate::io::serialize_fixed17;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub const MAX_ITERATIONS: usize = 200;
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
pub const SEPARATION_BOUND: f64 = 40.0;

#[derive(Clone, Debug)]
pub struct MleFit {
    pub params: NuisanceParams,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub reference_group: usize,
}

impl MleFit {
    pub fn normalization(&self) -> String {
        format!(
            "lambda row and column of group {} fixed at 0; mean(b) = 0",
            self.reference_group
        )
    }

    pub fn report(&self) -> ConvergenceReport {
        ConvergenceReport {
            iterations: self.iterations,
            gradient_sup_norm: self.gradient_norm,
            log_likelihood: self.log_likelihood,
            converged: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    #[serde(serialize_with = "serialize_fixed17")]
    pub gradient_sup_norm: f64,
    #[serde(serialize_with = "serialize_fixed17")]
    pub log_likelihood: f64,
    pub converged: bool,
}

/// Positions of free parameters in the optimization vector.
struct Layout {
    n: usize,
    k: usize,
    b_index: Vec<Option<usize>>,
    lambda_index: Vec<Option<usize>>,
    len: usize,
}

impl Layout {
    fn new(g: &GroupAssignment, reference: usize) -> Self {
        let n = g.n_nodes();
        let k = g.n_groups();
        let mut len = n;
        let b_index = (0..n)
            .map(|j| {
                (j != 0).then(|| {
                    len += 1;
                    len - 1
                })
            })
            .collect();
        let lambda_index = (0..k * k)
            .map(|c| {
                let (r, s) = (c / k, c % k);
                (r != reference && s != reference && g.pair_capacity(r, s) > 0).then(|| {
                    len += 1;
                    len - 1
                })
            })
            .collect();
        Layout { n, k, b_index, lambda_index, len }
    }

    fn to_params(&self, x: &DVector<f64>) -> NuisanceParams {
        let mut p = NuisanceParams::zeros(self.n, self.k);
        for i in 0..self.n {
            p.a[i] = x[i];
            p.b[i] = self.b_index[i].map_or(0.0, |w| x[w]);
        }
        for (c, w) in self.lambda_index.iter().enumerate() {
            if let Some(w) = w {
                p.lambda_flat_mut()[c] = x[*w];
            }
        }
        p
    }
}

fn check_boundary(d: &AdjacencyMatrix, g: &GroupAssignment) -> Result<()> {
    let n = d.n_nodes();
    if n < 2 {
        return Err(Error::invalid("at least two nodes are needed to fit the null model"));
    }
    let mut problems = Vec::new();
    for i in 0..n {
        for (what, deg) in [("out", d.out_degree(i)), ("in", d.in_degree(i))] {
            if deg == 0 || deg == n - 1 {
                problems.push(format!("node {i} has {what}-degree {deg}"));
            }
        }
    }
    let m = cross_link_matrix(d, g);
    for k in 0..g.n_groups() {
        for l in 0..g.n_groups() {
            let cap = g.pair_capacity(k, l);
            let c = m.get(k, l);
            if cap > 0 && (c == 0 || c == cap) {
                problems.push(format!("groups {k} -> {l} have {c} of {cap} possible arcs"));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Separation(problems.join("; ")))
    }
}

/// Damped Newton fit of the null model.
pub fn mle_null(d: &AdjacencyMatrix, g: &GroupAssignment) -> Result<MleFit> {
    g.check_len(d.n_nodes())?;
    check_boundary(d, g)?;
    let sizes = g.sizes();
    let reference = sizes.iter().position(|&s| s > 0).expect("n >= 2 implies a nonempty group");
    let lay = Layout::new(g, reference);
    let n = lay.n;
    let k = lay.k;

    let mut x = DVector::<f64>::zeros(lay.len);
    let mut params = lay.to_params(&x);
    let mut ll = null_log_likelihood(d, g, &params);
    let mut grad = DVector::<f64>::zeros(lay.len);
    let mut info = DMatrix::<f64>::zeros(lay.len, lay.len);

    for iter in 0..=MAX_ITERATIONS {
        grad.fill(0.0);
        info.fill(0.0);
        let mu = systematic_utility(&params, g);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let p = cdf(mu.get(i, j));
                let r = d.entry(i, j) as f64 - p;
                let w = p * (1.0 - p);
                let idx = [Some(i), lay.b_index[j], lay.lambda_index[g.group(i) * k + g.group(j)]];
                for (u, a) in idx.iter().enumerate() {
                    let Some(a) = *a else { continue };
                    grad[a] += r;
                    for b in idx[u..].iter().flatten() {
                        info[(a, *b)] += w;
                    }
                }
            }
        }
        let gnorm = grad.amax();
        if gnorm < GRADIENT_TOLERANCE {
            let mut params = params;
            let mean_b = params.b.iter().sum::<f64>() / n as f64;
            for i in 0..n {
                params.b[i] -= mean_b;
                params.a[i] += mean_b;
            }
            return Ok(MleFit { params, log_likelihood: ll, iterations: iter, gradient_norm: gnorm, reference_group: reference });
        }
        if iter == MAX_ITERATIONS {
            break;
        }
        // Each pair was accumulated in one orientation only; fold both halves.
        for a in 0..lay.len {
            for b in (a + 1)..lay.len {
                let v = info[(a, b)] + info[(b, a)];
                info[(a, b)] = v;
                info[(b, a)] = v;
            }
        }
        let step = match info.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                return Err(Error::Separation(
                    "information matrix is singular; parameters are not identified".into(),
                ))
            }
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &x + &step * t;
            let cp = lay.to_params(&cand);
            let cll = null_log_likelihood(d, g, &cp);
            if cll >= ll - 1e-12 * ll.abs() {
                x = cand;
                params = cp;
                ll = cll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!(
                "line search failed at iteration {iter} with gradient sup-norm {gnorm:.3e}"
            )));
        }
        if let Some(w) = x.iter().position(|v| v.abs() > SEPARATION_BOUND) {
            return Err(Error::Separation(format!(
                "parameter {} exceeded magnitude {SEPARATION_BOUND} at iteration {}",
                describe(&lay, w),
                iter + 1
            )));
        }
    }
    Err(Error::Separation(format!(
        "gradient stalled above {GRADIENT_TOLERANCE:e} after {MAX_ITERATIONS} iterations"
    )))
}

fn describe(lay: &Layout, w: usize) -> String {
    if w < lay.n {
        return format!("a[{w}]");
    }
    if let Some(j) = lay.b_index.iter().position(|&b| b == Some(w)) {
        return format!("b[{j}]");
    }
    let c = lay.lambda_index.iter().position(|&l| l == Some(w)).unwrap_or(0);
    format!("lambda[{}][{}]", c / lay.k, c % lay.k)
}
