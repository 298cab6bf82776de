use crate::error::{Error, Result};
use crate::graph::GroupAssignment;
use super::mle::ConvergenceReport;
use crate::io::{fixed_vec, Fixed17};
use serde::{Deserialize, Serialize};

/// Homophily matrix `lambda` (K x K) and sender / receiver effects `a`, `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuisanceParams {
    k: usize,
    lambda: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl NuisanceParams {
    pub fn new(lambda: Vec<Vec<f64>>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let k = lambda.len();
        if k == 0 || lambda.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("lambda must be a non-empty square matrix"));
        }
        if a.len() != b.len() {
            return Err(Error::invalid("a and b must have the same length"));
        }
        let p = NuisanceParams { k, lambda: lambda.concat(), a, b };
        if !p.lambda.iter().chain(&p.a).chain(&p.b).all(|x| x.is_finite()) {
            return Err(Error::invalid("parameters must be finite"));
        }
        Ok(p)
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        NuisanceParams { k, lambda: vec![0.0; k * k], a: vec![0.0; n], b: vec![0.0; n] }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn n_groups(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn lambda(&self, k: usize, l: usize) -> f64 {
        self.lambda[k * self.k + l]
    }

    pub fn set_lambda(&mut self, k: usize, l: usize, v: f64) {
        self.lambda[k * self.k + l] = v;
    }

    pub fn lambda_rows(&self) -> Vec<Vec<f64>> {
        self.lambda.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    pub(crate) fn lambda_flat_mut(&mut self) -> &mut [f64] {
        &mut self.lambda
    }

    #[inline]
    pub fn mu(&self, g: &GroupAssignment, i: usize, j: usize) -> f64 {
        self.a[i] + self.b[j] + self.lambda(g.group(i), g.group(j))
    }

    pub fn check_dims(&self, n: usize, g: &GroupAssignment) -> Result<()> {
        g.check_len(n)?;
        if self.n_nodes() != n || self.k != g.n_groups() {
            return Err(Error::invalid(format!(
                "parameters are for N = {}, K = {} but the data have N = {n}, K = {}",
                self.n_nodes(),
                self.k,
                g.n_groups()
            )));
        }
        Ok(())
    }

    /// Moves along the null direction of the model: `a_i + c[g(i)]`,
    /// `b_j + e[g(j)]`, `lambda_kl - c_k - e_l`. Leaves every `mu` unchanged.
    pub fn null_transform(&self, g: &GroupAssignment, c: &[f64], e: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n_nodes() {
            out.a[i] += c[g.group(i)];
            out.b[i] += e[g.group(i)];
        }
        for k in 0..self.k {
            for l in 0..self.k {
                out.lambda[k * self.k + l] -= c[k] + e[l];
            }
        }
        out
    }
}

/// Row-major `N x N` matrix of systematic utilities; the diagonal is zero
/// and unused.
#[derive(Clone, Debug, PartialEq)]
pub struct SystematicUtility {
    n: usize,
    mu: Vec<f64>,
}

impl SystematicUtility {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mu[i * self.n + j]
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut mu = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    mu[i * n + j] = f(i, j);
                }
            }
        }
        SystematicUtility { n, mu }
    }
}

/// `mu_ij = a_i + b_j + lambda[g(i)][g(j)]`.
pub fn systematic_utility(delta: &NuisanceParams, g: &GroupAssignment) -> SystematicUtility {
    SystematicUtility::from_fn(delta.n_nodes(), |i, j| delta.mu(g, i, j))
}

/// On-disk form of fitted or user-supplied parameters.
#[derive(Debug, Serialize)]
pub struct ParamsRecord<'a> {
    pub lambda: Vec<Vec<Fixed17>>,
    pub a: Vec<Fixed17>,
    pub b: Vec<Fixed17>,
    pub normalization: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
}

impl<'a> ParamsRecord<'a> {
    pub fn new(p: &NuisanceParams, normalization: &'a str) -> Self {
        ParamsRecord {
            lambda: p.lambda_rows().iter().map(|r| fixed_vec(r)).collect(),
            a: fixed_vec(&p.a),
            b: fixed_vec(&p.b),
            normalization,
            convergence: None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct ParamsInput {
    lambda: Vec<Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// Parses parameters from JSON with `lambda` (row-major), `a` and `b`.
pub fn params_from_json(text: &str) -> Result<NuisanceParams> {
    let p: ParamsInput = serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("malformed parameter file: {e}")))?;
    NuisanceParams::new(p.lambda, p.a, p.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::logistic::cdf;

    fn two_groups() -> GroupAssignment {
        GroupAssignment::new(vec![0, 0, 1, 1], 2).unwrap()
    }

    #[test]
    fn calibrated_utilities() {
        let g = two_groups();
        let p = NuisanceParams::new(
            vec![vec![0.0, -2.2], vec![-2.2, 0.0]],
            vec![1.1; 4],
            vec![1.1, 1.1, -1.1, -1.1],
        )
        .unwrap();
        let mu = systematic_utility(&p, &g);
        assert!((mu.get(0, 1) - 2.2).abs() < 1e-15);
        assert_eq!(format!("{:.2}", cdf(mu.get(0, 1))), "0.90");
        assert!((mu.get(1, 2) + 2.2).abs() < 1e-15);
        assert_eq!(format!("{:.2}", cdf(mu.get(1, 2))), "0.10");
        let z = systematic_utility(&NuisanceParams::zeros(4, 2), &g);
        assert!((0..4).all(|i| (0..4).all(|j| z.get(i, j) == 0.0)));
    }

    #[test]
    fn null_transform_leaves_mu_unchanged() {
        let g = GroupAssignment::new(vec![0, 1, 2, 0, 1], 3).unwrap();
        let p = NuisanceParams::new(
            vec![vec![0.3, -1.0, 2.0], vec![0.5, 0.1, -0.7], vec![1.2, -0.4, 0.9]],
            vec![0.1, -0.2, 0.3, 0.4, -0.5],
            vec![1.0, 0.0, -1.0, 0.5, 0.25],
        )
        .unwrap();
        let q = p.null_transform(&g, &[0.7, -1.3, 2.9], &[-0.4, 5.0, 0.01]);
        let (m1, m2) = (systematic_utility(&p, &g), systematic_utility(&q, &g));
        for i in 0..5 {
            for j in 0..5 {
                assert!((m1.get(i, j) - m2.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = NuisanceParams::new(vec![vec![0.1, 0.2], vec![0.3, 0.4]], vec![1.0, 2.0], vec![-1.0, 0.5]).unwrap();
        let text = serde_json::to_string(&ParamsRecord::new(&p, "test")).unwrap();
        assert_eq!(params_from_json(&text).unwrap(), p);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(NuisanceParams::new(vec![vec![0.0, 1.0]], vec![0.0], vec![0.0]).is_err());
        assert!(NuisanceParams::new(vec![vec![0.0]], vec![0.0], vec![]).is_err());
        assert!(NuisanceParams::new(vec![vec![f64::NAN]], vec![0.0], vec![0.0]).is_err());
    }
}
