//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stratnet::sampler::enumerate_reference_set;
use stratnet::{cross_link_matrix, degree_sequence, AdjacencyMatrix, GroupAssignment};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bernoulli(`p`) arcs on `n` nodes split round-robin into `k` groups.
pub fn random_network(n: usize, k: usize, p: f64, seed: u64) -> (AdjacencyMatrix, GroupAssignment) {
    let mut r = rng(seed);
    let d = AdjacencyMatrix::from_fn(n, |_, _| r.random::<f64>() < p);
    let g = GroupAssignment::new((0..n).map(|i| i % k).collect(), k).unwrap();
    (d, g)
}

pub fn reference_set(d: &AdjacencyMatrix, g: &GroupAssignment) -> Vec<AdjacencyMatrix> {
    enumerate_reference_set(&degree_sequence(d), &cross_link_matrix(d, g), g).unwrap()
}

/// Small fixtures whose reference set size lies in `[lo, hi]`, found by a
/// deterministic search over seeds.
pub fn fixtures_with_size(
    shapes: &[(usize, usize)],
    lo: usize,
    hi: usize,
) -> Vec<(AdjacencyMatrix, GroupAssignment, Vec<AdjacencyMatrix>)> {
    shapes
        .iter()
        .enumerate()
        .map(|(idx, &(n, k))| {
            (0u64..)
                .map(|s| random_network(n, k, 0.45, 1000 * idx as u64 + s))
                .find_map(|(d, g)| {
                    let set = reference_set(&d, &g);
                    (lo..=hi).contains(&set.len()).then_some((d, g, set))
                })
                .unwrap()
        })
        .collect()
}

/// Out-degrees, in-degrees and row-major cross-link counts, computed
/// directly from the entries.
pub fn invariants(d: &AdjacencyMatrix, g: &GroupAssignment) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let n = d.n_nodes();
    let k = g.n_groups();
    let (mut out, mut inn, mut cross) = (vec![0; n], vec![0; n], vec![0; k * k]);
    for i in 0..n {
        for j in 0..n {
            if i != j && d.get(i, j) {
                out[i] += 1;
                inn[j] += 1;
                cross[g.group(i) * k + g.group(j)] += 1;
            }
        }
    }
    (out, inn, cross)
}

pub fn logistic_cdf(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn logistic_draw<R: Rng>(r: &mut R) -> f64 {
    let u: f64 = r.random_range(f64::EPSILON..1.0);
    (u / (1.0 - u)).ln()
}

/// Strategic term written out from its definition.
pub fn strategic_term(name: &str, d: &AdjacencyMatrix, i: usize, j: usize) -> i64 {
    let n = d.n_nodes();
    let e = |a: usize, b: usize| (a != b && d.get(a, b)) as i64;
    match name {
        "reciprocity" => e(j, i),
        "transitivity" => (0..n).filter(|&k| k != i && k != j).map(|k| e(i, k) * e(k, j)).sum(),
        "customer_product" => {
            let out_i: i64 = (0..n).filter(|&k| k != j).map(|k| e(i, k)).sum();
            let out_j: i64 = (0..n).map(|k| e(j, k)).sum();
            out_i * out_j
        }
        other => panic!("unknown term {other}"),
    }
}
