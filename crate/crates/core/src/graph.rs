//! Directed-graph storage, the sufficient statistics of the null model
//! (degree sequences and the cross-link matrix) and descriptive indices.

use crate::error::{Error, Result};
use std::fmt;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Position of the `rank`-th set bit (0-based) across a word slice.
pub(crate) fn select_bit(words: &[u64], mut rank: usize) -> Option<usize> {
    for (w, &word) in words.iter().enumerate() {
        let ones = word.count_ones() as usize;
        if rank < ones {
            let mut x = word;
            for _ in 0..rank {
                x &= x - 1;
            }
            return Some(w * 64 + x.trailing_zeros() as usize);
        }
        rank -= ones;
    }
    None
}

/// Binary adjacency matrix of a simple digraph on `n` nodes.
///
/// Rows and columns are both kept as packed bitsets so that row scans
/// (out-neighbours) and column scans (in-neighbours) are word-parallel.
/// Out- and in-degrees are cached and maintained by every mutation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
    out_deg: Vec<usize>,
    in_deg: Vec<usize>,
    arcs: usize,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        AdjacencyMatrix {
            n,
            words,
            rows: vec![0; n * words],
            cols: vec![0; n * words],
            out_deg: vec![0; n],
            in_deg: vec![0; n],
            arcs: 0,
        }
    }

    /// Complete digraph: every ordered pair `i != j` is an arc.
    pub fn complete(n: usize) -> Self {
        Self::from_fn(n, |i, j| i != j)
    }

    /// Builds a matrix from a predicate; the diagonal is ignored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut d = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && f(i, j) {
                    d.set(i, j, true);
                }
            }
        }
        d
    }

    /// Builds a matrix from ordered pairs. Duplicate pairs collapse to a
    /// single arc; their number is returned alongside the matrix.
    pub fn from_edge_list(edges: &[(usize, usize)], n: usize) -> Result<(Self, usize)> {
        let mut d = Self::empty(n);
        let mut duplicates = 0;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "arc ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on node {i} is not allowed")));
            }
            if d.get(i, j) {
                duplicates += 1;
            } else {
                d.set(i, j, true);
            }
        }
        Ok((d, duplicates))
    }

    /// Arcs in row-major order.
    pub fn to_edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.arcs);
        for i in 0..self.n {
            out.extend(self.out_neighbours(i).map(|j| (i, j)));
        }
        out
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    #[inline]
    pub fn out_degree(&self, i: usize) -> usize {
        self.out_deg[i]
    }

    #[inline]
    pub fn in_degree(&self, j: usize) -> usize {
        self.in_deg[j]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.get(i, j) as u8
    }

    /// Sets entry `(i, j)`. Panics on the diagonal.
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i != j, "diagonal entries are structural zeros");
        if self.get(i, j) != value {
            self.flip(i, j);
        }
    }

    /// Toggles entry `(i, j)`, keeping the cached degrees in step.
    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        debug_assert!(i != j);
        let w = self.words;
        self.rows[i * w + j / 64] ^= 1 << (j % 64);
        self.cols[j * w + i / 64] ^= 1 << (i % 64);
        if self.get(i, j) {
            self.out_deg[i] += 1;
            self.in_deg[j] += 1;
            self.arcs += 1;
        } else {
            self.out_deg[i] -= 1;
            self.in_deg[j] -= 1;
            self.arcs -= 1;
        }
    }

    #[inline]
    pub(crate) fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub(crate) fn col_words(&self, j: usize) -> &[u64] {
        &self.cols[j * self.words..(j + 1) * self.words]
    }

    pub fn out_neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row_words(i))
    }

    pub fn in_neighbours(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.col_words(j))
    }

    /// Number of nodes `k` with `i -> k -> j`.
    #[inline]
    pub fn two_paths(&self, i: usize, j: usize) -> usize {
        self.row_words(i)
            .iter()
            .zip(self.col_words(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.arcs as f64 / (self.n * (self.n - 1)) as f64
    }
}

fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                None
            } else {
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + b)
            }
        })
    })
}

impl fmt::Debug for AdjacencyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AdjacencyMatrix(n={}, arcs={})", self.n, self.arcs)?;
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if i == j { '.' } else if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Node-to-group map. Groups are `0..k`; a group may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupAssignment {
    groups: Vec<usize>,
    k: usize,
}

impl GroupAssignment {
    pub fn new(groups: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("number of groups must be at least 1"));
        }
        if let Some((node, &g)) = groups.iter().enumerate().find(|(_, &g)| g >= k) {
            return Err(Error::invalid(format!(
                "node {node} has group {g}, outside 0..{k}"
            )));
        }
        Ok(GroupAssignment { groups, k })
    }

    /// Everyone in one group: the degree-only reference set.
    pub fn single(n: usize) -> Self {
        GroupAssignment { groups: vec![0; n], k: 1 }
    }

    #[inline]
    pub fn n_groups(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.groups.len()
    }

    #[inline]
    pub fn group(&self, i: usize) -> usize {
        self.groups[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &g in &self.groups {
            sizes[g] += 1;
        }
        sizes
    }

    /// Number of ordered pairs `(i, j)`, `i != j`, from group `k` to group `l`.
    pub fn pair_capacity(&self, k: usize, l: usize) -> u64 {
        let sizes = self.sizes();
        let (a, b) = (sizes[k] as u64, sizes[l] as u64);
        if k == l {
            a * b.saturating_sub(1)
        } else {
            a * b
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.groups.len() != n {
            return Err(Error::invalid(format!(
                "group assignment covers {} nodes but the graph has {n}",
                self.groups.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DegreeSequence {
    pub out_degrees: Vec<usize>,
    pub in_degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(out_degrees: Vec<usize>, in_degrees: Vec<usize>) -> Result<Self> {
        let n = out_degrees.len();
        if in_degrees.len() != n {
            return Err(Error::invalid("out- and in-degree sequences differ in length"));
        }
        let (so, si): (usize, usize) = (out_degrees.iter().sum(), in_degrees.iter().sum());
        if so != si {
            return Err(Error::invalid(format!(
                "degree sums disagree: out {so}, in {si}"
            )));
        }
        if let Some(&d) = out_degrees.iter().chain(&in_degrees).find(|&&d| d + 1 > n.max(1)) {
            return Err(Error::invalid(format!("degree {d} exceeds N-1 = {}", n.saturating_sub(1))));
        }
        Ok(DegreeSequence { out_degrees, in_degrees })
    }

    pub fn n_nodes(&self) -> usize {
        self.out_degrees.len()
    }

    pub fn total(&self) -> usize {
        self.out_degrees.iter().sum()
    }
}

/// `K x K` arc counts between groups, row-major: `counts[k * K + l]`
/// arcs from group `k` to group `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossLinkMatrix {
    k: usize,
    counts: Vec<u64>,
}

impl CrossLinkMatrix {
    pub fn zeros(k: usize) -> Self {
        CrossLinkMatrix { k, counts: vec![0; k * k] }
    }

    pub fn from_counts(k: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != k * k {
            return Err(Error::invalid(format!(
                "cross-link matrix needs {} entries, got {}",
                k * k,
                counts.len()
            )));
        }
        Ok(CrossLinkMatrix { k, counts })
    }

    #[inline]
    pub fn n_groups(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> u64 {
        self.counts[k * self.k + l]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.k).map(|r| r.to_vec()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadCensus {
    pub mutual: usize,
    pub asym: usize,
    pub null_dyads: usize,
}

pub fn degree_sequence(d: &AdjacencyMatrix) -> DegreeSequence {
    DegreeSequence {
        out_degrees: d.out_deg.clone(),
        in_degrees: d.in_deg.clone(),
    }
}

pub fn cross_link_matrix(d: &AdjacencyMatrix, g: &GroupAssignment) -> CrossLinkMatrix {
    let k = g.n_groups();
    let mut m = CrossLinkMatrix::zeros(k);
    for i in 0..d.n_nodes() {
        let gi = g.group(i);
        for j in d.out_neighbours(i) {
            m.counts[gi * k + g.group(j)] += 1;
        }
    }
    m
}

pub fn dyad_census(d: &AdjacencyMatrix) -> DyadCensus {
    let n = d.n_nodes();
    let (mut mutual, mut asym) = (0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            match (d.get(i, j), d.get(j, i)) {
                (true, true) => mutual += 1,
                (false, false) => {}
                _ => asym += 1,
            }
        }
    }
    DyadCensus {
        mutual,
        asym,
        null_dyads: n * n.saturating_sub(1) / 2 - mutual - asym,
    }
}

/// Share of non-null dyads weighted towards reciprocation:
/// `2 mutual / (2 mutual + asym)`. NaN when every dyad is null.
pub fn reciprocity_index(d: &AdjacencyMatrix) -> f64 {
    let c = dyad_census(d);
    let denom = 2 * c.mutual + c.asym;
    if denom == 0 {
        return f64::NAN;
    }
    (2 * c.mutual) as f64 / denom as f64
}

/// Closed two-path ratio: among directed two-paths `i -> k -> j` with
/// `i != j`, the fraction whose shortcut `i -> j` is present. NaN when the
/// graph has no two-paths.
pub fn transitivity_index(d: &AdjacencyMatrix) -> f64 {
    let n = d.n_nodes();
    let (mut closed, mut paths) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let t = d.two_paths(i, j);
            paths += t;
            if d.get(i, j) {
                closed += t;
            }
        }
    }
    if paths == 0 {
        return f64::NAN;
    }
    closed as f64 / paths as f64
}

/// Label attached to transitivity output so readers know which definition
/// was used.
pub const TRANSITIVITY_LABEL: &str = "TI (closed two-path ratio)";

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, p: f64, seed: u64) -> AdjacencyMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AdjacencyMatrix::from_fn(n, |_, _| rng.random_bool(p))
    }

    #[test]
    fn empty_edge_list_gives_zero_matrix() {
        let (d, dup) = AdjacencyMatrix::from_edge_list(&[], 3).unwrap();
        assert_eq!(d.arc_count(), 0);
        assert_eq!(dup, 0);
        assert_eq!(d, AdjacencyMatrix::empty(3));
    }

    #[test]
    fn two_node_complete() {
        let (d, _) = AdjacencyMatrix::from_edge_list(&[(0, 1), (1, 0)], 2).unwrap();
        assert!(d.get(0, 1) && d.get(1, 0));
        assert_eq!(d, AdjacencyMatrix::complete(2));
    }

    #[test]
    fn edge_list_errors_and_duplicates() {
        assert!(AdjacencyMatrix::from_edge_list(&[(1, 1)], 3).is_err());
        assert!(AdjacencyMatrix::from_edge_list(&[(0, 3)], 3).is_err());
        let (d, dup) = AdjacencyMatrix::from_edge_list(&[(0, 1), (0, 1), (0, 1)], 3).unwrap();
        assert_eq!(d.arc_count(), 1);
        assert_eq!(dup, 2);
    }

    #[test]
    fn edge_list_round_trip_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let mut pairs = Vec::new();
        while pairs.len() < 100 {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                pairs.push((i, j));
            }
        }
        let (d, dup) = AdjacencyMatrix::from_edge_list(&pairs, n).unwrap();
        let mut dedup = pairs.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(d.to_edge_list(), dedup);
        assert_eq!(dup, pairs.len() - dedup.len());
    }

    #[test]
    fn degree_sequences_basic() {
        let s = degree_sequence(&AdjacencyMatrix::empty(3));
        assert_eq!(s.out_degrees, vec![0, 0, 0]);
        assert_eq!(s.in_degrees, vec![0, 0, 0]);
        let s = degree_sequence(&AdjacencyMatrix::complete(3));
        assert_eq!(s.out_degrees, vec![2, 2, 2]);
        assert_eq!(s.in_degrees, vec![2, 2, 2]);
    }

    #[test]
    fn degree_sequence_matches_double_loop() {
        let d = random_matrix(10, 0.4, 3);
        let s = degree_sequence(&d);
        for i in 0..10 {
            let mut out = 0;
            let mut inn = 0;
            for j in 0..10 {
                out += d.entry(i, j) as usize;
                inn += d.entry(j, i) as usize;
            }
            assert_eq!(s.out_degrees[i], out);
            assert_eq!(s.in_degrees[i], inn);
        }
        assert!(DegreeSequence::new(s.out_degrees.clone(), s.in_degrees.clone()).is_ok());
    }

    #[test]
    fn degree_sequence_validation() {
        assert!(DegreeSequence::new(vec![1, 0], vec![0, 0]).is_err());
        assert!(DegreeSequence::new(vec![2, 0], vec![1, 1]).is_err());
        assert!(DegreeSequence::new(vec![1, 1], vec![1, 1]).is_ok());
    }

    #[test]
    fn cross_links_single_group_is_total() {
        let d = random_matrix(9, 0.3, 5);
        let m = cross_link_matrix(&d, &GroupAssignment::single(9));
        assert_eq!(m.as_slice(), &[d.arc_count() as u64]);
    }

    #[test]
    fn cross_links_boys_and_girls() {
        // boys 0,1; girls 2,3; b1 -> b2 and g1 -> g2
        let (d, _) = AdjacencyMatrix::from_edge_list(&[(0, 1), (2, 3)], 4).unwrap();
        let g = GroupAssignment::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(cross_link_matrix(&d, &g).rows(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn cross_links_match_brute_force() {
        let d = random_matrix(8, 0.5, 8);
        let g = GroupAssignment::new(vec![0, 1, 2, 0, 1, 2, 2, 0], 3).unwrap();
        let m = cross_link_matrix(&d, &g);
        for k in 0..3 {
            for l in 0..3 {
                let mut c = 0;
                for i in 0..8 {
                    for j in 0..8 {
                        if i != j && g.group(i) == k && g.group(j) == l {
                            c += d.entry(i, j) as u64;
                        }
                    }
                }
                assert_eq!(m.get(k, l), c);
                assert!(c <= g.pair_capacity(k, l));
            }
        }
        assert_eq!(m.total(), d.arc_count() as u64);
    }

    #[test]
    fn reciprocity_cases() {
        assert_eq!(reciprocity_index(&AdjacencyMatrix::complete(4)), 1.0);
        let (one, _) = AdjacencyMatrix::from_edge_list(&[(0, 1)], 3).unwrap();
        assert_eq!(reciprocity_index(&one), 0.0);
        assert!(reciprocity_index(&AdjacencyMatrix::empty(3)).is_nan());
        // 2 mutual dyads {0,1}, {2,3}; 3 asymmetric 0->2, 1->3, 3->0
        let (d, _) = AdjacencyMatrix::from_edge_list(
            &[(0, 1), (1, 0), (2, 3), (3, 2), (0, 2), (1, 3), (3, 0)],
            4,
        )
        .unwrap();
        assert!((reciprocity_index(&d) - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn transitivity_cases() {
        assert_eq!(transitivity_index(&AdjacencyMatrix::complete(5)), 1.0);
        let (path, _) = AdjacencyMatrix::from_edge_list(&[(0, 1), (1, 2)], 3).unwrap();
        assert_eq!(transitivity_index(&path), 0.0);
        assert!(transitivity_index(&AdjacencyMatrix::empty(4)).is_nan());
    }

    #[test]
    fn indices_match_naive_recounts() {
        for seed in 0..20 {
            let n = 3 + (seed as usize % 10);
            let d = random_matrix(n, 0.35, 100 + seed);
            let (mut closed, mut paths) = (0, 0);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if i != j && j != k && i != k {
                            let p = d.entry(i, k) * d.entry(k, j);
                            paths += p as usize;
                            closed += (p * d.entry(i, j)) as usize;
                        }
                    }
                }
            }
            let ti = transitivity_index(&d);
            if paths == 0 {
                assert!(ti.is_nan());
            } else {
                assert_eq!(ti, closed as f64 / paths as f64);
            }
            let (mut mutual, mut asym) = (0, 0);
            for i in 0..n {
                for j in 0..n {
                    if i < j {
                        mutual += (d.entry(i, j) * d.entry(j, i)) as usize;
                        asym += (d.entry(i, j) ^ d.entry(j, i)) as usize;
                    }
                }
            }
            let c = dyad_census(&d);
            assert_eq!((c.mutual, c.asym), (mutual, asym));
            let r = reciprocity_index(&d);
            if mutual + asym > 0 {
                assert_eq!(r, (2 * mutual) as f64 / (2 * mutual + asym) as f64);
            }
        }
    }

    #[test]
    fn dyad_census_identities() {
        assert_eq!(
            dyad_census(&AdjacencyMatrix::empty(5)),
            DyadCensus { mutual: 0, asym: 0, null_dyads: 10 }
        );
        assert_eq!(
            dyad_census(&AdjacencyMatrix::complete(5)),
            DyadCensus { mutual: 10, asym: 0, null_dyads: 0 }
        );
        let c = dyad_census(&random_matrix(12, 0.3, 9));
        assert_eq!(c.mutual + c.asym + c.null_dyads, 66);
    }

    #[test]
    fn flip_keeps_caches_consistent() {
        let mut d = random_matrix(70, 0.2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (i, j) = (rng.random_range(0..70), rng.random_range(0..70));
            if i != j {
                d.flip(i, j);
            }
        }
        let fresh = AdjacencyMatrix::from_fn(70, |i, j| d.get(i, j));
        assert_eq!(d, fresh);
        for j in 0..70 {
            assert_eq!(d.in_neighbours(j).count(), d.in_degree(j));
        }
    }

    #[test]
    fn select_bit_finds_ranked_bits() {
        let words = [0b1010u64, 1 << 5];
        assert_eq!(select_bit(&words, 0), Some(1));
        assert_eq!(select_bit(&words, 1), Some(3));
        assert_eq!(select_bit(&words, 2), Some(69));
        assert_eq!(select_bit(&words, 3), None);
    }
}
