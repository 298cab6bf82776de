//! Exhaustive listing of every network with given degrees and cross-links.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, CrossLinkMatrix, DegreeSequence, GroupAssignment};

/// Largest `N(N-1)` accepted by [`enumerate_reference_set`].
pub const ENUMERATION_CAP: usize = 30;

struct Search<'a> {
    n: usize,
    k: usize,
    out: &'a [usize],
    inn: &'a [usize],
    m: &'a [u64],
    groups: &'a [usize],
    col: Vec<usize>,
    cross: Vec<u64>,
    rows: Vec<u32>,
    found: Vec<AdjacencyMatrix>,
}

impl Search<'_> {
    fn row(&mut self, i: usize) {
        if i == self.n {
            if self.col.iter().zip(self.inn).all(|(a, b)| a == b)
                && self.cross.iter().zip(self.m).all(|(a, b)| a == b)
            {
                let rows = &self.rows;
                self.found
                    .push(AdjacencyMatrix::from_fn(self.n, |a, b| (rows[a] >> b) & 1 == 1));
            }
            return;
        }
        let remaining_rows = self.n - i - 1;
        let full: u32 = ((1u64 << self.n) - 1) as u32 & !(1 << i);
        // Iterate submasks of `full` with the required popcount.
        let mut sub = full;
        loop {
            if sub.count_ones() as usize == self.out[i] && self.admissible(i, sub, remaining_rows) {
                self.apply(i, sub, true);
                self.rows[i] = sub;
                self.row(i + 1);
                self.apply(i, sub, false);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & full;
        }
    }

    fn admissible(&self, i: usize, mask: u32, remaining_rows: usize) -> bool {
        let gi = self.groups[i];
        let mut cross = vec![0u64; self.k];
        for j in 0..self.n {
            let bit = ((mask >> j) & 1) as usize;
            let c = self.col[j] + bit;
            // Column sums may not overshoot, and must stay reachable by the
            // rows still to come (row j cannot feed column j).
            let reachable = c + remaining_rows - (j > i) as usize;
            if c > self.inn[j] || reachable < self.inn[j] {
                return false;
            }
            if bit == 1 {
                cross[self.groups[j]] += 1;
            }
        }
        (0..self.k).all(|l| self.cross[gi * self.k + l] + cross[l] <= self.m[gi * self.k + l])
    }

    fn apply(&mut self, i: usize, mask: u32, add: bool) {
        let gi = self.groups[i];
        for j in 0..self.n {
            if (mask >> j) & 1 == 1 {
                let cell = gi * self.k + self.groups[j];
                if add {
                    self.col[j] += 1;
                    self.cross[cell] += 1;
                } else {
                    self.col[j] -= 1;
                    self.cross[cell] -= 1;
                }
            }
        }
    }
}

/// Every adjacency matrix realizing `(s, m)` under groups `g`, in
/// lexicographic order of row bitmasks (descending).
pub fn enumerate_reference_set(
    s: &DegreeSequence,
    m: &CrossLinkMatrix,
    g: &GroupAssignment,
) -> Result<Vec<AdjacencyMatrix>> {
    let n = s.n_nodes();
    let cells = n * n.saturating_sub(1);
    if cells > ENUMERATION_CAP {
        return Err(Error::EnumerationCap { cells, cap: ENUMERATION_CAP });
    }
    g.check_len(n)?;
    if m.n_groups() != g.n_groups() {
        return Err(Error::invalid("cross-link matrix and group assignment disagree on K"));
    }
    if n == 0 {
        return Ok(vec![AdjacencyMatrix::empty(0)]);
    }
    let mut search = Search {
        n,
        k: g.n_groups(),
        out: &s.out_degrees,
        inn: &s.in_degrees,
        m: m.as_slice(),
        groups: g.as_slice(),
        col: vec![0; n],
        cross: vec![0; g.n_groups() * g.n_groups()],
        rows: vec![0; n],
        found: Vec::new(),
    };
    search.row(0);
    Ok(search.found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cross_link_matrix, degree_sequence};

    /// Independent oracle: scan all 2^(N(N-1)) matrices.
    fn brute_force(s: &DegreeSequence, m: &CrossLinkMatrix, g: &GroupAssignment) -> usize {
        let n = s.n_nodes();
        let slots: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let mut count = 0;
        for bits in 0u64..(1 << slots.len()) {
            let d = AdjacencyMatrix::from_fn(n, |i, j| {
                let idx = slots.iter().position(|&p| p == (i, j)).unwrap();
                (bits >> idx) & 1 == 1
            });
            if &degree_sequence(&d) == s && &cross_link_matrix(&d, g) == m {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn zero_degrees_give_only_the_empty_graph() {
        let g = GroupAssignment::single(4);
        let d = AdjacencyMatrix::empty(4);
        let set =
            enumerate_reference_set(&degree_sequence(&d), &cross_link_matrix(&d, &g), &g).unwrap();
        assert_eq!(set, vec![d]);
    }

    #[test]
    fn saturated_degrees_give_only_the_complete_graph() {
        let g = GroupAssignment::new(vec![0, 1, 0, 1, 1], 2).unwrap();
        let d = AdjacencyMatrix::complete(5);
        let set =
            enumerate_reference_set(&degree_sequence(&d), &cross_link_matrix(&d, &g), &g).unwrap();
        assert_eq!(set, vec![d]);
    }

    #[test]
    fn derangement_like_digraphs_on_four_nodes() {
        let s = DegreeSequence::new(vec![1; 4], vec![1; 4]).unwrap();
        let g = GroupAssignment::single(4);
        let m = CrossLinkMatrix::from_counts(1, vec![4]).unwrap();
        let set = enumerate_reference_set(&s, &m, &g).unwrap();
        // Derangements of 4 elements.
        assert_eq!(set.len(), 9);
        assert_eq!(set.len(), brute_force(&s, &m, &g));
        for d in &set {
            assert_eq!(degree_sequence(d), s);
        }
    }

    #[test]
    fn grouped_counts_match_brute_force() {
        let g = GroupAssignment::new(vec![0, 1, 0, 1], 2).unwrap();
        for seed in 0..12u64 {
            let d = AdjacencyMatrix::from_fn(4, |i, j| (seed.wrapping_mul(2654435761) >> (i * 4 + j)) & 1 == 1);
            let (s, m) = (degree_sequence(&d), cross_link_matrix(&d, &g));
            let set = enumerate_reference_set(&s, &m, &g).unwrap();
            assert!(set.contains(&d));
            assert_eq!(set.len(), brute_force(&s, &m, &g));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = GroupAssignment::single(7);
        let d = AdjacencyMatrix::empty(7);
        let r = enumerate_reference_set(&degree_sequence(&d), &cross_link_matrix(&d, &g), &g);
        assert!(matches!(r, Err(Error::EnumerationCap { cells: 42, cap: 30 })));
    }
}
