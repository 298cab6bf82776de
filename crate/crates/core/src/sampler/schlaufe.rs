//! Alternating walks, schlaufen and cycle switching.
//!
//! A walk starts at a uniformly chosen node in the active role. Active steps
//! follow an unmarked present out-arc `i -> j`; passive steps at `j` pick a
//! node `k` whose arc `k -> j` is absent and unmarked. Every traversed
//! ordered pair is marked. The walk stops at a dead end, or when it reaches
//! a node already visited in the same role, which closes an even cycle.

use crate::error::{Error, Result};
use crate::graph::{select_bit, AdjacencyMatrix, GroupAssignment};
use rand::Rng;

/// Marks on ordered node pairs, shared by all schlaufen of one move attempt.
#[derive(Clone, Debug)]
pub struct LinkMarks {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    cols: Vec<u64>,
    touched: Vec<(usize, usize)>,
    // Per-walk role bookkeeping: position of the node's active / passive visit.
    active_at: Vec<usize>,
    passive_at: Vec<usize>,
}

const UNSEEN: usize = usize::MAX;

impl LinkMarks {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        LinkMarks {
            n,
            words,
            rows: vec![0; n * words],
            cols: vec![0; n * words],
            touched: Vec::new(),
            active_at: vec![UNSEEN; n],
            passive_at: vec![UNSEEN; n],
        }
    }

    #[inline]
    pub fn is_marked(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    fn mark(&mut self, i: usize, j: usize) {
        debug_assert!(!self.is_marked(i, j));
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.cols[j * self.words + i / 64] |= 1 << (i % 64);
        self.touched.push((i, j));
    }

    pub fn n_marked(&self) -> usize {
        self.touched.len()
    }

    pub fn is_clear(&self) -> bool {
        self.touched.is_empty()
    }

    pub fn clear(&mut self) {
        for &(i, j) in &self.touched {
            self.rows[i * self.words + j / 64] = 0;
            self.cols[j * self.words + i / 64] = 0;
        }
        self.touched.clear();
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn col(&self, j: usize) -> &[u64] {
        &self.cols[j * self.words..(j + 1) * self.words]
    }
}

/// Signed `K x K` arc-count change between groups caused by switching.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ViolationMatrix {
    k: usize,
    deltas: Vec<i64>,
}

impl ViolationMatrix {
    pub fn zeros(k: usize) -> Self {
        ViolationMatrix { k, deltas: vec![0; k * k] }
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> i64 {
        self.deltas[k * self.k + l]
    }

    pub fn n_groups(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.deltas.iter().all(|&x| x == 0)
    }

    pub fn add(&mut self, other: &ViolationMatrix) {
        for (a, b) in self.deltas.iter_mut().zip(&other.deltas) {
            *a += b;
        }
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.deltas.chunks(self.k).map(|r| r.to_vec()).collect()
    }

    fn bump(&mut self, k: usize, l: usize, by: i64) {
        self.deltas[k * self.k + l] += by;
    }
}

/// Role of a walk position. Positions alternate, starting active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Active,
    Passive,
}

#[derive(Clone, Debug)]
pub struct Schlaufe {
    /// Visited nodes `i_1 .. i_l`; position `p` has role active iff `p` is even.
    pub node_walk: Vec<usize>,
    /// Walk positions `(m, l)` with `node_walk[m] == node_walk[l]` enclosing the cycle.
    pub cycle: Option<(usize, usize)>,
    pub violation: ViolationMatrix,
    /// Natural log of the probability of generating this walk.
    pub log_prob: f64,
    /// Size of the feasible choice set at each step (not counting the start).
    pub choice_counts: Vec<usize>,
}

impl Schlaufe {
    pub fn role(&self, pos: usize) -> Role {
        role_of(pos)
    }

    pub fn n_steps(&self) -> usize {
        self.node_walk.len().saturating_sub(1)
    }

    /// Ordered pair touched by step `k` (from position `k` to `k + 1`) and
    /// whether it was present when walked.
    pub fn step_arc(&self, k: usize) -> (usize, usize, bool) {
        step_arc(&self.node_walk, k)
    }

    /// Cycle arcs in walk order; empty for a dead-end schlaufe.
    pub fn cycle_arcs(&self) -> Vec<(usize, usize, bool)> {
        match self.cycle {
            Some((m, l)) => (m..l).map(|k| self.step_arc(k)).collect(),
            None => Vec::new(),
        }
    }

    /// The reversed schlaufe used in the symmetry argument: the tail is kept
    /// and the cycle is traversed backwards.
    pub fn reversed_walk(&self) -> Vec<usize> {
        match self.cycle {
            None => self.node_walk.clone(),
            Some((m, l)) => {
                let w = &self.node_walk;
                let mut out = w[..=m].to_vec();
                out.extend(w[m + 1..l].iter().rev());
                out.push(w[l]);
                out
            }
        }
    }
}

#[inline]
fn role_of(pos: usize) -> Role {
    if pos % 2 == 0 {
        Role::Active
    } else {
        Role::Passive
    }
}

#[inline]
fn step_arc(w: &[usize], k: usize) -> (usize, usize, bool) {
    if k % 2 == 0 {
        (w[k], w[k + 1], true)
    } else {
        (w[k + 1], w[k], false)
    }
}

/// Runs one schlaufe walk, marking every traversed pair in `marks`.
pub fn detect_schlaufe<R: Rng + ?Sized>(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    marks: &mut LinkMarks,
    rng: &mut R,
) -> Schlaufe {
    let n = d.n_nodes();
    debug_assert_eq!(marks.n, n);
    let mut walk = Vec::with_capacity(8);
    let mut counts = Vec::with_capacity(8);
    let mut cycle = None;
    let mut log_prob = 0.0;
    if n > 0 {
        let start = rng.random_range(0..n);
        log_prob = -(n as f64).ln();
        walk.push(start);
        marks.active_at[start] = 0;
        let words = d.words_per_row();
        let mut feasible = vec![0u64; words];
        let mut cur = start;
        loop {
            // Active step: unmarked present out-arcs of `cur`.
            for (w, f) in feasible.iter_mut().enumerate() {
                *f = d.row_words(cur)[w] & !marks.row(cur)[w];
            }
            let r = popcount(&feasible);
            if r == 0 {
                break;
            }
            let j = select_bit(&feasible, rng.random_range(0..r)).expect("rank < popcount");
            log_prob -= (r as f64).ln();
            counts.push(r);
            marks.mark(cur, j);
            walk.push(j);
            let pos = walk.len() - 1;
            if marks.passive_at[j] != UNSEEN {
                cycle = Some((marks.passive_at[j], pos));
                break;
            }
            marks.passive_at[j] = pos;

            // Passive step: nodes k != j with k -> j absent and unmarked.
            for (w, f) in feasible.iter_mut().enumerate() {
                *f = !d.col_words(j)[w] & !marks.col(j)[w] & valid_mask(n, w);
            }
            feasible[j / 64] &= !(1 << (j % 64));
            let r = popcount(&feasible);
            if r == 0 {
                break;
            }
            let k = select_bit(&feasible, rng.random_range(0..r)).expect("rank < popcount");
            log_prob -= (r as f64).ln();
            counts.push(r);
            marks.mark(k, j);
            walk.push(k);
            let pos = walk.len() - 1;
            if marks.active_at[k] != UNSEEN {
                cycle = Some((marks.active_at[k], pos));
                break;
            }
            marks.active_at[k] = pos;
            cur = k;
        }
        for &v in &walk {
            marks.active_at[v] = UNSEEN;
            marks.passive_at[v] = UNSEEN;
        }
    }
    let mut violation = ViolationMatrix::zeros(g.n_groups());
    if let Some((m, l)) = cycle {
        for k in m..l {
            let (i, j, present) = step_arc(&walk, k);
            violation.bump(g.group(i), g.group(j), if present { -1 } else { 1 });
        }
    }
    Schlaufe { node_walk: walk, cycle, violation, log_prob, choice_counts: counts }
}

#[inline]
fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
fn valid_mask(n: usize, w: usize) -> u64 {
    let hi = n - w * 64;
    if hi >= 64 {
        u64::MAX
    } else {
        (1u64 << hi) - 1
    }
}

/// Log probability that [`detect_schlaufe`] produces exactly `walk` on `d`
/// with the given starting marks, or `None` if some step is infeasible or
/// the walk would have stopped earlier. Marks are updated as the walk is
/// replayed, mirroring the sampler.
pub fn walk_log_prob(d: &AdjacencyMatrix, marks: &mut LinkMarks, walk: &[usize]) -> Option<f64> {
    let n = d.n_nodes();
    if walk.is_empty() || walk[0] >= n {
        return None;
    }
    let mut lp = -(n as f64).ln();
    let mut seen_active = vec![false; n];
    let mut seen_passive = vec![false; n];
    seen_active[walk[0]] = true;
    for k in 0..walk.len() - 1 {
        let (from, to) = (walk[k], walk[k + 1]);
        let (r, arc) = if k % 2 == 0 {
            let r = (0..n).filter(|&j| j != from && d.get(from, j) && !marks.is_marked(from, j)).count();
            (r, (from, to))
        } else {
            let r = (0..n).filter(|&i| i != from && !d.get(i, from) && !marks.is_marked(i, from)).count();
            (r, (to, from))
        };
        let want_present = k % 2 == 0;
        if arc.0 == arc.1 || d.get(arc.0, arc.1) != want_present || marks.is_marked(arc.0, arc.1) {
            return None;
        }
        lp -= (r as f64).ln();
        marks.mark(arc.0, arc.1);
        let seen = if (k + 1) % 2 == 0 { &mut seen_active } else { &mut seen_passive };
        if seen[to] {
            // Same-role revisit closes the walk; it must be the last step.
            return (k + 2 == walk.len()).then_some(lp);
        }
        seen[to] = true;
    }
    // Without a closing revisit the walk must end at a dead end.
    let last = walk.len() - 1;
    let cur = walk[last];
    let extendable = if last % 2 == 0 {
        (0..n).any(|j| j != cur && d.get(cur, j) && !marks.is_marked(cur, j))
    } else {
        (0..n).any(|i| i != cur && !d.get(i, cur) && !marks.is_marked(i, cur))
    };
    (!extendable).then_some(lp)
}

/// Group-count change from switching `arcs`, which must alternate
/// present/absent in `d` and have even length.
pub fn violation_of_cycle(
    arcs: &[(usize, usize)],
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
) -> Result<ViolationMatrix> {
    check_alternating(arcs, d)?;
    let mut v = ViolationMatrix::zeros(g.n_groups());
    for &(i, j) in arcs {
        v.bump(g.group(i), g.group(j), if d.get(i, j) { -1 } else { 1 });
    }
    Ok(v)
}

fn check_alternating(arcs: &[(usize, usize)], d: &AdjacencyMatrix) -> Result<()> {
    if arcs.len() % 2 != 0 {
        return Err(Error::Corrupted(format!("cycle has odd length {}", arcs.len())));
    }
    for (k, w) in arcs.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a.0 == a.1 || d.get(a.0, a.1) == d.get(b.0, b.1) {
            return Err(Error::Corrupted(format!(
                "cycle arcs {k} and {} do not alternate present/absent",
                k + 1
            )));
        }
    }
    Ok(())
}

/// Flips every entry of an alternating cycle in place.
pub fn switch_cycle(d: &mut AdjacencyMatrix, arcs: &[(usize, usize)]) -> Result<()> {
    check_alternating(arcs, d)?;
    for &(i, j) in arcs {
        d.flip(i, j);
    }
    Ok(())
}
