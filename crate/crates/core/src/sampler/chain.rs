//! The schlaufen Markov chain on networks with fixed degrees and cross-links.

use super::schlaufe::{detect_schlaufe, switch_cycle, LinkMarks, Schlaufe, ViolationMatrix};
use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GroupAssignment};
use crate::rng::substream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default probability of a lazy (no-op) step.
pub const DEFAULT_Q: f64 = 0.5;

/// Stream tag for per-draw generators.
pub(crate) const DRAW_STREAM: u64 = 0xD4A;
pub(crate) const PILOT_STREAM: u64 = 0x9170;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub tau: usize,
    pub q: f64,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(tau: usize, q: f64, seed: u64) -> Result<Self> {
        let cfg = ChainConfig { tau, q, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau == 0 {
            return Err(Error::invalid("tau must be at least 1"));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::invalid(format!("q must lie in (0, 1), got {}", self.q)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Lazy,
    /// Violation sum reached zero; `flips` entries changed (0 for a
    /// dead end on the first schlaufe).
    Accepted { flips: usize, schlaufen: usize },
    Abandoned { schlaufen: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStats {
    pub steps: u64,
    pub lazy: u64,
    /// Accepted moves that changed the matrix.
    pub accepted: u64,
    /// Accepted moves with nothing to switch.
    pub self_loops: u64,
    pub abandoned: u64,
    pub flips: u64,
    pub schlaufen: u64,
}

impl ChainStats {
    pub fn record(&mut self, outcome: StepOutcome) {
        self.steps += 1;
        match outcome {
            StepOutcome::Lazy => self.lazy += 1,
            StepOutcome::Accepted { flips, schlaufen } => {
                if flips > 0 {
                    self.accepted += 1;
                } else {
                    self.self_loops += 1;
                }
                self.flips += flips as u64;
                self.schlaufen += schlaufen as u64;
            }
            StepOutcome::Abandoned { schlaufen } => {
                self.abandoned += 1;
                self.schlaufen += schlaufen as u64;
            }
        }
    }

    pub fn merge(&mut self, other: &ChainStats) {
        self.steps += other.steps;
        self.lazy += other.lazy;
        self.accepted += other.accepted;
        self.self_loops += other.self_loops;
        self.abandoned += other.abandoned;
        self.flips += other.flips;
        self.schlaufen += other.schlaufen;
    }

    /// Fraction of steps that changed the matrix.
    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.steps as f64
    }

    pub fn flips_per_accepted(&self) -> f64 {
        if self.accepted == 0 {
            return 0.0;
        }
        self.flips as f64 / self.accepted as f64
    }

    /// Average number of times each arc slot was rewritten.
    pub fn per_arc_modifications(&self, arcs: usize) -> f64 {
        if arcs == 0 {
            return 0.0;
        }
        self.flips as f64 / arcs as f64
    }
}

/// One iteration of the chain: a lazy step with probability `q`, otherwise
/// schlaufen are collected until their violation matrices sum to zero (then
/// all cycles are switched) or a fair coin abandons the attempt.
pub fn markov_step<R: Rng + ?Sized>(
    d: &mut AdjacencyMatrix,
    g: &GroupAssignment,
    cfg: &ChainConfig,
    marks: &mut LinkMarks,
    rng: &mut R,
) -> StepOutcome {
    debug_assert!(marks.is_clear());
    if rng.random::<f64>() < cfg.q {
        return StepOutcome::Lazy;
    }
    let mut sum = ViolationMatrix::zeros(g.n_groups());
    let mut cycles: Vec<Schlaufe> = Vec::new();
    let mut count = 0;
    loop {
        let s = detect_schlaufe(d, g, marks, rng);
        count += 1;
        sum.add(&s.violation);
        if s.cycle.is_some() {
            cycles.push(s);
        }
        if sum.is_zero() {
            let flips = apply_cycles(d, g, &cycles);
            marks.clear();
            return StepOutcome::Accepted { flips, schlaufen: count };
        }
        if rng.random_bool(0.5) {
            marks.clear();
            return StepOutcome::Abandoned { schlaufen: count };
        }
    }
}

#[cfg_attr(not(debug_assertions), allow(unused_variables))]
fn apply_cycles(d: &mut AdjacencyMatrix, g: &GroupAssignment, cycles: &[Schlaufe]) -> usize {
    #[cfg(debug_assertions)]
    let before: (Vec<usize>, Vec<usize>) = (
        (0..d.n_nodes()).map(|i| d.out_degree(i)).collect(),
        (0..d.n_nodes()).map(|i| d.in_degree(i)).collect(),
    );
    #[cfg(debug_assertions)]
    let mut net = vec![0i64; g.n_groups() * g.n_groups()];
    let mut flips = 0;
    for s in cycles {
        let arcs: Vec<(usize, usize)> = s.cycle_arcs().iter().map(|&(i, j, _)| (i, j)).collect();
        #[cfg(debug_assertions)]
        for &(i, j) in &arcs {
            net[g.group(i) * g.n_groups() + g.group(j)] += if d.get(i, j) { -1 } else { 1 };
        }
        switch_cycle(d, &arcs).expect("marked cycles are link-disjoint and alternating");
        flips += arcs.len();
    }
    #[cfg(debug_assertions)]
    {
        let after: (Vec<usize>, Vec<usize>) = (
            (0..d.n_nodes()).map(|i| d.out_degree(i)).collect(),
            (0..d.n_nodes()).map(|i| d.in_degree(i)).collect(),
        );
        assert_eq!(before, after, "switching changed the degree sequence");
        assert!(net.iter().all(|&x| x == 0), "switching changed the cross-link matrix");
    }
    flips
}

/// A chain that owns its current state and scratch buffers.
#[derive(Clone, Debug)]
pub struct Chain {
    d: AdjacencyMatrix,
    g: GroupAssignment,
    cfg: ChainConfig,
    marks: LinkMarks,
    stats: ChainStats,
}

impl Chain {
    pub fn new(d: AdjacencyMatrix, g: GroupAssignment, cfg: ChainConfig) -> Result<Self> {
        g.check_len(d.n_nodes())?;
        let marks = LinkMarks::new(d.n_nodes());
        Ok(Chain { d, g, cfg, marks, stats: ChainStats::default() })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        let out = markov_step(&mut self.d, &self.g, &self.cfg, &mut self.marks, rng);
        self.stats.record(out);
        out
    }

    pub fn run<R: Rng + ?Sized>(&mut self, steps: usize, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }

    pub fn current(&self) -> &AdjacencyMatrix {
        &self.d
    }

    pub fn stats(&self) -> &ChainStats {
        &self.stats
    }

    pub fn into_state(self) -> (AdjacencyMatrix, ChainStats) {
        (self.d, self.stats)
    }
}

/// Applies `cfg.tau` chain steps to a copy of `d`.
pub fn markov_draw<R: Rng + ?Sized>(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<AdjacencyMatrix> {
    let mut chain = Chain::new(d.clone(), g.clone(), *cfg)?;
    chain.run(cfg.tau, rng);
    Ok(chain.into_state().0)
}

/// `b` independent draws, each a fresh chain of `cfg.tau` steps started at
/// `d` with its own substream. Results are in draw order regardless of
/// scheduling.
pub fn parallel_draws(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    cfg: &ChainConfig,
    b: usize,
) -> Result<(Vec<AdjacencyMatrix>, ChainStats)> {
    g.check_len(d.n_nodes())?;
    let results: Vec<(AdjacencyMatrix, ChainStats)> = (0..b)
        .into_par_iter()
        .map(|idx| {
            let mut rng = substream(cfg.seed, &[DRAW_STREAM, idx as u64]);
            let mut chain = Chain::new(d.clone(), g.clone(), *cfg).expect("lengths checked");
            chain.run(cfg.tau, &mut rng);
            chain.into_state()
        })
        .collect();
    let mut stats = ChainStats::default();
    let draws = results
        .into_iter()
        .map(|(m, s)| {
            stats.merge(&s);
            m
        })
        .collect();
    Ok((draws, stats))
}

/// Smallest `tau` giving `r` expected modifications per arc, from pilot
/// statistics. Never below 1.
pub fn mixing_time_heuristic(arcs: usize, pilot: &ChainStats, r: f64) -> Result<usize> {
    if pilot.accepted == 0 {
        return Err(Error::FrozenChain(format!(
            "no accepted switches in a pilot of {} steps; the reference set may be a \
             single network, or a longer pilot is needed",
            pilot.steps
        )));
    }
    let per_step = pilot.flips_per_accepted() * pilot.acceptance_rate();
    let tau = (r.max(0.0) * arcs as f64 / per_step).ceil();
    Ok((tau as usize).max(1))
}

/// Runs a pilot chain of `pilot_steps` steps and derives `tau` from it.
pub fn tau_from_pilot(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    q: f64,
    seed: u64,
    pilot_steps: usize,
    r: f64,
) -> Result<(usize, ChainStats)> {
    let cfg = ChainConfig { tau: pilot_steps, q, seed };
    let mut chain = Chain::new(d.clone(), g.clone(), cfg)?;
    chain.run(pilot_steps, &mut substream(seed, &[PILOT_STREAM]));
    let stats = *chain.stats();
    Ok((mixing_time_heuristic(d.arc_count(), &stats, r)?, stats))
}
