use super::pvalue::tie_tolerance;
use super::statistic::PreparedStatistic;
use crate::error::{Error, Result};
use crate::graph::{cross_link_matrix, degree_sequence, AdjacencyMatrix, GroupAssignment};
use crate::sampler::enumerate_reference_set;

/// Cut-off and boundary randomization of the exact conditional test:
/// reject when `R > c`, reject with probability `g` when `R = c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalValues {
    pub c_alpha: f64,
    pub g_alpha: f64,
    /// Values within `[tie_lo, tie_hi]` count as equal to `c_alpha`.
    tie_lo: f64,
    tie_hi: f64,
}

impl CriticalValues {
    pub fn critical_function(&self, r: f64) -> f64 {
        if r > self.tie_hi {
            1.0
        } else if r >= self.tie_lo {
            self.g_alpha
        } else {
            0.0
        }
    }
}

/// Critical values for a statistic that is uniform over `values` (one per
/// network of the reference set). Values closer than the tie tolerance are
/// merged into one support point.
pub fn critical_values_from_values(values: &[f64], alpha: f64) -> Result<CriticalValues> {
    if values.is_empty() {
        return Err(Error::invalid("empty reference set"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("statistic undefined on part of the reference set"));
    }
    if alpha.is_nan() {
        return Err(Error::invalid("alpha is NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("no NaN"));
    let total = sorted.len() as f64;

    // Support points in decreasing order: (lo, hi, count).
    let mut support: Vec<(f64, f64, usize)> = Vec::new();
    for &v in &sorted {
        match support.last_mut() {
            Some((lo, _, count)) if *lo - v <= tie_tolerance(*lo) => {
                *lo = v;
                *count += 1;
            }
            _ => support.push((v, v, 1)),
        }
    }

    if alpha >= 1.0 {
        return Ok(CriticalValues { c_alpha: f64::NEG_INFINITY, g_alpha: 1.0, tie_lo: f64::NEG_INFINITY, tie_hi: f64::NEG_INFINITY });
    }
    let (lo, hi, _) = support[0];
    if alpha <= 0.0 {
        return Ok(CriticalValues { c_alpha: hi, g_alpha: 0.0, tie_lo: lo, tie_hi: hi });
    }
    let slack = 1e-12 * total;
    let mut above = 0usize;
    for &(lo, hi, count) in &support {
        if (above as f64) < alpha * total - slack {
            let next = above + count;
            if (next as f64) >= alpha * total - slack {
                let g = ((alpha * total - above as f64) / count as f64).clamp(0.0, 1.0);
                return Ok(CriticalValues { c_alpha: hi, g_alpha: g, tie_lo: lo, tie_hi: hi });
            }
            above = next;
        }
    }
    unreachable!("alpha < 1 is reached before the support is exhausted")
}

/// Exact critical values over the enumerated reference set of `d`.
pub fn exact_conditional_critical_values(
    d: &AdjacencyMatrix,
    g: &GroupAssignment,
    stat: &PreparedStatistic,
    alpha: f64,
) -> Result<CriticalValues> {
    let set = enumerate_reference_set(&degree_sequence(d), &cross_link_matrix(d, g), g)?;
    let values: Vec<f64> = set.iter().map(|m| stat.evaluate(m)).collect();
    critical_values_from_values(&values, alpha)
}

/// Rejection probability of the randomized test under the uniform
/// distribution on `values`.
pub fn exact_size(values: &[f64], cv: &CriticalValues) -> f64 {
    values.iter().map(|&v| cv.critical_function(v)).sum::<f64>() / values.len() as f64
}
