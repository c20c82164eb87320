//! Closed-form analysis of the structured families: level-chain crossing
//! moments and funnel hitting moments by recursion, geodesic decompositions
//! of tree hitting times, and the comb growth table for the interval scan.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{interval_ratio_scan, BoundsError};
use crate::chain::srw_chain;
use crate::graph::{comb, Graph, GraphError};
use crate::linear::{hitting_distribution, hitting_mean, hitting_second_moment, SolveError};

/// Tail mass at which growth-table distributions are truncated. Deep enough
/// that the interval scan's tail-uncertainty gate stays conclusive on the
/// largest combs.
pub const GROWTH_TAIL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("{what}: {detail}")]
    ParameterOutOfRange { what: &'static str, detail: String },
    #[error("graph is not a tree")]
    NotATree,
    #[error("geodesic increments sum to {sum}, solved mean is {solved}")]
    GeodesicMismatch { sum: f64, solved: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

fn param_err(what: &'static str, detail: &str) -> ConstructionError {
    ConstructionError::ParameterOutOfRange { what, detail: detail.to_string() }
}

/// Moments of the level-chain crossing times. `crossing_mean[i]` and
/// `crossing_variance[i]` describe `A_i`, the time to first reach level
/// `i+1` from level `i`; the climb aggregates `A_0 + ... + A_{L-1}`
/// (independent summands), and the retry is the last crossing `A_{L-1}`
/// repeated after each failed attempt on the target.
#[derive(Debug, Clone, Serialize)]
pub struct LevelMoments {
    pub crossing_mean: Vec<f64>,
    pub crossing_variance: Vec<f64>,
    pub climb_mean: f64,
    pub climb_variance: f64,
    pub retry_mean: f64,
    pub retry_variance: f64,
}

/// Crossing-time recursion for the depth process of a funnel with `levels`
/// levels and branching `branching`: each unit of depth is crossed in one
/// step with probability `B/(B+1)`, otherwise the walk falls back one level
/// and must recross it.
///
/// Invariants: `E A_0 = 1`, `Var A_0 = 0`, `E A_i <= 3`, and
/// `Var A_i <= 48/B` for every `i`.
pub fn level_moments(levels: usize, branching: u64) -> Result<LevelMoments, ConstructionError> {
    if levels < 2 {
        return Err(param_err("level_moments", "levels must be >= 2"));
    }
    if branching < 2 {
        return Err(param_err("level_moments", "branching must be >= 2"));
    }
    let b = branching as f64;
    let mut crossing_mean = Vec::with_capacity(levels);
    let mut crossing_variance = Vec::with_capacity(levels);
    crossing_mean.push(1.0);
    crossing_variance.push(0.0);
    for i in 1..levels {
        let prev_mean = crossing_mean[i - 1];
        let prev_var = crossing_variance[i - 1];
        let retry = 1.0 + prev_mean;
        crossing_mean.push(1.0 + retry / b);
        crossing_variance.push(prev_var / b + (b + 1.0) / (b * b) * retry * retry);
    }
    Ok(LevelMoments {
        climb_mean: crossing_mean.iter().sum(),
        climb_variance: crossing_variance.iter().sum(),
        retry_mean: crossing_mean[levels - 1],
        retry_variance: crossing_variance[levels - 1],
        crossing_mean,
        crossing_variance,
    })
}

/// Hitting-time moments of the funnel target, in closed form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunnelMoments {
    pub levels: usize,
    pub branching: u64,
    pub mean: f64,
    pub variance: f64,
    /// `P(tau = levels + 1)`: the walk descends without ever backtracking
    /// and the final coin succeeds.
    pub shortest_path_probability: f64,
    /// `ln |V|` of the funnel graph, overflow-safe for any parameters.
    pub log_vertex_count: f64,
}

/// Exact moments of the hitting time of the funnel target from the root,
/// computed from the level-chain decomposition: climb to the last level,
/// then a geometric number of failed one-step attempts (success probability
/// 1/2), each followed by a recross of the last level.
pub fn funnel_tau_moments(levels: usize, branching: u64) -> Result<FunnelMoments, ConstructionError> {
    let lm = level_moments(levels, branching)?;
    let retry = 1.0 + lm.retry_mean;
    let mean = lm.climb_mean + 1.0 + retry;
    let variance = lm.climb_variance + lm.retry_variance + 2.0 * retry * retry;
    let b = branching as f64;
    let l = levels as f64;
    let shortest_path_probability = 0.5 * (-(l - 1.0) * (1.0 / b).ln_1p()).exp();
    let t = (l + 1.0) * b.ln() + (-(-(l + 1.0) * b.ln()).exp()).ln_1p() - (b - 1.0).ln();
    let log_vertex_count = t + (-t).exp().ln_1p();
    assert!(
        l + 1.0 <= mean + 1e-9 && mean <= 3.0 * l + 5.0 + 1e-9,
        "funnel mean {mean} escapes [L+1, 3L+5]"
    );
    Ok(FunnelMoments {
        levels,
        branching,
        mean,
        variance,
        shortest_path_probability,
        log_vertex_count,
    })
}

/// A tree hitting time decomposed along the geodesic: `increments[j]` is
/// `E_{u_j} tau_{u_{j+1}}`, computed by the far-side edge count, and
/// `voltages[j] = l - j` is the unit-flow voltage at `u_j` in the graph
/// layer.
#[derive(Debug, Clone, Serialize)]
pub struct TreeGeodesic {
    pub geodesic: Vec<usize>,
    pub increments: Vec<f64>,
    pub mean: f64,
    pub voltages: Vec<f64>,
}

/// Decomposes `E_x tau_y` on a tree along the `x`-`y` geodesic. Each
/// adjacent crossing mean is `2k + 1` where `k` counts the edges on the far
/// side of the crossed edge; the sum is cross-checked against the linear
/// solver within `1e-9` relative.
pub fn tree_geodesic_profile(
    g: &Graph,
    x: usize,
    y: usize,
) -> Result<TreeGeodesic, ConstructionError> {
    let n = g.vertex_count();
    if x >= n || y >= n {
        return Err(param_err("tree_geodesic_profile", "state out of range"));
    }
    if x == y {
        return Err(param_err("tree_geodesic_profile", "source equals target"));
    }
    if !g.is_tree() {
        return Err(ConstructionError::NotATree);
    }
    let geodesic = g.shortest_path(x, y);
    let len = geodesic.len() - 1;

    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[y] = true;
    order.push(y);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                order.push(v);
            }
        }
    }
    let mut subtree = vec![1usize; n];
    for &u in order.iter().skip(1).rev() {
        subtree[parent[u]] += subtree[u];
    }

    let increments: Vec<f64> =
        geodesic[..len].iter().map(|&u| (2 * subtree[u] - 1) as f64).collect();
    let sum: f64 = increments.iter().sum();
    let solved = hitting_mean(&srw_chain(g), y)?.values[x];
    if (sum - solved).abs() > 1e-9 * solved.abs().max(1.0) {
        return Err(ConstructionError::GeodesicMismatch { sum, solved });
    }
    let voltages = (0..=len).map(|j| (len - j) as f64).collect();
    Ok(TreeGeodesic { geodesic, increments, mean: sum, voltages })
}

/// One row of the interval-scan growth table on the comb family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GrowthRow {
    pub m: usize,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub t_star: usize,
    /// Max of `P(t <= tau <= t+n) * t/n` over `t > n`, window length `n`.
    pub ratio: f64,
    pub ratio_over_sqrt_log: f64,
}

/// Builds `comb(m)` for each `m` in the range, computes the exact hitting
/// distribution of the spine end `w_0` from `w_m` (tail at most
/// [`GROWTH_TAIL`]), and scans the interval functional at window length
/// `n = |V|`. Rows are computed in parallel and returned in ascending `m`.
pub fn interval_growth_table(
    m_lo: usize,
    m_hi: usize,
) -> Result<Vec<GrowthRow>, ConstructionError> {
    if m_lo < 1 || m_lo > m_hi {
        return Err(param_err("interval_growth_table", "need 1 <= m_lo <= m_hi"));
    }
    (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let g = comb(m)?;
            let c = srw_chain(&g);
            let n = g.vertex_count();
            let mean = hitting_mean(&c, 0)?.values[m];
            let variance = hitting_second_moment(&c, 0)?.variance[m];
            let d = hitting_distribution(&c, m, 0, GROWTH_TAIL)?;
            let scan = interval_ratio_scan(&d, n)?;
            Ok(GrowthRow {
                m,
                n,
                mean,
                variance,
                t_star: scan.t_star,
                ratio: scan.ratio,
                ratio_over_sqrt_log: scan.ratio / (1.0 + (n as f64).ln()).sqrt(),
            })
        })
        .collect()
}

/// TSV with a leading column-name comment and the family marker.
pub fn growth_table_tsv(rows: &[GrowthRow]) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("# m n mean var t_star ratio ratio_over_sqrtlog\n# family=comb\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.m, r.n, r.mean, r.variance, r.t_star, r.ratio, r.ratio_over_sqrt_log
        )
        .unwrap();
    }
    out
}

/// JSON form of the growth table, family-tagged.
pub fn growth_table_json(rows: &[GrowthRow]) -> serde_json::Value {
    serde_json::json!({
        "schema": "hitstat/growth-v1",
        "family": "comb",
        "rows": rows,
    })
}
