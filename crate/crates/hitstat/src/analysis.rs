//! Hitting-time profiles: for a source/target pair this module assembles the
//! mean and variance, the occupation measure, the induced voltage and unit
//! flow, and the effective resistance, in either of two normalizations.
//!
//! The graph layer divides occupation by vertex degree and puts weight 1 on
//! every edge; the chain layer divides by the stationary law and weights each
//! edge by its conductance. Both produce the same unit flow from source to
//! target, and the identity checks below hold in both:
//!
//! * mean identity: `E = sum_e w (g(u)-g(v)) (h(u)-h(v))`
//! * variance identity: `Var + E = sum_e w (g(u)+g(v)) (h(u)-h(v))^2`
//! * entropy sum: `sum_e w (g(u)-g(v))^2 / (g(u)+g(v))`, bounded by
//!   `1 + ln n` and the degree- and escape-refined variants
//! * local decomposition: `Var = sum_u mu(u) q(u)` with
//!   `q(u) = sum_v P(u,v) (h(v) - h(u) + 1)^2`

use serde::Serialize;
use thiserror::Error;

use crate::chain::ReversibleChain;
use crate::linear::{self, AbsorbingSystem, SolveError};

/// Voltages below this are treated as exactly zero in logarithmic terms.
const ZERO_VOLTAGE: f64 = 1e-14;

/// Allowed negative rounding on voltages.
const VOLTAGE_FLOOR: f64 = -1e-12;

/// Absolute tolerance on flow divergence at every state.
const DIVERGENCE_TOL: f64 = 1e-9;

/// Relative tolerance for agreement of the three variance routes.
const VARIANCE_ROUTE_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("graph layer requires a simple random walk chain: {detail}")]
    LayerMismatch { detail: String },
    #[error("state {state} out of range for {count} states")]
    StateOutOfRange { state: usize, count: usize },
    #[error("internal consistency check failed: {what} (residual {residual:e})")]
    InternalCheck { what: String, residual: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Which normalization the profile uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Graph,
    Chain,
}

/// One edge of the network with its weight and the flow it carries, oriented
/// from `u` to `v`.
#[derive(Debug, Clone, Serialize)]
pub struct FlowEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub theta: f64,
}

/// Everything the toolkit knows about one source/target pair.
#[derive(Debug, Clone, Serialize)]
pub struct HittingProfile {
    pub layer: Layer,
    pub source: usize,
    pub target: usize,
    pub state_count: usize,
    pub mean: f64,
    /// Variance via second moments: `s(x) - h(x)^2`.
    pub variance: f64,
    /// Variance via the local decomposition `sum mu(u) q(u)`.
    pub variance_local: f64,
    /// Variance via the edge identity, minus the mean.
    pub variance_edge: f64,
    pub hit_mean: Vec<f64>,
    pub hit_second: Vec<f64>,
    pub occupation: Vec<f64>,
    pub voltage: Vec<f64>,
    pub edges: Vec<FlowEdge>,
    /// Voltage at the source: effective resistance between the pair in this
    /// layer's conductance normalization.
    pub effective_resistance: f64,
    /// `R_eff * C_y` in the chain normalization; at least 1 for every
    /// reversible chain, independent of layer.
    pub escape_product: f64,
    /// Integer degrees when the chain is a simple random walk.
    pub degrees: Option<Vec<usize>>,
    pub mean_residual: f64,
    pub occupation_residual: f64,
}

struct Parts {
    h: Vec<f64>,
    s: Vec<f64>,
    mu: Vec<f64>,
    w: Vec<f64>,
    variance_moment: f64,
    variance_local: f64,
    escape_product: f64,
    mean_residual: f64,
    occupation_residual: f64,
}

fn solve_parts(chain: &ReversibleChain, x: usize, y: usize) -> Result<Parts, AnalysisError> {
    let n = chain.state_count();
    let sys = AbsorbingSystem::new(chain, &[(y, 0.0)]);
    let (h, moments) = linear::moments_with(&sys, y)?;
    let (mu, w) = linear::occupation_parts(&sys, x, y)?;
    let mut variance_local = 0.0;
    for u in 0..n {
        if u == y {
            continue;
        }
        let mut qu = 0.0;
        for &(v, p) in chain.transitions(u) {
            let step = h.values[v] - h.values[u] + 1.0;
            qu += p * step * step;
        }
        variance_local += mu.values[u] * qu;
    }
    let escape_product = w[x] * chain.exit_conductance(y);
    Ok(Parts {
        variance_moment: moments.variance[x],
        h: h.values,
        s: moments.second.values,
        mu: mu.values,
        w,
        variance_local,
        escape_product,
        mean_residual: h.residual,
        occupation_residual: mu.residual,
    })
}

fn check_states(chain: &ReversibleChain, x: usize, y: usize) -> Result<(), AnalysisError> {
    let n = chain.state_count();
    for state in [x, y] {
        if state >= n {
            return Err(AnalysisError::StateOutOfRange { state, count: n });
        }
    }
    Ok(())
}

/// Builds the profile for one layer. The graph layer is only defined for
/// simple random walk chains. A coincident pair `x = y` yields the zero
/// profile (mean 0, variance 0, no flow); downstream checks skip it.
pub fn profile(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    layer: Layer,
) -> Result<HittingProfile, AnalysisError> {
    check_states(chain, x, y)?;
    if x == y {
        return zero_profile(chain, x, layer);
    }
    let parts = solve_parts(chain, x, y)?;
    assemble(chain, x, y, layer, &parts)
}

/// Builds both layers from one set of solves; the chain must be a simple
/// random walk. Used to cross-check the layer bridge `w = 2|E| g`.
pub(crate) fn profile_both(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
) -> Result<(HittingProfile, HittingProfile), AnalysisError> {
    check_states(chain, x, y)?;
    if x == y {
        return Ok((zero_profile(chain, x, Layer::Graph)?, zero_profile(chain, x, Layer::Chain)?));
    }
    let parts = solve_parts(chain, x, y)?;
    let graph = assemble(chain, x, y, Layer::Graph, &parts)?;
    let chain_side = assemble(chain, x, y, Layer::Chain, &parts)?;
    Ok((graph, chain_side))
}

fn zero_profile(
    chain: &ReversibleChain,
    x: usize,
    layer: Layer,
) -> Result<HittingProfile, AnalysisError> {
    let n = chain.state_count();
    let degrees = chain.srw_degrees();
    if layer == Layer::Graph && degrees.is_none() {
        return Err(AnalysisError::LayerMismatch {
            detail: "transition rows are not uniform over neighbors".to_string(),
        });
    }
    let edges: Vec<FlowEdge> = chain
        .support_edges()
        .map(|(u, v, c)| {
            let weight = match layer {
                Layer::Graph => 1.0,
                Layer::Chain => c,
            };
            FlowEdge { u, v, weight, theta: 0.0 }
        })
        .collect();
    Ok(HittingProfile {
        layer,
        source: x,
        target: x,
        state_count: n,
        mean: 0.0,
        variance: 0.0,
        variance_local: 0.0,
        variance_edge: 0.0,
        hit_mean: vec![0.0; n],
        hit_second: vec![0.0; n],
        occupation: vec![0.0; n],
        voltage: vec![0.0; n],
        edges,
        effective_resistance: 0.0,
        escape_product: 0.0,
        degrees: match layer {
            Layer::Graph => degrees,
            Layer::Chain => None,
        },
        mean_residual: 0.0,
        occupation_residual: 0.0,
    })
}

fn assemble(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    layer: Layer,
    parts: &Parts,
) -> Result<HittingProfile, AnalysisError> {
    let n = chain.state_count();
    let degrees = chain.srw_degrees();
    let voltage: Vec<f64> = match layer {
        Layer::Graph => {
            let degrees = degrees.as_ref().ok_or_else(|| AnalysisError::LayerMismatch {
                detail: "transition rows are not uniform over neighbors".to_string(),
            })?;
            (0..n).map(|u| parts.mu[u] / degrees[u] as f64).collect()
        }
        Layer::Chain => parts.w.clone(),
    };
    let edges: Vec<FlowEdge> = chain
        .support_edges()
        .map(|(u, v, c)| {
            let weight = match layer {
                Layer::Graph => 1.0,
                Layer::Chain => c,
            };
            FlowEdge { u, v, weight, theta: weight * (voltage[u] - voltage[v]) }
        })
        .collect();
    let mean = parts.h[x];
    let variance_edge = edges
        .iter()
        .map(|e| {
            let dh = parts.h[e.u] - parts.h[e.v];
            e.weight * (voltage[e.u] + voltage[e.v]) * dh * dh
        })
        .sum::<f64>()
        - mean;
    let profile = HittingProfile {
        layer,
        source: x,
        target: y,
        state_count: n,
        mean,
        variance: parts.variance_moment,
        variance_local: parts.variance_local,
        variance_edge,
        hit_mean: parts.h.clone(),
        hit_second: parts.s.clone(),
        occupation: parts.mu.clone(),
        effective_resistance: voltage[x],
        escape_product: parts.escape_product,
        degrees: match layer {
            Layer::Graph => degrees,
            Layer::Chain => None,
        },
        voltage,
        edges,
        mean_residual: parts.mean_residual,
        occupation_residual: parts.occupation_residual,
    };
    validate(&profile)?;
    Ok(profile)
}

fn validate(p: &HittingProfile) -> Result<(), AnalysisError> {
    let fail = |what: &str, residual: f64| {
        Err(AnalysisError::InternalCheck { what: what.to_string(), residual })
    };
    if p.voltage[p.target] != 0.0 {
        return fail("voltage vanishes at the target", p.voltage[p.target]);
    }
    if let Some(&worst) =
        p.voltage.iter().filter(|v| **v < VOLTAGE_FLOOR).min_by(|a, b| a.total_cmp(b))
    {
        return fail("voltages are nonnegative", worst);
    }
    let mut divergence = vec![0.0f64; p.state_count];
    for e in &p.edges {
        divergence[e.u] += e.theta;
        divergence[e.v] -= e.theta;
    }
    divergence[p.source] -= 1.0;
    divergence[p.target] += 1.0;
    let worst_div = divergence.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if worst_div > DIVERGENCE_TOL {
        return fail("flow has unit divergence at source and target only", worst_div);
    }
    let scale = 1.0f64.max(p.variance.abs());
    for (name, other) in
        [("local variance route", p.variance_local), ("edge variance route", p.variance_edge)]
    {
        let gap = (p.variance - other).abs();
        if gap > VARIANCE_ROUTE_TOL * scale {
            return fail(name, gap / scale);
        }
    }
    Ok(())
}

/// Two sides of an identity and their scale-relative gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }
}

/// `E = sum_e w (g(u)-g(v)) (h(u)-h(v))`.
pub fn mean_identity_check(p: &HittingProfile) -> IdentityCheck {
    let rhs = p.edges.iter().map(|e| e.theta * (p.hit_mean[e.u] - p.hit_mean[e.v])).sum();
    IdentityCheck { lhs: p.mean, rhs }
}

/// `Var + E = sum_e w (g(u)+g(v)) (h(u)-h(v))^2`.
pub fn variance_identity_check(p: &HittingProfile) -> IdentityCheck {
    IdentityCheck { lhs: p.variance + p.mean, rhs: p.variance_edge + p.mean }
}

/// The entropy-like edge sum with every bound that applies to this profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyReport {
    pub value: f64,
    /// `1 + ln n`; simple random walk layer only.
    pub state_bound: Option<f64>,
    /// `1 + (ln d(x,y) + ln deg(target)) / 2`; simple random walk layer only.
    pub degree_bound: Option<f64>,
    /// `1 + ln(R_eff * C_y) / 2`; every reversible chain.
    pub escape_bound: f64,
}

impl EntropyReport {
    /// Most negative slack over the applicable bounds; nonnegative slack
    /// everywhere means every bound holds.
    pub fn worst_slack(&self) -> f64 {
        let mut worst = self.escape_bound - self.value;
        for b in [self.state_bound, self.degree_bound].into_iter().flatten() {
            worst = worst.min(b - self.value);
        }
        worst
    }
}

/// `sum_e w (g(u)-g(v))^2 / (g(u)+g(v))`, skipping edges where both voltages
/// vanish.
pub fn entropy_sum(p: &HittingProfile) -> EntropyReport {
    let mut value = 0.0;
    for e in &p.edges {
        let total = p.voltage[e.u] + p.voltage[e.v];
        if total <= ZERO_VOLTAGE {
            continue;
        }
        let diff = p.voltage[e.u] - p.voltage[e.v];
        value += e.weight * diff * diff / total;
    }
    let (state_bound, degree_bound) = match (&p.degrees, p.layer) {
        (Some(degrees), Layer::Graph) if p.source != p.target => {
            let distance = support_distance(p) as f64;
            let target_degree = degrees[p.target] as f64;
            (
                Some(1.0 + (p.state_count as f64).ln()),
                Some(1.0 + 0.5 * (distance.ln() + target_degree.ln())),
            )
        }
        _ => (None, None),
    };
    EntropyReport {
        value,
        state_bound,
        degree_bound,
        escape_bound: 1.0 + 0.5 * p.escape_product.ln(),
    }
}

/// Graph distance between source and target over the profile's support
/// edges.
pub(crate) fn support_distance(p: &HittingProfile) -> usize {
    let n = p.state_count;
    let mut adj = vec![Vec::new(); n];
    for e in &p.edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[p.source] = 0;
    queue.push_back(p.source);
    while let Some(u) = queue.pop_front() {
        if u == p.target {
            break;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist[p.target]
}

/// Worst violation of the per-edge bound
/// `(a-b)^2/(a+b) <= (a-b)(ln a - ln b)/2` over edges with positive voltage;
/// exact arithmetic gives 0.
pub fn edge_entropy_violation(p: &HittingProfile) -> f64 {
    let mut worst = 0.0f64;
    for e in &p.edges {
        let a = p.voltage[e.u];
        let b = p.voltage[e.v];
        if a + b <= ZERO_VOLTAGE || a < 0.0 || b < 0.0 {
            continue;
        }
        let lhs = (a - b) * (a - b) / (a + b);
        let rhs = 0.5 * (a - b) * (a.ln() - b.ln());
        if rhs.is_nan() {
            continue;
        }
        worst = worst.max(lhs - rhs);
    }
    worst
}

/// Per-state conditional step variance `q` and the total `sum mu(u) q(u)`.
#[derive(Debug, Clone, Serialize)]
pub struct LocalVariance {
    pub q: Vec<f64>,
    pub total: f64,
}

pub fn local_variance_decomposition(chain: &ReversibleChain, p: &HittingProfile) -> LocalVariance {
    let mut q = vec![0.0; p.state_count];
    let mut total = 0.0;
    for u in 0..p.state_count {
        if u == p.target {
            continue;
        }
        let mut qu = 0.0;
        for &(v, prob) in chain.transitions(u) {
            let step = p.hit_mean[v] - p.hit_mean[u] + 1.0;
            qu += prob * step * step;
        }
        q[u] = qu;
        total += p.occupation[u] * qu;
    }
    LocalVariance { q, total }
}

/// Max over non-target states of `|E_u h(X_1) - (h(u) - 1)|`; the mean vector
/// satisfies this one-step equation exactly.
pub fn onestep_mean_check(chain: &ReversibleChain, p: &HittingProfile) -> f64 {
    let mut worst = 0.0f64;
    for u in 0..p.state_count {
        if u == p.target {
            continue;
        }
        let mut ph = 0.0;
        for &(v, prob) in chain.transitions(u) {
            ph += prob * p.hit_mean[v];
        }
        worst = worst.max((ph - (p.hit_mean[u] - 1.0)).abs());
    }
    worst
}

/// Max over functions-free checks of summation by parts:
/// `sum_e theta_e (f(u)-f(v)) = f(x) - f(y)` for `f = h` and `f = g`.
pub fn summation_by_parts_gap(p: &HittingProfile) -> f64 {
    let mut worst = 0.0f64;
    for f in [&p.hit_mean, &p.voltage] {
        let lhs: f64 = p.edges.iter().map(|e| e.theta * (f[e.u] - f[e.v])).sum();
        let rhs = f[p.source] - f[p.target];
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    worst
}

/// JSON report for one profile.
pub fn profile_report(p: &HittingProfile) -> serde_json::Value {
    let mut value = serde_json::to_value(p).expect("profile serializes");
    let obj = value.as_object_mut().expect("profile is a JSON object");
    obj.insert("schema".to_string(), "hitstat/profile-v1".into());
    obj.insert("method".to_string(), "exact".into());
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{chain_from_conductances, srw_chain, ConductanceTable};
    use crate::graph;

    fn path2_graph_profile() -> HittingProfile {
        let c = srw_chain(&graph::path(2).unwrap());
        profile(&c, 0, 2, Layer::Graph).unwrap()
    }

    #[test]
    fn path2_graph_voltages_and_resistance() {
        let p = path2_graph_profile();
        assert!((p.voltage[0] - 2.0).abs() < 1e-12);
        assert!((p.voltage[1] - 1.0).abs() < 1e-12);
        assert_eq!(p.voltage[2], 0.0);
        assert!((p.effective_resistance - 2.0).abs() < 1e-12);
        assert!((p.escape_product - 2.0).abs() < 1e-12);
        assert!((p.mean - 4.0).abs() < 1e-12);
        assert!((p.variance - 8.0).abs() < 1e-10);
        assert!((p.variance_local - 8.0).abs() < 1e-10);
        assert!((p.variance_edge - 8.0).abs() < 1e-10);
    }

    #[test]
    fn path2_flow_is_unit_along_the_path() {
        let p = path2_graph_profile();
        assert_eq!(p.edges.len(), 2);
        for e in &p.edges {
            assert_eq!(e.weight, 1.0);
            assert!((e.theta - 1.0).abs() < 1e-12, "unit flow on ({}, {})", e.u, e.v);
        }
    }

    #[test]
    fn path2_identities_hold() {
        let p = path2_graph_profile();
        let mean = mean_identity_check(&p);
        assert!((mean.lhs - 4.0).abs() < 1e-12);
        assert!(mean.relative_gap() < 1e-12);
        let var = variance_identity_check(&p);
        assert!((var.rhs - 12.0).abs() < 1e-10);
        assert!(var.relative_gap() < 1e-12);
    }

    #[test]
    fn path2_entropy_sum_and_bounds() {
        let p = path2_graph_profile();
        let ent = entropy_sum(&p);
        assert!((ent.value - 4.0 / 3.0).abs() < 1e-12);
        assert!((ent.state_bound.unwrap() - (1.0 + 3f64.ln())).abs() < 1e-12);
        assert!((ent.degree_bound.unwrap() - (1.0 + 0.5 * 2f64.ln())).abs() < 1e-12);
        assert!((ent.escape_bound - (1.0 + 0.5 * 2f64.ln())).abs() < 1e-12);
        assert!(ent.worst_slack() >= 0.0);
        assert!(edge_entropy_violation(&p) <= 1e-12);
    }

    #[test]
    fn path2_chain_layer_scales_voltage_by_total_conductance() {
        let c = srw_chain(&graph::path(2).unwrap());
        let (graph_side, chain_side) = profile_both(&c, 0, 2).unwrap();
        for u in 0..3 {
            assert!((chain_side.voltage[u] - 4.0 * graph_side.voltage[u]).abs() < 1e-12);
        }
        assert!((chain_side.effective_resistance - 8.0).abs() < 1e-12);
        assert!((chain_side.escape_product - graph_side.escape_product).abs() < 1e-14);
        let mean = mean_identity_check(&chain_side);
        assert!(mean.relative_gap() < 1e-12);
        let ent_g = entropy_sum(&graph_side);
        let ent_c = entropy_sum(&chain_side);
        assert!((ent_g.value - ent_c.value).abs() < 1e-12, "entropy is scale invariant");
        assert!(ent_c.state_bound.is_none());
    }

    #[test]
    fn complete3_profile_matches_hand_solve() {
        let c = srw_chain(&graph::complete(3).unwrap());
        let p = profile(&c, 0, 2, Layer::Graph).unwrap();
        assert!((p.occupation[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((p.occupation[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.voltage[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.voltage[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((entropy_sum(&p).value - 10.0 / 9.0).abs() < 1e-12);
        let mean = mean_identity_check(&p);
        assert!((mean.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn star4_leaf_pair_occupation_and_resistance() {
        let c = srw_chain(&graph::star(4).unwrap());
        let p = profile(&c, 2, 1, Layer::Graph).unwrap();
        assert!((p.occupation[2] - 2.0).abs() < 1e-12);
        assert!((p.occupation[0] - 3.0).abs() < 1e-12);
        assert!((p.occupation[3] - 1.0).abs() < 1e-12);
        assert!((p.effective_resistance - 2.0).abs() < 1e-12);
        assert!((p.mean - 6.0).abs() < 1e-12);
        let total: f64 = p.occupation.iter().sum();
        assert!((total - p.mean).abs() < 1e-12);
    }

    #[test]
    fn onestep_and_summation_by_parts_are_tight() {
        let c = srw_chain(&graph::bary_tree(3, 4).unwrap());
        let p = profile(&c, 5, 0, Layer::Graph).unwrap();
        assert!(onestep_mean_check(&c, &p) <= 1e-10);
        assert!(summation_by_parts_gap(&p) <= 1e-9);
        let local = local_variance_decomposition(&c, &p);
        assert!((local.total - p.variance).abs() <= 1e-8 * p.variance.max(1.0));
    }

    #[test]
    fn graph_layer_rejects_weighted_chains() {
        let table =
            ConductanceTable::new(&[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let c = chain_from_conductances(&table).unwrap();
        let err = profile(&c, 0, 2, Layer::Graph).unwrap_err();
        assert!(matches!(err, AnalysisError::LayerMismatch { .. }));
        let p = profile(&c, 0, 2, Layer::Chain).unwrap();
        assert!(p.degrees.is_none());
        assert!(mean_identity_check(&p).relative_gap() < 1e-10);
        assert!(variance_identity_check(&p).relative_gap() < 1e-10);
    }

    #[test]
    fn coincident_pair_yields_zero_profile() {
        let c = srw_chain(&graph::path(2).unwrap());
        let p = profile(&c, 1, 1, Layer::Graph).unwrap();
        assert_eq!(p.mean, 0.0);
        assert_eq!(p.variance, 0.0);
        assert_eq!(p.effective_resistance, 0.0);
        assert!(p.edges.iter().all(|e| e.theta == 0.0));
        assert_eq!(mean_identity_check(&p).relative_gap(), 0.0);
    }

    #[test]
    fn out_of_range_states_are_rejected() {
        let c = srw_chain(&graph::path(2).unwrap());
        assert!(matches!(
            profile(&c, 0, 9, Layer::Graph).unwrap_err(),
            AnalysisError::StateOutOfRange { state: 9, count: 3 }
        ));
    }

    #[test]
    fn profile_report_carries_schema_and_method() {
        let p = path2_graph_profile();
        let report = profile_report(&p);
        assert_eq!(report["schema"], "hitstat/profile-v1");
        assert_eq!(report["method"], "exact");
        assert_eq!(report["layer"], "graph");
        assert_eq!(report["state_count"], 3);
    }
}
