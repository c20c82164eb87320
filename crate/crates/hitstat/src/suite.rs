//! Corpus-wide verification suites: exact identities, theorem bounds, and
//! funnel lumping, each aggregated to one worst-case row per check and
//! instance.
//!
//! Instances are processed in parallel; rows merge in corpus order, so a
//! suite report is byte-stable for a given configuration.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    edge_entropy_violation, entropy_sum, mean_identity_check, onestep_mean_check, profile,
    profile_both, summation_by_parts_gap, variance_identity_check, HittingProfile, Layer,
};
use crate::bounds::{
    check_bounds_with_floor, escape_identity_check, is_deterministic, BoundSelection, SLACK_FLOOR,
};
use crate::chain::{funnel_level_chain, srw_chain, ReversibleChain};
use crate::constructions::{funnel_tau_moments, level_moments, tree_geodesic_profile};
use crate::corpus::{graph_corpus, chain_corpus, pairs_for, CorpusInstance, EXHAUSTIVE_PAIR_LIMIT};
use crate::graph::funnel;
use crate::linear::{
    hitting_distribution, moments_with, AbsorbingSystem, Strategy, DENSE_LIMIT,
};

/// Relative tolerance for exact identities.
pub const REL_TOL: f64 = 1e-9;

/// Absolute tolerance for the one-step mean equation.
pub const ONESTEP_TOL: f64 = 1e-10;

/// Relative tolerance for agreement of the three variance routes.
pub const ROUTE_TOL: f64 = 1e-8;

/// Absolute tolerance for the per-edge entropy inequality.
pub const EDGE_INEQ_TOL: f64 = 1e-12;

/// Relative tolerance for structural-vs-dense solver agreement.
pub const SOLVER_EQUIV_TOL: f64 = 1e-10;

/// Variance below this is treated as zero in the determinism sweep.
pub const DETERMINISM_TOL: f64 = 1e-12;

/// Entrywise tolerance for funnel/level-chain distribution equality.
pub const LUMPING_ENTRY_TOL: f64 = 1e-10;

/// Absolute tolerance for the shortest-path probability formula.
pub const SHORTCUT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
#[error("suite computation on {instance} failed: {detail}")]
pub struct SuiteError {
    pub instance: String,
    pub detail: String,
}

fn fail(instance: &str, e: &dyn std::fmt::Display) -> SuiteError {
    SuiteError { instance: instance.to_string(), detail: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Identities,
    Bounds,
    Lumping,
    All,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Identities => "identities",
            SuiteKind::Bounds => "bounds",
            SuiteKind::Lumping => "lumping",
            SuiteKind::All => "all",
        }
    }
}

/// Corpus size cap, corpus seed, and the slack floor below which a bound
/// counts as violated.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub max_n: usize,
    pub seed: u64,
    pub slack_floor: f64,
    /// Largest funnel materialized for the lumping suite.
    pub lumping_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_n: 500, seed: 7, slack_floor: SLACK_FLOOR, lumping_cap: 5000 }
    }
}

/// Worst case of one check on one instance. `margin` is the distance to the
/// failure boundary; any negative margin means the check failed somewhere.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub instance: String,
    pub check: String,
    pub value: f64,
    pub margin: f64,
    pub detail: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub rows: Vec<SuiteRow>,
    pub checks: u64,
    pub failures: u64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// One row per line: instance, check, value, margin, holds, detail.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# suite={} checks={} failures={}\n", self.suite, self.checks, self.failures
        );
        out.push_str("instance\tcheck\tvalue\tmargin\tholds\tdetail\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{:e}\t{:e}\t{}\t{}\n",
                r.instance,
                r.check,
                r.value,
                r.margin,
                if r.holds { "holds" } else { "FAILS" },
                r.detail,
            ));
        }
        out
    }
}

/// JSON report for one suite run.
pub fn outcome_json(o: &SuiteOutcome) -> serde_json::Value {
    let mut value = serde_json::to_value(o).expect("outcome serializes");
    let obj = value.as_object_mut().expect("outcome is a JSON object");
    obj.insert("schema".to_string(), "hitstat/suite-v1".into());
    obj.insert("passed".to_string(), o.passed().into());
    value
}

/// Per-instance row accumulator keeping the worst margin per check.
struct Recorder {
    instance: String,
    rows: BTreeMap<&'static str, SuiteRow>,
    checks: u64,
    failures: u64,
}

impl Recorder {
    fn new(instance: &str) -> Self {
        Recorder { instance: instance.to_string(), rows: BTreeMap::new(), checks: 0, failures: 0 }
    }

    fn record(&mut self, check: &'static str, value: f64, margin: f64, detail: String) {
        self.checks += 1;
        if margin < 0.0 {
            self.failures += 1;
        }
        match self.rows.get_mut(check) {
            Some(row) => {
                if margin < row.margin {
                    row.value = value;
                    row.margin = margin;
                    row.detail = detail;
                    row.holds = margin >= 0.0;
                }
            }
            None => {
                self.rows.insert(
                    check,
                    SuiteRow {
                        instance: self.instance.clone(),
                        check: check.to_string(),
                        value,
                        margin,
                        detail,
                        holds: margin >= 0.0,
                    },
                );
            }
        }
    }

    /// A residual that must stay at or below `tol`.
    fn residual(&mut self, check: &'static str, value: f64, tol: f64, detail: String) {
        self.record(check, value, tol - value, detail);
    }

    /// A slack that must stay at or above `floor`.
    fn slack(&mut self, check: &'static str, slack: f64, floor: f64, detail: String) {
        self.record(check, slack, slack - floor, detail);
    }

    /// A count of exact mismatches that must be zero.
    fn mismatches(&mut self, check: &'static str, count: usize, detail: String) {
        let margin = if count == 0 { 1.0 } else { -(count as f64) };
        self.record(check, count as f64, margin, detail);
    }
}

fn finish(suite: SuiteKind, recorders: Vec<Recorder>) -> SuiteOutcome {
    let mut rows = Vec::new();
    let mut checks = 0;
    let mut failures = 0;
    for r in recorders {
        checks += r.checks;
        failures += r.failures;
        rows.extend(r.rows.into_values());
    }
    SuiteOutcome { suite: suite.name().to_string(), rows, checks, failures }
}

/// Runs one suite over the standard corpus.
pub fn run_suite(kind: SuiteKind, config: &SuiteConfig) -> Result<SuiteOutcome, SuiteError> {
    match kind {
        SuiteKind::Identities => identities_suite(config),
        SuiteKind::Bounds => bounds_suite(config),
        SuiteKind::Lumping => lumping_suite(config),
        SuiteKind::All => {
            let mut all = identities_suite(config)?;
            for part in [bounds_suite(config)?, lumping_suite(config)?] {
                all.rows.extend(part.rows);
                all.checks += part.checks;
                all.failures += part.failures;
            }
            all.suite = SuiteKind::All.name().to_string();
            Ok(all)
        }
    }
}

fn full_corpus(config: &SuiteConfig) -> Vec<CorpusInstance> {
    let mut corpus = graph_corpus(config.max_n, config.seed);
    corpus.extend(chain_corpus(config.seed));
    corpus
}

fn identities_suite(config: &SuiteConfig) -> Result<SuiteOutcome, SuiteError> {
    let corpus = full_corpus(config);
    let recorders = corpus
        .par_iter()
        .map(|inst| identity_recorder(inst, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(finish(SuiteKind::Identities, recorders))
}

fn bounds_suite(config: &SuiteConfig) -> Result<SuiteOutcome, SuiteError> {
    let corpus = full_corpus(config);
    let recorders = corpus
        .par_iter()
        .map(|inst| bounds_recorder(inst, config))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(finish(SuiteKind::Bounds, recorders))
}

/// Max deviation of the flow divergence from +1 at the source, -1 at the
/// target, and 0 elsewhere.
fn divergence_gap(p: &HittingProfile) -> f64 {
    let mut divergence = vec![0.0f64; p.state_count];
    for e in &p.edges {
        divergence[e.u] += e.theta;
        divergence[e.v] -= e.theta;
    }
    divergence[p.source] -= 1.0;
    divergence[p.target] += 1.0;
    divergence.iter().fold(0.0f64, |m, d| m.max(d.abs()))
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Identity rows evaluated on a single layer's profile.
fn layer_rows(rec: &mut Recorder, p: &HittingProfile, detail: &str) {
    let tag = match p.layer {
        Layer::Graph => "graph",
        Layer::Chain => "chain",
    };
    let at = |_: &str| format!("{detail} layer={tag}");
    rec.residual("mean-identity", mean_identity_check(p).relative_gap(), REL_TOL, at(detail));
    rec.residual(
        "variance-identity",
        variance_identity_check(p).relative_gap(),
        REL_TOL,
        at(detail),
    );
    rec.residual("summation-by-parts", summation_by_parts_gap(p), REL_TOL, at(detail));
    rec.residual("divergence", divergence_gap(p), REL_TOL, at(detail));
    rec.residual("edge-entropy", edge_entropy_violation(p), EDGE_INEQ_TOL, at(detail));
}

/// Identity rows independent of the layer scaling, evaluated once per pair.
fn scalar_rows(
    rec: &mut Recorder,
    chain: &ReversibleChain,
    p: &HittingProfile,
    config: &SuiteConfig,
    detail: &str,
) {
    rec.residual("onestep", onestep_mean_check(chain, p), ONESTEP_TOL, detail.to_string());
    let occupation_total: f64 = p.occupation.iter().sum();
    rec.residual(
        "occupation-sum",
        rel_gap(occupation_total, p.mean),
        REL_TOL,
        detail.to_string(),
    );
    let route_gap = rel_gap(p.variance, p.variance_local).max(rel_gap(p.variance, p.variance_edge));
    rec.residual("variance-routes", route_gap, ROUTE_TOL, detail.to_string());
    let ent = entropy_sum(p);
    if let Some(bound) = ent.state_bound {
        rec.slack("entropy-state", bound - ent.value, config.slack_floor, detail.to_string());
    }
    if let Some(bound) = ent.degree_bound {
        rec.slack("entropy-degree", bound - ent.value, config.slack_floor, detail.to_string());
    }
    rec.slack(
        "entropy-escape",
        ent.escape_bound - ent.value,
        config.slack_floor,
        detail.to_string(),
    );
}

/// Structural solvers must agree with dense elimination wherever both apply.
fn solver_equivalence_rows(rec: &mut Recorder, inst: &CorpusInstance) -> Result<(), SuiteError> {
    let chain = &inst.chain;
    let n = chain.state_count();
    if n > DENSE_LIMIT {
        return Ok(());
    }
    for y in [0, n - 1] {
        let auto = AbsorbingSystem::new(chain, &[(y, 0.0)]);
        if auto.strategy() == Strategy::Dense {
            return Ok(());
        }
        let dense = AbsorbingSystem::with_strategy(chain, &[(y, 0.0)], Strategy::Dense);
        let ones = vec![1.0; n];
        let (ha, _) = auto.solve(&ones).map_err(|e| fail(&inst.name, &e))?;
        let (hd, _) = dense.solve(&ones).map_err(|e| fail(&inst.name, &e))?;
        let gap = ha.iter().zip(&hd).map(|(a, d)| rel_gap(*a, *d)).fold(0.0f64, f64::max);
        rec.residual("solver-equivalence", gap, SOLVER_EQUIV_TOL, format!("y={y}"));
    }
    Ok(())
}

fn identity_recorder(
    inst: &CorpusInstance,
    config: &SuiteConfig,
) -> Result<Recorder, SuiteError> {
    let mut rec = Recorder::new(&inst.name);
    let chain = &inst.chain;
    let n = chain.state_count();
    solver_equivalence_rows(&mut rec, inst)?;
    let tree = inst.graph.as_ref().map_or(false, |g| g.is_tree());
    for (x, y) in pairs_for(n, config.seed) {
        let detail = format!("x={x} y={y}");
        let p = if let Some(g) = &inst.graph {
            let (pg, pc) = profile_both(chain, x, y).map_err(|e| fail(&inst.name, &e))?;
            layer_rows(&mut rec, &pg, &detail);
            layer_rows(&mut rec, &pc, &detail);
            let scale = 2.0 * g.edge_count() as f64;
            let bridge = (0..n)
                .map(|u| rel_gap(pc.voltage[u], scale * pg.voltage[u]))
                .fold(0.0f64, f64::max);
            rec.residual("layer-bridge", bridge, REL_TOL, detail.clone());
            let ent_gap = rel_gap(entropy_sum(&pg).value, entropy_sum(&pc).value);
            rec.residual("entropy-layer-scale", ent_gap, REL_TOL, detail.clone());
            let distance = g.distance(x, y) as f64;
            rec.slack(
                "resistance-distance",
                distance - pg.effective_resistance,
                config.slack_floor,
                detail.clone(),
            );
            if tree {
                let tg = tree_geodesic_profile(g, x, y).map_err(|e| fail(&inst.name, &e))?;
                rec.residual("tree-geodesic", rel_gap(tg.mean, pg.mean), REL_TOL, detail.clone());
                let len = tg.geodesic.len() - 1;
                let voltage_gap = tg
                    .geodesic
                    .iter()
                    .enumerate()
                    .map(|(j, &u)| (pg.voltage[u] - (len - j) as f64).abs())
                    .fold(0.0f64, f64::max);
                rec.residual("geodesic-voltage", voltage_gap, REL_TOL, detail.clone());
            }
            pg
        } else {
            let pc = profile(chain, x, y, Layer::Chain).map_err(|e| fail(&inst.name, &e))?;
            layer_rows(&mut rec, &pc, &detail);
            pc
        };
        scalar_rows(&mut rec, chain, &p, config, &detail);
        let escape = escape_identity_check(chain, x, y).map_err(|e| fail(&inst.name, &e))?;
        rec.residual("escape-identity", escape.residual, REL_TOL, detail.clone());
        rec.slack("escape-product", escape.product - 1.0, config.slack_floor, detail);
    }
    Ok(rec)
}

/// `P_x(tau_y = 1)`: read from the exact distribution on small instances,
/// from the transition row (its first iterate) on large ones.
fn first_step_mass(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    instance: &str,
) -> Result<f64, SuiteError> {
    if chain.state_count() <= EXHAUSTIVE_PAIR_LIMIT {
        let d = hitting_distribution(chain, x, y, 1e-9).map_err(|e| fail(instance, &e))?;
        return Ok(d.probs.get(1).copied().unwrap_or(0.0));
    }
    Ok(chain.prob(x, y))
}

fn bounds_recorder(inst: &CorpusInstance, config: &SuiteConfig) -> Result<Recorder, SuiteError> {
    let mut rec = Recorder::new(&inst.name);
    let chain = &inst.chain;
    let n = chain.state_count();
    let layer = if inst.graph.is_some() { Layer::Graph } else { Layer::Chain };
    for (x, y) in pairs_for(n, config.seed) {
        let detail = format!("x={x} y={y}");
        let p = profile(chain, x, y, layer).map_err(|e| fail(&inst.name, &e))?;
        let reports = check_bounds_with_floor(&p, &BoundSelection::Applicable, config.slack_floor)
            .map_err(|e| fail(&inst.name, &e))?;
        for r in reports {
            let check = bound_row_name(&r.name);
            rec.slack(check, r.slack, config.slack_floor, detail.clone());
        }
        if let Some(g) = &inst.graph {
            if !is_deterministic(g, x, y) {
                let p1 = first_step_mass(chain, x, y, &inst.name)?;
                rec.slack("two-step-floor", 0.5 - p1, config.slack_floor, detail.clone());
                rec.slack("mean-floor", p.mean - 1.5, config.slack_floor, detail.clone());
                if g.is_tree() {
                    let tg = tree_geodesic_profile(g, x, y).map_err(|e| fail(&inst.name, &e))?;
                    let last = *tg.increments.last().expect("nonempty geodesic");
                    rec.slack("final-increment", last - 3.0, config.slack_floor, detail.clone());
                }
            }
        }
    }
    if let Some(g) = &inst.graph {
        if n <= EXHAUSTIVE_PAIR_LIMIT {
            determinism_rows(&mut rec, inst, g)?;
        }
    }
    Ok(rec)
}

/// Stable row names for the theorem bounds evaluated by `check_bounds`.
fn bound_row_name(name: &str) -> &'static str {
    match name {
        "log-states" => "bound-log-states",
        "log-degree-distance" => "bound-log-degree-distance",
        "bounded-degree" => "bound-bounded-degree",
        "mean-over-degree" => "bound-mean-over-degree",
        "tree-double-mean" => "bound-tree-double-mean",
        "tree-log-distance" => "bound-tree-log-distance",
        "escape-resistance" => "bound-escape-resistance",
        other => panic!("unknown bound {other}"),
    }
}

/// Exhaustive cross-validation of the pendant characterization of a
/// deterministic hitting time against exact variances.
fn determinism_rows(
    rec: &mut Recorder,
    inst: &CorpusInstance,
    g: &crate::graph::Graph,
) -> Result<(), SuiteError> {
    let chain = &inst.chain;
    let n = chain.state_count();
    let mut mismatches = 0usize;
    let mut witness = String::from("none");
    for y in 0..n {
        let sys = AbsorbingSystem::new(chain, &[(y, 0.0)]);
        let (_, moments) = moments_with(&sys, y).map_err(|e| fail(&inst.name, &e))?;
        for x in 0..n {
            let predicted = is_deterministic(g, x, y);
            let actual = if x == y { true } else { moments.variance[x].abs() <= DETERMINISM_TOL };
            if predicted != actual {
                mismatches += 1;
                if mismatches == 1 {
                    witness = format!("x={x} y={y}");
                }
            }
        }
    }
    rec.mismatches("determinism", mismatches, witness);
    Ok(())
}

/// Funnel parameter grid with vertex count at most `cap`, in (B, L) order.
fn funnel_grid(cap: usize) -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for b in 2usize.. {
        let smallest = funnel_vertex_count(2, b);
        if smallest.map_or(true, |n| n > cap) {
            break;
        }
        for l in 2usize.. {
            match funnel_vertex_count(l, b) {
                Some(n) if n <= cap => grid.push((l, b)),
                _ => break,
            }
        }
    }
    grid
}

fn funnel_vertex_count(levels: usize, branching: usize) -> Option<usize> {
    let mut total = 1usize.checked_add(1)?;
    let mut layer = 1usize;
    for _ in 1..=levels {
        layer = layer.checked_mul(branching)?;
        total = total.checked_add(layer)?;
    }
    Some(total)
}

fn lumping_suite(config: &SuiteConfig) -> Result<SuiteOutcome, SuiteError> {
    let mut recorders = funnel_grid(config.lumping_cap)
        .par_iter()
        .map(|&(l, b)| lumping_recorder(l, b))
        .collect::<Result<Vec<_>, _>>()?;
    recorders.push(level_recursion_recorder(config));
    Ok(finish(SuiteKind::Lumping, recorders))
}

/// The funnel walk projected to depth levels is still Markov; the exact
/// graph and the level chain must produce the same hitting law.
fn lumping_recorder(l: usize, b: usize) -> Result<Recorder, SuiteError> {
    let name = format!("funnel({l},{b})");
    let mut rec = Recorder::new(&name);
    let detail = format!("L={l} B={b}");
    let g = funnel(l, b).map_err(|e| fail(&name, &e))?;
    let srw = srw_chain(&g);
    let y = g.vertex_count() - 1;
    let level = funnel_level_chain(l, b).map_err(|e| fail(&name, &e))?;
    let dg = hitting_distribution(&srw, 0, y, 1e-12).map_err(|e| fail(&name, &e))?;
    let dl = hitting_distribution(&level, 0, l + 1, 1e-12).map_err(|e| fail(&name, &e))?;
    let longest = dg.probs.len().max(dl.probs.len());
    let mut worst = 0.0f64;
    let mut worst_t = 0usize;
    for t in 0..longest {
        let pg = dg.probs.get(t).copied().unwrap_or(0.0);
        let pl = dl.probs.get(t).copied().unwrap_or(0.0);
        if (pg - pl).abs() > worst {
            worst = (pg - pl).abs();
            worst_t = t;
        }
    }
    rec.residual(
        "lumping-distribution",
        worst,
        LUMPING_ENTRY_TOL,
        format!("{detail} t={worst_t}"),
    );

    let fm = funnel_tau_moments(l, b as u64).map_err(|e| fail(&name, &e))?;
    let sys = AbsorbingSystem::new(&srw, &[(y, 0.0)]);
    let (h, moments) = moments_with(&sys, y).map_err(|e| fail(&name, &e))?;
    rec.residual("lumping-mean", rel_gap(h.values[0], fm.mean), REL_TOL, detail.clone());
    rec.residual(
        "lumping-variance",
        rel_gap(moments.variance[0], fm.variance),
        REL_TOL,
        detail.clone(),
    );
    let shortcut = dg.probs.get(l + 1).copied().unwrap_or(0.0);
    rec.residual(
        "shortcut-probability",
        (shortcut - fm.shortest_path_probability).abs(),
        SHORTCUT_TOL,
        detail,
    );
    Ok(rec)
}

/// Closed-form caps on the level-crossing recursion over a wide grid.
fn level_recursion_recorder(config: &SuiteConfig) -> Recorder {
    let mut rec = Recorder::new("level_recursion");
    for l in 2usize..=50 {
        for b in [2u64, 3, 10, 100] {
            let lm = level_moments(l, b).expect("grid parameters are valid");
            let detail = format!("L={l} B={b}");
            let per_level_cap = 48.0 / b as f64;
            let mean_slack =
                lm.crossing_mean.iter().map(|m| 3.0 - m).fold(f64::INFINITY, f64::min);
            let var_slack = lm
                .crossing_variance
                .iter()
                .map(|v| per_level_cap - v)
                .fold(f64::INFINITY, f64::min);
            rec.slack("crossing-mean-cap", mean_slack, config.slack_floor, detail.clone());
            rec.slack("crossing-variance-cap", var_slack, config.slack_floor, detail.clone());
            rec.slack(
                "climb-mean-cap",
                3.0 * l as f64 - lm.climb_mean,
                config.slack_floor,
                detail.clone(),
            );
            rec.slack(
                "climb-variance-cap",
                48.0 * l as f64 / b as f64 - lm.climb_variance,
                config.slack_floor,
                detail.clone(),
            );
            rec.slack("retry-mean-cap", 3.0 - lm.retry_mean, config.slack_floor, detail.clone());
            rec.slack(
                "retry-variance-cap",
                per_level_cap - lm.retry_variance,
                config.slack_floor,
                detail,
            );
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SuiteConfig {
        SuiteConfig { max_n: 20, seed: 7, lumping_cap: 300, ..SuiteConfig::default() }
    }

    #[test]
    fn identities_pass_on_a_small_corpus() {
        let outcome = run_suite(SuiteKind::Identities, &small_config()).unwrap();
        assert!(outcome.passed(), "failures:\n{}", outcome.to_tsv());
        assert!(outcome.checks > 1000);
        let checks: Vec<&str> = outcome.rows.iter().map(|r| r.check.as_str()).collect();
        for expected in [
            "mean-identity",
            "variance-identity",
            "occupation-sum",
            "onestep",
            "divergence",
            "summation-by-parts",
            "variance-routes",
            "entropy-state",
            "entropy-degree",
            "entropy-escape",
            "layer-bridge",
            "resistance-distance",
            "escape-identity",
            "escape-product",
            "solver-equivalence",
            "tree-geodesic",
        ] {
            assert!(checks.contains(&expected), "missing row {expected}");
        }
    }

    #[test]
    fn bounds_pass_on_a_small_corpus() {
        let outcome = run_suite(SuiteKind::Bounds, &small_config()).unwrap();
        assert!(outcome.passed(), "failures:\n{}", outcome.to_tsv());
        let checks: Vec<&str> = outcome.rows.iter().map(|r| r.check.as_str()).collect();
        for expected in [
            "bound-log-states",
            "bound-log-degree-distance",
            "bound-bounded-degree",
            "bound-mean-over-degree",
            "bound-tree-double-mean",
            "bound-tree-log-distance",
            "bound-escape-resistance",
            "two-step-floor",
            "mean-floor",
            "final-increment",
            "determinism",
        ] {
            assert!(checks.contains(&expected), "missing row {expected}");
        }
    }

    #[test]
    fn corrupted_slack_floor_fails_the_bounds_suite() {
        let config = SuiteConfig { slack_floor: 1.0, ..small_config() };
        let outcome = run_suite(SuiteKind::Bounds, &config).unwrap();
        assert!(!outcome.passed());
        assert!(outcome.failures > 0);
    }

    #[test]
    fn lumping_passes_on_small_funnels() {
        let outcome = run_suite(SuiteKind::Lumping, &small_config()).unwrap();
        assert!(outcome.passed(), "failures:\n{}", outcome.to_tsv());
        let checks: Vec<&str> = outcome.rows.iter().map(|r| r.check.as_str()).collect();
        for expected in [
            "lumping-distribution",
            "lumping-mean",
            "lumping-variance",
            "shortcut-probability",
            "climb-mean-cap",
            "retry-variance-cap",
        ] {
            assert!(checks.contains(&expected), "missing row {expected}");
        }
    }

    #[test]
    fn all_suite_concatenates_counters() {
        let config = small_config();
        let all = run_suite(SuiteKind::All, &config).unwrap();
        let sum: u64 = [SuiteKind::Identities, SuiteKind::Bounds, SuiteKind::Lumping]
            .iter()
            .map(|&k| run_suite(k, &config).unwrap().checks)
            .sum();
        assert_eq!(all.checks, sum);
        assert!(all.passed());
    }

    #[test]
    fn tsv_report_is_tabular() {
        let outcome = run_suite(SuiteKind::Lumping, &small_config()).unwrap();
        let tsv = outcome.to_tsv();
        assert!(tsv.starts_with("# suite=lumping"));
        let mut lines = tsv.lines().skip(1);
        assert_eq!(lines.next().unwrap(), "instance\tcheck\tvalue\tmargin\tholds\tdetail");
        assert!(lines.all(|l| l.split('\t').count() == 6));
    }

    #[test]
    fn funnel_grid_is_bounded_and_nonempty() {
        let grid = funnel_grid(5000);
        assert!(grid.contains(&(3, 2)));
        assert!(grid.contains(&(2, 70)));
        assert!(!grid.contains(&(2, 71)));
        assert!(grid.iter().all(|&(l, b)| funnel_vertex_count(l, b).unwrap() <= 5000));
        assert!(grid.len() > 90);
    }

    #[test]
    fn suite_json_carries_schema_and_verdict() {
        let outcome = run_suite(SuiteKind::Lumping, &small_config()).unwrap();
        let json = outcome_json(&outcome);
        assert_eq!(json["schema"], "hitstat/suite-v1");
        assert_eq!(json["passed"], true);
        assert_eq!(json["suite"], "lumping");
    }
}
