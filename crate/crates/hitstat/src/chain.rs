//! Finite irreducible reversible Markov chains with their stationary
//! distribution and edge conductances stored side by side.
//!
//! Reversibility is the load-bearing invariant: detailed balance
//! `pi(u) P(u,v) = pi(v) P(v,u) = c(u,v)` is validated at construction to
//! 1e-12 and everything downstream (occupation solves, voltages, flows)
//! leans on it. Conductances are canonical, `c = pi * P`, so rescaling an
//! input network changes nothing.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

/// Max tolerated row-sum error, detailed-balance residual, and stationary
/// normalization error at construction.
pub const CHAIN_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("line {line}: expected `u<TAB>v<TAB>weight`")]
    MalformedLine { line: usize },
    #[error("entry {index}: conductance must be positive and finite")]
    NonpositiveWeight { index: usize },
    #[error("duplicate pair ({u}, {v})")]
    DuplicatePair { u: usize, v: usize },
    #[error("conductance network is not connected")]
    DisconnectedNetwork,
    #[error("row {state} sums to {sum}, expected 1")]
    RowSumInvalid { state: usize, sum: f64 },
    #[error("invalid stationary distribution: {detail}")]
    InvalidStationary { detail: String },
    #[error("detailed balance violated: residual {residual}")]
    DetailedBalance { residual: f64 },
    #[error("chain is not irreducible")]
    NotIrreducible,
    #[error("{what}: {detail}")]
    ParameterOutOfRange { what: &'static str, detail: String },
    #[error("values exceed f64 range: {detail}")]
    NumericalRange { detail: String },
}

/// Positive edge weights on unordered state pairs, self-pairs allowed.
/// Entries are held in canonical order: `u <= v`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductanceTable {
    entries: Vec<(usize, usize, f64)>,
}

impl ConductanceTable {
    pub fn new(entries: &[(usize, usize, f64)]) -> Result<Self, ChainError> {
        if entries.is_empty() {
            return Err(ChainError::DisconnectedNetwork);
        }
        let mut canonical: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, &(a, b, w)) in entries.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(ChainError::NonpositiveWeight { index: i + 1 });
            }
            canonical.push((a.min(b), a.max(b), w));
        }
        canonical.sort_by_key(|&(u, v, _)| (u, v));
        for w in canonical.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(ChainError::DuplicatePair { u: w[0].0, v: w[0].1 });
            }
        }
        let n = 1 + canonical.iter().map(|&(_, v, _)| v).max().unwrap();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v, _) in &canonical {
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        if !connected(&adjacency) {
            return Err(ChainError::DisconnectedNetwork);
        }
        Ok(ConductanceTable { entries: canonical })
    }

    pub fn state_count(&self) -> usize {
        1 + self.entries.iter().map(|&(_, v, _)| v).max().unwrap()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }
}

fn connected(adjacency: &[Vec<usize>]) -> bool {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// An irreducible reversible chain on states `0..state_count()`.
///
/// `transitions[u]` holds the sparse row of `P` sorted by target state with
/// strictly positive entries; `stationary` is the (normalized, positive)
/// reversing distribution; `conductances` holds `c(u,v) = pi(u) P(u,v)` per
/// unordered pair in canonical `u <= v` ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversibleChain {
    transitions: Vec<Vec<(usize, f64)>>,
    stationary: Vec<f64>,
    conductances: Vec<(usize, usize, f64)>,
}

impl ReversibleChain {
    /// Assembles and validates a chain from explicit parts.
    pub fn from_parts(
        transitions: Vec<Vec<(usize, f64)>>,
        stationary: Vec<f64>,
        conductances: Vec<(usize, usize, f64)>,
    ) -> Result<Self, ChainError> {
        let n = transitions.len();
        if n == 0 || stationary.len() != n {
            return Err(ChainError::InvalidStationary { detail: "length mismatch".into() });
        }
        for (u, &p) in stationary.iter().enumerate() {
            if !(p > 0.0) || !p.is_finite() {
                return Err(ChainError::InvalidStationary { detail: format!("pi({u}) = {p}") });
            }
        }
        let total: f64 = stationary.iter().sum();
        if (total - 1.0).abs() > CHAIN_TOL {
            return Err(ChainError::InvalidStationary { detail: format!("sums to {total}") });
        }
        for (u, row) in transitions.iter().enumerate() {
            let mut sum = 0.0;
            let mut prev: Option<usize> = None;
            for &(v, p) in row {
                if v >= n || !(p > 0.0) || !p.is_finite() || prev.is_some_and(|w| w >= v) {
                    return Err(ChainError::RowSumInvalid { state: u, sum: f64::NAN });
                }
                prev = Some(v);
                sum += p;
            }
            if (sum - 1.0).abs() > CHAIN_TOL {
                return Err(ChainError::RowSumInvalid { state: u, sum });
            }
        }
        let chain = ReversibleChain { transitions, stationary, conductances };
        let balance = check_detailed_balance(&chain);
        if !(balance <= CHAIN_TOL) {
            return Err(ChainError::DetailedBalance { residual: balance });
        }
        let mut support = vec![Vec::new(); n];
        let mut pair_count = 0usize;
        for &(u, v, c) in &chain.conductances {
            if !(c > 0.0) || !c.is_finite() {
                return Err(ChainError::NonpositiveWeight { index: pair_count + 1 });
            }
            if u != v {
                support[u].push(v);
                support[v].push(u);
            }
            let reference = chain.stationary[u] * chain.prob(u, v);
            if (c - reference).abs() > CHAIN_TOL {
                return Err(ChainError::DetailedBalance { residual: (c - reference).abs() });
            }
            pair_count += 1;
        }
        let sparse: usize = chain
            .transitions
            .iter()
            .enumerate()
            .map(|(u, row)| row.iter().filter(|&&(v, _)| v >= u).count())
            .sum();
        if sparse != pair_count {
            return Err(ChainError::DetailedBalance { residual: f64::INFINITY });
        }
        if !connected(&support) {
            return Err(ChainError::NotIrreducible);
        }
        Ok(chain)
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    /// Sparse row of `P` from state `u`, sorted by target.
    pub fn transitions(&self, u: usize) -> &[(usize, f64)] {
        &self.transitions[u]
    }

    /// `P(u, v)`, zero when the transition is absent.
    pub fn prob(&self, u: usize, v: usize) -> f64 {
        match self.transitions[u].binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.transitions[u][i].1,
            Err(_) => 0.0,
        }
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Canonical conductances `c(u,v) = pi(u) P(u,v)`, `u <= v` ascending.
    pub fn conductances(&self) -> &[(usize, usize, f64)] {
        &self.conductances
    }

    /// Non-self support pairs `(u, v, c)` with `u < v`.
    pub fn support_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.conductances.iter().copied().filter(|&(u, v, _)| u != v)
    }

    /// Exit conductance of a state: `pi(y) (1 - P(y,y))`, the total
    /// conductance from `y` to the rest of the chain.
    pub fn exit_conductance(&self, y: usize) -> f64 {
        self.stationary[y] * (1.0 - self.prob(y, y))
    }

    /// When the chain is exactly the simple random walk on some graph
    /// (no self-loops, uniform rows), returns the vertex degrees.
    pub fn srw_degrees(&self) -> Option<Vec<usize>> {
        let mut degrees = Vec::with_capacity(self.state_count());
        for (u, row) in self.transitions.iter().enumerate() {
            let k = row.len();
            if k == 0 || row.iter().any(|&(v, _)| v == u) {
                return None;
            }
            let uniform = 1.0 / k as f64;
            if row.iter().any(|&(_, p)| (p - uniform).abs() > 1e-15) {
                return None;
            }
            degrees.push(k);
        }
        Some(degrees)
    }
}

/// Max detailed-balance residual `|pi(u)P(u,v) - pi(v)P(v,u)|` over all
/// ordered transitions.
pub fn check_detailed_balance(chain: &ReversibleChain) -> f64 {
    let mut worst = 0.0f64;
    for (u, row) in chain.transitions.iter().enumerate() {
        for &(v, p) in row {
            let forward = chain.stationary[u] * p;
            let backward = chain.stationary[v] * chain.prob(v, u);
            worst = worst.max((forward - backward).abs());
        }
    }
    worst
}

/// The simple random walk on a graph: `P(u,v) = 1/deg(u)` on edges,
/// `pi = deg / 2|E|`, `c = 1/(2|E|)` on every edge.
pub fn srw_chain(g: &Graph) -> ReversibleChain {
    let n = g.vertex_count();
    let two_m = 2.0 * g.edge_count() as f64;
    let mut transitions = Vec::with_capacity(n);
    let mut stationary = Vec::with_capacity(n);
    for u in 0..n {
        let deg = g.degree(u);
        let p = 1.0 / deg as f64;
        transitions.push(g.neighbors(u).iter().map(|&v| (v, p)).collect());
        stationary.push(deg as f64 / two_m);
    }
    let c = 1.0 / two_m;
    let conductances = g.edges().iter().map(|&(u, v)| (u, v, c)).collect();
    ReversibleChain::from_parts(transitions, stationary, conductances)
        .expect("simple random walk satisfies detailed balance")
}

/// The chain of a conductance network: `P(u,v) = c(u,v)/c(u)` with
/// `c(u) = sum_v c(u,v)` (self-entry counted once), `pi(u) = c(u)/C`.
/// The stored conductances are rescaled to canonical `c = pi * P`.
pub fn chain_from_conductances(table: &ConductanceTable) -> Result<ReversibleChain, ChainError> {
    let n = table.state_count();
    let mut weight = vec![0.0f64; n];
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(u, v, w) in table.entries() {
        weight[u] += w;
        rows[u].push((v, w));
        if u != v {
            weight[v] += w;
            rows[v].push((u, w));
        }
    }
    let total: f64 = weight.iter().sum();
    if !total.is_finite() {
        return Err(ChainError::NumericalRange { detail: "total conductance overflows".into() });
    }
    let mut transitions = Vec::with_capacity(n);
    let mut stationary = Vec::with_capacity(n);
    for u in 0..n {
        rows[u].sort_by_key(|&(v, _)| v);
        transitions.push(rows[u].iter().map(|&(v, w)| (v, w / weight[u])).collect());
        stationary.push(weight[u] / total);
    }
    let conductances = table
        .entries()
        .iter()
        .map(|&(u, v, w)| (u, v, w / total))
        .collect();
    ReversibleChain::from_parts(transitions, stationary, conductances)
}

/// Birth-death chain tracking the depth of the walk on a funnel graph.
///
/// States `0..=levels+1`; from `0` the walk moves to `1` with probability 1;
/// from `1 <= i <= levels-1` it moves down with probability `B/(B+1)` and up
/// with `1/(B+1)`; from `levels` it moves to either neighbor with
/// probability 1/2; `levels+1` returns to `levels` with probability 1.
pub fn funnel_level_chain(levels: usize, branching: usize) -> Result<ReversibleChain, ChainError> {
    if levels < 2 {
        return Err(ChainError::ParameterOutOfRange {
            what: "funnel_level_chain",
            detail: "levels must be >= 2".into(),
        });
    }
    if branching < 2 {
        return Err(ChainError::ParameterOutOfRange {
            what: "funnel_level_chain",
            detail: "branching must be >= 2".into(),
        });
    }
    let b = branching as f64;
    let levels_u = levels;
    let mut weights: Vec<(usize, usize, f64)> = Vec::with_capacity(levels_u + 1);
    let mut c = 1.0f64;
    for i in 0..levels_u {
        weights.push((i, i + 1, c));
        if i + 1 < levels_u {
            c *= b;
        }
    }
    weights.push((levels_u, levels_u + 1, c));
    if !c.is_finite() {
        return Err(ChainError::NumericalRange {
            detail: format!("branching^{} exceeds f64", levels_u - 1),
        });
    }
    let table = ConductanceTable::new(&weights)?;
    chain_from_conductances(&table)
}

/// Parses the conductance TSV format: `u<TAB>v<TAB>weight` per line,
/// `#` comments and blank lines ignored.
pub fn parse_conductances(text: &str) -> Result<ConductanceTable, ChainError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let u = fields.next().and_then(|s| s.parse::<usize>().ok());
        let v = fields.next().and_then(|s| s.parse::<usize>().ok());
        let w = fields.next().and_then(|s| s.parse::<f64>().ok());
        match (u, v, w, fields.next()) {
            (Some(u), Some(v), Some(w), None) => entries.push((u, v, w)),
            _ => return Err(ChainError::MalformedLine { line }),
        }
    }
    ConductanceTable::new(&entries)
}

/// Serializes a chain's canonical conductances as TSV, `u <= v` ascending,
/// trailing newline.
pub fn serialize_conductances(chain: &ReversibleChain) -> String {
    let mut out = String::new();
    for &(u, v, c) in chain.conductances() {
        writeln!(out, "{u}\t{v}\t{c}").unwrap();
    }
    out
}
