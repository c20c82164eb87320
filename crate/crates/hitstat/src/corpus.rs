//! Deterministic verification corpus: every generated family swept over a
//! parameter grid, plus seeded random graphs and random weighted chains.
//!
//! Instance names are stable across runs and releases; reports key on them.
//! All randomness derives from the single corpus seed, so two builds of the
//! same corpus are identical edge for edge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{chain_from_conductances, srw_chain, ConductanceTable, ReversibleChain};
use crate::graph::{
    bary_tree, comb, complete, funnel, path, random_connected, random_tree, star, Graph,
};

/// Random connected graphs per corpus.
const RANDOM_GRAPHS: usize = 100;

/// Random weighted chains per corpus.
const RANDOM_CHAINS: usize = 50;

/// Pairs per instance when the state space is too large to exhaust.
const SAMPLED_PAIRS: usize = 8;

/// Exhaust all ordered (x, y) pairs up to this many states.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 30;

/// One named corpus member. Graph-derived instances keep the graph so
/// degree- and distance-based checks apply; weighted chains carry only
/// the chain.
#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub name: String,
    pub graph: Option<Graph>,
    pub chain: ReversibleChain,
}

impl CorpusInstance {
    fn from_graph(name: String, graph: Graph) -> Self {
        let chain = srw_chain(&graph);
        CorpusInstance {
            name,
            graph: Some(graph),
            chain,
        }
    }
}

/// All generated families with at most `max_n` states, plus seeded random
/// connected graphs on 5..=min(200, max_n) vertices.
pub fn graph_corpus(max_n: usize, seed: u64) -> Vec<CorpusInstance> {
    let mut out = Vec::new();
    let mut push = |name: String, g: Graph| {
        if g.vertex_count() <= max_n {
            out.push(CorpusInstance::from_graph(name, g));
        }
    };

    for len in [1usize, 2, 3, 5, 10, 50, 100, 499] {
        if len + 1 <= max_n {
            push(format!("path({len})"), path(len).unwrap());
        }
    }
    for n in [2usize, 3, 4, 5, 10, 30, 100, 500] {
        if n <= max_n {
            push(format!("complete({n})"), complete(n).unwrap());
        }
    }
    for n in [3usize, 4, 5, 10, 100, 500] {
        if n <= max_n {
            push(format!("star({n})"), star(n).unwrap());
        }
    }
    for (b, d) in [(2usize, 7usize), (3, 5), (4, 4), (5, 3), (10, 2)] {
        push(format!("bary_tree({b},{d})"), bary_tree(b, d).unwrap());
    }
    let funnel_grid = [
        (2usize, 2usize),
        (3, 2),
        (4, 2),
        (5, 2),
        (6, 2),
        (7, 2),
        (2, 3),
        (3, 3),
        (4, 3),
        (5, 3),
        (2, 4),
        (3, 4),
        (4, 4),
        (2, 5),
        (3, 5),
        (2, 10),
        (2, 20),
    ];
    for (l, b) in funnel_grid {
        push(format!("funnel({l},{b})"), funnel(l, b).unwrap());
    }
    for m in 1usize..=6 {
        push(format!("comb({m})"), comb(m).unwrap());
    }
    for n in [2usize, 5, 17, 60, 200, 500] {
        if n <= max_n {
            let s = seed.wrapping_mul(1000).wrapping_add(n as u64);
            push(format!("random_tree({n})"), random_tree(n, s).unwrap());
        }
    }

    let cap = max_n.min(200);
    if cap >= 5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..RANDOM_GRAPHS {
            let n = rng.gen_range(5..=cap);
            let c = rng.gen_range(1.2..3.0);
            let p = (c * (n as f64).ln() / n as f64).min(1.0);
            let s = rng.gen::<u64>();
            push(
                format!("random_connected({n},{i})"),
                random_connected(n, p, s).unwrap(),
            );
        }
    }
    out
}

/// Seeded random reversible chains built from conductance tables: a random
/// tree skeleton keeps the network connected, extra edges and self-loops
/// exercise cycles and holding probabilities.
pub fn chain_corpus(seed: u64) -> Vec<CorpusInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::with_capacity(RANDOM_CHAINS);
    for i in 0..RANDOM_CHAINS {
        let n = rng.gen_range(3usize..=100);
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            seen.insert((u, v));
            entries.push((u, v, rng.gen_range(0.5..2.0)));
        }
        for _ in 0..n / 2 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                entries.push((key.0, key.1, rng.gen_range(0.5..2.0)));
            }
        }
        for u in 0..n {
            if rng.gen_bool(0.3) {
                entries.push((u, u, rng.gen_range(0.5..2.0)));
            }
        }
        let table = ConductanceTable::new(&entries).unwrap();
        let chain = chain_from_conductances(&table).unwrap();
        out.push(CorpusInstance {
            name: format!("random_chain({n},{i})"),
            graph: None,
            chain,
        });
    }
    out
}

/// Ordered (x, y) pairs to check on an instance with `n` states: every pair
/// when `n` is small, otherwise the two extreme pairs plus seeded draws.
pub fn pairs_for(n: usize, seed: u64) -> Vec<(usize, usize)> {
    if n <= EXHAUSTIVE_PAIR_LIMIT {
        let mut pairs = Vec::with_capacity(n * (n - 1));
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    pairs.push((x, y));
                }
            }
        }
        return pairs;
    }
    let mut pairs = vec![(0, n - 1), (n - 1, 0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
    while pairs.len() < 2 + SAMPLED_PAIRS {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        if x != y && !pairs.contains(&(x, y)) {
            pairs.push((x, y));
        }
    }
    pairs
}
