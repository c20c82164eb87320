//! Undirected simple graphs with a fixed vertex set `0..n`, the edge-list
//! text format, breadth-first distances, and the generator families used
//! throughout the crate.
//!
//! Every graph here is connected, loop-free, and duplicate-free; those
//! invariants are enforced at construction and parsing time, so downstream
//! code never re-validates them.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Validation and parsing failures for graph inputs. Line numbers are 1-based.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: expected two vertex ids separated by whitespace")]
    MalformedLine { line: usize },
    #[error("line {line}: self-loop")]
    SelfLoop { line: usize },
    #[error("line {line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("vertex {id} appears in no edge")]
    IsolatedVertexId { id: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("{family}: {detail}")]
    ParameterOutOfRange { family: &'static str, detail: String },
}

/// A connected simple undirected graph on vertices `0..vertex_count()`.
///
/// Adjacency lists are sorted ascending; the edge list is kept in ascending
/// lexicographic order with `u < v` per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an unordered list of undirected edges.
    ///
    /// The vertex set is `0..=max id`. Fails on self-loops, duplicate edges,
    /// ids that appear in no edge, and disconnected inputs. Error line
    /// numbers refer to 1-based positions in `edges`.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::Disconnected);
        }
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a == b {
                return Err(GraphError::SelfLoop { line: i + 1 });
            }
            canonical.push((a.min(b), a.max(b)));
        }
        let mut seen = canonical.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).position(|w| w[0] == w[1]) {
            let dup = seen[w + 1];
            let line = canonical
                .iter()
                .enumerate()
                .filter(|(_, &e)| e == dup)
                .nth(1)
                .map(|(i, _)| i + 1)
                .unwrap_or(0);
            return Err(GraphError::DuplicateEdge { line });
        }
        let n = 1 + canonical.iter().map(|&(_, v)| v).max().unwrap();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &canonical {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        if let Some(id) = adjacency.iter().position(|nbrs| nbrs.is_empty()) {
            return Err(GraphError::IsolatedVertexId { id });
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let mut edges = seen;
        edges.sort_unstable();
        let g = Graph { adjacency, edges };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbors of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    /// Maximum degree over all vertices.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges in ascending lexicographic order, `u < v` in each pair.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.adjacency.len()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Breadth-first distances from `src` to every vertex.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        assert!(src < self.vertex_count(), "vertex {src} out of range");
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph distance between two vertices.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        assert!(y < self.vertex_count(), "vertex {y} out of range");
        self.bfs_distances(x)[y]
    }

    /// A shortest path from `x` to `y`, inclusive of both endpoints.
    pub fn shortest_path(&self, x: usize, y: usize) -> Vec<usize> {
        let dist = self.bfs_distances(y);
        assert!(x < self.vertex_count(), "vertex {x} out of range");
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            let next = *self.adjacency[cur]
                .iter()
                .find(|&&v| dist[v] + 1 == dist[cur])
                .expect("connected graph has a descending neighbor");
            path.push(next);
            cur = next;
        }
        path
    }

    /// Relabels vertices by the permutation `perm` (new id of `u` is `perm[u]`).
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.vertex_count());
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(&edges).expect("relabeling preserves validity")
    }
}

/// Parses the edge-list text format: one `u v` pair per line, `#` starts a
/// comment, blank lines ignored.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let u = fields.next().and_then(|s| s.parse::<usize>().ok());
        let v = fields.next().and_then(|s| s.parse::<usize>().ok());
        match (u, v, fields.next()) {
            (Some(u), Some(v), None) => {
                edges.push((u, v));
                lines.push(line);
            }
            _ => return Err(GraphError::MalformedLine { line }),
        }
    }
    Graph::from_edges(&edges).map_err(|e| match e {
        GraphError::SelfLoop { line } => GraphError::SelfLoop { line: lines[line - 1] },
        GraphError::DuplicateEdge { line } => GraphError::DuplicateEdge { line: lines[line - 1] },
        other => other,
    })
}

/// Serializes to the edge-list format: ascending lexicographic order, one
/// edge per line, trailing newline.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

fn param_err(family: &'static str, detail: impl Into<String>) -> GraphError {
    GraphError::ParameterOutOfRange { family, detail: detail.into() }
}

/// Path with `len` edges on vertices `0..=len`, consecutive ids adjacent.
pub fn path(len: usize) -> Result<Graph, GraphError> {
    if len < 1 {
        return Err(param_err("path", "length must be >= 1"));
    }
    let edges: Vec<_> = (0..len).map(|i| (i, i + 1)).collect();
    Ok(Graph::from_edges(&edges).expect("path is valid"))
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(param_err("complete", "size must be >= 2"));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Ok(Graph::from_edges(&edges).expect("complete graph is valid"))
}

/// Star on `n` vertices: center `0`, leaves `1..n`.
pub fn star(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(param_err("star", "size must be >= 3"));
    }
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    Ok(Graph::from_edges(&edges).expect("star is valid"))
}

/// Complete `branching`-ary rooted tree of the given depth, breadth-first
/// labels with root `0`.
pub fn bary_tree(branching: usize, depth: usize) -> Result<Graph, GraphError> {
    if branching < 2 {
        return Err(param_err("bary_tree", "branching must be >= 2"));
    }
    if depth < 1 {
        return Err(param_err("bary_tree", "depth must be >= 1"));
    }
    let mut edges = Vec::new();
    let mut level: Vec<usize> = vec![0];
    let mut next_id = 1;
    for _ in 0..depth {
        let mut next_level = Vec::with_capacity(level.len() * branching);
        for &parent in &level {
            for _ in 0..branching {
                edges.push((parent, next_id));
                next_level.push(next_id);
                next_id += 1;
            }
        }
        level = next_level;
    }
    Ok(Graph::from_edges(&edges).expect("b-ary tree is valid"))
}

/// Funnel graph: a complete `branching`-ary tree of depth `levels` whose
/// depth-`levels` leaves are all joined to one extra vertex.
///
/// Labels: root `0` (the canonical start), breadth-first tree labels, the
/// extra vertex is the last id (the canonical target).
pub fn funnel(levels: usize, branching: usize) -> Result<Graph, GraphError> {
    if levels < 2 {
        return Err(param_err("funnel", "levels must be >= 2"));
    }
    if branching < 2 {
        return Err(param_err("funnel", "branching must be >= 2"));
    }
    let tree_size: usize = {
        let mut total: usize = 0;
        let mut pow: usize = 1;
        for _ in 0..=levels {
            total = total
                .checked_add(pow)
                .ok_or_else(|| param_err("funnel", "vertex count overflows"))?;
            pow = pow
                .checked_mul(branching)
                .ok_or_else(|| param_err("funnel", "vertex count overflows"))?;
        }
        total
    };
    let tree = bary_tree(branching, levels)?;
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    let y = tree_size;
    let first_leaf = tree_size - branching.pow(levels as u32);
    for leaf in first_leaf..tree_size {
        edges.push((leaf, y));
    }
    Ok(Graph::from_edges(&edges).expect("funnel is valid"))
}

/// Comb graph: spine `w_0..w_m` labeled `0..=m`, with the root of a complete
/// binary tree of depth `j` joined to `w_j` for each `j in 1..=m`. Tree
/// vertices are labeled breadth-first after the spine, teeth in spine order.
/// Max degree 3; acyclic.
pub fn comb(teeth: usize) -> Result<Graph, GraphError> {
    if teeth < 1 {
        return Err(param_err("comb", "teeth must be >= 1"));
    }
    if teeth > 56 {
        return Err(param_err("comb", "vertex count overflows"));
    }
    let mut edges = Vec::new();
    for j in 0..teeth {
        edges.push((j, j + 1));
    }
    let mut next_id = teeth + 1;
    for j in 1..=teeth {
        let root = next_id;
        edges.push((j, root));
        next_id += 1;
        let mut level = vec![root];
        for _ in 0..j {
            let mut next_level = Vec::with_capacity(level.len() * 2);
            for &parent in &level {
                for _ in 0..2 {
                    edges.push((parent, next_id));
                    next_level.push(next_id);
                    next_id += 1;
                }
            }
            level = next_level;
        }
    }
    Ok(Graph::from_edges(&edges).expect("comb is valid"))
}

/// Uniform random labeled tree on `n` vertices via a random Prufer sequence,
/// generated by a seeded ChaCha8 stream.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(param_err("random_tree", "size must be >= 2"));
    }
    if n == 2 {
        return Ok(Graph::from_edges(&[(0, 1)]).expect("edge is valid"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &p in &prufer {
        degree[p] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&u| degree[u] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &p in &prufer {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().expect("prufer decoding keeps a leaf");
        edges.push((leaf, p));
        degree[p] -= 1;
        if degree[p] == 1 {
            leaf_heap.push(std::cmp::Reverse(p));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().expect("two leaves remain");
    let std::cmp::Reverse(b) = leaf_heap.pop().expect("two leaves remain");
    edges.push((a, b));
    Ok(Graph::from_edges(&edges).expect("prufer decoding yields a tree"))
}

/// Erdos-Renyi graph conditioned on connectivity by rejection, seeded ChaCha8.
/// Each rejected draw continues the same stream; gives up after 10_000 draws.
pub fn random_connected(n: usize, edge_prob: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(param_err("random_connected", "size must be >= 2"));
    }
    if !(0.0..=1.0).contains(&edge_prob) || edge_prob <= 0.0 {
        return Err(param_err("random_connected", "edge_prob must be in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < edge_prob {
                    edges.push((u, v));
                }
            }
        }
        if let Ok(g) = Graph::from_edges(&edges) {
            return Ok(g);
        }
    }
    Err(param_err("random_connected", "rejection sampling failed to find a connected graph"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_has_expected_shape() {
        let g = path(2).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.distance(0, 2), 2);
        assert!(g.is_tree());
        let g1 = path(1).unwrap();
        assert_eq!((g1.vertex_count(), g1.edge_count()), (2, 1));
    }

    #[test]
    fn complete_and_star_shapes() {
        let k3 = complete(3).unwrap();
        assert_eq!(k3.edge_count(), 3);
        assert_eq!(k3.distance(0, 2), 1);
        let s4 = star(4).unwrap();
        assert_eq!(s4.vertex_count(), 4);
        assert_eq!(s4.degree(0), 3);
        assert!(s4.neighbors(1) == [0]);
        assert_eq!(s4.distance(1, 3), 2);
    }

    #[test]
    fn bary_tree_breadth_first_labels() {
        let t = bary_tree(2, 2).unwrap();
        assert_eq!(t.vertex_count(), 7);
        assert_eq!(t.neighbors(0), &[1, 2]);
        assert_eq!(t.neighbors(1), &[0, 3, 4]);
        assert!(t.is_tree());
    }

    #[test]
    fn funnel_3_2_matches_hand_counts() {
        let g = funnel(3, 2).unwrap();
        assert_eq!(g.vertex_count(), 16);
        let y = 15;
        assert_eq!(g.degree(y), 8, "target joins every depth-3 leaf");
        assert_eq!(g.degree(0), 2, "root sees only depth 1");
        for leaf in 7..15 {
            assert_eq!(g.degree(leaf), 2, "leaf {leaf} sees parent and target");
        }
        for internal in 1..7 {
            assert_eq!(g.degree(internal), 3);
        }
        assert_eq!(g.distance(0, y), 4);
    }

    #[test]
    fn comb_3_matches_hand_counts() {
        let g = comb(3).unwrap();
        assert_eq!(g.vertex_count(), 29);
        assert_eq!(g.max_degree(), 3);
        assert!(g.is_tree());
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(3), &[2, 14], "w_3 sees w_2 and its tooth root");
        assert_eq!(g.distance(3, 0), 3);
    }

    #[test]
    fn comb_vertex_count_formula() {
        for m in 1..=8 {
            let g = comb(m).unwrap();
            assert_eq!(g.vertex_count(), (1usize << (m + 2)) - 3, "comb({m})");
        }
    }

    #[test]
    fn random_families_are_deterministic_and_valid() {
        let t1 = random_tree(40, 7).unwrap();
        let t2 = random_tree(40, 7).unwrap();
        assert_eq!(t1, t2);
        assert!(t1.is_tree());
        assert_eq!(t1.vertex_count(), 40);
        let g1 = random_connected(30, 0.2, 11).unwrap();
        let g2 = random_connected(30, 0.2, 11).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.vertex_count(), 30);
        assert_ne!(random_tree(40, 8).unwrap(), t1, "different seed, different tree");
    }

    #[test]
    fn parse_rejects_bad_inputs_with_line_numbers() {
        assert_eq!(parse_graph("0 1\n1 x\n").unwrap_err(), GraphError::MalformedLine { line: 2 });
        assert_eq!(parse_graph("0 1\n\n2 2\n").unwrap_err(), GraphError::SelfLoop { line: 3 });
        assert_eq!(parse_graph("0 1\n1 0\n").unwrap_err(), GraphError::DuplicateEdge { line: 2 });
        assert_eq!(parse_graph("0 1\n# hi\n0 1\n").unwrap_err(), GraphError::DuplicateEdge { line: 3 });
        assert_eq!(parse_graph("0 1\n3 4\n").unwrap_err(), GraphError::IsolatedVertexId { id: 2 });
        assert_eq!(parse_graph("0 1\n2 3\n").unwrap_err(), GraphError::Disconnected);
        assert_eq!(parse_graph("").unwrap_err(), GraphError::Disconnected);
    }

    #[test]
    fn parse_accepts_comments_and_blank_lines() {
        let g = parse_graph("# path\n0 1\n\n1 2  # tail\n").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn serialize_then_parse_round_trips() {
        let g = funnel(3, 2).unwrap();
        let text = serialize_graph(&g);
        assert!(text.ends_with('\n'));
        let back = parse_graph(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn shortest_path_runs_along_geodesic() {
        let g = comb(3).unwrap();
        assert_eq!(g.shortest_path(3, 0), vec![3, 2, 1, 0]);
        let f = funnel(3, 2).unwrap();
        let p = f.shortest_path(0, 15);
        assert_eq!(p.len(), 5);
        assert_eq!((p[0], p[4]), (0, 15));
    }

    #[test]
    fn relabel_keeps_structure() {
        let g = path(3).unwrap();
        let perm = [2, 0, 3, 1];
        let h = g.relabel(&perm);
        assert_eq!(h.edge_count(), 3);
        assert_eq!(h.distance(2, 1), 3, "old ends 0,3 are now 2,1");
    }
}
