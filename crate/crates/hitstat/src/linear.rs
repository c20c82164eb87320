//! Exact solvers for absorbing linear systems over a reversible chain, and
//! the hitting-time quantities built on them: means, second moments,
//! occupation measures, absorption probabilities, and exact distributions.
//!
//! Every system solved here has the form `f(u) = rhs(u) + sum_v P(u,v) f(v)`
//! away from a set of boundary states whose values are pinned. The solver is
//! chosen by structure, most exact method first: birth-death chains get a
//! tridiagonal substitution, trees get leaf elimination, anything else up to
//! 2000 states gets dense elimination with partial pivoting, and larger
//! systems fall back to a damped Gauss-Seidel sweep iterated to a relative
//! residual of 1e-12.

use thiserror::Error;

use crate::chain::ReversibleChain;

/// Relative residual target: solves stop (or are accepted) when the max
/// equation residual is at most `SOLVER_TOL * max(1, ||f||_inf)`.
pub const SOLVER_TOL: f64 = 1e-12;

/// Largest state count handled by dense elimination.
pub const DENSE_LIMIT: usize = 2000;

/// Step budget for distribution iteration before giving up.
pub const DISTRIBUTION_STEP_CAP: usize = 20_000_000;

const MAX_SWEEPS: usize = 500_000;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("iterative solver stalled at residual {residual} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },
    #[error("distribution cutoff exceeded: surviving mass {surviving} after {steps} steps")]
    CutoffExceeded { surviving: f64, steps: usize },
}

/// How a boundary system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BirthDeath,
    Tree,
    Dense,
    Iterative,
}

/// A vector of per-state results from one absorbing solve, with the achieved
/// max equation residual.
#[derive(Debug, Clone)]
pub struct PerStateValues {
    pub values: Vec<f64>,
    pub target: usize,
    pub residual: f64,
}

/// The system `f = rhs + P f` off a pinned boundary, factored once so that
/// several right-hand sides can be solved against the same target set.
pub struct AbsorbingSystem<'a> {
    chain: &'a ReversibleChain,
    boundary: Vec<(usize, f64)>,
    is_boundary: Vec<bool>,
    strategy: Strategy,
    dense: Option<DenseLu>,
    tree: Option<TreeOrder>,
}

impl<'a> AbsorbingSystem<'a> {
    /// Auto-selects the solve strategy: birth-death, then forest elimination
    /// when every support cycle passes through the boundary, then dense
    /// (≤ 2000 states), then iterative.
    pub fn new(chain: &'a ReversibleChain, boundary: &[(usize, f64)]) -> Self {
        let mut is_boundary = vec![false; chain.state_count()];
        for &(s, _) in boundary {
            assert!(s < chain.state_count(), "boundary state {s} out of range");
            is_boundary[s] = true;
        }
        let strategy = if is_birth_death(chain) {
            Strategy::BirthDeath
        } else if forest_off_boundary(chain, &is_boundary) {
            Strategy::Tree
        } else if chain.state_count() <= DENSE_LIMIT {
            Strategy::Dense
        } else {
            Strategy::Iterative
        };
        Self::with_strategy(chain, boundary, strategy)
    }

    /// Forces a strategy; used to cross-check solver agreement.
    pub fn with_strategy(
        chain: &'a ReversibleChain,
        boundary: &[(usize, f64)],
        strategy: Strategy,
    ) -> Self {
        let n = chain.state_count();
        assert!(!boundary.is_empty(), "at least one boundary state required");
        let mut is_boundary = vec![false; n];
        for &(s, _) in boundary {
            assert!(s < n, "boundary state {s} out of range");
            is_boundary[s] = true;
        }
        let mut sys = AbsorbingSystem {
            chain,
            boundary: boundary.to_vec(),
            is_boundary,
            strategy,
            dense: None,
            tree: None,
        };
        match strategy {
            Strategy::Dense => sys.dense = Some(DenseLu::factor(&sys)),
            Strategy::Tree => sys.tree = Some(TreeOrder::build(chain, &sys.is_boundary)),
            _ => {}
        }
        sys
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Solves for one right-hand side. `rhs` entries at boundary states are
    /// ignored. The returned residual is the max of
    /// `|f(u) - rhs(u) - sum_v P(u,v) f(v)|` over non-boundary states.
    pub fn solve(&self, rhs: &[f64]) -> Result<(Vec<f64>, f64), SolveError> {
        let n = self.chain.state_count();
        assert_eq!(rhs.len(), n, "rhs length must match state count");
        let mut f = vec![0.0; n];
        for &(s, value) in &self.boundary {
            f[s] = value;
        }
        match self.strategy {
            Strategy::BirthDeath => self.solve_birth_death(rhs, &mut f),
            Strategy::Tree => self.tree.as_ref().unwrap().solve(self, rhs, &mut f),
            Strategy::Dense => self.dense.as_ref().unwrap().solve(self, rhs, &mut f),
            Strategy::Iterative => self.solve_gauss_seidel(rhs, &mut f)?,
        }
        let residual = self.residual(rhs, &f);
        Ok((f, residual))
    }

    fn residual(&self, rhs: &[f64], f: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for u in 0..self.chain.state_count() {
            if self.is_boundary[u] {
                continue;
            }
            let mut acc = f[u] - rhs[u];
            for &(v, p) in self.chain.transitions(u) {
                acc -= p * f[v];
            }
            worst = worst.max(acc.abs());
        }
        worst
    }

    fn solve_birth_death(&self, rhs: &[f64], f: &mut [f64]) {
        let n = self.chain.state_count();
        let mut l = 0;
        while l < n {
            if self.is_boundary[l] {
                l += 1;
                continue;
            }
            let mut r = l;
            while r + 1 < n && !self.is_boundary[r + 1] {
                r += 1;
            }
            self.solve_tridiagonal_run(l, r, rhs, f);
            l = r + 1;
        }
    }

    fn solve_tridiagonal_run(&self, l: usize, r: usize, rhs: &[f64], f: &mut [f64]) {
        let n = self.chain.state_count();
        let len = r - l + 1;
        let mut diag = vec![0.0; len];
        let mut sup = vec![0.0; len];
        let mut sub = vec![0.0; len];
        let mut b = vec![0.0; len];
        for (i, u) in (l..=r).enumerate() {
            diag[i] = 1.0 - self.chain.prob(u, u);
            b[i] = rhs[u];
            if u > 0 {
                let p = self.chain.prob(u, u - 1);
                if u == l {
                    b[i] += p * f[u - 1];
                } else {
                    sub[i] = -p;
                }
            }
            if u + 1 < n {
                let p = self.chain.prob(u, u + 1);
                if u == r {
                    b[i] += p * f[u + 1];
                } else {
                    sup[i] = -p;
                }
            }
        }
        for i in 1..len {
            let m = sub[i] / diag[i - 1];
            diag[i] -= m * sup[i - 1];
            b[i] -= m * b[i - 1];
        }
        f[r] = b[len - 1] / diag[len - 1];
        for i in (0..len - 1).rev() {
            f[l + i] = (b[i] - sup[i] * f[l + i + 1]) / diag[i];
        }
    }

    fn solve_gauss_seidel(&self, rhs: &[f64], f: &mut [f64]) -> Result<(), SolveError> {
        let omega = 1.0;
        let mut last_residual = f64::INFINITY;
        for sweep in 1..=MAX_SWEEPS {
            for u in 0..self.chain.state_count() {
                if self.is_boundary[u] {
                    continue;
                }
                let mut acc = rhs[u];
                let mut diag = 1.0;
                for &(v, p) in self.chain.transitions(u) {
                    if v == u {
                        diag -= p;
                    } else {
                        acc += p * f[v];
                    }
                }
                f[u] += omega * (acc / diag - f[u]);
            }
            let scale = f.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
            last_residual = self.residual(rhs, f);
            if last_residual <= SOLVER_TOL * scale {
                return Ok(());
            }
            if sweep == MAX_SWEEPS {
                return Err(SolveError::NonConvergence { residual: last_residual, sweeps: sweep });
            }
        }
        Err(SolveError::NonConvergence { residual: last_residual, sweeps: MAX_SWEEPS })
    }
}

fn is_birth_death(chain: &ReversibleChain) -> bool {
    (0..chain.state_count()).all(|u| {
        chain
            .transitions(u)
            .iter()
            .all(|&(v, _)| v.abs_diff(u) <= 1)
    })
}

/// True when the support edges between non-boundary states form a forest,
/// i.e. every cycle of the chain passes through the boundary. Such systems
/// eliminate exactly by leaf folding.
fn forest_off_boundary(chain: &ReversibleChain, is_boundary: &[bool]) -> bool {
    let mut edges = 0usize;
    for (u, v, _) in chain.support_edges() {
        if !is_boundary[u] && !is_boundary[v] {
            edges += 1;
        }
    }
    let states = is_boundary.iter().filter(|&&b| !b).count();
    edges + count_components(chain, is_boundary) == states
}

fn count_components(chain: &ReversibleChain, is_boundary: &[bool]) -> usize {
    let n = chain.state_count();
    let mut seen = vec![false; n];
    let mut components = 0usize;
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if is_boundary[root] || seen[root] {
            continue;
        }
        components += 1;
        seen[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in chain.transitions(u) {
                if v != u && !is_boundary[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    components
}

/// Leaf-elimination order over the non-boundary states when their induced
/// support is a forest: BFS parents precede children within each component,
/// boundary neighbors fold into the constant term, and each component root
/// solves directly.
struct TreeOrder {
    order: Vec<usize>,
    parent: Vec<usize>,
}

impl TreeOrder {
    fn build(chain: &ReversibleChain, is_boundary: &[bool]) -> Self {
        let n = chain.state_count();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::new();
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for root in 0..n {
            if is_boundary[root] || seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for &(v, _) in chain.transitions(u) {
                    if v != u && !is_boundary[v] && !seen[v] {
                        seen[v] = true;
                        parent[v] = u;
                        queue.push_back(v);
                    }
                }
            }
        }
        TreeOrder { order, parent }
    }

    fn solve(&self, sys: &AbsorbingSystem, rhs: &[f64], f: &mut [f64]) {
        let chain = sys.chain;
        let n = chain.state_count();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut acc_a = vec![0.0; n];
        let mut acc_b = vec![0.0; n];
        for &u in self.order.iter().rev() {
            let mut d = 1.0 - acc_b[u];
            let mut num = rhs[u] + acc_a[u];
            for &(v, p) in chain.transitions(u) {
                if v == u {
                    d -= p;
                } else if sys.is_boundary[v] {
                    num += p * f[v];
                }
            }
            let p = self.parent[u];
            if p == usize::MAX {
                f[u] = num / d;
            } else {
                a[u] = num / d;
                b[u] = chain.prob(u, p) / d;
                let coupling = chain.prob(p, u);
                acc_a[p] += coupling * a[u];
                acc_b[p] += coupling * b[u];
            }
        }
        for &u in &self.order {
            let p = self.parent[u];
            if p != usize::MAX {
                f[u] = a[u] + b[u] * f[p];
            }
        }
    }
}

/// Dense `I - Q` with boundary rows pinned to the identity, factored by
/// Gaussian elimination with partial pivoting.
struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    pivot: Vec<usize>,
}

impl DenseLu {
    fn factor(sys: &AbsorbingSystem) -> Self {
        let chain = sys.chain;
        let n = chain.state_count();
        let mut a = vec![0.0f64; n * n];
        for u in 0..n {
            a[u * n + u] = 1.0;
            if sys.is_boundary[u] {
                continue;
            }
            for &(v, p) in chain.transitions(u) {
                a[u * n + v] -= p;
            }
        }
        let mut pivot = Vec::with_capacity(n);
        for k in 0..n {
            let mut best = k;
            let mut best_val = a[k * n + k].abs();
            for i in k + 1..n {
                let val = a[i * n + k].abs();
                if val > best_val {
                    best = i;
                    best_val = val;
                }
            }
            assert!(best_val > 0.0, "absorbing system is nonsingular");
            pivot.push(best);
            if best != k {
                for j in 0..n {
                    a.swap(k * n + j, best * n + j);
                }
            }
            let pivot_val = a[k * n + k];
            for i in k + 1..n {
                let m = a[i * n + k] / pivot_val;
                if m == 0.0 {
                    continue;
                }
                a[i * n + k] = m;
                for j in k + 1..n {
                    a[i * n + j] -= m * a[k * n + j];
                }
            }
        }
        DenseLu { n, lu: a, pivot }
    }

    fn solve(&self, sys: &AbsorbingSystem, rhs: &[f64], f: &mut [f64]) {
        let n = self.n;
        let mut b: Vec<f64> = (0..n)
            .map(|u| if sys.is_boundary[u] { f[u] } else { rhs[u] })
            .collect();
        for k in 0..n {
            b.swap(k, self.pivot[k]);
        }
        for k in 0..n {
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..n {
                    b[i] -= self.lu[i * n + k] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * b[j];
            }
            b[i] = acc / self.lu[i * n + i];
        }
        f.copy_from_slice(&b);
    }
}

/// Solves `f(y) = 0`, `f(u) = rhs(u) + sum_v P(u,v) f(v)` elsewhere.
pub fn solve_absorbing(
    chain: &ReversibleChain,
    y: usize,
    rhs: &[f64],
) -> Result<PerStateValues, SolveError> {
    let sys = AbsorbingSystem::new(chain, &[(y, 0.0)]);
    let (values, residual) = sys.solve(rhs)?;
    Ok(PerStateValues { values, target: y, residual })
}

/// Mean hitting times `h(u) = E_u[tau_y]` for every start.
pub fn hitting_mean(chain: &ReversibleChain, y: usize) -> Result<PerStateValues, SolveError> {
    let rhs = vec![1.0; chain.state_count()];
    solve_absorbing(chain, y, &rhs)
}

/// Second moments `s(u) = E_u[tau_y^2]` and the variances `s - h^2`.
#[derive(Debug, Clone)]
pub struct SecondMoments {
    pub second: PerStateValues,
    pub variance: Vec<f64>,
}

pub fn hitting_second_moment(
    chain: &ReversibleChain,
    y: usize,
) -> Result<SecondMoments, SolveError> {
    let sys = AbsorbingSystem::new(chain, &[(y, 0.0)]);
    Ok(moments_with(&sys, y)?.1)
}

/// One shared factorization for the mean and second-moment solves.
pub(crate) fn moments_with(
    sys: &AbsorbingSystem,
    y: usize,
) -> Result<(PerStateValues, SecondMoments), SolveError> {
    let chain = sys.chain;
    let n = chain.state_count();
    let ones = vec![1.0; n];
    let (h, h_res) = sys.solve(&ones)?;
    let mut rhs = vec![0.0; n];
    for u in 0..n {
        if u == y {
            continue;
        }
        let mut ph = 0.0;
        for &(v, p) in chain.transitions(u) {
            ph += p * h[v];
        }
        rhs[u] = 1.0 + 2.0 * ph;
    }
    let (s, s_res) = sys.solve(&rhs)?;
    let variance: Vec<f64> = (0..n).map(|u| s[u] - h[u] * h[u]).collect();
    Ok((
        PerStateValues { values: h, target: y, residual: h_res },
        SecondMoments {
            second: PerStateValues { values: s, target: y, residual: s_res },
            variance,
        },
    ))
}

/// Occupation measure `mu(u) = E_x #\{0 <= t < tau_y : X_t = u\}` together
/// with the chain-layer voltage `w = mu / pi` it is computed from.
///
/// The transposed absorbing system with unit source at `x` is conjugated
/// through detailed balance into the forward system with `rhs = e_x/pi(x)`,
/// so the structural solvers apply unchanged; the reported residual is
/// nevertheless measured on the genuine transposed equations.
pub(crate) fn occupation_parts(
    sys: &AbsorbingSystem,
    x: usize,
    y: usize,
) -> Result<(PerStateValues, Vec<f64>), SolveError> {
    let chain = sys.chain;
    let n = chain.state_count();
    assert!(x != y, "occupation requires distinct source and target");
    let pi = chain.stationary();
    let mut rhs = vec![0.0; n];
    rhs[x] = 1.0 / pi[x];
    let (w, _) = sys.solve(&rhs)?;
    let mu: Vec<f64> = (0..n).map(|u| pi[u] * w[u]).collect();
    let mut inflow = vec![0.0; n];
    for v in 0..n {
        if v == y || mu[v] == 0.0 {
            continue;
        }
        for &(u, p) in chain.transitions(v) {
            inflow[u] += mu[v] * p;
        }
    }
    let mut residual = 0.0f64;
    for u in 0..n {
        if u == y {
            continue;
        }
        let expected = inflow[u] + if u == x { 1.0 } else { 0.0 };
        residual = residual.max((mu[u] - expected).abs());
    }
    Ok((PerStateValues { values: mu, target: y, residual }, w))
}

pub fn occupation(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
) -> Result<PerStateValues, SolveError> {
    let sys = AbsorbingSystem::new(chain, &[(y, 0.0)]);
    occupation_parts(&sys, x, y).map(|(mu, _)| mu)
}

/// Probability of reaching `a` before `b` from every start:
/// harmonic off `{a, b}` with `p(a) = 1`, `p(b) = 0`.
pub fn absorption_split(
    chain: &ReversibleChain,
    a: usize,
    b: usize,
) -> Result<PerStateValues, SolveError> {
    assert!(a != b, "absorption split requires distinct anchors");
    let sys = AbsorbingSystem::new(chain, &[(a, 1.0), (b, 0.0)]);
    let rhs = vec![0.0; chain.state_count()];
    let (values, residual) = sys.solve(&rhs)?;
    Ok(PerStateValues { values, target: b, residual })
}

/// Exact distribution of `tau_y` from `x`, truncated once the surviving mass
/// drops to `tail_bound`.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    pub source: usize,
    pub target: usize,
    pub state_count: usize,
    /// `probs[t] = P_x(tau_y = t)` for `t = 0..=cutoff`.
    pub probs: Vec<f64>,
    /// Survival mass beyond the cutoff: `1 - sum(probs)`, exactly as iterated.
    pub tail_mass: f64,
    /// Upper bound for `sup_{t > cutoff} t * P(tau = t)`: the exact mean minus
    /// the truncated mean. Certifies scan conclusiveness over the tail.
    pub tail_mean_bound: f64,
}

impl DistributionTable {
    pub fn cutoff(&self) -> usize {
        self.probs.len() - 1
    }
}

pub fn hitting_distribution(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
    tail_bound: f64,
) -> Result<DistributionTable, SolveError> {
    assert!(tail_bound > 0.0 && tail_bound < 1.0, "tail bound must lie in (0, 1)");
    let n = chain.state_count();
    if x == y {
        return Ok(DistributionTable {
            source: x,
            target: y,
            state_count: n,
            probs: vec![1.0],
            tail_mass: 0.0,
            tail_mean_bound: 0.0,
        });
    }
    let exact_mean = hitting_mean(chain, y)?.values[x];
    let mut mass = vec![0.0f64; n];
    mass[x] = 1.0;
    let mut next = vec![0.0f64; n];
    let mut probs = vec![0.0f64];
    let mut truncated_mean = 0.0f64;
    let mut surviving = 1.0f64;
    for t in 1..=DISTRIBUTION_STEP_CAP {
        next.iter_mut().for_each(|v| *v = 0.0);
        for v in 0..n {
            let m = mass[v];
            if m == 0.0 {
                continue;
            }
            for &(u, p) in chain.transitions(v) {
                next[u] += m * p;
            }
        }
        let absorbed = next[y];
        next[y] = 0.0;
        probs.push(absorbed);
        truncated_mean += absorbed * t as f64;
        std::mem::swap(&mut mass, &mut next);
        surviving = mass.iter().sum();
        if surviving <= tail_bound {
            return Ok(DistributionTable {
                source: x,
                target: y,
                state_count: n,
                probs,
                tail_mass: surviving,
                tail_mean_bound: (exact_mean - truncated_mean).max(0.0),
            });
        }
    }
    Err(SolveError::CutoffExceeded { surviving, steps: DISTRIBUTION_STEP_CAP })
}

/// Mean and variance of the truncated table; accurate once `tail_mass` is
/// negligible.
pub fn moments_from_table(table: &DistributionTable) -> (f64, f64) {
    let mut mean = 0.0f64;
    let mut second = 0.0f64;
    for (t, &p) in table.probs.iter().enumerate() {
        let tf = t as f64;
        mean += tf * p;
        second += tf * tf * p;
    }
    (mean, second - mean * mean)
}

/// TSV serialization: `t<TAB>probability` per line, then a trailing comment
/// `# tail_mass=...`.
pub fn distribution_to_tsv(table: &DistributionTable) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for (t, &p) in table.probs.iter().enumerate() {
        writeln!(out, "{t}\t{p}").unwrap();
    }
    writeln!(out, "# tail_mass={}", table.tail_mass).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{funnel_level_chain, srw_chain};
    use crate::graph;

    fn srw(g: &graph::Graph) -> ReversibleChain {
        srw_chain(g)
    }

    #[test]
    fn path2_moments_match_hand_solve() {
        let c = srw(&graph::path(2).unwrap());
        let h = hitting_mean(&c, 2).unwrap();
        assert!((h.values[0] - 4.0).abs() < 1e-12);
        assert!((h.values[1] - 3.0).abs() < 1e-12);
        assert_eq!(h.values[2], 0.0);
        let m = hitting_second_moment(&c, 2).unwrap();
        assert!((m.second.values[0] - 24.0).abs() < 1e-12);
        assert!((m.second.values[1] - 17.0).abs() < 1e-12);
        assert!((m.variance[0] - 8.0).abs() < 1e-12);
        assert!((m.variance[1] - 8.0).abs() < 1e-12);
        assert!(h.residual <= SOLVER_TOL * 4.0);
    }

    #[test]
    fn path2_occupation_matches_hand_solve() {
        let c = srw(&graph::path(2).unwrap());
        let mu = occupation(&c, 0, 2).unwrap();
        assert!((mu.values[0] - 2.0).abs() < 1e-12);
        assert!((mu.values[1] - 2.0).abs() < 1e-12);
        assert_eq!(mu.values[2], 0.0);
        assert!(mu.residual < 1e-12);
        let total: f64 = mu.values.iter().sum();
        assert!((total - 4.0).abs() < 1e-12, "occupation sums to the mean");
    }

    #[test]
    fn complete3_moments_and_occupation() {
        let c = srw(&graph::complete(3).unwrap());
        let h = hitting_mean(&c, 2).unwrap();
        assert!((h.values[0] - 2.0).abs() < 1e-12);
        assert!((h.values[1] - 2.0).abs() < 1e-12);
        let m = hitting_second_moment(&c, 2).unwrap();
        assert!((m.variance[0] - 2.0).abs() < 1e-12);
        let mu = occupation(&c, 0, 2).unwrap();
        assert!((mu.values[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((mu.values[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn star4_leaf_to_leaf_mean() {
        let c = srw(&graph::star(4).unwrap());
        let h = hitting_mean(&c, 1).unwrap();
        assert!((h.values[2] - 6.0).abs() < 1e-12);
        assert!((h.values[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn absorption_split_is_gamblers_ruin_on_path() {
        let c = srw(&graph::path(3).unwrap());
        let p = absorption_split(&c, 0, 3).unwrap();
        assert!((p.values[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.values[2] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.values[0], 1.0);
        assert_eq!(p.values[3], 0.0);
    }

    #[test]
    fn level_chain_3_2_mean_is_ten() {
        let c = funnel_level_chain(3, 2).unwrap();
        let h = hitting_mean(&c, 4).unwrap();
        assert!((h.values[0] - 10.0).abs() < 1e-12);
        let m = hitting_second_moment(&c, 4).unwrap();
        assert!((m.variance[0] - 44.0).abs() < 1e-10);
    }

    #[test]
    fn strategies_are_detected_in_order() {
        let path = srw(&graph::path(5).unwrap());
        assert_eq!(AbsorbingSystem::new(&path, &[(0, 0.0)]).strategy(), Strategy::BirthDeath);
        let tree = srw(&graph::random_tree(20, 3).unwrap());
        assert_eq!(AbsorbingSystem::new(&tree, &[(0, 0.0)]).strategy(), Strategy::Tree);
        let funnel = srw(&graph::funnel(3, 2).unwrap());
        let last = funnel.state_count() - 1;
        assert_eq!(AbsorbingSystem::new(&funnel, &[(last, 0.0)]).strategy(), Strategy::Tree);
        assert_eq!(AbsorbingSystem::new(&funnel, &[(0, 0.0)]).strategy(), Strategy::Dense);
        let k4 = srw(&graph::complete(4).unwrap());
        assert_eq!(AbsorbingSystem::new(&k4, &[(0, 0.0)]).strategy(), Strategy::Dense);
    }

    #[test]
    fn specialized_solvers_agree_with_dense() {
        let cases: Vec<ReversibleChain> = vec![
            srw(&graph::path(30).unwrap()),
            srw(&graph::random_tree(40, 3).unwrap()),
            srw(&graph::funnel(3, 2).unwrap()),
        ];
        for chain in &cases {
            let y = chain.state_count() - 1;
            let rhs = vec![1.0; chain.state_count()];
            let auto = AbsorbingSystem::new(chain, &[(y, 0.0)]);
            let dense = AbsorbingSystem::with_strategy(chain, &[(y, 0.0)], Strategy::Dense);
            let gs = AbsorbingSystem::with_strategy(chain, &[(y, 0.0)], Strategy::Iterative);
            let (fa, _) = auto.solve(&rhs).unwrap();
            let (fd, _) = dense.solve(&rhs).unwrap();
            let (fg, _) = gs.solve(&rhs).unwrap();
            for u in 0..chain.state_count() {
                let scale = 1.0f64.max(fd[u].abs());
                assert!((fa[u] - fd[u]).abs() <= 1e-10 * scale, "auto vs dense at {u}");
                assert!((fg[u] - fd[u]).abs() <= 1e-9 * scale, "gs vs dense at {u}");
            }
        }
    }

    #[test]
    fn path2_distribution_is_geometric_on_even_times() {
        let c = srw(&graph::path(2).unwrap());
        let d = hitting_distribution(&c, 0, 2, 1e-9).unwrap();
        assert_eq!(d.probs[0], 0.0);
        assert_eq!(d.probs[1], 0.0);
        for k in 1..=10 {
            let t = 2 * k;
            assert!((d.probs[t] - 0.5f64.powi(k as i32)).abs() < 1e-15, "P(tau = {t})");
            assert_eq!(d.probs[t - 1], 0.0);
        }
        assert!(d.tail_mass <= 1e-9);
        let (mean, var) = moments_from_table(&d);
        assert!((mean - 4.0).abs() < 1e-6);
        assert!((var - 8.0).abs() < 1e-4);
    }

    #[test]
    fn distribution_tail_mean_bound_dominates_tail_surprise() {
        let c = srw(&graph::path(2).unwrap());
        let d = hitting_distribution(&c, 0, 2, 1e-9).unwrap();
        let t = d.cutoff() + 2;
        let exact_tail_entry = t as f64 * 0.5f64.powi((t / 2) as i32);
        assert!(d.tail_mean_bound >= exact_tail_entry);
        assert!(d.tail_mean_bound < 1e-6);
    }

    #[test]
    fn funnel_level_distribution_entry_at_shortest_time() {
        let c = funnel_level_chain(3, 2).unwrap();
        let d = hitting_distribution(&c, 0, 4, 1e-12).unwrap();
        assert!((d.probs[4] - 2.0 / 9.0).abs() < 1e-12);
        assert_eq!(d.probs[3], 0.0);
        let (mean, var) = moments_from_table(&d);
        assert!((mean - 10.0).abs() < 1e-9);
        assert!((var - 44.0).abs() < 1e-6);
    }

    #[test]
    fn distribution_from_target_is_point_mass() {
        let c = srw(&graph::path(2).unwrap());
        let d = hitting_distribution(&c, 2, 2, 0.5).unwrap();
        assert_eq!(d.probs, vec![1.0]);
        assert_eq!(d.tail_mass, 0.0);
    }

    #[test]
    fn tsv_has_trailing_tail_comment() {
        let c = srw(&graph::path(1).unwrap());
        let d = hitting_distribution(&c, 0, 1, 1e-9).unwrap();
        let text = distribution_to_tsv(&d);
        assert!(text.starts_with("0\t0\n1\t1\n"));
        assert!(text.ends_with("# tail_mass=0\n"));
    }

    #[test]
    fn second_moment_shares_factorization_and_reports_target() {
        let c = srw(&graph::complete(4).unwrap());
        let m = hitting_second_moment(&c, 3).unwrap();
        assert_eq!(m.second.target, 3);
        assert!(m.variance.iter().all(|&v| v >= -1e-12));
    }
}
