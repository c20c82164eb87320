//! Machine verification of the variance lower bounds and the two
//! conjecture-probing scan functionals.
//!
//! Every bound is evaluated from exact profile quantities and reported as a
//! `BoundReport` with its slack; `holds` tolerates `-1e-9` of slack so that
//! equality witnesses (e.g. the doubled-mean bound on a path of length 2)
//! pass under solver rounding. The scans certify their truncated-tail
//! conclusiveness through the distribution's `tail_mean_bound`.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::HittingProfile;
use crate::chain::ReversibleChain;
use crate::graph::Graph;
use crate::linear::{absorption_split, occupation, DistributionTable, SolveError};

/// Default slack floor: a report holds when `lhs - rhs >= -1e-9`.
pub const SLACK_FLOOR: f64 = -1e-9;

/// A scan is conclusive when its tail uncertainty is below this fraction of
/// the best in-table value.
const SCAN_CONCLUSIVE_REL: f64 = 1e-6;

/// Absolute uncertainty floor for scans whose best value is zero.
const SCAN_CONCLUSIVE_ABS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("bound {bound} not applicable: {reason}")]
    PreconditionViolation { bound: String, reason: String },
    #[error("target state is absorbing: P(y,y) = 1")]
    AbsorbingTarget,
    #[error("truncated tail too heavy for a conclusive scan: uncertainty {uncertainty:e}, best in-table value {best:e}")]
    InconclusiveTail { uncertainty: f64, best: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// The verified variance lower bounds, named by their content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `Var + E >= E^2 / (1 + ln n)` for srw on a connected graph.
    LogStates,
    /// `Var + E >= 2 E^2 / (2 + ln d(x,y) + ln deg(y))`.
    LogDegreeDistance,
    /// `Var >= E^2 / (6D (2 + ln D) ln(d(x,y)+1))` for max degree `D`,
    /// non-deterministic pairs.
    BoundedDegree,
    /// `Var >= E / (3D)` for non-deterministic pairs.
    MeanOverDegree,
    /// `Var >= 2E` on trees, non-deterministic pairs.
    TreeDoubleMean,
    /// `Var >= (ln 4 / 3) E^2 / ln(d(x,y)+1)` on trees, non-deterministic
    /// pairs.
    TreeLogDistance,
    /// `Var + E >= E^2 / (1 + (1/2) ln(R_eff C_y))` for any reversible chain.
    EscapeResistance,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::LogStates,
        BoundKind::LogDegreeDistance,
        BoundKind::BoundedDegree,
        BoundKind::MeanOverDegree,
        BoundKind::TreeDoubleMean,
        BoundKind::TreeLogDistance,
        BoundKind::EscapeResistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::LogStates => "log-states",
            BoundKind::LogDegreeDistance => "log-degree-distance",
            BoundKind::BoundedDegree => "bounded-degree",
            BoundKind::MeanOverDegree => "mean-over-degree",
            BoundKind::TreeDoubleMean => "tree-double-mean",
            BoundKind::TreeLogDistance => "tree-log-distance",
            BoundKind::EscapeResistance => "escape-resistance",
        }
    }
}

/// One verified inequality `lhs >= rhs`, or one residual check
/// `rhs <= lhs` with `lhs` the tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; nonnegative when the inequality is strict.
    pub slack: f64,
    /// Tightness `rhs / lhs` when `lhs > 0`; 1 marks an equality witness.
    pub ratio: Option<f64>,
    pub holds: bool,
}

impl BoundReport {
    /// Inequality `lhs >= rhs` at the default slack floor.
    pub fn theorem(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::theorem_with_floor(name, lhs, rhs, SLACK_FLOOR)
    }

    /// Inequality `lhs >= rhs` holding when `slack >= floor`.
    pub fn theorem_with_floor(name: impl Into<String>, lhs: f64, rhs: f64, floor: f64) -> Self {
        let slack = lhs - rhs;
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            ratio: if lhs > 0.0 { Some(rhs / lhs) } else { None },
            holds: slack >= floor,
        }
    }

    /// Residual check `residual <= tol`, reported on the same scale:
    /// `lhs` is the tolerance, `rhs` the residual, and `holds` is strict.
    pub fn residual(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        BoundReport {
            name: name.into(),
            lhs: tol,
            rhs: residual,
            slack: tol - residual,
            ratio: Some(residual / tol),
            holds: residual <= tol,
        }
    }

    pub fn to_tsv_line(&self) -> String {
        format!(
            "{}\t{:.17e}\t{:.17e}\t{:.3e}\t{}\t{}",
            self.name,
            self.lhs,
            self.rhs,
            self.slack,
            self.ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.6}")),
            if self.holds { "holds" } else { "FAILS" },
        )
    }
}

/// Which bounds `check_bounds` evaluates.
#[derive(Debug, Clone)]
pub enum BoundSelection {
    /// Every bound whose hypotheses the instance satisfies.
    Applicable,
    /// Exactly these; a violated hypothesis is an error.
    Only(Vec<BoundKind>),
}

/// True iff `tau_y` from `x` is a point mass: `x = y`, or `x` is a pendant
/// vertex whose unique neighbor is `y`.
pub fn is_deterministic(g: &Graph, x: usize, y: usize) -> bool {
    x == y || (g.degree(x) == 1 && g.neighbors(x)[0] == y)
}

struct BoundContext {
    mean: f64,
    variance: f64,
    states: usize,
    srw: bool,
    tree: bool,
    deterministic: bool,
    max_degree: usize,
    target_degree: usize,
    distance: usize,
    escape_product: f64,
}

impl BoundContext {
    fn from_profile(p: &HittingProfile) -> Self {
        let n = p.state_count;
        let srw = p.degrees.is_some();
        let (max_degree, target_degree) = p
            .degrees
            .as_ref()
            .map(|d| (d.iter().copied().max().unwrap_or(0), d[p.target]))
            .unwrap_or((0, 0));
        let deterministic = srw
            && p.degrees.as_ref().map_or(false, |d| d[p.source] == 1)
            && p.edges
                .iter()
                .any(|e| (e.u, e.v) == (p.source, p.target) || (e.v, e.u) == (p.source, p.target));
        BoundContext {
            mean: p.mean,
            variance: p.variance,
            states: n,
            srw,
            tree: srw && p.edges.len() + 1 == n,
            deterministic,
            max_degree,
            target_degree,
            distance: crate::analysis::support_distance(p),
            escape_product: p.escape_product,
        }
    }
}

fn applicability(kind: BoundKind, ctx: &BoundContext) -> Result<(), String> {
    let srw = |ctx: &BoundContext| {
        if ctx.srw { Ok(()) } else { Err("requires a simple random walk profile".to_string()) }
    };
    let nondet = |ctx: &BoundContext| {
        if ctx.deterministic {
            Err("requires a non-deterministic hitting time".to_string())
        } else {
            Ok(())
        }
    };
    let tree = |ctx: &BoundContext| {
        if ctx.tree { Ok(()) } else { Err("requires an acyclic graph".to_string()) }
    };
    match kind {
        BoundKind::LogStates | BoundKind::LogDegreeDistance => srw(ctx),
        BoundKind::BoundedDegree | BoundKind::MeanOverDegree => srw(ctx).and_then(|_| nondet(ctx)),
        BoundKind::TreeDoubleMean | BoundKind::TreeLogDistance => {
            srw(ctx).and_then(|_| tree(ctx)).and_then(|_| nondet(ctx))
        }
        BoundKind::EscapeResistance => Ok(()),
    }
}

fn evaluate(kind: BoundKind, ctx: &BoundContext, floor: f64) -> BoundReport {
    let e = ctx.mean;
    let var = ctx.variance;
    let d = ctx.distance as f64;
    let (lhs, rhs) = match kind {
        BoundKind::LogStates => (var + e, e * e / (1.0 + (ctx.states as f64).ln())),
        BoundKind::LogDegreeDistance => {
            (var + e, 2.0 * e * e / (2.0 + d.ln() + (ctx.target_degree as f64).ln()))
        }
        BoundKind::BoundedDegree => {
            let big_d = ctx.max_degree as f64;
            let c_d = 1.0 / (6.0 * big_d * (2.0 + big_d.ln()));
            (var, c_d * e * e / (d + 1.0).ln())
        }
        BoundKind::MeanOverDegree => (var, e / (3.0 * ctx.max_degree as f64)),
        BoundKind::TreeDoubleMean => (var, 2.0 * e),
        BoundKind::TreeLogDistance => (var, 4.0f64.ln() / 3.0 * e * e / (d + 1.0).ln()),
        BoundKind::EscapeResistance => (var + e, e * e / (1.0 + 0.5 * ctx.escape_product.ln())),
    };
    BoundReport::theorem_with_floor(kind.name(), lhs, rhs, floor)
}

/// Evaluates the selected variance lower bounds on one profile. With
/// `Applicable`, bounds whose hypotheses fail are skipped; with `Only`,
/// they are errors. A coincident pair has nothing to bound and yields no
/// reports under `Applicable`.
pub fn check_bounds(
    p: &HittingProfile,
    selection: &BoundSelection,
) -> Result<Vec<BoundReport>, BoundsError> {
    check_bounds_with_floor(p, selection, SLACK_FLOOR)
}

/// `check_bounds` with an explicit slack floor for `holds`.
pub fn check_bounds_with_floor(
    p: &HittingProfile,
    selection: &BoundSelection,
    floor: f64,
) -> Result<Vec<BoundReport>, BoundsError> {
    if p.source == p.target {
        return match selection {
            BoundSelection::Applicable => Ok(Vec::new()),
            BoundSelection::Only(kinds) => Err(BoundsError::PreconditionViolation {
                bound: kinds.first().map_or("", |k| k.name()).to_string(),
                reason: "coincident source and target".to_string(),
            }),
        };
    }
    let ctx = BoundContext::from_profile(p);
    let mut reports = Vec::new();
    match selection {
        BoundSelection::Applicable => {
            for kind in BoundKind::ALL {
                if applicability(kind, &ctx).is_ok() {
                    reports.push(evaluate(kind, &ctx, floor));
                }
            }
        }
        BoundSelection::Only(kinds) => {
            for &kind in kinds {
                applicability(kind, &ctx).map_err(|reason| {
                    BoundsError::PreconditionViolation { bound: kind.name().to_string(), reason }
                })?;
                reports.push(evaluate(kind, &ctx, floor));
            }
        }
    }
    Ok(reports)
}

/// Both sides of the escape-probability form of `1 / (R_eff C_y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EscapeCheck {
    /// `1 / (R_eff(x,y) C_y)` with the chain-layer effective resistance.
    pub lhs: f64,
    /// `sum_{u != y} P(y,u)/(1 - P(y,y)) * P_u(tau_x < tau_y)`.
    pub rhs: f64,
    pub residual: f64,
    /// `R_eff(x,y) C_y`, at least 1 for every reversible chain.
    pub product: f64,
}

/// Verifies that `1/(R_eff C_y)` equals the probability that an excursion
/// from `y` hits `x` before returning, and that `R_eff C_y >= 1`.
pub fn escape_identity_check(
    chain: &ReversibleChain,
    x: usize,
    y: usize,
) -> Result<EscapeCheck, BoundsError> {
    assert!(x != y, "escape identity requires distinct states");
    let hold = 1.0 - chain.prob(y, y);
    if hold <= 0.0 {
        return Err(BoundsError::AbsorbingTarget);
    }
    let mu = occupation(chain, x, y)?;
    let r_eff = mu.values[x] / chain.stationary()[x];
    let product = r_eff * chain.exit_conductance(y);
    assert!(product >= 1.0 - 1e-9, "R_eff C_y = {product} dips below 1");
    let split = absorption_split(chain, x, y)?;
    let mut rhs = 0.0;
    for &(u, p) in chain.transitions(y) {
        if u != y {
            rhs += p * split.values[u];
        }
    }
    rhs /= hold;
    let lhs = 1.0 / product;
    Ok(EscapeCheck { lhs, rhs, residual: (lhs - rhs).abs(), product })
}

/// Argmax record of a scan functional over a truncated distribution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConjectureScan {
    /// Smallest maximizing time.
    pub t_star: usize,
    /// The scanned quantity at `t_star`.
    pub value: f64,
    /// Conjecture-side comparison at `t_star`.
    pub baseline: f64,
    pub ratio: f64,
}

fn conclusive(uncertainty: f64, best: f64) -> Result<(), BoundsError> {
    if uncertainty > SCAN_CONCLUSIVE_ABS.max(SCAN_CONCLUSIVE_REL * best) {
        return Err(BoundsError::InconclusiveTail { uncertainty, best });
    }
    Ok(())
}

/// Maximizes `t * P(tau = t)` over the table. Beyond the cutoff the
/// functional is at most `tail_mean_bound`, which must be negligible against
/// the in-table maximum. The baseline is `sqrt(1 + ln n)`.
pub fn surprise_max(d: &DistributionTable) -> Result<ConjectureScan, BoundsError> {
    let mut t_star = 1usize;
    let mut best = -1.0f64;
    for (t, &p) in d.probs.iter().enumerate().skip(1) {
        let v = t as f64 * p;
        if v > best {
            best = v;
            t_star = t;
        }
    }
    let best = best.max(0.0);
    conclusive(d.tail_mean_bound, best)?;
    let baseline = (1.0 + (d.state_count as f64).ln()).sqrt();
    Ok(ConjectureScan { t_star, value: best, baseline, ratio: best / baseline })
}

/// Maximizes `P(t <= tau <= t + n) * t / n` over `t > n` by a sliding
/// window over prefix sums. Windows clipped by the cutoff undercount by at
/// most `tail_mean_bound / n`, which doubles as the beyond-cutoff bound; the
/// scan is conclusive when that uncertainty is negligible. The reported
/// `value` is the window mass at `t_star` and the baseline is `n / t_star`.
pub fn interval_ratio_scan(
    d: &DistributionTable,
    n: usize,
) -> Result<ConjectureScan, BoundsError> {
    assert!(n >= 1, "window length must be positive");
    let cutoff = d.cutoff();
    let mut prefix = vec![0.0f64; cutoff + 2];
    for (t, &p) in d.probs.iter().enumerate() {
        prefix[t + 1] = prefix[t] + p;
    }
    let window_mass =
        |t: usize| -> f64 { prefix[(t + n + 1).min(cutoff + 1)] - prefix[t.min(cutoff + 1)] };
    let mut t_star = n + 1;
    let mut best = -1.0f64;
    for t in n + 1..=cutoff {
        let r = window_mass(t) * t as f64 / n as f64;
        if r > best {
            best = r;
            t_star = t;
        }
    }
    let best = best.max(0.0);
    conclusive(d.tail_mean_bound / n as f64, best)?;
    Ok(ConjectureScan {
        t_star,
        value: window_mass(t_star),
        baseline: n as f64 / t_star as f64,
        ratio: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{profile, Layer};
    use crate::chain::{chain_from_conductances, srw_chain, ConductanceTable};
    use crate::graph;
    use crate::linear::hitting_distribution;

    fn report<'a>(reports: &'a [BoundReport], name: &str) -> &'a BoundReport {
        reports.iter().find(|r| r.name == name).unwrap()
    }

    #[test]
    fn deterministic_pairs_are_the_pendant_ones() {
        let p1 = graph::path(1).unwrap();
        assert!(is_deterministic(&p1, 0, 1));
        let p2 = graph::path(2).unwrap();
        assert!(!is_deterministic(&p2, 0, 2));
        assert!(is_deterministic(&p2, 0, 0));
        let s = graph::star(4).unwrap();
        assert!(is_deterministic(&s, 2, 0));
        assert!(!is_deterministic(&s, 0, 2));
        assert!(!is_deterministic(&s, 1, 2));
    }

    #[test]
    fn path2_bounds_all_hold_with_tree_equality() {
        let c = srw_chain(&graph::path(2).unwrap());
        let p = profile(&c, 0, 2, Layer::Graph).unwrap();
        let reports = check_bounds(&p, &BoundSelection::Applicable).unwrap();
        assert_eq!(reports.len(), BoundKind::ALL.len());
        assert!(reports.iter().all(|r| r.holds), "{reports:?}");

        let log_states = report(&reports, "log-states");
        assert!((log_states.lhs - 12.0).abs() < 1e-12);
        assert!((log_states.rhs - 16.0 / (1.0 + 3.0f64.ln())).abs() < 1e-12);

        let doubled = report(&reports, "tree-double-mean");
        assert!((doubled.lhs - 8.0).abs() < 1e-9);
        assert!((doubled.rhs - 8.0).abs() < 1e-9);
        assert!(doubled.slack.abs() < 1e-9);
        assert!((doubled.ratio.unwrap() - 1.0).abs() < 1e-9);

        let escape = report(&reports, "escape-resistance");
        assert!((escape.rhs - 16.0 / (1.0 + 0.5 * 2.0f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn deterministic_pair_skips_degree_bounds() {
        let c = srw_chain(&graph::path(1).unwrap());
        let p = profile(&c, 0, 1, Layer::Graph).unwrap();
        let reports = check_bounds(&p, &BoundSelection::Applicable).unwrap();
        let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
        assert!(names.contains(&"log-states"));
        assert!(!names.contains(&"tree-double-mean"));
        assert!(!names.contains(&"mean-over-degree"));
        assert!(reports.iter().all(|r| r.holds));

        let err = check_bounds(&p, &BoundSelection::Only(vec![BoundKind::TreeDoubleMean]))
            .unwrap_err();
        assert!(matches!(err, BoundsError::PreconditionViolation { .. }));
    }

    #[test]
    fn tree_bounds_rejected_on_cycles() {
        let c = srw_chain(&graph::complete(3).unwrap());
        let p = profile(&c, 0, 2, Layer::Graph).unwrap();
        let err =
            check_bounds(&p, &BoundSelection::Only(vec![BoundKind::TreeLogDistance])).unwrap_err();
        assert!(matches!(err, BoundsError::PreconditionViolation { .. }));
        let reports = check_bounds(&p, &BoundSelection::Applicable).unwrap();
        assert!(reports.iter().all(|r| r.name != "tree-double-mean"));
        assert!(reports.iter().all(|r| r.holds));
    }

    #[test]
    fn lazy_two_state_chain_attains_escape_equality() {
        let table =
            ConductanceTable::new(&[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let c = chain_from_conductances(&table).unwrap();
        let p = profile(&c, 0, 1, Layer::Chain).unwrap();
        assert!((p.mean - 2.0).abs() < 1e-12);
        assert!((p.variance - 2.0).abs() < 1e-12);
        assert!((p.escape_product - 1.0).abs() < 1e-12);
        let reports =
            check_bounds(&p, &BoundSelection::Only(vec![BoundKind::EscapeResistance])).unwrap();
        let escape = &reports[0];
        assert!(escape.holds);
        assert!((escape.lhs - 4.0).abs() < 1e-12);
        assert!((escape.rhs - 4.0).abs() < 1e-12);
        assert!(escape.slack.abs() < 1e-9);
    }

    #[test]
    fn escape_identity_on_small_instances() {
        let c = srw_chain(&graph::path(2).unwrap());
        let check = escape_identity_check(&c, 0, 2).unwrap();
        assert!((check.lhs - 0.5).abs() < 1e-12);
        assert!((check.rhs - 0.5).abs() < 1e-12);
        assert!(check.residual < 1e-12);
        assert!((check.product - 2.0).abs() < 1e-12);

        let flip = ConductanceTable::new(&[(0, 1, 1.0)]).unwrap();
        let flip = chain_from_conductances(&flip).unwrap();
        let check = escape_identity_check(&flip, 0, 1).unwrap();
        assert!((check.lhs - 1.0).abs() < 1e-12);
        assert!((check.rhs - 1.0).abs() < 1e-12);

        let c = srw_chain(&graph::complete(3).unwrap());
        let check = escape_identity_check(&c, 0, 2).unwrap();
        assert!((check.lhs - 0.75).abs() < 1e-12);
        assert!(check.residual < 1e-12);
    }

    #[test]
    fn surprise_scan_on_geometric_tables() {
        let c = srw_chain(&graph::complete(3).unwrap());
        let d = hitting_distribution(&c, 0, 2, 1e-9).unwrap();
        let scan = surprise_max(&d).unwrap();
        assert_eq!(scan.t_star, 1);
        assert!((scan.value - 0.5).abs() < 1e-12);
        assert!((scan.baseline - (1.0 + 3.0f64.ln()).sqrt()).abs() < 1e-12);

        let c = srw_chain(&graph::path(1).unwrap());
        let d = hitting_distribution(&c, 0, 1, 1e-9).unwrap();
        let scan = surprise_max(&d).unwrap();
        assert_eq!(scan.t_star, 1);
        assert!((scan.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn surprise_scan_sees_funnel_shortcut_mass() {
        let c = srw_chain(&graph::funnel(3, 2).unwrap());
        let d = hitting_distribution(&c, 0, 15, 1e-9).unwrap();
        assert!((d.probs[4] - 2.0 / 9.0).abs() < 1e-12);
        let scan = surprise_max(&d).unwrap();
        assert!(scan.value >= 4.0 * (2.0 / 9.0) - 1e-12);
        assert!(scan.t_star >= 4);
    }

    #[test]
    fn interval_scan_matches_geometric_window() {
        let c = srw_chain(&graph::complete(3).unwrap());
        let d = hitting_distribution(&c, 0, 2, 1e-12).unwrap();
        let scan = interval_ratio_scan(&d, 3).unwrap();
        assert_eq!(scan.t_star, 4);
        assert!((scan.value - 15.0 / 128.0).abs() < 1e-12);
        assert!((scan.baseline - 0.75).abs() < 1e-15);
        assert!((scan.ratio - 0.15625).abs() < 1e-12);
    }

    #[test]
    fn interval_scan_is_zero_without_late_mass() {
        let c = srw_chain(&graph::path(1).unwrap());
        let d = hitting_distribution(&c, 0, 1, 1e-9).unwrap();
        let scan = interval_ratio_scan(&d, 1).unwrap();
        assert_eq!(scan.ratio, 0.0);
        assert_eq!(scan.value, 0.0);
    }

    #[test]
    fn interval_scan_ignores_appended_zeros() {
        let c = srw_chain(&graph::complete(3).unwrap());
        let d = hitting_distribution(&c, 0, 2, 1e-12).unwrap();
        let base = interval_ratio_scan(&d, 3).unwrap();
        let mut padded = d.clone();
        padded.probs.extend([0.0; 40]);
        let again = interval_ratio_scan(&padded, 3).unwrap();
        assert_eq!(base.t_star, again.t_star);
        assert_eq!(base.value, again.value);
        assert_eq!(base.ratio, again.ratio);
    }

    #[test]
    fn heavy_tails_are_inconclusive() {
        let c = srw_chain(&graph::path(2).unwrap());
        let d = hitting_distribution(&c, 0, 2, 0.5).unwrap();
        assert!(d.tail_mean_bound > 1.0);
        assert!(matches!(surprise_max(&d), Err(BoundsError::InconclusiveTail { .. })));
        assert!(matches!(interval_ratio_scan(&d, 2), Err(BoundsError::InconclusiveTail { .. })));
    }
}
