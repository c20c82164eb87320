//! Exact hitting-time analysis for simple random walks on finite connected
//! graphs and for finite irreducible reversible Markov chains.
//!
//! The crate computes, in closed form or by exact linear algebra, the mean
//! and variance of the hitting time tau_y of a target state, the occupation
//! measure of the walk killed at the target, the induced voltages and unit
//! current flow of the equivalent electrical network, and the entropy-like
//! edge sum that links the two. On top of that it machine-checks a family of
//! variance lower bounds, scans hitting-time distributions for
//! time-concentration phenomena, and provides a reproducible Monte Carlo
//! sampler as an independent stochastic cross-check.
//!
//! Layout:
//! - [`graph`]: undirected simple graphs, generators, edge-list format
//! - [`chain`]: reversible chains, conductances, detailed balance
//! - [`linear`]: absorbing-system solvers, moments, occupation, distributions
//! - [`analysis`]: hitting profiles, flow/voltage identities, entropy sums
//! - [`bounds`]: variance lower bounds and distribution scans
//! - [`constructions`]: funnel recursions and comb growth tables
//! - [`montecarlo`]: seeded sampling of hitting times
//! - [`corpus`], [`suite`]: instance corpus and the verification suites

pub mod analysis;
pub mod bounds;
pub mod chain;
pub mod constructions;
pub mod corpus;
pub mod graph;
pub mod linear;
pub mod montecarlo;
pub mod suite;

pub use analysis::{profile, HittingProfile, Layer};
pub use bounds::{check_bounds, is_deterministic, BoundKind, BoundReport};
pub use chain::{chain_from_conductances, srw_chain, ReversibleChain};
pub use graph::Graph;
pub use linear::{hitting_distribution, hitting_mean, hitting_second_moment, occupation};
