//! Experimental laboratory for dilation-stable integer sets.
//!
//! The library constructs integer sets S (and sign functions f) from an
//! explicit parameter schedule of frequencies `T_k`, `t_k` and interval
//! boundaries `N_{k,j}`, where membership of n is decided by sign and arc
//! conditions on Archimedean characters `n^{iT}` twisted by a Dirichlet
//! character mod q. It then measures, at finite scale and fully
//! deterministically, the statistics those constructions are designed to
//! exhibit: near-invariance of S under dilation n -> pn, densities, vanishing
//! intersections of consecutive shifts, pair correlations, and joint
//! equidistribution of two frequencies.
//!
//! Modules:
//! - [`phase`]: high-precision evaluation of `n^{iT}` (phases in turns).
//! - [`dirichlet`]: prime sieve and Dirichlet characters mod a prime.
//! - [`tsearch`]: grid search for T with prescribed `p^{iT}` targets.
//! - [`schedule`]: the epoch parameter chain and interval partition.
//! - [`stable_set`]: the membership predicate for S.
//! - [`signed`]: the almost-multiplicative sign function f.
//! - [`estimators`]: deterministic counting and frequency reports.
//! - [`report`]: CSV/JSON emission of reports.

pub mod dd;
pub mod dirichlet;
pub mod estimators;
pub mod phase;
pub mod report;
pub mod schedule;
pub mod signed;
pub mod stable_set;
pub mod tsearch;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("precision contract violated: T ln n = {magnitude:.6e} exceeds the supported 1e15 (n = {n}, T = {t})")]
    PrecisionContract { n: u64, t: f64, magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("search budget exhausted after {steps} steps (scanned up to T = {t_reached})")]
    BudgetExhausted { steps: u64, t_reached: f64 },

    #[error("infeasible rule: {0}")]
    InfeasibleRule(String),

    #[error("{what}: n = {n} outside supported range [1, {end})")]
    OutOfRange {
        what: &'static str,
        n: u64,
        end: u64,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
