//! Exact conditional goodness-of-fit tests for log-linear network models.
//!
//! Dyadic network models — two-way independence, the undirected degree
//! (beta) model, the directed dyadic (p1) model with zero, constant, or
//! differential reciprocity, and directed stochastic blockmodels over a
//! fixed partition — are log-linear in an integer design matrix `A` acting
//! on dyad-state tables. Conditioning on the observed sufficient statistics
//! `Au` leaves a *fiber*: all tables with the same statistics. This crate
//! tests model fit exactly, without asymptotic approximations:
//!
//! 1. [`table`] encodes graphs as dyad tables and computes `Au`;
//! 2. [`design`] builds `A` for each model family;
//! 3. [`ipf`] fits cell means by iterative proportional scaling;
//! 4. [`moves`] produces Markov moves (integer kernel vectors of `A`);
//! 5. [`sampler`] runs a Metropolis–Hastings walk over the fiber;
//! 6. [`gof`] turns the walk into a conditional p-value report;
//! 7. [`oracle`] enumerates small fibers outright to cross-check everything.
//!
//! ```
//! use fibergof::design::ModelSpec;
//! use fibergof::gof::{exact_test, StatKind};
//! use fibergof::io::parse_edge_list;
//! use fibergof::sampler::ChainConfig;
//! use fibergof::table::{encode_graph, Mode};
//!
//! let g = parse_edge_list("a b\nb c\nc a\nc d\n", false).unwrap();
//! let t = encode_graph(&g, Mode::Simple).unwrap();
//! let cfg = ChainConfig { steps: 5_000, burn_in: 1_000, seed: 1, ..Default::default() };
//! let report = exact_test(&t, &ModelSpec::Beta { n: 4 }, StatKind::Chi2, &cfg, None).unwrap();
//! assert!(report.p_value > 0.0 && report.p_value <= 1.0);
//! ```

pub mod design;
pub mod error;
pub mod gof;
pub mod io;
pub mod ipf;
pub mod moves;
pub mod oracle;
pub mod sampler;
pub mod table;

pub use error::{Error, Result};

/// A fresh seed from the operating system, for callers that did not pin one.
pub fn random_seed() -> u64 {
    use rand::Rng;
    rand::rng().random()
}
