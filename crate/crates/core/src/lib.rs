//! Random intersection graphs and their threshold laws.
//!
//! The crate samples uniform and binomial random s-intersection graphs,
//! Erdős–Rényi graphs, random geometric graphs and their intersections;
//! decides k-connectivity, minimum degree, near-perfect matchings, Hamilton
//! cycles and k-robustness exactly; evaluates the limiting probabilities
//! predicted by the zero-one laws; and runs seeded Monte Carlo experiments
//! comparing the two.
//!
//! ```
//! use riglab::models::{ModelSpec, UniformRigParams};
//! use riglab::properties::PropertyKind;
//! use riglab::scaling::deviation_from_params;
//!
//! let spec = ModelSpec::UniformRig(UniformRigParams { n: 2000, k: 6, p: 10_000, s: 1 });
//! let alpha = deviation_from_params(&spec, &PropertyKind::NearPerfectMatching).unwrap();
//! assert!((alpha + 0.401).abs() < 1e-3);
//! ```

pub mod config;
pub mod error;
pub mod graph;
pub mod models;
pub mod montecarlo;
pub mod properties;
pub mod rng;
pub mod scaling;

pub use error::{Error, Result};

/// Runs the code listings of the guide in `book/` as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/properties.md")]
    mod properties {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
