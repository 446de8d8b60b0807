//! Random caterpillar trees under uniform and preferential attachment.
//!
//! * [`tree`]: the caterpillar data model, degrees, depths and the JSON form.
//! * [`simulate`]: seeded growth and replication.
//! * [`exact`]: exact and limiting laws of the degree profile.
//! * [`gini`]: type I / type II Gini indices, closed-form estimators, Lorenz curves.
//! * [`montecarlo`]: replicated experiments.
//! * [`output`] and [`plot`]: CSV/JSON and SVG renderings.

pub mod error;
pub mod exact;
pub mod gini;
pub mod montecarlo;
pub mod output;
pub mod plot;
pub mod simulate;
pub mod tree;

pub use error::{Error, Result};
pub use simulate::{grow, replicate, GrowthModel, SeedSpec};
pub use tree::{CaterpillarTree, DegreeVector, DepthMultiset};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
