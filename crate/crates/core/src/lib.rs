//! Lower bounds for two-party communication complexity.
//!
//! The crate computes partition bounds with an exact rational simplex,
//! evaluates Shannon and order-∞ Rényi information costs of
//! pseudotranscripts, and implements the explicit conversions between
//! pseudotranscripts and fractional tilings:
//!
//! * [`constructions::lift`] turns an exact-cover tiling into a
//!   pseudotranscript whose Rényi cost argument equals the total weight;
//! * [`constructions::slice`] turns a pseudotranscript into an exact-cover
//!   tiling with the same error whose total weight is the Rényi cost argument;
//! * [`constructions::prune`] removes heavy slices to get a relaxed-partition
//!   certificate whose size is controlled by the Shannon information cost.
//!
//! Together with [`bounds::prt`] these give `min_Q I∞(XY : Q) = log prt`
//! checked exactly on concrete instances.

pub mod bounds;
pub mod constructions;
pub mod distribution;
pub mod error;
pub mod io;
pub mod lp;
pub mod measures;
pub mod protocols;
pub mod pseudotranscript;
pub mod rational;
pub mod relation;
pub mod sample;
pub mod tiles;

pub use bounds::{BoundResult, CertificateMode, Limits};
pub use distribution::InputDistribution;
pub use error::{Error, Result};
pub use pseudotranscript::Pseudotranscript;
pub use rational::Rational;
pub use relation::{ErrorFn, Relation};
pub use tiles::{Tile, TileWeighting};
