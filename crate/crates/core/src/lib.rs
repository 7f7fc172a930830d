//! Exact-arithmetic mutation workbench.
//!
//! Seeds and quivers ([`seed`]), Laurent/rational expressions and the cluster
//! X- and A-transformations ([`laurent`]), curve configurations on the flat
//! torus ([`curves`]), torus local systems ([`local`]), representations of the
//! cylinder-with-disk quiver ([`q0`]) and decorated exchange graphs
//! ([`exchange`]). Everything is exact: integers are `i64`/`BigInt`, scalars
//! are `BigRational` or a prime field.

pub mod curves;
pub mod error;
pub mod exchange;
pub mod field;
pub mod laurent;
pub mod linalg;
pub mod local;
pub mod q0;
pub mod registry;
pub mod seed;

pub use error::{Error, Result};
pub use seed::{Quiver, Seed, SkewLattice};

/// Exact rational scalar used throughout the public API.
pub type Q = num_rational::BigRational;
