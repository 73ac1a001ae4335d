//! Exact toric minimal model program with scaling.
//!
//! Fans, torus-invariant divisors and their numerical classes are handled with exact
//! rational arithmetic; every cone, polytope and threshold is computed by finite
//! polyhedral algorithms.

pub mod chambers;
pub mod cones;
pub mod error;
pub mod exactla;
pub mod gallery;
pub mod gluing;
pub mod mmp;
pub mod toric;

pub use error::{Error, Result};
pub use exactla::{parse_rat, fmt_rat, PolyCone, Polyhedron, QVec, Rat};

pub use toric::{Fan, LatticeMap, Pair, TDivisor};
