//! Exact rational linear algebra, linear programming and polyhedral primitives.

pub mod cone;
pub mod lattice;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod qvec;
pub mod rat;

pub use cone::{common_refinement, PolyCone, Subdivision};
pub use lp::{lp_optimize, LpOutcome, Sense};
pub use polyhedron::Polyhedron;
pub use qvec::QVec;
pub use rat::{fmt_rat, parse_rat, Rat};
