pub mod numspace;
pub mod positivity;

pub use numspace::{cartier_degree, wall_degrees, CurveClass, NumSpace};
pub use positivity::{fibre_polytope, ConeTheorem, DenominatorCheck, NegativeRay, SupportingData};
pub mod restrict;

pub use restrict::{restrict_to_open, Restriction};
