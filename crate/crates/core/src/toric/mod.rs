//! Fans, toric morphisms, torus-invariant divisors and singularities of toric pairs.

pub mod divisor;
pub mod fan;
pub mod pair;

pub use divisor::{
    birational_transform, canonical_divisor, cartier_data, effectivity_test, fixed_part, is_q_cartier,
    linearly_equivalent, principal_divisor, pullback_divisor, section_polyhedron, volume, CartierData, TDivisor,
};
pub use fan::{
    is_q_factorial, q_factorialize, star_subdivision, validate_fan, CanonicalFan, Fan, FanReport, LatticeMap, Wall,
};
pub use pair::{
    classify_pair, discrepancy, discrepancy_by_subdivision, log_discrepancy, terminalize, Base, Pair,
    SingularityClass,
};
