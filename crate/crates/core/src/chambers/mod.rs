pub mod ample_shift;
pub mod finite_gen;
pub mod orders;
pub mod polytopes;
pub mod small;

pub use ample_shift::{in_ample_shifted_set, AmpleShiftPatch, AmpleShiftPredicate, AmpleShiftWitness};
pub use finite_gen::{adjoint_cone, hilbert_basis_witness, HilbertWitness};
pub use orders::{
    asymptotic_order, boundary_structure, box_around, chamber_decomposition, default_valuations, nef_chamber,
    support_cone, ChamberDecomposition,
};
pub use polytopes::{compute_bsav, compute_eav, polytope_l, DivisorSpan};
pub use small::{inverse_is_morphism, transform_order_invariance};
