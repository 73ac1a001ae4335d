pub mod contract;
pub mod flip;
pub mod ledger;
pub mod run;
pub mod scaling;
pub mod threshold;

pub use contract::{check_good_contraction, contract_ray, descends, Contraction, ContractionKind, GoodnessReport};
pub use flip::{check_flip_axioms, flip, FlipAxiomReport};
pub use ledger::{discrepancy_deltas, negativity_check, test_valuations, DiscrepancyDelta, StepLedger};
pub use run::{
    output_at_scale, push_divisor, restriction_is_big, run_mmp_with_scaling, verify_output_characterization,
    CharacterizationReport, MMPStep, MMPTrace, Outcome, ScaleOutput,
};
pub use scaling::{basepoint_free_check, good_scaling_report, is_good_scaling_divisor, is_semiample, GoodScalingReport};
pub use threshold::{
    ample_just_below, nef_threshold, rationality_check, select_extremal_ray, ExtremalRay, RationalityCheck, ScalingState,
};
