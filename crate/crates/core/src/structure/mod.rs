//! Sign consistency, total positivity, variation bounding and sequence shape.

pub mod report;
pub mod sequence;
pub mod sign;

pub use report::{
    classify, Property, Route, RouteStats, SequenceKind, SequenceReport, StructureReport, Witness,
    SIGN_TOL,
};
pub use sequence::{is_log_concave, is_unimodal};
pub use sign::{
    pena_row_set, pena_transform, verify_sign_consistent, verify_sign_consistent_with_cap,
    verify_totally_positive, verify_variation_bounding,
};
